import pytest

from vacuumless.doubled import theta_from_coeffs
from vacuumless.graphene import GrapheneParams, coefficients_for_choice


@pytest.fixture(scope="session")
def params():
    return GrapheneParams(c=1.0)


@pytest.fixture(scope="session")
def coeffs(params):
    return {ch: coefficients_for_choice(params, ch) for ch in (1, 2, 3)}


@pytest.fixture(scope="session")
def thetas(coeffs):
    return {ch: theta_from_coeffs(c) for ch, c in coeffs.items()}
