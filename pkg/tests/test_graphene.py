import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from vacuumless.doubled import check_compatibility
from vacuumless.graphene import (
    GrapheneParams,
    ansatz_vector,
    build_HK_fock,
    build_HKprime_fock,
    coefficients_for_choice,
    fock_eigencheck,
    graphene_spectrum,
    landau_energy,
    map_phi_index,
)
from vacuumless.ladder import factorization_residual
from vacuumless.spectra import IndexWindow, assert_strictly_increasing


@pytest.mark.parametrize("c", [1.0, 0.37, 2.5])
def test_spectrum_values(c):
    s = graphene_spectrum(GrapheneParams(c))
    assert s(1) == 3 * c
    assert s(0) == c
    assert s(-4) == c * (1 - 4)
    assert assert_strictly_increasing(s, IndexWindow(-64, 64))


def test_params_validation():
    with pytest.raises(ValueError):
        GrapheneParams(c=0)
    with pytest.raises(ValueError):
        GrapheneParams(n1=-1)


def test_landau_energy():
    p = GrapheneParams()
    assert landau_energy(p, 0, 1) == 0 and landau_energy(p, 0, -1) == 0
    assert landau_energy(p, 4, 1) == 4
    for n2 in range(33):
        assert landau_energy(p, n2, 1) == -landau_energy(p, n2, -1)


@pytest.mark.parametrize("c", [1.0, 0.5])
def test_choice_examples(c):
    p = GrapheneParams(c)
    c1 = coefficients_for_choice(p, 1)
    assert c1.alpha(-4) == -3 * c and c1.beta(4) == 5 * c
    c2 = coefficients_for_choice(p, 2)
    assert c2.alpha(0) == pytest.approx(1 / 3, rel=1e-15) and c2.beta(0) == 3 * c
    assert c2.alpha(0) * c2.beta(0) == pytest.approx(c, rel=1e-15)
    c3 = coefficients_for_choice(p, 3)
    assert c3.alpha(-3) == pytest.approx(c / 2 * (1 - 2 * math.sqrt(3)), rel=1e-15)
    assert c3.beta(-3) == 2


@pytest.mark.parametrize("choice", [1, 2, 3])
@pytest.mark.parametrize("c", [1.0, 0.3])
def test_choices_factorize_and_are_compatible(choice, c):
    coeffs = coefficients_for_choice(GrapheneParams(c), choice)
    assert factorization_residual(coeffs, IndexWindow(-32, 32)) <= 1e-12 * max(1, c)
    assert check_compatibility(coeffs, 32)


def test_bad_choice():
    with pytest.raises(ValueError):
        coefficients_for_choice(GrapheneParams(), 4)


def test_map_phi_index():
    assert map_phi_index(3) == "v+(n2=3)"
    assert map_phi_index(0) == "v(n2=0)"
    assert map_phi_index(-2) == "v-(n2=2)"


def test_fock_matrix_basic():
    H = build_HK_fock(GrapheneParams(), 24)
    assert H.entries.shape == (50, 50)
    assert H.hermiticity_defect() == 0
    assert np.trace(H.entries) == 0
    assert np.all(H.entries[:25, :25] == 0) and np.all(H.entries[25:, 25:] == 0)


def test_fock_small_oracle():
    H = build_HK_fock(GrapheneParams(), 1)
    ev = np.sort(np.linalg.eigvalsh(H.entries))
    assert_allclose(ev, [-2, 0, 0, 2], atol=1e-14)


def test_ansatz_is_exact_eigenvector():
    p = GrapheneParams(0.7)
    N = 12
    H = build_HK_fock(p, N).entries
    for n2 in range(1, N + 1):
        for sign in (1, -1):
            v = ansatz_vector(N, n2, sign)
            assert_allclose(H @ v, landau_energy(p, n2, sign) * v, atol=1e-13)
    assert_allclose(H @ ansatz_vector(N, 0, 1), 0, atol=0)


def test_fock_eigencheck_N12():
    rep = fock_eigencheck(GrapheneParams(), 12)
    assert rep.passed()
    rows = {(r["n2"], r["sign"]): r for r in rep.rows}
    assert rows[(4, 1)]["eigenvalue"] == pytest.approx(4, abs=1e-10)
    assert rows[(4, -1)]["eigenvalue"] == pytest.approx(-4, abs=1e-10)
    assert abs(rows[(3, 1)]["overlap"] - 1) <= 1e-10
    assert abs(rep.zero_mode_overlap - 1) <= 1e-10


def test_fock_eigencheck_needs_room():
    with pytest.raises(ValueError):
        fock_eigencheck(GrapheneParams(), 3)


def test_kprime_same_spectrum():
    p = GrapheneParams()
    a = np.linalg.eigvalsh(build_HK_fock(p, 10).entries)
    b = np.linalg.eigvalsh(build_HKprime_fock(p, 10).entries)
    assert_allclose(np.sort(a), np.sort(b), atol=1e-12)


def test_abstract_spectrum_matches_fock():
    p = GrapheneParams()
    s = graphene_spectrum(p)
    ev = np.linalg.eigvalsh(build_HK_fock(p, 24).entries)
    for q in range(-22, 23):
        if q == 0:
            continue
        e = landau_energy(p, abs(q), 1 if q > 0 else -1)
        assert s(q) - p.c == pytest.approx(e, abs=1e-12)
        assert np.min(np.abs(ev - e)) <= 1e-10
