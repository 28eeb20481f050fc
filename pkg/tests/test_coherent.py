import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from vacuumless.coherent import (
    DiskError,
    QuadratureGrid,
    RadialMeasure,
    build_coherent,
    eigen_residual,
    fit_single_atom,
    make_quadrature,
    moment_residual,
    moment_table,
    normalization,
    radius_of_convergence,
    resolution_matrix,
    resolution_residual,
    saturation_check,
    support_on_boundary,
    uncertainty_product,
)
from vacuumless.doubled import ThetaSequence


def test_radius(thetas):
    assert radius_of_convergence(thetas[1]).value == 1
    assert radius_of_convergence(thetas[2]).unbounded
    assert radius_of_convergence(thetas[3]).unbounded
    const = ThetaSequence(lambda k: 2.5)
    assert radius_of_convergence(const).value == 2.5
    wobble = ThetaSequence(lambda k: 2 + (-1) ** k * 0.1)
    rho = radius_of_convergence(wobble)
    assert not rho.monotone_tail and rho.value == pytest.approx(2, abs=0.01)
    with pytest.raises(ValueError):
        radius_of_convergence(const, k_probe=4)


def test_normalization_examples(thetas):
    assert normalization(thetas[1], 0.6) == pytest.approx(0.8, abs=1e-15)
    for t in thetas.values():
        assert normalization(t, 0.0) == 1
    # oracle: sum r^2k / k! = exp(r^2)
    assert_allclose(normalization(thetas[3], 1.3), math.exp(-1.69 / 2), rtol=1e-14)


def test_normalization_choice1_grid(thetas):
    for i in range(1, 10):
        r = i / 10
        assert abs(normalization(thetas[1], r) - math.sqrt(1 - r * r)) <= 1e-10


def test_normalization_outside_disk(thetas):
    with pytest.raises(DiskError):
        normalization(thetas[1], 1.0)
    with pytest.raises(DiskError):
        build_coherent(thetas[1], 1.2j)


def test_build_coherent_zero(thetas):
    s = build_coherent(thetas[2], 0)
    assert s.K == 0 and s.coeffs.tolist() == [1]


def test_build_coherent_choice1(thetas):
    s = build_coherent(thetas[1], 0.5, tol=1e-14)
    k = np.arange(s.K + 1)
    assert_allclose(s.coeffs, math.sqrt(0.75) * 0.5 ** k, rtol=1e-14)


def test_build_coherent_choice3(thetas):
    z = 1 + 1j
    s = build_coherent(thetas[3], z, tol=1e-14)
    oracle = np.array([math.exp(-1) * z ** k / math.sqrt(math.factorial(k)) for k in range(s.K + 1)])
    assert_allclose(s.coeffs, oracle, rtol=1e-13, atol=1e-17)


def test_choice2_large_label(thetas):
    s = build_coherent(thetas[2], 10.0)
    assert np.all(np.isfinite(s.coeffs))
    assert abs(s.norm() ** 2 - 1) <= 1e-12
    assert eigen_residual(s, thetas[2]) <= 1e-6


@pytest.mark.parametrize("choice, z", [(1, 0.5), (1, 0.3 + 0.4j), (1, -0.8j), (3, 1), (3, 2 + 1j),
                                       (3, -1.5j), (2, 0.5), (2, 3 - 1j)])
def test_norm_within_tail(thetas, choice, z):
    s = build_coherent(thetas[choice], z, tol=1e-12)
    mass = s.norm() ** 2
    assert 1 - mass <= s.tail_bound + 1e-14
    assert 1 - mass >= -1e-14


def test_eigen_residual_examples(thetas):
    assert eigen_residual(build_coherent(thetas[1], 0), thetas[1]) == 0
    assert eigen_residual(build_coherent(thetas[1], 0.5, tol=1e-12), thetas[1]) <= 1e-6
    assert eigen_residual(build_coherent(thetas[3], 2 + 1j, tol=1e-14), thetas[3]) <= 1e-6


@pytest.mark.parametrize("choice, z", [(1, 0.7), (3, 2 - 1j), (2, 1.5)])
def test_eigen_residual_shrinks_with_tol(thetas, choice, z):
    prev = math.inf
    for tol in (1e-6, 1e-8, 1e-10, 1e-12, 1e-14):
        res = eigen_residual(build_coherent(thetas[choice], z, tol=tol), thetas[choice])
        assert res <= math.sqrt(tol) * abs(z) * 1.01
        assert res <= 2 * prev + 1e-15
        prev = res


def test_uncertainty_examples(thetas):
    assert uncertainty_product(thetas[1], 0.6 * np.exp(0.3j)).direct == pytest.approx(0.32, abs=1e-12)
    assert uncertainty_product(thetas[1], 0).direct == pytest.approx(0.5, abs=1e-12)
    for z in (0.2, 1 - 2j, 2.9j):
        assert uncertainty_product(thetas[3], z).direct == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("choice, radii", [(1, np.linspace(0, 0.9, 7)), (3, np.linspace(0, 3, 7)),
                                           (2, np.linspace(0, 3, 4))])
def test_direct_matches_closed_form(thetas, choice, radii):
    for r in radii:
        u = uncertainty_product(thetas[choice], r * np.exp(0.7j))
        assert abs(u.direct - u.closed_form) <= 1e-8 * max(1, u.closed_form)
        assert u.direct >= u.commutator_bound - 1e-10


def test_saturation(thetas):
    assert saturation_check(thetas[1], 0.3 + 0.4j)
    assert saturation_check(thetas[3], 1 - 2j)
    u = uncertainty_product(thetas[2], 0.5)
    assert u.ratio >= 1 - 1e-12  # reported only


def test_moments_gaussian_against_factorial(thetas):
    m = RadialMeasure.choice3_gaussian()
    rows = moment_table(m, thetas[3], 20)
    for k, mom, _, target, res in rows:
        assert target == pytest.approx(math.factorial(k), rel=1e-12)
        assert abs(mom - math.factorial(k)) / math.factorial(k) <= 1e-8
    assert moment_residual(m, thetas[3], 20) <= 1e-8
    fine = make_quadrature(m, 20, per_panel=60, panel_width=0.5)
    assert moment_residual(m, thetas[3], 20, fine) <= 1e-8


def test_moments_atom(thetas):
    m = RadialMeasure.choice1_atom()
    assert moment_residual(m, thetas[1], 30) == 0
    assert support_on_boundary(m, radius_of_convergence(thetas[1]))
    assert not support_on_boundary(m, radius_of_convergence(thetas[3]))


def test_moment_order_zero(thetas):
    unit = RadialMeasure("density", density=lambda r: np.where(r <= 1, 1 / (2 * math.pi), 0.0),
                         support=(0.0, 1.0))
    for t in thetas.values():
        assert moment_residual(unit, t, 0) <= 1e-14


def test_piecewise_linear_file(tmp_path, thetas):
    path = tmp_path / "m.csv"
    path.write_text("r,density\n0,0\n1,0.5\n2,0.25\n3,0\n")
    m = RadialMeasure.from_csv(path)

    # exact oracle: piecewise linear density integrates polynomials in closed form
    def exact(n):
        total = 0.0
        pts = [(0, 0), (1, 0.5), (2, 0.25), (3, 0)]
        for (a, fa), (b, fb) in zip(pts, pts[1:]):
            s = (fb - fa) / (b - a)
            c0 = fa - s * a
            total += c0 * (b ** (n + 1) - a ** (n + 1)) / (n + 1) + s * (b ** (n + 2) - a ** (n + 2)) / (n + 2)
        return total

    rows = moment_table(m, thetas[3], 6)
    for k, mom, *_ in rows:
        assert_allclose(mom, 2 * math.pi * exact(2 * k), rtol=1e-12)


def test_measure_file_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1\n")
    with pytest.raises(ValueError):
        RadialMeasure.from_csv(bad)
    with pytest.raises(ValueError):
        RadialMeasure.named("nope")


def test_fit_single_atom(thetas):
    atom = fit_single_atom(thetas[1], 40)
    assert atom.atoms == [(1.0, 1 / (2 * math.pi))]
    assert fit_single_atom(thetas[3], 5) is None
    assert fit_single_atom(thetas[2], 5) is None


def test_resolution_offdiagonal_vanishes(thetas):
    m = RadialMeasure.choice3_gaussian()
    assert abs(resolution_residual(thetas[3], m, 0, 3)) <= 1e-15
    wide = RadialMeasure("density", density=lambda r: np.where(r < 0.9, r, 0.0), support=(0.0, 0.9))
    assert abs(resolution_residual(thetas[1], wide, 0, 3)) <= 1e-15


def test_resolution_choice3(thetas):
    R = resolution_matrix(thetas[3], RadialMeasure.choice3_gaussian(), 10)
    assert np.max(np.abs(R)) <= 1e-6
    assert abs(R[5, 5]) <= 1e-6
    assert abs(R[0, 0]) <= 1e-6


def test_resolution_rejects_atom_on_boundary(thetas):
    with pytest.raises(DiskError):
        resolution_matrix(thetas[1], RadialMeasure.choice1_atom(), 2)


def test_resolution_angular_order_checked(thetas):
    grid = QuadratureGrid(np.array([1.0]), np.array([1.0]), angular=3)
    with pytest.raises(ValueError):
        resolution_matrix(thetas[3], RadialMeasure.choice3_gaussian(), 4, grid)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 0.95), st.floats(-math.pi, math.pi))
def test_choice1_state_properties(r, phase):
    from vacuumless.doubled import theta_from_coeffs
    from vacuumless.graphene import GrapheneParams, coefficients_for_choice

    t = theta_from_coeffs(coefficients_for_choice(GrapheneParams(), 1))
    z = r * complex(math.cos(phase), math.sin(phase))
    s = build_coherent(t, z, tol=1e-13)
    assert abs(s.normalization - math.sqrt(1 - r * r)) <= 1e-10
    assert eigen_residual(s, t) <= 1e-6
    u = uncertainty_product(t, z)
    assert abs(u.direct - 0.5 * (1 - r * r)) <= 1e-8
