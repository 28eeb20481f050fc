"""Exit criteria for the library, shared by ``vacuumless report`` and the test suite.

Each check returns a :class:`CheckResult`; tolerances are fixed here and
nowhere else.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import coherent as coh
from .doubled import (
    apply_A,
    apply_A_tilde,
    apply_block_A,
    check_compatibility,
    make_phi,
    theta_from_coeffs,
    to_phi_coords,
)
from .graphene import GrapheneParams, coefficients_for_choice, fock_eigencheck
from .ladder import LadderCoefficients, commutator_ab_gap, factorization_residual
from .spectra import IndexWindow

CHOICE1_UNCERTAINTY_RADII = (0.0, 0.3, 0.6, 0.9)
CHOICE3_SAMPLES = (0.5, 1 + 1j, -2.0, 1.5 - 2j, 3j)


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.3f} s)"


def _thetas(params):
    return {ch: theta_from_coeffs(coefficients_for_choice(params, ch)) for ch in (1, 2, 3)}


def check_factorization(params=GrapheneParams()):
    t0 = time.perf_counter()
    w = IndexWindow(-32, 32)
    res = {ch: factorization_residual(coefficients_for_choice(params, ch), w) for ch in (1, 2, 3)}
    dt = time.perf_counter() - t0
    worst = max(res.values())
    ok = worst <= 1e-12 and dt < 1.0
    return ok, f"max |alpha beta - eps| = {worst:.3g} (<= 1e-12), runtime < 1 s", dt


def check_compatibility_theta(params=GrapheneParams()):
    ok = all(check_compatibility(coefficients_for_choice(params, ch), 32, rtol=1e-14)
             for ch in (1, 2, 3))
    t3 = theta_from_coeffs(coefficients_for_choice(params, 3))
    exact = all(t3(k) == math.sqrt(k) for k in range(0, 33))
    return ok and exact, f"alpha_k = beta_(1-k) for k <= 32: {ok}; choice 3 theta_k == sqrt(k): {exact}"


def check_normalization(params=GrapheneParams()):
    t0 = time.perf_counter()
    t1 = theta_from_coeffs(coefficients_for_choice(params, 1))
    err = max(abs(coh.normalization(t1, r / 10) - math.sqrt(1 - (r / 10) ** 2)) for r in range(1, 10))
    dt = time.perf_counter() - t0
    return err <= 1e-10 and dt < 1.0, f"max |N(r) - sqrt(1-r^2)| = {err:.3g} (<= 1e-10)", dt


def check_eigenvalue(params=GrapheneParams()):
    th = _thetas(params)
    cases = [(1, 0.5), (1, 0.3 + 0.4j), (3, 1.0), (3, 2 + 1j), (3, -1.5j)]
    worst = max(coh.eigen_residual(coh.build_coherent(th[ch], z, tol=1e-14), th[ch])
                for ch, z in cases)
    return worst <= 1e-6, f"max eigen residual = {worst:.3g} (<= 1e-6)"


def check_uncertainty(params=GrapheneParams()):
    th = _thetas(params)
    e1 = max(abs(coh.uncertainty_product(th[1], r).direct - 0.5 * (1 - r * r))
             for r in CHOICE1_UNCERTAINTY_RADII)
    e3 = max(abs(coh.uncertainty_product(th[3], z).direct - 0.5) for z in CHOICE3_SAMPLES)
    agree = max(
        abs(u.direct - u.closed_form)
        for u in itertools.chain(
            (coh.uncertainty_product(th[1], r) for r in CHOICE1_UNCERTAINTY_RADII),
            (coh.uncertainty_product(th[3], z) for z in CHOICE3_SAMPLES),
        )
    )
    ok = e1 <= 1e-8 and e3 <= 1e-8 and agree <= 1e-8
    return ok, f"choice 1 err {e1:.3g}, choice 3 err {e3:.3g}, direct vs closed {agree:.3g} (all <= 1e-8)"


def check_saturation(params=GrapheneParams()):
    th = _thetas(params)
    s1 = all(coh.saturation_check(th[1], r) for r in CHOICE1_UNCERTAINTY_RADII)
    s3 = all(coh.saturation_check(th[3], z) for z in CHOICE3_SAMPLES)
    return s1 and s3, f"choice 1 saturates: {s1}; choice 3 saturates: {s3}"


def check_moments(params=GrapheneParams()):
    t0 = time.perf_counter()
    t3 = theta_from_coeffs(coefficients_for_choice(params, 3))
    m = coh.RadialMeasure.choice3_gaussian()
    try:
        res = coh.moment_residual(m, t3, 20)
        fine = coh.make_quadrature(m, 20, per_panel=2 * 24)
        res_fine = coh.moment_residual(m, t3, 20, fine)
    except coh.QuadratureError as exc:
        return False, f"quadrature unstable: {exc}", time.perf_counter() - t0
    dt = time.perf_counter() - t0
    worst = max(res, res_fine)
    return worst <= 1e-8 and dt < 5.0, f"max rel moment residual k <= 20 = {worst:.3g} (<= 1e-8), doubled grid {res_fine:.3g}", dt


def check_resolution(params=GrapheneParams()):
    t0 = time.perf_counter()
    t3 = theta_from_coeffs(coefficients_for_choice(params, 3))
    R = coh.resolution_matrix(t3, coh.RadialMeasure.choice3_gaussian(), 10)
    dt = time.perf_counter() - t0
    worst = float(np.max(np.abs(R)))
    return worst <= 1e-6 and dt < 30.0, f"max |residual(p,q)| p,q <= 10 = {worst:.3g} (<= 1e-6)", dt


def check_choice1_obstruction(params=GrapheneParams()):
    t1 = theta_from_coeffs(coefficients_for_choice(params, 1))
    atom = coh.fit_single_atom(t1, 32)
    if atom is None:
        return False, "no single-atom solution found"
    (r0, mass), = atom.atoms
    flag = coh.support_on_boundary(atom, coh.radius_of_convergence(t1))
    res = coh.moment_residual(atom, t1, 32)
    ok = r0 == 1.0 and abs(mass - 1 / (2 * math.pi)) <= 1e-15 and flag and res <= 1e-12
    return ok, f"atom at r={r0!r} mass*2pi={mass * 2 * math.pi!r}, boundary flag {flag}, moment residual {res:.3g}"


def check_fock(params=GrapheneParams()):
    t0 = time.perf_counter()
    rep = fock_eigencheck(params, 24)
    dt = time.perf_counter() - t0
    ok = rep.passed(1e-10) and dt < 5.0
    return ok, (f"hermiticity defect {rep.hermiticity_defect!r}, eigenvalue err {rep.max_eigenvalue_error:.3g}, "
                f"overlap defect {rep.max_overlap_defect:.3g}, zero mode overlap {rep.zero_mode_overlap:.17g}"), dt


def gap_formula(c: float, p: int) -> float:
    if p >= 1:
        return 2 * c * (math.sqrt(p + 1) - math.sqrt(p))
    if p in (-1, 0):
        return 2 * c
    return 2 * c * (math.sqrt(-p) - math.sqrt(-p - 1))


def check_commutator(params=GrapheneParams()):
    coeffs = [coefficients_for_choice(params, ch) for ch in (1, 2, 3)]
    pair = formula = 0.0
    for p in range(-16, 17):
        gaps = [commutator_ab_gap(c, p) for c in coeffs]
        pair = max(pair, max(abs(x - y) for x, y in itertools.combinations(gaps, 2)))
        formula = max(formula, max(abs(g - gap_formula(params.c, p)) for g in gaps))
    ok = pair <= 1e-12 and formula <= 1e-12
    return ok, f"pairwise {pair:.3g}, vs formula {formula:.3g} (<= 1e-12)"


def _unconstrained_pair(params, seed=7):
    """Factorizing pair with ``alpha_1 = beta_0`` but otherwise random."""
    base = coefficients_for_choice(params, 3)
    rng = np.random.default_rng(seed)
    lo, hi = -20, 20
    alpha = {p: float(rng.uniform(0.5, 2.0) * rng.choice([-1, 1])) for p in range(lo, hi + 1)}
    alpha[0] = 1.0
    beta = {p: base.spectrum(p) / alpha[p] for p in alpha}
    beta[0] = alpha[1]
    alpha[0] = base.spectrum(0) / beta[0]
    return LadderCoefficients(alpha.__getitem__, beta.__getitem__, base.spectrum, label="random")


def check_structural_A(params=GrapheneParams()):
    w = IndexWindow(-16, 16)
    worst_block = 0.0
    for ch in (1, 2, 3):
        c = coefficients_for_choice(params, ch)
        t = theta_from_coeffs(c)
        for k in range(0, 13):
            built = to_phi_coords(apply_block_A(c, make_phi(k, w)), 13)
            e = np.zeros(14, dtype=complex)
            e[k] = 1
            rule = apply_A(t, e)
            worst_block = max(worst_block, float(np.max(np.abs(built - rule))))
    worst_tilde = 0.0
    sets = [coefficients_for_choice(params, ch) for ch in (1, 2, 3)] + [_unconstrained_pair(params)]
    for c in sets:
        for k in range(0, 13):
            out = to_phi_coords(apply_A_tilde(c, make_phi(k, w)), 13)
            want = np.zeros(14)
            if k:
                want[k - 1] = math.sqrt(k)
            worst_tilde = max(worst_tilde, float(np.max(np.abs(out - want))))
    ok = worst_block <= 1e-13 and worst_tilde <= 1e-13
    return ok, f"block vs theta rule {worst_block:.3g}, A-tilde vs sqrt(k) {worst_tilde:.3g} (<= 1e-13)"


CRITERIA: list[tuple[int, str, Callable]] = [
    (1, "factorization", check_factorization),
    (2, "compatibility and theta", check_compatibility_theta),
    (3, "closed-form normalization", check_normalization),
    (4, "eigenvalue property", check_eigenvalue),
    (5, "uncertainty product", check_uncertainty),
    (6, "saturation", check_saturation),
    (7, "moments", check_moments),
    (8, "resolution of identity", check_resolution),
    (9, "choice 1 obstruction", check_choice1_obstruction),
    (10, "Fock oracle", check_fock),
    (11, "commutator independence", check_commutator),
    (12, "structural A-check", check_structural_A),
]


def run_criterion(number: int, params=GrapheneParams()) -> CheckResult:
    num, name, fn = next(c for c in CRITERIA if c[0] == number)
    t0 = time.perf_counter()
    out = fn(params)
    elapsed = time.perf_counter() - t0
    passed, detail = out[0], out[1]
    return CheckResult(num, name, bool(passed), detail, out[2] if len(out) > 2 else elapsed)


def run_all(params=GrapheneParams()) -> list[CheckResult]:
    return [run_criterion(num, params) for num, _, _ in CRITERIA]
