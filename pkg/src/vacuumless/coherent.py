"""Coherent states of the doubled-space lowering operator.

For a weight sequence ``theta`` the state::

    Phi(z) = N(|z|) sum_k z^k / theta_k! Phi_k
    N(r)^-2 = sum_k r^(2k) / (theta_k!)^2

is an eigenvector of ``A`` for ``|z|`` inside the radius of convergence. This
module builds the states at adaptive truncation, checks the eigenvalue
equation, evaluates the uncertainty product two ways, and verifies candidate
radial measures against the moment condition ``2 pi int r^2k dlambda =
(theta_k!)^2`` and the resulting resolution of identity.

All sums run in ascending ``k`` and go through :func:`math.fsum` so results do
not depend on evaluation order. Factorials are handled in log space.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .doubled import ThetaSequence, apply_A

__all__ = [
    "CoherentState",
    "ConvergenceError",
    "DiskError",
    "QuadratureError",
    "QuadratureGrid",
    "Radius",
    "RadialMeasure",
    "UncertaintyResult",
    "build_coherent",
    "eigen_residual",
    "fit_single_atom",
    "make_quadrature",
    "moment_residual",
    "moment_table",
    "normalization",
    "radius_of_convergence",
    "resolution_matrix",
    "resolution_residual",
    "saturation_check",
    "support_on_boundary",
    "uncertainty_product",
]

MAX_TERMS = 1_000_000
SATURATION_ATOL = 1e-8


class DiskError(ValueError):
    """Label outside the disk of convergence."""


class ConvergenceError(RuntimeError):
    """Series did not reach the requested tolerance within the term cap."""


class QuadratureError(RuntimeError):
    """Quadrature disagrees with its node-doubled refinement."""


# ---------------------------------------------------------------------------
# radius of convergence

@dataclass(frozen=True)
class Radius:
    """Radius of the disk of convergence; ``value is None`` means unbounded."""

    value: float | None
    monotone_tail: bool = True

    @property
    def unbounded(self) -> bool:
        return self.value is None

    def contains(self, r: float) -> bool:
        return self.value is None or r < self.value

    def __str__(self):
        return "unbounded" if self.value is None else repr(self.value)


def radius_of_convergence(t: ThetaSequence, k_probe: int = 1024, growth: float = 0.1) -> Radius:
    """Estimate ``lim |theta_k|`` from the last quarter of ``1..k_probe``.

    The sequence is declared unbounded when the tail increments are all
    positive and the log-log slope between ``k_probe/2`` and ``k_probe``
    exceeds ``growth`` (``sqrt(k)`` has slope 1/2, a convergent sequence
    tends to 0). Otherwise the tail average is returned; an oscillating tail
    is reported through ``monotone_tail=False`` rather than repaired.
    """
    if k_probe < 8:
        raise ValueError("k_probe must be at least 8")
    cache = t.__dict__.setdefault("_radius_cache", {})
    key = (k_probe, growth)
    if key in cache:
        return cache[key]
    tail = np.abs([t(k) for k in range(k_probe - k_probe // 4, k_probe + 1)])
    steps = np.diff(tail)
    monotone = bool(np.all(steps >= 0) or np.all(steps <= 0))
    slope = math.log(abs(t(k_probe)) / abs(t(k_probe // 2))) / math.log(k_probe / (k_probe // 2))
    if np.all(steps > 0) and slope > growth:
        out = Radius(None, monotone)
    else:
        out = Radius(math.fsum(tail) / len(tail), monotone)
    cache[key] = out
    return out


# ---------------------------------------------------------------------------
# normalization and states

def _log_terms(t: ThetaSequence, r: float, tol: float, cap: int = MAX_TERMS):
    """Log of ``r^2k / (theta_k!)^2`` for ``k = 0..K`` with the tail below ``tol``.

    Stops at the first ``K`` where the ratio ``q = r^2 / theta_{K+1}^2`` is
    below one and ``term_K q / (1 - q)`` is below ``tol`` times the partial
    sum. The bound assumes ``|theta_k|`` is nondecreasing past ``K``.
    Returns ``(logs, log_tail_bound)``.
    """
    if r == 0:
        return np.zeros(1), -math.inf
    logr2 = 2 * math.log(r)
    logs = [0.0]
    log_sum = 0.0
    for k in range(cap):
        logq = logr2 - 2 * math.log(abs(t(k + 1)))
        if logq < 0:
            log_tail = logs[-1] + logq - math.log1p(-math.exp(logq))
            if log_tail < math.log(tol) + log_sum:
                return np.array(logs), log_tail
        nxt = logs[-1] + logq
        logs.append(nxt)
        log_sum = np.logaddexp(log_sum, nxt)
    raise ConvergenceError(f"series at r={r} did not converge within {cap} terms")


def _log_fsum_exp(logs) -> float:
    top = float(np.max(logs))
    return top + math.log(math.fsum(np.exp(np.asarray(logs) - top)))


def _check_disk(t: ThetaSequence, r: float):
    rho = radius_of_convergence(t)
    if not rho.contains(r):
        raise DiskError(f"|z| = {r!r} is not inside the disk of radius {rho}")


def log_normalization(t: ThetaSequence, r: float, tol: float = 1e-17) -> float:
    """``log N(r)``."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    _check_disk(t, r)
    logs, _ = _log_terms(t, r, tol)
    return -0.5 * _log_fsum_exp(logs)


def normalization(t: ThetaSequence, r: float, tol: float = 1e-17) -> float:
    """``N(r) = (sum_k r^2k / (theta_k!)^2)^(-1/2)``."""
    return math.exp(log_normalization(t, r, tol))


@dataclass
class CoherentState:
    z: complex
    K: int
    coeffs: np.ndarray
    normalization: float
    log_normalization: float
    tail_bound: float

    def norm(self) -> float:
        return math.sqrt(math.fsum(np.abs(self.coeffs) ** 2))

    def padded(self, extra: int) -> np.ndarray:
        return np.concatenate([self.coeffs, np.zeros(extra, dtype=complex)])


def build_coherent(t: ThetaSequence, z: complex, tol: float = 1e-14) -> CoherentState:
    """Truncated ``Phi(z)`` with dropped mass below ``tol``.

    ``K`` is the smallest order whose remaining mass, ``c_K`` included, is
    bounded below ``tol``; hence also ``sum_{k>K} |c_k|^2 < tol``.
    """
    z = complex(z)
    r = abs(z)
    logN = log_normalization(t, r)
    if r == 0:
        return CoherentState(z, 0, np.ones(1, dtype=complex), 1.0, 0.0, 0.0)

    logr2 = 2 * math.log(r)
    log_tol = math.log(tol)
    # |c_k|^2 in log space: 2 logN + k log r^2 - 2 log|theta_k!|
    logc2 = 2 * logN
    k = 0
    while True:
        q = math.exp(logr2 - 2 * math.log(abs(t(k + 1))))
        if q < 1:
            log_bound = logc2 - math.log1p(-q)
            if log_bound < log_tol:
                break
        k += 1
        if k > MAX_TERMS:
            raise ConvergenceError(f"state at z={z} needs more than {MAX_TERMS} terms")
        logc2 += logr2 - 2 * math.log(abs(t(k)))
    K = k
    lf, sign = t.log_factorials(K + 1)
    ks = np.arange(K + 1)
    mags = np.exp(logN + ks * math.log(r) - lf)
    coeffs = sign * mags * np.exp(1j * ks * np.angle(z))
    return CoherentState(z, K, coeffs, math.exp(logN), logN, math.exp(log_bound))


def eigen_residual(s: CoherentState, t: ThetaSequence) -> float:
    """``||A Phi(z) - z Phi(z)|| / ||Phi(z)||`` at truncation ``K``."""
    x = s.coeffs
    res = apply_A(t, x) - s.z * x
    return math.sqrt(math.fsum(np.abs(res) ** 2)) / s.norm()


# ---------------------------------------------------------------------------
# uncertainty

@dataclass(frozen=True)
class UncertaintyResult:
    direct: float
    closed_form: float
    commutator_bound: float

    @property
    def ratio(self) -> float:
        return self.direct / self.commutator_bound


def _expect(x, y) -> complex:
    """``<x, y>`` with a fixed summation order."""
    prod = np.conj(x) * y
    return complex(math.fsum(prod.real), math.fsum(prod.imag))


def uncertainty_product(t: ThetaSequence, z: complex, tol: float = 1e-16) -> UncertaintyResult:
    """``Delta X Delta P`` on ``Phi(z)`` with ``X, P`` the quadratures of ``A``.

    ``direct`` takes second moments of the operators applied to the state,
    padded so nothing is pushed past the truncation; ``closed_form`` is
    ``(||A^dag Phi||^2 - |z|^2) / 2``; ``commutator_bound`` is
    ``|<[X, P]>| / 2``.
    """
    s = build_coherent(t, z, tol)
    x = s.padded(3)
    n = len(x)
    theta = t.values(n)
    nrm2 = _expect(x, x).real

    def A(v):
        out = np.zeros_like(v)
        out[:-1] = theta[1:] * v[1:]
        return out

    def Ad(v):
        if v[-1] != 0:
            raise AssertionError("padding exhausted")
        out = np.zeros_like(v)
        out[1:] = theta[1:] * v[:-1]
        return out

    X = lambda v: (A(v) + Ad(v)) / math.sqrt(2)
    Pm = lambda v: (A(v) - Ad(v)) / (math.sqrt(2) * 1j)

    def variance(S):
        Sx = S(x)
        mean = _expect(x, Sx) / nrm2
        second = _expect(Sx, Sx).real / nrm2
        return second - abs(mean) ** 2

    vx, vp = variance(X), variance(Pm)
    direct = math.sqrt(max(vx, 0.0) * max(vp, 0.0))

    adx = Ad(x)
    closed = 0.5 * (_expect(adx, adx).real / nrm2 - abs(s.z) ** 2)

    comm = _expect(x, X(Pm(x)) - Pm(X(x))) / nrm2
    return UncertaintyResult(direct, closed, 0.5 * abs(comm))


def saturation_check(t: ThetaSequence, z: complex, atol: float = SATURATION_ATOL) -> bool:
    """True iff ``Delta X Delta P`` equals ``|<[X, P]>| / 2`` within ``atol``."""
    u = uncertainty_product(t, z)
    return abs(u.direct - u.commutator_bound) <= atol


# ---------------------------------------------------------------------------
# radial measures and quadrature

@dataclass
class RadialMeasure:
    """Candidate ``dlambda(r)`` on ``[0, R]``; ``R`` may be ``inf``.

    ``kind == "density"`` uses ``density(r)`` (vectorized, nonnegative) with
    optional ``breakpoints`` where it is not smooth; ``kind == "atomic"`` uses
    ``atoms = [(r, mass), ...]``.
    """

    kind: str
    density: Callable | None = None
    atoms: list = field(default_factory=list)
    support: tuple = (0.0, math.inf)
    breakpoints: Sequence[float] = ()
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("density", "atomic"):
            raise ValueError(f"kind must be 'density' or 'atomic', got {self.kind!r}")
        if self.kind == "density" and self.density is None:
            raise ValueError("density measure needs a density function")
        if self.kind == "atomic":
            if not self.atoms:
                raise ValueError("atomic measure needs at least one atom")
            for r, m in self.atoms:
                if r < 0 or m < 0:
                    raise ValueError(f"atom ({r}, {m}) must be nonnegative")
            self.support = (0.0, max(r for r, _ in self.atoms))

    @classmethod
    def choice3_gaussian(cls) -> "RadialMeasure":
        """``dlambda = r exp(-r^2) dr / pi``; moments ``k!``."""
        return cls("density", density=lambda r: r * np.exp(-r * r) / math.pi,
                   label="choice3-gaussian")

    @classmethod
    def choice1_atom(cls) -> "RadialMeasure":
        """Unit-radius atom of mass ``1/(2 pi)``; every moment is 1."""
        return cls("atomic", atoms=[(1.0, 1 / (2 * math.pi))], label="choice1-atom")

    @classmethod
    def from_csv(cls, path) -> "RadialMeasure":
        """Two-column ``r, density`` file read as a piecewise-linear density."""
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except (ValueError, IndexError):
                    if rows:
                        raise ValueError(f"bad measure row {row!r} in {path}") from None
                    continue  # header
        if len(rows) < 2:
            raise ValueError(f"measure file {path} needs at least two rows")
        rs, ds = map(np.array, zip(*sorted(rows)))
        if rs[0] < 0 or np.any(ds < 0) or np.any(np.diff(rs) <= 0):
            raise ValueError(f"measure file {path} must have distinct r >= 0 and density >= 0")
        return cls("density", density=lambda r: np.interp(r, rs, ds, left=0.0, right=0.0),
                   support=(float(rs[0]), float(rs[-1])), breakpoints=tuple(rs),
                   label=f"file:{path}")

    @classmethod
    def named(cls, name: str) -> "RadialMeasure":
        if name == "choice3-gaussian":
            return cls.choice3_gaussian()
        if name == "choice1-atom":
            return cls.choice1_atom()
        if name.startswith("file:"):
            return cls.from_csv(name[5:])
        raise ValueError(f"unknown measure {name!r}")


@dataclass(frozen=True)
class QuadratureGrid:
    """Radial nodes with weights that already include ``dlambda``, plus an
    angular order ``M`` (equispaced angles, weight ``2 pi / M``)."""

    nodes: np.ndarray
    weights: np.ndarray
    angular: int = 1

    def __post_init__(self):
        if np.any(self.weights < 0):
            raise ValueError("quadrature weights must be nonnegative")
        if self.angular < 1:
            raise ValueError("angular order must be positive")

    def integrate(self, g) -> float:
        return math.fsum(self.weights * g(self.nodes))

    def angles(self) -> np.ndarray:
        return 2 * math.pi * np.arange(self.angular) / self.angular


def _gauss_panels(edges, n):
    x, w = np.polynomial.legendre.leggauss(n)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (b + a))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _panel_grid(m: RadialMeasure, R: float, per_panel: int, panel_width: float):
    lo = m.support[0]
    cuts = {lo, R} | {b for b in m.breakpoints if lo < b < R}
    cuts = sorted(cuts)
    edges = [cuts[0]]
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = max(1, math.ceil((b - a) / panel_width))
        edges.extend(np.linspace(a, b, n + 1)[1:])
    nodes, weights = _gauss_panels(np.array(edges), per_panel)
    return nodes, weights * m.density(nodes)


def _log_integral(nodes, weights, power) -> float:
    """``log sum_i w_i r_i^power`` without overflow; ``-inf`` for an empty sum."""
    keep = (weights > 0) & ((nodes > 0) | (power == 0))
    if not np.any(keep):
        return -math.inf
    logs = np.log(weights[keep]) + (power * np.log(nodes[keep]) if power else 0.0)
    return _log_fsum_exp(logs)


def _cutoff(m: RadialMeasure, k_max: int, per_panel: int, tail_tol: float = 1e-12) -> float:
    """Upper radius so ``int_R^2R r^2k_max dlambda`` is below ``tail_tol`` of ``int_0^R``."""
    if math.isfinite(m.support[1]):
        return m.support[1]
    R = max(4.0, 2 * math.sqrt(k_max + 1))
    p = 2 * k_max
    for _ in range(40):
        width = max(1.0, R / 32)
        head = RadialMeasure("density", m.density, support=(m.support[0], R))
        tail = RadialMeasure("density", m.density, support=(R, 2 * R))
        h = _log_integral(*_panel_grid(head, R, per_panel, width), p)
        tl = _log_integral(*_panel_grid(tail, 2 * R, per_panel, width), p)
        if tl == -math.inf or tl - h <= math.log(tail_tol):
            return R
        R *= 1.5
    raise QuadratureError("could not find a radial cutoff for the measure tail")


def make_quadrature(m: RadialMeasure, k_max: int, angular: int = 1,
                    per_panel: int = 24, panel_width: float = 1.0) -> QuadratureGrid:
    """Composite Gauss-Legendre grid for ``m`` resolving ``r^(2 k_max)``.

    Unbounded supports are cut where the tail carries less than 1e-12 of the
    ``k_max``-th moment. Atomic measures use the atoms themselves.
    """
    if m.kind == "atomic":
        rs, ws = zip(*m.atoms)
        return QuadratureGrid(np.array(rs, float), np.array(ws, float), angular)
    per_panel = max(per_panel, k_max + 2)
    R = _cutoff(m, k_max, per_panel)
    nodes, weights = _panel_grid(m, R, per_panel, panel_width)
    return QuadratureGrid(nodes, weights, angular)


def _refined(m: RadialMeasure, k_max: int, quad: QuadratureGrid) -> QuadratureGrid | None:
    """Default grid with twice the nodes per panel; ``None`` for atoms."""
    if m.kind == "atomic":
        return None
    return make_quadrature(m, k_max, quad.angular, per_panel=2 * max(24, k_max + 2))


def _log_moments(quad: QuadratureGrid, k_max: int) -> np.ndarray:
    """``log(2 pi int r^2k dlambda)`` for ``k = 0..k_max``."""
    return np.array([math.log(2 * math.pi) + _log_integral(quad.nodes, quad.weights, 2 * k)
                     for k in range(k_max + 1)])


def _rel_gap(log_x: float, log_ref: float) -> float:
    """``|x - ref| / max(1, ref)`` from logarithms."""
    scale = max(0.0, log_ref)
    return abs(math.exp(log_x - scale) - math.exp(log_ref - scale))


def moment_table(m: RadialMeasure, t: ThetaSequence, k_max: int,
                 quad: QuadratureGrid | None = None, rtol: float = 1e-10) -> list:
    """Rows ``(k, moment, log target, target, residual)``.

    The target ``(theta_k!)^2`` is also given as a log-magnitude because it
    overflows quickly for fast-growing ``theta``. ``residual`` is
    ``|moment - target| / max(1, target)``. Raises :class:`QuadratureError`
    when a node-doubled grid disagrees by more than ``rtol``.
    """
    if quad is None:
        quad = make_quadrature(m, k_max)
    logm = _log_moments(quad, k_max)
    fine = _refined(m, k_max, quad)
    if fine is not None:
        logm2 = _log_moments(fine, k_max)
        drift = max(_rel_gap(x, y) for x, y in zip(logm, logm2))
        if drift > rtol:
            raise QuadratureError(f"node doubling changes the moments by {drift:.3g}")
    lf, _ = t.log_factorials(k_max + 1)
    rows = []
    for k in range(k_max + 1):
        log_target = 2 * lf[k]
        res = _rel_gap(logm[k], log_target)
        mom = math.exp(logm[k]) if logm[k] < 709 else math.inf
        target = math.exp(log_target) if log_target < 709 else math.inf
        rows.append((k, mom, log_target, target, res))
    return rows


def moment_residual(m: RadialMeasure, t: ThetaSequence, k_max: int,
                    quad: QuadratureGrid | None = None) -> float:
    """``max_k |2 pi int r^2k dlambda - (theta_k!)^2| / max(1, (theta_k!)^2)``."""
    return max(row[-1] for row in moment_table(m, t, k_max, quad))


def support_on_boundary(m: RadialMeasure, rho: Radius) -> bool:
    """True when the measure puts weight at or beyond the radius of convergence.

    Such a measure cannot live on the open disk where the states exist, so it
    does not give a genuine resolution of identity there.
    """
    if rho.unbounded:
        return False
    if m.kind == "atomic":
        return any(r >= rho.value and mass > 0 for r, mass in m.atoms)
    return m.support[1] >= rho.value


def fit_single_atom(t: ThetaSequence, k_max: int, rtol: float = 1e-12) -> RadialMeasure | None:
    """The one-atom measure matching the moments up to ``k_max``, if any.

    An atom of mass ``w`` at ``r0`` has moments ``2 pi w r0^2k``; the first two
    targets fix ``w = 1/(2 pi)`` and ``r0 = |theta_1|``, and the remaining
    ones must be consistent with that geometric sequence.
    """
    lf, _ = t.log_factorials(k_max + 1)
    r0 = abs(t(1))
    for k in range(k_max + 1):
        if abs(2 * lf[k] - 2 * k * math.log(r0)) > rtol * max(1.0, abs(2 * lf[k])):
            return None
    return RadialMeasure("atomic", atoms=[(r0, 1 / (2 * math.pi))], label="single atom")


# ---------------------------------------------------------------------------
# resolution of identity

def resolution_matrix(t: ThetaSequence, m: RadialMeasure, p_max: int,
                      quad: QuadratureGrid | None = None) -> np.ndarray:
    """``int dnu <Phi_p, Phi(z)><Phi(z), Phi_q> - delta_pq`` for ``p, q <= p_max``.

    ``dnu = N(|z|)^-2 dlambda(r) dtheta``. The overlap ``<Phi_p, Phi(z)> =
    N(r) z^p / theta_p!`` is evaluated at every node with ``N`` from the
    series, not cancelled analytically. The angular rule is exact for the
    trigonometric degrees involved once ``M >= 2 p_max + 3``.
    """
    M = 2 * p_max + 3
    if quad is None:
        quad = make_quadrature(m, p_max, angular=M)
    elif quad.angular < M:
        raise ValueError(f"angular order {quad.angular} too small; need at least {M}")
    ang = quad.angles()
    dth = 2 * math.pi / quad.angular
    lf, sign = t.log_factorials(p_max + 1)
    ks = np.arange(p_max + 1)

    out = np.zeros((p_max + 1, p_max + 1), dtype=complex)
    acc = [[[] for _ in ks] for _ in ks]
    for r, w in zip(quad.nodes, quad.weights):
        if w == 0:
            continue
        logN = log_normalization(t, float(r))
        for th in ang:
            if r == 0:
                ov = np.zeros(p_max + 1, dtype=complex)
                ov[0] = math.exp(logN)
            else:
                ov = sign * np.exp(logN + ks * math.log(r) - lf) * np.exp(1j * ks * th)
            weight = w * dth * math.exp(-2 * logN)
            outer = weight * np.outer(ov, np.conj(ov))
            for p in ks:
                for q in ks:
                    acc[p][q].append(outer[p, q])
    for p in ks:
        for q in ks:
            vals = np.array(acc[p][q])
            out[p, q] = complex(math.fsum(vals.real), math.fsum(vals.imag)) - (p == q)
    return out


def resolution_residual(t: ThetaSequence, m: RadialMeasure, p: int, q: int,
                        quad: QuadratureGrid | None = None) -> complex:
    return resolution_matrix(t, m, max(p, q), quad)[p, q]
