"""Doubled Hilbert space and its lowering operator.

Vectors of ``H (+) H`` are pairs of truncated vectors. The family::

    Phi_k = (phi_k, phi_{-k}) / sqrt(2),   k >= 0

is orthonormal but not total. On it the block operator
``A = diag(Q_{-1} a, Q_1 b)`` lowers, ``A Phi_k = theta_k Phi_{k-1}``, with
``theta_0 = 0`` and ``theta_k = alpha_k = beta_{1-k}``.

Two coordinate systems coexist: raw pairs (:class:`DoubledVector`) and
Phi-coordinates (a plain array over ``k = 0..K``). Conversions between them
are explicit.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ladder import (
    BoundaryError,
    FactorizationError,
    LadderCoefficients,
    TruncatedVector,
    apply_lowering,
    apply_raising,
)
from .spectra import IndexWindow

__all__ = [
    "CompatibilityError",
    "DoubledVector",
    "Projector",
    "RDiagonal",
    "ThetaSequence",
    "apply_A",
    "apply_A_adjoint",
    "apply_A_tilde",
    "apply_block_A",
    "build_R",
    "check_compatibility",
    "commutator_AAdag_diag",
    "from_phi_coords",
    "make_phi",
    "nontotality_witness",
    "theta_from_coeffs",
    "to_phi_coords",
]

DEFAULT_TRUNCATION = 64
_SQRT2 = math.sqrt(2.0)


class CompatibilityError(ValueError):
    """``alpha_k != beta_{1-k}`` for some ``k >= 1``."""


@dataclass
class DoubledVector:
    upper: TruncatedVector
    lower: TruncatedVector

    def __post_init__(self):
        if self.upper.window != self.lower.window:
            raise ValueError("upper and lower components must share a window")

    @property
    def window(self) -> IndexWindow:
        return self.upper.window

    @classmethod
    def zeros(cls, w: IndexWindow) -> "DoubledVector":
        return cls(TruncatedVector(w), TruncatedVector(w))

    def inner(self, other: "DoubledVector") -> complex:
        return self.upper.inner(other.upper) + self.lower.inner(other.lower)

    def norm(self) -> float:
        return math.sqrt(self.upper.norm() ** 2 + self.lower.norm() ** 2)

    def __add__(self, other):
        return DoubledVector(self.upper + other.upper, self.lower + other.lower)

    def __sub__(self, other):
        return DoubledVector(self.upper - other.upper, self.lower - other.lower)

    def __mul__(self, s):
        return DoubledVector(self.upper * s, self.lower * s)

    __rmul__ = __mul__


def make_phi(k: int, w: IndexWindow) -> DoubledVector:
    """``Phi_k = (phi_k, phi_{-k}) / sqrt(2)``."""
    if k < 0:
        raise ValueError("Phi_k needs k >= 0")
    if k not in w or -k not in w:
        raise ValueError(f"window [{w.lo}, {w.hi}] too small for Phi_{k}")
    return DoubledVector(
        TruncatedVector.basis(k, w, 1 / _SQRT2),
        TruncatedVector.basis(-k, w, 1 / _SQRT2),
    )


def nontotality_witness(w: IndexWindow) -> DoubledVector:
    """``(phi_1, -phi_{-1})``: nonzero and orthogonal to every ``Phi_k``."""
    if 1 not in w or -1 not in w:
        raise ValueError("window must contain -1 and 1")
    return DoubledVector(TruncatedVector.basis(1, w), TruncatedVector.basis(-1, w, -1.0))


def to_phi_coords(f: DoubledVector, K: int, tol: float | None = 1e-12) -> np.ndarray:
    """Components ``<Phi_k, f>`` for ``k = 0..K``.

    With ``tol`` set, raise if ``f`` has weight outside the span of
    ``Phi_0..Phi_K`` larger than ``tol`` (absolute, in norm).
    """
    w = f.window
    if K not in w or -K not in w:
        raise ValueError(f"window [{w.lo}, {w.hi}] too small for K={K}")
    x = np.array([(f.upper[k] + f.lower[-k]) / _SQRT2 for k in range(K + 1)], dtype=complex)
    if tol is not None:
        rest = f - from_phi_coords(x, w)
        if rest.norm() > tol:
            raise ValueError(f"vector has norm {rest.norm():.3g} outside span(Phi_0..Phi_{K})")
    return x


def from_phi_coords(x, w: IndexWindow) -> DoubledVector:
    x = np.asarray(x, dtype=complex)
    out = DoubledVector.zeros(w)
    for k, xk in enumerate(x):
        if xk != 0:
            out = out + make_phi(k, w) * xk
    return out


class Projector:
    """Rank-one ``P_q f = <phi_q, f> phi_q`` or its complement ``Q_q = 1 - P_q``."""

    def __init__(self, q: int, complement: bool = False):
        self.q = q
        self.complement = complement

    def __call__(self, v: TruncatedVector) -> TruncatedVector:
        out = TruncatedVector(v.window)
        if self.q in v.window:
            i = v.window.offset(self.q)
            if self.complement:
                out.coeffs[:] = v.coeffs
                out.coeffs[i] = 0
            else:
                out.coeffs[i] = v.coeffs[i]
        elif self.complement:
            out.coeffs[:] = v.coeffs
        return out

    def __repr__(self):
        return f"{'Q' if self.complement else 'P'}_{self.q}"


def P(q: int) -> Projector:
    return Projector(q)


def Q(q: int) -> Projector:
    return Projector(q, complement=True)


def apply_block_A(c: LadderCoefficients, f: DoubledVector, strict: bool = True) -> DoubledVector:
    """``diag(Q_{-1} a, Q_1 b) f`` built from the projector and ladder primitives."""
    return DoubledVector(
        Q(-1)(apply_lowering(c, f.upper, strict=strict)),
        Q(1)(apply_raising(c, f.lower, strict=strict)),
    )


def check_compatibility(c: LadderCoefficients, k_max: int, rtol: float = 1e-14) -> bool:
    """True iff ``alpha_k == beta_{1-k}`` (relative ``rtol``) for ``1 <= k <= k_max``."""
    for k in range(1, k_max + 1):
        a, b = c.alpha(k), c.beta(1 - k)
        if abs(a - b) > rtol * max(abs(a), abs(b)):
            return False
    return True


class ThetaSequence:
    """Lowering weights ``theta_k`` with ``theta_0 = 0``.

    ``log_factorial(k)`` returns ``(log|theta_k!|, sign)`` with
    ``theta_0! = 1`` and ``theta_k! = theta_1 ... theta_k``; it is
    accumulated in log space so fast-growing sequences never overflow.
    """

    def __init__(self, func: Callable[[int], float], label: str = "", source=None):
        self._func = func
        self.label = label
        self.source = source
        self._logfact = [0.0]
        self._signs = [1.0]
        self._lock = threading.Lock()

    def __call__(self, k: int) -> float:
        if k < 0:
            raise ValueError("theta_k needs k >= 0")
        if k == 0:
            return 0.0
        t = float(self._func(k))
        if t == 0:
            raise ValueError(f"theta_{k} vanishes")
        return t

    def values(self, n: int) -> np.ndarray:
        """``theta_0 .. theta_{n-1}``."""
        return np.array([self(k) for k in range(n)])

    def _extend(self, k: int):
        with self._lock:
            while len(self._logfact) <= k:
                j = len(self._logfact)
                t = self(j)
                self._logfact.append(self._logfact[-1] + math.log(abs(t)))
                self._signs.append(self._signs[-1] * math.copysign(1.0, t))

    def log_factorial(self, k: int) -> tuple:
        self._extend(k)
        return self._logfact[k], self._signs[k]

    def log_factorials(self, n: int) -> tuple:
        """Arrays ``(log|theta_k!|, sign)`` for ``k = 0..n-1``."""
        self._extend(n - 1)
        return np.array(self._logfact[:n]), np.array(self._signs[:n])

    def factorial(self, k: int) -> float:
        lf, s = self.log_factorial(k)
        return s * math.exp(lf)

    @classmethod
    def from_function(cls, func, label=""):
        return cls(func, label=label)

    def __repr__(self):
        return f"ThetaSequence({self.label!r})"


def theta_from_coeffs(c: LadderCoefficients, k_max: int = DEFAULT_TRUNCATION) -> ThetaSequence:
    """``theta_k = alpha_k`` for ``k >= 1``, after checking compatibility up to ``k_max``."""
    for bad in range(1, k_max + 1):
        if check_compatibility(c, bad):
            continue
        raise CompatibilityError(
            f"alpha_{bad} = {c.alpha(bad)!r} differs from beta_{1 - bad} = {c.beta(1 - bad)!r}"
        )
    return ThetaSequence(c.alpha, label=f"theta from {c.label}", source=c)


def apply_A(t: ThetaSequence, x) -> np.ndarray:
    """``A Phi_k = theta_k Phi_{k-1}`` in Phi-coordinates; ``A Phi_0 = 0``."""
    x = np.asarray(x, dtype=complex)
    out = np.zeros_like(x)
    if len(x) > 1:
        out[:-1] = t.values(len(x))[1:] * x[1:]
    return out


def apply_A_adjoint(t: ThetaSequence, x, strict: bool = True) -> np.ndarray:
    """``A^dag Phi_k = theta_{k+1} Phi_{k+1}``.

    The top coordinate ``K`` maps to ``K+1``, outside the truncation; in
    strict mode a nonzero amplitude there raises :class:`BoundaryError`.
    """
    x = np.asarray(x, dtype=complex)
    if strict and len(x) and x[-1] != 0:
        raise BoundaryError(f"A^dag pushes Phi_{len(x) - 1} past the truncation")
    out = np.zeros_like(x)
    if len(x) > 1:
        out[1:] = t.values(len(x))[1:] * x[:-1]
    return out


def lowering_matrix(t: ThetaSequence, n: int) -> np.ndarray:
    """Dense ``n x n`` matrix of ``A`` in Phi-coordinates."""
    return np.diag(t.values(n)[1:], k=1)


def commutator_AAdag_diag(t: ThetaSequence, k: int) -> float:
    """``theta_{k+1}^2 - theta_k^2``."""
    return t(k + 1) ** 2 - t(k) ** 2


class RDiagonal:
    """Diagonal ``R`` rescaling the block operator to ``sqrt(k)`` weights.

    ``R phi_p = sqrt(p+1)/alpha_{p+1} phi_p`` for ``p >= 0`` and
    ``sqrt(1-p)/beta_p phi_p`` for ``p <= 0``; both branches meet at
    ``p = 0`` only when ``alpha_1 == beta_0``.
    """

    def __init__(self, c: LadderCoefficients, rtol: float = 1e-14):
        a1, b0 = c.alpha(1), c.beta(0)
        if abs(a1 - b0) > rtol * max(abs(a1), abs(b0)):
            raise FactorizationError(f"R is ambiguous on phi_0: alpha_1={a1!r} != beta_0={b0!r}")
        self.coeffs = c

    def weight(self, p: int) -> float:
        if p >= 0:
            a = self.coeffs.alpha(p + 1)
            if a == 0:
                raise FactorizationError(f"alpha_{p + 1} vanishes")
            return math.sqrt(p + 1) / a
        b = self.coeffs.beta(p)
        if b == 0:
            raise FactorizationError(f"beta_{p} vanishes")
        return math.sqrt(1 - p) / b

    def __call__(self, v: TruncatedVector) -> TruncatedVector:
        out = TruncatedVector(v.window)
        for i, (p, amp) in enumerate(zip(v.window, v.coeffs)):
            if amp != 0:
                out.coeffs[i] = self.weight(p) * amp
        return out


def build_R(c: LadderCoefficients) -> RDiagonal:
    return RDiagonal(c)


def apply_A_tilde(c: LadderCoefficients, f: DoubledVector, strict: bool = True) -> DoubledVector:
    """``diag(R Q_{-1} a, R Q_1 b) f``; lowers ``Phi_k`` with weight ``sqrt(k)``."""
    R = build_R(c)
    return DoubledVector(
        R(Q(-1)(apply_lowering(c, f.upper, strict=strict))),
        R(Q(1)(apply_raising(c, f.lower, strict=strict))),
    )
