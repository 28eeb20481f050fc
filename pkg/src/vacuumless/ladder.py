"""Lowering/raising pair without a vacuum.

On an orthonormal basis ``phi_p`` (p in Z) the pair acts as::

    a phi_p = alpha_p phi_{p-1}          b phi_p = beta_{p+1} phi_{p+1}
    a^dag phi_p = alpha_{p+1} phi_{p+1}  b^dag phi_p = beta_p phi_{p-1}

With ``alpha_p beta_p = eps_p`` the product ``b a`` reproduces the spectrum.
Coefficients are real, so adjoints need no conjugation.

Vectors are finite windows of amplitudes. An operator whose image leaves the
window never wraps or clamps: in strict mode it raises
:class:`BoundaryError`, otherwise the escaping amplitude is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .spectra import IndexWindow, Spectrum

__all__ = [
    "BandedOperator",
    "BoundaryError",
    "FactorizationError",
    "LadderCoefficients",
    "TruncatedVector",
    "apply_lowering",
    "apply_lowering_adjoint",
    "apply_raising",
    "apply_raising_adjoint",
    "build_matrix",
    "commutator_ab_gap",
    "factorization_residual",
]

OPERATORS = ("a", "b", "a_dag", "b_dag")


class BoundaryError(ValueError):
    """An operator image left the finite window."""


class FactorizationError(ValueError):
    """Coefficients do not factorize the spectrum or vanish somewhere."""


class LadderCoefficients:
    """Real sequences ``alpha_p``, ``beta_p`` tied to a spectrum.

    Parameters
    ----------
    alpha, beta : callable
        ``int -> float``.
    spectrum : Spectrum
    label : str
    """

    def __init__(
        self,
        alpha: Callable[[int], float],
        beta: Callable[[int], float],
        spectrum: Spectrum,
        label: str = "",
    ):
        self._alpha = alpha
        self._beta = beta
        self.spectrum = spectrum
        self.label = label

    def alpha(self, p: int) -> float:
        return float(self._alpha(int(p)))

    def beta(self, p: int) -> float:
        return float(self._beta(int(p)))

    def with_overrides(self, alpha=None, beta=None, label=None) -> "LadderCoefficients":
        """Copy with individual entries replaced, e.g. ``beta={0: 7.0}``."""
        alpha = dict(alpha or {})
        beta = dict(beta or {})
        return LadderCoefficients(
            lambda p: alpha[p] if p in alpha else self.alpha(p),
            lambda p: beta[p] if p in beta else self.beta(p),
            self.spectrum,
            label=label or f"{self.label} (modified)",
        )

    def check(self, w: IndexWindow, tol: float = 1e-12) -> None:
        """Raise :class:`FactorizationError` unless the pair is valid on ``w``."""
        for p in w:
            a, b = self.alpha(p), self.beta(p)
            if a == 0 or b == 0:
                raise FactorizationError(f"zero coefficient at p={p}: alpha={a}, beta={b}")
        res = factorization_residual(self, w)
        if res > tol:
            raise FactorizationError(f"alpha*beta differs from eps by {res:.3g} on {w}")

    def __repr__(self):
        return f"LadderCoefficients({self.label!r})"


@dataclass
class TruncatedVector:
    """Amplitudes on ``phi_p`` for ``p`` in ``window``; zero elsewhere."""

    window: IndexWindow
    coeffs: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.coeffs is None:
            self.coeffs = np.zeros(len(self.window), dtype=complex)
        else:
            self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (len(self.window),):
            raise ValueError(
                f"coeffs shape {self.coeffs.shape} does not match window of size {len(self.window)}"
            )

    @classmethod
    def basis(cls, p: int, window: IndexWindow, amplitude: complex = 1.0) -> "TruncatedVector":
        v = cls(window)
        v.coeffs[window.offset(p)] = amplitude
        return v

    def __getitem__(self, p: int) -> complex:
        if p not in self.window:
            return 0j
        return self.coeffs[p - self.window.lo]

    @property
    def support(self) -> list:
        return [p for p, c in zip(self.window, self.coeffs) if c != 0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "TruncatedVector") -> complex:
        """``<self, other>``, antilinear in ``self``."""
        if self.window != other.window:
            raise ValueError("vectors live on different windows")
        return complex(np.vdot(self.coeffs, other.coeffs))

    def __add__(self, other):
        if self.window != other.window:
            raise ValueError("vectors live on different windows")
        return TruncatedVector(self.window, self.coeffs + other.coeffs)

    def __sub__(self, other):
        if self.window != other.window:
            raise ValueError("vectors live on different windows")
        return TruncatedVector(self.window, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return TruncatedVector(self.window, self.coeffs * scalar)

    __rmul__ = __mul__


def _shift_apply(v, weight, shift, strict, name):
    """``out_{p+shift} = weight(p) v_p`` for every ``p`` in the window."""
    w = v.window
    out = TruncatedVector(w)
    for p, amp in zip(w, v.coeffs):
        if amp == 0:
            continue
        target = p + shift
        if target not in w:
            if strict:
                raise BoundaryError(f"{name} maps phi_{p} to phi_{target}, outside [{w.lo}, {w.hi}]")
            continue
        out.coeffs[target - w.lo] += weight(p) * amp
    return out


def apply_lowering(c: LadderCoefficients, v: TruncatedVector, strict: bool = True) -> TruncatedVector:
    """``a phi_p = alpha_p phi_{p-1}``."""
    return _shift_apply(v, c.alpha, -1, strict, "a")


def apply_raising(c: LadderCoefficients, v: TruncatedVector, strict: bool = True) -> TruncatedVector:
    """``b phi_p = beta_{p+1} phi_{p+1}``."""
    return _shift_apply(v, lambda p: c.beta(p + 1), +1, strict, "b")


def apply_lowering_adjoint(
    c: LadderCoefficients, v: TruncatedVector, strict: bool = True
) -> TruncatedVector:
    """``a^dag phi_p = alpha_{p+1} phi_{p+1}``."""
    return _shift_apply(v, lambda p: c.alpha(p + 1), +1, strict, "a^dag")


def apply_raising_adjoint(
    c: LadderCoefficients, v: TruncatedVector, strict: bool = True
) -> TruncatedVector:
    """``b^dag phi_p = beta_p phi_{p-1}``."""
    return _shift_apply(v, c.beta, -1, strict, "b^dag")


_APPLY = {
    "a": apply_lowering,
    "b": apply_raising,
    "a_dag": apply_lowering_adjoint,
    "b_dag": apply_raising_adjoint,
}


def apply(c: LadderCoefficients, which: str, v: TruncatedVector, strict: bool = True) -> TruncatedVector:
    """Dispatch on ``which`` in ``{"a", "b", "a_dag", "b_dag"}``."""
    try:
        fn = _APPLY[which]
    except KeyError:
        raise ValueError(f"unknown operator {which!r}; expected one of {OPERATORS}") from None
    return fn(c, v, strict=strict)


def factorization_residual(c: LadderCoefficients, w: IndexWindow) -> float:
    """``max_p |alpha_p beta_p - eps_p|`` over ``w``."""
    return max(abs(c.alpha(p) * c.beta(p) - c.spectrum(p)) for p in w)


def commutator_ab_gap(c: LadderCoefficients, p: int) -> float:
    """Diagonal of ``[a, b]`` on ``phi_p``.

    ``a b phi_p = alpha_{p+1} beta_{p+1} phi_p`` and ``b a phi_p = alpha_p
    beta_p phi_p``. When the pair factorizes the spectrum this is
    ``eps_{p+1} - eps_p`` whatever the individual sequences are.
    """
    return c.alpha(p + 1) * c.beta(p + 1) - c.alpha(p) * c.beta(p)


@dataclass(frozen=True)
class BandedOperator:
    """Single off-diagonal operator restricted to a window.

    ``weights[i]`` multiplies the amplitude on ``phi_p`` with ``p`` the i-th
    index of ``window`` whose image ``phi_{p+offset}`` stays inside;
    ``boundary_rows`` lists the input indices whose image leaves the window.
    """

    window: IndexWindow
    offset: int
    weights: np.ndarray
    boundary_rows: frozenset
    name: str = ""

    @property
    def sources(self) -> list:
        return [p for p in self.window if p not in self.boundary_rows]

    def apply(self, v: TruncatedVector, strict: bool = True) -> TruncatedVector:
        if v.window != self.window:
            raise ValueError("vector and operator live on different windows")
        if strict:
            leaking = [p for p in v.support if p in self.boundary_rows]
            if leaking:
                raise BoundaryError(f"{self.name} has boundary rows {leaking} in the support")
        out = TruncatedVector(self.window)
        for p, wt in zip(self.sources, self.weights):
            out.coeffs[p + self.offset - self.window.lo] += wt * v[p]
        return out

    def to_dense(self) -> np.ndarray:
        """Dense ``[out, in]`` matrix; boundary columns are zero."""
        n = len(self.window)
        m = np.zeros((n, n))
        lo = self.window.lo
        for p, wt in zip(self.sources, self.weights):
            m[p + self.offset - lo, p - lo] = wt
        return m


_SPEC = {
    # name: (offset, weight as function of the source index)
    "a": (-1, lambda c, p: c.alpha(p)),
    "b": (+1, lambda c, p: c.beta(p + 1)),
    "a_dag": (+1, lambda c, p: c.alpha(p + 1)),
    "b_dag": (-1, lambda c, p: c.beta(p)),
}


def build_matrix(c: LadderCoefficients, which: str, w: IndexWindow) -> BandedOperator:
    """Banded representation of ``a``, ``b``, ``a^dag`` or ``b^dag`` on ``w``."""
    if which not in _SPEC:
        raise ValueError(f"unknown operator {which!r}; expected one of {OPERATORS}")
    offset, weight = _SPEC[which]
    boundary = frozenset(p for p in w if p + offset not in w)
    weights = np.array([weight(c, p) for p in w if p not in boundary], dtype=float)
    return BandedOperator(w, offset, weights, boundary, name=which)
