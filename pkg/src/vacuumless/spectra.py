"""Bi-infinite real eigenvalue sequences.

A :class:`Spectrum` is a pure function ``p -> eps_p`` over the integers. Two
constructions derive new spectra from old ones without touching the
eigenvectors: a global shift by a constant and a finite deformation of a few
selected levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

__all__ = [
    "Deformation",
    "IndexWindow",
    "Spectrum",
    "assert_strictly_increasing",
    "deform_spectrum",
    "eval_spectrum",
    "shift_spectrum",
]


@dataclass(frozen=True)
class IndexWindow:
    """Closed integer interval ``[lo, hi]``."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty window [{self.lo}, {self.hi}]")

    @classmethod
    def parse(cls, text: str) -> "IndexWindow":
        """Parse ``"lo:hi"``."""
        lo, sep, hi = text.partition(":")
        if not sep:
            raise ValueError(f"window must look like 'lo:hi', got {text!r}")
        return cls(int(lo), int(hi))

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))

    def __contains__(self, p) -> bool:
        return self.lo <= p <= self.hi

    def offset(self, p: int) -> int:
        """Array position of index ``p``."""
        if p not in self:
            raise IndexError(f"index {p} outside window [{self.lo}, {self.hi}]")
        return p - self.lo


@dataclass(frozen=True)
class Deformation:
    """Finite set of levels ``q_j`` each moved by a nonzero ``delta_j``."""

    deltas: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for q, d in self.deltas.items():
            if d == 0:
                raise ValueError(f"deformation at q={q} must be nonzero")
        object.__setattr__(self, "deltas", dict(self.deltas))

    @property
    def indices(self) -> frozenset:
        return frozenset(self.deltas)


class Spectrum:
    """Real eigenvalues indexed by ``p`` in Z.

    Parameters
    ----------
    func : callable
        ``func(p) -> float``. Must be deterministic; results are memoized.
    label : str
        Human readable description.
    params : mapping, optional
        Free-form parameter record carried for reporting.
    monotone : bool
        Whether the construction guarantees strict increase. Deformed spectra
        are built with ``monotone=False``.
    factorizable : bool
        Whether the spectrum claims to be nowhere zero. Checked lazily by the
        ladder construction.
    """

    def __init__(
        self,
        func: Callable[[int], float],
        label: str = "",
        params: Mapping | None = None,
        monotone: bool = True,
        factorizable: bool = True,
    ):
        self._func = func
        # lru_cache is thread safe for reads and only ever stores pure results
        self._cached = lru_cache(maxsize=4096)(lambda p: float(func(p)))
        self.label = label
        self.params = dict(params or {})
        self.monotone = monotone
        self.factorizable = factorizable

    def __call__(self, p: int) -> float:
        return self._cached(int(p))

    def values(self, window: IndexWindow):
        """List of ``eps_p`` for ``p`` in ``window``."""
        return [self(p) for p in window]

    def __repr__(self):
        return f"Spectrum({self.label!r})"


def eval_spectrum(spec: Spectrum, p: int) -> float:
    return spec(p)


def shift_spectrum(spec: Spectrum, gamma: float) -> Spectrum:
    """Spectrum with every level moved by ``gamma``; eigenvectors unchanged."""
    if gamma == 0:
        return spec
    return Spectrum(
        lambda p: spec(p) + gamma,
        label=f"{spec.label} shifted by {gamma!r}",
        params={**spec.params, "gamma": gamma},
        monotone=spec.monotone,
        factorizable=spec.factorizable,
    )


def deform_spectrum(spec: Spectrum, d: Deformation) -> Spectrum:
    """Move the finitely many levels listed in ``d`` by their deltas.

    The result is never flagged monotone, since a large enough delta can
    reorder or merge levels.
    """
    if not d.deltas:
        return spec
    deltas = dict(d.deltas)
    return Spectrum(
        lambda p: spec(p) + deltas[p] if p in deltas else spec(p),
        label=f"{spec.label} deformed at {sorted(deltas)}",
        params={**spec.params, "deformation": deltas},
        monotone=False,
        factorizable=False,
    )


def assert_strictly_increasing(spec: Spectrum, w: IndexWindow) -> bool:
    """True iff ``spec`` is strictly increasing and nowhere zero on ``w``."""
    vals = spec.values(w)
    if any(v == 0 for v in vals):
        return False
    return all(a < b for a, b in zip(vals, vals[1:]))
