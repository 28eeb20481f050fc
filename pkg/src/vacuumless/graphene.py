"""Graphene at the K Dirac point in a constant magnetic field.

Everything is expressed in units of ``c = v_F / xi``. The shifted Hamiltonian
``H = H_K + c`` has levels::

    eps_p = c (1 + 2 sqrt(p))    p >= 1
    eps_0 = c
    eps_p = c (1 - 2 sqrt(-p))   p <= -1

with ``phi_p = v+_{p}`` for ``p >= 1``, ``v_0`` for ``p = 0`` and ``v-_{-p}``
for ``p <= -1``. The ``n1`` degeneracy label is carried as metadata only:
all computations live in a fixed-``n1`` sector.

``build_HK_fock`` gives an independent check on the levels: the truncated
two-component Fock matrix of ``H_K`` is diagonalized densely and compared
against ``+-2c sqrt(n2)`` and the ``(e_n, -+i e_{n-1})/sqrt(2)`` eigenvectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ladder import LadderCoefficients
from .spectra import Spectrum

__all__ = [
    "FockBlockMatrix",
    "FockReport",
    "GrapheneParams",
    "build_HK_fock",
    "build_HKprime_fock",
    "coefficients_for_choice",
    "fock_eigencheck",
    "graphene_spectrum",
    "landau_energy",
    "map_phi_index",
]

CHOICES = (1, 2, 3)


@dataclass(frozen=True)
class GrapheneParams:
    c: float = 1.0
    n1: int = 0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"energy scale c must be positive, got {self.c}")
        if self.n1 < 0:
            raise ValueError("n1 must be nonnegative")


def _eps(c: float, p: int) -> float:
    if p >= 1:
        return c * (1 + 2 * math.sqrt(p))
    if p == 0:
        return c
    return c * (1 - 2 * math.sqrt(-p))


def graphene_spectrum(params: GrapheneParams = GrapheneParams()) -> Spectrum:
    c = params.c
    return Spectrum(
        lambda p: _eps(c, p),
        label=f"graphene (c={c!r})",
        params={"c": c, "n1": params.n1},
    )


def landau_energy(params: GrapheneParams, n2: int, sign: int) -> float:
    """Unshifted ``H_K`` level ``E^{+-}_{n2} = +-2c sqrt(n2)``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if n2 < 0:
        raise ValueError("n2 must be nonnegative")
    return sign * 2 * params.c * math.sqrt(n2)


def map_phi_index(p: int) -> str:
    """Label of the ``H_K`` eigenvector playing the role of ``phi_p``."""
    if p >= 1:
        return f"v+(n2={p})"
    if p == 0:
        return "v(n2=0)"
    return f"v-(n2={-p})"


def _choice1(c):
    alpha = lambda p: 1.0 if p >= 1 else c * (1 - 2 * math.sqrt(-p))
    beta = lambda p: c * (1 + 2 * math.sqrt(p)) if p >= 1 else 1.0
    return alpha, beta


def _choice2(c):
    def alpha(p):
        if p >= 1:
            return c * (1 + 2 * math.sqrt(p))
        return (1 - 2 * math.sqrt(-p)) / (1 + 2 * math.sqrt(1 - p))

    beta = lambda p: 1.0 if p >= 1 else c * (1 + 2 * math.sqrt(1 - p))
    return alpha, beta


def _choice3(c):
    def alpha(p):
        if p >= 1:
            return math.sqrt(p)
        return c * (1 - 2 * math.sqrt(-p)) / math.sqrt(1 - p)

    def beta(p):
        if p >= 1:
            return c * (1 + 2 * math.sqrt(p)) / math.sqrt(p)
        return math.sqrt(1 - p)

    return alpha, beta


_CHOICES = {1: _choice1, 2: _choice2, 3: _choice3}


def coefficients_for_choice(
    params: GrapheneParams = GrapheneParams(), choice: int = 3
) -> LadderCoefficients:
    """One of the three factorizations of the graphene spectrum.

    1. ``alpha_p = 1`` above zero; ``theta_k = 1`` (bounded, radius 1).
    2. ``beta_p = 1`` above zero; ``theta_k = c(1 + 2 sqrt(k))``.
    3. ``alpha_p = sqrt(p)`` above zero; ``theta_k = sqrt(k)`` (canonical).
    """
    try:
        make = _CHOICES[int(choice)]
    except (KeyError, ValueError):
        raise ValueError(f"choice must be one of {CHOICES}, got {choice!r}") from None
    alpha, beta = make(params.c)
    return LadderCoefficients(
        alpha, beta, graphene_spectrum(params), label=f"graphene choice {choice}"
    )


@dataclass(frozen=True)
class FockBlockMatrix:
    N: int
    entries: np.ndarray
    c: float = 1.0

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def transpose(self) -> "FockBlockMatrix":
        """``H_K' = H_K^T``; same eigenvalues."""
        return FockBlockMatrix(self.N, self.entries.T.copy(), self.c)


def boson_lowering(N: int) -> np.ndarray:
    """``(N+1) x (N+1)`` matrix with ``A e_n = sqrt(n) e_{n-1}``."""
    return np.diag(np.sqrt(np.arange(1, N + 1, dtype=float)), k=1)


def build_HK_fock(params: GrapheneParams = GrapheneParams(), N: int = 24) -> FockBlockMatrix:
    """``H_K = 2ic [[0, A^dag], [-A, 0]]`` with ``A`` truncated at ``N`` quanta."""
    if N < 1:
        raise ValueError("Fock truncation N must be at least 1")
    A = boson_lowering(N)
    zero = np.zeros_like(A)
    block = np.block([[zero, A.T], [-A, zero]]).astype(complex)
    return FockBlockMatrix(N, 2j * params.c * block, params.c)


def build_HKprime_fock(params: GrapheneParams = GrapheneParams(), N: int = 24) -> FockBlockMatrix:
    return build_HK_fock(params, N).transpose()


def ansatz_vector(N: int, n2: int, sign: int) -> np.ndarray:
    """``v^{(sign)}_{n2}`` in the ``(e^(1), e^(2))`` Fock basis."""
    v = np.zeros(2 * (N + 1), dtype=complex)
    if n2 == 0:
        v[0] = 1.0
        return v
    v[n2] = 1 / math.sqrt(2)
    v[N + 1 + n2 - 1] = -sign * 1j / math.sqrt(2)
    return v


@dataclass
class FockReport:
    N: int
    c: float
    hermiticity_defect: float
    max_eigenvalue_error: float
    max_overlap_defect: float
    zero_mode_overlap: float
    gram_defect: float
    rows: list = field(default_factory=list)

    def passed(self, tol: float = 1e-10) -> bool:
        return (
            self.hermiticity_defect == 0
            and self.max_eigenvalue_error <= tol
            and self.max_overlap_defect <= tol
            and abs(self.zero_mode_overlap - 1) <= tol
            and self.gram_defect <= tol
        )


def fock_eigencheck(params: GrapheneParams = GrapheneParams(), N: int = 24) -> FockReport:
    """Diagonalize the truncated ``H_K`` and compare with the analytic eigenpairs.

    Levels ``n2 in {N-1, N}`` are excluded. For every kept ``n2 >= 1`` and
    both signs, the eigenvalue nearest ``+-2c sqrt(n2)`` is located and the
    overlap of its eigenvector with the ansatz is reported. The zero mode
    is checked by projecting ``(e_0, 0)`` onto the numerical null space,
    which is two dimensional because of the truncation artifact ``(0, e_N)``.
    """
    if N < 4:
        raise ValueError("fock_eigencheck needs N >= 4")
    H = build_HK_fock(params, N)
    herm = H.hermiticity_defect()
    try:
        evals, evecs = np.linalg.eigh(H.entries)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed for N={N}") from exc

    rows = []
    max_err = 0.0
    max_ovl = 0.0
    ansatz = []
    for n2 in range(1, N - 1):
        for sign in (1, -1):
            target = landau_energy(params, n2, sign)
            i = int(np.argmin(np.abs(evals - target)))
            err = abs(evals[i] - target)
            v = ansatz_vector(N, n2, sign)
            ansatz.append(v)
            ovl = abs(np.vdot(evecs[:, i], v))
            max_err = max(max_err, err)
            max_ovl = max(max_ovl, abs(ovl - 1))
            rows.append({"n2": n2, "sign": sign, "target": target,
                         "eigenvalue": float(evals[i]), "error": float(err), "overlap": float(ovl)})

    scale = max(1.0, float(np.max(np.abs(evals))))
    null = evecs[:, np.abs(evals) <= 1e-12 * scale]
    v0 = ansatz_vector(N, 0, 1)
    ansatz.append(v0)
    zero_overlap = float(np.linalg.norm(null.conj().T @ v0))
    rows.append({"n2": 0, "sign": 0, "target": 0.0,
                 "eigenvalue": float(evals[np.argmin(np.abs(evals))]),
                 "error": float(np.min(np.abs(evals))), "overlap": zero_overlap})

    V = np.array(ansatz).T
    gram = float(np.max(np.abs(V.conj().T @ V - np.eye(V.shape[1]))))
    return FockReport(N, params.c, herm, float(max_err), float(max_ovl), zero_overlap, gram, rows)
