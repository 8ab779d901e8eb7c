"""Eigenvalue reports, spectrum-inclusion tests and nonzero-spectrum matching."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import PreconditionError
from .operators import Operator

MAX_DENSE_SIZE = 512
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalue multiset of an operator plus derived verdicts."""

    eigenvalues: tuple[complex, ...]
    radius: float
    quasinilpotent: bool
    tol: float
    scale: float

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "radius": self.radius,
            "quasinilpotent": self.quasinilpotent,
            "tol": self.tol,
            "scale": self.scale,
        }


def _sorted_eigs(values: np.ndarray) -> tuple[complex, ...]:
    order = np.lexsort((values.imag, values.real))
    return tuple(complex(z) for z in values[order])


def eigenvalues(K: Operator, tol: float = DEFAULT_TOL) -> SpectrumReport:
    """Dense eigenvalue computation of the weighted action matrix.

    Quasinilpotent means every eigenvalue has modulus <= tol * scale,
    the honest finite-dimensional surrogate for spectral radius zero.
    """
    p = K.size
    if p > MAX_DENSE_SIZE:
        raise PreconditionError(f"operator size {p} exceeds dense limit {MAX_DENSE_SIZE}")
    scale = K.scale
    if p == 0:
        return SpectrumReport((), 0.0, True, tol, scale)
    try:
        vals = np.linalg.eigvals(K.entries)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK non-convergence
        raise PreconditionError(f"eigenvalue iteration did not converge: {exc}") from exc
    radius = float(np.abs(vals).max())
    return SpectrumReport(
        eigenvalues=_sorted_eigs(vals),
        radius=radius,
        quasinilpotent=radius <= tol * scale,
        tol=tol,
        scale=scale,
    )


@dataclass(frozen=True)
class InclusionResult:
    holds: bool
    witness: complex | None = None

    def __bool__(self) -> bool:
        return self.holds


def spectrum_subset(
    inner: SpectrumReport, outer: SpectrumReport, tol: float = DEFAULT_TOL
) -> InclusionResult:
    """Set-semantics inclusion: every inner eigenvalue lies within tol of
    some outer eigenvalue. Returns the first unmatched value as witness."""
    if not inner.eigenvalues:
        return InclusionResult(True)
    if not outer.eigenvalues:
        return InclusionResult(False, inner.eigenvalues[0])
    inn = np.array(inner.eigenvalues)
    out = np.array(outer.eigenvalues)
    dist = np.abs(inn[:, None] - out[None, :]).min(axis=1)
    bad = np.nonzero(dist > tol)[0]
    if bad.size:
        return InclusionResult(False, complex(inn[bad[0]]))
    return InclusionResult(True)


@dataclass(frozen=True)
class MatchResult:
    matched: bool
    unmatched_left: tuple[complex, ...] = field(default=())
    unmatched_right: tuple[complex, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.matched


def nonzero_eigen_match(K1: Operator, K2: Operator, tol: float = DEFAULT_TOL) -> MatchResult:
    """Multiset comparison of the nonzero eigenvalues of two operators.

    Eigenvalues with |λ| > tol * scale are paired by an optimal assignment;
    the match holds iff both lists have equal length and every paired
    distance is <= tol * scale, where scale = max(1, r(K1), r(K2)).
    """
    r1 = eigenvalues(K1, tol)
    r2 = eigenvalues(K2, tol)
    scale = max(1.0, r1.radius, r2.radius)
    cutoff = tol * scale
    a = np.array([z for z in r1.eigenvalues if abs(z) > cutoff])
    b = np.array([z for z in r2.eigenvalues if abs(z) > cutoff])
    if a.size != b.size:
        return MatchResult(False, tuple(map(complex, a)), tuple(map(complex, b)))
    if a.size == 0:
        return MatchResult(True)
    dist = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(dist)
    if dist[rows, cols].max() <= cutoff:
        return MatchResult(True)
    bad = dist[rows, cols] > cutoff
    return MatchResult(
        False,
        tuple(complex(z) for z in a[rows[bad]]),
        tuple(complex(z) for z in b[cols[bad]]),
    )
