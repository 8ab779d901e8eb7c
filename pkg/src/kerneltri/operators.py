"""Kernel operators in dense discretized form and finite-rank factored form.

An operator stores both the raw kernel samples k(x_i, x_j) and the weighted
action matrix a[i][j] = k(x_i, x_j) * w_j, so kernel identities and spectra
are each read off the natural representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError, PreconditionError
from .spaces import MeasureSpace, StandardSet, build_space

#: relative threshold separating structural zeros from roundoff
ZERO_TOL = 1e-10


@dataclass(frozen=True)
class Operator:
    space: MeasureSpace
    entries: np.ndarray
    kernel_values: np.ndarray | None = None

    def __post_init__(self):
        p = self.space.size
        if self.entries.shape != (p, p):
            raise DimensionMismatchError(
                f"entries shape {self.entries.shape} != space size {p}"
            )
        if not np.all(np.isfinite(self.entries)):
            raise PreconditionError("non-finite operator entries")
        if self.kernel_values is not None:
            if self.kernel_values.shape != (p, p):
                raise DimensionMismatchError("kernel_values shape mismatch")
            if not np.all(np.isfinite(self.kernel_values)):
                raise PreconditionError("non-finite kernel values")
        self.entries.flags.writeable = False
        if self.kernel_values is not None:
            self.kernel_values.flags.writeable = False

    @property
    def size(self) -> int:
        return self.space.size

    @property
    def scale(self) -> float:
        """max(1, max|entry|); the reference magnitude for zero tests."""
        if self.entries.size == 0:
            return 1.0
        return max(1.0, float(np.abs(self.entries).max()))

    def require_kernel(self) -> np.ndarray:
        if self.kernel_values is None:
            raise PreconditionError("operation requires raw kernel values")
        return self.kernel_values


def kernel_operator(space: MeasureSpace, kernel: np.ndarray) -> Operator:
    """Operator from a p×p matrix of raw kernel samples."""
    kernel = np.asarray(kernel, dtype=complex)
    entries = kernel * space.weights[np.newaxis, :]
    return Operator(space=space, entries=entries, kernel_values=kernel)


def kernel_operator_from_function(
    space: MeasureSpace, fn: Callable[[float, float], complex]
) -> Operator:
    """Sample a kernel function on the grid midpoints and atom ids."""
    coords = list(space.midpoints) + list(space.atom_ids)
    kernel = np.array([[fn(x, y) for y in coords] for x in coords], dtype=complex)
    return kernel_operator(space, kernel)


@dataclass(frozen=True)
class FiniteRankOperator:
    """Kernel k(x,y) = sum_i f_i(x) g_i(y), with f_i/g_i sampled at the
    points as the columns of F and G."""

    space: MeasureSpace
    F: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        p = self.space.size
        if self.F.ndim != 2 or self.G.ndim != 2:
            raise DimensionMismatchError("factors must be 2-d arrays")
        if self.F.shape[0] != p or self.G.shape[0] != p:
            raise DimensionMismatchError("factor rows != space size")
        if self.F.shape[1] != self.G.shape[1]:
            raise DimensionMismatchError("factor count mismatch between F and G")
        n = self.F.shape[1]
        if n > 0:
            if np.linalg.matrix_rank(self.F) < n or np.linalg.matrix_rank(self.G) < n:
                raise PreconditionError("factor columns are not linearly independent")
        self.F.flags.writeable = False
        self.G.flags.writeable = False

    @property
    def rank(self) -> int:
        return self.F.shape[1]

    def kernel_matrix(self) -> np.ndarray:
        return self.F @ self.G.T


def densify(kfr: FiniteRankOperator) -> Operator:
    """Dense operator with kernel_values[i][j] = sum_t F[i,t] G[j,t]."""
    return kernel_operator(kfr.space, kfr.kernel_matrix())


def numerical_rank(K: Operator, rel_tol: float = ZERO_TOL) -> int:
    """Rank of the raw kernel matrix: singular values > rel_tol * sigma_max."""
    kernel = K.require_kernel()
    if kernel.size == 0:
        return 0
    s = np.linalg.svd(kernel, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def factor(K: Operator, rel_tol: float = ZERO_TOL) -> FiniteRankOperator:
    """Extract SVD-based factors (F, G) with kernel = F @ G.T."""
    kernel = K.require_kernel()
    u, s, vh = np.linalg.svd(kernel)
    n = 0 if s.size == 0 or s[0] == 0.0 else int(np.sum(s > rel_tol * s[0]))
    F = u[:, :n] * s[:n]
    G = vh[:n, :].T.copy()
    return FiniteRankOperator(space=K.space, F=F, G=G)


def compress(K: Operator, E: StandardSet) -> Operator:
    """Standard compression: the operator restricted to the points of E."""
    if E.space != K.space:
        raise DimensionMismatchError("standard set over a different space")
    idx = list(E.indices())
    sub_space = K.space.restrict(idx)
    sel = np.ix_(idx, idx)
    kernel = None if K.kernel_values is None else K.kernel_values[sel].copy()
    return Operator(space=sub_space, entries=K.entries[sel].copy(), kernel_values=kernel)


def modulus(K: Operator) -> Operator:
    """Entrywise absolute value of the kernel; weights untouched."""
    kernel = K.require_kernel()
    return kernel_operator(K.space, np.abs(kernel).astype(complex))


def trace(K: Operator) -> complex:
    """Sum of the weighted diagonal: sum_i k(x_i,x_i) w_i = sum_i a[i][i]."""
    return complex(np.trace(K.entries))


def trace_split(K: Operator) -> tuple[complex, complex]:
    """(cell part, atom part) of the trace; they sum to trace(K)."""
    d = np.diag(K.entries)
    nc = K.space.num_cells
    return complex(d[:nc].sum()), complex(d[nc:].sum())


def trace_power(K: Operator, n: int) -> complex:
    """tr(K^n) by repeated multiplication of the weighted entries."""
    if n < 1:
        raise PreconditionError("power must be >= 1")
    return complex(np.trace(np.linalg.matrix_power(K.entries, n)))


def split_atom_diagonal(K: Operator) -> tuple[Operator, Operator]:
    """K = G + D with D the diagonal kernel carried by the atoms only."""
    kernel = K.require_kernel()
    d_kernel = np.zeros_like(kernel)
    for j in range(K.space.num_cells, K.space.size):
        d_kernel[j, j] = kernel[j, j]
    return kernel_operator(K.space, kernel - d_kernel), kernel_operator(K.space, d_kernel)


# --- named built-in operators -------------------------------------------

def sharpness_example(n: int) -> Operator:
    """Rank-n upper triangular 0/1 operator on 2n+1 atoms whose block
    triangularization needs the full 2n+1 diagonal blocks."""
    return densify(sharpness_example_factors(n))


def sharpness_example_factors(n: int) -> FiniteRankOperator:
    if n < 1:
        raise PreconditionError("n must be >= 1")
    p = 2 * n + 1
    space = build_space(0, range(2, p + 2))
    F = np.zeros((p, n), dtype=complex)
    G = np.zeros((p, n), dtype=complex)
    for j in range(1, n + 1):
        F[2 * j - 2, j - 1] = 1.0
        F[2 * j - 1, j - 1] = 1.0
        G[2 * j - 1 : p, j - 1] = 1.0
    return FiniteRankOperator(space=space, F=F, G=G)


def volterra_linear(num_cells: int) -> Operator:
    """Discretization of the kernel k(x,y) = max(x - y, 0) on the grid."""
    space = build_space(num_cells)
    return kernel_operator_from_function(space, lambda x, y: max(x - y, 0.0))


def ones_kernel(num_cells: int) -> Operator:
    """Discretization of the rank-one kernel k ≡ 1 on the grid."""
    space = build_space(num_cells)
    return kernel_operator(space, np.ones((num_cells, num_cells), dtype=complex))
