"""Shared instance generators and independent oracles.

Everything here deliberately avoids the library code paths it is used to
check: brute-force enumeration, direct eigvals calls and explicit loops.
"""

import itertools

import numpy as np

from kerneltri import FiniteRankOperator, build_space, kernel_operator


def brute_increasing_oracle(matrix: np.ndarray, tol: float = 1e-8) -> bool:
    """Direct check of spectrum inclusion over all 3^p subset pairs."""
    p = matrix.shape[0]
    spectra = {}
    for mask in range(1 << p):
        idx = [i for i in range(p) if mask >> i & 1]
        spectra[mask] = np.linalg.eigvals(matrix[np.ix_(idx, idx)]) if idx else np.empty(0)
    for f_mask in range(1 << p):
        e_mask = f_mask
        while True:  # all submasks of f_mask
            inner, outer = spectra[e_mask], spectra[f_mask]
            for z in inner:
                if outer.size == 0 or np.abs(outer - z).min() > tol:
                    return False
            if e_mask == 0:
                break
            e_mask = (e_mask - 1) & f_mask
    return True


def all_ordered_partitions(items: tuple[int, ...]):
    """Every ordered set partition, as a tuple of disjoint blocks."""

    def unordered(pool):
        if not pool:
            yield ()
            return
        first, rest = pool[0], pool[1:]
        for r in range(len(rest) + 1):
            for extra in itertools.combinations(rest, r):
                block = (first,) + extra
                remaining = tuple(i for i in rest if i not in extra)
                for tail in unordered(remaining):
                    yield (block,) + tail

    for parts in unordered(items):
        for perm in itertools.permutations(parts):
            yield perm


def random_nilpotent_instance(rng: np.random.Generator):
    """Strictly block upper triangular finite-rank operator.

    Rank n in 1..5, m = n+1 blocks, p <= 14 atomic points. Factor j is
    supported on blocks <= j (F) and blocks > j (G), which forces every
    kernel entry to couple a strictly earlier block to a later one; all
    standard compressions are then nilpotent by construction.
    """
    n = int(rng.integers(1, 6))
    m = n + 1
    sizes = [1 + int(rng.integers(0, 3)) for _ in range(m)]
    while sum(sizes) > 14:
        sizes[int(rng.integers(0, m))] = 1
    p = sum(sizes)
    bounds = np.cumsum([0] + sizes)
    blocks = [list(range(bounds[b], bounds[b + 1])) for b in range(m)]
    space = build_space(0, range(2, p + 2))
    F = np.zeros((p, n), dtype=complex)
    G = np.zeros((p, n), dtype=complex)
    for j in range(n):
        for b in range(j + 1):
            F[blocks[b], j] = rng.standard_normal(len(blocks[b]))
        for b in range(j + 1, m):
            G[blocks[b], j] = rng.standard_normal(len(blocks[b]))
        # keep the superdiagonal coupling alive
        F[blocks[j][0], j] += 1.0
        G[blocks[j + 1][0], j] += 1.0
    return FiniteRankOperator(space=space, F=F, G=G), blocks


def random_hybrid_instance(rng: np.random.Generator):
    """Hybrid-space operator in block upper triangular form: strictly
    upper kernel in a random point ordering, plus a nonzero diagonal on
    some atoms. Its nonzero spectrum is exactly the atom diagonal."""
    cells = int(rng.integers(1, 5))
    atoms = int(rng.integers(1, 4))
    p = cells + atoms
    space = build_space(cells, range(2, atoms + 2))
    order = rng.permutation(p)
    rank_of = np.empty(p, dtype=int)
    rank_of[order] = np.arange(p)
    kernel = np.zeros((p, p), dtype=complex)
    for i in range(p):
        for j in range(p):
            if rank_of[i] < rank_of[j] and rng.random() < 0.6:
                kernel[i, j] = rng.standard_normal() + 1j * rng.standard_normal()
    lambdas = {}
    for j in range(cells, p):
        if rng.random() < 0.8:
            lam = complex(rng.standard_normal() + 1j * rng.standard_normal())
            while abs(lam) < 0.3:
                lam *= 2.0
            kernel[j, j] = lam
            lambdas[j] = lam
    return kernel_operator(space, kernel), lambdas
