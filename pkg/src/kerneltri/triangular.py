"""Constructors and verifiers for standard triangularizations.

Three certificate kinds:

* ``scc``                 — Frobenius normal form: strongly connected
                            components of the support digraph in topological
                            order (exists unconditionally).
* ``nilpotent_rank``      — rank-n operators with nilpotent standard
                            compressions: strictly block upper triangular
                            with at most n+1 blocks, built by repeatedly
                            peeling the maximal zero-column set.
* ``increasing_spectrum`` — rank-n operators with increasing spectrum:
                            block upper triangular with at most 2n+1 blocks,
                            every nonzero diagonal block a 1x1 eigenvalue
                            sitting on an atom.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import PreconditionError, TheoremViolationError
from .operators import (
    FiniteRankOperator,
    Operator,
    ZERO_TOL,
    compress,
    densify,
    factor,
    kernel_operator,
    numerical_rank,
)
from .spaces import StandardSet
from .spectral import DEFAULT_TOL, eigenvalues
from .cycles import support_digraph


@dataclass(frozen=True)
class BlockDiagnosis:
    block: int
    kind: str  # "zero" | "scalar" | "irreducible"
    value: complex | None = None


@dataclass(frozen=True)
class TriangularizationCertificate:
    """Ordered partition of the point set plus everything needed to
    re-verify block upper-triangularity and the block-count bound."""

    kind: str  # "scc" | "nilpotent_rank" | "increasing_spectrum"
    blocks: tuple[tuple[int, ...], ...]
    diagonal: tuple[BlockDiagnosis, ...]
    rank: int | None
    bound: int | None
    residual: float
    tol: float
    multiplicity_free: bool

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def chain(self) -> list[tuple[int, ...]]:
        """Induced increasing chain F_j = E_1 ∪ ... ∪ E_j of invariant sets."""
        prefixes = []
        acc: list[int] = []
        for b in self.blocks:
            acc.extend(b)
            prefixes.append(tuple(sorted(acc)))
        return prefixes

    def to_dict(self) -> dict:
        diag = []
        for d in self.diagonal:
            item = {"block": d.block, "class": d.kind}
            if d.value is not None:
                item["lambda"] = [d.value.real, d.value.imag]
            diag.append(item)
        return {
            "kind": self.kind,
            "blocks": [list(b) for b in self.blocks],
            "diagonal": diag,
            "bound": {"m": self.num_blocks, "limit": self.bound, "rank": self.rank},
            "residual": self.residual,
            "tol": self.tol,
            "multiplicity_free": self.multiplicity_free,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TriangularizationCertificate":
        diag = tuple(
            BlockDiagnosis(
                block=d["block"],
                kind=d["class"],
                value=(None if "lambda" not in d else complex(*d["lambda"])),
            )
            for d in data["diagonal"]
        )
        return cls(
            kind=data["kind"],
            blocks=tuple(tuple(b) for b in data["blocks"]),
            diagonal=diag,
            rank=data["bound"]["rank"],
            bound=data["bound"]["limit"],
            residual=data["residual"],
            tol=data["tol"],
            multiplicity_free=data["multiplicity_free"],
        )


def _below_block_residual(matrix: np.ndarray, blocks) -> float:
    p = matrix.shape[0]
    pos = np.empty(p, dtype=int)
    for b, block in enumerate(blocks):
        pos[list(block)] = b
    below = pos[:, None] > pos[None, :]
    return float(np.abs(matrix)[below].max()) if below.any() else 0.0


def _diagnose(kernel: np.ndarray, blocks, space, thr: float) -> tuple[BlockDiagnosis, ...]:
    out = []
    for b, block in enumerate(blocks):
        sub = kernel[np.ix_(block, block)]
        if sub.size == 0 or np.abs(sub).max() <= thr:
            out.append(BlockDiagnosis(b, "zero"))
        elif len(block) == 1 and space.is_atom(block[0]):
            out.append(BlockDiagnosis(b, "scalar", complex(sub[0, 0])))
        else:
            out.append(BlockDiagnosis(b, "irreducible"))
    return tuple(out)


# --- SCC / Frobenius form -------------------------------------------------

def _tarjan_sccs(successors) -> list[list[int]]:
    p = len(successors)
    index = [-1] * p
    low = [0] * p
    on_stack = [False] * p
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in range(p):
        if index[root] != -1:
            continue
        work = [(root, iter(successors[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(successors[w])))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(sorted(comp))
    return sccs


def scc_triangularize(K: Operator, threshold: float | None = None) -> TriangularizationCertificate:
    """Frobenius normal form: blocks are the strongly connected components
    of the support digraph, in a topological order of the condensation
    with ties broken by smallest contained point index."""
    dg = support_digraph(K, threshold)
    thr = dg.threshold
    sccs = _tarjan_sccs(dg.successors)
    comp_of = {}
    for c, comp in enumerate(sccs):
        for v in comp:
            comp_of[v] = c
    nc = len(sccs)
    out_edges: list[set[int]] = [set() for _ in range(nc)]
    indeg = [0] * nc
    for u in range(dg.size):
        for v in dg.successors[u]:
            a, b = comp_of[u], comp_of[v]
            if a != b and b not in out_edges[a]:
                out_edges[a].add(b)
                indeg[b] += 1
    heap = [(min(sccs[c]), c) for c in range(nc) if indeg[c] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, c = heapq.heappop(heap)
        order.append(c)
        for b in out_edges[c]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, (min(sccs[b]), b))
    blocks = tuple(tuple(sccs[c]) for c in order)
    kernel = K.require_kernel()
    return TriangularizationCertificate(
        kind="scc",
        blocks=blocks,
        diagonal=_diagnose(kernel, blocks, K.space, thr),
        rank=None,
        bound=None,
        residual=_below_block_residual(kernel, blocks),
        tol=thr,
        multiplicity_free=all(len(b) == 1 for b in blocks),
    )


# --- zero row/column projections and the nilpotent block form -------------

def max_kernel_projection(
    kfr: FiniteRankOperator, side: str = "right", tol: float = ZERO_TOL
) -> StandardSet:
    """Largest standard set E with K P_E = 0 (side="right": the points
    where all the g_i vanish, i.e. the zero columns of the kernel) or
    P_E K = 0 (side="left": zero rows)."""
    if side not in ("right", "left"):
        raise PreconditionError("side must be 'right' or 'left'")
    kernel = kfr.kernel_matrix()
    scale = max(1.0, float(np.abs(kernel).max())) if kernel.size else 1.0
    mags = np.abs(kernel).max(axis=0 if side == "right" else 1) if kernel.size else np.empty(0)
    idx = [i for i in range(kfr.space.size) if mags.size == 0 or mags[i] <= tol * scale]
    return StandardSet.from_indices(kfr.space, idx)


def assert_nilpotent_compressions(
    K: Operator, tol: float = DEFAULT_TOL, exhaustive_limit: int = 12, seed: int = 0
) -> None:
    """Raise unless every standard compression of K is nilpotent.

    Exhaustive over all subsets up to `exhaustive_limit` points; larger
    spaces are sampled (full set, all singletons, seeded random subsets).
    """
    p = K.size
    cutoff = tol * K.scale

    def check(indices: tuple[int, ...]):
        if not indices:
            return
        vals = np.linalg.eigvals(K.entries[np.ix_(indices, indices)])
        if np.abs(vals).max() > cutoff:
            raise PreconditionError(
                f"standard compression on points {list(indices)} is not "
                f"nilpotent (radius {np.abs(vals).max():.3e})"
            )

    if p <= exhaustive_limit:
        for mask in range(1, 1 << p):
            check(tuple(i for i in range(p) if mask >> i & 1))
        return
    check(tuple(range(p)))
    for i in range(p):
        check((i,))
    rng = np.random.default_rng(seed)
    for _ in range(2048):
        bits = rng.integers(0, 2, size=p)
        check(tuple(np.nonzero(bits)[0].tolist()))


def nilpotent_block_form(
    kfr: FiniteRankOperator, tol: float = DEFAULT_TOL
) -> TriangularizationCertificate:
    """Strictly block upper triangular form with m <= rank+1 blocks.

    Stage j takes E_j = the maximal right-kernel projection of the current
    compression (its zero columns), which makes column block j vanish and
    drops the rank of the remaining compression by at least one.
    """
    K = densify(kfr)
    assert_nilpotent_compressions(K, tol)
    kernel = K.require_kernel()
    blocks = _peel_zero_columns(K)
    n = numerical_rank(K)
    m = len(blocks)
    if m > n + 1:
        raise TheoremViolationError(
            f"block count {m} exceeds rank bound {n + 1}", blocks=blocks, rank=n
        )
    thr = ZERO_TOL * K.scale
    for j in range(m - 1):
        sup = kernel[np.ix_(blocks[j], blocks[j + 1])]
        if np.abs(sup).max() <= thr:
            raise TheoremViolationError(
                f"superdiagonal block ({j}, {j + 1}) vanishes", blocks=blocks
            )
    return TriangularizationCertificate(
        kind="nilpotent_rank",
        blocks=blocks,
        diagonal=_diagnose(kernel, blocks, K.space, thr),
        rank=n,
        bound=n + 1,
        residual=_below_block_residual(kernel, blocks),
        tol=tol,
        multiplicity_free=all(len(b) == 1 for b in blocks),
    )


def _peel_zero_columns(K: Operator) -> tuple[tuple[int, ...], ...]:
    """Repeatedly strip the maximal zero-column set of the current
    compression; the stripped sets, in order, are the partition blocks."""
    remaining = list(range(K.size))
    blocks: list[tuple[int, ...]] = []
    while remaining:
        sub = compress(K, StandardSet.from_indices(K.space, remaining))
        local = max_kernel_projection(factor(sub), side="right")
        picked = [remaining[i] for i in local.indices()]
        if not picked:
            raise TheoremViolationError(
                "no zero-column set in a compression asserted to have "
                "nilpotent standard compressions",
                remaining=tuple(remaining),
            )
        blocks.append(tuple(picked))
        remaining = [i for i in remaining if i not in set(picked)]
    return tuple(blocks)


# --- eigen-atom peeling and the increasing-spectrum block form -------------

def eigenatom_peel(
    K: Operator, tol: float = DEFAULT_TOL
) -> tuple[list[tuple[int, complex]], Operator]:
    """Find the atoms carrying the nonzero eigenvalues of K.

    Returns the list of (point index, k(j,j)) for atoms with nonzero
    kernel diagonal, sorted by ascending atom id, together with
    G = K minus those diagonal entries. Raises when the atom-diagonal
    multiset fails to match the nonzero eigenvalue multiset of K.
    """
    kernel = K.require_kernel()
    cutoff = tol * K.scale
    space = K.space
    peeled = [
        (j, complex(kernel[j, j]))
        for j in range(space.num_cells, space.size)
        if abs(kernel[j, j]) > cutoff
    ]
    peeled.sort(key=lambda it: space.atom_ids[it[0] - space.num_cells])
    eigs = [z for z in eigenvalues(K, tol).eigenvalues if abs(z) > cutoff]
    diag_vals = [z for _, z in peeled]
    mismatch = None
    if len(eigs) != len(diag_vals):
        mismatch = "count"
    elif eigs:
        dist = np.abs(np.array(diag_vals)[:, None] - np.array(eigs)[None, :])
        rows, cols = linear_sum_assignment(dist)
        if dist[rows, cols].max() > cutoff:
            mismatch = "distance"
    if mismatch is not None:
        raise TheoremViolationError(
            "atom diagonal multiset does not match the nonzero spectrum",
            atom_diagonal=tuple(diag_vals),
            nonzero_eigenvalues=tuple(eigs),
        )
    g_kernel = kernel.copy()
    for j, _ in peeled:
        g_kernel[j, j] = 0.0
    return peeled, kernel_operator(space, g_kernel)


def increasing_spectrum_block_form(
    K: Operator, tol: float = DEFAULT_TOL
) -> TriangularizationCertificate:
    """Block upper triangular form with m <= 2*rank+1 blocks in which
    every nonzero diagonal block is a peeled eigen-atom.

    Each level peels the atom diagonal, takes the nilpotent block form of
    the remainder, splits at the block holding the smallest-id eigen-atom
    and recurses on the two flanks.
    """
    kernel = K.require_kernel()
    space = K.space
    n = numerical_rank(K)
    cutoff = tol * K.scale
    eigenatom_peel(K, tol)  # multiset diagnostic for the full operator

    def rec(indices: list[int]) -> list[tuple[int, ...]]:
        if not indices:
            return []
        sub = kernel[np.ix_(indices, indices)]
        sub_op = kernel_operator(space.restrict(indices), sub)
        atoms = [
            j
            for j in indices
            if space.is_atom(j) and abs(kernel[j, j]) > cutoff
        ]
        if not atoms:
            local = _peel_zero_columns(sub_op)
            return [tuple(indices[i] for i in blk) for blk in local]
        j = min(atoms, key=lambda a: space.atom_ids[a - space.num_cells])
        g = sub.copy()
        for a in atoms:
            pos = indices.index(a)
            g[pos, pos] = 0.0
        g_blocks = _peel_zero_columns(kernel_operator(space.restrict(indices), g))
        g_blocks = [tuple(indices[i] for i in blk) for blk in g_blocks]
        split = next(p for p, blk in enumerate(g_blocks) if j in blk)
        f1 = [i for blk in g_blocks[:split] for i in blk]
        f2 = [i for i in g_blocks[split] if i != j]
        for blk in g_blocks[split + 1 :]:
            f2.extend(blk)
        return rec(sorted(f1)) + [(j,)] + rec(sorted(f2))

    blocks = tuple(rec(list(range(space.size))))
    m = len(blocks)
    limit = 2 * n + 1
    if m > limit:
        raise TheoremViolationError(
            f"block count {m} exceeds bound {limit}", blocks=blocks, rank=n
        )
    thr = ZERO_TOL * K.scale
    residual = _below_block_residual(kernel, blocks)
    if residual > thr:
        raise TheoremViolationError(
            "atom placement broke block triangularity", residual=residual
        )
    return TriangularizationCertificate(
        kind="increasing_spectrum",
        blocks=blocks,
        diagonal=_diagnose(kernel, blocks, space, thr),
        rank=n,
        bound=limit,
        residual=residual,
        tol=tol,
        multiplicity_free=all(len(b) == 1 for b in blocks),
    )


# --- independent verifier ---------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: dict[str, CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failures(self) -> list[str]:
        return [f"{name}: {c.detail}" for name, c in self.checks.items() if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": {
                name: {"passed": c.passed, "detail": c.detail}
                for name, c in self.checks.items()
            },
        }


def verify_certificate(
    K: Operator, cert: TriangularizationCertificate, tol: float = DEFAULT_TOL
) -> VerificationReport:
    """Recheck every certificate invariant from scratch.

    Deliberately uses direct matrix scans and its own eigenvalue matching
    rather than the constructor code paths.
    """
    checks: dict[str, CheckResult] = {}
    kernel = K.kernel_values if K.kernel_values is not None else K.entries
    p = K.size
    thr = tol * max(1.0, float(np.abs(kernel).max()) if kernel.size else 1.0)

    flat = [i for b in cert.blocks for i in b]
    ok = sorted(flat) == list(range(p)) and len(set(flat)) == p
    checks["partition"] = CheckResult(ok, "" if ok else "blocks do not partition the point set")
    if not ok:
        return VerificationReport(checks)

    pos = np.empty(p, dtype=int)
    for b, block in enumerate(cert.blocks):
        pos[list(block)] = b
    below = pos[:, None] > pos[None, :]
    worst = float(np.abs(kernel)[below].max()) if below.any() else 0.0
    checks["residual"] = CheckResult(
        worst <= thr, f"below-block residual {worst:.3e} > {thr:.3e}" if worst > thr else ""
    )

    # chain invariance: K maps each prefix F_j into itself
    invariant = True
    detail = ""
    for b in range(len(cert.blocks)):
        inside = [i for i in range(p) if pos[i] <= b]
        outside = [i for i in range(p) if pos[i] > b]
        if inside and outside:
            leak = float(np.abs(kernel[np.ix_(outside, inside)]).max())
            if leak > thr:
                invariant = False
                detail = f"prefix {b} leaks {leak:.3e}"
                break
    checks["chain_invariant"] = CheckResult(invariant, detail)

    if cert.kind == "nilpotent_rank":
        bad = [
            b
            for b, block in enumerate(cert.blocks)
            if np.abs(kernel[np.ix_(block, block)]).max() > thr
        ]
        checks["zero_diagonal_blocks"] = CheckResult(
            not bad, f"nonzero diagonal blocks {bad}" if bad else ""
        )
        weak = [
            j
            for j in range(len(cert.blocks) - 1)
            if np.abs(kernel[np.ix_(cert.blocks[j], cert.blocks[j + 1])]).max() <= thr
        ]
        checks["superdiagonal_nonzero"] = CheckResult(
            not weak, f"vanishing superdiagonal blocks {weak}" if weak else ""
        )

    if cert.kind == "increasing_spectrum":
        bad_blocks = []
        scalars: list[complex] = []
        for b, block in enumerate(cert.blocks):
            sub = kernel[np.ix_(block, block)]
            if np.abs(sub).max() <= thr:
                continue
            if len(block) == 1 and K.space.is_atom(block[0]):
                scalars.append(complex(sub[0, 0]))
            else:
                bad_blocks.append(b)
        checks["diagonal_blocks"] = CheckResult(
            not bad_blocks,
            f"nonzero non-atom diagonal blocks {bad_blocks}" if bad_blocks else "",
        )
        # greedy nearest matching of scalars against the nonzero spectrum
        eigs = [z for z in np.linalg.eigvals(K.entries) if abs(z) > thr]
        match_ok = len(eigs) == len(scalars)
        if match_ok:
            pool = list(eigs)
            for z in scalars:
                dists = [abs(z - w) for w in pool]
                if not dists or min(dists) > thr:
                    match_ok = False
                    break
                pool.pop(int(np.argmin(dists)))
        checks["scalar_eigenvalues"] = CheckResult(
            match_ok,
            ""
            if match_ok
            else f"scalars {scalars} do not match nonzero spectrum {eigs}",
        )

    if cert.kind in ("nilpotent_rank", "increasing_spectrum"):
        s = np.linalg.svd(np.asarray(kernel, dtype=complex), compute_uv=False)
        rank = 0 if s.size == 0 or s[0] == 0.0 else int(np.sum(s > ZERO_TOL * s[0]))
        limit = rank + 1 if cert.kind == "nilpotent_rank" else 2 * rank + 1
        ok = cert.num_blocks <= limit
        checks["block_count_bound"] = CheckResult(
            ok, f"{cert.num_blocks} blocks > limit {limit}" if ok is False else ""
        )

    return VerificationReport(checks)
