"""Finite measure spaces: a uniform grid on [0,1] plus unit-mass atoms.

Points are indexed 0..p-1 with all grid cells first (ascending midpoint)
and all atoms after them (in the order their ids were given).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ExhaustiveCheckInfeasibleError, SpaceError


@dataclass(frozen=True)
class MeasureSpace:
    """Grid cells with midpoints/weights plus unit-weight atoms."""

    midpoints: tuple[float, ...]
    cell_weights: tuple[float, ...]
    atom_ids: tuple[int, ...]

    def __post_init__(self):
        if len(self.midpoints) != len(self.cell_weights):
            raise SpaceError("midpoints and cell weights differ in length")
        if any(w <= 0 for w in self.cell_weights):
            raise SpaceError("cell weights must be positive")
        if any(a >= b for a, b in zip(self.midpoints, self.midpoints[1:])):
            raise SpaceError("cell midpoints must be strictly increasing")
        if len(set(self.atom_ids)) != len(self.atom_ids):
            raise SpaceError("duplicate atom id")

    @property
    def num_cells(self) -> int:
        return len(self.midpoints)

    @property
    def num_atoms(self) -> int:
        return len(self.atom_ids)

    @property
    def size(self) -> int:
        return self.num_cells + self.num_atoms

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weight per point (atoms weigh 1)."""
        return np.array(list(self.cell_weights) + [1.0] * self.num_atoms)

    def is_atom(self, index: int) -> bool:
        return index >= self.num_cells

    def restrict(self, indices: Sequence[int]) -> "MeasureSpace":
        """Sub-space on the given point indices (ascending).

        Weights are kept as-is; the unit-mass normalization only applies
        to spaces produced by :func:`build_space`.
        """
        idx = sorted(indices)
        if len(set(idx)) != len(idx):
            raise SpaceError("repeated index in restriction")
        cells = [i for i in idx if i < self.num_cells]
        atoms = [i for i in idx if i >= self.num_cells]
        return MeasureSpace(
            midpoints=tuple(self.midpoints[i] for i in cells),
            cell_weights=tuple(self.cell_weights[i] for i in cells),
            atom_ids=tuple(self.atom_ids[i - self.num_cells] for i in atoms),
        )


def build_space(num_cells: int, atom_ids: Iterable[int] = ()) -> MeasureSpace:
    """Uniform midpoint-rule grid on [0,1] with `num_cells` cells, plus atoms.

    Cell weights are 1/num_cells (so the continuous mass is 1); each atom
    has mass 1.
    """
    if num_cells < 0:
        raise SpaceError("num_cells must be nonnegative")
    ids = tuple(atom_ids)
    if num_cells + len(ids) < 1:
        raise SpaceError("empty space")
    mids = tuple((i + 0.5) / num_cells for i in range(num_cells))
    weights = tuple(1.0 / num_cells for _ in range(num_cells))
    return MeasureSpace(midpoints=mids, cell_weights=weights, atom_ids=ids)


@dataclass(frozen=True)
class StandardSet:
    """A union of whole points of a MeasureSpace (a measurable set in the
    finite model); indexes a standard projection."""

    space: MeasureSpace
    members: tuple[bool, ...]

    def __post_init__(self):
        if len(self.members) != self.space.size:
            raise SpaceError("membership vector length != space size")

    @classmethod
    def empty(cls, space: MeasureSpace) -> "StandardSet":
        return cls(space, (False,) * space.size)

    @classmethod
    def full(cls, space: MeasureSpace) -> "StandardSet":
        return cls(space, (True,) * space.size)

    @classmethod
    def from_indices(cls, space: MeasureSpace, indices: Iterable[int]) -> "StandardSet":
        mem = [False] * space.size
        for i in indices:
            if not 0 <= i < space.size:
                raise SpaceError(f"point index {i} out of range")
            mem[i] = True
        return cls(space, tuple(mem))

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.members) if m)

    @property
    def size(self) -> int:
        return sum(self.members)

    def is_empty(self) -> bool:
        return not any(self.members)

    def issubset(self, other: "StandardSet") -> bool:
        self._check_space(other)
        return all(b or not a for a, b in zip(self.members, other.members))

    def union(self, other: "StandardSet") -> "StandardSet":
        self._check_space(other)
        return StandardSet(self.space, tuple(a or b for a, b in zip(self.members, other.members)))

    def intersection(self, other: "StandardSet") -> "StandardSet":
        self._check_space(other)
        return StandardSet(self.space, tuple(a and b for a, b in zip(self.members, other.members)))

    def complement(self) -> "StandardSet":
        return StandardSet(self.space, tuple(not a for a in self.members))

    def isdisjoint(self, other: "StandardSet") -> bool:
        self._check_space(other)
        return not any(a and b for a, b in zip(self.members, other.members))

    def _check_space(self, other: "StandardSet"):
        if self.space != other.space:
            raise SpaceError("standard sets over different spaces")


def enumerate_standard_pairs(
    space: MeasureSpace, max_points: int = 12
) -> Iterator[tuple[StandardSet, StandardSet]]:
    """Yield every ordered pair (E, F) of standard sets with E ⊆ F.

    There are exactly 3^p such pairs (each point is in neither set, in F
    only, or in both). Order is lexicographic in the per-point state
    vector with states ordered (out, F-only, both).
    """
    p = space.size
    if p > max_points:
        raise ExhaustiveCheckInfeasibleError(p, max_points)
    for states in itertools.product((0, 1, 2), repeat=p):
        e = tuple(s == 2 for s in states)
        f = tuple(s >= 1 for s in states)
        yield StandardSet(space, e), StandardSet(space, f)


def nested_chain(space: MeasureSpace, steps: int) -> list[StandardSet]:
    """Increasing chain ∅ = E_0 ⊂ … ⊂ E_steps of cell sets, where E_s
    holds the cells with midpoint ≤ s/steps. Atoms are never included."""
    if steps < 1:
        raise SpaceError("steps must be >= 1")
    if space.num_cells == 0:
        raise SpaceError("nested_chain requires at least one cell")
    chain: list[StandardSet] = []
    for s in range(steps + 1):
        cutoff = s / steps
        mem = tuple(
            i < space.num_cells and space.midpoints[i] <= cutoff for i in range(space.size)
        )
        ss = StandardSet(space, mem)
        # collapse steps finer than the grid so the chain stays strictly increasing
        if not chain or ss.members != chain[-1].members:
            chain.append(ss)
    return chain
