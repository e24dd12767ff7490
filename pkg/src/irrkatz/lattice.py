"""The multiplicity lattice attached to a configuration of singular points.

A shape records, per singular point, the list of exponential factors (only
through chain lengths and the table of pairwise weights of factor
differences).  A lattice vector assigns an integer to every chain slot,
with equal block sums across points; the common sum is its rank.

Index conventions: points are numbered ``0..p`` with point 0 the point at
infinity; factors and chain slots are 0-based.  An index tuple picks one
factor per point and is stored as a tuple of factor indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

IndexTuple = tuple[int, ...]


@dataclass(frozen=True)
class LatticeShape:
    """Chain lengths ``l[i][j]`` and weight table ``w[i][j][j']``.

    The weight table holds the weights of differences of exponential
    factors at each point: symmetric, zero diagonal, and at most -1 off
    the diagonal (distinct factors differ at some order >= 1).
    """

    chain_lengths: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        if len(self.weights) != len(self.chain_lengths):
            raise ValueError("weight table does not match point count")
        for i, lens in enumerate(self.chain_lengths):
            k = len(lens)
            if k == 0 or any(l < 1 for l in lens):
                raise ValueError(f"point {i} needs factors with chains of length >= 1")
            table = self.weights[i]
            if len(table) != k or any(len(row) != k for row in table):
                raise ValueError(f"weight table at point {i} is not {k}x{k}")
            for j in range(k):
                if table[j][j] != 0:
                    raise ValueError("weight table diagonal must be zero")
                for j2 in range(j + 1, k):
                    if table[j][j2] != table[j2][j]:
                        raise ValueError("weight table must be symmetric")
                    if table[j][j2] > -1:
                        raise ValueError("distinct factors must have weight <= -1")

    @property
    def num_points(self) -> int:
        return len(self.chain_lengths)

    @property
    def p(self) -> int:
        """Number of finite singular points."""
        return self.num_points - 1

    def factor_count(self, i: int) -> int:
        return len(self.chain_lengths[i])

    def index_tuples(self) -> tuple[IndexTuple, ...]:
        """The product of per-point factor indices, lexicographic."""
        return tuple(product(*[range(len(ls)) for ls in self.chain_lengths]))

    def slots(self) -> Iterable[tuple[int, int, int]]:
        for i, lens in enumerate(self.chain_lengths):
            for j, l in enumerate(lens):
                for s in range(l):
                    yield (i, j, s)


class LatticeVector:
    """Integer multiplicities per chain slot, equal block sums per point."""

    __slots__ = ("shape", "entries")

    def __init__(self, shape: LatticeShape, entries: Sequence[Sequence[Sequence[int]]]):
        ent = tuple(
            tuple(tuple(int(v) for v in chain) for chain in point)
            for point in entries
        )
        if len(ent) != shape.num_points:
            raise ValueError("entry blocks do not match point count")
        for i, point in enumerate(ent):
            lens = shape.chain_lengths[i]
            if len(point) != len(lens) or any(len(ch) != l for ch, l in zip(point, lens)):
                raise ValueError(f"entries at point {i} do not match chain lengths")
        sums = [sum(sum(ch) for ch in point) for point in ent]
        if len(set(sums)) > 1:
            raise ValueError(f"unequal block sums {sums}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "entries", ent)

    def __setattr__(self, name, value):
        raise AttributeError("LatticeVector is immutable")

    @staticmethod
    def zero(shape: LatticeShape) -> "LatticeVector":
        return LatticeVector(
            shape,
            [[[0] * l for l in lens] for lens in shape.chain_lengths],
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeVector):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.shape, self.entries))

    @property
    def rank(self) -> int:
        """The common block sum."""
        return sum(sum(ch) for ch in self.entries[0])

    def block_sum(self, i: int, j: int) -> int:
        return sum(self.entries[i][j])

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for point in self.entries for ch in point for v in ch)

    def is_zero(self) -> bool:
        return all(v == 0 for point in self.entries for ch in point for v in ch)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(
            self.shape,
            [[[-v for v in ch] for ch in point] for point in self.entries],
        )

    def scale(self, factor: int) -> "LatticeVector":
        return LatticeVector(
            self.shape,
            [[[factor * v for v in ch] for ch in point] for point in self.entries],
        )

    # -- the twisted-Euler endomorphisms ----------------------------------

    def defect(self, t: IndexTuple) -> int:
        """Rank change effected by the twisted-Euler move along ``t``."""
        shape = self.shape
        self._check_tuple(t)
        w = shape.weights
        total = 0
        for i in range(1, shape.num_points):
            for j in range(shape.factor_count(i)):
                total += (-w[i][j][t[i]] + 1) * self.block_sum(i, j)
        for j in range(shape.factor_count(0)):
            total += (-w[0][j][t[0]] - 1) * self.block_sum(0, j)
        for i in range(shape.num_points):
            total -= self.entries[i][t[i]][0]
        return total

    def sigma_t(self, t: IndexTuple) -> "LatticeVector":
        """Add the defect to the first chain slot of the chosen factor at
        every point; an involution that changes the rank by the defect."""
        d = self.defect(t)
        entries = [[list(ch) for ch in point] for point in self.entries]
        for i in range(self.shape.num_points):
            entries[i][t[i]][0] += d
        return LatticeVector(self.shape, entries)

    def sigma_perm(self, i: int, j: int, s: int) -> "LatticeVector":
        """Swap chain slots s and s+1 of factor (i, j); an involution."""
        if not (0 <= s <= self.shape.chain_lengths[i][j] - 2):
            raise IndexError(f"slot {s} out of range for chain (i={i}, j={j})")
        entries = [[list(ch) for ch in point] for point in self.entries]
        entries[i][j][s], entries[i][j][s + 1] = entries[i][j][s + 1], entries[i][j][s]
        return LatticeVector(self.shape, entries)

    def support_tuples(self) -> tuple[IndexTuple, ...]:
        """Index tuples passing only through factors with a nonzero block."""
        return tuple(
            t
            for t in self.shape.index_tuples()
            if all(
                any(v != 0 for v in self.entries[i][t[i]])
                for i in range(self.shape.num_points)
            )
        )

    def _check_tuple(self, t: IndexTuple):
        if len(t) != self.shape.num_points or any(
            not (0 <= t[i] < self.shape.factor_count(i))
            for i in range(self.shape.num_points)
        ):
            raise IndexError(f"index tuple {t} out of range")

    # -- text form ---------------------------------------------------------

    def to_text(self) -> str:
        """Blocks per point joined by '|'; factors by ';'; slots by ','."""
        return "|".join(
            ";".join(",".join(str(v) for v in ch) for ch in point)
            for point in self.entries
        )

    @staticmethod
    def from_text(shape: LatticeShape, text: str) -> "LatticeVector":
        points = text.split("|")
        entries = [
            [[int(v) for v in ch.split(",")] for ch in point.split(";")]
            for point in points
        ]
        return LatticeVector(shape, entries)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"LatticeVector({self.to_text()})"


def in_fundamental_domain(a: LatticeVector) -> bool:
    """Membership in the terminal set of the reduction: nonzero, all
    entries nonnegative, chains sorted descending, and no index tuple
    (over the full product, not just the support) has negative defect."""
    if a.is_zero() or not a.is_nonnegative():
        return False
    for point in a.entries:
        for ch in point:
            if any(ch[s] < ch[s + 1] for s in range(len(ch) - 1)):
                return False
    return all(a.defect(t) >= 0 for t in a.shape.index_tuples())
