"""Bounded-universe sets, set families, and exhaustive combination checks.

Sets over the universe {0..n-1} are stored as integer bitmasks, which keeps
intersections and complements cheap even for universes of a million points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence


def _iter_bits(mask: int) -> Iterator[int]:
    # byte-at-a-time keeps this linear even for million-bit masks
    data = mask.to_bytes((mask.bit_length() + 7) // 8, "little")
    for byte_index, byte in enumerate(data):
        base = byte_index << 3
        while byte:
            low = byte & -byte
            yield base + low.bit_length() - 1
            byte ^= low


@dataclass(frozen=True)
class FinSet:
    """A subset of {0..n-1}, canonically represented by its bitmask."""

    n: int
    mask: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("universe size must be >= 1")
        if self.mask < 0 or self.mask >> self.n:
            raise ValueError("set members must lie in [0, n)")

    @classmethod
    def from_members(cls, n: int, members: Iterable[int]) -> "FinSet":
        mask = 0
        for x in members:
            if not 0 <= x < n:
                raise ValueError(f"member {x} outside universe of size {n}")
            mask |= 1 << x
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> "FinSet":
        return cls(n, (1 << n) - 1)

    def members(self) -> Iterator[int]:
        return _iter_bits(self.mask)

    def __iter__(self) -> Iterator[int]:
        return _iter_bits(self.mask)

    def to_list(self) -> list[int]:
        return list(self.members())

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.n and (self.mask >> x) & 1 == 1

    def _check_same_universe(self, other: "FinSet") -> None:
        if self.n != other.n:
            raise ValueError("sets live in different universes")

    def union(self, other: "FinSet") -> "FinSet":
        self._check_same_universe(other)
        return FinSet(self.n, self.mask | other.mask)

    def intersection(self, other: "FinSet") -> "FinSet":
        self._check_same_universe(other)
        return FinSet(self.n, self.mask & other.mask)

    def difference(self, other: "FinSet") -> "FinSet":
        self._check_same_universe(other)
        return FinSet(self.n, self.mask & ~other.mask)

    def complement(self) -> "FinSet":
        return FinSet(self.n, ~self.mask & ((1 << self.n) - 1))

    def is_subset(self, other: "FinSet") -> bool:
        self._check_same_universe(other)
        return self.mask & ~other.mask == 0


@dataclass(frozen=True)
class Family:
    """An ordered, optionally labelled list of sets over one universe."""

    n: int
    sets: tuple[FinSet, ...]
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("universe size must be >= 1")
        for s in self.sets:
            if s.n != self.n:
                raise ValueError("family member lives in a different universe")
        if self.labels is not None and len(self.labels) != len(self.sets):
            raise ValueError("labels must match sets one to one")

    @classmethod
    def from_lists(cls, n: int, sets: Sequence[Iterable[int]],
                   labels: Optional[Sequence[str]] = None) -> "Family":
        return cls(n, tuple(FinSet.from_members(n, s) for s in sets),
                   None if labels is None else tuple(labels))

    def __len__(self) -> int:
        return len(self.sets)


@dataclass(frozen=True)
class CombinationSpec:
    """Which family members enter a combination positively / complemented."""

    pos: tuple[int, ...] = ()
    neg: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pos", tuple(sorted(self.pos)))
        object.__setattr__(self, "neg", tuple(sorted(self.neg)))
        if len(set(self.pos)) != len(self.pos) or len(set(self.neg)) != len(self.neg):
            raise ValueError("repeated index in combination spec")
        if set(self.pos) & set(self.neg):
            raise ValueError("pos and neg must be disjoint")

    @property
    def depth(self) -> int:
        return len(self.pos) + len(self.neg)


@dataclass(frozen=True)
class IndependenceReport:
    ok: bool
    failing: Optional[CombinationSpec]
    size_found: int
    threshold: int
    depth: int


@dataclass(frozen=True)
class SaturationReport:
    ok: bool
    witness: Optional[tuple[tuple[int, ...], tuple[int, ...]]]
    bound: int


def boolean_combination(family: Family, spec: CombinationSpec) -> FinSet:
    """Intersect the pos-indexed sets with the complements of the neg-indexed ones.

    The empty spec yields the full universe.
    """
    count = len(family.sets)
    for idx in spec.pos + spec.neg:
        if not 0 <= idx < count:
            raise ValueError(f"index {idx} out of range for family of {count} sets")
    mask = (1 << family.n) - 1
    for idx in spec.pos:
        mask &= family.sets[idx].mask
    for idx in spec.neg:
        mask &= ~family.sets[idx].mask
    return FinSet(family.n, mask)


def _sorted_tuples(pool: Sequence[int], max_len: int) -> Iterator[tuple[int, ...]]:
    # ascending tuples over pool, in lexicographic order; () comes first
    def rec(prefix: tuple[int, ...], start: int) -> Iterator[tuple[int, ...]]:
        yield prefix
        if len(prefix) == max_len:
            return
        for j in range(start, len(pool)):
            yield from rec(prefix + (pool[j],), j + 1)

    yield from rec((), 0)


def combination_specs(count: int, depth: int) -> Iterator[CombinationSpec]:
    """All disjoint (pos, neg) index pairs with |pos|+|neg| <= depth.

    Enumerated pos-major in lexicographic tuple order, so the first failing
    spec a scan reports is the lexicographically least one.
    """
    indices = list(range(count))
    for pos in _sorted_tuples(indices, depth):
        rest = [i for i in indices if i not in pos]
        for neg in _sorted_tuples(rest, depth - len(pos)):
            yield CombinationSpec(pos, neg)


def is_independent(family: Family, threshold: int, depth: int) -> IndependenceReport:
    """Does every combination of up to `depth` sets have >= `threshold` members?

    On failure the report carries the lexicographically least failing spec.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    if not 0 <= depth <= len(family.sets):
        raise ValueError("depth must lie in [0, number of sets]")
    smallest = 1 << family.n
    for spec in combination_specs(len(family.sets), depth):
        size = len(boolean_combination(family, spec))
        if size < threshold:
            return IndependenceReport(False, spec, size, threshold, depth)
        smallest = min(smallest, size)
    return IndependenceReport(True, None, smallest, threshold, depth)


def min_combination_size(family: Family, depth: int) -> int:
    """Smallest combination size over all specs of depth <= `depth` (full scan)."""
    if not 0 <= depth <= len(family.sets):
        raise ValueError("depth must lie in [0, number of sets]")
    return min(len(boolean_combination(family, spec))
               for spec in combination_specs(len(family.sets), depth))


def is_saturated(family: Family, bound: int) -> SaturationReport:
    """Can every small demand (p inside, q outside) be met by some member?

    Checks all disjoint point sets p, q with 1 <= |p|+|q| <= bound: some member
    A must satisfy p <= A and A & q = 0.  bound = 0 demands nothing.  The
    witness, when present, is the lexicographically least failing (p, q).
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    points = list(range(family.n))
    for p in _sorted_tuples(points, bound):
        p_mask = 0
        for x in p:
            p_mask |= 1 << x
        rest = [x for x in points if x not in p]
        for q in _sorted_tuples(rest, bound - len(p)):
            if not p and not q:
                continue
            q_mask = 0
            for x in q:
                q_mask |= 1 << x
            if not any(s.mask & p_mask == p_mask and s.mask & q_mask == 0
                       for s in family.sets):
                return SaturationReport(False, (p, q), bound)
    return SaturationReport(True, None, bound)


def bit_family(k: int, n: int) -> Family:
    """The family [A_0..A_{k-1}] over {0..n-1} with A_j = {x : bit j of x set}."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if 1 << k > n:
        raise ValueError(f"bit_family needs 2^k <= n, got k={k}, n={n}")
    universe = (1 << n) - 1
    sets = []
    for j in range(k):
        block = 1 << j
        period = block * 2
        # one period of the pattern (high half set), replicated across n bits
        unit = ((1 << block) - 1) << block
        reps = (n + period - 1) // period
        repunit = ((1 << (period * reps)) - 1) // ((1 << period) - 1)
        sets.append(FinSet(n, (unit * repunit) & universe))
    return Family(n, tuple(sets), tuple(f"bit{j}" for j in range(k)))
