"""Extending partial data to full permutations of a bounded universe.

A finite family of sets cuts the universe into cells ("atoms").  A partial
map g on family indices induces a map on those cells; a partial injection f
on points is *compatible* with g when it sends each point's cell to the
image cell.  build_permutation completes such a pair to a full permutation,
filling each cell with an order bijection twisted by a per-cell shuffle.
Closing the family under a permutation's forward and backward images and
re-testing independence is the homogenization step at the end of the module.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .config import HOMOG_TAG, child_seed
from .errors import (CardinalityMismatch, IncompatiblePair,
                     InducedMapNotPermutation)
from .finset import (Family, FinSet, IndependenceReport, is_independent,
                     min_combination_size)


def _check_pairs(pairs: Sequence[tuple[int, int]], what: str) -> tuple[tuple[int, int], ...]:
    ordered = tuple(sorted((int(a), int(b)) for a, b in pairs))
    sources = [a for a, _ in ordered]
    targets = [b for _, b in ordered]
    if len(set(sources)) != len(sources):
        raise ValueError(f"{what} maps some source twice")
    if len(set(targets)) != len(targets):
        raise ValueError(f"{what} is not injective")
    return ordered


@dataclass(frozen=True)
class PartialInjection:
    """Finitely many point pairs (x, y), injective, inside [0, n)."""

    n: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("universe size must be >= 1")
        ordered = _check_pairs(self.pairs, "partial injection")
        for a, b in ordered:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"pair {(a, b)} leaves the universe [0, {self.n})")
        object.__setattr__(self, "pairs", ordered)

    @classmethod
    def from_dict(cls, n: int, mapping: dict[int, int]) -> "PartialInjection":
        return cls(n, tuple(mapping.items()))

    @classmethod
    def empty(cls, n: int) -> "PartialInjection":
        return cls(n, ())

    @cached_property
    def _forward(self) -> dict[int, int]:
        return dict(self.pairs)

    def domain(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.pairs)

    def targets(self) -> tuple[int, ...]:
        return tuple(sorted(b for _, b in self.pairs))

    def apply(self, x: int) -> int:
        return self._forward[x]

    def defined_at(self, x: int) -> bool:
        return x in self._forward

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class FamilyMap:
    """An injective partial map on family indices."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        ordered = _check_pairs(self.pairs, "family map")
        if any(a < 0 or b < 0 for a, b in ordered):
            raise ValueError("family indices must be >= 0")
        object.__setattr__(self, "pairs", ordered)

    @classmethod
    def from_dict(cls, mapping: dict[int, int]) -> "FamilyMap":
        return cls(tuple(mapping.items()))

    @cached_property
    def _forward(self) -> dict[int, int]:
        return dict(self.pairs)

    def domain(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.pairs)

    def apply(self, j: int) -> int:
        return self._forward[j]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class AtomDecomposition:
    """The nonempty cells cut by the sets g touches, in signature order.

    signatures[k] has bit j set when cell k lies inside the set indexed by
    the j-th domain element of g; action[k] is the position of the cell the
    induced map sends cell k to.
    """

    n: int
    atoms: tuple[FinSet, ...]
    signatures: tuple[int, ...]
    action: tuple[int, ...]

    def position_of(self, x: int) -> int:
        for k, atom in enumerate(self.atoms):
            if x in atom:
                return k
        raise ValueError(f"{x} outside the universe [0, {self.n})")


def _cells_by_signature(n: int, set_masks: Sequence[int]
                        ) -> tuple[list[int], list[int]]:
    """Nonempty intersection cells over the given sets, ascending signature."""
    full = (1 << n) - 1
    masks, sigs = [], []
    for sig in range(1 << len(set_masks)):
        cell = full
        for j, sm in enumerate(set_masks):
            cell &= sm if (sig >> j) & 1 else full & ~sm
            if not cell:
                break
        if cell:
            masks.append(cell)
            sigs.append(sig)
    return masks, sigs


def atoms_of(g: FamilyMap, family: Family) -> AtomDecomposition:
    """Cut the universe by the sets named in dom(g) and read off how g moves
    the cells; raises InducedMapNotPermutation when the moved cells do not
    line up with the decomposition."""
    count = len(family.sets)
    dom = g.domain()
    for j in dom:
        if not (0 <= j < count and 0 <= g.apply(j) < count):
            raise ValueError(f"family map touches index outside [0, {count})")
    source_masks = [family.sets[j].mask for j in dom]
    cell_masks, sigs = _cells_by_signature(family.n, source_masks)
    pos_by_mask = {m: k for k, m in enumerate(cell_masks)}
    full = (1 << family.n) - 1
    action = []
    for sig in sigs:
        image = full
        for j, src_idx in enumerate(dom):
            tm = family.sets[g.apply(src_idx)].mask
            image &= tm if (sig >> j) & 1 else full & ~tm
        k2 = pos_by_mask.get(image)
        if k2 is None:
            raise InducedMapNotPermutation(
                f"image of the cell with signature {sig} is not a cell of "
                f"the decomposition")
        action.append(k2)
    if len(set(action)) != len(action):
        raise InducedMapNotPermutation("induced cell map is not a bijection")
    atoms = tuple(FinSet(family.n, m) for m in cell_masks)
    return AtomDecomposition(family.n, atoms, tuple(sigs), tuple(action))


@dataclass(frozen=True)
class CompatibilityReport:
    ok: bool
    witness: Optional[tuple[int, int]]  # (point, family index) that disagree


def check_compatible(f: PartialInjection, g: FamilyMap,
                     family: Family) -> CompatibilityReport:
    """Does f respect membership the way g prescribes?  The witness is the
    least (x, j) with x's membership in set j differing from f(x)'s
    membership in set g(j)."""
    if f.n != family.n:
        raise ValueError("partial injection and family disagree on the universe")
    atoms_of(g, family)  # validate g's induced action up front
    for x, y in f.pairs:
        for j in g.domain():
            if (x in family.sets[j]) != (y in family.sets[g.apply(j)]):
                return CompatibilityReport(False, (x, j))
    return CompatibilityReport(True, None)


@dataclass(frozen=True)
class AtomShuffle:
    """One permutation of positions per cell, twisting the order bijection."""

    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for p in self.perms:
            if sorted(p) != list(range(len(p))):
                raise ValueError("each cell shuffle must permute 0..size-1")

    @classmethod
    def identity(cls, sizes: Sequence[int]) -> "AtomShuffle":
        return cls(tuple(tuple(range(s)) for s in sizes))

    @classmethod
    def random(cls, sizes: Sequence[int], rng: random.Random) -> "AtomShuffle":
        perms = []
        for s in sizes:
            p = list(range(s))
            rng.shuffle(p)
            perms.append(tuple(p))
        return cls(tuple(perms))


@dataclass(frozen=True)
class Permutation:
    """A bijection of [0, n), stored as the image tuple."""

    n: int
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != self.n or sorted(self.images) != list(range(self.n)):
            raise ValueError("images must list each point of [0, n) exactly once")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(n, tuple(range(n)))

    @cached_property
    def _inverse(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for x, y in enumerate(self.images):
            inv[y] = x
        return tuple(inv)

    def apply(self, x: int) -> int:
        return self.images[x]

    def inverse_apply(self, y: int) -> int:
        return self._inverse[y]

    def apply_set(self, s: FinSet) -> FinSet:
        if s.n != self.n:
            raise ValueError("set lives in a different universe")
        mask = 0
        for x in s.members():
            mask |= 1 << self.images[x]
        return FinSet(self.n, mask)

    def inverse_apply_set(self, s: FinSet) -> FinSet:
        if s.n != self.n:
            raise ValueError("set lives in a different universe")
        mask = 0
        for x in s.members():
            mask |= 1 << self._inverse[x]
        return FinSet(self.n, mask)


def _free_cells(f: PartialInjection, dec: AtomDecomposition
                ) -> tuple[list[list[int]], list[list[int]]]:
    dom_mask = 0
    for x in f.domain():
        dom_mask |= 1 << x
    ran_mask = 0
    for y in f.targets():
        ran_mask |= 1 << y
    sources = [FinSet(dec.n, a.mask & ~dom_mask).to_list() for a in dec.atoms]
    targets = [FinSet(dec.n, dec.atoms[k2].mask & ~ran_mask).to_list()
               for k2 in dec.action]
    return sources, targets


def shuffle_sizes(f: PartialInjection, g: FamilyMap,
                  family: Family) -> tuple[int, ...]:
    """Cell sizes net of dom(f) — the shape a shuffle must have."""
    dec = atoms_of(g, family)
    sources, _ = _free_cells(f, dec)
    return tuple(len(s) for s in sources)


def build_permutation(f: PartialInjection, g: FamilyMap, family: Family,
                      shuffle: AtomShuffle) -> Permutation:
    """Complete the compatible pair (f, g) to a permutation of the universe.

    Cell by cell (ascending signature), the points outside dom(f) go to the
    image cell's points outside ran(f), in order twisted by the shuffle.
    Raises IncompatiblePair, InducedMapNotPermutation or CardinalityMismatch
    when the data cannot be completed this way.
    """
    comp = check_compatible(f, g, family)
    if not comp.ok:
        raise IncompatiblePair(
            f"point {comp.witness[0]} disagrees with its image about set "
            f"{comp.witness[1]}")
    dec = atoms_of(g, family)
    sources, targets = _free_cells(f, dec)
    if len(shuffle.perms) != len(dec.atoms):
        raise ValueError(f"shuffle covers {len(shuffle.perms)} cells, "
                         f"decomposition has {len(dec.atoms)}")
    images = [-1] * family.n
    for x, y in f.pairs:
        images[x] = y
    for k, (src, tgt) in enumerate(zip(sources, targets)):
        if len(src) != len(tgt):
            raise CardinalityMismatch(
                f"cell {k} has {len(src)} free points but its image cell "
                f"has {len(tgt)}")
        perm_k = shuffle.perms[k]
        if len(perm_k) != len(src):
            raise ValueError(f"shuffle for cell {k} has length "
                             f"{len(perm_k)}, cell needs {len(src)}")
        for pos, x in enumerate(src):
            images[x] = tgt[perm_k[pos]]
    return Permutation(family.n, tuple(images))


def orbit_closure(family: Family, perm: Permutation, layers: int) -> Family:
    """Close the family under forward and backward images of the permutation,
    up to the given number of layers; duplicates (as sets) are dropped.

    Order: the original sets, then for each layer the forward images (family
    order) followed by the backward images.
    """
    if family.n != perm.n:
        raise ValueError("family and permutation disagree on the universe")
    if layers < 0:
        raise ValueError("layer count must be >= 0")
    base_labels = family.labels or tuple(f"set{j}" for j in range(len(family.sets)))
    sets = list(family.sets)
    labels = list(base_labels)
    seen = {s.mask for s in sets}
    fwd = list(family.sets)
    bwd = list(family.sets)
    for ell in range(1, layers + 1):
        fwd = [perm.apply_set(s) for s in fwd]
        for j, s in enumerate(fwd):
            if s.mask not in seen:
                seen.add(s.mask)
                sets.append(s)
                labels.append(f"{base_labels[j]}+{ell}")
        bwd = [perm.inverse_apply_set(s) for s in bwd]
        for j, s in enumerate(bwd):
            if s.mask not in seen:
                seen.add(s.mask)
                sets.append(s)
                labels.append(f"{base_labels[j]}-{ell}")
    return Family(family.n, tuple(sets), tuple(labels))


@dataclass(frozen=True)
class ShuffleSearchReport:
    """Outcome of the randomized search for an independence-preserving
    completion.  Exhausting the budget is an outcome, not an error."""

    ok: bool
    attempts: int
    budget: int
    shuffle: Optional[AtomShuffle]
    permutation: Optional[Permutation]
    closure: Optional[Family]
    independence: Optional[IndependenceReport]
    best_attempt: Optional[int]
    best_min_size: Optional[int]
    exhausted: bool


def find_independent_shuffle(f: PartialInjection, g: FamilyMap, family: Family,
                             threshold: int, depth: int, layers: int,
                             budget: int, seed: int) -> ShuffleSearchReport:
    """Draw random shuffles until the completed permutation's orbit closure
    stays independent, or the budget runs out.

    The checked depth is clamped to the closure's set count.  On failure the
    report carries the best attempt seen, judged by the smallest combination
    size its closure achieved.
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    comp = check_compatible(f, g, family)
    if not comp.ok:
        raise IncompatiblePair(
            f"point {comp.witness[0]} disagrees with its image about set "
            f"{comp.witness[1]}")
    sizes = shuffle_sizes(f, g, family)
    rng = random.Random(seed)
    best_attempt: Optional[int] = None
    best_min_size: Optional[int] = None
    for attempt in range(1, budget + 1):
        shuffle = AtomShuffle.random(sizes, rng)
        perm = build_permutation(f, g, family, shuffle)
        closure = orbit_closure(family, perm, layers)
        d = min(depth, len(closure.sets))
        rep = is_independent(closure, threshold, d)
        if rep.ok:
            return ShuffleSearchReport(True, attempt, budget, shuffle, perm,
                                       closure, rep, attempt, rep.size_found,
                                       False)
        size = min_combination_size(closure, d)
        if best_min_size is None or size > best_min_size:
            best_attempt, best_min_size = attempt, size
    return ShuffleSearchReport(False, budget, budget, None, None, None, None,
                               best_attempt, best_min_size, True)


@dataclass(frozen=True)
class HomogenizeParams:
    threshold: int
    depth: int
    layers: int
    budget: int
    seed: int


@dataclass(frozen=True)
class HomogenizeReport:
    ok: bool
    steps: tuple[ShuffleSearchReport, ...]
    family: Family
    failed_at: Optional[int]


def homogenize(family: Family,
               demands: Sequence[tuple[PartialInjection, FamilyMap]],
               params: HomogenizeParams) -> HomogenizeReport:
    """Work through extension demands in order, growing the family by each
    successful closure; stops at the first demand whose search fails."""
    current = family
    steps: list[ShuffleSearchReport] = []
    for idx, (f, g) in enumerate(demands):
        rep = find_independent_shuffle(
            f, g, current, params.threshold, params.depth, params.layers,
            params.budget, child_seed(params.seed, HOMOG_TAG, idx))
        steps.append(rep)
        if not rep.ok:
            return HomogenizeReport(False, tuple(steps), current, idx)
        current = rep.closure
    return HomogenizeReport(True, tuple(steps), current, None)
