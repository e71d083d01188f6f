"""Chain construction over the canonical enumeration.

A *chain* (here: Condition) is a finite increasing set of enumeration indices
in which every earlier element is "echoed" by every later one: for the pair
m < n, the n-th partial function must agree with the target grid somewhere in
row m, on both layers i = 0 and i = 1.  Scheduled demands extend a chain step
by step; each demand either plants a witness inside a designated index set
(polarity "in") or records a witness that is permanently outside the chain
(polarity "out").
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .codec import (EMPTY_FN, PartialFn, check_dense, least_extension_index,
                    nth_partial_fn)
from .errors import GridOverflow, SearchExhausted
from .finset import (CombinationSpec, Family, FinSet, boolean_combination,
                     combination_specs)

IN = "in"
OUT = "out"


@dataclass(frozen=True)
class TargetGrid:
    """A total value table on {0..rows-1} x {0..cols-1} x {0,1}."""

    rows: int
    cols: int
    value_bound: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.value_bound < 1:
            raise ValueError("grid dimensions and value bound must be >= 1")
        if len(self.values) != self.rows * self.cols * 2:
            raise ValueError("value table must cover the full grid")
        if any(not 0 <= v < self.value_bound for v in self.values):
            raise ValueError("grid values must lie in [0, value_bound)")

    def value_at(self, m: int, k: int, i: int) -> int:
        if not (0 <= m < self.rows and 0 <= k < self.cols and i in (0, 1)):
            raise GridOverflow(f"grid point {(m, k, i)} outside "
                               f"{self.rows}x{self.cols}x2")
        return self.values[(m * self.cols + k) * 2 + i]

    @classmethod
    def constant(cls, rows: int, cols: int, value_bound: int = 1,
                 fill: int = 0) -> "TargetGrid":
        return cls(rows, cols, value_bound, (fill,) * (rows * cols * 2))

    @classmethod
    def random(cls, rows: int, cols: int, value_bound: int,
               rng: random.Random) -> "TargetGrid":
        # row-major (m, k, i) draw order; pinned for reproducibility
        vals = tuple(rng.randrange(value_bound)
                     for _ in range(rows * cols * 2))
        return cls(rows, cols, value_bound, vals)


def row_match_column(fn: PartialFn, m: int, i: int, grid: TargetGrid) -> Optional[int]:
    """Least column k < cols where fn(m,k,i) is defined and equals the grid."""
    best: Optional[int] = None
    for a, b, ii, v in fn.entries:
        if a == m and ii == i and b < grid.cols and v == grid.values[(m * grid.cols + b) * 2 + i]:
            if best is None or b < best:
                best = b
    return best


def _pairwise_witness(elements: Sequence[int], grid: TargetGrid
                      ) -> Optional[tuple[int, int, int]]:
    """Least (m, n, i) violating the pair-matching property, else None.

    Only the rows of non-maximal elements are consulted, so the largest
    element may lie beyond the grid; a non-maximal element at or past
    grid.rows raises GridOverflow.
    """
    for pos_m, m in enumerate(elements):
        if pos_m < len(elements) - 1 and m >= grid.rows:
            raise GridOverflow(
                f"element {m} is paired below a later element but the grid "
                f"has only {grid.rows} rows")
        for n in elements[pos_m + 1:]:
            fn = nth_partial_fn(n)
            for i in (0, 1):
                if row_match_column(fn, m, i, grid) is None:
                    return (m, n, i)
    return None


@dataclass(frozen=True)
class ConditionReport:
    ok: bool
    witness: Optional[tuple[int, int, int]]


def is_condition(elements: Iterable[int], grid: TargetGrid) -> ConditionReport:
    """Check the chain property for an increasing set of indices."""
    elems = tuple(sorted(set(elements)))
    if any(e < 0 for e in elems):
        raise ValueError("chain elements must be >= 0")
    w = _pairwise_witness(elems, grid)
    return ConditionReport(w is None, w)


def check_pairwise_match(members: Iterable[int], grid: TargetGrid) -> ConditionReport:
    """Same predicate as is_condition, applied to an arbitrary finite set."""
    return is_condition(members, grid)


@dataclass(frozen=True)
class Condition:
    """A validated chain; extension only appends past the maximum."""

    elements: tuple[int, ...]
    grid: TargetGrid

    def __post_init__(self):
        elems = self.elements
        if list(elems) != sorted(set(elems)):
            raise ValueError("elements must be strictly increasing")
        rep = is_condition(elems, self.grid)
        if not rep.ok:
            raise ValueError(f"not a chain: pair {rep.witness} has no match")

    @classmethod
    def empty(cls, grid: TargetGrid) -> "Condition":
        return cls((), grid)

    @property
    def max_element(self) -> Optional[int]:
        return self.elements[-1] if self.elements else None

    def extended(self, n: int) -> "Condition":
        if self.elements and n <= self.elements[-1]:
            raise ValueError("extension must exceed the current maximum")
        return Condition(self.elements + (n,), self.grid)


@dataclass(frozen=True)
class Demand:
    """One density demand: a combination over prior families, a probe index,
    and a polarity (plant a witness inside, or record one outside)."""

    spec: CombinationSpec
    probe_index: int
    polarity: str

    def __post_init__(self):
        if self.polarity not in (IN, OUT):
            raise ValueError(f"polarity must be '{IN}' or '{OUT}'")
        if self.probe_index < 0:
            raise ValueError("probe index must be >= 0")


@dataclass(frozen=True)
class MeetResult:
    condition: Condition
    witness: int
    added: tuple[int, ...]


def merge_families(families: Sequence[Family]) -> Family:
    if not families:
        raise ValueError("at least one family is required (it may have no sets)")
    n = families[0].n
    sets: list = []
    for fam in families:
        if fam.n != n:
            raise ValueError("families live in different universes")
        sets.extend(fam.sets)
    return Family(n, tuple(sets))


def _echo_entries(elements: Sequence[int], grid: TargetGrid,
                  base: PartialFn) -> list[tuple[int, int, int, int]]:
    """For each chain element m and layer i, the least free column past the
    base function, valued from the grid."""
    extra = []
    for m in elements:
        if m >= grid.rows:
            raise GridOverflow(
                f"chain element {m} needs grid row {m} but only "
                f"{grid.rows} rows exist")
        for i in (0, 1):
            k = 0
            while base.defined_at(m, k, i):
                k += 1
            if k >= grid.cols:
                raise GridOverflow(
                    f"no free column below {grid.cols} for row {m}, layer {i}")
            extra.append((m, k, i, grid.value_at(m, k, i)))
    return extra


def _demand_search_sets(spec: CombinationSpec, merged: Family
                        ) -> tuple[Optional[list[int]], set[int]]:
    """Realize the demand's index set for searching: an explicit member list
    when any set enters positively, else an exclusion set."""
    if spec.pos:
        return boolean_combination(merged, spec).to_list(), set()
    excluded: set[int] = set()
    for idx in spec.neg:
        if not 0 <= idx < len(merged.sets):
            raise ValueError(f"index {idx} out of range for merged family")
        excluded.update(merged.sets[idx].members())
    return None, excluded


def extend_to_meet(cond: Condition, demand: Demand, families: Sequence[Family],
                   search_bound: int) -> MeetResult:
    """Extend the chain to meet one demand; raises SearchExhausted when no
    witness exists below the bound.

    Polarity "in": augment the probe with one fresh echo entry per chain
    element and layer, then plant the least matching index from the demand's
    set past the current maximum.  Polarity "out": record the least index of
    the demand's set, outside the chain, whose function extends the probe,
    then end-extend the chain past it (so the witness stays decided-out).
    """
    merged = merge_families(families)
    if search_bound < 1:
        raise ValueError("search bound must be >= 1")
    grid = cond.grid
    probe = nth_partial_fn(demand.probe_index)
    within, excluded = _demand_search_sets(demand.spec, merged)
    above = cond.max_element if cond.elements else -1

    if demand.polarity == IN:
        augmented = PartialFn.from_entries(
            list(probe.entries) + _echo_entries(cond.elements, grid, probe))
        n = least_extension_index(augmented, above, search_bound,
                                  within=within, without=excluded)
        if n is None:
            raise SearchExhausted(
                f"no in-witness below {search_bound} for probe "
                f"{demand.probe_index} over spec {demand.spec}")
        return MeetResult(cond.extended(n), n, (n,))

    witness = least_extension_index(
        probe, -1, search_bound, within=within,
        without=excluded | set(cond.elements))
    if witness is None:
        raise SearchExhausted(
            f"no out-witness below {search_bound} for probe "
            f"{demand.probe_index} over spec {demand.spec}")
    pad_probe = PartialFn.from_entries(_echo_entries(cond.elements, grid, EMPTY_FN))
    above2 = max(above, witness)
    pad = least_extension_index(pad_probe, above2, search_bound)
    if pad is None:
        raise SearchExhausted(
            f"no end-extension past {above2} below {search_bound} to lock "
            f"the out-witness {witness}")
    return MeetResult(cond.extended(pad), witness, (pad,))


@dataclass(frozen=True)
class StepRecord:
    demand: Demand
    witness: int
    added: tuple[int, ...]
    elements_after: tuple[int, ...]


@dataclass(frozen=True)
class GenericRun:
    """Outcome of folding a demand schedule from the empty chain."""

    universe: int
    search_bound: int
    grid: TargetGrid
    condition: Condition
    steps: tuple[StepRecord, ...]
    schedule_length: int
    degraded: bool
    failure_kind: Optional[str]
    failure_detail: Optional[str]
    failed_at: Optional[int]

    @property
    def result_set(self) -> FinSet:
        return FinSet.from_members(self.universe, self.condition.elements)

    @property
    def decided_below(self) -> int:
        """Membership below this bound is settled: absent means excluded."""
        m = self.condition.max_element
        return 0 if m is None else m + 1


def build_generic(families: Sequence[Family], grid: TargetGrid,
                  schedule: Sequence[Demand], search_bound: int) -> GenericRun:
    """Fold extend_to_meet over the schedule, starting from the empty chain.

    A SearchExhausted or GridOverflow stops the fold and yields a degraded
    run carrying everything met so far; other errors propagate.
    """
    merged = merge_families(families)
    cond = Condition.empty(grid)
    steps: list[StepRecord] = []
    degraded = False
    kind = detail = None
    failed_at = None
    for j, demand in enumerate(schedule):
        try:
            res = extend_to_meet(cond, demand, families, search_bound)
        except SearchExhausted as e:
            degraded, kind, detail, failed_at = True, "search-exhausted", str(e), j
            break
        except GridOverflow as e:
            degraded, kind, detail, failed_at = True, "grid-overflow", str(e), j
            break
        cond = res.condition
        steps.append(StepRecord(demand, res.witness, res.added, cond.elements))
    return GenericRun(merged.n, search_bound, grid, cond, tuple(steps),
                      len(schedule), degraded, kind, detail, failed_at)


def auto_schedule(prior_set_count: int, probes: int,
                  depth: Optional[int] = None) -> tuple[Demand, ...]:
    """The round-robin schedule: for each probe index, every combination spec
    over the prior sets (lexicographic order), polarity in then out."""
    if probes < 0:
        raise ValueError("probe count must be >= 0")
    if depth is None:
        depth = prior_set_count
    specs = list(combination_specs(prior_set_count, depth))
    out: list[Demand] = []
    for probe in range(probes):
        for spec in specs:
            out.append(Demand(spec, probe, IN))
            out.append(Demand(spec, probe, OUT))
    return tuple(out)


@dataclass(frozen=True)
class ComboDensityReport:
    ok: bool
    failing_spec: Optional[CombinationSpec]
    failing_probe: Optional[int]
    probe_bound: int
    search_bound: int


def check_all_combos_dense(families: Sequence[Family], probe_bound: int,
                           search_bound: int,
                           depth: Optional[int] = None) -> ComboDensityReport:
    """Is every combination of the families dense in the enumeration, in the
    check_dense sense?  Reports the least failing (spec, probe)."""
    merged = merge_families(families)
    if depth is None:
        depth = len(merged.sets)
    for spec in combination_specs(len(merged.sets), depth):
        found = boolean_combination(merged, spec)
        rep = check_dense(found, probe_bound, search_bound)
        if not rep.ok:
            return ComboDensityReport(False, spec, rep.missing_probe,
                                      probe_bound, search_bound)
    return ComboDensityReport(True, None, None, probe_bound, search_bound)
