"""Reading a permutation through the enumeration, and the capture check.

A permutation pi of the universe induces a partial function on a grid: on
layer 0 the row-m values come from the function indexed by pi(m), on layer 1
from the one indexed by the preimage of m.  Whenever a set A matches a target
grid pairwise, every pi-related pair inside A is caught by that induced
function somewhere in the earlier row — verify_catch checks this exactly, and
run_pipeline samples it at scale.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Protocol

from .codec import nth_partial_fn
from .config import GRID_TAG, PERM_TAG, ExperimentConfig, child_seed
from .errors import GridOverflow, PreconditionUnmet
from .finset import Family, FinSet, IndependenceReport, is_independent
from .generic import (ComboDensityReport, GenericRun, TargetGrid,
                      auto_schedule, build_generic, check_all_combos_dense,
                      check_pairwise_match, row_match_column)


class PointPermutation(Protocol):
    n: int

    def apply(self, x: int) -> int: ...

    def inverse_apply(self, y: int) -> int: ...


@dataclass(frozen=True)
class GridFn:
    """A partial function on {0..rows-1} x {0..cols-1} x {0,1}; points not
    listed in entries are genuinely undefined."""

    rows: int
    cols: int
    entries: tuple[tuple[int, int, int, int], ...]

    def __post_init__(self):
        seen = set()
        for m, k, i, v in self.entries:
            if not (0 <= m < self.rows and 0 <= k < self.cols and i in (0, 1)):
                raise ValueError(f"entry point {(m, k, i)} outside the grid")
            if v < 0:
                raise ValueError("values must be >= 0")
            if (m, k, i) in seen:
                raise ValueError(f"point {(m, k, i)} assigned twice")
            seen.add((m, k, i))
        ordered = tuple(sorted(self.entries))
        object.__setattr__(self, "entries", ordered)

    def value_at(self, m: int, k: int, i: int) -> Optional[int]:
        for em, ek, ei, v in self.entries:
            if (em, ek, ei) == (m, k, i):
                return v
        return None

    def defined_at(self, m: int, k: int, i: int) -> bool:
        return self.value_at(m, k, i) is not None

    def __len__(self) -> int:
        return len(self.entries)


def grid_fn_from_perm(perm: PointPermutation, rows: int, cols: int) -> GridFn:
    """Layer 0 of row m reads the function indexed by perm(m); layer 1 reads
    the one indexed by the preimage of m.

    Query order is pinned — images for m = 0..rows-1, then preimages
    likewise — so lazily sampled permutations give reproducible results.
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be >= 1")
    entries = []
    for m in range(rows):
        fn = nth_partial_fn(perm.apply(m))
        for k in range(cols):
            v = fn.value_at(m, k, 0)
            if v is not None:
                entries.append((m, k, 0, v))
    for m in range(rows):
        fn = nth_partial_fn(perm.inverse_apply(m))
        for k in range(cols):
            v = fn.value_at(m, k, 1)
            if v is not None:
                entries.append((m, k, 1, v))
    return GridFn(rows, cols, tuple(entries))


def moved_within(perm: PointPermutation, bound: int) -> tuple[int, ...]:
    """Points below the bound that the permutation does not fix."""
    return tuple(m for m in range(bound) if perm.apply(m) != m)


def case_split(perm: PointPermutation, members: Iterable[int]
               ) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split the pi-related pairs inside the set by direction: elements sent
    up to another element, and elements sent down to one."""
    elems = sorted(set(members))
    elem_set = set(elems)
    up = tuple(m for m in elems if perm.apply(m) in elem_set and m < perm.apply(m))
    down = tuple(n for n in elems if perm.apply(n) in elem_set and n > perm.apply(n))
    return up, down


@dataclass(frozen=True)
class MatchReport:
    count: int
    threshold: int
    ok: bool


def matches(fn: GridFn, target: TargetGrid, threshold: int) -> MatchReport:
    """How many grid points the partial function gets right on the target."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    count = 0
    for m, k, i, v in fn.entries:
        if m < target.rows and k < target.cols and v == target.value_at(m, k, i):
            count += 1
    return MatchReport(count, threshold, count >= threshold)


@dataclass(frozen=True)
class CatchReport:
    """Every pi-related pair inside the set, each checked for a captured
    match in the earlier row of the induced function."""

    ok: bool
    up_cases: tuple[int, ...]
    down_cases: tuple[int, ...]
    failures: tuple[tuple[int, int, int], ...]  # (row, partner, layer)


def verify_catch(members: Iterable[int], target: TargetGrid,
                 perm: PointPermutation) -> CatchReport:
    """Exact check of the capture property for one set, target and
    permutation; raises PreconditionUnmet unless the set matches the target
    pairwise."""
    elems = sorted(set(members))
    try:
        rep = check_pairwise_match(elems, target)
    except GridOverflow as e:
        raise PreconditionUnmet(str(e)) from e
    if not rep.ok:
        raise PreconditionUnmet(
            f"pair {rep.witness} of the set has no match on the target")
    up, down = case_split(perm, elems)
    failures = []
    for m in up:
        partner = perm.apply(m)
        if row_match_column(nth_partial_fn(partner), m, 0, target) is None:
            failures.append((m, partner, 0))
    for n in down:
        m = perm.apply(n)
        if row_match_column(nth_partial_fn(n), m, 1, target) is None:
            failures.append((m, n, 1))
    return CatchReport(not failures, up, down, tuple(failures))


class LazyPermutation:
    """A uniformly random permutation of [0, n), sampled only where queried.

    Both directions are kept consistent; every unqueried image is uniform
    over the unused points.  Deterministic given the seed and query order.
    """

    def __init__(self, n: int, seed: int):
        if n < 1:
            raise ValueError("universe size must be >= 1")
        self.n = n
        self._rng = random.Random(seed)
        self._fwd: dict[int, int] = {}
        self._bwd: dict[int, int] = {}

    def apply(self, x: int) -> int:
        if not 0 <= x < self.n:
            raise ValueError(f"{x} outside the universe [0, {self.n})")
        if x in self._fwd:
            return self._fwd[x]
        while True:
            y = self._rng.randrange(self.n)
            if y not in self._bwd:
                self._fwd[x] = y
                self._bwd[y] = x
                return y

    def inverse_apply(self, y: int) -> int:
        if not 0 <= y < self.n:
            raise ValueError(f"{y} outside the universe [0, {self.n})")
        if y in self._bwd:
            return self._bwd[y]
        while True:
            x = self._rng.randrange(self.n)
            if x not in self._fwd:
                self._fwd[x] = y
                self._bwd[y] = x
                return x

    def sampled_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self._fwd.items()))


@dataclass(frozen=True)
class BuildRecord:
    index: int
    grid: TargetGrid
    run: GenericRun

    def to_json_obj(self) -> dict[str, Any]:
        from .jsonio import grid_to_obj
        return {
            "index": self.index,
            "grid": grid_to_obj(self.grid),
            "elements": list(self.run.condition.elements),
            "witnesses": [s.witness for s in self.run.steps],
            "schedule_length": self.run.schedule_length,
            "steps_completed": len(self.run.steps),
            "degraded": self.run.degraded,
            "failure_kind": self.run.failure_kind,
            "failed_at": self.run.failed_at,
        }


@dataclass(frozen=True)
class SampleRecord:
    """One sampled permutation: how much it moves low rows, how well its
    induced function matches each target, and the capture verdicts."""

    index: int
    moved: int
    matches: tuple[int, ...]  # per build
    up_checked: int
    down_checked: int
    violations: int

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "moved": self.moved,
            "matches": list(self.matches),
            "up_checked": self.up_checked,
            "down_checked": self.down_checked,
            "violations": self.violations,
        }


@dataclass(frozen=True)
class SamplingSummary:
    samples: int
    violations: int
    up_checked: int
    down_checked: int
    moved_min: Optional[int]
    moved_max: Optional[int]
    moved_total: int
    match_min: Optional[int]
    match_max: Optional[int]
    match_total: int

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "violations": self.violations,
            "up_checked": self.up_checked,
            "down_checked": self.down_checked,
            "moved": {"min": self.moved_min, "max": self.moved_max,
                      "total": self.moved_total},
            "matches": {"min": self.match_min, "max": self.match_max,
                        "total": self.match_total},
        }


@dataclass(frozen=True)
class PipelineReport:
    config: ExperimentConfig
    builds: tuple[BuildRecord, ...]
    independence: IndependenceReport
    density: ComboDensityReport
    samples: tuple[SampleRecord, ...]
    sampling: SamplingSummary

    @property
    def degraded(self) -> bool:
        return any(b.run.degraded for b in self.builds)

    @property
    def ok(self) -> bool:
        return (not self.degraded and self.independence.ok and self.density.ok
                and self.sampling.violations == 0)

    def to_json_obj(self) -> dict[str, Any]:
        indep = {
            "ok": self.independence.ok,
            "size_found": self.independence.size_found,
            "failing": None if self.independence.failing is None else {
                "pos": list(self.independence.failing.pos),
                "neg": list(self.independence.failing.neg),
            },
        }
        dens = {
            "ok": self.density.ok,
            "failing": None if self.density.failing_spec is None else {
                "pos": list(self.density.failing_spec.pos),
                "neg": list(self.density.failing_spec.neg),
                "probe": self.density.failing_probe,
            },
        }
        return {
            "config": self.config.to_json_obj(),
            "builds": [b.to_json_obj() for b in self.builds],
            "degraded": self.degraded,
            "independence": indep,
            "density": dens,
            "per_sample": [s.to_json_obj() for s in self.samples],
            "sampling": self.sampling.to_json_obj(),
            "ok": self.ok,
        }


def run_pipeline(config: ExperimentConfig) -> PipelineReport:
    """The full experiment: build one matching set per random target grid
    (each seeing its predecessors), test joint independence and combination
    density, then sample permutations and count capture violations.

    Deterministic: the report is a pure function of the configuration.
    """
    n = config.universe
    if config.search_bound > n:
        raise ValueError("search bound cannot exceed the universe size")
    builds: list[BuildRecord] = []
    built_sets: list[FinSet] = []
    for alpha in range(config.builds):
        grid = TargetGrid.random(
            config.rows, config.cols, config.value_bound,
            random.Random(child_seed(config.seed, GRID_TAG, alpha)))
        prior = Family(n, tuple(built_sets),
                       tuple(f"A{j}" for j in range(len(built_sets))))
        schedule = auto_schedule(len(built_sets), config.probes)
        run = build_generic([prior], grid, schedule, config.search_bound)
        builds.append(BuildRecord(alpha, grid, run))
        built_sets.append(run.result_set)

    joint = Family(n, tuple(built_sets),
                   tuple(f"A{j}" for j in range(len(built_sets))))
    depth = min(config.depth, len(joint.sets))
    independence = is_independent(joint, config.threshold, depth)
    density = check_all_combos_dense([joint], config.probe_bound,
                                     config.search_bound, depth)

    records: list[SampleRecord] = []
    for s in range(config.samples):
        perm = LazyPermutation(n, child_seed(config.seed, PERM_TAG, s))
        fn = grid_fn_from_perm(perm, config.rows, config.cols)
        moved = len(moved_within(perm, config.rows))
        match_counts = []
        up_checked = down_checked = violations = 0
        for record in builds:
            match_counts.append(matches(fn, record.grid, config.threshold).count)
            catch = verify_catch(record.run.condition.elements, record.grid, perm)
            up_checked += len(catch.up_cases)
            down_checked += len(catch.down_cases)
            violations += len(catch.failures)
        records.append(SampleRecord(s, moved, tuple(match_counts),
                                    up_checked, down_checked, violations))

    all_matches = [c for r in records for c in r.matches]
    sampling = SamplingSummary(
        config.samples,
        sum(r.violations for r in records),
        sum(r.up_checked for r in records),
        sum(r.down_checked for r in records),
        min((r.moved for r in records), default=None),
        max((r.moved for r in records), default=None),
        sum(r.moved for r in records),
        min(all_matches, default=None),
        max(all_matches, default=None),
        sum(all_matches))
    return PipelineReport(config, tuple(builds), independence, density,
                          tuple(records), sampling)
