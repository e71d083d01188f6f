"""Command-line front door.

Structured JSON goes to --out (or stdout when no --out is given); the
one-screen human summary always goes to stderr, so piping JSON stays clean.

Exit statuses: 0 pass, 1 invariant violation, 2 degraded/budget-exhausted,
64 usage, 65 bad data, 66 missing input, 74 other I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Optional, Sequence

from .codec import nth_partial_fn, partial_fn_index
from .config import ExperimentConfig
from .diag import run_pipeline
from .errors import (CardinalityMismatch, GridOverflow, IncompatiblePair,
                     InducedMapNotPermutation, PreconditionUnmet,
                     SearchExhausted)
from .extender import find_independent_shuffle, orbit_closure
from .finset import bit_family, combination_specs, is_independent, is_saturated
from .generic import (auto_schedule, build_generic, check_all_combos_dense,
                      check_pairwise_match)
from .jsonio import (canonical_dumps, extension_demand_from_obj,
                     families_from_obj, family_from_obj, family_to_obj,
                     finset_from_obj, grid_from_obj, partial_fn_from_obj,
                     partial_fn_to_obj, permutation_from_obj, read_json,
                     schedule_from_obj, schedule_to_obj, write_json)

EX_OK = 0
EX_VIOLATION = 1
EX_DEGRADED = 2
EX_USAGE = 64
EX_DATA = 65
EX_NOINPUT = 66
EX_IOERR = 74


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would sys.exit(2); the exit-status contract wants 64
    def error(self, message):
        raise _UsageError(message)


def _say(line: str) -> None:
    print(line, file=sys.stderr)


def _emit(obj: Any, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(canonical_dumps(obj))
    else:
        write_json(out, obj)
        _say(f"wrote {out}")


def _threads_note() -> None:
    raw = os.environ.get("OMEGALAB_THREADS")
    if raw is None:
        return
    if not raw.isdigit():
        raise _UsageError("OMEGALAB_THREADS must be a non-negative integer")
    cap = "auto" if int(raw) == 0 else raw
    _say(f"threads: {cap} (engine runs sequentially; the cap is honored)")


def _spec_str(pos, neg) -> str:
    return f"pos={list(pos)} neg={list(neg)}"


# --- subcommand handlers ------------------------------------------------------

def _cmd_gen_family(args) -> int:
    family = bit_family(args.k, args.n)
    _emit(family_to_obj(family), args.out)
    _say(f"gen-family: {len(family.sets)} sets over [0, {family.n})")
    return EX_OK


def _cmd_check_indep(args) -> int:
    family = family_from_obj(read_json(args.family))
    depth = len(family.sets) if args.d is None else args.d
    rep = is_independent(family, args.t, depth)
    obj = {
        "ok": rep.ok, "t": rep.threshold, "d": rep.depth,
        "size_found": rep.size_found,
        "failing": None if rep.failing is None else
        {"pos": list(rep.failing.pos), "neg": list(rep.failing.neg)},
    }
    _emit(obj, args.out)
    if rep.ok:
        _say(f"independence: PASS (t={rep.threshold}, d={rep.depth}, "
             f"min size {rep.size_found})")
        return EX_OK
    _say(f"independence: FAIL ({_spec_str(rep.failing.pos, rep.failing.neg)}, "
         f"size {rep.size_found})")
    return EX_VIOLATION


def _cmd_check_saturation(args) -> int:
    family = family_from_obj(read_json(args.family))
    rep = is_saturated(family, args.s)
    obj = {
        "ok": rep.ok, "s": rep.bound,
        "witness": None if rep.witness is None else
        {"p": sorted(rep.witness[0]), "q": sorted(rep.witness[1])},
    }
    _emit(obj, args.out)
    if rep.ok:
        _say(f"saturation: PASS (s={rep.bound})")
        return EX_OK
    p, q = rep.witness
    _say(f"saturation: FAIL (p={sorted(p)}, q={sorted(q)})")
    return EX_VIOLATION


def _cmd_rho(args) -> int:
    if args.m < 0:
        raise _UsageError("the index must be >= 0")
    sys.stdout.write(canonical_dumps(partial_fn_to_obj(nth_partial_fn(args.m))))
    return EX_OK


def _cmd_rho_index(args) -> int:
    fn = partial_fn_from_obj(read_json(args.file))
    print(partial_fn_index(fn))
    return EX_OK


def _cmd_extend_perm(args) -> int:
    family = family_from_obj(read_json(args.family))
    f, g = extension_demand_from_obj(read_json(args.demand), family.n)
    rep = find_independent_shuffle(f, g, family, args.t, args.d, args.L,
                                   args.budget, args.seed)
    obj = {
        "ok": rep.ok, "attempts": rep.attempts, "budget": rep.budget,
        "permutation": None if rep.permutation is None
        else list(rep.permutation.images),
        "closure": None if rep.closure is None else family_to_obj(rep.closure),
        "independence": None if rep.independence is None else {
            "ok": rep.independence.ok,
            "size_found": rep.independence.size_found,
            "t": rep.independence.threshold, "d": rep.independence.depth,
        },
        "best_attempt": rep.best_attempt,
        "best_min_size": rep.best_min_size,
    }
    _emit(obj, args.out)
    if rep.ok:
        _say(f"extend-perm: PASS (attempts: {rep.attempts}, closure sets: "
             f"{len(rep.closure.sets)})")
        return EX_OK
    _say(f"extend-perm: DEGRADED (budget {rep.budget} exhausted, best min "
         f"size {rep.best_min_size})")
    return EX_DEGRADED


def _cmd_close_orbit(args) -> int:
    family = family_from_obj(read_json(args.family))
    perm = permutation_from_obj(read_json(args.perm))
    closed = orbit_closure(family, perm, args.layers)
    _emit(family_to_obj(closed), args.out)
    _say(f"close-orbit: {len(family.sets)} -> {len(closed.sets)} sets "
         f"(layers: {args.layers})")
    return EX_OK


def _parse_demand_source(value: str, prior_count: int):
    if value.startswith("auto:"):
        body = value[len("auto:"):]
        if not body.startswith("q=") or not body[2:].isdigit():
            raise _UsageError("--demands auto form must be auto:q=<count>")
        return auto_schedule(prior_count, int(body[2:]))
    return schedule_from_obj(read_json(value))


def _cmd_build_generic(args) -> int:
    families = families_from_obj(read_json(args.families))
    grid = grid_from_obj(read_json(args.eta))
    prior_count = sum(len(f.sets) for f in families)
    schedule = _parse_demand_source(args.demands, prior_count)
    run = build_generic(families, grid, schedule, args.search_bound)
    obj = {
        "universe": run.universe,
        "search_bound": run.search_bound,
        "schedule": schedule_to_obj(schedule)["demands"],
        "witnesses": [s.witness for s in run.steps],
        "A": list(run.condition.elements),
        "decided_below": run.decided_below,
        "steps_completed": len(run.steps),
        "schedule_length": run.schedule_length,
        "degraded": run.degraded,
        "failure_kind": run.failure_kind,
        "failed_at": run.failed_at,
    }
    _emit(obj, args.out)
    size = len(run.condition.elements)
    if run.degraded:
        _say(f"build-generic: DEGRADED ({run.failure_kind} at demand "
             f"{run.failed_at}, |A| = {size})")
        return EX_DEGRADED
    _say(f"build-generic: OK (|A| = {size}, met {len(run.steps)}/"
         f"{run.schedule_length} demands)")
    return EX_OK


def _cmd_verify_star(args) -> int:
    families = families_from_obj(read_json(args.families))
    total = sum(len(f.sets) for f in families)
    depth = total if args.depth is None else args.depth
    rep = check_all_combos_dense(families, args.probe_bound,
                                 args.search_bound, depth)
    obj = {
        "ok": rep.ok, "probe_bound": rep.probe_bound,
        "search_bound": rep.search_bound, "depth": depth,
        "failing": None if rep.failing_spec is None else {
            "pos": list(rep.failing_spec.pos),
            "neg": list(rep.failing_spec.neg),
            "probe": rep.failing_probe,
        },
    }
    _emit(obj, args.out)
    specs = sum(1 for _ in combination_specs(total, depth))
    if rep.ok:
        _say(f"star-density: PASS (specs: {specs}, probes: {rep.probe_bound})")
        return EX_OK
    _say(f"star-density: FAIL ({_spec_str(rep.failing_spec.pos, rep.failing_spec.neg)}, "
         f"probe {rep.failing_probe})")
    return EX_VIOLATION


def _cmd_verify_starstar(args) -> int:
    members = finset_from_obj(read_json(args.set))
    grid = grid_from_obj(read_json(args.eta))
    rep = check_pairwise_match(members, grid)
    obj = {"ok": rep.ok,
           "witness": None if rep.witness is None else list(rep.witness)}
    _emit(obj, args.out)
    if rep.ok:
        _say(f"pair-match: PASS (|A| = {len(members)})")
        return EX_OK
    m, n, i = rep.witness
    _say(f"pair-match: FAIL (pair m={m}, n={n} unmatched on layer {i})")
    return EX_VIOLATION


def _cmd_diag_experiment(args) -> int:
    config = ExperimentConfig.from_json_obj(read_json(args.config))
    report = run_pipeline(config)
    _emit(report.to_json_obj(), args.out)
    for b in report.builds:
        size = len(b.run.condition.elements)
        if b.run.degraded:
            _say(f"build {b.index}: DEGRADED ({b.run.failure_kind} at demand "
                 f"{b.run.failed_at}, |A| = {size})")
        else:
            _say(f"build {b.index}: OK (|A| = {size})")
    indep = report.independence
    if indep.ok:
        _say(f"independence: PASS (t={indep.threshold}, d={indep.depth}, "
             f"min size {indep.size_found})")
    else:
        _say(f"independence: FAIL ({_spec_str(indep.failing.pos, indep.failing.neg)}, "
             f"size {indep.size_found})")
    dens = report.density
    if dens.ok:
        _say(f"density: PASS (probes: {dens.probe_bound})")
    else:
        _say(f"density: FAIL ({_spec_str(dens.failing_spec.pos, dens.failing_spec.neg)}, "
             f"probe {dens.failing_probe})")
    verdict = "PASS" if report.sampling.violations == 0 else "FAIL"
    _say(f"theorem-shadow: {verdict} (π samples: {report.sampling.samples}, "
         f"violations: {report.sampling.violations})")
    if report.sampling.violations > 0:
        return EX_VIOLATION
    if report.degraded:
        return EX_DEGRADED
    if not (indep.ok and dens.ok):
        return EX_VIOLATION
    return EX_OK


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="omegalab",
                     description="Bounded-universe engine for independent "
                                 "families, a canonical enumeration of finite "
                                 "partial functions, permutation extension, "
                                 "and generic constructions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-family", help="emit the canonical bit family")
    p.add_argument("--k", type=int, required=True, help="number of sets")
    p.add_argument("--n", type=int, required=True, help="universe size")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_gen_family)

    p = sub.add_parser("check-indep", help="exhaustive independence check")
    p.add_argument("--family", required=True)
    p.add_argument("--t", type=int, required=True, help="least combination size")
    p.add_argument("--d", type=int, default=None, help="combination depth cap")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_check_indep)

    p = sub.add_parser("check-saturation", help="small-demand saturation check")
    p.add_argument("--family", required=True)
    p.add_argument("--s", type=int, required=True, help="demand size cap")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_check_saturation)

    p = sub.add_parser("rho", help="print the m-th partial function")
    p.add_argument("m", type=int)
    p.set_defaults(func=_cmd_rho)

    p = sub.add_parser("rho-index",
                       help="read a partial-function JSON, print its index")
    p.add_argument("file")
    p.set_defaults(func=_cmd_rho_index)

    p = sub.add_parser("extend-perm",
                       help="complete a compatible pair, searching shuffles "
                            "for an independent closure")
    p.add_argument("--family", required=True)
    p.add_argument("--demand", required=True,
                   help="JSON with point pairs f and index pairs g")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--L", type=int, required=True, help="closure layers")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_extend_perm)

    p = sub.add_parser("close-orbit",
                       help="close a family under a permutation's images")
    p.add_argument("--family", required=True)
    p.add_argument("--perm", required=True)
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_close_orbit)

    p = sub.add_parser("build-generic",
                       help="fold a demand schedule into a matching set")
    p.add_argument("--families", required=True)
    p.add_argument("--eta", required=True, help="target grid JSON")
    p.add_argument("--demands", required=True,
                   help="schedule JSON path, or auto:q=<probe count>")
    p.add_argument("--search-bound", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_build_generic)

    p = sub.add_parser("verify-star",
                       help="every combination dense in the enumeration")
    p.add_argument("--families", required=True)
    p.add_argument("--probe-bound", type=int, required=True)
    p.add_argument("--search-bound", type=int, required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify_star)

    p = sub.add_parser("verify-starstar",
                       help="exact pairwise-match check of a set on a grid")
    p.add_argument("--set", required=True)
    p.add_argument("--eta", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify_starstar)

    p = sub.add_parser("diag-experiment",
                       help="seeded end-to-end experiment with JSON report")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_diag_experiment)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _threads_note()
        return args.func(args)
    except _UsageError as e:
        _say(f"usage error: {e}")
        return EX_USAGE
    except FileNotFoundError as e:
        _say(f"missing input: {e.filename if e.filename else e}")
        return EX_NOINPUT
    except json.JSONDecodeError as e:
        _say(f"bad JSON: {e}")
        return EX_DATA
    except (IncompatiblePair, PreconditionUnmet, GridOverflow) as e:
        _say(f"invalid data: {e}")
        return EX_DATA
    except (SearchExhausted, CardinalityMismatch,
            InducedMapNotPermutation) as e:
        _say(f"degraded: {e}")
        return EX_DEGRADED
    except ValueError as e:
        _say(f"invalid data: {e}")
        return EX_DATA
    except OSError as e:
        _say(f"io error: {e}")
        return EX_IOERR


def script_entry() -> None:
    sys.exit(main())
