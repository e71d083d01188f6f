"""Bounded-universe engine for independent set families, a canonical
enumeration of finite partial functions, permutation extension, and
demand-driven generic constructions."""

from .codec import (EMPTY_FN, PartialFn, cantor_pair, cantor_unpair,
                    check_dense, count_functional_below, entry_slot,
                    index_of_raw_code, is_functional_raw,
                    least_extension_index, nth_partial_fn, partial_fn_index,
                    point_code, point_decode, raw_code_of_index, slot_decode)
from .config import ExperimentConfig, child_seed
from .diag import (CatchReport, GridFn, LazyPermutation, MatchReport,
                   PipelineReport, case_split, grid_fn_from_perm, matches,
                   moved_within, run_pipeline, verify_catch)
from .errors import (CardinalityMismatch, GridOverflow, IncompatiblePair,
                     InducedMapNotPermutation, OmegalabError,
                     PreconditionUnmet, SearchExhausted)
from .extender import (AtomDecomposition, AtomShuffle, FamilyMap,
                       HomogenizeParams, HomogenizeReport, PartialInjection,
                       Permutation, ShuffleSearchReport, atoms_of,
                       build_permutation, check_compatible,
                       find_independent_shuffle, homogenize, orbit_closure,
                       shuffle_sizes)
from .finset import (CombinationSpec, Family, FinSet, IndependenceReport,
                     SaturationReport, bit_family, boolean_combination,
                     combination_specs, is_independent, is_saturated,
                     min_combination_size)
from .generic import (IN, OUT, ComboDensityReport, Condition, Demand,
                      GenericRun, MeetResult, TargetGrid, auto_schedule,
                      build_generic, check_all_combos_dense,
                      check_pairwise_match, extend_to_meet, is_condition)

__version__ = "0.1.0"
