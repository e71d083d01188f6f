import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omegalab.errors import (CardinalityMismatch, IncompatiblePair,
                             InducedMapNotPermutation)
from omegalab.extender import (AtomShuffle, FamilyMap, HomogenizeParams,
                               PartialInjection, Permutation, atoms_of,
                               build_permutation, check_compatible,
                               find_independent_shuffle, homogenize,
                               orbit_closure, shuffle_sizes)
from omegalab.finset import Family, FinSet, bit_family, is_independent

SWAP01 = FamilyMap.from_dict({0: 1, 1: 0})


def halves4():
    return Family.from_lists(4, [[0, 1], [2, 3]])


class TestPartialInjection:
    def test_validation(self):
        with pytest.raises(ValueError):
            PartialInjection(4, ((0, 1), (0, 2)))  # source mapped twice
        with pytest.raises(ValueError):
            PartialInjection(4, ((0, 1), (2, 1)))  # not injective
        with pytest.raises(ValueError):
            PartialInjection(4, ((0, 4),))  # leaves the universe

    def test_lookup(self):
        f = PartialInjection.from_dict(8, {3: 5, 1: 2})
        assert f.pairs == ((1, 2), (3, 5))
        assert f.domain() == (1, 3) and f.targets() == (2, 5)
        assert f.apply(3) == 5 and f.defined_at(1) and not f.defined_at(0)
        assert len(PartialInjection.empty(8)) == 0


class TestAtoms:
    def test_bit_family_under_swap(self):
        dec = atoms_of(SWAP01, bit_family(2, 8))
        assert [a.to_list() for a in dec.atoms] == \
            [[0, 4], [1, 5], [2, 6], [3, 7]]
        assert dec.signatures == (0, 1, 2, 3)
        assert dec.action == (0, 2, 1, 3)
        assert dec.position_of(6) == 2

    def test_empty_map_gives_one_cell(self):
        dec = atoms_of(FamilyMap(()), halves4())
        assert len(dec.atoms) == 1
        assert dec.atoms[0].to_list() == [0, 1, 2, 3]
        assert dec.action == (0,)

    def test_misaligned_images_rejected(self):
        fam = Family.from_lists(3, [[0, 1], [1, 2]])
        with pytest.raises(InducedMapNotPermutation):
            atoms_of(FamilyMap.from_dict({0: 1}), fam)

    def test_out_of_range_index(self):
        with pytest.raises(ValueError):
            atoms_of(FamilyMap.from_dict({0: 5}), halves4())


class TestCompatibility:
    def test_compatible_pair(self):
        f = PartialInjection.from_dict(4, {0: 3})
        assert check_compatible(f, SWAP01, halves4()).ok

    def test_incompatible_witness_is_least(self):
        f = PartialInjection.from_dict(4, {0: 0})
        rep = check_compatible(f, SWAP01, halves4())
        assert not rep.ok and rep.witness == (0, 0)

    def test_universe_mismatch(self):
        with pytest.raises(ValueError):
            check_compatible(PartialInjection.empty(8), SWAP01, halves4())


class TestBuildPermutation:
    def test_swap_of_halves(self):
        sizes = shuffle_sizes(PartialInjection.empty(4), SWAP01, halves4())
        assert sizes == (2, 2)
        perm = build_permutation(PartialInjection.empty(4), SWAP01, halves4(),
                                 AtomShuffle.identity(sizes))
        assert perm.images == (2, 3, 0, 1)

    def test_fixed_pair_respected(self):
        f = PartialInjection.from_dict(4, {0: 3})
        sizes = shuffle_sizes(f, SWAP01, halves4())
        assert sizes == (1, 2)
        perm = build_permutation(f, SWAP01, halves4(),
                                 AtomShuffle.identity(sizes))
        assert perm.images == (3, 2, 0, 1)

    def test_incompatible_pair_raises(self):
        f = PartialInjection.from_dict(4, {0: 0})
        with pytest.raises(IncompatiblePair):
            build_permutation(f, SWAP01, halves4(), AtomShuffle(((), ())))

    def test_cardinality_mismatch(self):
        fam = Family.from_lists(5, [[0, 1], [2, 3, 4]])
        sizes = shuffle_sizes(PartialInjection.empty(5), SWAP01, fam)
        with pytest.raises(CardinalityMismatch):
            build_permutation(PartialInjection.empty(5), SWAP01, fam,
                              AtomShuffle.identity(sizes))

    def test_shuffle_twists_free_points(self):
        twisted = AtomShuffle(((1, 0), (0, 1)))
        perm = build_permutation(PartialInjection.empty(4), SWAP01, halves4(),
                                 twisted)
        assert perm.images == (3, 2, 0, 1)

    def test_wrong_shuffle_shape(self):
        with pytest.raises(ValueError):
            build_permutation(PartialInjection.empty(4), SWAP01, halves4(),
                              AtomShuffle(((0, 1),)))

    @given(st.integers(0, 2 ** 31), st.integers(2, 4), st.data())
    @settings(max_examples=40, deadline=None)
    def test_random_compatible_instances(self, seed, e, data):
        # build a cell-respecting partial injection, complete it, and check
        # the postcondition: the result extends f and carries set j onto
        # set g(j) for every j in the domain of g
        n = 1 << e
        fam = bit_family(e, n)
        rng = random.Random(seed)
        dom = sorted(rng.sample(range(e), rng.randint(0, e)))
        images = list(dom)
        rng.shuffle(images)
        g = FamilyMap(tuple(zip(dom, images)))
        dec = atoms_of(g, fam)
        pairs = []
        for k, atom in enumerate(dec.atoms):
            src = atom.to_list()
            tgt = dec.atoms[dec.action[k]].to_list()
            take = data.draw(st.integers(0, len(src)))
            pairs.extend(zip(src[:take], tgt[:take]))
        f = PartialInjection(n, tuple(pairs))
        assert check_compatible(f, g, fam).ok
        sizes = shuffle_sizes(f, g, fam)
        perm = build_permutation(f, g, fam, AtomShuffle.random(sizes, rng))
        for x, y in f.pairs:
            assert perm.apply(x) == y
        for j, j2 in g.pairs:
            assert perm.apply_set(fam.sets[j]) == fam.sets[j2]


class TestPermutation:
    def test_validation(self):
        with pytest.raises(ValueError):
            Permutation(3, (0, 0, 2))
        with pytest.raises(ValueError):
            Permutation(3, (0, 1))

    def test_inverse(self):
        p = Permutation(4, (2, 0, 3, 1))
        assert [p.inverse_apply(p.apply(x)) for x in range(4)] == [0, 1, 2, 3]
        s = FinSet.from_members(4, [0, 3])
        assert p.apply_set(s).to_list() == [1, 2]
        assert p.inverse_apply_set(p.apply_set(s)) == s

    def test_identity(self):
        assert Permutation.identity(3).images == (0, 1, 2)


class TestOrbitClosure:
    def test_one_layer_example(self):
        fam = Family.from_lists(4, [[0, 1]])
        cyc = Permutation(4, (1, 2, 3, 0))
        closed = orbit_closure(fam, cyc, 1)
        assert [s.to_list() for s in closed.sets] == [[0, 1], [1, 2], [0, 3]]
        assert closed.labels == ("set0", "set0+1", "set0-1")

    def test_duplicates_dropped(self):
        fam = halves4()
        swap = Permutation(4, (2, 3, 0, 1))
        closed = orbit_closure(fam, swap, 3)
        assert len(closed.sets) == 2  # the halves only trade places

    def test_zero_layers(self):
        fam = bit_family(2, 8)
        assert orbit_closure(fam, Permutation.identity(8), 0).sets == fam.sets

    @given(st.integers(0, 2 ** 31), st.integers(0, 2))
    @settings(max_examples=40, deadline=None)
    def test_double_closure_equals_doubled_layers(self, seed, layers):
        rng = random.Random(seed)
        images = list(range(8))
        rng.shuffle(images)
        perm = Permutation(8, tuple(images))
        fam = Family.from_lists(8, [rng.sample(range(8), 3)])
        once = orbit_closure(fam, perm, layers)
        twice = orbit_closure(once, perm, layers)
        direct = orbit_closure(fam, perm, 2 * layers)
        assert {s.mask for s in twice.sets} == {s.mask for s in direct.sets}


class TestAtomShuffle:
    def test_validation(self):
        with pytest.raises(ValueError):
            AtomShuffle(((0, 2),))
        AtomShuffle(((), (0,), (1, 0)))

    def test_random_shapes(self):
        sh = AtomShuffle.random((3, 0, 2), random.Random(1))
        assert [len(p) for p in sh.perms] == [3, 0, 2]


class TestFindIndependentShuffle:
    def test_succeeds_on_symmetric_family(self):
        rep = find_independent_shuffle(
            PartialInjection.empty(8), SWAP01, bit_family(2, 8),
            threshold=2, depth=2, layers=1, budget=50, seed=5)
        assert rep.ok and rep.attempts >= 1
        assert rep.independence.ok
        assert rep.best_min_size == rep.independence.size_found
        assert not rep.exhausted
        # success postconditions hold for the returned artifacts
        for j, j2 in SWAP01.pairs:
            assert rep.permutation.apply_set(bit_family(2, 8).sets[j]) == \
                bit_family(2, 8).sets[j2]

    def test_budget_zero_exhausts(self):
        rep = find_independent_shuffle(
            PartialInjection.empty(8), SWAP01, bit_family(2, 8),
            threshold=2, depth=2, layers=1, budget=0, seed=5)
        assert not rep.ok and rep.exhausted
        assert rep.attempts == 0 and rep.best_attempt is None

    def test_unreachable_threshold_reports_best(self):
        rep = find_independent_shuffle(
            PartialInjection.empty(8), SWAP01, bit_family(2, 8),
            threshold=3, depth=2, layers=1, budget=7, seed=5)
        assert not rep.ok and rep.exhausted
        assert rep.attempts == 7
        assert rep.best_attempt == 1  # all attempts tie at min size 2
        assert rep.best_min_size == 2
        assert rep.permutation is None and rep.closure is None

    def test_incompatible_input_raises(self):
        with pytest.raises(IncompatiblePair):
            find_independent_shuffle(
                PartialInjection.from_dict(4, {0: 0}), SWAP01, halves4(),
                threshold=1, depth=1, layers=1, budget=3, seed=0)


class TestHomogenize:
    PARAMS = HomogenizeParams(threshold=2, depth=2, layers=1, budget=30,
                              seed=99)

    def test_no_demands_is_identity(self):
        fam = bit_family(2, 8)
        rep = homogenize(fam, [], self.PARAMS)
        assert rep.ok and rep.steps == () and rep.family is fam
        assert rep.failed_at is None

    def test_trivial_demand_on_empty_family(self):
        fam = Family(4, ())
        rep = homogenize(fam, [(PartialInjection.empty(4), FamilyMap(()))],
                         HomogenizeParams(2, 2, 1, 5, 1))
        assert rep.ok and len(rep.steps) == 1
        assert rep.family.sets == ()  # nothing to close over

    def test_two_demands_grow_then_hold(self):
        fam = bit_family(2, 32)
        demands = [
            (PartialInjection.empty(32), SWAP01),
            (PartialInjection.empty(32), FamilyMap.from_dict({0: 0, 1: 1})),
        ]
        rep = homogenize(fam, demands, HomogenizeParams(4, 2, 1, 30, 3))
        assert rep.ok and len(rep.steps) == 2 and rep.failed_at is None
        assert is_independent(rep.family, 4, 2).ok
        assert {s.mask for s in fam.sets} <= {s.mask for s in rep.family.sets}

    def test_stops_at_first_failure(self):
        fam = bit_family(2, 8)
        demands = [
            (PartialInjection.empty(8), SWAP01),
            (PartialInjection.empty(8), SWAP01),
        ]
        params = HomogenizeParams(threshold=5, depth=2, layers=1, budget=4,
                                  seed=2)
        rep = homogenize(fam, demands, params)
        assert not rep.ok
        assert rep.failed_at == 0 and len(rep.steps) == 1
        assert rep.family is fam  # untouched by the failed step
