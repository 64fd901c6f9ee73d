import math
import random
from fractions import Fraction

import numpy as np
import pytest

from TreeCap import (
    CapacityError,
    CapacityInterval,
    Explicit,
    Homogeneous,
    SphericallySymmetric,
    Subdyadic,
    branched_fraction,
    build_tree,
    capacity_of_set,
    capacity_of_spec,
    capacity_recursive,
    homogeneous_capacity,
    oracle_capacity,
    rescaling_constant,
    single_point_capacity,
    spanned_subtree,
    symmetric_capacity,
    symmetric_measure,
    tail_bounds,
    tail_values,
    tent,
    tent_capacity_at_level,
    total_resistance,
    TreeError,
)

TOL = 1e-12


class TestInterval:
    def test_invalid(self):
        with pytest.raises(CapacityError):
            CapacityInterval(0.6, 0.5)
        with pytest.raises(CapacityError):
            CapacityInterval(-0.1, 0.5)

    def test_hull_is_clipped(self):
        interval = CapacityInterval.hull(1.0, 0.0, pad=0.5)
        assert (interval.lower, interval.upper) == (0.0, 1.0)
        assert CapacityInterval.exact(0.25).width == 0.0
        assert CapacityInterval(0.2, 0.4).midpoint == pytest.approx(0.3)
        assert CapacityInterval(0.2, 0.4).contains(0.41, slack=0.02)


class TestClosedForms:
    def test_homogeneous(self):
        assert homogeneous_capacity(2, 2) == pytest.approx(0.5)
        assert homogeneous_capacity(3, 2) == pytest.approx(2 / 3)
        assert homogeneous_capacity(2, 3) == pytest.approx((1 - 2 ** -0.5) ** 2)

    def test_single_point(self):
        assert single_point_capacity(4, 3) == pytest.approx(1 / 16)
        with pytest.raises(CapacityError):
            single_point_capacity(0, 2)


class TestRecursion:
    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_paths(self, path_tree, p):
        for k in range(1, 21):
            result = capacity_recursive(path_tree(k), p)
            assert result.capacity.width == 0.0
            assert result.capacity.lower == pytest.approx(k ** (1 - p), rel=TOL)

    def test_binary(self, binary2):
        result = capacity_recursive(binary2, 2)
        assert result.capacity.lower == pytest.approx(2 / 3)
        assert result.measure.co_potential.tolist() == pytest.approx([2 / 3, 1 / 3, 1 / 3])
        assert result.c_of_alpha.tolist() == pytest.approx([2 / 3, 1.0, 1.0])
        assert result.equilibrium_function.tolist() == pytest.approx([2 / 3, 1 / 3, 1 / 3])

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_measure_is_additive_and_carries_the_capacity(self, random_tree, p):
        rng = random.Random(13)
        tree = random_tree(rng)
        result = capacity_recursive(tree, p)
        M = result.measure.co_potential
        assert result.measure.mass == pytest.approx(result.capacity.lower, rel=TOL)
        assert M[tree.leaf_mask].sum() == pytest.approx(M[0], rel=1e-10)
        assert np.all(M >= 0)

    @pytest.mark.parametrize("n, p", [(2, 2.0), (3, 2.0), (2, 3.0), (3, 1.5), (4, 1.5), (5, 2.5)])
    def test_homogeneous_depth_30(self, n, p):
        result = capacity_of_spec(Homogeneous(n), p, depth=30)
        assert result.capacity.width < 1e-5
        assert result.capacity.contains(homogeneous_capacity(n, p), slack=1e-12)

    def test_truncations_bracket_the_homogeneous_capacity(self):
        spec = Homogeneous(2)
        tree = build_tree(spec, depth=10)
        certified = capacity_recursive(tree, 2, tail_bounds(spec, tree, 2))
        assert certified.capacity.contains(0.5, slack=1e-12)
        assert certified.capacity.width < 1e-9
        loose = capacity_recursive(tree, 2, "interval")
        assert loose.capacity.lower == 0.0
        assert loose.capacity.upper >= 0.5
        low = capacity_of_spec(spec, 2, depth=10, tail="0").capacity.lower
        high = capacity_of_spec(spec, 2, depth=10, tail="1").capacity.upper
        assert low < 0.5 < high

    def test_spec_recursion_matches_arena(self):
        spec = SphericallySymmetric((3, 2), tail_degree=2)
        tree = build_tree(spec, depth=8)
        arena = capacity_recursive(tree, 2.5, "1")
        compressed = capacity_of_spec(spec, 2.5, depth=8, tail="1")
        assert compressed.capacity.lower == pytest.approx(arena.capacity.lower, rel=TOL)
        for k, ids in enumerate(tree.by_level()):
            assert arena.measure.co_potential[ids] == pytest.approx(compressed.M_by_level[k], rel=1e-10)

    def test_threads_do_not_change_the_result(self):
        tree = build_tree(Homogeneous(3), depth=6)
        one = capacity_recursive(tree, 3, "interval", threads=1)
        two = capacity_recursive(tree, 3, "interval", threads=2)
        assert one.capacity == two.capacity
        assert np.array_equal(one.measure.co_potential, two.measure.co_potential)

    def test_tail_policies(self):
        tree = build_tree(Homogeneous(2), depth=2)
        lo, hi = tail_values(tree, {a: (0.25, 0.5) for a in tree.tails()})
        assert set(lo[tree.tails()]) == {0.25} and set(hi[tree.tails()]) == {0.5}
        with pytest.raises(CapacityError):
            capacity_recursive(tree, 2, "bogus")
        with pytest.raises(CapacityError):
            capacity_recursive(tree, 2, {3: 0.5})
        with pytest.raises(CapacityError):
            capacity_recursive(tree, 2, 1.5)

    def test_number_as_tail_value(self):
        tree = build_tree(Homogeneous(2), depth=1)
        # two tails of value 1/2 under the root: S = 1, c = 1/2
        assert capacity_recursive(tree, 2, 0.5).capacity.lower == pytest.approx(0.5 - 1e-13)

    def test_spec_errors(self):
        with pytest.raises(TreeError):
            capacity_of_spec(Explicit({"a": []}), 2, depth=3)
        with pytest.raises(CapacityError):
            capacity_of_spec(Homogeneous(2), 2, depth=3, tail="bogus")


class TestSets:
    def test_matches_spanned_subtree(self, random_tree, leaf_subset):
        rng = random.Random(17)
        for _ in range(10):
            tree = random_tree(rng)
            E = leaf_subset(rng, tree)
            on_set = capacity_of_set(tree, E, 2.5)
            S = spanned_subtree(tree, E)
            on_subtree = capacity_recursive(S, 2.5)
            assert on_set.capacity.lower == pytest.approx(on_subtree.capacity.lower, rel=TOL)
            M = on_set.measure.co_potential
            assert M[list(S.origin)] == pytest.approx(on_subtree.measure.co_potential, rel=1e-10)
            outside = np.ones(len(tree), dtype=bool)
            outside[list(S.origin)] = False
            assert np.all(M[outside] == 0.0)

    def test_monotone(self, random_tree):
        rng = random.Random(19)
        tree = random_tree(rng)
        leaves = tree.true_leaves()
        previous = 0.0
        for k in range(1, len(leaves) + 1):
            value = capacity_of_set(tree, leaves[:k], 2).capacity.lower
            assert value >= previous - TOL
            previous = value
        assert previous == pytest.approx(capacity_recursive(tree, 2).capacity.lower, rel=TOL)

    def test_subadditive(self, random_tree, leaf_subset):
        rng = random.Random(41)
        for _ in range(30):
            tree = random_tree(rng, 60)
            p = rng.uniform(1.2, 4.0)
            E, F = leaf_subset(rng, tree), leaf_subset(rng, tree)
            union = capacity_of_set(tree, set(E) | set(F), p).capacity.lower
            separate = capacity_of_set(tree, E, p).capacity.lower + capacity_of_set(tree, F, p).capacity.lower
            assert union <= separate * (1 + 1e-12)

    def test_empty_set(self, binary2):
        with pytest.raises(CapacityError):
            capacity_of_set(binary2, [], 2)

    def test_labels(self, binary2):
        assert capacity_of_set(binary2, ["a"], 2).capacity.lower == pytest.approx(0.5)


class TestSymmetric:
    def test_symmetric_capacity_from_degrees(self):
        interval = symmetric_capacity([2] * 5, 2, depth=40, eventual_min=2)
        assert interval.contains(0.5, slack=1e-12)
        assert interval.upper == pytest.approx(1 / (2 - 1 / 32))
        assert symmetric_capacity([2] * 5, 2, depth=40).lower == 0.0

    def test_symmetric_capacity_from_spec(self):
        exact = symmetric_capacity(Homogeneous(3), 3, depth=5)
        assert exact.contains(homogeneous_capacity(3, 3), slack=1e-12)
        finite = SphericallySymmetric((3, 2, 2))
        value = symmetric_capacity(finite, 2, depth=10)
        assert value.width == 0.0
        assert value.lower == pytest.approx(1 / (1 + 1 / 3 + 1 / 6 + 1 / 12))
        assert value.lower == pytest.approx(capacity_recursive(build_tree(finite), 2).capacity.lower, rel=TOL)

    @pytest.mark.parametrize("deg", [[], [2, 0]])
    def test_symmetric_capacity_errors(self, deg):
        with pytest.raises(CapacityError):
            symmetric_capacity(deg, 2, depth=5)

    def test_symmetric_capacity_rejects_explicit(self):
        with pytest.raises(CapacityError):
            symmetric_capacity(Explicit({"a": []}), 2, depth=5)
        with pytest.raises(CapacityError):
            symmetric_capacity([2], 2, depth=0)

    def test_symmetric_measure(self, binary3):
        M = symmetric_measure([2, 2], 2)
        assert M == pytest.approx([4 / 7, 2 / 7, 1 / 7])
        result = capacity_recursive(binary3, 2)
        for k, ids in enumerate(binary3.by_level()):
            assert result.measure.co_potential[ids] == pytest.approx(M[k])

    def test_tent_capacity_at_level(self):
        for k in range(5):
            assert tent_capacity_at_level(Homogeneous(2), k, 2) == pytest.approx(0.5)
        # runs of one level each: the tent at any level is again a binary tree
        assert tent_capacity_at_level(Subdyadic((1, 1)), 3, 2) == pytest.approx(0.5)

    def test_tail_bounds(self):
        spec = Homogeneous(3)
        tree = build_tree(spec, depth=3)
        bounds = tail_bounds(spec, tree, 2)
        assert sorted(bounds) == tree.tails()
        for interval in bounds.values():
            assert interval.contains(homogeneous_capacity(3, 2))
            assert interval.width < 1e-12


class TestRescaling:
    def test_root(self, binary2):
        result = capacity_recursive(binary2, 2)
        assert rescaling_constant(binary2, result, 0, 2).k == pytest.approx(1.0)

    def test_child_of_binary_root(self, binary2):
        result = capacity_recursive(binary2, 2)
        scaled = rescaling_constant(binary2, result, 1, 2)
        assert scaled.k == pytest.approx(3.0)
        assert scaled.measure.co_potential.tolist() == pytest.approx([1.0])

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_rescaled_restriction_is_the_tent_equilibrium(self, random_tree, p):
        rng = random.Random(23)
        tree = random_tree(rng)
        result = capacity_recursive(tree, p)
        for alpha in range(len(tree)):
            scaled = rescaling_constant(tree, result, alpha, p)
            own = capacity_recursive(tent(tree, alpha), p)
            assert scaled.measure.co_potential == pytest.approx(own.measure.co_potential, rel=1e-9, abs=1e-12)
            assert scaled.measure.mass == pytest.approx(result.c_of_alpha[alpha], rel=1e-9)
            if alpha != tree.root:
                assert scaled.k > 1.0


    def test_tent_capacity_exceeds_capacity_in_the_tree(self, random_tree):
        rng = random.Random(47)
        for _ in range(40):
            tree = random_tree(rng, 60)
            p = rng.uniform(1.2, 4.0)
            alpha = rng.randrange(1, len(tree))
            sub = tent(tree, alpha)
            local = [i for i in sub.true_leaves() if rng.random() < 0.6] or sub.true_leaves()
            E = [sub.origin[i] for i in local]
            inside = capacity_of_set(sub, local, p).capacity.lower
            outside = capacity_of_set(tree, E, p).capacity.lower
            assert inside > outside * (1 + 1e-9)


class TestResistance:
    def test_binary(self, binary2):
        resistance = total_resistance(binary2)
        assert resistance.lower == resistance.upper == pytest.approx(0.5)
        assert resistance.capacity.lower == pytest.approx(2 / 3)
        assert resistance.tent_resistance.tolist() == pytest.approx([1.5, 1.0, 1.0])

    def test_identity_with_the_recursion(self, random_tree):
        rng = random.Random(29)
        for _ in range(5):
            tree = random_tree(rng)
            resistance = total_resistance(tree)
            result = capacity_recursive(tree, 2)
            assert resistance.identity_residual(result.c_of_alpha) < 1e-12
            assert resistance.capacity.lower == pytest.approx(result.capacity.lower, rel=1e-12)

    def test_identity_on_branching_trees(self, random_tree):
        rng = random.Random(53)
        for _ in range(50):
            tree = random_tree(rng, 80, branching=True)
            assert all(len(tree.children(a)) != 1 for a in range(len(tree)))
            resistance = total_resistance(tree)
            result = capacity_recursive(tree, 2)
            assert resistance.identity_residual(result.c_of_alpha) < 1e-12
            assert 1.0 / (1.0 + resistance.lower) == pytest.approx(result.capacity.lower, rel=1e-12)

    def test_with_tails(self):
        spec = Homogeneous(2)
        tree = build_tree(spec, depth=8)
        policy = tail_bounds(spec, tree, 2)
        resistance = total_resistance(tree, policy)
        assert resistance.capacity.contains(0.5, slack=1e-12)
        assert resistance.identity_residual(capacity_recursive(tree, 2, policy).c_of_alpha) < 1e-12
        assert total_resistance(tree, "0").upper == math.inf

    def test_branched_fraction(self, binary2, path_tree):
        assert branched_fraction(binary2) == ("1/(1 + 1/(1 + 1))", Fraction(2, 3))
        assert branched_fraction(path_tree(2)) == ("1/(1 + 1/(1))", Fraction(1, 2))
        with pytest.raises(CapacityError):
            branched_fraction(build_tree(Homogeneous(2), depth=2))

    def test_branched_fraction_is_the_capacity(self, random_tree):
        tree = random_tree(random.Random(31), 40)
        _, value = branched_fraction(tree)
        assert float(value) == pytest.approx(capacity_recursive(tree, 2).capacity.lower, rel=1e-12)


class TestOracle:
    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_paths(self, path_tree, p):
        for k in (1, 2, 5):
            tree = path_tree(k)
            result = oracle_capacity(tree, tree.true_leaves(), p, tol=1e-5)
            assert result.value == pytest.approx(k ** (1 - p), rel=1e-5)

    @pytest.mark.parametrize("p", [1.5, 3.0])
    def test_binary(self, binary3, p):
        result = oracle_capacity(binary3, binary3.true_leaves(), p, tol=1e-5)
        assert result.value == pytest.approx(capacity_recursive(binary3, p).capacity.lower, rel=1e-4)
        assert result.lower_bound <= result.value
        assert result.method == "subgradient+slsqp"

    def test_quadratic_matches_recursion(self, random_tree, leaf_subset):
        rng = random.Random(37)
        for _ in range(10):
            tree = random_tree(rng, 60)
            E = leaf_subset(rng, tree)
            result = oracle_capacity(tree, E, 2)
            assert result.method == "kkt"
            assert result.value == pytest.approx(capacity_of_set(tree, E, 2).capacity.lower, rel=1e-9)
            assert result.gap <= 1e-6 * result.value

    def test_matches_recursion_for_random_exponents(self, random_tree, leaf_subset):
        rng = random.Random(59)
        for _ in range(30):
            tree = random_tree(rng, 80)
            E = leaf_subset(rng, tree)
            p = rng.uniform(1.2, 4.0)
            result = oracle_capacity(tree, E, p)
            expected = capacity_of_set(tree, E, p).capacity.lower
            assert result.value == pytest.approx(expected, rel=1e-4)
            assert result.lower_bound <= result.value * (1 + 1e-12)

    def test_admissible_function(self, binary2):
        result = oracle_capacity(binary2, [1, 2], 2)
        assert result.f[0] + result.f[1] >= 1 - 1e-12
        assert result.f[0] + result.f[2] >= 1 - 1e-12
        assert sum(v ** 2 for v in result.f.values()) == pytest.approx(result.value)

    def test_empty(self, binary2):
        with pytest.raises(CapacityError):
            oracle_capacity(binary2, [], 2)
