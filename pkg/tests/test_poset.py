import pytest
from hypothesis import given, settings, strategies as st

from imcoalg.errors import DuplicateLabel, NotAntisymmetric, NotTransitive
from imcoalg.poset import (
    PosetMap,
    Subset,
    enumerate_upsets,
    identity_map,
    is_g_open,
    is_monotone,
    is_pmorphism,
    is_rooted,
    iter_bits,
    make_poset,
    point_poset,
    principal_up,
    product,
    relative_open,
    terminal_map,
    up_set,
)
from imcoalg.enumeration import all_posets, monotone_maps, random_poset


def chain2():
    return make_poset(["a", "b"], [("a", "b")])


def antichain2():
    return make_poset(["a", "b"], [])


class TestConstruction:
    def test_two_chain(self):
        p = chain2()
        assert p.leq_labels("a", "b")
        assert not p.leq_labels("b", "a")

    def test_two_antichain(self):
        p = antichain2()
        assert not p.leq_labels("a", "b")
        assert not p.leq_labels("b", "a")

    def test_cycle_rejected(self):
        with pytest.raises(NotAntisymmetric):
            make_poset(["a", "b"], [("a", "b"), ("b", "a")])

    def test_duplicate_label_rejected(self):
        with pytest.raises(DuplicateLabel):
            make_poset(["a", "a"], [])

    def test_full_mode_requires_transitivity(self):
        with pytest.raises(NotTransitive):
            make_poset(["a", "b", "c"], [("a", "b"), ("b", "c")], mode="full")

    def test_full_mode_accepts_closed_input(self):
        p = make_poset(
            ["a", "b", "c"],
            [("a", "b"), ("b", "c"), ("a", "c")],
            mode="full",
        )
        assert p.leq_labels("a", "c")

    def test_covers_mode_closes(self):
        p = make_poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
        assert p.leq_labels("a", "c")

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 6), st.randoms(use_true_random=False))
    def test_covers_closure_matches_oracle(self, n, rng):
        # oracle: naive reachability over the cover pairs
        labels = [f"v{i}" for i in range(n)]
        pairs = []
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.4:
                    pairs.append((labels[i], labels[j]))
        p = make_poset(labels, pairs)
        adj = {l: set() for l in labels}
        for a, b in pairs:
            adj[a].add(b)
        for a in labels:
            reach = {a}
            frontier = [a]
            while frontier:
                x = frontier.pop()
                for y in adj[x]:
                    if y not in reach:
                        reach.add(y)
                        frontier.append(y)
            for b in labels:
                assert p.leq_labels(a, b) == (b in reach)


class TestMapPredicates:
    def test_identity_monotone_pmorphism(self):
        for p in (chain2(), antichain2(), point_poset()):
            f = identity_map(p)
            assert is_monotone(f)
            assert is_pmorphism(f)

    def test_constant_monotone(self):
        p = chain2()
        f = PosetMap(p, p, [0, 0])
        assert is_monotone(f)

    def test_swap_on_chain_not_monotone(self):
        p = chain2()
        f = PosetMap(p, p, [1, 0])
        assert not is_monotone(f)

    def test_terminal_from_antichain_is_pmorphism(self):
        assert is_pmorphism(terminal_map(antichain2()))

    def test_bottom_inclusion_not_pmorphism(self):
        one = point_poset("a")
        p = chain2()
        incl = PosetMap(one, p, [0])
        assert is_monotone(incl)
        assert not is_pmorphism(incl)

    def test_pmorphism_implies_monotone_small(self):
        posets = []
        for n in (1, 2, 3, 4):
            posets.extend(all_posets(n))
        for p in posets:
            for q in posets:
                if p.n * q.n > 12:
                    continue
                for f in monotone_maps(p, q):
                    if is_pmorphism(f):
                        assert is_monotone(f)


class TestSubsets:
    def test_up_set_on_chain(self):
        p = chain2()
        s = Subset.from_labels(p, ["a"])
        assert up_set(p, s).members == ("a", "b")

    def test_up_set_empty_and_full(self):
        p = chain2()
        assert up_set(p, Subset(p, 0)).members == ()
        assert up_set(p, Subset(p, p.full_mask)).members == ("a", "b")

    def test_principal_up(self):
        p = chain2()
        assert principal_up(p, "a").members == ("a", "b")
        assert principal_up(p, "b").members == ("b",)

    def test_rooted_chain(self):
        p = chain2()
        assert is_rooted(p, Subset.from_labels(p, ["a", "b"])) == "a"

    def test_rooted_antichain(self):
        p = antichain2()
        assert is_rooted(p, Subset.from_labels(p, ["a", "b"])) is None

    def test_singleton_rooted(self):
        p = antichain2()
        assert is_rooted(p, Subset.from_labels(p, ["b"])) == "b"

    def test_empty_not_rooted(self):
        assert is_rooted(chain2(), Subset(chain2(), 0)) is None

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 6), st.randoms(use_true_random=False))
    def test_root_is_least_member(self, n, rng):
        p = random_poset(rng, n)
        for mask in range(1, 1 << p.n):
            s = Subset(p, mask)
            root = is_rooted(p, s)
            if root is not None:
                r = p.index(root)
                assert (mask >> r) & 1
                assert all(p.leq(r, i) for i in iter_bits(mask))


class TestRelativeOpen:
    def test_terminal_map_makes_everything_open(self):
        p = chain2()
        g = terminal_map(p)
        for mask in range(1, 1 << p.n):
            assert is_g_open(Subset(p, mask), g)

    def test_identity_singleton_bottom_not_open(self):
        p = chain2()
        g = identity_map(p)
        assert not is_g_open(Subset.from_labels(p, ["a"]), g)

    def test_identity_full_open(self):
        p = chain2()
        assert is_g_open(Subset.from_labels(p, ["a", "b"]), identity_map(p))

    def test_relative_open_constant_g(self):
        p = chain2()
        g = terminal_map(p)
        for f in monotone_maps(p, p):
            assert relative_open(f, PosetMap(p, g.target, g.assign))

    def test_relative_open_identity_pair(self):
        p = chain2()
        assert relative_open(identity_map(p), identity_map(p))

    def test_relative_open_constant_bottom_fails(self):
        p = chain2()
        f = PosetMap(p, p, [0, 0])
        assert not relative_open(f, identity_map(p))

    def test_relative_open_matches_pmorphism_under_identity_g(self):
        posets = []
        for n in (1, 2, 3):
            posets.extend(all_posets(n))
        for p in posets:
            for q in posets:
                for f in monotone_maps(p, q):
                    assert relative_open(f, identity_map(q)) == is_pmorphism(f)


class TestProduct:
    def test_unit_law(self):
        p = chain2()
        prod = product(point_poset(), p)
        assert prod.n == p.n
        for i in range(p.n):
            for j in range(p.n):
                assert prod.leq(i, j) == p.leq(i, j)

    def test_chain_times_chain(self):
        p = chain2()
        prod = product(p, p)
        aa = prod.index(("a", "a"))
        ab = prod.index(("a", "b"))
        ba = prod.index(("b", "a"))
        bb = prod.index(("b", "b"))
        assert prod.leq(aa, ab) and prod.leq(aa, ba) and prod.leq(aa, bb)
        assert prod.leq(ab, bb) and prod.leq(ba, bb)
        assert not prod.leq(ab, ba) and not prod.leq(ba, ab)

    def test_antichain_product(self):
        p = antichain2()
        prod = product(p, p)
        for i in range(4):
            for j in range(4):
                assert prod.leq(i, j) == (i == j)


class TestEnumerateUpsets:
    def test_chain(self):
        sets = [s.members for s in enumerate_upsets(chain2())]
        assert sets == [(), ("b",), ("a", "b")]

    def test_antichain(self):
        assert len(enumerate_upsets(antichain2())) == 4

    def test_point(self):
        assert len(enumerate_upsets(point_poset())) == 2

    def test_count_equals_antichain_count(self):
        # oracle: upsets correspond to antichains (their minimal elements)
        for n in (1, 2, 3, 4, 5):
            for p in all_posets(n):
                antichains = 0
                for mask in range(1 << p.n):
                    members = list(iter_bits(mask))
                    if all(
                        not p.leq(i, j)
                        for i in members
                        for j in members
                        if i != j
                    ):
                        antichains += 1
                assert len(enumerate_upsets(p)) == antichains

    def test_deterministic_order(self):
        p = antichain2()
        masks = [s.mask for s in enumerate_upsets(p)]
        assert masks == sorted(masks)
