import pytest

from imcoalg.complexes import (
    TowerUniverse,
    build_complex,
    build_p_g,
    check_adjunction,
    check_limit_pmorphism,
    enumerate_tower_maps,
    intuitionistic_lift,
    lift_map,
    nested_image,
    tower_coords,
    value_base_coord,
    value_root,
    verify_complex,
)
from imcoalg.config import Caps
from imcoalg.errors import NotMonotone, StageTooLarge
from imcoalg.heyting import IDENTITY_FUNCTOR, UP_FUNCTOR
from imcoalg.poset import (
    PosetMap,
    identity_map,
    make_poset,
    point_poset,
    terminal_map,
)
from imcoalg.enumeration import all_posets, monotone_maps, random_poset


def chain2():
    return make_poset(["a", "b"], [("a", "b")])


def antichain2():
    return make_poset(["a", "b"], [])


class TestBuildStage:
    def test_antichain_terminal(self):
        p = antichain2()
        st = build_p_g(terminal_map(p))
        assert st.poset.n == 2
        labels = set(st.poset.labels)
        assert labels == {frozenset({"a"}), frozenset({"b"})}
        # no order between the singletons
        assert not st.poset.leq(0, 1) and not st.poset.leq(1, 0)
        assert sorted(st.root_map(l) for l in st.poset.labels) == ["a", "b"]

    def test_chain_terminal(self):
        p = chain2()
        st = build_p_g(terminal_map(p))
        assert st.poset.n == 3
        full = st.poset.index(frozenset({"a", "b"}))
        sa = st.poset.index(frozenset({"a"}))
        sb = st.poset.index(frozenset({"b"}))
        assert st.poset.leq(full, sa) and st.poset.leq(full, sb)
        assert st.root_map(frozenset({"a", "b"})) == "a"
        assert st.root_map(frozenset({"b"})) == "b"

    def test_point(self):
        st = build_p_g(terminal_map(point_poset()))
        assert st.poset.n == 1

    def test_identity_g_keeps_open_sets_only(self):
        p = chain2()
        st = build_p_g(identity_map(p))
        # {a} alone is not open relative to the identity
        assert frozenset({"a"}) not in st.poset.labels
        assert frozenset({"a", "b"}) in st.poset.labels
        assert frozenset({"b"}) in st.poset.labels

    def test_stage_cap(self):
        p = make_poset([f"x{i}" for i in range(4)], [])
        with pytest.raises(StageTooLarge):
            build_p_g(terminal_map(p), Caps(max_stage=2))

    def test_candidate_cap(self):
        labels = [f"x{i}" for i in range(14)]
        pairs = [(labels[0], l) for l in labels[1:]]
        p = make_poset(labels, pairs)
        with pytest.raises(StageTooLarge):
            build_p_g(terminal_map(p), Caps(max_candidates=1000))

    def test_every_element_rooted_and_open(self):
        for n in (1, 2, 3):
            for p in all_posets(n):
                for depth in (2, 3):
                    cx = build_complex(terminal_map(p), depth)
                    assert verify_complex(cx)

    def test_root_map_monotone(self):
        from imcoalg.poset import is_monotone

        for n in (1, 2, 3):
            for p in all_posets(n):
                cx = build_complex(terminal_map(p), 3)
                for i in range(2, 4):
                    assert is_monotone(cx.root_maps[i])


class TestComplexes:
    def test_depth1_is_base(self):
        p = chain2()
        cx = build_complex(terminal_map(p), 1)
        assert [s.n for s in cx.stages] == [1, 2]
        assert cx.stages[1] == p

    def test_chain_depth2(self):
        cx = build_complex(terminal_map(chain2()), 2)
        assert [s.n for s in cx.stages] == [1, 2, 3]

    def test_point_fixed_point(self):
        cx = build_complex(terminal_map(point_poset()), 4)
        assert [s.n for s in cx.stages] == [1, 1, 1, 1, 1]

    def test_towers_are_compatible_chains(self):
        cx = build_complex(terminal_map(chain2()), 3)
        for t in cx.towers():
            for i in range(1, t.depth + 1):
                assert (
                    cx.root_maps[i].assign[t.indices[i]] == t.indices[i - 1]
                )


class TestLift:
    def test_identity_on_point(self):
        one = point_poset()
        cx = build_complex(terminal_map(one), 3)
        t = lift_map(identity_map(one), cx, 3)
        assert all(len(set(t.values[l])) == 1 for l in range(3))

    def test_chain_identity_depth2(self):
        p = chain2()
        cx = build_complex(terminal_map(p), 2)
        t = lift_map(identity_map(p), cx, 2)
        a, b = p.index("a"), p.index("b")
        assert t.value(1, a) == a and t.value(1, b) == b
        assert t.value(2, a) == frozenset({a, b})
        assert t.value(2, b) == frozenset({b})

    def test_base_coordinate_is_f(self):
        p, q = antichain2(), chain2()
        cx = build_complex(terminal_map(q), 2)
        for f in monotone_maps(p, q):
            t = lift_map(f, cx, 2)
            assert t.base_map.assign == f.assign

    def test_rejects_non_monotone(self):
        p = chain2()
        cx = build_complex(terminal_map(p), 2)
        with pytest.raises(NotMonotone):
            lift_map(PosetMap(p, p, [1, 0]), cx, 2)

    def test_compat_and_monotone_coords(self):
        for n in (1, 2, 3):
            for q in all_posets(n):
                cx = build_complex(terminal_map(q), 3)
                for p in all_posets(2):
                    for f in monotone_maps(p, q):
                        t = lift_map(f, cx, 3)
                        assert t.compatible()
                        assert t.coords_monotone()

    def test_lift_values_are_valid_stage_members(self):
        # pointwise validity agrees with materialized stage membership
        for q in all_posets(3):
            uni = TowerUniverse(q)
            for p in all_posets(2):
                for f in monotone_maps(p, q):
                    levels = tower_coords(f, 3)
                    for level in (2, 3):
                        for v in levels[level - 1]:
                            assert uni.is_valid(level, v)

    def test_lift_passes_limit_check(self):
        for n in (1, 2, 3):
            for q in all_posets(n):
                for depth in (1, 2, 3):
                    cx = build_complex(terminal_map(q), depth)
                    for p in all_posets(3):
                        for f in monotone_maps(p, q):
                            t = lift_map(f, cx, depth)
                            assert check_limit_pmorphism(t, depth)

    def test_corrupted_tower_fails_somewhere(self):
        # replace the level-2 coordinate of a lift by a different compatible
        # monotone choice; some instance must fail the limit check
        p = chain2()
        cx = build_complex(terminal_map(p), 2)
        failures = 0
        for f in monotone_maps(p, p):
            lifted = lift_map(f, cx, 2)
            for t in enumerate_tower_maps(p, cx, 2, base_map=f):
                if t != lifted:
                    failures += not check_limit_pmorphism(t, 2)
        assert failures >= 1

    def test_uniqueness_exhaustive_small(self):
        for q in all_posets(2) + all_posets(3):
            cx = build_complex(terminal_map(q), 2)
            for p in all_posets(2):
                for f in monotone_maps(p, q):
                    passing = [
                        t
                        for t in enumerate_tower_maps(p, cx, 2, base_map=f)
                        if check_limit_pmorphism(t, 2)
                    ]
                    assert len(passing) == 1
                    assert passing[0] == lift_map(f, cx, 2)


class TestNestedValues:
    def test_roots_recover_previous_level(self):
        p = chain2()
        levels = tower_coords(identity_map(p), 3)
        for level in (2, 3):
            for x in range(p.n):
                assert (
                    value_root(p, level, levels[level - 1][x])
                    == levels[level - 2][x]
                )

    def test_base_coord(self):
        p = chain2()
        levels = tower_coords(identity_map(p), 3)
        for x in range(p.n):
            assert value_base_coord(p, 3, levels[2][x]) == x

    def test_nested_image_identity(self):
        p = chain2()
        levels = tower_coords(identity_map(p), 3)
        ident = identity_map(p)
        for x in range(p.n):
            assert nested_image(ident, 3, levels[2][x]) == levels[2][x]


class TestAdjunction:
    def test_chain_chain_depth2(self):
        p = chain2()
        rep = check_adjunction(p, p, 2)
        assert rep.ok
        assert rep.monotone_maps == 3
        assert rep.limit_pmorphisms == rep.monotone_maps

    def test_point_source(self):
        rep = check_adjunction(point_poset(), chain2(), 2)
        assert rep.ok
        assert rep.monotone_maps == 2

    def test_antichain_to_chain(self):
        rep = check_adjunction(antichain2(), chain2(), 2)
        assert rep.ok
        assert rep.monotone_maps == 4

    def test_bijection_count(self):
        # limit p-morphism tower maps correspond exactly to monotone maps
        for p in all_posets(2):
            for q in all_posets(2):
                rep = check_adjunction(p, q, 2)
                assert rep.ok
                assert rep.limit_pmorphisms == rep.monotone_maps


class TestIntuitionisticLift:
    def test_up_on_point(self):
        cx = intuitionistic_lift(UP_FUNCTOR, point_poset(), 1)
        assert [s.n for s in cx.stages] == [1, 2]

    def test_identity_functor(self):
        p = chain2()
        cx = intuitionistic_lift(IDENTITY_FUNCTOR, p, 1)
        assert cx.stages[1] == p

    def test_up_on_chain_depth2(self):
        cx = intuitionistic_lift(UP_FUNCTOR, chain2(), 2)
        # upsets of the 2-chain form a 3-chain; its rooted subsets are the 7
        # nonempty intervals-with-minimum
        assert [s.n for s in cx.stages] == [1, 3, 7]


class TestRandomPosets:
    def test_lift_random_size4(self):
        import random

        rng = random.Random(40410)
        for _ in range(25):
            q = random_poset(rng, 4)
            cx = build_complex(terminal_map(q), 3)
            assert verify_complex(cx)
            for f in monotone_maps(q, q)[:10]:
                t = lift_map(f, cx, 3)
                assert check_limit_pmorphism(t, 3)
