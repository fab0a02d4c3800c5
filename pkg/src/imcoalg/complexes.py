"""Rooted-stage complexes and the unique lifting of monotone maps.

A stage over a map r: B -> B0 is the poset of nonempty subsets of B that
are rooted (contain a least member) and open relative to r, ordered by
reverse inclusion, together with the map sending each subset back to its
root. Iterating stages along successive root maps yields a complex; a
depth-n tower is a compatible chain of stage elements, and a monotone map
f: X -> Y lifts to a tower map with coordinates

    f_1 = f,    f_{l+1}(x) = f_l[up-set of x].

Stage elements are represented two ways. Materialized stages index their
elements and record member bitmasks over the previous stage; they are only
feasible while stages stay small. Nested values (an element of stage l is a
frozenset of stage l-1 values, bottoming out at base indices) support the
same lifting pointwise with no stage enumeration at all, which is what the
frame and bisimulation checks use on larger carriers.
"""

from dataclasses import dataclass, field

from .config import DEFAULT_CAPS
from .errors import (
    CapExceeded,
    EnumerationTooLarge,
    LiftOutsideStage,
    NotMonotone,
    StageTooLarge,
    UnknownLabel,
)
from .poset import (
    Poset,
    PosetMap,
    is_monotone,
    iter_bits,
    terminal_map,
)


@dataclass(frozen=True)
class RootedStage:
    """One stage: rooted relatively-open subsets of the base, plus root map."""

    base: Poset
    poset: Poset
    member_masks: tuple
    root_map: PosetMap


def build_p_g(g, caps=DEFAULT_CAPS, stage_index=2):
    """All nonempty rooted g-open subsets of g's source, reverse-inclusion
    ordered, with the root map back to the source.

    Enumerates candidates root by root (a rooted subset is determined by its
    root plus a choice of elements above it), so the scanned space is
    sum over x of 2^(|up(x)|-1). Both that candidate count and the resulting
    stage size are capped.
    """
    base = g.source
    proj = g.assign
    n = base.n
    total = 0
    for i in range(n):
        total += 1 << (base.up[i].bit_count() - 1)
        if total > caps.max_candidates:
            raise StageTooLarge(
                stage_index, f"more than {caps.max_candidates} candidate subsets"
            )
    projbit = [1 << t for t in proj]
    reach = []
    for i in range(n):
        acc = 0
        for j in iter_bits(base.up[i]):
            acc |= projbit[j]
        reach.append(acc)

    def images_match(mask):
        # openness: for each member s, the proj-image of up(s) & mask must
        # cover the proj-image of up(s)
        for s in iter_bits(mask):
            have = 0
            for t in iter_bits(base.up[s] & mask):
                have |= projbit[t]
            if have != reach[s]:
                return False
        return True

    found = []  # (mask, root)
    for root in range(n):
        rest = base.up[root] & ~(1 << root)
        sub = 0
        while True:
            mask = sub | (1 << root)
            if images_match(mask):
                found.append((mask, root))
                if len(found) > caps.max_stage:
                    raise StageTooLarge(
                        stage_index, f"more than {caps.max_stage} elements"
                    )
            if sub == rest:
                break
            sub = (sub - rest) & rest  # next submask of rest

    found.sort()
    masks = tuple(m for m, _ in found)
    labels = [
        frozenset(base.labels[i] for i in iter_bits(m)) for m in masks
    ]
    up_rows = []
    for m in masks:
        row = 0
        for j, d in enumerate(masks):
            if d & ~m == 0:  # reverse inclusion
                row |= 1 << j
        up_rows.append(row)
    stage_poset = Poset(labels, up_rows, _trusted=True)
    root_map = PosetMap(stage_poset, base, [r for _, r in found])
    return RootedStage(base, stage_poset, masks, root_map)


class Complex:
    """Stages P_0..P_n joined by root maps r_i: P_i -> P_{i-1}, with r_1 = g.

    P_0 is g's target and P_1 its source; every deeper stage is the rooted
    stage over the previous root map.
    """

    def __init__(self, g, stages, root_maps, member_masks):
        self.g = g
        self.stages = stages
        self.root_maps = root_maps  # index i >= 1 is r_i; [0] is None
        self.member_masks = member_masks  # per stage, None for i <= 1
        self._values = {}
        self._value_index = {}

    @property
    def depth(self):
        return len(self.stages) - 1

    def is_terminal(self):
        return self.stages[0].n == 1

    def stage_values(self, i):
        """Nested value of each element of stage i (indices at level 1)."""
        if i in self._values:
            return self._values[i]
        if i == 1:
            vals = tuple(range(self.stages[1].n))
        else:
            prev = self.stage_values(i - 1)
            vals = tuple(
                frozenset(prev[j] for j in iter_bits(m))
                for m in self.member_masks[i]
            )
        self._values[i] = vals
        return vals

    def value_index(self, i, value):
        """Stage index of a nested value; LiftOutsideStage when absent."""
        if i not in self._value_index:
            self._value_index[i] = {
                v: k for k, v in enumerate(self.stage_values(i))
            }
        try:
            return self._value_index[i][value]
        except KeyError:
            raise LiftOutsideStage(
                f"value is not an element of stage {i}"
            ) from None

    def tower_of(self, idx, depth=None):
        """The compatible chain determined by a deepest-stage element."""
        depth = self.depth if depth is None else depth
        chain = [0] * (depth + 1)
        chain[depth] = idx
        for i in range(depth, 0, -1):
            chain[i - 1] = self.root_maps[i].assign[chain[i]]
        return Tower(self, tuple(chain))

    def towers(self, depth=None):
        depth = self.depth if depth is None else depth
        return [self.tower_of(i, depth) for i in range(self.stages[depth].n)]


@dataclass(frozen=True)
class Tower:
    """Depth-indexed compatible chain of stage elements (by stage index)."""

    complex: Complex
    indices: tuple

    @property
    def depth(self):
        return len(self.indices) - 1


def build_complex(g, depth, caps=DEFAULT_CAPS):
    """Iterate rooted stages along root maps up to the requested depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if depth > caps.max_depth:
        raise CapExceeded(f"depth {depth} exceeds cap {caps.max_depth}")
    stages = [g.target, g.source]
    root_maps = [None, g]
    member_masks = [None, None]
    while len(stages) <= depth:
        st = build_p_g(root_maps[-1], caps, stage_index=len(stages))
        stages.append(st.poset)
        root_maps.append(st.root_map)
        member_masks.append(st.member_masks)
    return Complex(g, stages, root_maps, member_masks)


def terminal_complex(p, depth, caps=DEFAULT_CAPS):
    return build_complex(terminal_map(p), depth, caps)


# -- nested tower values (no stage materialization) -------------------------


def tower_coords(f, depth):
    """Lift coordinates of a monotone map as nested values.

    Returns a list indexed by level 1..depth; entry l is a tuple over source
    elements. Level 1 holds target indices, level l+1 the direct image of
    level l over the source's principal upsets.
    """
    src = f.source
    levels = [tuple(f.assign)]
    for _ in range(depth - 1):
        prev = levels[-1]
        levels.append(
            tuple(
                frozenset(prev[y] for y in iter_bits(src.up[x]))
                for x in range(src.n)
            )
        )
    return levels


def nested_image(u, level, value):
    """Apply a base map coordinatewise through the nesting levels."""
    if level == 1:
        return u.assign[value]
    return frozenset(nested_image(u, level - 1, s) for s in value)


def value_leq(base, level, a, b):
    if level == 1:
        return base.leq(a, b)
    return a >= b  # frozenset superset: reverse inclusion order


def value_root(base, level, v):
    """The least member of a level->=2 value (None if not rooted)."""
    for m in v:
        if all(value_leq(base, level - 1, m, s) for s in v):
            return m
    return None


def value_base_coord(base, level, v):
    """Iterated root down to the level-1 coordinate."""
    while level > 1:
        v = value_root(base, level, v)
        level -= 1
    return v


class TowerUniverse:
    """Local validity checks for nested values over a base poset, for the
    terminal complex. Avoids materializing stages: the elements above a
    level->=2 value are exactly its valid subsets, so everything is
    enumerable locally while values stay small."""

    def __init__(self, base, max_width=18):
        self.base = base
        self.max_width = max_width
        self._valid = {}
        self._above = {}

    def is_valid(self, level, v):
        if level == 1:
            return isinstance(v, int) and 0 <= v < self.base.n
        key = (level, v)
        got = self._valid.get(key)
        if got is not None:
            return got
        ok = self._compute_valid(level, v)
        self._valid[key] = ok
        return ok

    def _compute_valid(self, level, v):
        if not v:
            return False
        if not all(self.is_valid(level - 1, s) for s in v):
            return False
        root = value_root(self.base, level, v)
        if root is None:
            return False
        if level == 2:
            return True  # openness relative to the terminal map is vacuous
        for s in v:
            allowed = {
                value_root(self.base, level - 1, s2)
                for s2 in v
                if value_leq(self.base, level - 1, s, s2)
            }
            for b in self.above(level - 1, s):
                if value_root(self.base, level - 1, b) not in allowed:
                    return False
        return True

    def above(self, level, v):
        """All valid values above v at its level."""
        if level == 1:
            return list(iter_bits(self.base.up[v]))
        key = (level, v)
        got = self._above.get(key)
        if got is not None:
            return got
        members = sorted(v, key=repr)
        if len(members) > self.max_width:
            raise CapExceeded(
                f"local stage neighbourhood too wide ({len(members)} members)"
            )
        out = []
        for bits in range(1, 1 << len(members)):
            cand = frozenset(
                members[i] for i in range(len(members)) if (bits >> i) & 1
            )
            if self.is_valid(level, cand):
                out.append(cand)
        self._above[key] = out
        return out


# -- tower maps --------------------------------------------------------------


class TowerMap:
    """Depth-indexed family of coordinate maps approximating a lifted
    p-morphism into the inverse limit.

    ``values[l]`` (1 <= l <= depth) is the tuple of nested level-l values
    over the source. When a materialized complex is attached, ``maps``
    additionally expresses every coordinate as a PosetMap into its stage,
    including the trivial stage-0 coordinate.
    """

    def __init__(self, source, base, depth, values, complex=None, maps=None):
        self.source = source
        self.base = base
        self.depth = depth
        self.values = values
        self.complex = complex
        self.maps = maps

    @classmethod
    def from_map(cls, f, depth, complex=None):
        levels = tower_coords(f, depth)
        tm = cls(f.source, f.target, depth, levels, complex=complex)
        if complex is not None:
            tm._resolve()
        return tm

    def _resolve(self):
        cx = self.complex
        maps = [terminal_map(self.source, cx.stages[0])]
        if not cx.is_terminal():
            raise UnknownLabel("tower maps are resolved over terminal complexes")
        for level in range(1, self.depth + 1):
            try:
                assign = [
                    cx.value_index(level, v) for v in self.values[level - 1]
                ]
            except LiftOutsideStage:
                raise LiftOutsideStage(
                    f"lift coordinate {level} left the stage; this indicates "
                    "an implementation bug, not a user error"
                ) from None
            maps.append(PosetMap(self.source, cx.stages[level], assign))
        self.maps = tuple(maps)

    def value(self, level, x):
        return self.values[level - 1][x]

    def coordinate(self, level):
        if self.maps is None:
            raise UnknownLabel("no materialized complex attached")
        return self.maps[level]

    @property
    def base_map(self):
        """The level-1 coordinate as a PosetMap into the base."""
        return PosetMap(self.source, self.base, self.values[0])

    def coords_monotone(self):
        src = self.source
        for level in range(1, self.depth + 1):
            vals = self.values[level - 1]
            for x in range(src.n):
                for y in iter_bits(src.up[x]):
                    if not value_leq(self.base, level, vals[x], vals[y]):
                        return False
        return True

    def compatible(self):
        """Root of each coordinate value equals the previous coordinate."""
        for level in range(2, self.depth + 1):
            vals = self.values[level - 1]
            prev = self.values[level - 2]
            for x in range(self.source.n):
                if value_root(self.base, level, vals[x]) != prev[x]:
                    return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, TowerMap)
            and self.source == other.source
            and self.base == other.base
            and self.depth == other.depth
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.source, self.base, self.depth, self.values))


def lift_map(f, complex, depth=None):
    """The unique tower map extending a monotone map, to the given depth.

    Coordinates follow the recursion f_1 = f, f_{l+1}(x) = f_l[up(x)]; each
    is resolved against the materialized stage (LiftOutsideStage would mean
    the recursion produced a non-member, which the lifting result rules
    out).
    """
    if not is_monotone(f):
        raise NotMonotone("lift_map needs a monotone map")
    if not complex.is_terminal():
        raise UnknownLabel("lift_map expects a complex over the terminal map")
    if f.target != complex.stages[1]:
        raise UnknownLabel("complex is not over the map's target")
    depth = complex.depth if depth is None else depth
    if depth > complex.depth:
        raise UnknownLabel("complex not built deep enough")
    return TowerMap.from_map(f, depth, complex=complex)


def check_limit_pmorphism(t, depth=None):
    """Truncated back condition: every tower coordinatewise above the image
    of x is hit, up to one level below the truncation, from some point
    above x.

    The deepest coordinate acts as an extension certificate only: a depth-n
    tower above the image whose extensions all die out is no witness against
    the limit map being a p-morphism (the limit argument reaches level n
    agreement from constraints at level n+1), so the witness is required to
    agree on coordinates 0..n-1.
    """
    depth = t.depth if depth is None else depth
    cx = t.complex
    if cx is None:
        raise UnknownLabel("check_limit_pmorphism needs a materialized complex")
    src = t.source
    stage_posets = cx.stages
    for x in range(src.n):
        fx = [t.maps[i].assign[x] for i in range(depth + 1)]
        for tower in cx.towers(depth):
            cs = tower.indices
            if not all(
                stage_posets[i].leq(fx[i], cs[i]) for i in range(depth + 1)
            ):
                continue
            hit = False
            for x2 in iter_bits(src.up[x]):
                if all(t.maps[i].assign[x2] == cs[i] for i in range(depth)):
                    hit = True
                    break
            if not hit:
                return False
    return True


def enumerate_tower_maps(source, complex, depth, base_map=None, caps=DEFAULT_CAPS):
    """All coordinate-compatible monotone tower maps from source into the
    complex, optionally with a fixed level-1 coordinate."""
    from .enumeration import monotone_maps

    if base_map is not None:
        firsts = [base_map]
    else:
        firsts = monotone_maps(source, complex.stages[1])
    out = []
    budget = caps.max_enumeration
    for f1 in firsts:
        partial = [tuple(f1.assign)]

        def extend(level):
            nonlocal budget
            if level > depth:
                budget -= 1
                if budget < 0:
                    raise EnumerationTooLarge("too many tower maps")
                values = [
                    tuple(
                        complex.stage_values(lv)[i] for i in partial[lv - 1]
                    )
                    for lv in range(1, depth + 1)
                ]
                out.append(
                    TowerMap(
                        source,
                        complex.stages[1],
                        depth,
                        values,
                        complex=complex,
                        maps=tuple(
                            [terminal_map(source, complex.stages[0])]
                            + [
                                PosetMap(
                                    source, complex.stages[lv], partial[lv - 1]
                                )
                                for lv in range(1, depth + 1)
                            ]
                        ),
                    )
                )
                return
            stage = complex.stages[level]
            root = complex.root_maps[level].assign
            fibers = [
                [
                    j
                    for j in range(stage.n)
                    if root[j] == partial[level - 2][x]
                ]
                for x in range(source.n)
            ]

            def assign_from(x, chosen):
                if x == source.n:
                    partial.append(tuple(chosen))
                    extend(level + 1)
                    partial.pop()
                    return
                for j in fibers[x]:
                    ok = True
                    for y in range(x):
                        if source.leq(y, x) and not stage.leq(chosen[y], j):
                            ok = False
                            break
                        if source.leq(x, y) and not stage.leq(j, chosen[y]):
                            ok = False
                            break
                    if ok:
                        assign_from(x + 1, chosen + [j])

            assign_from(0, [])

        extend(2)
    return out


@dataclass
class AdjunctionReport:
    """Outcome of the lift/project bijection check between monotone maps and
    limit-p-morphism tower maps."""

    source: Poset
    target: Poset
    depth: int
    monotone_maps: int = 0
    tower_maps: int = 0
    limit_pmorphisms: int = 0
    roundtrip_failures: list = field(default_factory=list)
    uniqueness_failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.roundtrip_failures and not self.uniqueness_failures

    def summary(self):
        status = "ok" if self.ok else "FAILED"
        return (
            f"adjunction({self.source.n}x{self.target.n}, depth {self.depth}): "
            f"{self.monotone_maps} monotone maps, {self.tower_maps} tower maps, "
            f"{self.limit_pmorphisms} limit p-morphisms, "
            f"{len(self.roundtrip_failures)} roundtrip / "
            f"{len(self.uniqueness_failures)} uniqueness failures [{status}]"
        )


def check_adjunction(source, target, depth, caps=DEFAULT_CAPS):
    """Verify both directions of the lifting bijection by enumeration.

    Every monotone f: source -> target lifts to a tower map whose level-1
    coordinate is f again, and every coordinate-compatible monotone tower
    map passing the limit back condition is the lift of its own level-1
    coordinate.
    """
    from .enumeration import monotone_maps

    if target.n ** source.n > caps.max_enumeration:
        raise EnumerationTooLarge(
            f"{target.n}^{source.n} maps exceeds cap {caps.max_enumeration}"
        )
    cx = terminal_complex(target, depth, caps)
    report = AdjunctionReport(source, target, depth)
    for f in monotone_maps(source, target):
        report.monotone_maps += 1
        lifted = lift_map(f, cx, depth)
        if lifted.base_map.assign != f.assign:
            report.roundtrip_failures.append(f)
    for t in enumerate_tower_maps(source, cx, depth, caps=caps):
        report.tower_maps += 1
        if not check_limit_pmorphism(t, depth):
            continue
        report.limit_pmorphisms += 1
        relift = lift_map(t.base_map, cx, depth)
        if relift != t:
            report.uniqueness_failures.append(t)
    return report


def intuitionistic_lift(functor, p, depth, caps=DEFAULT_CAPS):
    """Apply a registered endofunctor, then build the terminal complex over
    the result: the depth-truncated intuitionistic lifting of the functor."""
    value = functor.apply(p)
    return build_complex(terminal_map(value.poset), depth, caps)


def verify_complex(cx):
    """Re-check, post construction, that every stage element is rooted and
    open relative to the incoming map, and that the recorded root is the
    least member."""
    from .poset import Subset, is_g_open, is_rooted

    for i in range(2, len(cx.stages)):
        base = cx.stages[i - 1]
        incoming = cx.root_maps[i - 1]
        for idx, mask in enumerate(cx.member_masks[i]):
            sub = Subset(base, mask)
            root = is_rooted(base, sub)
            if root is None:
                return False
            if not is_g_open(sub, incoming):
                return False
            if base.index(root) != cx.root_maps[i].assign[idx]:
                return False
    return True
