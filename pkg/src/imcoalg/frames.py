"""Modal frames over posets, neighbourhood frames, and the coalgebra
correspondences.

A modal frame is a poset with a relation R satisfying the mix law
R = (<=);R;(<=), equivalently: every successor set R[x] is an upset and
x <= y forces R[x] >= R[y]. Such frames correspond one-to-one with monotone
maps into the reverse-inclusion-ordered upsets, and (after lifting) with
tower coalgebras; both directions are implemented and checked here.

R is stored extensionally; nothing is closed silently. check_mix_law
reports violations and mix_closure computes the repaired relation on
request, which is handy when authoring frame files by hand.
"""

from .complexes import TowerMap, nested_image
from .config import DEFAULT_CAPS
from .errors import (
    MixLawViolation,
    NotMonotone,
    StageTooLarge,
    ValueNotUpset,
)
from .heyting import Functor, FunctorValue, up_functor, up_functor_map
from .poset import PosetMap, Poset, is_monotone, is_pmorphism, iter_bits


class ModalFrame:
    """Poset plus successor-mask relation; immutable."""

    __slots__ = ("poset", "rel")

    def __init__(self, poset, rel):
        rel = tuple(rel)
        assert len(rel) == poset.n
        self.poset = poset
        self.rel = rel

    @classmethod
    def from_pairs(cls, poset, pairs):
        rel = [0] * poset.n
        for a, b in pairs:
            rel[poset.index(a)] |= 1 << poset.index(b)
        return cls(poset, rel)

    @classmethod
    def from_masks(cls, poset, masks):
        return cls(poset, masks)

    def pairs(self):
        out = []
        for x in range(self.poset.n):
            for y in iter_bits(self.rel[x]):
                out.append((self.poset.labels[x], self.poset.labels[y]))
        return out

    def __eq__(self, other):
        return (
            isinstance(other, ModalFrame)
            and self.poset == other.poset
            and self.rel == other.rel
        )

    def __hash__(self):
        return hash((self.poset, self.rel))

    def __repr__(self):
        body = ", ".join(f"{a}R{b}" for a, b in self.pairs())
        return f"ModalFrame({self.poset!r}; {body})"


def check_mix_law(frame):
    return mix_law_witness(frame) is None


def mix_law_witness(frame):
    """A pair in (<=);R;(<=) missing from R, or None when the law holds."""
    p, rel = frame.poset, frame.rel
    for x in range(p.n):
        closed = 0
        for u in iter_bits(p.up[x]):
            for v in iter_bits(rel[u]):
                closed |= p.up[v]
        extra = closed & ~rel[x]
        if extra:
            z = next(iter_bits(extra))
            return (p.labels[x], p.labels[z])
    return None


def mix_closure(frame):
    """The least relation containing R that satisfies the mix law."""
    p, rel = frame.poset, frame.rel
    out = []
    for x in range(p.n):
        closed = 0
        for u in iter_bits(p.up[x]):
            for v in iter_bits(rel[u]):
                closed |= p.up[v]
        out.append(closed)
    return ModalFrame(p, out)


def frame_to_upmap(frame, functor_value=None):
    """The coalgebra map x -> R[x] into the reverse-inclusion upset poset."""
    if not check_mix_law(frame):
        raise MixLawViolation(
            f"mix law fails at witness {mix_law_witness(frame)}"
        )
    fv = functor_value if functor_value is not None else up_functor(frame.poset)
    assign = [fv.index_of_mask(m) for m in frame.rel]
    return PosetMap(frame.poset, fv.poset, assign)


def upmap_to_frame(m):
    """Recover the frame from a monotone map into the canonical upset poset.

    The relation is x R y iff y lies in the upset assigned to x; the mix law
    holds by construction.
    """
    if not is_monotone(m):
        raise NotMonotone("coalgebra maps must be monotone")
    fv = up_functor(m.source)
    if m.target != fv.poset:
        raise ValueNotUpset("map target is not the canonical upset poset")
    rel = tuple(fv.masks[i] for i in m.assign)
    frame = ModalFrame(m.source, rel)
    assert check_mix_law(frame)
    return frame


def frame_to_lifted(frame, depth, functor_value=None):
    """Lift of the coalgebra map, computed pointwise to the given depth.

    Coordinates are nested values over the upset poset; no stage is
    materialized, so this stays cheap even where the full stages would be
    astronomically large.
    """
    fv = functor_value if functor_value is not None else up_functor(frame.poset)
    upmap = frame_to_upmap(frame, fv)
    return TowerMap.from_map(upmap, depth)


def is_modal_pmorphism(f, frame1, frame2):
    """p-morphism for both the order and the modal relation."""
    if f.source != frame1.poset or f.target != frame2.poset:
        return False
    if not is_pmorphism(f):
        return False
    for x in range(frame1.poset.n):
        fx = f.assign[x]
        # forth: x R y implies f(x) R f(y); back: every f(x)-successor is hit
        if f.image_mask(frame1.rel[x]) != frame2.rel[fx]:
            return False
    return True


def check_coalgebra_morphism(f, frame1, frame2, depth=3):
    """Whether the lifted coalgebra square for f commutes coordinatewise.

    The square compares the functor image of frame1's lifted coalgebra with
    frame2's lifted coalgebra after f, up to the given depth. Maps that are
    not p-morphisms are not coalgebra morphisms in the p-morphism category,
    so they return False outright.
    """
    if f.source != frame1.poset or f.target != frame2.poset:
        return False
    if not is_pmorphism(f):
        return False
    fv1 = up_functor(frame1.poset)
    fv2 = up_functor(frame2.poset)
    u = up_functor_map(f, fv1, fv2)
    towers1 = frame_to_lifted(frame1, depth, fv1)
    towers2 = frame_to_lifted(frame2, depth, fv2)
    for x in range(frame1.poset.n):
        fx = f.assign[x]
        for level in range(1, depth + 1):
            lhs = nested_image(u, level, towers1.value(level, x))
            if lhs != towers2.value(level, fx):
                return False
    return True


# -- neighbourhood frames ----------------------------------------------------


_POWUP_CACHE = {}
_POWUP_MAP_CACHE = {}
_PREIMAGE_CACHE = {}


def pow_up_functor(p, caps=DEFAULT_CAPS, max_base=3):
    """Sets of upsets of p, ordered by inclusion of families.

    Element i of the value poset is the family whose members are read off
    ``masks[i]`` as indices into the upset carrier of p. Doubly exponential,
    so the base is capped small. Memoized per poset.
    """
    cached = _POWUP_CACHE.get(p)
    if cached is not None:
        return cached
    value = _pow_up_raw(p, caps, max_base)
    if len(_POWUP_CACHE) > 512:
        _POWUP_CACHE.clear()
    _POWUP_CACHE[p] = value
    return value


def _pow_up_raw(p, caps, max_base):
    if p.n > max_base:
        raise StageTooLarge(
            0, f"pow_up_functor base capped at {max_base} elements"
        )
    up_fv = up_functor(p)
    size = 1 << up_fv.poset.n
    if size > caps.max_stage:
        raise StageTooLarge(0, f"{size} families exceed the stage cap")
    masks = tuple(range(size))
    labels = [
        frozenset(up_fv.poset.labels[i] for i in iter_bits(m)) for m in masks
    ]
    up_rows = []
    for m in masks:
        row = 0
        for j in masks:
            if m & ~j == 0:  # family inclusion
                row |= 1 << j
        up_rows.append(row)
    value = Poset(labels, up_rows, _trusted=True)
    return FunctorValue("powup", p, value, masks)


def _preimage_table(f):
    """Per target upset, the index of its preimage in the source upsets."""
    cached = _PREIMAGE_CACHE.get(f)
    if cached is not None:
        return cached
    src_up = up_functor(f.source)
    tgt_up = up_functor(f.target)
    pre = []
    for m in tgt_up.masks:
        pm = 0
        for x in range(f.source.n):
            if (m >> f.assign[x]) & 1:
                pm |= 1 << x
        pre.append(src_up.index_of_mask(pm))
    pre = tuple(pre)
    if len(_PREIMAGE_CACHE) > 4096:
        _PREIMAGE_CACHE.clear()
    _PREIMAGE_CACHE[f] = pre
    return pre


def pow_up_map(f, source_value=None, target_value=None):
    """Morphism action of the neighbourhood functor.

    A family over the source maps to the upsets of the target whose
    preimages belong to it. (Elementwise direct image would not make the
    neighbourhood morphism condition match the coalgebra square.)
    """
    cached = _POWUP_MAP_CACHE.get(f)
    if cached is not None:
        return cached
    if not is_monotone(f):
        raise NotMonotone("pow_up_map needs a monotone map")
    sv = source_value if source_value is not None else pow_up_functor(f.source)
    tv = target_value if target_value is not None else pow_up_functor(f.target)
    tgt_up = up_functor(f.target)
    pre = _preimage_table(f)
    assign = []
    for fam in sv.masks:
        out = 0
        for b in range(tgt_up.poset.n):
            if (fam >> pre[b]) & 1:
                out |= 1 << b
        assign.append(tv.index_of_mask(out))
    value = PosetMap(sv.poset, tv.poset, assign)
    if len(_POWUP_MAP_CACHE) > 4096:
        _POWUP_MAP_CACHE.clear()
    _POWUP_MAP_CACHE[f] = value
    return value


class NbhdFrame:
    """Poset with a monotone assignment of families of upsets to points.

    ``families[x]`` is a mask over the canonical upset carrier. Monotone
    means inclusion of families along the order. With strict=True each
    family must additionally be up-closed in the reverse-inclusion order on
    upsets; the default leaves the inner order unconstrained.
    """

    __slots__ = ("poset", "families", "strict")

    def __init__(self, poset, families, strict=False):
        families = tuple(families)
        assert len(families) == poset.n
        up_fv = up_functor(poset)
        for x in range(poset.n):
            for y in iter_bits(poset.up[x]):
                if families[x] & ~families[y]:
                    raise NotMonotone(
                        "neighbourhood assignment is not monotone"
                    )
        if strict:
            for x in range(poset.n):
                for i in iter_bits(families[x]):
                    for j in iter_bits(up_fv.poset.up[i]):
                        if not (families[x] >> j) & 1:
                            raise ValueNotUpset(
                                "family not up-closed under reverse inclusion"
                            )
        self.poset = poset
        self.families = families
        self.strict = strict

    @classmethod
    def from_label_families(cls, poset, nbhd, strict=False):
        """nbhd maps element label -> iterable of iterables of labels."""
        up_fv = up_functor(poset)
        families = [0] * poset.n
        for lab, fams in nbhd.items():
            x = poset.index(lab)
            for fam in fams:
                mask = 0
                for member in fam:
                    mask |= 1 << poset.index(member)
                if not poset.is_upset(mask):
                    raise ValueNotUpset(
                        f"neighbourhood of {lab!r} contains a non-upset"
                    )
                families[x] |= 1 << up_fv.index_of_mask(mask)
        return cls(poset, families, strict=strict)

    def __eq__(self, other):
        return (
            isinstance(other, NbhdFrame)
            and self.poset == other.poset
            and self.families == other.families
        )

    def __hash__(self):
        return hash((self.poset, self.families))


def nbhd_to_coalgebra(nf, functor_value=None):
    fv = functor_value if functor_value is not None else pow_up_functor(nf.poset)
    assign = [fv.index_of_mask(m) for m in nf.families]
    return PosetMap(nf.poset, fv.poset, assign)


def coalgebra_to_nbhd(m, strict=False):
    if not is_monotone(m):
        raise NotMonotone("coalgebra maps must be monotone")
    fv = pow_up_functor(m.source)
    if m.target != fv.poset:
        raise ValueNotUpset("map target is not the canonical family poset")
    return NbhdFrame(m.source, tuple(fv.masks[i] for i in m.assign), strict=strict)


def nbhd_morphism_condition(f, nf1, nf2):
    """a' in N'(f(x)) iff preimage(a') in N(x), for every upset a' of the
    target. Only upsets can appear in either family, so the quantifier runs
    over the upset carrier."""
    pre = _preimage_table(f)
    for x in range(f.source.n):
        fam1 = nf1.families[x]
        fam2 = nf2.families[f.assign[x]]
        for b in range(len(pre)):
            if (fam2 >> b) & 1 != (fam1 >> pre[b]) & 1:
                return False
    return True


def check_nbhd_coalgebra_morphism(f, nf1, nf2, depth=1):
    """Commutation of the lifted neighbourhood coalgebra square up to depth."""
    if not is_monotone(f):
        return False
    sv = pow_up_functor(f.source)
    tv = pow_up_functor(f.target)
    u = pow_up_map(f, sv, tv)
    t1 = TowerMap.from_map(nbhd_to_coalgebra(nf1, sv), depth)
    t2 = TowerMap.from_map(nbhd_to_coalgebra(nf2, tv), depth)
    for x in range(f.source.n):
        fx = f.assign[x]
        for level in range(1, depth + 1):
            if nested_image(u, level, t1.value(level, x)) != t2.value(level, fx):
                return False
    return True


def _pow_up_apply(p):
    return pow_up_functor(p)


POW_UP_FUNCTOR = Functor("powup", _pow_up_apply)

FUNCTOR_REGISTRY = {}


def register_functor(functor):
    FUNCTOR_REGISTRY[functor.name] = functor
    return functor


def _populate_registry():
    from .heyting import IDENTITY_FUNCTOR, UP_FUNCTOR

    register_functor(UP_FUNCTOR)
    register_functor(IDENTITY_FUNCTOR)
    register_functor(POW_UP_FUNCTOR)


_populate_registry()
