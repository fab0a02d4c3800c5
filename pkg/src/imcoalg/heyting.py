"""The algebra of upsets of a finite poset, and the upset endofunctor.

Two distinct order conventions live here and must not be confused:

  - UpsetAlgebra orders its carrier by inclusion: that is the logical order
    (meet = intersection, join = union, top = full carrier).
  - up_functor orders the same carrier by *reverse* inclusion; that poset is
    the coalgebraic target for modal successor maps.
"""

from dataclasses import dataclass, field

from .errors import NotMonotone, ValueNotUpset
from .poset import Poset, PosetMap, Subset, iter_bits

# operation tables are precomputed below this carrier size, computed on
# demand (with memoisation) above it
_TABLE_LIMIT = 128


def upset_masks(p):
    """Masks of all upsets of p, ascending."""
    return tuple(m for m in range(1 << p.n) if p.is_upset(m))


@dataclass(frozen=True)
class FunctorValue:
    """Result of applying a registered endofunctor to a poset.

    ``masks`` records, per element of the value poset, its provenance as a
    subset of the base (for Up: an upset mask of the base; for PowUp: a mask
    over the Up-carrier of the base).
    """

    tag: str
    base: Poset
    poset: Poset
    masks: tuple

    def index_of_mask(self, mask):
        lo, hi = 0, len(self.masks)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.masks[mid] < mask:
                lo = mid + 1
            else:
                hi = mid
        if lo == len(self.masks) or self.masks[lo] != mask:
            raise ValueNotUpset(f"mask {mask:#x} is not in the {self.tag} carrier")
        return lo


_UP_CACHE = {}


def up_functor(p):
    """The poset of upsets of p under reverse inclusion (C <= D iff C >= D).

    Memoized on the poset (posets compare by value and are immutable); the
    frame and bisimulation checks hit the same base repeatedly.
    """
    cached = _UP_CACHE.get(p)
    if cached is not None:
        return cached
    value = _up_functor_raw(p)
    if len(_UP_CACHE) > 4096:
        _UP_CACHE.clear()
    _UP_CACHE[p] = value
    return value


def _up_functor_raw(p):
    masks = upset_masks(p)
    labels = [frozenset(p.labels[i] for i in iter_bits(m)) for m in masks]
    up = []
    for m in masks:
        row = 0
        for j, d in enumerate(masks):
            if d & ~m == 0:  # m contains d, so m <= d
                row |= 1 << j
        up.append(row)
    value = Poset(labels, up, _trusted=True)
    return FunctorValue("up", p, value, masks)


def up_functor_map(f, source_value=None, target_value=None):
    """Direct image on upsets, closed upward so the result is an upset.

    Raw direct images of upsets need not be upsets under arbitrary monotone
    maps; the closure is the least fix keeping the functor inside Up. For
    p-morphisms it is a no-op.
    """
    from .poset import is_monotone

    if not is_monotone(f):
        raise NotMonotone("up_functor_map needs a monotone map")
    sv = source_value if source_value is not None else up_functor(f.source)
    tv = target_value if target_value is not None else up_functor(f.target)
    assign = [
        tv.index_of_mask(f.target.up_close(f.image_mask(m))) for m in sv.masks
    ]
    return PosetMap(sv.poset, tv.poset, assign)


class UpsetAlgebra:
    """Up(base) as a finite Heyting algebra, ordered by inclusion."""

    def __init__(self, base):
        self.base = base
        self.masks = upset_masks(base)
        self._pos = {m: i for i, m in enumerate(self.masks)}
        self._impl = {}
        if len(self.masks) <= _TABLE_LIMIT:
            for a in self.masks:
                for b in self.masks:
                    self._impl[(a, b)] = self._impl_raw(a, b)

    @property
    def carrier(self):
        return [Subset(self.base, m) for m in self.masks]

    @property
    def bottom(self):
        return 0

    @property
    def top(self):
        return self.base.full_mask

    def check_mask(self, mask):
        if mask not in self._pos:
            raise ValueNotUpset(f"{mask:#x} is not an upset of the base")
        return mask

    def meet(self, a, b):
        return a & b

    def join(self, a, b):
        return a | b

    def _impl_raw(self, a, b):
        # {x : up(x) & a <= b}, the complement of the down-closure of a \ b
        return self.base.full_mask & ~self.base.down_close(a & ~b)

    def impl(self, a, b):
        key = (a, b)
        got = self._impl.get(key)
        if got is None:
            got = self._impl_raw(a, b)
            self._impl[key] = got
        return got

    def leq(self, a, b):
        return a & ~b == 0


def heyting_impl(algebra, a, b):
    """Heyting implication of two upsets, as a Subset."""
    am = a.mask if isinstance(a, Subset) else a
    bm = b.mask if isinstance(b, Subset) else b
    algebra.check_mask(am)
    algebra.check_mask(bm)
    return Subset(algebra.base, algebra.impl(am, bm))


def box_op(frame, a):
    """Box of an upset along the frame's relation: {x : R[x] <= a}.

    When the frame satisfies the mix law the result is again an upset.
    """
    mask = a.mask if isinstance(a, Subset) else a
    p = frame.poset
    if not p.is_upset(mask):
        raise ValueNotUpset("box_op expects an upset of the frame's poset")
    out = 0
    for x in range(p.n):
        if frame.rel[x] & ~mask == 0:
            out |= 1 << x
    return Subset(p, out)


def join_irreducibles(algebra):
    """The poset of join-irreducible upsets under reverse inclusion.

    In Up(P) these are exactly the principal upsets, so the result is
    order-isomorphic to the base poset; elements are relabeled by the
    generator (the irreducible's least element).
    """
    base = algebra.base
    irred = []
    for m in algebra.masks:
        if m == 0:
            continue
        below = 0
        for d in algebra.masks:
            if d != m and d & ~m == 0:
                below |= d
        if below != m:
            irred.append(m)
    labels = []
    for m in irred:
        root = base.min_of(m)
        assert root is not None and base.up_mask(root) == m, "irreducible not principal"
        labels.append(base.labels[root])
    up = []
    for m in irred:
        row = 0
        for j, d in enumerate(irred):
            if d & ~m == 0:  # reverse inclusion: m <= d iff m >= d
                row |= 1 << j
        up.append(row)
    return Poset(labels, up, _trusted=True)


@dataclass(frozen=True)
class Functor:
    """A registered poset endofunctor: a name plus an object action.

    ``apply`` returns a FunctorValue; composition chains object actions.
    """

    name: str
    apply: callable = field(compare=False)

    def __call__(self, p):
        return self.apply(p)


def _identity_apply(p):
    return FunctorValue("id", p, p, tuple(range(p.n)))


UP_FUNCTOR = Functor("up", up_functor)
IDENTITY_FUNCTOR = Functor("id", _identity_apply)


def compose_functors(outer, inner):
    def apply(p):
        first = inner.apply(p)
        second = outer.apply(first.poset)
        return FunctorValue(
            f"{outer.name}({inner.name})", p, second.poset, second.masks
        )

    return Functor(f"{outer.name}({inner.name})", apply)
