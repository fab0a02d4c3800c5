"""Relational bisimulations between modal frames, the greatest-bisimulation
fixpoint, and the coalgebraic cross-check.

A bisimulation must satisfy forth and back clauses for both the order and
the modal relation. The coalgebraic side endows the relation (as a
componentwise-ordered sub-poset of the product) with the structure map
b = (x, y) -> (R[x] x R[y]) restricted to the relation, lifts everything,
and demands that both projection squares commute coordinatewise.
"""

from dataclasses import dataclass

from .complexes import TowerMap, nested_image
from .errors import IncompatibleValuations, ProjectionNotPMorphism
from .frames import ModalFrame
from .heyting import up_functor, up_functor_map
from .logic import truth_mask
from .poset import Poset, PosetMap, is_pmorphism, iter_bits, product


@dataclass(frozen=True)
class Bisimulation:
    """A relation between the carriers of two modal frames.

    ``pairs`` holds index pairs; use from_labels for label input.
    """

    left: ModalFrame
    right: ModalFrame
    pairs: frozenset

    @classmethod
    def from_labels(cls, left, right, label_pairs):
        pairs = frozenset(
            (left.poset.index(a), right.poset.index(b)) for a, b in label_pairs
        )
        return cls(left, right, pairs)

    @classmethod
    def full(cls, left, right):
        return cls(
            left,
            right,
            frozenset(
                (x, y)
                for x in range(left.poset.n)
                for y in range(right.poset.n)
            ),
        )

    def label_pairs(self):
        return sorted(
            (self.left.poset.labels[x], self.right.poset.labels[y])
            for x, y in self.pairs
        )

    def right_of(self, x):
        return {y for (a, y) in self.pairs if a == x}

    def left_of(self, y):
        return {x for (x, b) in self.pairs if b == y}


def _clause_violation(bis):
    """First violated forth/back clause in deterministic order, or None.

    Scans pairs ascending; for each related (x, x') checks, for S in
    (order, modal relation): forth (successors of x must be matched from x')
    and back (successors of x' matched from x).
    """
    lp, rp = bis.left.poset, bis.right.poset
    lrel, rrel = bis.left.rel, bis.right.rel
    related = sorted(bis.pairs)
    right_sets = {}
    left_sets = {}
    for x, y in related:
        right_sets.setdefault(x, set()).add(y)
        left_sets.setdefault(y, set()).add(x)
    for x, x2 in related:
        for step_left, step_right in (
            (lp.up[x], rp.up[x2]),
            (lrel[x], rrel[x2]),
        ):
            for y in iter_bits(step_left):
                if not any(
                    (step_right >> y2) & 1 for y2 in right_sets.get(y, ())
                ):
                    return (x, x2, y, "forth")
            for y2 in iter_bits(step_right):
                if not any(
                    (step_left >> y) & 1 for y in left_sets.get(y2, ())
                ):
                    return (x, x2, y2, "back")
    return None


def is_box_bisimulation(bis):
    """All four clauses (forth/back, for order and modal relation) hold."""
    return _clause_violation(bis) is None


def largest_bisimulation(left, right):
    """Greatest fixpoint: start from the full relation and delete the first
    pair participating in a violated clause, one per scan, in index order.

    Terminates within |X||Y| scans; the deterministic deletion order makes
    failures reproducible. The result is the unique largest bisimulation.
    """
    pairs = set(
        (x, y) for x in range(left.poset.n) for y in range(right.poset.n)
    )
    lp, rp = left.poset, right.poset
    lrel, rrel = left.rel, right.rel
    while True:
        removed = None
        for x, x2 in sorted(pairs):
            ok = True
            for step_left, step_right in (
                (lp.up[x], rp.up[x2]),
                (lrel[x], rrel[x2]),
            ):
                for y in iter_bits(step_left):
                    if not any(
                        (step_right >> y2) & 1
                        for (a, y2) in pairs
                        if a == y
                    ):
                        ok = False
                        break
                if not ok:
                    break
                for y2 in iter_bits(step_right):
                    if not any(
                        (step_left >> y) & 1 for (y, b) in pairs if b == y2
                    ):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                removed = (x, x2)
                break
        if removed is None:
            return Bisimulation(left, right, frozenset(pairs))
        pairs.discard(removed)


def relation_poset(bis):
    """The relation as a sub-poset of the product, componentwise order."""
    prod = product(bis.left.poset, bis.right.poset)
    chosen = sorted(bis.pairs)
    labels = [
        (bis.left.poset.labels[x], bis.right.poset.labels[y]) for x, y in chosen
    ]
    pos = {pair: i for i, pair in enumerate(chosen)}
    up_rows = []
    for x, y in chosen:
        row = 0
        for x2 in iter_bits(bis.left.poset.up[x]):
            for y2 in iter_bits(bis.right.poset.up[y]):
                j = pos.get((x2, y2))
                if j is not None:
                    row |= 1 << j
        up_rows.append(row)
    del prod
    return Poset(labels, up_rows, _trusted=True), chosen


def coalgebraic_bisim_check(bis, depth=2):
    """Whether the relation carries a mediating coalgebra whose projection
    squares commute coordinatewise up to the given depth.

    The structure map sends (x, y) to (R[x] x R[y]) intersected with the
    relation, as an upset of the relation poset. Projections that fail the
    p-morphism condition raise ProjectionNotPMorphism: such a relation is
    not a functor bisimulation in the p-morphism category at all.
    """
    bp, chosen = relation_poset(bis)
    pos = {pair: i for i, pair in enumerate(chosen)}
    proj_left = PosetMap(bp, bis.left.poset, [x for x, _ in chosen])
    proj_right = PosetMap(bp, bis.right.poset, [y for _, y in chosen])
    if not is_pmorphism(proj_left):
        raise ProjectionNotPMorphism("left")
    if not is_pmorphism(proj_right):
        raise ProjectionNotPMorphism("right")

    lrel, rrel = bis.left.rel, bis.right.rel
    rho_masks = []
    for x, y in chosen:
        m = 0
        for j, (x2, y2) in enumerate(chosen):
            if (lrel[x] >> x2) & 1 and (rrel[y] >> y2) & 1:
                m |= 1 << j
        rho_masks.append(m)

    fv_b = up_functor(bp)
    fv_l = up_functor(bis.left.poset)
    fv_r = up_functor(bis.right.poset)
    rho = PosetMap(bp, fv_b.poset, [fv_b.index_of_mask(m) for m in rho_masks])
    towers_b = TowerMap.from_map(rho, depth)

    from .frames import frame_to_lifted

    towers_l = frame_to_lifted(bis.left, depth, fv_l)
    towers_r = frame_to_lifted(bis.right, depth, fv_r)
    u_l = up_functor_map(proj_left, fv_b, fv_l)
    u_r = up_functor_map(proj_right, fv_b, fv_r)
    for i, (x, y) in enumerate(chosen):
        for level in range(1, depth + 1):
            if nested_image(u_l, level, towers_b.value(level, i)) != towers_l.value(
                level, x
            ):
                return False
            if nested_image(u_r, level, towers_b.value(level, i)) != towers_r.value(
                level, y
            ):
                return False
    return True


def saturated_valuation(bis, left_seed=0, right_seed=0):
    """Smallest pair of upsets containing the seeds on which related points
    agree: close upward on both sides and saturate along the relation until
    stable. Produces valuations compatible with the relation by
    construction."""
    lp, rp = bis.left.poset, bis.right.poset
    lm, rm = left_seed, right_seed
    while True:
        nl = lp.up_close(lm)
        nr = rp.up_close(rm)
        for x, y in bis.pairs:
            if (nl >> x) & 1:
                nr |= 1 << y
            if (nr >> y) & 1:
                nl |= 1 << x
        if (nl, nr) == (lm, rm):
            return lm, rm
        lm, rm = nl, nr


def _compatible(bis, model_left, model_right):
    for letter in set(model_left.valuation) | set(model_right.valuation):
        lv = model_left.valuation.get(letter)
        rv = model_right.valuation.get(letter)
        if lv is None or rv is None:
            return False
        for x, y in bis.pairs:
            if (lv >> x) & 1 != (rv >> y) & 1:
                return False
    return True


def bisimilarity_preserves_truth(model_left, x, model_right, y, formulas):
    """Agreement of two bisimilar points on a list of formulas.

    The valuations must be compatible with the largest bisimulation
    (related points satisfy the same letters) and the points related by it.
    """
    bis = largest_bisimulation(model_left.frame, model_right.frame)
    xi = model_left.poset.index(x)
    yi = model_right.poset.index(y)
    if (xi, yi) not in bis.pairs:
        raise IncompatibleValuations(f"points {x!r} and {y!r} are not bisimilar")
    if not _compatible(bis, model_left, model_right):
        raise IncompatibleValuations(
            "valuations disagree on some bisimilar pair"
        )
    cache_l, cache_r = {}, {}
    for phi in formulas:
        lt = truth_mask(model_left, phi, cache_l)
        rt = truth_mask(model_right, phi, cache_r)
        if (lt >> xi) & 1 != (rt >> yi) & 1:
            return False
    return True


def distinguishing_formula(model_left, x, model_right, y, formulas):
    """First formula in the stream on which the two points disagree."""
    xi = model_left.poset.index(x)
    yi = model_right.poset.index(y)
    cache_l, cache_r = {}, {}
    for phi in formulas:
        lt = truth_mask(model_left, phi, cache_l)
        rt = truth_mask(model_right, phi, cache_r)
        if (lt >> xi) & 1 != (rt >> yi) & 1:
            return phi
    return None
