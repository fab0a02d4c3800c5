"""Layered construction of duals of free modal Heyting algebras, truncated.

Stage 0 is the generator poset; stage k+1 is the product of the generators
with the depth-d truncation of the tower construction over the upsets of
stage k (represented by its deepest complex stage). Projections and the
step relations R_k are realized on those truncated representatives, so all
downstream claims are per-truncation structural checks, not certificates
about the untruncated limit.

Stage sizes explode quickly: the caps abort cleanly and the report names
the stage that overflowed.
"""

from dataclasses import dataclass, field

from .complexes import (
    nested_image,
    terminal_complex,
    tower_coords,
    value_base_coord,
)
from .config import DEFAULT_CAPS
from .errors import (
    CapExceeded,
    MixLawViolation,
    NotPMorphism,
    TooManyGenerators,
)
from .heyting import up_functor, up_functor_map
from .poset import (
    Poset,
    PosetMap,
    identity_map,
    is_monotone,
    is_pmorphism,
    iter_bits,
    product,
)

MAX_GENERATORS = 3
MAX_STAGES = 2
MAX_INNER_DEPTH = 2
MAX_BASE = 4


def generator_poset(variables):
    """Powerset of the variable set under reverse inclusion."""
    variables = tuple(variables)
    if len(variables) > MAX_GENERATORS:
        raise TooManyGenerators(
            f"at most {MAX_GENERATORS} generators supported"
        )
    subsets = []
    for mask in range(1 << len(variables)):
        subsets.append(
            frozenset(v for i, v in enumerate(variables) if (mask >> i) & 1)
        )
    up_rows = []
    for a in subsets:
        row = 0
        for j, b in enumerate(subsets):
            if a >= b:  # reverse inclusion
                row |= 1 << j
        up_rows.append(row)
    return Poset(subsets, up_rows, _trusted=True)


@dataclass
class FreeStage:
    """One layer: its poset, projection to the previous layer, and the step
    relation into the previous layer (absent at stage 0).

    Elements of stage k >= 1 are pairs (generator element, inner stage
    element); ``inner_values`` keeps the inner elements' nested towers so
    projections and R_k stay computable.
    """

    index: int
    poset: Poset
    projection: PosetMap
    inner_depth: int
    prev: Poset | None = None
    rel: tuple | None = None  # masks over prev, per element
    pairs: tuple | None = None  # (generator index, inner index) per element
    inner_values: tuple | None = None
    upsets_fv: object = None  # FunctorValue of Up(prev) for k >= 1
    inner_complex: object = None


def _build_next_stage(base, stage, inner_depth, caps):
    """Stage k+1 = base x (deepest stage of the tower complex over the
    upsets of stage k)."""
    fv = up_functor(stage.poset)
    cx = terminal_complex(fv.poset, inner_depth, caps)
    inner = cx.stages[inner_depth]
    inner_vals = cx.stage_values(inner_depth)
    next_poset = product(base, inner)
    n_inner = inner.n
    pairs = tuple(
        (i, j) for i in range(base.n) for j in range(n_inner)
    )
    # step relation: (x, C) steps to y iff y lies in C's level-1 coordinate
    rel = []
    for i, j in pairs:
        coord = value_base_coord(fv.poset, inner_depth, inner_vals[j])
        rel.append(fv.masks[coord])
    # projection: stage 1 forgets the inner component; deeper stages push
    # the inner tower through the upset image of the previous projection
    if stage.index == 0:
        proj_assign = [i for i, _ in pairs]
        projection = PosetMap(next_poset, stage.poset, proj_assign)
    else:
        prev_fv = stage.upsets_fv
        prev_cx = stage.inner_complex
        u = up_functor_map(stage.projection, fv, prev_fv)
        proj_assign = []
        for i, j in pairs:
            moved = nested_image(u, inner_depth, inner_vals[j])
            inner_idx = prev_cx.value_index(inner_depth, moved)
            proj_assign.append(i * prev_cx.stages[inner_depth].n + inner_idx)
        projection = PosetMap(next_poset, stage.poset, proj_assign)
    out = FreeStage(
        index=stage.index + 1,
        poset=next_poset,
        projection=projection,
        inner_depth=inner_depth,
        prev=stage.poset,
        rel=tuple(rel),
        pairs=pairs,
        inner_values=inner_vals,
        upsets_fv=fv,
    )
    out.inner_complex = cx
    return out


def build_free_stages(base, stages, inner_depth, caps=DEFAULT_CAPS):
    """The truncated layer sequence M_0..M_stages over the base poset."""
    if stages > MAX_STAGES:
        raise CapExceeded(f"at most {MAX_STAGES} stages supported")
    if inner_depth < 1 or inner_depth > MAX_INNER_DEPTH:
        raise CapExceeded(f"inner depth must be 1..{MAX_INNER_DEPTH}")
    if base.n > MAX_BASE:
        raise CapExceeded(f"base poset capped at {MAX_BASE} elements")
    out = [
        FreeStage(
            index=0,
            poset=base,
            projection=identity_map(base),
            inner_depth=inner_depth,
        )
    ]
    for _ in range(stages):
        out.append(_build_next_stage(base, out[-1], inner_depth, caps))
    return out


def check_truncated_pmorphism(stage, assign, source):
    """Back condition for a map into a layer, adjusted for truncation.

    The inner component of a layer element is a depth-d tower value; points
    of the layer sitting above the image only refute the (limit) back
    condition if they extend above it one level deeper, so the deepest
    inner level serves as an extension certificate and the witness must
    agree on the generator component and the inner tower up to depth d-1.
    Monotonicity is required exactly.
    """
    if not is_monotone(PosetMap(source, stage.poset, assign)):
        return False
    d = stage.inner_depth
    fvp = stage.upsets_fv.poset
    vals = stage.inner_values
    pairs = stage.pairs

    def prefix(inner_idx):
        if d == 1:
            return None
        from .complexes import value_root

        return value_root(fvp, d, vals[inner_idx])

    for y in range(source.n):
        x0, c0 = pairs[assign[y]]
        for e2 in iter_bits(stage.poset.up[assign[y]]):
            x2, c2 = pairs[e2]
            want = prefix(c2)
            hit = False
            for y2 in iter_bits(source.up[y]):
                wx, wc = pairs[assign[y2]]
                if wx == x2 and (d == 1 or prefix(wc) == want):
                    hit = True
                    break
            if not hit:
                return False
    return True


def universal_lift(p, frame, stages=None, inner_depth=None, caps=DEFAULT_CAPS,
                   free_stages=None):
    """The stagewise lifting of a p-morphism from a modal frame into the
    layer sequence.

    p_0 is p itself; p_{k+1}(y) pairs p(y) with the tower lifting of
    y -> p_k[R[y]]. Every constructed coordinate is verified monotone and
    to satisfy the step condition: x R y forces p_{k+1}(x) R_k p_k(y).

    The back condition of the pairing is NOT enforced here: it can fail
    for honest inputs (a reflexive-bottom chain frame already breaks it,
    and not as a truncation artifact: the inner tower of a point above can
    sit strictly above the image while only reachable points carry it with
    a different generator component). Callers that want it should run
    check_truncated_pmorphism per stage.
    """
    from .frames import check_mix_law

    if not is_pmorphism(p):
        raise NotPMorphism("universal_lift needs a p-morphism")
    if not check_mix_law(frame):
        raise MixLawViolation("universal_lift needs a mix-law frame")
    if frame.poset != p.source:
        raise NotPMorphism("frame and map disagree on the source poset")
    if free_stages is None:
        free_stages = build_free_stages(p.target, stages, inner_depth, caps)
    inner_depth = free_stages[0].inner_depth
    source = p.source
    maps = [p]
    for stage in free_stages[1:]:
        prev_map = maps[-1]
        fv = stage.upsets_fv
        cx = stage.inner_complex
        # y -> p_k[R[y]] lands in the upsets of the previous stage; at
        # stage 1 the raw image is already an upset (exact back condition
        # of p plus the mix law), deeper stages need the closure to absorb
        # truncation-spurious points above the image
        images = []
        for y in range(source.n):
            raw = prev_map.image_mask(frame.rel[y])
            img = stage.prev.up_close(raw)
            if stage.index == 1 and img != raw:
                raise NotPMorphism(
                    "successor image not an upset at stage 1; the seed map "
                    "is not a p-morphism for the frame"
                )
            images.append(img)
        pbar = PosetMap(source, fv.poset, [fv.index_of_mask(m) for m in images])
        coords = tower_coords(pbar, inner_depth)
        inner_n = cx.stages[inner_depth].n
        assign = []
        for y in range(source.n):
            inner_idx = cx.value_index(inner_depth, coords[inner_depth - 1][y])
            assign.append(p.assign[y] * inner_n + inner_idx)
        nxt = PosetMap(source, stage.poset, assign)
        if not is_monotone(nxt):
            raise NotPMorphism(
                f"constructed coordinate {stage.index} is not monotone"
            )
        # step condition: x R y forces the lifted x to step to the lifted y
        for x in range(source.n):
            for y in iter_bits(frame.rel[x]):
                if not (stage.rel[assign[x]] >> prev_map.assign[y]) & 1:
                    raise NotPMorphism(
                        f"step condition fails at stage {stage.index}"
                    )
        maps.append(nxt)
    return maps


@dataclass
class StageReport:
    """Pass/fail per structural property of one layer, with witnesses."""

    stage_index: int
    checks: dict = field(default_factory=dict)
    counterexamples: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())

    def record(self, name, passed, witness=None):
        self.checks[name] = passed
        if not passed and witness is not None:
            self.counterexamples[name] = witness


def check_modal_stage_properties(stage):
    """Structural facts about a built layer: monotone projection, the step
    relation is upset-valued, and box along it carries upsets of the
    previous layer to upsets of this one."""
    from .poset import is_monotone

    report = StageReport(stage.index)
    report.record("projection-monotone", is_monotone(stage.projection))
    if stage.rel is None:
        return report
    prev = stage.prev
    bad = next(
        (
            stage.poset.labels[e]
            for e in range(stage.poset.n)
            if not prev.is_upset(stage.rel[e])
        ),
        None,
    )
    report.record("step-images-are-upsets", bad is None, bad)
    if prev.n > 20:
        raise CapExceeded("previous stage too large to enumerate upsets")
    box_ok = True
    witness = None
    for mask in range(1 << prev.n):
        if not prev.is_upset(mask):
            continue
        box = 0
        for e in range(stage.poset.n):
            if stage.rel[e] & ~mask == 0:
                box |= 1 << e
        if not stage.poset.is_upset(box):
            box_ok = False
            witness = mask
            break
    report.record("box-preserves-upsets", box_ok, witness)
    return report
