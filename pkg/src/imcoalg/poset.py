"""Finite posets, monotone maps, p-morphisms and order-theoretic predicates.

Conventions used throughout the package:

  - elements are indexed 0..n-1 in the order the labels were given;
  - subsets of a poset are bitmasks over element indices, so brute-force
    enumeration over all 2^n subsets stays feasible up to n of about 20;
  - every value is immutable after construction, so any operation can run
    from parallel workers without coordination;
  - iteration is always in index order, which keeps all derived output
    byte-for-byte reproducible.

``up[i]`` is the bitmask of ``{j : i <= j}`` including ``i`` itself.
"""

from dataclasses import dataclass

from .errors import (
    DuplicateLabel,
    NotAntisymmetric,
    NotTransitive,
    UnknownLabel,
)


def iter_bits(mask):
    """Indices of the set bits of mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def format_label(label):
    """Deterministic display form; nested frozensets print as sorted {..}."""
    if isinstance(label, frozenset):
        return "{" + ",".join(sorted(format_label(x) for x in label)) + "}"
    if isinstance(label, tuple):
        return "(" + ",".join(format_label(x) for x in label) + ")"
    return str(label)


class Poset:
    """Immutable finite poset over an indexed tuple of opaque labels."""

    __slots__ = ("labels", "up", "n", "_index", "_down", "_hash")

    def __init__(self, labels, up, _trusted=False):
        labels = tuple(labels)
        up = tuple(up)
        index = {}
        for i, lab in enumerate(labels):
            if lab in index:
                raise DuplicateLabel(f"duplicate label {format_label(lab)!r}")
            index[lab] = i
        self.labels = labels
        self.up = up
        self.n = len(labels)
        self._index = index
        self._down = None
        self._hash = None
        if not _trusted:
            self._verify()

    def _verify(self):
        n = self.n
        for i in range(n):
            if not (self.up[i] >> i) & 1:
                raise NotTransitive(f"relation not reflexive at {self._name(i)}")
            for j in iter_bits(self.up[i]):
                if j != i and (self.up[j] >> i) & 1:
                    raise NotAntisymmetric(
                        f"cycle between {self._name(i)} and {self._name(j)}"
                    )
                if self.up[j] & ~self.up[i]:
                    k = next(iter_bits(self.up[j] & ~self.up[i]))
                    raise NotTransitive(
                        f"{self._name(i)} <= {self._name(j)} <= {self._name(k)} "
                        f"but not {self._name(i)} <= {self._name(k)}"
                    )

    def _name(self, i):
        return format_label(self.labels[i])

    # -- basic queries ----------------------------------------------------

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(f"unknown element {format_label(label)!r}") from None

    def leq(self, i, j):
        return (self.up[i] >> j) & 1 == 1

    def leq_labels(self, a, b):
        return self.leq(self.index(a), self.index(b))

    def up_mask(self, i):
        return self.up[i]

    @property
    def down(self):
        if self._down is None:
            down = [0] * self.n
            for i in range(self.n):
                for j in iter_bits(self.up[i]):
                    down[j] |= 1 << i
            self._down = tuple(down)
        return self._down

    @property
    def full_mask(self):
        return (1 << self.n) - 1

    def is_upset(self, mask):
        for i in iter_bits(mask):
            if self.up[i] & ~mask:
                return False
        return True

    def up_close(self, mask):
        out = 0
        for i in iter_bits(mask):
            out |= self.up[i]
        return out

    def down_close(self, mask):
        out = 0
        down = self.down
        for i in iter_bits(mask):
            out |= down[i]
        return out

    def min_of(self, mask):
        """Index of the least element of the subset, or None."""
        for i in iter_bits(mask):
            if mask & ~self.up[i] == 0:
                return i
        return None

    def covers(self):
        """List of cover pairs (i, j) with i < j and nothing in between."""
        out = []
        for i in range(self.n):
            strict = self.up[i] & ~(1 << i)
            for j in iter_bits(strict):
                between = strict & self.down[j] & ~(1 << j)
                if between == 0:
                    out.append((i, j))
        return out

    # -- value semantics --------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Poset)
            and self.labels == other.labels
            and self.up == other.up
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.labels, self.up))
        return self._hash

    def __repr__(self):
        cov = ", ".join(
            f"{self._name(i)}<{self._name(j)}" for i, j in self.covers()
        )
        return f"Poset([{', '.join(map(self._name, range(self.n)))}]; {cov})"


@dataclass(frozen=True)
class Subset:
    """A subset of a poset's carrier, stored as a bitmask."""

    carrier: Poset
    mask: int

    @classmethod
    def from_labels(cls, carrier, labels):
        mask = 0
        for lab in labels:
            mask |= 1 << carrier.index(lab)
        return cls(carrier, mask)

    @property
    def members(self):
        return tuple(self.carrier.labels[i] for i in iter_bits(self.mask))

    def __contains__(self, label):
        return (self.mask >> self.carrier.index(label)) & 1 == 1

    def __len__(self):
        return self.mask.bit_count()

    def __repr__(self):
        return "Subset{" + ",".join(format_label(m) for m in self.members) + "}"


class PosetMap:
    """Total map between posets, stored as a tuple of target indices."""

    __slots__ = ("source", "target", "assign")

    def __init__(self, source, target, assign):
        assign = tuple(assign)
        if len(assign) != source.n:
            raise UnknownLabel("assignment is not total over the source")
        for t in assign:
            if not 0 <= t < target.n:
                raise UnknownLabel(f"target index {t} out of range")
        self.source = source
        self.target = target
        self.assign = assign

    @classmethod
    def from_dict(cls, source, target, mapping):
        assign = [target.index(mapping[lab]) for lab in source.labels]
        return cls(source, target, assign)

    def __call__(self, label):
        return self.target.labels[self.assign[self.source.index(label)]]

    def image_mask(self, mask):
        out = 0
        for i in iter_bits(mask):
            out |= 1 << self.assign[i]
        return out

    def compose(self, other):
        """self after other (other's target must be self's source)."""
        if other.target is not self.source and other.target != self.source:
            raise UnknownLabel("composition mismatch")
        return PosetMap(
            other.source, self.target, tuple(self.assign[i] for i in other.assign)
        )

    def __eq__(self, other):
        return (
            isinstance(other, PosetMap)
            and self.source == other.source
            and self.target == other.target
            and self.assign == other.assign
        )

    def __hash__(self):
        return hash((self.source, self.target, self.assign))

    def __repr__(self):
        pairs = ", ".join(
            f"{format_label(self.source.labels[i])}->"
            f"{format_label(self.target.labels[t])}"
            for i, t in enumerate(self.assign)
        )
        return f"PosetMap({pairs})"


# -- construction ----------------------------------------------------------


def make_poset(labels, pairs, mode="covers"):
    """Build a poset from ordered label pairs.

    mode="covers": leq is the reflexive-transitive closure of the pairs.
    mode="full":   the pairs are taken verbatim (plus the diagonal, which is
                   definitional) and the order axioms are verified, never
                   repaired; silent closure would mask errors in hand-written
                   frame files.
    """
    labels = tuple(labels)
    if not labels:
        raise UnknownLabel("a poset needs at least one element")
    seen = {}
    for i, lab in enumerate(labels):
        if lab in seen:
            raise DuplicateLabel(f"duplicate label {format_label(lab)!r}")
        seen[lab] = i
    n = len(labels)
    up = [1 << i for i in range(n)]
    for a, b in pairs:
        ia = seen.get(a)
        ib = seen.get(b)
        if ia is None:
            raise UnknownLabel(f"unknown element {format_label(a)!r}")
        if ib is None:
            raise UnknownLabel(f"unknown element {format_label(b)!r}")
        up[ia] |= 1 << ib
    if mode == "covers":
        changed = True
        while changed:
            changed = False
            for i in range(n):
                acc = up[i]
                for j in iter_bits(acc):
                    acc |= up[j]
                if acc != up[i]:
                    up[i] = acc
                    changed = True
        return Poset(labels, up)
    if mode == "full":
        return Poset(labels, up)
    raise ValueError(f"unknown mode {mode!r}")


def point_poset(label="*"):
    return Poset((label,), (1,), _trusted=True)


def identity_map(p):
    return PosetMap(p, p, range(p.n))


def constant_map(source, target, label):
    return PosetMap(source, target, [target.index(label)] * source.n)


def terminal_map(source, point=None):
    """The unique map into a one-element poset."""
    if point is None:
        point = point_poset()
    return PosetMap(source, point, [0] * source.n)


def product(p, q):
    """Componentwise order on pairs; labels are (label_p, label_q) tuples."""
    labels = []
    for a in p.labels:
        for b in q.labels:
            labels.append((a, b))
    n_q = q.n
    up = []
    for i in range(p.n):
        for j in range(q.n):
            mask = 0
            for i2 in iter_bits(p.up[i]):
                base = i2 * n_q
                for j2 in iter_bits(q.up[j]):
                    mask |= 1 << (base + j2)
            up.append(mask)
    return Poset(labels, up, _trusted=True)


# -- predicates -------------------------------------------------------------


def is_monotone(f):
    """x <= y implies f(x) <= f(y), checked over all source pairs."""
    src, tgt = f.source, f.target
    for x in range(src.n):
        fx = f.assign[x]
        for y in iter_bits(src.up[x]):
            if not tgt.leq(fx, f.assign[y]):
                return False
    return True


def is_pmorphism(f):
    """Monotone with the back condition: f maps each ↑x onto ↑f(x)."""
    src, tgt = f.source, f.target
    for x in range(src.n):
        if f.image_mask(src.up[x]) != tgt.up[f.assign[x]]:
            return False
    return True


def up_set(p, s):
    """Upward closure of a subset."""
    return Subset(p, p.up_close(s.mask))


def principal_up(p, x):
    return Subset(p, p.up_mask(p.index(x)))


def is_rooted(p, s):
    """The root of the subset (its least member) or None; {} is not rooted."""
    if s.mask == 0:
        return None
    i = p.min_of(s.mask)
    return None if i is None else p.labels[i]


def is_g_open(s, g):
    """Relative openness of a subset: every step up out of S can be matched
    inside S up to g-fibers.

    For each s in S and each b >= s there must be s' in S with s <= s' and
    g(s') = g(b). Equivalently the g-image of ↑s ∩ S equals that of ↑s.
    """
    p = g.source
    if s.carrier != p:
        raise UnknownLabel("subset carrier differs from the map's source")
    for i in iter_bits(s.mask):
        need = g.image_mask(p.up[i])
        have = g.image_mask(p.up[i] & s.mask)
        if need != have:
            return False
    return True


def relative_open(f, g):
    """Openness of f: X -> Y relative to g: Y -> Z.

    For all a in X and b in Y with f(a) <= b there is a' >= a such that
    g(f(a')) = g(b).
    """
    if f.target != g.source:
        raise UnknownLabel("f.target must be g.source")
    x, y = f.source, f.target
    gof = tuple(g.assign[f.assign[i]] for i in range(x.n))
    for a in range(x.n):
        reachable = 0
        for a2 in iter_bits(x.up[a]):
            reachable |= 1 << gof[a2]
        for b in iter_bits(y.up[f.assign[a]]):
            if not (reachable >> g.assign[b]) & 1:
                return False
    return True


def enumerate_upsets(p):
    """All upward-closed subsets including {} and the carrier, ascending by
    member bitmask."""
    out = []
    for mask in range(1 << p.n):
        if p.is_upset(mask):
            out.append(Subset(p, mask))
    return out
