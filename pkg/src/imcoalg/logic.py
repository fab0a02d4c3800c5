"""Formula syntax, parser, printer and the Kripke-style model checker.

Grammar (loosest to tightest): "->" right-associative, then "|", then "&",
then the unary "[]" and "~"; atoms are identifiers plus the constants "T"
and "F"; parentheses group; whitespace is ignored. "~p" is sugar for
"p -> F" and is desugared at parse time, so the AST has no negation node.

Truth sets are computed bottom-up as whole subsets: the implication clause
quantifies over principal upsets and the box clause over modal successor
sets, so memoized set computation beats per-point queries.
"""

import re

from .errors import FormulaSyntaxError, UndeclaredLetter, UnknownToken, ValueNotUpset
from .poset import Subset


class Formula:
    """AST node base. Nodes are immutable by convention and cache their
    hash at construction: truth sets memoize on subformulas, so hashing
    must not walk the tree every time."""

    __slots__ = ("_hash",)

    def __hash__(self):
        return self._hash


class Var(Formula):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return type(other) is Var and other.name == self.name

    __hash__ = Formula.__hash__

    def __repr__(self):
        return f"Var({self.name!r})"


class Top(Formula):
    __slots__ = ()

    def __init__(self):
        self._hash = hash("top")

    def __eq__(self, other):
        return type(other) is Top

    __hash__ = Formula.__hash__

    def __repr__(self):
        return "Top()"


class Bot(Formula):
    __slots__ = ()

    def __init__(self):
        self._hash = hash("bot")

    def __eq__(self, other):
        return type(other) is Bot

    __hash__ = Formula.__hash__

    def __repr__(self):
        return "Bot()"


class _Binary(Formula):
    __slots__ = ("left", "right")
    _tag = ""

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self._hash = hash((self._tag, left._hash, right._hash))

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and other.left == self.left
            and other.right == self.right
        )

    __hash__ = Formula.__hash__

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class And(_Binary):
    __slots__ = ()
    _tag = "and"


class Or(_Binary):
    __slots__ = ()
    _tag = "or"


class Impl(_Binary):
    __slots__ = ()
    _tag = "impl"


class Box(Formula):
    __slots__ = ("body",)

    def __init__(self, body):
        self.body = body
        self._hash = hash(("box", body._hash))

    def __eq__(self, other):
        return type(other) is Box and other.body == self.body

    __hash__ = Formula.__hash__

    def __repr__(self):
        return f"Box({self.body!r})"


TOP = Top()
BOT = Bot()


def neg(phi):
    return Impl(phi, BOT)


def iff(a, b):
    return And(Impl(a, b), Impl(b, a))


_TOKEN = re.compile(r"\s*(\[\]|->|[~|&()]|[A-Za-z_][A-Za-z0-9_']*)")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise UnknownToken(f"unexpected character {text[at]!r}", at)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, length):
        self.tokens = tokens
        self.pos = 0
        self.length = length

    def peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def next_pos(self):
        return (
            self.tokens[self.pos][1] if self.pos < len(self.tokens) else self.length
        )

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text):
        if self.peek() != text:
            raise FormulaSyntaxError(f"expected {text!r}", self.next_pos())
        self.take()

    def parse_impl(self):
        left = self.parse_or()
        if self.peek() == "->":
            self.take()
            return Impl(left, self.parse_impl())
        return left

    def parse_or(self):
        out = self.parse_and()
        while self.peek() == "|":
            self.take()
            out = Or(out, self.parse_and())
        return out

    def parse_and(self):
        out = self.parse_unary()
        while self.peek() == "&":
            self.take()
            out = And(out, self.parse_unary())
        return out

    def parse_unary(self):
        tok = self.peek()
        if tok == "[]":
            self.take()
            return Box(self.parse_unary())
        if tok == "~":
            self.take()
            return neg(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self):
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", self.length)
        if tok == "(":
            self.take()
            out = self.parse_impl()
            self.expect(")")
            return out
        if tok in ("->", "|", "&", ")"):
            raise FormulaSyntaxError(f"unexpected {tok!r}", self.next_pos())
        self.take()
        if tok == "T":
            return TOP
        if tok == "F":
            return BOT
        return Var(tok)


def parse(text):
    parser = _Parser(_tokenize(text), len(text))
    out = parser.parse_impl()
    if parser.peek() is not None:
        raise FormulaSyntaxError(
            f"trailing input {parser.peek()!r}", parser.next_pos()
        )
    return out


_PREC_IMPL, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def _prec(phi):
    if isinstance(phi, Impl):
        return _PREC_IMPL
    if isinstance(phi, Or):
        return _PREC_OR
    if isinstance(phi, And):
        return _PREC_AND
    if isinstance(phi, Box):
        return _PREC_UNARY
    return 5


def print_formula(phi):
    """Emit the grammar back with minimal parentheses (parse . print = id)."""

    def wrap(child, limit):
        text = print_formula(child)
        return f"({text})" if _prec(child) < limit else text

    if isinstance(phi, Var):
        return phi.name
    if isinstance(phi, Top):
        return "T"
    if isinstance(phi, Bot):
        return "F"
    if isinstance(phi, Box):
        return "[]" + wrap(phi.body, _PREC_UNARY)
    if isinstance(phi, And):
        return wrap(phi.left, _PREC_AND) + " & " + wrap(phi.right, _PREC_AND + 1)
    if isinstance(phi, Or):
        return wrap(phi.left, _PREC_OR) + " | " + wrap(phi.right, _PREC_OR + 1)
    if isinstance(phi, Impl):
        return (
            wrap(phi.left, _PREC_IMPL + 1) + " -> " + wrap(phi.right, _PREC_IMPL)
        )
    raise TypeError(f"not a formula: {phi!r}")


def letters_of(phi):
    if isinstance(phi, Var):
        return {phi.name}
    if isinstance(phi, (Top, Bot)):
        return set()
    if isinstance(phi, Box):
        return letters_of(phi.body)
    return letters_of(phi.left) | letters_of(phi.right)


class Model:
    """A modal frame plus a valuation sending letters to upsets."""

    __slots__ = ("frame", "valuation")

    def __init__(self, frame, valuation):
        vals = {}
        for letter, value in valuation.items():
            mask = value.mask if isinstance(value, Subset) else value
            if not frame.poset.is_upset(mask):
                raise ValueNotUpset(f"valuation of {letter!r} is not an upset")
            vals[letter] = mask
        self.frame = frame
        self.valuation = vals

    @property
    def poset(self):
        return self.frame.poset


def truth_mask(model, phi, _cache=None):
    """Bitmask of the points satisfying phi."""
    cache = _cache if _cache is not None else {}
    got = cache.get(phi)
    if got is not None:
        return got
    p = model.poset
    if isinstance(phi, Var):
        if phi.name not in model.valuation:
            raise UndeclaredLetter(f"letter {phi.name!r} has no valuation")
        out = model.valuation[phi.name]
    elif isinstance(phi, Top):
        out = p.full_mask
    elif isinstance(phi, Bot):
        out = 0
    elif isinstance(phi, And):
        out = truth_mask(model, phi.left, cache) & truth_mask(
            model, phi.right, cache
        )
    elif isinstance(phi, Or):
        out = truth_mask(model, phi.left, cache) | truth_mask(
            model, phi.right, cache
        )
    elif isinstance(phi, Impl):
        a = truth_mask(model, phi.left, cache)
        b = truth_mask(model, phi.right, cache)
        # x satisfies a -> b iff no point above x is in a but not b
        out = p.full_mask & ~p.down_close(a & ~b)
    elif isinstance(phi, Box):
        body = truth_mask(model, phi.body, cache)
        out = 0
        for x in range(p.n):
            if model.frame.rel[x] & ~body == 0:
                out |= 1 << x
    else:
        raise TypeError(f"not a formula: {phi!r}")
    cache[phi] = out
    return out


def truth_set(model, phi):
    return Subset(model.poset, truth_mask(model, phi))


def valid_on_model(model, phi):
    return truth_mask(model, phi) == model.poset.full_mask


def enumerate_formulas(letters, max_depth):
    """All formulas with at most max_depth connectives, streamed in a
    deterministic order (size-major, then construction order).

    The depth measure counts every connective occurrence on one scale
    (box, and, or, impl); each tree is produced exactly once, so the output
    is deduplicated syntactically by construction.
    """
    atoms = [Var(l) for l in letters] + [TOP, BOT]
    by_size = [list(atoms)]
    yield from by_size[0]
    for size in range(1, max_depth + 1):
        bucket = []
        for phi in by_size[size - 1]:
            bucket.append(Box(phi))
        for make in (And, Or, Impl):
            for left_size in range(size):
                right_size = size - 1 - left_size
                for a in by_size[left_size]:
                    for b in by_size[right_size]:
                        bucket.append(make(a, b))
        by_size.append(bucket)
        yield from bucket
