"""Universal term values: shapes, positions, payloads, trees, seeds, paths.

Every datum the engine manipulates is a `Value`.  Values are immutable and
hashable; `==` on values is *semantic* equality (for machine seeds this is
exact bisimilarity, computed through the seed's canonical form, never textual
identity).

Canonical textual rendering (bit-exact; `parse_value` inverts the first-order
subset):

    unit                         the unit value
    fin:K/N                      K-th element of a finite set of size N
    nat:K                        natural number K
    atom:NAME                    named atom
    inl V    /    inr V          sum injections
    (V , W)                      pair (note single spaces around the comma)
    sup S [Q -> T, Q -> T, ...]  well-founded tree node (children in
                                 canonical position order)
    seed:MACHINE.STATE           state of a registered coalgebra machine
    below Q . below Q . here(I, P)
                                 path: zero or more child steps ending at a
                                 payload position P for index I
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Tuple

from .errors import ValueParseError


class Value:
    """Base class for all term values."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class UnitV(Value):
    pass


@dataclass(frozen=True)
class FinV(Value):
    k: int
    n: int

    def __post_init__(self):
        if not 0 <= self.k < self.n:
            raise ValueError(f"fin:{self.k}/{self.n} out of range")


@dataclass(frozen=True)
class NatV(Value):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"nat:{self.n} negative")


@dataclass(frozen=True)
class AtomV(Value):
    name: str


@dataclass(frozen=True)
class InlV(Value):
    value: Value


@dataclass(frozen=True)
class InrV(Value):
    value: Value


@dataclass(frozen=True)
class PairV(Value):
    fst: Value
    snd: Value


@dataclass(frozen=True)
class TreeV(Value):
    """Finite well-founded tree: a shape plus a total child table.

    `children` pairs each child position value with a subtree, in the
    canonical enumeration order of the position domain for `shape`.
    Finiteness is structural: the constructor only accepts already-built
    subtrees, so no cycle is representable.
    """

    shape: Value
    children: Tuple[Tuple[Value, "TreeV"], ...]

    def child(self, q: Value) -> "TreeV":
        for key, sub in self.children:
            if key == q:
                return sub
        raise KeyError(q)

    def height(self) -> int:
        best = 0
        stack = [(self, 1)]
        while stack:
            node, depth = stack.pop()
            best = max(best, depth)
            stack.extend((sub, depth + 1) for _, sub in node.children)
        return best


@dataclass(frozen=True, eq=False)
class SeedV(Value):
    """A state of a coalgebra machine, denoting a regular non-well-founded tree.

    Equality and hashing go through the machine's canonical (minimised,
    breadth-first renumbered) form, so two seeds compare equal exactly when
    they are bisimilar, even across different machine presentations.
    """

    machine: object  # duck-typed: .name, .step(state), .canonical_form(state)
    state: str

    def step(self):
        return self.machine.step(self.state)

    def child(self, q: Value) -> "SeedV":
        _, table = self.machine.step(self.state)
        for key, nxt in table:
            if key == q:
                return SeedV(self.machine, nxt)
        raise KeyError(q)

    def canonical(self):
        return self.machine.canonical_form(self.state)

    def presentation(self):
        """The reachable step table, verbatim (state names included).

        Finer than bisimilarity: two seeds share a presentation only when
        they are literally the same state list with the same transitions.
        """
        return self.machine.presentation(self.state)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, SeedV):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __ne__(self, other):
        result = self.__eq__(other)
        return NotImplemented if result is NotImplemented else not result

    def __hash__(self):
        return hash(self.canonical())


@dataclass(frozen=True)
class PathV(Value):
    """Finite path into a tree: child steps ending at a payload position.

    `steps` are child-position values walked from the anchor's root; `final`
    is a payload position at `index` for the landing node's shape.  The path
    carries no anchor itself: validity is judged against an anchor tree or
    seed by the position domain.
    """

    steps: Tuple[Value, ...]
    index: str
    final: Value


UNIT = UnitV()


# ---------------------------------------------------------------------------
# Size: the stratum a value is enumerated in.

def value_size(v: Value) -> int:
    """Intrinsic size of a value.

    Drives budget-bounded enumeration: `nat:k` has size k+1, sums/pairs count
    their nodes, a tree's size is its height, a path's size is its node count
    (steps + 1).  Seeds are references and have size 1.
    """
    if isinstance(v, (UnitV, FinV, AtomV, SeedV)):
        return 1
    if isinstance(v, NatV):
        return v.n + 1
    if isinstance(v, (InlV, InrV)):
        return 1 + value_size(v.value)
    if isinstance(v, PairV):
        return 1 + value_size(v.fst) + value_size(v.snd)
    if isinstance(v, TreeV):
        return v.height()
    if isinstance(v, PathV):
        return len(v.steps) + 1
    raise TypeError(f"not a Value: {v!r}")


# ---------------------------------------------------------------------------
# Canonical ordering: unit < fin (ascending) < nat (ascending) < atom <
# inl < inr < pair (lexicographic) < tree < seed < path.

_RANK = {UnitV: 0, FinV: 1, NatV: 2, AtomV: 3, InlV: 4, InrV: 5,
         PairV: 6, TreeV: 7, SeedV: 8, PathV: 9}


def canonical_key(v: Value):
    rank = _RANK[type(v)]
    if isinstance(v, UnitV):
        return (rank,)
    if isinstance(v, FinV):
        return (rank, v.k)
    if isinstance(v, NatV):
        return (rank, v.n)
    if isinstance(v, AtomV):
        return (rank, v.name)
    if isinstance(v, (InlV, InrV)):
        return (rank, canonical_key(v.value))
    if isinstance(v, PairV):
        return (rank, canonical_key(v.fst), canonical_key(v.snd))
    if isinstance(v, TreeV):
        return (rank, canonical_key(v.shape),
                tuple((canonical_key(q), canonical_key(t)) for q, t in v.children))
    if isinstance(v, SeedV):
        return (rank, v.canonical())
    if isinstance(v, PathV):
        return (rank, len(v.steps), tuple(canonical_key(s) for s in v.steps),
                v.index, canonical_key(v.final))
    raise TypeError(f"not a Value: {v!r}")


# ---------------------------------------------------------------------------
# Rendering.

def render(v: Value) -> str:
    if isinstance(v, UnitV):
        return "unit"
    if isinstance(v, FinV):
        return f"fin:{v.k}/{v.n}"
    if isinstance(v, NatV):
        return f"nat:{v.n}"
    if isinstance(v, AtomV):
        return f"atom:{v.name}"
    if isinstance(v, InlV):
        return f"inl {render(v.value)}"
    if isinstance(v, InrV):
        return f"inr {render(v.value)}"
    if isinstance(v, PairV):
        return f"({render(v.fst)} , {render(v.snd)})"
    if isinstance(v, TreeV):
        inner = ", ".join(f"{render(q)} -> {render(t)}" for q, t in v.children)
        return f"sup {render(v.shape)} [{inner}]"
    if isinstance(v, SeedV):
        return f"seed:{v.machine.name}.{v.state}"
    if isinstance(v, PathV):
        parts = [f"below {render(q)}" for q in v.steps]
        parts.append(f"here({v.index}, {render(v.final)})")
        return " . ".join(parts)
    raise TypeError(f"not a Value: {v!r}")


# ---------------------------------------------------------------------------
# Parsing of the first-order subset (everything except trees/seeds/paths,
# which are render-only).

_TOKEN_RE = re.compile(r"""
    (?P<lparen>\() | (?P<rparen>\)) | (?P<comma>,)
  | (?P<fin>fin:\d+/\d+)
  | (?P<nat>nat:\d+)
  | (?P<atom>atom:[A-Za-z_][A-Za-z0-9_]*)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ws>\s+)
""", re.VERBOSE)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ValueParseError(f"bad character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


class _ValueParser:
    def __init__(self, tokens, text: str):
        self.tokens = tokens
        self.text = text
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def value(self) -> Value:
        kind, text, pos = self.take()
        if kind == "word" and text == "unit":
            return UNIT
        if kind == "word" and text in ("inl", "inr"):
            inner = self.value()
            return InlV(inner) if text == "inl" else InrV(inner)
        if kind == "fin":
            k, n = text[len("fin:"):].split("/")
            try:
                return FinV(int(k), int(n))
            except ValueError as exc:
                raise ValueParseError(str(exc), pos) from None
        if kind == "nat":
            return NatV(int(text[len("nat:"):]))
        if kind == "atom":
            return AtomV(text[len("atom:"):])
        if kind == "lparen":
            fst = self.value()
            k2, _, p2 = self.take()
            if k2 != "comma":
                raise ValueParseError("expected ',' in pair", p2)
            snd = self.value()
            k3, _, p3 = self.take()
            if k3 != "rparen":
                raise ValueParseError("expected ')' closing pair", p3)
            return PairV(fst, snd)
        raise ValueParseError(f"expected a value, got {text!r}" if kind else "expected a value, got end of input", pos)


def parse_value(text: str) -> Value:
    """Parse the canonical rendering of a first-order value."""
    parser = _ValueParser(_tokenize(text), text)
    v = parser.value()
    kind, tok, pos = parser.peek()
    if kind is not None:
        raise ValueParseError(f"trailing input {tok!r}", pos)
    return v


def parse_value_prefix(text: str, start: int = 0):
    """Parse one value from `text[start:]`; return (value, end offset).

    Used by line-oriented file formats where a value is followed by more
    syntax (`-> state`, `=> value`, ...).  The end offset points just past
    the last token the value consumed.
    """
    tokens = []
    pos = start
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            break
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    parser = _ValueParser(tokens, text)
    v = parser.value()
    if parser.i < len(tokens):
        end = tokens[parser.i][2]
    else:
        _, last_text, last_pos = tokens[parser.i - 1]
        end = last_pos + len(last_text)
    return v, end
