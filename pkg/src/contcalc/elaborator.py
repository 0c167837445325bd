"""Declaration DSL: parsing and elaboration to containers.

Grammar (one declaration per line, `#` comments):

    decl   := ("mu" | "nu") IDENT "(" [IDENT ("," IDENT)*] ")" "=" expr
    expr   := term ("+" term)*
    term   := factor ("*" factor)*
    factor := "0" | "1" | IDENT | "rec" | "(" expr ")" | "[" NAT "]" "->" factor

`+` and `*` associate to the left and `*` binds tighter; `[n] ->` is a
finite-domain exponent (n-fold product of its body with positions summed).
Elaboration compiles the body to a container over the declared parameters
plus the recursion slot, splits off the slot, and takes the least or
greatest fixed point according to the declaration's fixity.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

from .core import Container, ExtElement, FamilyAssignment, IndexSet, split_last
from .domains import Domain, EmptyDom, ProdDom, SumDom, UnitDom
from .errors import ElaborationError, ParseError
from .mfix import MachineRegistry, nu_container
from .values import InlV, InrV, PairV, UNIT, Value
from .wfix import FLayer, SplitContainer, into, mu_container


# ---------------------------------------------------------------------------
# Functor expressions.

class FunctorExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Zero(FunctorExpr):
    pass


@dataclass(frozen=True)
class One(FunctorExpr):
    pass


@dataclass(frozen=True)
class Param(FunctorExpr):
    name: str


@dataclass(frozen=True)
class Rec(FunctorExpr):
    name: str = "rec"


@dataclass(frozen=True)
class Sum(FunctorExpr):
    left: FunctorExpr
    right: FunctorExpr


@dataclass(frozen=True)
class Prod(FunctorExpr):
    left: FunctorExpr
    right: FunctorExpr


@dataclass(frozen=True)
class ConstDom(FunctorExpr):
    domain: Domain


@dataclass(frozen=True)
class Exp(FunctorExpr):
    domain: Domain  # must be finite
    body: FunctorExpr


@dataclass(frozen=True)
class Decl:
    fixity: str  # "mu" | "nu"
    name: str
    params: Tuple[str, ...]
    body: FunctorExpr
    rec_name: str = "rec"


def free_names(e: FunctorExpr) -> set:
    if isinstance(e, Param):
        return {e.name}
    if isinstance(e, Rec):
        return {e.name}
    if isinstance(e, (Sum, Prod)):
        return free_names(e.left) | free_names(e.right)
    if isinstance(e, Exp):
        return free_names(e.body)
    return set()


# ---------------------------------------------------------------------------
# Parser.

_DSL_TOKEN = re.compile(r"""
    (?P<nat>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[()\[\],+*=]|->)
  | (?P<ws>[ \t]+)
""", re.VERBOSE)


def _dsl_tokens(text: str, line: int):
    tokens = []
    col = 0
    while col < len(text):
        m = _DSL_TOKEN.match(text, col)
        if not m:
            raise ParseError(f"bad character {text[col]!r}", line, col + 1)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), line, col + 1))
        col = m.end()
    return tokens


class _DeclParser:
    def __init__(self, tokens, line: int, length: int):
        self.tokens = tokens
        self.line = line
        self.end_col = length + 1
        self.i = 0
        self.params: Tuple[str, ...] = ()

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return (None, "", self.line, self.end_col)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, got, line, col = self.take()
        if got != text:
            what = repr(got) if kind else "end of input"
            raise ParseError(f"expected {text!r}, got {what}", line, col)

    def decl(self) -> Decl:
        kind, fixity, line, col = self.take()
        if fixity not in ("mu", "nu"):
            raise ParseError(f"expected 'mu' or 'nu', got {fixity!r}", line, col)
        kind, name, line, col = self.take()
        if kind != "ident":
            raise ParseError("expected declaration name", line, col)
        self.expect("(")
        params: List[str] = []
        if self.peek()[1] != ")":
            while True:
                kind, p, line, col = self.take()
                if kind != "ident":
                    raise ParseError("expected parameter name", line, col)
                if p in params or p == "rec":
                    raise ParseError(f"duplicate or reserved parameter {p!r}", line, col)
                params.append(p)
                if self.peek()[1] == ",":
                    self.take()
                    continue
                break
        self.expect(")")
        self.expect("=")
        self.params = tuple(params)
        body = self.expr()
        kind, tok, line, col = self.peek()
        if kind is not None:
            raise ParseError(f"trailing input {tok!r}", line, col)
        return Decl(fixity, name, self.params, body)

    def expr(self) -> FunctorExpr:
        e = self.term()
        while self.peek()[1] == "+":
            self.take()
            e = Sum(e, self.term())
        return e

    def term(self) -> FunctorExpr:
        e = self.factor()
        while self.peek()[1] == "*":
            self.take()
            e = Prod(e, self.factor())
        return e

    def factor(self) -> FunctorExpr:
        kind, tok, line, col = self.take()
        if tok == "0":
            return Zero()
        if tok == "1":
            return One()
        if tok == "rec":
            return Rec()
        if kind == "nat":
            raise ParseError(f"unexpected number {tok!r} (only 0 and 1 are functors)",
                             line, col)
        if kind == "ident":
            if tok not in self.params:
                raise ParseError(f"unbound identifier {tok!r}", line, col)
            return Param(tok)
        if tok == "(":
            e = self.expr()
            self.expect(")")
            return e
        if tok == "[":
            kind2, n, line2, col2 = self.take()
            if kind2 != "nat":
                raise ParseError("expected a number inside '[...]'", line2, col2)
            self.expect("]")
            self.expect("->")
            from .domains import FinDom
            return Exp(FinDom(int(n)), self.factor())
        what = repr(tok) if kind else "end of input"
        raise ParseError(f"expected a functor expression, got {what}", line, col)


def parse_decl(text: str, line: int = 1) -> Decl:
    """Parse a single declaration; syntax errors carry (line, col)."""
    tokens = _dsl_tokens(text, line)
    return _DeclParser(tokens, line, len(text)).decl()


def parse_decl_file(text: str) -> List[Decl]:
    decls = []
    names = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        d = parse_decl(stripped, line=lineno)
        if d.name in names:
            raise ParseError(f"duplicate declaration {d.name!r}", lineno, 1)
        names.add(d.name)
        decls.append(d)
    return decls


def render_expr(e: FunctorExpr, level: int = 0) -> str:
    """Inverse of the parser, minimal parentheses (0=sum, 1=prod, 2=factor)."""
    if isinstance(e, Zero):
        return "0"
    if isinstance(e, One):
        return "1"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Rec):
        return "rec"
    if isinstance(e, Sum):
        s = f"{render_expr(e.left, 0)} + {render_expr(e.right, 1)}"
        return f"({s})" if level > 0 else s
    if isinstance(e, Prod):
        s = f"{render_expr(e.left, 1)} * {render_expr(e.right, 2)}"
        return f"({s})" if level > 1 else s
    if isinstance(e, Exp):
        from .domains import FinDom
        if not isinstance(e.domain, FinDom):
            raise ElaborationError("only finite-set exponents are renderable")
        return f"[{e.domain.n}] -> {render_expr(e.body, 2)}"
    if isinstance(e, ConstDom):
        raise ElaborationError("constant domains have no DSL syntax")
    raise TypeError(f"not a functor expression: {e!r}")


def render_decl(d: Decl) -> str:
    return f"{d.fixity} {d.name}({', '.join(d.params)}) = {render_expr(d.body)}"


# ---------------------------------------------------------------------------
# Compilation to containers.

def _compile(e: FunctorExpr, indices: Tuple[str, ...], rec_name: str):
    """Return (shape domain, position function) for one functor expression."""
    if isinstance(e, Zero):
        return EmptyDom(), lambda i, s: EmptyDom()
    if isinstance(e, One):
        return UnitDom(), lambda i, s: EmptyDom()
    if isinstance(e, (Param, Rec)):
        name = e.name if isinstance(e, Param) else rec_name
        if name not in indices:
            raise ElaborationError(f"unbound name {name!r}")
        return UnitDom(), lambda i, s, _n=name: UnitDom() if i == _n else EmptyDom()
    if isinstance(e, ConstDom):
        return e.domain, lambda i, s: EmptyDom()
    if isinstance(e, Sum):
        sl, pl = _compile(e.left, indices, rec_name)
        sr, pr = _compile(e.right, indices, rec_name)

        def pos(i, s):
            if isinstance(s, InlV):
                return pl(i, s.value)
            if isinstance(s, InrV):
                return pr(i, s.value)
            raise ElaborationError(f"not a sum shape: {s}")

        return SumDom(sl, sr), pos
    if isinstance(e, Prod):
        sl, pl = _compile(e.left, indices, rec_name)
        sr, pr = _compile(e.right, indices, rec_name)

        def pos(i, s):
            if not isinstance(s, PairV):
                raise ElaborationError(f"not a product shape: {s}")
            return SumDom(pl(i, s.fst), pr(i, s.snd))

        return ProdDom(sl, sr), pos
    if isinstance(e, Exp):
        if e.domain.max_size() is None:
            raise ElaborationError("exponent domain must be finite")
        k = len(e.domain.enumerate_all())
        sb, pb = _compile(e.body, indices, rec_name)
        return _power(sb, pb, k)
    raise TypeError(f"not a functor expression: {e!r}")


def _power(sb: Domain, pb, k: int):
    """k-fold product of a shape domain with positions summed slotwise.

    Shapes are right-nested pairs (k=0: unit, k=1: bare); position values of
    the j-th slot are embedded by j `inr`s and, except for the last slot, an
    `inl`.
    """
    if k == 0:
        return UnitDom(), lambda i, s: EmptyDom()
    if k == 1:
        return sb, pb
    sr, pr = _power(sb, pb, k - 1)

    def pos(i, s):
        if not isinstance(s, PairV):
            raise ElaborationError(f"not a power shape: {s}")
        return SumDom(pb(i, s.fst), pr(i, s.snd))

    return ProdDom(sb, sr), pos


def to_container(e: FunctorExpr, indices: IndexSet, rec_name: str = "rec") -> Container:
    """Compile a functor expression to a container over `indices`.

    `indices` must already include the recursion slot (as `rec_name`) when
    the expression mentions `rec`.
    """
    unbound = free_names(e) - set(indices.names) - {rec_name}
    if unbound:
        raise ElaborationError(f"unbound names: {sorted(unbound)}")
    shapes, pos = _compile(e, indices.names, rec_name)
    return Container(indices, shapes, pos)


@lru_cache(maxsize=None)
def decl_split(d: Decl) -> SplitContainer:
    """The declaration body as a split container (recursion slot split off).

    Memoised per declaration so machines registered against a declaration's
    signature stay attached to one split-container identity.
    """
    indices = IndexSet(d.params + (d.rec_name,))
    return split_last(to_container(d.body, indices, d.rec_name))


def elaborate(d: Decl, registry: Optional[MachineRegistry] = None) -> Container:
    """Elaborate a declaration to its fixed-point container."""
    f = decl_split(d)
    if d.fixity == "mu":
        return mu_container(f)
    return nu_container(f, registry)


# ---------------------------------------------------------------------------
# Data literals: first-order terms denoting least-fixed-point elements.

def data_to_element(d: Decl, x: FamilyAssignment, term: Value) -> ExtElement:
    """Interpret a nested first-order term as an element of the mu container.

    The term follows the body structure layer by layer: sum shapes are `inl
    t`/`inr t`, products are pairs, parameter slots hold payload values, and
    recursion slots hold the next layer.  This is iterated `into`.
    """
    if d.fixity != "mu":
        raise ElaborationError("data literals denote least-fixed-point elements")
    f = decl_split(d)

    def build(t: Value) -> ExtElement:
        shape, params, children = _match(d.body, t, build)
        layer = FLayer(shape,
                       lambda i, p, _tbl=params: _tbl[(i, p)],
                       {q: (sub.shape, sub.payload) for q, sub in children.items()})
        return into(f, x, layer)

    return build(term)


def _match(e: FunctorExpr, t: Value, build):
    """Destructure one layer of a data term against a functor expression.

    Returns (shape value, params table {(index, position): value},
    children {position: sub-element}).
    """
    if isinstance(e, One):
        if t != UNIT:
            raise ElaborationError(f"expected unit, got {t}")
        return UNIT, {}, {}
    if isinstance(e, Zero):
        raise ElaborationError("no terms of the empty functor")
    if isinstance(e, Param):
        return UNIT, {(e.name, UNIT): t}, {}
    if isinstance(e, Rec):
        return UNIT, {}, {UNIT: build(t)}
    if isinstance(e, ConstDom):
        if not e.domain.contains(t):
            raise ElaborationError(f"{t} not in constant domain")
        return t, {}, {}
    if isinstance(e, Sum):
        if isinstance(t, InlV):
            s, params, children = _match(e.left, t.value, build)
            return InlV(s), params, children
        if isinstance(t, InrV):
            s, params, children = _match(e.right, t.value, build)
            return InrV(s), params, children
        raise ElaborationError(f"expected inl/inr for a sum, got {t}")
    if isinstance(e, Prod):
        if not isinstance(t, PairV):
            raise ElaborationError(f"expected a pair for a product, got {t}")
        sl, paramsl, childrenl = _match(e.left, t.fst, build)
        sr, paramsr, childrenr = _match(e.right, t.snd, build)
        params = {(i, InlV(p)): v for (i, p), v in paramsl.items()}
        params.update({(i, InrV(p)): v for (i, p), v in paramsr.items()})
        children = {InlV(q): sub for q, sub in childrenl.items()}
        children.update({InrV(q): sub for q, sub in childrenr.items()})
        return PairV(sl, sr), params, children
    if isinstance(e, Exp):
        k = len(e.domain.enumerate_all())
        return _match_power(e.body, t, k, build)
    raise TypeError(f"not a functor expression: {e!r}")


def _match_power(body: FunctorExpr, t: Value, k: int, build):
    if k == 0:
        if t != UNIT:
            raise ElaborationError(f"expected unit for empty power, got {t}")
        return UNIT, {}, {}
    if k == 1:
        return _match(body, t, build)
    if not isinstance(t, PairV):
        raise ElaborationError(f"expected a pair for a power, got {t}")
    s0, params0, children0 = _match(body, t.fst, build)
    sr, paramsr, childrenr = _match_power(body, t.snd, k - 1, build)
    params = {(i, InlV(p)): v for (i, p), v in params0.items()}
    params.update({(i, InrV(p)): v for (i, p), v in paramsr.items()})
    children = {InlV(q): sub for q, sub in children0.items()}
    children.update({InrV(q): sub for q, sub in childrenr.items()})
    return PairV(s0, sr), params, children
