"""Brute-force reference semantics for functor expressions.

Ground truth for adequacy tests: everything here is computed directly from
the set semantics of an expression, on plain tuples, sharing no evaluation
machinery with the engine modules.  Parameter families are given as plain
lists of semantic values (e.g. `atoms("r", "e", "d")`), so the only import
from the engine is the expression AST itself.

Semantic values:

    ("unit",)              unit
    ("inl", v) ("inr", v)  sum injections
    ("pair", a, b)         products
    ("atom", name)         parameter atoms
    ("rec", v)             a recursive-argument occurrence wrapping v
    ("table", (v, ...))    finite-exponent tables
    ("?",)                 depth-truncation marker (nu_truncate only)
"""
from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .elaborator import (ConstDom, Exp, FunctorExpr, One, Param, Prod, Rec,
                         Sum, Zero)

SemValue = Tuple


def atoms(*names: str) -> List[SemValue]:
    return [("atom", n) for n in names]


def _dedup(values: Sequence[SemValue]) -> List[SemValue]:
    seen = set()
    out = []
    for v in values:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def semantic_enumerate(e: FunctorExpr, x: Dict[str, List[SemValue]],
                       rec_set: Sequence[SemValue]) -> List[SemValue]:
    """One application of the functor to (x, rec_set), fully enumerated."""
    if isinstance(e, Zero):
        return []
    if isinstance(e, One):
        return [("unit",)]
    if isinstance(e, Param):
        return list(x[e.name])
    if isinstance(e, Rec):
        return [("rec", r) for r in rec_set]
    if isinstance(e, Sum):
        return [("inl", v) for v in semantic_enumerate(e.left, x, rec_set)] + \
            [("inr", v) for v in semantic_enumerate(e.right, x, rec_set)]
    if isinstance(e, Prod):
        rights = semantic_enumerate(e.right, x, rec_set)
        return [("pair", a, b)
                for a in semantic_enumerate(e.left, x, rec_set)
                for b in rights]
    if isinstance(e, Exp):
        k = _exp_width(e)
        slots = semantic_enumerate(e.body, x, rec_set)
        tables: List[tuple] = [()]
        for _ in range(k):
            tables = [t + (v,) for t in tables for v in slots]
        return [("table", t) for t in tables]
    if isinstance(e, ConstDom):
        raise NotImplementedError("constant domains have no oracle semantics")
    raise TypeError(f"not a functor expression: {e!r}")


def _exp_width(e: Exp) -> int:
    n = getattr(e.domain, "n", None)
    if n is None:
        raise NotImplementedError("oracle exponents need a finite-set domain")
    return n


def mu_iterate(e: FunctorExpr, x: Dict[str, List[SemValue]], height: int) -> List[SemValue]:
    """Kleene iteration from the empty set: the height-bounded least fixed
    point.  Monotone in `height`; stabilises when the fixed point is finite."""
    layer: List[SemValue] = []
    for _ in range(height):
        layer = _dedup(semantic_enumerate(e, x, layer))
    return layer


def nu_truncate(e: FunctorExpr, x: Dict[str, List[SemValue]], depth: int) -> List[SemValue]:
    """Depth-k behaviour classes: unrollings with a truncation marker.

    Two regular trees are depth-k bisimilar exactly when their depth-k
    unrollings (computed the same way, markers at the cut) coincide.
    """
    layer: List[SemValue] = [("?",)]
    for _ in range(depth):
        layer = _dedup(semantic_enumerate(e, x, layer))
    return layer
