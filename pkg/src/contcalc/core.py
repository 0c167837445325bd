"""Containers and their functor extension.

A container is a shape domain together with, per parameter index, a position
domain for each shape.  Its extension over a family assignment X is the set
of pairs (shape, payload) where the payload assigns an X-value to every
position.  Payloads are pure callable oracles, not tables: position domains
over non-well-founded trees are countably infinite, so a table cannot be the
primitive representation (finite tables are wrapped into oracles by
`ExtElement.from_table`).

Extensional equality of elements is a budgeted tri-state: `distinct` always
carries a concrete witness, `equal` is only claimed when the position
enumeration was complete, and otherwise the honest answer is
`unknown-at-budget`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

from .domains import Budget, Domain, Enumeration
from .errors import ElaborationError, PayloadError
from .values import Value

PayloadFn = Callable[[str, Value], Value]


@dataclass(frozen=True)
class IndexSet:
    """Ordered, distinct parameter index names; order fixes payload iteration."""

    names: Tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate index names: {self.names}")

    def __iter__(self):
        return iter(self.names)

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self.names


@dataclass(frozen=True)
class Container:
    indices: IndexSet
    shapes: Domain
    pos: Callable[[str, Value], Domain]

    def position_domain(self, index: str, shape: Value) -> Domain:
        if index not in self.indices:
            raise KeyError(f"unknown index {index!r}")
        return self.pos(index, shape)


@dataclass(frozen=True)
class SplitContainer:
    """A container over I+1 indices with the last index singled out.

    `base` keeps the first I position families; `q` is the split-off family
    of the former last index, used as the recursion slot by the fixed-point
    constructions.
    """

    base: Container
    q: Callable[[Value], Domain]

    def reassemble(self, rec_name: str = "rec") -> Container:
        if rec_name in self.base.indices:
            raise ValueError(f"index {rec_name!r} already present")
        names = self.base.indices.names + (rec_name,)
        base_pos, q = self.base.pos, self.q

        def pos(i, s):
            return q(s) if i == rec_name else base_pos(i, s)

        return Container(IndexSet(names), self.base.shapes, pos)


@dataclass(frozen=True)
class FamilyAssignment:
    assign: Dict[str, Domain]

    def domain(self, index: str) -> Domain:
        return self.assign[index]

    def restricted_to(self, indices: IndexSet) -> "FamilyAssignment":
        return FamilyAssignment({i: self.assign[i] for i in indices})


@dataclass(frozen=True)
class FamilyMorphism:
    """Componentwise map between family assignments."""

    maps: Dict[str, Callable[[Value], Value]]

    def apply(self, index: str, v: Value) -> Value:
        return self.maps[index](v)

    def compose(self, other: "FamilyMorphism") -> "FamilyMorphism":
        """self after other (self ∘ other)."""
        return FamilyMorphism({
            i: (lambda v, f=self.maps[i], g=other.maps[i]: f(g(v)))
            for i in self.maps
        })

    @staticmethod
    def identity(indices: IndexSet) -> "FamilyMorphism":
        return FamilyMorphism({i: (lambda v: v) for i in indices})


@dataclass(frozen=True)
class ExtElement:
    """An element of a container extension: shape plus payload oracle."""

    shape: Value
    payload: PayloadFn

    @staticmethod
    def from_table(shape: Value, table: Dict[Tuple[str, Value], Value]) -> "ExtElement":
        tbl = dict(table)

        def payload(i, p):
            return tbl[(i, p)]

        return ExtElement(shape, payload)


def _payload_value(e: ExtElement, index: str, position: Value) -> Value:
    try:
        return e.payload(index, position)
    except PayloadError:
        raise
    except Exception as exc:
        raise PayloadError(index, position, f"payload oracle failed: {exc}") from exc


def ext_contains(c: Container, x: FamilyAssignment, e: ExtElement,
                 budget: Budget) -> bool:
    """Check membership of `e` in the extension of `c` over `x`.

    Returns False when the shape is not a shape of `c`.  A payload that is
    missing a position or returns a value outside the assigned family raises
    `PayloadError` naming the offending (index, position).
    """
    if not c.shapes.contains(e.shape):
        return False
    for i in c.indices:
        target = x.domain(i)
        for p in c.pos(i, e.shape).enumerate(budget):
            v = _payload_value(e, i, p)
            if not target.contains(v):
                raise PayloadError(i, p, f"value {v} outside assigned domain")
    return True


@dataclass(frozen=True)
class ExtEnumeration:
    elements: Tuple[ExtElement, ...]
    complete: bool

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]


def ext_enumerate(c: Container, x: FamilyAssignment, budget: Budget) -> ExtEnumeration:
    """Enumerate extension elements within budget.

    Deterministic and duplicate-free: shapes in canonical order, then payload
    tables in lexicographic order over the position list (indices in index
    order, positions in canonical order) with values in family order.  The
    result is flagged incomplete whenever any involved enumeration was cut by
    the budget; shapes whose position space cannot be fully enumerated within
    budget are skipped (with the incomplete flag), never half-filled.
    """
    shape_enum = c.shapes.enumerate(budget)
    complete = shape_enum.complete
    elements = []
    count = budget.count
    for shape in shape_enum:
        positions = []
        skip = False
        for i in c.indices:
            pos_enum = c.pos(i, shape).enumerate(budget)
            if not pos_enum.complete:
                complete = False
                skip = True
                break
            positions.extend((i, p) for p in pos_enum)
        if skip:
            continue
        value_lists = []
        for i, _p in positions:
            val_enum = x.domain(i).enumerate(budget)
            if not val_enum.complete:
                complete = False
            value_lists.append(val_enum.values)
        if any(not vl for vl in value_lists):
            continue  # a position cannot be filled: no elements for this shape
        # odometer over value_lists, rightmost fastest
        idx = [0] * len(value_lists)
        while True:
            if count is not None and len(elements) >= count:
                return ExtEnumeration(tuple(elements), False)
            table = {positions[j]: value_lists[j][idx[j]] for j in range(len(positions))}
            elements.append(ExtElement.from_table(shape, table))
            j = len(idx) - 1
            while j >= 0:
                idx[j] += 1
                if idx[j] < len(value_lists[j]):
                    break
                idx[j] = 0
                j -= 1
            else:
                break
    return ExtEnumeration(tuple(elements), complete)


def extend_mor(c: Container, f: FamilyMorphism, e: ExtElement) -> ExtElement:
    """Functorial action on morphisms: keep the shape, post-compose payload."""

    def payload(i, p):
        return f.apply(i, _payload_value(e, i, p))

    return ExtElement(e.shape, payload)


def split_last(c: Container) -> SplitContainer:
    """Split off the last index as the recursion slot."""
    if len(c.indices) == 0:
        raise ElaborationError("cannot split a container with no indices")
    *front, last = c.indices.names
    base = Container(IndexSet(tuple(front)), c.shapes,
                     lambda i, s, _pos=c.pos: _pos(i, s))

    def q(s, _pos=c.pos, _last=last):
        return _pos(_last, s)

    return SplitContainer(base, q)


@dataclass(frozen=True)
class EqResult:
    """Tri-state extensional equality verdict."""

    kind: str  # "equal" | "distinct" | "unknown-at-budget"
    witness: Optional[object] = None
    checked_positions: int = 0

    @property
    def is_equal(self):
        return self.kind == "equal"

    @property
    def is_distinct(self):
        return self.kind == "distinct"


def ext_equal(c: Container, x: FamilyAssignment, e1: ExtElement, e2: ExtElement,
              budget: Budget) -> EqResult:
    """Budgeted extensional equality of two extension elements.

    Both elements are assumed to pass `ext_contains`.  `distinct` always
    carries a witness: either the shape pair or the (index, position) where
    payloads differ.  `equal` requires the position enumeration to have been
    complete within budget; agreement on an incomplete enumeration yields
    `unknown-at-budget`.
    """
    if e1.shape != e2.shape:
        return EqResult("distinct", ("shape", e1.shape, e2.shape))
    checked = 0
    all_complete = True
    for i in c.indices:
        pos_enum = c.pos(i, e1.shape).enumerate(budget)
        if not pos_enum.complete:
            all_complete = False
        target = x.domain(i)
        for p in pos_enum:
            v1 = _payload_value(e1, i, p)
            v2 = _payload_value(e2, i, p)
            checked += 1
            if not target.values_equal(v1, v2):
                return EqResult("distinct", (i, p), checked)
    if all_complete:
        return EqResult("equal", None, checked)
    return EqResult("unknown-at-budget", None, checked)
