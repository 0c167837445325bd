"""Least fixed points: well-founded trees, `into`, and the unique fold.

Given a split container (shapes S, parameter positions P, recursion
positions Q), the least fixed point of its functor in the last argument is
the container whose shapes are finite trees over (S, Q) and whose positions
are the finite paths into a tree.  `into` packs one functor layer into such
an element, `fold` is the unique mediating map out of it into any algebra,
and `uniqueness_probe` tests candidate maps against the defining square.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .core import Container, ExtElement, FamilyAssignment, PayloadFn, SplitContainer
from .domains import Budget, Domain, PosDom, WTreeDom
from .errors import ElaborationError, EngineError
from .values import PathV, TreeV, Value


@dataclass(frozen=True)
class FLayer:
    """One functor layer: shape, parameter payload, and per-Q-position
    children paired with their own payload oracles.

    This is the repackaged form of a functor application used by `into`,
    `out_of` and their greatest-fixed-point duals.
    """

    shape: Value
    params: PayloadFn
    children: Dict[Value, Tuple[Value, PayloadFn]]

    def child(self, q: Value):
        return self.children[q]


@dataclass(frozen=True)
class Algebra:
    """An algebra for the split functor: carrier plus structure map.

    `act(shape, params, rec)` receives the parameter payload oracle and a
    per-recursion-position lookup of already-computed carrier values.
    """

    carrier: Domain
    act: Callable[[Value, PayloadFn, Callable[[Value], Value]], Value]


@dataclass(frozen=True)
class FixedPointW:
    """The tree fixed point's structure isomorphism (sup/unsup)."""

    sup: Callable[[Value, Dict[Value, TreeV]], TreeV]
    unsup: Callable[[TreeV], Tuple[Value, Dict[Value, TreeV]]]


def sup_tree(f: SplitContainer, shape: Value, children: Dict[Value, TreeV]) -> TreeV:
    """Build a tree node, validating the child table against Q(shape)."""
    if not f.base.shapes.contains(shape):
        raise EngineError(f"not a shape: {shape}")
    qdom = f.q(shape)
    qs = qdom.enumerate_all().values
    missing = [q for q in qs if q not in children]
    if missing:
        raise EngineError(f"child table missing position {missing[0]}")
    extra = [q for q in children if q not in qs]
    if extra:
        raise EngineError(f"child table has stray position {extra[0]}")
    return TreeV(shape, tuple((q, children[q]) for q in qs))


def unsup_tree(t: TreeV) -> Tuple[Value, Dict[Value, TreeV]]:
    return t.shape, dict(t.children)


def tree_fixed_point(f: SplitContainer) -> FixedPointW:
    return FixedPointW(sup=lambda s, kids: sup_tree(f, s, kids),
                       unsup=unsup_tree)


def mu_container(f: SplitContainer) -> Container:
    """The least-fixed-point container: tree shapes, path positions.

    Rejects signatures whose recursion-position domain is not provably
    finite at some shape: children tables are eagerly materialised, and fold
    totality is structural on finite trees.
    """
    shapes_dom = f.base.shapes
    sample = shapes_dom.enumerate(Budget(size=6, count=64))
    for s in sample:
        if f.q(s).max_size() is None:
            raise ElaborationError(
                f"least fixed point needs finite recursion positions, "
                f"but they are unbounded at shape {s}")
    wdom = WTreeDom(shapes_dom, f.q)
    base_pos = f.base.pos

    def pos(i, w):
        return PosDom("mu", i, w, base_pos)

    return Container(f.base.indices, wdom, pos)


def into(f: SplitContainer, x: FamilyAssignment, layer: FLayer) -> ExtElement:
    """Pack a functor layer into an element of the fixed-point container.

    The resulting payload answers empty paths from the layer's parameter
    payload and pushes `below q` paths into the q-th child payload.
    """
    kids = {q: sub for q, (sub, _) in layer.children.items()}
    tree = sup_tree(f, layer.shape, kids)

    def payload(i, path):
        if not isinstance(path, PathV):
            raise KeyError(path)
        if not path.steps:
            return layer.params(i, path.final)
        q = path.steps[0]
        _, sub_payload = layer.children[q]
        return sub_payload(i, PathV(path.steps[1:], path.index, path.final))

    return ExtElement(tree, payload)


def out_of(e: ExtElement) -> FLayer:
    """Unpack one layer: the evident inverse of `into`."""
    tree = e.shape
    if not isinstance(tree, TreeV):
        raise EngineError(f"not a tree element: {tree}")

    def params(i, p):
        return e.payload(i, PathV((), i, p))

    children = {}
    for q, sub in tree.children:
        def sub_payload(i, path, _q=q):
            return e.payload(i, PathV((_q,) + path.steps, path.index, path.final))
        children[q] = (sub, sub_payload)
    return FLayer(tree.shape, params, children)


def subelement(e: ExtElement, q: Value) -> ExtElement:
    """The q-th immediate sub-element of a fixed-point element."""
    tree, payload = out_of(e).children[q]
    return ExtElement(tree, payload)


def fold(f: SplitContainer, x: FamilyAssignment, alg: Algebra,
         e: ExtElement) -> Value:
    """The unique algebra map out of the fixed point.

    Evaluated iteratively with an explicit post-order stack so tall trees do
    not hit the interpreter recursion limit.  At a node reached by steps
    `sigma`, the parameter payload seen by the algebra reads the element
    payload at path `sigma . here(i, p)`.
    """
    root = e.shape
    if not isinstance(root, TreeV):
        raise EngineError(f"not a tree element: {root}")
    k = e.payload
    results: Dict[int, Value] = {}

    # frames: (tree, steps, child results list, next child index)
    stack: List[list] = [[root, (), [], 0]]
    while stack:
        frame = stack[-1]
        tree, steps, child_vals, i = frame
        if i < len(tree.children):
            frame[3] += 1
            q, sub = tree.children[i]
            stack.append([sub, steps + (q,), [], 0])
            continue
        def params(ind, p, _steps=steps):
            return k(ind, PathV(_steps, ind, p))
        table = {q: child_vals[j] for j, (q, _) in enumerate(tree.children)}
        value = alg.act(tree.shape, params, lambda q, _t=table: _t[q])
        stack.pop()
        if stack:
            stack[-1][2].append(value)
        else:
            return value
    raise AssertionError("unreachable")


def into_algebra(f: SplitContainer, x: FamilyAssignment) -> Algebra:
    """The initial algebra's own structure map, as an `Algebra`.

    Folding with it rebuilds the element (up to payload extensionality);
    carrier membership is not domain-checked because the carrier is the
    extension itself.
    """
    from .domains import AnyDom

    def act(shape, params, rec):
        qdom = f.q(shape)
        children = {}
        for q in qdom.enumerate_all():
            sub = rec(q)
            children[q] = (sub.shape, sub.payload)
        return into(f, x, FLayer(shape, params, children))

    # Carrier values here are ExtElements, which only flow through `rec`;
    # AnyDom keeps the Algebra interface uniform.
    return Algebra(AnyDom(), act)


@dataclass(frozen=True)
class ProbeVerdict:
    consistent: bool
    witness: Optional[ExtElement] = None
    detail: str = ""


def uniqueness_probe(f: SplitContainer, x: FamilyAssignment, alg: Algebra,
                     candidate: Callable[[ExtElement], Value],
                     samples, budget: Budget = Budget(size=32)) -> ProbeVerdict:
    """Check a candidate map against the fold-defining square on samples.

    For every sample and every subtree of it, verifies
    candidate(into(layer)) == act(shape, params, candidate . children).
    If the square holds everywhere it follows by induction that the
    candidate agrees with `fold` on the samples, which is asserted; a square
    failure is returned with the offending element as witness.
    """
    eqd = alg.carrier

    def check(e: ExtElement):
        layer = out_of(e)
        for q in layer.children:
            sub = subelement(e, q)
            verdict = check(sub)
            if verdict is not None:
                return verdict
        via_square = alg.act(layer.shape, layer.params,
                             lambda q: candidate(subelement(e, q)))
        got = candidate(e)
        if not eqd.values_equal(got, via_square):
            return ProbeVerdict(False, e,
                                f"square broken: candidate gave {got}, "
                                f"algebra gave {via_square}")
        return None

    for e in samples:
        verdict = check(e)
        if verdict is not None:
            return verdict
    for e in samples:
        expected = fold(f, x, alg, e)
        got = candidate(e)
        if not eqd.values_equal(got, expected):
            raise AssertionError(
                "square held on all subtrees but candidate disagrees with "
                f"fold at {e.shape}: {got} vs {expected}")
    return ProbeVerdict(True)


def pos_enumerate_w(w: TreeV, index: str, f: SplitContainer) -> Tuple[PathV, ...]:
    """All paths into a finite tree for one index, in shortlex order."""
    dom = PosDom("mu", index, w, f.base.pos)
    enum = dom.enumerate_all()
    assert enum.complete
    return enum.values
