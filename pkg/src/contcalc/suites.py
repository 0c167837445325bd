"""Isomorphism suites: executable checks behind `check-iso` and the tests.

Each suite runs the defining round trips of a fixed point on one elaborated
declaration and reports one `CheckResult` per law.  The suites compare the
engine against the brute-force oracle through a structural bridge
(`reflect_mu_element`, `unroll_seed`) that translates engine elements into
the oracle's plain-tuple semantics.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from .core import (Container, ExtElement, FamilyAssignment, FamilyMorphism,
                   ext_enumerate, ext_equal)
from .domains import AtomsDom, Budget, path_budget
from .elaborator import (Decl, Exp, FunctorExpr, One, Param, Prod, Rec, Sum,
                         Zero, decl_split)
from .errors import EngineError
from .mfix import (Coalgebra, CoalgebraMachine, MachineRegistry, bisim_bounded,
                   bisim_exact, into_nu, nu_container, out, unfold)
from .oracle import SemValue, mu_iterate, nu_truncate
from .values import (AtomV, FinV, InlV, InrV, NatV, PairV, SeedV, TreeV, UNIT,
                     UnitV, Value, render)
from .wfix import (Algebra, fold, into, mu_container, out_of,
                   pos_enumerate_w, subelement)


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str = ""
    data: Optional[dict] = None


def _guarded(suite: str, name: str, fn) -> CheckResult:
    """Run one check; an engine error is a failure with the error as witness,
    not a crash of the whole suite."""
    try:
        return fn()
    except EngineError as exc:
        return CheckResult(suite, name, False, f"error: {exc}")


# ---------------------------------------------------------------------------
# Bridge: engine values/elements -> oracle semantic values.

def value_to_sem(v: Value) -> SemValue:
    if isinstance(v, UnitV):
        return ("unit",)
    if isinstance(v, AtomV):
        return ("atom", v.name)
    if isinstance(v, NatV):
        return ("nat", v.n)
    if isinstance(v, FinV):
        return ("fin", v.k, v.n)
    if isinstance(v, InlV):
        return ("inl", value_to_sem(v.value))
    if isinstance(v, InrV):
        return ("inr", value_to_sem(v.value))
    if isinstance(v, PairV):
        return ("pair", value_to_sem(v.fst), value_to_sem(v.snd))
    raise TypeError(f"no semantic counterpart for {v!r}")


def _reflect(e: FunctorExpr, shape: Value,
             here: Callable[[str, Value], SemValue],
             child: Callable[[Value], SemValue]) -> SemValue:
    """Translate one functor layer, tracking the position embeddings used by
    the container combinators (sums pass positions through, products and
    exponents tag them)."""
    if isinstance(e, One):
        return ("unit",)
    if isinstance(e, Zero):
        raise EngineError("no elements of the empty functor")
    if isinstance(e, Param):
        return here(e.name, UNIT)
    if isinstance(e, Rec):
        return ("rec", child(UNIT))
    if isinstance(e, Sum):
        if isinstance(shape, InlV):
            return ("inl", _reflect(e.left, shape.value, here, child))
        if isinstance(shape, InrV):
            return ("inr", _reflect(e.right, shape.value, here, child))
        raise EngineError(f"not a sum shape: {shape}")
    if isinstance(e, Prod):
        left = _reflect(e.left, shape.fst,
                        lambda i, p: here(i, InlV(p)),
                        lambda q: child(InlV(q)))
        right = _reflect(e.right, shape.snd,
                         lambda i, p: here(i, InrV(p)),
                         lambda q: child(InrV(q)))
        return ("pair", left, right)
    if isinstance(e, Exp):
        k = len(e.domain.enumerate_all())
        return ("table", tuple(_reflect_power(e.body, shape, here, child, k)))
    raise TypeError(f"not a functor expression: {e!r}")


def _reflect_power(body, shape, here, child, k) -> List[SemValue]:
    if k == 0:
        return []
    if k == 1:
        return [_reflect(body, shape, here, child)]
    head = _reflect(body, shape.fst,
                    lambda i, p: here(i, InlV(p)),
                    lambda q: child(InlV(q)))
    rest = _reflect_power(body, shape.snd,
                          lambda i, p: here(i, InrV(p)),
                          lambda q: child(InrV(q)), k - 1)
    return [head] + rest


def reflect_mu_element(body: FunctorExpr, e: ExtElement) -> SemValue:
    """Least-fixed-point elements as oracle terms (payloads included)."""
    layer = out_of(e)
    return _reflect(
        body, layer.shape,
        lambda i, p: value_to_sem(layer.params(i, p)),
        lambda q: reflect_mu_element(body, subelement(e, q)))


def unroll_seed(body: FunctorExpr, seed: SeedV, depth: int,
                sem_x: Dict[str, List[SemValue]]) -> SemValue:
    """Depth-bounded unrolling of a seed as an oracle term.

    Parameters are filled from `sem_x` (use singleton families so that
    unrollings coincide exactly when the trees are depth-bisimilar); the
    truncation marker replaces children once the depth is spent.  An
    unrolling of depth k exposes shapes along paths of at most k-1 steps,
    matching `nu_truncate(depth=k)` classes against `bisim_bounded(k-1)`.
    """
    if depth == 0:
        return ("?",)
    shape, _ = seed.step()
    return _reflect(
        body, shape,
        lambda i, p: sem_x[i][0],
        lambda q: unroll_seed(body, seed.child(q), depth - 1, sem_x))


# ---------------------------------------------------------------------------
# Canonical fixture machines for a nu declaration.

def fixture_machines(d: Decl, registry: MachineRegistry) -> List[CoalgebraMachine]:
    """Small deterministic machines over a declaration's signature:
    a stuck machine on the first childless shape, a self-loop and a 2-cycle
    on the first branching shape."""
    f = decl_split(d)
    shapes = f.base.shapes.enumerate(Budget(size=8, count=256)).values
    terminal = next((s for s in shapes if f.q(s).is_empty()), None)
    branching = next((s for s in shapes if not f.q(s).is_empty()), None)
    machines = []
    if terminal is not None:
        machines.append(registry.register(CoalgebraMachine(
            f"{d.name}-stuck", f, {"s0": (terminal, ())})))
    if branching is not None:
        qs = f.q(branching).enumerate_all().values
        machines.append(registry.register(CoalgebraMachine(
            f"{d.name}-loop", f,
            {"s0": (branching, tuple((q, "s0") for q in qs))})))
        machines.append(registry.register(CoalgebraMachine(
            f"{d.name}-swing", f,
            {"s0": (branching, tuple((q, "s1") for q in qs)),
             "s1": (branching, tuple((q, "s0") for q in qs))})))
        if terminal is not None:
            machines.append(registry.register(CoalgebraMachine(
                f"{d.name}-once", f,
                {"s0": (branching, tuple((q, "s1") for q in qs)),
                 "s1": (terminal, ())})))
    return machines


def _const_payload(x: FamilyAssignment):
    first = {i: x.domain(i).enumerate(Budget(size=4, count=1)).values
             for i in x.assign}

    def payload(i, path):
        vals = first[i]
        if not vals:
            raise EngineError(f"family {i} is empty")
        return vals[0]

    return payload


# ---------------------------------------------------------------------------
# Mu suite.

def _size_algebra(f) -> Algebra:
    from .domains import NatDom

    def act(shape, params, rec):
        total = 1
        for q in f.q(shape).enumerate_all():
            total += rec(q).n
        return NatV(total)

    return Algebra(NatDom(), act)


def run_mu_suite(d: Decl, x: FamilyAssignment,
                 sem_x: Dict[str, List[SemValue]],
                 height: int = 4, seed: int = 0,
                 container: Optional[Container] = None) -> List[CheckResult]:
    suite = f"mu:{d.name}"
    f = decl_split(d)
    cont = container if container is not None else mu_container(f)
    budget = Budget(size=height)
    elements = ext_enumerate(cont, x, budget)

    def adequacy():
        heights = list(range(1, height + 1))
        engine_counts, oracle_counts = [], []
        for h in heights:
            engine_counts.append(len(ext_enumerate(cont, x, Budget(size=h))))
            oracle_counts.append(len(mu_iterate(d.body, sem_x, h)))
        ok = engine_counts == oracle_counts
        detail = (f"counts by height {heights}: engine {engine_counts}, "
                  f"oracle {oracle_counts}")
        if ok:
            got = sorted(repr(reflect_mu_element(d.body, e)) for e in elements)
            want = sorted(repr(s) for s in mu_iterate(d.body, sem_x, height))
            ok = got == want
            if not ok:
                detail = "element translation does not match oracle enumeration"
        return CheckResult(suite, "oracle-adequacy", ok, detail,
                           data={"heights": heights, "engine": engine_counts,
                                 "oracle": oracle_counts})

    def lambek():
        for e in elements:
            eq = ext_equal(cont, x, into(f, x, out_of(e)), e, budget)
            if not eq.is_equal:
                return CheckResult(suite, "lambek-roundtrip", False,
                                   f"into(out_of(e)) != e at {render(e.shape)}: "
                                   f"{eq.kind}, witness {eq.witness}")
        return CheckResult(suite, "lambek-roundtrip", True,
                           f"{len(elements)} elements")

    def fold_square():
        alg = _size_algebra(f)
        for e in elements:
            layer = out_of(e)
            lhs = fold(f, x, alg, into(f, x, layer))
            rhs = alg.act(layer.shape, layer.params,
                          lambda q: fold(f, x, alg, subelement(e, q)))
            if lhs != rhs:
                return CheckResult(suite, "fold-square", False,
                                   f"fold square broken at {render(e.shape)}")
        return CheckResult(suite, "fold-square", True, f"{len(elements)} elements")

    def path_count():
        def node_sum(tree: TreeV, index: str) -> int:
            total = len(f.base.pos(index, tree.shape).enumerate_all())
            return total + sum(node_sum(sub, index) for _, sub in tree.children)

        for e in elements:
            for i in cont.indices:
                got = len(pos_enumerate_w(e.shape, i, f))
                want = node_sum(e.shape, i)
                if got != want:
                    return CheckResult(
                        suite, "path-count", False,
                        f"{render(e.shape)} index {i}: {got} != {want}")
        return CheckResult(suite, "path-count", True, f"{len(elements)} trees")

    return [
        _guarded(suite, "oracle-adequacy", adequacy),
        _guarded(suite, "lambek-roundtrip", lambek),
        _guarded(suite, "fold-square", fold_square),
        _guarded(suite, "path-count", path_count),
        _guarded(suite, "functor-laws",
                 lambda: _functor_law_check(suite, cont, x, list(elements),
                                            budget, seed)),
    ]


def _functor_law_check(suite, cont, x, pool, budget, seed,
                       samples: int = 50) -> CheckResult:
    if not pool:
        return CheckResult(suite, "functor-laws", True, "no elements to sample")
    rng = random.Random(seed)
    ident = FamilyMorphism.identity(cont.indices)

    def scramble(tag):
        def mk(i):
            dom = x.domain(i)
            vals = dom.enumerate(Budget(size=6, count=64)).values
            if not vals:
                return lambda v: v
            rolled = {v: vals[(j + tag) % len(vals)] for j, v in enumerate(vals)}
            return lambda v, _m=rolled: _m.get(v, v)
        return FamilyMorphism({i: mk(i) for i in cont.indices})

    g1, g2 = scramble(1), scramble(2)
    from .core import extend_mor
    for _ in range(samples):
        e = rng.choice(pool)
        eq = ext_equal(cont, x, extend_mor(cont, ident, e), e, budget)
        if eq.is_distinct:
            return CheckResult(suite, "functor-laws", False,
                               f"identity law broken at {render(e.shape)}")
        lhs = extend_mor(cont, g1.compose(g2), e)
        rhs = extend_mor(cont, g1, extend_mor(cont, g2, e))
        eq = ext_equal(cont, x, lhs, rhs, budget)
        if eq.is_distinct:
            return CheckResult(suite, "functor-laws", False,
                               f"composition law broken at {render(e.shape)}")
    return CheckResult(suite, "functor-laws", True, f"{samples} samples")


# ---------------------------------------------------------------------------
# Nu suite.

def run_nu_suite(d: Decl, x: FamilyAssignment,
                 sem_x: Dict[str, List[SemValue]],
                 depth: int = 8,
                 registry: Optional[MachineRegistry] = None) -> List[CheckResult]:
    suite = f"nu:{d.name}"
    reg = registry if registry is not None else MachineRegistry()
    f = decl_split(d)
    cont = nu_container(f, reg)
    machines = fixture_machines(d, reg)
    seeds = [m.seed(st) for m in machines for st in m.states]
    budget = path_budget(depth)
    payload = _const_payload(x)

    def lambek():
        for s in seeds:
            e = ExtElement(s, payload)
            back = into_nu(f, x, out(f, x, e), reg)
            eq = ext_equal(cont, x, back, e, budget)
            if eq.is_distinct:
                return CheckResult(suite, "lambek-roundtrip", False,
                                   f"round trip broke at {render(s)}: {eq.witness}")
        return CheckResult(suite, "lambek-roundtrip", True,
                           f"{len(seeds)} seeds at depth {depth}")

    def child_law():
        checked = 0
        for m in machines:
            co = _machine_coalgebra(m, x)
            for st in m.states:
                y = AtomV(st)
                root = unfold(f, x, co, y, reg)
                _, tbl = root.shape.step()
                for q, _ in tbl:
                    child = root.shape.child(q)
                    direct = unfold(f, x, co, co.bh(y, q), reg)
                    checked += 1
                    if child.presentation() != direct.shape.presentation():
                        return CheckResult(suite, "unfold-child-law", False,
                                           f"child law broke at {st}, {render(q)}")
        return CheckResult(suite, "unfold-child-law", True, f"{checked} child edges")

    def bisim_agreement():
        total_states = sum(len(m.states) for m in machines)
        for s0 in seeds:
            for s1 in seeds:
                exact = bisim_exact(s0, s1)
                bounded = bisim_bounded(s0, s1, total_states)
                if exact.is_equal != (not bounded.is_distinct):
                    return CheckResult(
                        suite, "bisim-agreement", False,
                        f"bounded/exact disagree on {render(s0)} vs {render(s1)}")
        return CheckResult(suite, "bisim-agreement", True, f"{len(seeds) ** 2} pairs")

    def truncation_classes():
        singleton = {i: sem[:1] for i, sem in sem_x.items()}
        k = min(depth, 4)
        classes = nu_truncate(d.body, singleton, k + 1)
        data = {"depth": k, "classes": len(classes)}
        for s0 in seeds:
            u0 = unroll_seed(d.body, s0, k + 1, singleton)
            if u0 not in classes:
                return CheckResult(suite, "truncation-classes", False,
                                   f"unrolling of {render(s0)} not an oracle class",
                                   data)
            for s1 in seeds:
                u1 = unroll_seed(d.body, s1, k + 1, singleton)
                agree = not bisim_bounded(s0, s1, k).is_distinct
                if agree != (u0 == u1):
                    return CheckResult(
                        suite, "truncation-classes", False,
                        f"depth-{k} classes disagree on {render(s0)} vs "
                        f"{render(s1)}", data)
        return CheckResult(suite, "truncation-classes", True,
                           f"{len(seeds)} seeds, depth {k}", data)

    def pos_growth():
        depths = list(range(depth + 1))
        curves = {}
        for s in seeds[:6]:
            counts = []
            for k2 in depths:
                total = 0
                for i in cont.indices:
                    total += len(cont.pos(i, s).enumerate(path_budget(k2)))
                counts.append(total)
            curves[render(s)] = counts
        monotone = all(all(a <= b for a, b in zip(c, c[1:]))
                       for c in curves.values())
        return CheckResult(suite, "pos-growth", monotone, f"{len(curves)} seeds",
                           data={"depths": depths, "curves": curves})

    return [
        _guarded(suite, "lambek-roundtrip", lambek),
        _guarded(suite, "unfold-child-law", child_law),
        _guarded(suite, "bisim-agreement", bisim_agreement),
        _guarded(suite, "truncation-classes", truncation_classes),
        _guarded(suite, "pos-growth", pos_growth),
    ]


def _machine_coalgebra(m: CoalgebraMachine, x: FamilyAssignment) -> Coalgebra:
    """A coalgebra on a machine's state set with constant parameter payloads."""
    payload = _const_payload(x)

    def bs(y):
        return m.step(y.name)[0]

    def bg(y, i, p):
        return payload(i, None)

    def bh(y, q):
        _, tbl = m.step(y.name)
        for key, nxt in tbl:
            if key == q:
                return AtomV(nxt)
        raise KeyError(q)

    return Coalgebra(AtomsDom(m.states), bs, bg, bh, name=m.name)


def run_decl_suite(d: Decl, x: FamilyAssignment,
                   sem_x: Dict[str, List[SemValue]],
                   height: int = 4, depth: int = 8,
                   registry: Optional[MachineRegistry] = None) -> List[CheckResult]:
    if d.fixity == "mu":
        return run_mu_suite(d, x, sem_x, height=height)
    return run_nu_suite(d, x, sem_x, depth=depth, registry=registry)
