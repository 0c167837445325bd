"""The closed universe of object-level domains.

A `Domain` supports three things: exact membership, deterministic budgeted
enumeration, and value equality.  Enumeration is *stratified*: values are
produced in order of increasing intrinsic size (see `values.value_size`),
and within one size stratum in structural order (left injections before
right, numerics ascending, pairs lexicographically).  Stratification is what
makes enumeration prefix-monotone in the budget: growing either budget bound
only ever appends values.

A `Budget` bounds both the size of enumerated values and how many are
produced.  Enumerations report whether they are complete, so callers can
distinguish "all of a finite domain" from "a prefix of an infinite one";
truncation is never silent.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Tuple

from .errors import DomainError
from .values import (
    UNIT, AtomV, FinV, InlV, InrV, NatV, PairV, PathV, SeedV, TreeV, Value,
    value_size,
)


@dataclass(frozen=True)
class Budget:
    """Enumeration budget: per-value size bound and total count bound.

    `count=None` means unbounded count.  Both bounds are always respected.
    """

    size: int
    count: Optional[int] = None

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("budget size must be >= 0")
        if self.count is not None and self.count < 0:
            raise ValueError("budget count must be >= 0")


def path_budget(depth: int, count: Optional[int] = None) -> Budget:
    """Budget admitting paths with at most `depth` child steps."""
    return Budget(size=depth + 1, count=count)


@dataclass(frozen=True)
class Enumeration:
    values: Tuple[Value, ...]
    complete: bool

    def __iter__(self) -> Iterator[Value]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


class Domain:
    """Base class.  Subclasses implement `at_size`, `contains`, `max_size`."""

    def contains(self, v: Value) -> bool:
        raise NotImplementedError

    def at_size(self, s: int) -> Tuple[Value, ...]:
        """All domain values of intrinsic size exactly `s`, in canonical order."""
        raise NotImplementedError

    def max_size(self) -> Optional[int]:
        """Largest value size in the domain, or None if unbounded/unknown."""
        raise NotImplementedError

    def enumerate(self, budget: Budget) -> Enumeration:
        out = []
        complete = True
        top = budget.size
        ms = self.max_size()
        if ms is not None:
            top = min(top, ms)
        for s in range(1, top + 1):
            for v in self.at_size(s):
                if budget.count is not None and len(out) >= budget.count:
                    return Enumeration(tuple(out), False)
                out.append(v)
        if ms is None or ms > budget.size:
            # There may be values beyond the size bound; only certify
            # completeness when the bound provably covers the domain.
            complete = ms is not None and ms <= budget.size
        return Enumeration(tuple(out), complete)

    def enumerate_all(self) -> Enumeration:
        ms = self.max_size()
        if ms is None:
            raise DomainError(f"{self!r} is not exhaustively enumerable")
        return self.enumerate(Budget(size=ms))

    def values_equal(self, a: Value, b: Value) -> bool:
        """Semantic equality of two domain members (bisimilarity for seeds)."""
        return a == b

    def is_finite(self) -> Optional[bool]:
        ms = self.max_size()
        if ms is None:
            return None
        return True

    def is_empty(self) -> bool:
        ms = self.max_size()
        if ms is None:
            return False
        return len(self.enumerate_all()) == 0


@dataclass(frozen=True)
class EmptyDom(Domain):
    def contains(self, v):
        return False

    def at_size(self, s):
        return ()

    def max_size(self):
        return 0

    def is_empty(self):
        return True


@dataclass(frozen=True)
class UnitDom(Domain):
    def contains(self, v):
        return v == UNIT

    def at_size(self, s):
        return (UNIT,) if s == 1 else ()

    def max_size(self):
        return 1


@dataclass(frozen=True)
class FinDom(Domain):
    n: int

    def contains(self, v):
        return isinstance(v, FinV) and v.n == self.n and 0 <= v.k < self.n

    def at_size(self, s):
        if s != 1:
            return ()
        return tuple(FinV(k, self.n) for k in range(self.n))

    def max_size(self):
        return 1 if self.n > 0 else 0


@dataclass(frozen=True)
class NatDom(Domain):
    def contains(self, v):
        return isinstance(v, NatV)

    def at_size(self, s):
        return (NatV(s - 1),)

    def max_size(self):
        return None


@dataclass(frozen=True)
class AtomsDom(Domain):
    names: Tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("atom names must be distinct")

    def contains(self, v):
        return isinstance(v, AtomV) and v.name in self.names

    def at_size(self, s):
        if s != 1:
            return ()
        return tuple(AtomV(n) for n in self.names)

    def max_size(self):
        return 1 if self.names else 0


@dataclass(frozen=True)
class SumDom(Domain):
    left: Domain
    right: Domain

    def contains(self, v):
        if isinstance(v, InlV):
            return self.left.contains(v.value)
        if isinstance(v, InrV):
            return self.right.contains(v.value)
        return False

    def at_size(self, s):
        if s < 2:
            return ()
        return tuple(InlV(v) for v in self.left.at_size(s - 1)) + \
            tuple(InrV(v) for v in self.right.at_size(s - 1))

    def max_size(self):
        ml, mr = self.left.max_size(), self.right.max_size()
        if ml is None or mr is None:
            return None
        return 1 + max(ml, mr) if max(ml, mr) > 0 else 0

    def is_empty(self):
        return self.left.is_empty() and self.right.is_empty()


@dataclass(frozen=True)
class ProdDom(Domain):
    left: Domain
    right: Domain

    def contains(self, v):
        return isinstance(v, PairV) and self.left.contains(v.fst) \
            and self.right.contains(v.snd)

    def at_size(self, s):
        out = []
        for i in range(1, s - 1):
            rights = self.right.at_size(s - 1 - i)
            if not rights:
                continue
            for a in self.left.at_size(i):
                for b in rights:
                    out.append(PairV(a, b))
        return tuple(out)

    def max_size(self):
        if self.is_empty():
            return 0
        ml, mr = self.left.max_size(), self.right.max_size()
        if ml is None or mr is None:
            return None
        return 1 + ml + mr

    def is_empty(self):
        return self.left.is_empty() or self.right.is_empty()


@dataclass(frozen=True)
class AnyDom(Domain):
    """Universal domain: membership always holds, enumeration unavailable.

    Used for algebra carriers that hold arbitrary computed values (e.g.
    accumulated pair-lists) where only membership checks are wanted.
    """

    def contains(self, v):
        return isinstance(v, Value)

    def at_size(self, s):
        raise DomainError("universal domain is not enumerable")

    def max_size(self):
        return None

    def enumerate(self, budget):
        raise DomainError("universal domain is not enumerable")


class WTreeDom(Domain):
    """Well-founded trees over a shape domain and a position family.

    The intrinsic size of a tree is its height, so a budget of size H
    enumerates exactly the trees of height <= H; this matches iterating the
    underlying signature functor H times from the empty set.  When the shape
    domain is infinite, strata additionally bound the shape sizes occurring
    in the tree and the enumeration is never complete.
    """

    def __init__(self, shapes: Domain, q_of: Callable[[Value], Domain]):
        self.shapes = shapes
        self.q_of = q_of
        self._lock = threading.Lock()
        self._strata: dict = {}

    def __repr__(self):
        return f"WTreeDom({self.shapes!r})"

    def _shape_list(self, cap: Optional[int]):
        if cap is None:
            return self.shapes.enumerate_all().values
        return self.shapes.enumerate(Budget(size=cap)).values

    def _bounded(self, h: int, cap: Optional[int]) -> Tuple[TreeV, ...]:
        """Trees of height <= h; cap (if given) bounds node shape sizes."""
        if h <= 0:
            return ()
        key = (h, cap)
        with self._lock:
            if key in self._strata:
                return self._strata[key]
        smaller = self._bounded(h - 1, cap)
        out = []
        for shape in self._shape_list(cap):
            if cap is not None and value_size(shape) > cap:
                continue
            qdom = self.q_of(shape)
            qs = qdom.enumerate_all().values  # finite positions required
            if not qs:
                out.append(TreeV(shape, ()))
                continue
            if not smaller:
                continue
            def build(idx, acc):
                if idx == len(qs):
                    out.append(TreeV(shape, tuple(acc)))
                    return
                for sub in smaller:
                    acc.append((qs[idx], sub))
                    build(idx + 1, acc)
                    acc.pop()
            build(0, [])
        result = tuple(out)
        with self._lock:
            self._strata[key] = result
        return result

    def at_size(self, s):
        if s <= 0:
            return ()
        if self.shapes.max_size() is not None:
            # Finite shape domain: strata are pure tree heights.
            prev = set(self._bounded(s - 1, None))
            return tuple(t for t in self._bounded(s, None) if t not in prev)
        prev = set(self._bounded(s - 1, s - 1))
        return tuple(t for t in self._bounded(s, s) if t not in prev)

    def contains(self, v):
        if not isinstance(v, TreeV):
            return False
        if not self.shapes.contains(v.shape):
            return False
        qs = self.q_of(v.shape).enumerate_all().values
        keys = tuple(q for q, _ in v.children)
        if keys != qs:
            return False
        return all(self.contains(sub) for _, sub in v.children)

    def max_size(self):
        ms = self.shapes.max_size()
        if ms is None:
            return None
        shapes = self._shape_list(None)
        if not shapes:
            return 0
        if all(self.q_of(s).is_empty() for s in shapes):
            return 1
        return None

    def is_empty(self):
        if self.shapes.max_size() is None:
            return False  # not provably empty
        return len(self._bounded(1, None)) == 0


class MachineDom(Domain):
    """All seeds of machines registered for one signature.

    The domain reflects the registry at enumeration time (the registry is
    append-only).  Value equality is exact bisimilarity, inherited from the
    seeds themselves.
    """

    def __init__(self, registry, split):
        self.registry = registry
        self.split = split

    def __repr__(self):
        return f"MachineDom({self.registry!r})"

    def _seeds(self):
        out = []
        for machine in self.registry.machines():
            if machine.split is not self.split:
                continue
            for state in machine.states:
                out.append(SeedV(machine, state))
        return out

    def contains(self, v):
        if not isinstance(v, SeedV):
            return False
        return self.registry.has(v.machine) and v.machine.split is self.split \
            and v.state in v.machine.states

    def at_size(self, s):
        return tuple(self._seeds()) if s == 1 else ()

    def max_size(self):
        return 1


def _anchor_step(anchor: Value):
    """Uniform destructor for path anchors: shape plus child lookup."""
    if isinstance(anchor, TreeV):
        return anchor.shape, dict(anchor.children)
    if isinstance(anchor, SeedV):
        shape, table = anchor.step()
        return shape, {q: SeedV(anchor.machine, st) for q, st in table}
    raise DomainError(f"not a path anchor: {anchor!r}")


class PosDom(Domain):
    """Finite paths into an anchored tree or seed, for one index.

    A path of k steps has size k+1, so a budget of size B covers paths of at
    most B-1 child steps.  Over a well-founded tree the domain is finite and
    enumeration is complete; over a seed whose reachable graph has a cycle it
    is reported incomplete past the budget.
    """

    def __init__(self, tag: str, index: str, anchor: Value,
                 p_of: Callable[[str, Value], Domain]):
        self.tag = tag  # "mu" | "nu"
        self.index = index
        self.anchor = anchor
        self.p_of = p_of

    def __repr__(self):
        return f"PosDom({self.tag}, {self.index}, {self.anchor})"

    def _nodes_at_depth(self, depth: int):
        """(steps, node) for every node at exactly `depth` steps, DFS order."""
        level = [((), self.anchor)]
        for _ in range(depth):
            nxt = []
            for steps, node in level:
                _, children = _anchor_step(node)
                for q, sub in children.items():
                    nxt.append((steps + (q,), sub))
            level = nxt
        return level

    def at_size(self, s):
        if s <= 0:
            return ()
        out = []
        for steps, node in self._nodes_at_depth(s - 1):
            shape, _ = _anchor_step(node)
            for p in self.p_of(self.index, shape).enumerate_all().values:
                out.append(PathV(steps, self.index, p))
        return tuple(out)

    def contains(self, v):
        if not isinstance(v, PathV) or v.index != self.index:
            return False
        node = self.anchor
        for q in v.steps:
            _, children = _anchor_step(node)
            if q not in children:
                return False
            node = children[q]
        shape, _ = _anchor_step(node)
        return self.p_of(self.index, shape).contains(v.final)

    def max_size(self):
        if isinstance(self.anchor, TreeV):
            return self.anchor.height()
        # Seed anchor: bounded iff the reachable graph is acyclic.
        machine = self.anchor.machine
        depth = _acyclic_depth(machine, self.anchor.state)
        if depth is None:
            return None
        return depth + 1


def _acyclic_depth(machine, state) -> Optional[int]:
    """Longest step count reachable from `state`, or None if cyclic."""
    memo: dict = {}
    ACTIVE = object()
    stack = [(state, 0)]
    while stack:
        cur, phase = stack.pop()
        _, table = machine.step(cur)
        if phase == 0:
            if cur in memo:
                continue
            memo[cur] = ACTIVE
            stack.append((cur, 1))
            for _, nxt in table:
                if memo.get(nxt) is ACTIVE:
                    return None  # back edge: cycle
                if nxt not in memo:
                    stack.append((nxt, 0))
        else:
            depths = [memo[nxt] for _, nxt in table]
            if any(d is ACTIVE for d in depths):
                return None
            memo[cur] = 1 + max(depths, default=-1)
    return memo[state]
