"""Shared fixtures: signatures, machines and assignments used across tests."""
from __future__ import annotations

import pytest

import contcalc as cc


@pytest.fixture
def list_decl():
    return cc.parse_decl("mu List(A) = 1 + A * rec")


@pytest.fixture
def colist_decl():
    return cc.parse_decl("nu CoList(A) = 1 + A * rec")


@pytest.fixture
def conat_decl():
    return cc.parse_decl("nu CoNat() = 1 + rec")


@pytest.fixture
def x_ab():
    return cc.FamilyAssignment({"A": cc.AtomsDom(("a", "b"))})


@pytest.fixture
def x_red():
    return cc.FamilyAssignment({"A": cc.AtomsDom(("r", "e", "d"))})


def nat_signature(payload_positions: bool) -> cc.SplitContainer:
    """The two-constructor signature: shapes inl/inr unit, one child at inr.

    With `payload_positions` every shape carries one payload slot for the
    single index "A" (the configuration used by the path-counting examples);
    without, the position families are empty.
    """
    pdom = cc.UnitDom() if payload_positions else cc.EmptyDom()
    base = cc.Container(cc.IndexSet(("A",)),
                        cc.SumDom(cc.UnitDom(), cc.UnitDom()),
                        lambda i, s: pdom)
    return cc.SplitContainer(
        base, lambda s: cc.EmptyDom() if isinstance(s, cc.InlV) else cc.UnitDom())


@pytest.fixture
def natsig_paths():
    return nat_signature(payload_positions=True)


@pytest.fixture
def natsig_bare():
    return nat_signature(payload_positions=False)


INL = cc.InlV(cc.UNIT)
INR = cc.InrV(cc.UNIT)


def nat_chain_machine(n: int, f: cc.SplitContainer,
                      registry: cc.MachineRegistry) -> cc.CoalgebraMachine:
    """Machine presenting the natural number n: n inr-steps then inl."""
    table = {}
    for k in range(n, 0, -1):
        table[f"s{k}"] = (INR, ((cc.UNIT, f"s{k-1}"),))
    table["s0"] = (INL, ())
    return registry.register(cc.CoalgebraMachine(f"nat{n}", f, table))


def inf_machine(f: cc.SplitContainer, registry: cc.MachineRegistry,
                states: int = 1) -> cc.CoalgebraMachine:
    """Machine presenting the infinite tree: a cycle of inr states."""
    table = {}
    for k in range(states):
        table[f"z{k}"] = (INR, ((cc.UNIT, f"z{(k + 1) % states}"),))
    return registry.register(
        cc.CoalgebraMachine(f"inf{states}", f, table))


@pytest.fixture
def registry():
    return cc.MachineRegistry()


CONS = cc.InrV(cc.PairV(cc.UNIT, cc.UNIT))
NIL = cc.InlV(cc.UNIT)
CONS_Q = cc.InrV(cc.UNIT)       # the single child position of a cons node
CONS_P = cc.InlV(cc.UNIT)       # the single payload position of a cons node


def red_cycle_coalgebra() -> cc.Coalgebra:
    """The cyclic r -> e -> d -> r colist coalgebra (List signature)."""
    nxt = {"r": "e", "e": "d", "d": "r"}
    return cc.Coalgebra(
        cc.AtomsDom(("r", "e", "d")),
        bs=lambda y: CONS,
        bg=lambda y, i, p: y,
        bh=lambda y, q: cc.AtomV(nxt[y.name]),
        name="red")


def list_tree(n: int) -> cc.TreeV:
    """The shape tree of a length-n list."""
    tree = cc.TreeV(NIL, ())
    for _ in range(n):
        tree = cc.TreeV(CONS, ((CONS_Q, tree),))
    return tree


def list_element(atom_names) -> cc.ExtElement:
    """A concrete list element of the mu-List container from atom names."""
    tree = list_tree(len(atom_names))
    table = {}
    for j, name in enumerate(atom_names):
        path = cc.PathV((CONS_Q,) * j, "A", CONS_P)
        table[("A", path)] = cc.AtomV(name)
    return cc.ExtElement.from_table(tree, table)
