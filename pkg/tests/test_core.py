"""Container extension: membership, enumeration, morphisms, equality."""
import pytest
from hypothesis import given, settings, strategies as st

import contcalc as cc
from contcalc.oracle import atoms, mu_iterate

from conftest import inf_machine


def nat_sig_container():
    """S = unit + unit over one index; inl has no positions, inr has one."""
    return cc.Container(
        cc.IndexSet(("i",)), cc.SumDom(cc.UnitDom(), cc.UnitDom()),
        lambda i, s: cc.EmptyDom() if isinstance(s, cc.InlV) else cc.UnitDom())


def nat_fin_container():
    """The list container: shapes are naturals, positions finite sets."""
    return cc.Container(cc.IndexSet(("A",)), cc.NatDom(),
                        lambda i, s: cc.FinDom(s.n))


def red_element(n=3, names=("r", "e", "d")):
    table = {("A", cc.FinV(k, n)): cc.AtomV(names[k]) for k in range(n)}
    return cc.ExtElement.from_table(cc.NatV(n), table)


def test_ext_contains_zero_encoding():
    c = nat_sig_container()
    x = cc.FamilyAssignment({"i": cc.AtomsDom(("t",))})
    e = cc.ExtElement.from_table(cc.InlV(cc.UNIT), {})
    assert cc.ext_contains(c, x, e, cc.Budget(4))


def test_ext_contains_list_red():
    c = nat_fin_container()
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("r", "e", "d"))})
    assert cc.ext_contains(c, x, red_element(), cc.Budget(8))


def test_ext_contains_missing_position_is_an_error():
    c = nat_fin_container()
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("r", "e", "d"))})
    table = {("A", cc.FinV(0, 3)): cc.AtomV("r"), ("A", cc.FinV(1, 3)): cc.AtomV("e")}
    e = cc.ExtElement.from_table(cc.NatV(3), table)
    with pytest.raises(cc.PayloadError) as err:
        cc.ext_contains(c, x, e, cc.Budget(8))
    assert err.value.index == "A"
    assert err.value.position == cc.FinV(2, 3)


def test_ext_contains_wrong_domain_value_is_an_error():
    c = nat_fin_container()
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("r",))})
    e = cc.ExtElement.from_table(cc.NatV(1), {("A", cc.FinV(0, 1)): cc.NatV(9)})
    with pytest.raises(cc.PayloadError):
        cc.ext_contains(c, x, e, cc.Budget(8))


def test_ext_contains_rejects_non_shape():
    c = nat_sig_container()
    x = cc.FamilyAssignment({"i": cc.AtomsDom(("t",))})
    e = cc.ExtElement.from_table(cc.NatV(0), {})
    assert not cc.ext_contains(c, x, e, cc.Budget(4))


def test_ext_enumerate_terminal_container():
    c = cc.Container(cc.IndexSet(("i",)), cc.UnitDom(), lambda i, s: cc.EmptyDom())
    x = cc.FamilyAssignment({"i": cc.AtomsDom(("a", "b"))})
    enum = cc.ext_enumerate(c, x, cc.Budget(4))
    assert len(enum) == 1 and enum.complete


def test_ext_enumerate_list_heights():
    # shapes nat:0..3 within size budget 4 -> 1 + 2 + 4 + 8 elements,
    # matching the oracle's iteration of the list signature
    c = nat_fin_container()
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("a", "b"))})
    enum = cc.ext_enumerate(c, x, cc.Budget(4))
    assert len(enum) == 15
    body = cc.parse_decl("mu List(A) = 1 + A * rec").body
    assert len(mu_iterate(body, {"A": atoms("a", "b")}, 4)) == len(enum)
    assert not enum.complete  # the shape domain goes on past the budget


def test_ext_enumerate_empty_shapes():
    c = cc.Container(cc.IndexSet(("i",)), cc.EmptyDom(), lambda i, s: cc.EmptyDom())
    x = cc.FamilyAssignment({"i": cc.UnitDom()})
    enum = cc.ext_enumerate(c, x, cc.Budget(4))
    assert len(enum) == 0 and enum.complete


def test_ext_enumerate_soundness_and_determinism():
    c = nat_fin_container()
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("a", "b"))})
    e1 = cc.ext_enumerate(c, x, cc.Budget(3))
    e2 = cc.ext_enumerate(c, x, cc.Budget(3))
    for a, b in zip(e1, e2):
        assert a.shape == b.shape
    for e in e1:
        assert cc.ext_contains(c, x, e, cc.Budget(3))
    # prefix monotone in the budget
    e3 = cc.ext_enumerate(c, x, cc.Budget(4))
    for a, b in zip(e1, e3):
        assert cc.ext_equal(c, x, a, b, cc.Budget(4)).is_equal


def test_extend_mor_identity_and_rename():
    c = nat_fin_container()
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("r", "e", "d", "R", "E", "D"))})
    e = red_element()
    ident = cc.FamilyMorphism.identity(c.indices)
    assert cc.ext_equal(c, x, cc.extend_mor(c, ident, e), e, cc.Budget(8)).is_equal
    upper = cc.FamilyMorphism({"A": lambda v: cc.AtomV(v.name.upper())})
    up = cc.extend_mor(c, upper, e)
    got = [up.payload("A", cc.FinV(k, 3)) for k in range(3)]
    assert got == [cc.AtomV("R"), cc.AtomV("E"), cc.AtomV("D")]


def test_extend_mor_composition_on_samples():
    c = nat_fin_container()
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("a", "b"))})
    pool = cc.ext_enumerate(c, x, cc.Budget(5)).elements
    f = cc.FamilyMorphism({"A": lambda v: cc.AtomV("b")})
    g = cc.FamilyMorphism({"A": lambda v: cc.AtomV("a" if v.name == "b" else "b")})
    assert len(pool) >= 31
    for e in pool:
        lhs = cc.extend_mor(c, f.compose(g), e)
        rhs = cc.extend_mor(c, f, cc.extend_mor(c, g, e))
        assert cc.ext_equal(c, x, lhs, rhs, cc.Budget(5)).is_equal


def test_split_last_list_signature(list_decl):
    body = cc.to_container(list_decl.body, cc.IndexSet(("A", "rec")))
    f = cc.split_last(body)
    assert f.base.indices.names == ("A",)
    nil, cons = f.base.shapes.enumerate_all().values
    assert len(f.base.pos("A", nil).enumerate_all()) == 0
    assert len(f.base.pos("A", cons).enumerate_all()) == 1
    assert len(f.q(nil).enumerate_all()) == 0
    assert len(f.q(cons).enumerate_all()) == 1


def test_split_last_unary_leaves_constant_base():
    c = nat_sig_container()
    f = cc.split_last(c)
    assert len(f.base.indices) == 0
    x = cc.FamilyAssignment({})
    enum = cc.ext_enumerate(f.base, x, cc.Budget(4))
    assert len(enum) == 2  # just the shapes


def test_split_last_rejects_zero_indices():
    c = cc.Container(cc.IndexSet(()), cc.UnitDom(), lambda i, s: cc.EmptyDom())
    with pytest.raises(cc.ElaborationError):
        cc.split_last(c)


def test_split_reassemble_round_trip(list_decl, x_ab):
    body = cc.to_container(list_decl.body, cc.IndexSet(("A", "rec")))
    back = cc.split_last(body).reassemble("rec")
    assert back.indices.names == body.indices.names
    x = cc.FamilyAssignment({"A": cc.AtomsDom(tuple(f"a{k}" for k in range(7))),
                             "rec": cc.AtomsDom(tuple(f"u{k}" for k in range(7)))})
    budget = cc.Budget(6)
    orig = cc.ext_enumerate(body, x, budget)
    re = cc.ext_enumerate(back, x, budget)
    assert len(orig) == len(re) == 50  # 1 + 7*7 elements, both complete
    assert orig.complete and re.complete
    for a, b in zip(orig, re):
        assert cc.ext_equal(body, x, a, b, budget).is_equal


def test_ext_equal_reflexive():
    c = nat_fin_container()
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("r", "e", "d"))})
    e = red_element()
    assert cc.ext_equal(c, x, e, e, cc.Budget(8)).is_equal


def test_ext_equal_distinct_with_witness():
    c = nat_fin_container()
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("r", "e", "d", "x"))})
    e1 = red_element()
    e2 = red_element(names=("r", "e", "x"))
    verdict = cc.ext_equal(c, x, e1, e2, cc.Budget(8))
    assert verdict.is_distinct
    assert verdict.witness == ("A", cc.FinV(2, 3))


def test_ext_equal_shape_mismatch_witness():
    c = nat_fin_container()
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("r",))})
    e1 = cc.ExtElement.from_table(cc.NatV(0), {})
    e2 = cc.ExtElement.from_table(cc.NatV(1), {("A", cc.FinV(0, 1)): cc.AtomV("r")})
    verdict = cc.ext_equal(c, x, e1, e2, cc.Budget(8))
    assert verdict.is_distinct and verdict.witness[0] == "shape"


def test_ext_equal_unknown_at_budget(natsig_paths, registry):
    """Two elements over the infinite tree that agree only within budget."""
    inf = inf_machine(natsig_paths, registry)
    nu = cc.nu_container(natsig_paths, registry)
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("a", "b"))})
    depth = 6

    def deep_payload(i, path):
        return cc.AtomV("a" if len(path.steps) <= depth else "b")

    e1 = cc.ExtElement(inf.seed(), lambda i, p: cc.AtomV("a"))
    e2 = cc.ExtElement(inf.seed(), deep_payload)
    verdict = cc.ext_equal(nu, x, e1, e2, cc.path_budget(depth))
    assert verdict.kind == "unknown-at-budget"
    assert verdict.checked_positions == depth + 1
    # a deeper budget exposes the difference with a witness
    deeper = cc.ext_equal(nu, x, e1, e2, cc.path_budget(depth + 2))
    assert deeper.is_distinct


@settings(max_examples=30)
@given(st.integers(0, 3), st.integers(0, 3))
def test_functor_identity_property(n, salt):
    c = nat_fin_container()
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("a", "b"))})
    pool = cc.ext_enumerate(c, x, cc.Budget(4)).elements
    e = pool[(n * 7 + salt) % len(pool)]
    ident = cc.FamilyMorphism.identity(c.indices)
    assert cc.ext_equal(c, x, cc.extend_mor(c, ident, e), e, cc.Budget(4)).is_equal
