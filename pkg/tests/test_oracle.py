"""The brute-force oracle's own arithmetic, validated by hand counts."""
import contcalc as cc
from contcalc.elaborator import One, Zero
from contcalc.oracle import atoms, mu_iterate, nu_truncate, semantic_enumerate


LIST_BODY = cc.parse_decl("mu List(A) = 1 + A * rec").body
NAT_BODY = cc.parse_decl("mu Nat() = 1 + rec").body
CONAT_BODY = cc.parse_decl("nu CoNat() = 1 + rec").body


def test_semantic_enumerate_list_body():
    rec_set = [("atom", "u"), ("atom", "v"), ("atom", "w")]
    out = semantic_enumerate(LIST_BODY, {"A": atoms("a", "b")}, rec_set)
    assert len(out) == 1 + 2 * 3  # nil, plus |A| * |rec| conses
    assert out[0] == ("inl", ("unit",))
    assert ("inr", ("pair", ("atom", "a"), ("rec", ("atom", "u")))) in out


def test_semantic_enumerate_zero_and_one():
    assert semantic_enumerate(Zero(), {}, [("atom", "u")]) == []
    assert semantic_enumerate(One(), {}, []) == [("unit",)]


def test_mu_iterate_list():
    assert len(mu_iterate(LIST_BODY, {"A": atoms("a", "b")}, 4)) == 15  # 1+2+4+8
    assert len(mu_iterate(LIST_BODY, {"A": atoms("a", "b", "c")}, 3)) == 13  # 1+3+9


def test_mu_iterate_nat_and_base():
    assert len(mu_iterate(NAT_BODY, {}, 3)) == 3
    assert mu_iterate(LIST_BODY, {"A": atoms("a")}, 0) == []


def test_mu_iterate_monotone_and_stabilising():
    sets = [set(mu_iterate(LIST_BODY, {"A": atoms("a")}, h)) for h in range(6)]
    for small, big in zip(sets, sets[1:]):
        assert small <= big
    finite = cc.parse_decl("mu T(A) = A").body  # no recursion: stabilises
    assert mu_iterate(finite, {"A": atoms("a", "b")}, 1) == \
        mu_iterate(finite, {"A": atoms("a", "b")}, 5)


def test_nu_truncate_conat_classes():
    assert len(nu_truncate(CONAT_BODY, {}, 0)) == 1
    assert nu_truncate(CONAT_BODY, {}, 1) == \
        [("inl", ("unit",)), ("inr", ("rec", ("?",)))]
    assert len(nu_truncate(CONAT_BODY, {}, 3)) == 4  # 0, 1, 2, >=3


def test_oracle_agrees_with_engine_on_list(x_ab):
    cont = cc.elaborate(cc.parse_decl("mu List(A) = 1 + A * rec"))
    for h in (1, 2, 3, 4, 5):
        assert len(cc.ext_enumerate(cont, x_ab, cc.Budget(h))) == \
            len(mu_iterate(LIST_BODY, {"A": atoms("a", "b")}, h))
