"""Suite runner: positive runs and the corrupted-container negative control."""
import contcalc as cc
from contcalc.oracle import atoms
from contcalc.suites import (fixture_machines, run_decl_suite, run_mu_suite,
                             run_nu_suite, unroll_seed)



SEM_AB = {"A": atoms("a", "b")}


def test_mu_suite_passes(list_decl, x_ab):
    results = run_mu_suite(list_decl, x_ab, SEM_AB, height=4)
    assert [r.name for r in results] == [
        "oracle-adequacy", "lambek-roundtrip", "fold-square",
        "path-count", "functor-laws"]
    assert all(r.passed for r in results)


def test_nu_suite_passes(colist_decl, x_ab):
    results = run_nu_suite(colist_decl, x_ab, SEM_AB, depth=8)
    assert all(r.passed for r in results), [r for r in results if not r.passed]


def test_nu_suite_conat(conat_decl):
    results = run_nu_suite(conat_decl, cc.FamilyAssignment({}), {}, depth=8)
    assert all(r.passed for r in results)


def test_run_decl_suite_dispatches(list_decl, conat_decl, x_ab):
    assert run_decl_suite(list_decl, x_ab, SEM_AB)[0].suite == "mu:List"
    assert run_decl_suite(conat_decl, cc.FamilyAssignment({}), {})[0].suite == \
        "nu:CoNat"


def test_corrupted_container_fails_with_witness(list_decl, x_ab):
    """Negative control: a container whose position family lies about one
    shape must be caught, with the offending check named."""
    f = cc.decl_split(list_decl)
    good = cc.mu_container(f)

    def lying_pos(i, w):
        dom = good.pos(i, w)
        if w.height() == 2:  # misreport positions of the singleton list
            return cc.SumDom(dom, cc.UnitDom())
        return dom

    corrupted = cc.Container(good.indices, good.shapes, lying_pos)
    results = run_mu_suite(list_decl, x_ab, SEM_AB, height=4,
                           container=corrupted)
    failed = [r for r in results if not r.passed]
    assert failed
    assert any(r.detail for r in failed)


def test_mu_suite_exponent_declaration():
    """F(X,Y) = (X+Y)^2 with |X|=2 grows 4, 36, 1444 under iteration."""
    d = cc.parse_decl("mu P(A) = [2] -> (A + rec)")
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("a", "b"))})
    results = run_mu_suite(d, x, SEM_AB, height=3)
    assert all(r.passed for r in results)
    adequacy = results[0]
    assert adequacy.data["engine"] == [4, 36, 1444]


def test_mu_suite_zero_functor():
    d = cc.parse_decl("mu Z() = 0")
    results = run_mu_suite(d, cc.FamilyAssignment({}), {}, height=4)
    assert all(r.passed for r in results)
    assert results[0].data["engine"] == [0, 0, 0, 0]


def test_nu_suite_branching_without_terminal():
    d = cc.parse_decl("nu T() = rec * rec")
    results = run_nu_suite(d, cc.FamilyAssignment({}), {}, depth=5)
    assert all(r.passed for r in results)
    d2 = cc.parse_decl("nu S(A) = A * rec")
    x = cc.FamilyAssignment({"A": cc.AtomsDom(("a", "b"))})
    results2 = run_nu_suite(d2, x, SEM_AB, depth=5)
    assert all(r.passed for r in results2)


def test_fixture_machines_cover_shapes(conat_decl, colist_decl):
    reg = cc.MachineRegistry()
    ms = fixture_machines(conat_decl, reg)
    names = {m.name for m in ms}
    assert names == {"CoNat-stuck", "CoNat-loop", "CoNat-swing", "CoNat-once"}
    reg2 = cc.MachineRegistry()
    ms2 = fixture_machines(colist_decl, reg2)
    assert len(ms2) == 4


def test_unroll_matches_bounded_bisim(registry):
    """Depth-k unrollings coincide exactly when seeds are k-1 bisimilar."""
    d = cc.parse_decl("nu T(A) = A + A * rec")
    f = cc.decl_split(d)
    sem = {"A": atoms("a")}
    leaf = cc.InlV(cc.UNIT)
    node = cc.InrV(cc.PairV(cc.UNIT, cc.UNIT))
    node_q = cc.InrV(cc.UNIT)

    def chain(n):
        table = {f"s{k}": (node, ((node_q, f"s{k-1}"),)) for k in range(n, 0, -1)}
        table["s0"] = (leaf, ())
        return registry.register(cc.CoalgebraMachine(f"c{n}", f, table))

    seeds = [chain(n).seed() for n in range(4)]
    seeds.append(registry.register(cc.CoalgebraMachine(
        "loopy", f, {"z": (node, ((node_q, "z"),))})).seed())
    for k in (1, 2, 3):
        for s0 in seeds:
            for s1 in seeds:
                same_unroll = unroll_seed(d.body, s0, k, sem) == \
                    unroll_seed(d.body, s1, k, sem)
                bisim = not cc.bisim_bounded(s0, s1, k - 1).is_distinct
                assert same_unroll == bisim
