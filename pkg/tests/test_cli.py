"""Command-line surface: output contracts, exit codes, determinism."""
import pytest

from contcalc.cli import main


DECLS = """\
# fixtures
mu List(A) = 1 + A * rec
mu Nat() = 1 + rec
mu Zero() = 0
nu CoNat() = 1 + rec
nu CoList(A) = 1 + A * rec
"""

LENGTH_ALG = """\
algebra length
carrier nat
case inl unit => 0
case inr (unit , unit) => 1 + rec 0
"""

RED_MACHINE = """\
machine red
r : shape inr (unit , unit) ; inr unit -> e
e : shape inr (unit , unit) ; inr unit -> d
d : shape inr (unit , unit) ; inr unit -> r
payload r A inl unit => atom:r
payload e A inl unit => atom:e
payload d A inl unit => atom:d
machine red2
a : shape inr (unit , unit) ; inr unit -> b
b : shape inr (unit , unit) ; inr unit -> a
machine nil
z : shape inl unit
"""


@pytest.fixture
def files(tmp_path):
    decls = tmp_path / "decls.dsl"
    decls.write_text(DECLS)
    alg = tmp_path / "length.alg"
    alg.write_text(LENGTH_ALG)
    mach = tmp_path / "red.mach"
    mach.write_text(RED_MACHINE)
    return {"decls": str(decls), "alg": str(alg), "mach": str(mach),
            "dir": tmp_path}


def test_elaborate_summaries(files, capsys):
    assert main(["elaborate", files["decls"]]) == 0
    out = capsys.readouterr().out
    assert "List: mu(A) = 1 + A * rec" in out
    assert "W-domain" in out
    assert "machine seeds" in out


def test_elaborate_malformed_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.dsl"
    bad.write_text("mu T(A) = rec +\n")
    assert main(["elaborate", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "1:16" in err  # position-tagged


def test_enumerate_count_only_list(files, capsys):
    code = main(["enumerate", files["decls"], "List", "--height", "4",
                 "--count-only"])
    out = capsys.readouterr()
    assert out.out.strip() == "15"
    assert code == 3  # infinite domain: the budget cut it, flagged partial
    assert "partial" in out.err


def test_enumerate_three_atoms(files, capsys):
    main(["enumerate", files["decls"], "List", "--height", "3",
          "--count-only", "--param", "A=x,y,z"])
    assert capsys.readouterr().out.strip() == "13"  # 1 + 3 + 9


def test_enumerate_zero_functor_complete(files, capsys):
    code = main(["enumerate", files["decls"], "Zero", "--height", "5",
                 "--count-only"])
    assert capsys.readouterr().out.strip() == "0"
    assert code == 0


def test_enumerate_prints_elements_deterministically(files, capsys):
    argv = ["enumerate", files["decls"], "List", "--height", "2"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    second = capsys.readouterr().out
    assert first == second
    assert "count: 3" in first
    assert "sup inl unit []" in first


def test_fold_length(files, capsys):
    code = main(["fold", files["decls"], "List",
                 "--algebra", files["alg"], "--param", "A=r,e,d",
                 "--data", "inr (atom:r , inr (atom:e , inr (atom:d , inl unit)))"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "nat:3"


def test_fold_leaf_gives_base_case(files, capsys):
    main(["fold", files["decls"], "List", "--algebra", files["alg"],
          "--data", "inl unit"])
    assert capsys.readouterr().out.strip() == "nat:0"


def test_unfold_red_machine(files, capsys):
    code = main(["unfold", files["decls"], "CoList", "--machine", files["mach"],
                 "--paths", "6", "--param", "A=r,e,d"])
    assert code == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("seed: seed:unfold-red")
    payloads = [line.rsplit(" -> ", 1)[1] for line in out[1:]]
    assert payloads == ["atom:r", "atom:e", "atom:d",
                        "atom:r", "atom:e", "atom:d"]


def test_bisim_exact_and_bounded(files, capsys):
    assert main(["bisim", files["decls"], "CoList", files["mach"],
                 "red.r", "red2.a", "--exact"]) == 0
    assert capsys.readouterr().out.strip() == "equal"
    assert main(["bisim", files["decls"], "CoList", files["mach"],
                 "red.r", "nil.z", "--depth", "5"]) == 1
    out = capsys.readouterr().out
    assert out.startswith("distinct; witness:")
    assert main(["bisim", files["decls"], "CoList", files["mach"],
                 "red", "red2", "--depth", "64"]) == 0
    assert "bisimilar-to-64" in capsys.readouterr().out


def test_bisim_unknown_machine_exits_2(files, capsys):
    assert main(["bisim", files["decls"], "CoList", files["mach"],
                 "ghost.x", "red.r", "--exact"]) == 2
    assert "unknown machine" in capsys.readouterr().err


def test_check_iso_list_passes_and_reports(files, capsys):
    report = files["dir"] / "report"
    code = main(["check-iso", files["decls"], "List", "--height", "4",
                 "--report-dir", str(report)])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("[PASS]") == 5
    assert (report / "results.csv").exists()
    assert (report / "mu-List-growth.png").exists()


def test_check_iso_conat_passes(files, capsys):
    code = main(["check-iso", files["decls"], "CoNat", "--paths", "8"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("[PASS]") == 5 and "[FAIL]" not in out


def test_check_iso_verbose_prints_defaults(files, capsys):
    main(["check-iso", files["decls"], "CoNat", "--verbose"])
    out = capsys.readouterr().out
    assert "# default: --height 6" in out
    assert "# default: --paths 16" in out


def test_unknown_decl_exits_2(files, capsys):
    assert main(["enumerate", files["decls"], "Ghost", "--count-only"]) == 2
    assert "no declaration named" in capsys.readouterr().err
