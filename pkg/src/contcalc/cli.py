"""Command-line surface.

Subcommands: elaborate, enumerate, fold, unfold, bisim, check-iso.  Budgets
are explicit flags with documented defaults (height 6, path depth 16, state
cap 10000); `--verbose` prints whichever defaults were silently used.
Output is deterministic: identical inputs and flags give identical bytes.

Exit codes: 0 success (bisim: equal/bisimilar), 1 distinct or suite
failure, 2 usage/parse errors, 3 partial enumeration or exhausted search.
"""
from __future__ import annotations

import argparse
import sys
from typing import Dict, List, Optional, Tuple

from .core import ExtElement, FamilyAssignment, ext_enumerate
from .domains import AtomsDom, Budget, NatDom, path_budget
from .elaborator import (Decl, data_to_element, decl_split, parse_decl_file,
                         render_decl)
from .errors import EngineError, ParseError, ValueParseError
from .mfix import (MachineRegistry, bisim_bounded, bisim_exact, nu_container,
                   parse_machine_file, unfold)
from .oracle import atoms as sem_atoms
from .suites import run_decl_suite
from .values import NatV, Value, parse_value, render
from .wfix import Algebra, fold, mu_container

DEFAULT_HEIGHT = 6
DEFAULT_PATHS = 16
DEFAULT_STATE_CAP = 10_000


class Session:
    """One command invocation's state: loaded declarations, registered
    machines, and named atom domains.  Names are unique per kind (duplicate
    declarations and conflicting machine registrations are rejected on
    load)."""

    def __init__(self, verbose: bool = False):
        self.decls: Dict[str, Decl] = {}
        self.registry = MachineRegistry()
        self.atoms: Dict[str, AtomsDom] = {}
        self.verbose = verbose

    def load_decls(self, path: str) -> None:
        with open(path) as fh:
            text = fh.read()
        for d in parse_decl_file(text):
            self.decls[d.name] = d

    def decl(self, name: str) -> Decl:
        if name not in self.decls:
            raise EngineError(f"no declaration named {name!r} "
                              f"(have: {', '.join(self.decls) or 'none'})")
        return self.decls[name]

    def load_machines(self, path: str, d: Decl):
        with open(path) as fh:
            return parse_machine_file(fh.read(), decl_split(d), self.registry)

    def family(self, d: Decl, param_args: List[str]):
        """Family assignment from --param NAME=a,b,c flags; parameters not
        mentioned default to two atoms (printed in verbose mode)."""
        given = {}
        for arg in param_args or []:
            if "=" not in arg:
                raise EngineError(f"--param wants NAME=atom,atom,..., got {arg!r}")
            name, _, rest = arg.partition("=")
            names = tuple(a.strip() for a in rest.split(",") if a.strip())
            given[name] = names
        assign, sem = {}, {}
        for p in d.params:
            names = given.pop(p, None)
            if names is None:
                names = ("a", "b")
                if self.verbose:
                    print(f"# default: --param {p}={','.join(names)}")
            self.atoms[p] = AtomsDom(names)
            assign[p] = self.atoms[p]
            sem[p] = sem_atoms(*names)
        if given:
            raise EngineError(f"unknown parameters: {sorted(given)}")
        return FamilyAssignment(assign), sem


def _render_element(cont, x, e: ExtElement, budget: Budget) -> str:
    entries = []
    for i in cont.indices:
        for p in cont.pos(i, e.shape).enumerate(budget):
            entries.append(f"{i} {render(p)} -> {render(e.payload(i, p))}")
    return f"({render(e.shape)} , [{'; '.join(entries)}])"


# ---------------------------------------------------------------------------
# Subcommands.

def cmd_elaborate(args) -> int:
    session = Session(args.verbose)
    session.load_decls(args.file)
    for d in session.decls.values():
        f = decl_split(d)
        if d.fixity == "mu":
            mu_container(f)
            kind = "shapes: W-domain (well-founded trees); positions: Pos paths"
        else:
            nu_container(f, session.registry)
            kind = "shapes: machine seeds (nu, registry-backed); positions: Pos paths"
        params = ", ".join(d.params)
        print(f"{d.name}: {d.fixity}({params}) = {render_decl(d).split(' = ', 1)[1]}")
        print(f"  {kind}")
    return 0


def cmd_enumerate(args) -> int:
    session = Session(args.verbose)
    session.load_decls(args.file)
    d = session.decl(args.decl)
    x, _sem = session.family(d, args.param)
    for mpath in args.machines:
        session.load_machines(mpath, d)
    if args.verbose and args.height == DEFAULT_HEIGHT:
        print(f"# default: --height {DEFAULT_HEIGHT}")
    cont = mu_container(decl_split(d)) if d.fixity == "mu" \
        else nu_container(decl_split(d), session.registry)
    budget = Budget(size=args.height, count=args.count_cap)
    enum = ext_enumerate(cont, x, budget)
    if args.count_only:
        print(len(enum))
    else:
        for e in enum:
            print(_render_element(cont, x, e, budget))
        print(f"count: {len(enum)}")
    if not enum.complete:
        print("partial: enumeration incomplete at this budget", file=sys.stderr)
        return 3
    return 0


def _parse_algebra_file(text: str, f) -> Algebra:
    """Algebra spec format:

        algebra NAME
        carrier nat
        case SHAPE-VALUE => EXPR

    EXPR is a sum of: a literal natural, `rec K` (value at the K-th
    recursion position), `param INDEX K` (payload at the K-th position of
    INDEX; must be a natural).
    """
    name = None
    carrier = None
    cases: List[Tuple[Value, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("algebra "):
            name = line[len("algebra "):].strip()
        elif line.startswith("carrier "):
            carrier = line[len("carrier "):].strip()
            if carrier != "nat":
                raise ParseError("only 'carrier nat' algebras are supported",
                                 lineno, 1)
        elif line.startswith("case "):
            body = line[len("case "):]
            if "=>" not in body:
                raise ParseError("case line needs '=>'", lineno, 1)
            key, _, expr = body.partition("=>")
            cases.append((parse_value(key.strip()), expr.strip()))
        else:
            raise ParseError(f"unrecognised algebra line: {line!r}", lineno, 1)
    if name is None or carrier is None or not cases:
        raise ParseError("algebra file needs a name, a carrier and cases", 1, 1)

    def act(shape, params, rec):
        for key, expr in cases:
            if key == shape:
                return NatV(_eval_alg_expr(expr, shape, params, rec, f))
        raise EngineError(f"algebra has no case for shape {render(shape)}")

    return Algebra(NatDom(), act)


def _eval_alg_expr(expr: str, shape, params, rec, f) -> int:
    total = 0
    for part in expr.split("+"):
        toks = part.split()
        if not toks:
            raise EngineError("empty summand in algebra expression")
        if toks[0] == "rec":
            qs = f.q(shape).enumerate_all().values
            v = rec(qs[int(toks[1])])
            total += v.n
        elif toks[0] == "param":
            index, k = toks[1], int(toks[2])
            ps = f.base.pos(index, shape).enumerate_all().values
            v = params(index, ps[k])
            if not isinstance(v, NatV):
                raise EngineError("param payload is not a natural")
            total += v.n
        else:
            total += int(toks[0])
    return total


def cmd_fold(args) -> int:
    session = Session(args.verbose)
    session.load_decls(args.file)
    d = session.decl(args.decl)
    if d.fixity != "mu":
        raise EngineError("fold applies to mu declarations")
    x, _sem = session.family(d, args.param)
    f = decl_split(d)
    with open(args.algebra) as fh:
        alg = _parse_algebra_file(fh.read(), f)
    term = parse_value(args.data)
    e = data_to_element(d, x, term)
    result = fold(f, x, alg, e)
    print(render(result))
    return 0


def cmd_unfold(args) -> int:
    session = Session(args.verbose)
    session.load_decls(args.file)
    d = session.decl(args.decl)
    if d.fixity != "nu":
        raise EngineError("unfold applies to nu declarations")
    x, _sem = session.family(d, args.param)
    f = decl_split(d)
    specs = session.load_machines(args.machine, d)
    if not specs:
        raise EngineError("machine file defines no machines")
    spec, state = specs[0], args.state
    if state is not None and "." in state:
        mname, _, state = state.partition(".")
        spec = next((s for s in specs if s.machine.name == mname), None)
        if spec is None:
            raise EngineError(f"no machine named {mname!r} in file")
    co = spec.coalgebra()
    from .values import AtomV
    y = AtomV(state if state is not None else spec.machine.states[0])
    if args.verbose and args.paths == DEFAULT_PATHS:
        print(f"# default: --paths {DEFAULT_PATHS}")
    e = unfold(f, x, co, y, session.registry, state_cap=args.state_cap)
    print(f"seed: {render(e.shape)}")
    cont = nu_container(f, session.registry)
    # --paths K samples payloads along paths of fewer than K steps
    budget = path_budget(args.paths - 1, count=512) if args.paths > 0 \
        else Budget(0)
    for i in cont.indices:
        for p in cont.pos(i, e.shape).enumerate(budget):
            print(f"{i} {render(p)} -> {render(e.payload(i, p))}")
    return 0


def cmd_bisim(args) -> int:
    session = Session(args.verbose)
    session.load_decls(args.file)
    d = session.decl(args.decl)
    session.load_machines(args.machines, d)

    def seed_of(spec: str):
        mname, _, state = spec.partition(".")
        machine = session.registry.get(mname)
        return machine.seed(state or None)

    s0, s1 = seed_of(args.seed0), seed_of(args.seed1)
    if args.exact:
        verdict = bisim_exact(s0, s1)
        if verdict.is_equal:
            print("equal")
            return 0
        steps = " . ".join(f"below {render(q)}" for q in verdict.witness) or "(root)"
        print(f"distinct; witness: {steps}")
        return 1
    verdict = bisim_bounded(s0, s1, args.depth)
    if verdict.kind == "distinct":
        steps = " . ".join(f"below {render(q)}" for q in verdict.witness) or "(root)"
        print(f"distinct; witness: {steps}")
        return 1
    if verdict.kind == "exhausted":
        print("exhausted: search cut before reaching the depth bound")
        return 3
    print(f"bisimilar-to-{args.depth}" + (" (closed)" if verdict.closed else ""))
    return 0


def cmd_check_iso(args) -> int:
    session = Session(args.verbose)
    session.load_decls(args.file)
    d = session.decl(args.decl)
    x, sem = session.family(d, args.param)
    if args.verbose:
        if args.height == DEFAULT_HEIGHT:
            print(f"# default: --height {DEFAULT_HEIGHT}")
        if args.paths == DEFAULT_PATHS:
            print(f"# default: --paths {DEFAULT_PATHS}")
    results = run_decl_suite(d, x, sem, height=args.height,
                             depth=args.paths, registry=session.registry)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.suite} {r.name}: {r.detail}")
    if args.report_dir:
        from .report import write_report
        for path in write_report(results, args.report_dir):
            print(f"wrote {path}")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contcalc",
        description="Container calculus engine: elaborate datatype "
                    "declarations, enumerate extensions, fold/unfold, and "
                    "check the fixed-point isomorphisms.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, params=True):
        p.add_argument("--verbose", action="store_true")
        if params:
            p.add_argument("--param", action="append", default=[],
                           metavar="NAME=a,b,...",
                           help="atoms for a parameter (default: a,b)")

    p = sub.add_parser("elaborate", help="parse and summarise declarations")
    p.add_argument("file")
    common(p, params=False)
    p.set_defaults(fn=cmd_elaborate)

    p = sub.add_parser("enumerate", help="enumerate a declaration's extension")
    p.add_argument("file")
    p.add_argument("decl")
    p.add_argument("--height", type=int, default=DEFAULT_HEIGHT)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--count-cap", type=int, default=100_000)
    p.add_argument("--machines", action="append", default=[],
                   help="machine files to register (nu declarations)")
    common(p)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("fold", help="fold an algebra over a data literal")
    p.add_argument("file")
    p.add_argument("decl")
    p.add_argument("--algebra", required=True, help="algebra spec file")
    p.add_argument("--data", required=True, help="data literal (value syntax)")
    common(p)
    p.set_defaults(fn=cmd_fold)

    p = sub.add_parser("unfold", help="unfold a machine coalgebra")
    p.add_argument("file")
    p.add_argument("decl")
    p.add_argument("--machine", required=True, help="machine spec file")
    p.add_argument("--state", help="MACHINE.STATE or STATE (default: first)")
    p.add_argument("--paths", type=int, default=DEFAULT_PATHS)
    p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    common(p)
    p.set_defaults(fn=cmd_unfold)

    p = sub.add_parser("bisim", help="compare two machine seeds")
    p.add_argument("file")
    p.add_argument("decl")
    p.add_argument("machines", help="machine file")
    p.add_argument("seed0", help="MACHINE[.STATE]")
    p.add_argument("seed1", help="MACHINE[.STATE]")
    p.add_argument("--depth", type=int, default=DEFAULT_PATHS)
    p.add_argument("--exact", action="store_true")
    common(p, params=False)
    p.set_defaults(fn=cmd_bisim)

    p = sub.add_parser("check-iso", help="run the isomorphism suite")
    p.add_argument("file")
    p.add_argument("decl")
    p.add_argument("--height", type=int, default=DEFAULT_HEIGHT)
    p.add_argument("--paths", type=int, default=DEFAULT_PATHS)
    p.add_argument("--report-dir", help="write results.csv and figures here")
    common(p)
    p.set_defaults(fn=cmd_check_iso)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, ValueParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
