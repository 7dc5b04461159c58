"""Command-line entry point: concrete and symbolic runs, verification and test suites.

Exit codes (worst outcome wins):
  0 success, 1 usage or input error, 2 Fail, 3 Miss, 4 fuel exhausted,
  5 a specification was refuted, 6 verification inconclusive, 7 a property failed.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
import time
from pathlib import Path

from . import mutants, solver
from .allocator import AllocRecord, Range, ValueSupply
from .heap import CONCRETE, SYMBOLIC
from .interpreter import DEFAULT_FUEL, Config, Frame, Interpreter, Kind, RunResult, branch_name
from .ops import EvalError, evaluate
from .parser import ParseError, parse_expr, parse_program
from .printer import program_to_json, show_expr
from .state import State, StateModel, Store
from .syntax import EngineFault, Prog, SVar, TRUE, check_program, errors
from .verification import SpecError, Verdict, verify_all

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_MISS, EXIT_FUEL = 0, 1, 2, 3, 4
EXIT_REFUTED, EXIT_INCONCLUSIVE, EXIT_PROPERTY = 5, 6, 7

_KIND_EXIT = {Kind.NORMAL: EXIT_OK, Kind.FAIL: EXIT_FAIL, Kind.MISS: EXIT_MISS}


class UsageError(Exception):
    pass


def _render(v):
    from .harness.report import render
    return render(v)


def _load(path: str) -> Prog:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    try:
        prog = parse_program(text)
    except ParseError as e:
        raise UsageError(f"{path}:{e}") from None
    errs = errors(check_program(prog))
    if errs:
        raise UsageError("; ".join(str(d) for d in errs))
    return prog


def _entry(prog: Prog, name: str) -> str:
    if name not in prog.procs:
        raise UsageError(f"no procedure {name!r} to start from")
    return prog.procs[name].param


def _emit(report: dict, args) -> None:
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))


def _timing(report: dict, args, t0: float) -> None:
    # wall-clock time would break byte-identical reports, so it is opt-in
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 3)


# -- run ------------------------------------------------------------------------

def cmd_run(args) -> int:
    t0 = time.perf_counter()
    prog = _load(args.file)
    param = _entry(prog, args.entry)
    try:
        arg = evaluate(parse_expr(args.arg), {})
    except (ParseError, EvalError) as e:
        raise UsageError(f"--arg: {e}") from None
    sm = StateModel(CONCRETE, ValueSupply(seed=args.seed))
    start = Config(State(CONCRETE.empty(), Store({param: arg}), AllocRecord(), TRUE), (Frame(args.entry),), 0)
    run = Interpreter(prog, sm).run(start, args.fuel)
    cf = run.configs[0] if run.configs else None
    report = {"mode": "run", "program": args.file, "seed": args.seed, "steps": run.steps, "done": run.done}
    if not run.done:
        report["outcome"] = "FuelExhausted"
        code = EXIT_FUEL
    elif cf is None:
        report["outcome"] = "Vanished"
        code = EXIT_OK
    else:
        report["outcome"] = cf.outcome.kind.value
        report["value"] = _render(cf.outcome.value)
        report["store"] = _render(dict(cf.state.store))
        report["heap"] = _render({repr(k): v for k, v in CONCRETE.normal(cf.state.mem)})
        code = _KIND_EXIT[cf.outcome.kind]
    _timing(report, args, t0)
    if not args.json:
        if report["outcome"] in ("FuelExhausted", "Vanished"):
            print(f"{report['outcome']} after {run.steps} steps")
        else:
            print(f"{report['outcome']}({cf.outcome.value!r})")
            print(f"store: {report['store']}")
            print(f"heap:  {report['heap']}")
    _emit(report, args)
    return code


# -- symexec --------------------------------------------------------------------

def _smt_file(dirpath: Path, name: str, pc) -> str | None:
    try:
        text = solver.export_smtlib2(pc)
    except solver.Unsupported as e:
        return f"not exported: {e}"
    dirpath.mkdir(parents=True, exist_ok=True)
    (dirpath / f"{name}.smt2").write_text(text + "\n")
    return None


def _final_report(cf: Config, n_models: int, seed: int, smt_dir: Path | None) -> dict:
    name = branch_name(cf.branch)
    out = {"branch": name, "outcome": cf.outcome.kind.value, "value": _render(cf.outcome.value),
           "pc": show_expr(cf.pc), "trace": list(cf.trace), "unverified": cf.unverified}
    if cf.outcome.kind in (Kind.FAIL, Kind.MISS):
        from .harness.interpret import config_svars
        ms = solver.sample_models(cf.pc, n_models, extra=config_svars(cf), seed=seed) if n_models else []
        out["models"] = [_render(m) for m in ms]
        if n_models and not ms:
            out["unverified"] = True
    if smt_dir is not None:
        note = _smt_file(smt_dir, f"branch-{name}", cf.pc)
        if note:
            out["smt"] = note
    return out


def cmd_symexec(args) -> int:
    t0 = time.perf_counter()
    prog = _load(args.file)
    param = _entry(prog, args.entry)
    st = State(SYMBOLIC.empty(), Store({param: SVar(param)}), AllocRecord.of({Range.SVARS: [SVar(param)]}), TRUE)
    run: RunResult = Interpreter(prog, StateModel(SYMBOLIC), specs=args.specs).run(
        Config(st, (Frame(args.entry),), 0), args.fuel)
    smt_dir = Path(args.emit_smt) if args.emit_smt else None
    finals = [_final_report(cf, args.models, args.seed, smt_dir) for cf in run.finals]
    code = EXIT_FUEL if not run.done else max([_KIND_EXIT[cf.outcome.kind] for cf in run.finals],
                                               default=EXIT_OK)
    report = {"mode": "symexec", "program": args.file, "done": run.done, "steps": run.steps,
              "finals": finals}
    _timing(report, args, t0)
    if not args.json:
        if not run.done:
            print(f"fuel exhausted after {run.steps} steps")
        print(f"{len(finals)} final configuration(s)")
        for f in finals:
            flag = " [unverified]" if f["unverified"] else ""
            print(f"  {f['branch']}: {f['outcome']}({f['value']}) under {f['pc']}{flag}")
            for m in f.get("models", []):
                print(f"      model {m}")
    _emit(report, args)
    return code


# -- verify ---------------------------------------------------------------------

def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    prog = _load(args.file)
    if not prog.specs:
        raise UsageError(f"{args.file} contains no specifications")
    if args.spec is not None and args.spec not in prog.specs:
        raise UsageError(f"no specification for {args.spec!r}")
    try:
        results = verify_all(prog, args.fuel, args.spec)
    except SpecError as e:
        raise UsageError(str(e)) from None
    verdicts = {r.verdict for r in results}
    code = (EXIT_REFUTED if Verdict.REFUTED in verdicts
            else EXIT_INCONCLUSIVE if Verdict.INCONCLUSIVE in verdicts else EXIT_OK)
    report = {"mode": "verify", "program": args.file, "results": [r.to_json() for r in results]}
    _timing(report, args, t0)
    if not args.json:
        for r in results:
            extra = f": {r.reason}" if r.reason else ""
            print(f"{r.spec}: {r.verdict.value}{extra}")
    _emit(report, args)
    return code


# -- suites ---------------------------------------------------------------------

def _suite_exit(report, args, t0: float) -> int:
    data = json.loads(report.dumps())
    _timing(data, args, t0)
    if not args.json:
        print(report.summary())
        for p in report:
            for f in p.failures:
                print(f"  counterexample for {p.suite}/{p.property}: {json.dumps(_render(f), sort_keys=True)}")
    _emit(data, args)
    return EXIT_OK if report.passed else EXIT_PROPERTY


def cmd_check_model(args) -> int:
    from .harness.asrtprops import check_asrt_props
    from .harness.conformance import check_comp_model_props, check_exec_model_props, check_state_props
    from .harness.report import Report
    t0 = time.perf_counter()
    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    if args.trials == 0:
        print("warning: --trials 0 checks nothing", file=sys.stderr)
    models = tuple(args.model) if args.model else ("concrete", "symbolic")
    rep = Report("check-model")
    rep.merge(check_exec_model_props(models, args.trials, args.seed))
    rep.merge(check_comp_model_props(models, args.trials, args.seed))
    rep.merge(check_state_props(models, args.trials, args.seed))
    rep.merge(check_asrt_props(models, args.trials, args.seed))
    return _suite_exit(rep, args, t0)


def cmd_fuzz_diff(args) -> int:
    from .harness.difftest import DiffConfig, diff_test
    from .harness.frame import check_frame
    from .harness.report import Report
    t0 = time.perf_counter()
    if min(args.programs, args.models, args.exhaustive, args.frames) < 0:
        raise UsageError("counts must be non-negative")
    if args.programs == 0 and args.exhaustive == 0 and args.frames == 0:
        print("warning: nothing to check", file=sys.stderr)
    dc = DiffConfig(programs=args.programs, models=args.models, exhaustive=args.exhaustive,
                    fuel=args.fuel, seed=args.seed)
    rep = Report("fuzz")
    rep.merge(diff_test(dc=dc))
    if args.frames:
        rep.merge(check_frame(args.frames, args.seed, fuel=args.fuel))
    return _suite_exit(rep, args, t0)


def cmd_spec_use(args) -> int:
    from .corpus import callers_source
    from .harness.specuse import SpecUseConfig, check_spec_use
    t0 = time.perf_counter()
    if args.file is None:
        prog = parse_program(callers_source())
    else:
        prog = _load(args.file)
    rep = check_spec_use(prog, SpecUseConfig(models=args.models, fuel=args.fuel, seed=args.seed))
    return _suite_exit(rep, args, t0)


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all random choices")
    common.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="maximum number of collecting steps")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    common.add_argument("--mutant", action="append", default=[], help=argparse.SUPPRESS)

    prog_args = argparse.ArgumentParser(add_help=False)
    prog_args.add_argument("file", help="GIL program (.gil)")
    prog_args.add_argument("--emit-ast", action="store_true", help="print the parsed program as JSON and stop")

    p = argparse.ArgumentParser(prog="gilkit", description="Concrete and symbolic execution of GIL programs.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common, prog_args], help="run concretely from an entry procedure")
    r.add_argument("--entry", default="main")
    r.add_argument("--arg", default="null", help="argument of the entry procedure, as a GIL expression")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("symexec", parents=[common, prog_args], help="explore all paths symbolically")
    s.add_argument("--entry", default="main")
    s.add_argument("--models", type=int, default=1, help="counter-models per Fail/Miss branch")
    s.add_argument("--specs", action="store_true", help="use specifications at annotated calls")
    s.add_argument("--emit-smt", metavar="DIR", help="write each final path condition as SMT-LIB")
    s.set_defaults(func=cmd_symexec)

    v = sub.add_parser("verify", parents=[common, prog_args], help="verify procedure specifications")
    v.add_argument("--spec", help="verify only the specification of this procedure")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("check-model", parents=[common], help="run the memory, state and assertion law suites")
    c.add_argument("--trials", type=int, default=500)
    c.add_argument("--model", action="append", choices=("concrete", "symbolic"),
                   help="restrict to one heap variant (repeatable)")
    c.set_defaults(func=cmd_check_model)

    f = sub.add_parser("fuzz-diff", parents=[common], help="differential concrete/symbolic testing")
    f.add_argument("--programs", type=int, default=200)
    f.add_argument("--models", type=int, default=3)
    f.add_argument("--exhaustive", type=int, default=0, help="extra programs checked on all models")
    f.add_argument("--frames", type=int, default=0, help="also check frame preservation on this many pairs")
    f.set_defaults(func=cmd_fuzz_diff)

    u = sub.add_parser("spec-use", parents=[common], help="compare spec use against inlined bodies")
    u.add_argument("file", nargs="?", help="program with specs and use_* callers (default: bundled corpus)")
    u.add_argument("--models", type=int, default=4)
    u.set_defaults(func=cmd_spec_use)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    if args.fuel < 0:
        print("error: --fuel must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    unknown = [m for m in args.mutant if m not in mutants.MUTANTS]
    if unknown:
        print(f"error: unknown mutant {unknown[0]!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        with mutants.enabled(*args.mutant) if args.mutant else contextlib.nullcontext():
            if getattr(args, "emit_ast", False):
                print(json.dumps(program_to_json(_load(args.file)), sort_keys=True, indent=2))
                return EXIT_OK
            return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except EngineFault as e:
        print(f"engine fault: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
