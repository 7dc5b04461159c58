"""Acceptance run: one test per criterion, each printing a single PASS/FAIL line.

The lines reach the terminal even without ``-s`` and are also collected by
``scripts/run_acceptance.py``.
"""

import contextlib
import io
import time

import pytest

from gilkit import cli, solver
from gilkit.corpus import callers_source, specs_source
from gilkit.harness.conformance import check_comp_model_props, check_exec_model_props
from gilkit.harness.difftest import DiffConfig, diff_test
from gilkit.harness.frame import check_frame
from gilkit.harness.mutation import GateConfig, mutation_gate
from gilkit.harness.specuse import check_spec_use
from gilkit.parser import parse_program
from gilkit.verification import Verdict, check_compositionality, random_frame, verify_all

from test_verification import MATRIX

LINES: list[str] = []


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def test_conformance_suites(report):
    t = time.perf_counter()
    ex = check_exec_model_props(trials=500, seed=0)
    comp = check_comp_model_props(trials=500, seed=0)
    secs = time.perf_counter() - t
    failed = ex.failed_properties() + comp.failed_properties()
    trials = min(p.trials for p in list(ex) + list(comp) if p.property.endswith("/concrete")
                 or p.property.endswith("/symbolic"))
    report(1, not failed and secs < 60,
           f"exec+comp at 500 trials/variant, {len(list(ex)) + len(list(comp))} properties, "
           f"min trials per property {trials}, failed {failed}, {secs:.1f}s")


def test_mutation_gate(report):
    rep = mutation_gate(GateConfig())
    missed = [m for m, suites in rep.notes.items() if not suites]
    caught = ", ".join(f"{m}<-{'+'.join(s)}" for m, s in rep.notes.items())
    report(2, len(rep.notes) >= 6 and not missed, f"{len(rep.notes)} mutants, missed {missed}; {caught}")


@pytest.fixture(scope="module")
def diff_run():
    t = time.perf_counter()
    rep = diff_test(dc=DiffConfig(programs=200, models=3, exhaustive=50, seed=0))
    return rep, time.perf_counter() - t


def test_differential(report, diff_run):
    rep, secs = diff_run
    bc, fs = rep["GIL-BC"], rep["GIL-FS"]
    ex_bc, ex_fs = rep["exhaustive/GIL-BC"], rep["exhaustive/GIL-FS"]
    ok = (rep.passed and bc.trials > 0 and fs.trials > 0 and ex_bc.trials > 0 and ex_fs.trials > 0
          and secs < 300)
    report(3, ok, f"200 programs x 3 models: BC {bc.failed}/{bc.trials}, FS {fs.failed}/{fs.trials} violations; "
                  f"exhaustive <=2 svars: BC {ex_bc.failed}/{ex_bc.trials}, FS {ex_fs.failed}/{ex_fs.trials}; "
                  f"{secs:.1f}s")


def test_coverage(report, diff_run):
    rep, _ = diff_run
    cov = [p for p in rep if p.property.endswith("coverage")]
    trials, failed = sum(p.trials for p in cov), sum(p.failed for p in cov)
    report(4, cov and trials > 0 and failed == 0, f"coverage checked on {trials} steps, {failed} failures")


def test_frame_preservation(report):
    rep = check_frame(150, seed=0)
    n = rep.notes
    ok = rep.passed and n["pairs"] >= 100 and n["pairs_with_nontrivial_renaming"] >= 10
    report(5, ok, f"{n['pairs']} pairs, {rep['frame-preservation'].failed} violations, "
                  f"{n['pairs_with_nontrivial_renaming']} pairs needing a nontrivial renaming")


def test_verification_corpus(report):
    t = time.perf_counter()
    corpus = parse_program(specs_source())
    got = {r.spec: r.verdict for r in verify_all(corpus)}
    verified = [s for s, v in got.items() if v is Verdict.VERIFIED]
    import random
    rng, bad = random.Random(0), []
    for name in verified:
        spec = corpus.specs[name]
        for _ in range(100):
            r = check_compositionality(corpus, spec, random_frame(rng, spec))
            if r.verdict is not Verdict.VERIFIED:
                bad.append(name)
    secs = time.perf_counter() - t
    ok = len(got) >= 8 and got == MATRIX and not bad and secs < 60
    report(6, ok, f"{len(got)} specs, matrix {'matches' if got == MATRIX else 'differs'}, "
                  f"{len(verified)} Verified x 100 frames, {len(bad)} frame failures, {secs:.1f}s")


def test_spec_use(report):
    rep = check_spec_use(parse_program(callers_source()))
    a, b = rep["spec-to-body"], rep["body-to-spec"]
    ok = rep.passed and a.trials > 0 and b.trials > 0
    report(7, ok, f"{len(rep.notes['callers'])} callers over {rep.notes['specs_used']}: "
                  f"{a.failed}/{a.trials} and {b.failed}/{b.trials} mismatches")


def _cli_json(argv) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        cli.main([*argv, "--json", "--seed", "3"])
    return buf.getvalue()


def test_determinism(report, tmp_path):
    specs = tmp_path / "specs.gil"
    specs.write_text(specs_source())
    prog = tmp_path / "p.gil"
    prog.write_text("proc main(x) { goto [x > 2] 3; l := uSym(1); fail l; v := iSym(1); return [x, v] }")
    commands = [["check-model", "--trials", "40"],
                ["fuzz-diff", "--programs", "20", "--exhaustive", "5", "--frames", "20"],
                ["verify", str(specs)], ["symexec", str(prog), "--models", "3"], ["spec-use"]]
    diverged = []
    for argv in commands:
        outs = set()
        for _ in range(5):
            solver.clear_cache()
            outs.add(_cli_json(argv))
        if len(outs) != 1:
            diverged.append(argv[0])
    report(8, not diverged, f"{len(commands)} commands x 5 runs, diverging: {diverged}")
