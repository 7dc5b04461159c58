import json

import pytest

from gilkit import mutants
from gilkit.harness.conformance import check_comp_model_props, check_exec_model_props
from gilkit.harness.difftest import DiffConfig, diff_test
from gilkit.harness.frame import FrameStats, check_frame, check_pair, renaming_from_logs
from gilkit.harness.generators import GenConfig, gen_inputs, gen_program, program_size, rng_for
from gilkit.harness.mutation import GateConfig, caught_by
from gilkit.harness.report import Report
from gilkit.harness.specuse import SpecUseConfig, check_spec_use
from gilkit.heap import Heap
from gilkit.parser import parse_expr, parse_program
from gilkit.state import State, Store
from gilkit.syntax import Lit, SVar, TRUE
from gilkit.values import Loc

from helpers import sym_start


def test_generated_programs_respect_size_limits():
    cfg = GenConfig()
    for t in range(50):
        rng = rng_for(0, "gen", t)
        p = gen_program(rng, cfg, gen_inputs(rng, cfg))
        assert program_size(p) <= 25 and len(p.procs) <= 3


def test_small_conformance_runs_pass():
    assert check_exec_model_props(trials=40, seed=1).passed
    assert check_comp_model_props(trials=40, seed=1).passed


def test_small_differential_run_passes_with_exhaustive_subset():
    rep = diff_test(dc=DiffConfig(programs=20, models=3, exhaustive=10, seed=2))
    assert rep.passed, rep.summary()
    assert rep["GIL-BC"].trials > 0 and rep["GIL-FS"].trials > 0
    assert rep["coverage"].trials > 0


def test_small_frame_run_passes():
    rep = check_frame(40, seed=4)
    assert rep.passed, rep.summary()
    assert rep.notes["pairs"] == 40


def test_frame_pair_with_identity_renaming():
    p = parse_program("proc main(x) { v := [load](x); return v }")
    l0, l1 = Lit(Loc("l0")), Lit(Loc("l1"))
    start = sym_start(p)
    start = start.__class__(State(Heap([(l0, Lit(3))]), Store({"x": l0}), start.state.alloc, TRUE),
                            start.stack, 0)
    frame = State(Heap([(l1, Lit(4))]), None, pc=TRUE)
    rep, stats = Report("frame"), FrameStats()
    check_pair(p, start, frame, rep, "t", stats)
    assert rep.passed and stats.pairs == 1 and stats.identity == 1 and stats.nontrivial == 0


def test_frame_pair_contradicted_branch_is_exempt():
    p = parse_program("proc main(x) { goto [x = 1] 2; return 0; return 1 }")
    start = sym_start(p)
    frame = State(Heap(), None, pc=parse_expr("#x = 1"))
    rep, stats = Report("frame"), FrameStats()
    check_pair(p, start, frame, rep, "t", stats)
    assert rep.passed and stats.exempt == 1


def test_renaming_from_logs():
    assert renaming_from_logs((), ()).is_identity
    l1, l2 = Loc("l1"), Loc("l2")
    r = renaming_from_logs((("svars", (SVar("a"),)), ("locs", (Lit(l1),))),
                           (("svars", (SVar("b"),)), ("locs", (Lit(l2),))))
    assert r is not None and not r.is_identity
    assert r(SVar("a")) == SVar("b") and r(l1) == l2
    assert renaming_from_logs((("svars", (SVar("a"),)),), ()) is None
    assert renaming_from_logs((("svars", (SVar("a"),)),), (("locs", (SVar("a"),)),)) is None


LAZY = """
spec write7(x) [[ #x : <cell>(#x; #v) ]] [[ <cell>(#x; 7) ]] returns true
proc write7(x) { return true }
proc use_w(x) { l := uSym(1); l := hd(l); u := [alloc](l); u := [store]([l, x]);
  u := write7(l) with {#v -> x}; v := [load](l); return v }
"""


def test_spec_use_detects_a_spec_that_disagrees_with_its_body():
    rep = check_spec_use(parse_program(LAZY), SpecUseConfig(require_verified=False))
    assert not rep["spec-to-body"].passed and not rep["body-to-spec"].passed


def test_spec_use_skips_unverified_specs_and_accepts_honest_ones():
    rep = check_spec_use(parse_program(LAZY))
    assert rep.notes["callers_skipped"] == ["use_w"]
    honest = parse_program(LAZY.replace("{ return true }", "{ u := [store]([x, 7]); return true }"))
    rep = check_spec_use(honest)
    assert rep.passed and rep["spec-to-body"].trials > 0 and rep["body-to-spec"].trials > 0


def test_bundled_spec_use_corpus_passes():
    from gilkit.corpus import callers_source
    rep = check_spec_use(parse_program(callers_source()), SpecUseConfig(models=2))
    assert rep.passed, rep.summary()
    assert len(rep.notes["callers"]) >= 6


@pytest.mark.parametrize("name", sorted(mutants.MUTANTS))
def test_every_mutant_is_caught(name):
    assert caught_by(name, GateConfig(trials=60, programs=30, frames=20), stop_early=True)


def test_mutants_are_off_outside_the_context():
    name = sorted(mutants.MUTANTS)[0]
    with mutants.enabled(name):
        assert mutants.active(name)
    assert not mutants.active(name)


def test_report_json_is_deterministic():
    a = diff_test(dc=DiffConfig(programs=10, models=2, seed=7)).dumps()
    b = diff_test(dc=DiffConfig(programs=10, models=2, seed=7)).dumps()
    assert a == b
    data = json.loads(a)
    assert {"results", "notes"} <= set(data)


def test_report_records_counterexamples():
    rep = Report("s")
    rep["p"].check(True, 0, "in", "exp")
    rep["p"].check(False, 1, {"x": SVar("x")}, "exp", "got")
    assert not rep.passed and rep.failed_properties() == ["s/p"]
    (f,) = rep["p"].failures
    assert f["input"] == {"x": "#x"} and f["seed"] == 1
    assert "FAIL s/p: 1/2" in rep.summary()
