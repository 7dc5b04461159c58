import random

import pytest
from hypothesis import given, strategies as st

from gilkit import solver
from gilkit.heap import CONCRETE, SYMBOLIC, Heap
from gilkit.interpreter import Config, CoverageMonitor, Frame, Interpreter, Kind
from gilkit.parser import parse_expr, parse_program
from gilkit.state import State, StateModel, Store
from gilkit.syntax import EngineFault, Lit, SVar, TRUE
from gilkit.values import Loc

from helpers import sym_start

CI = lambda p: Interpreter(p, StateModel(CONCRETE))  # noqa: E731
SI = lambda p, **kw: Interpreter(p, StateModel(SYMBOLIC), **kw)  # noqa: E731


def conc_start(p, arg, entry="main", heap=None):
    param = p.procs[entry].param
    return Config(State(heap or Heap(), Store({param: arg})), (Frame(entry),), 0)


def test_assignment_step():
    p = parse_program("proc main(x) { x := 1; return x }")
    (s,) = CI(p).step(conc_start(p, 0))
    assert s.state.store["x"] == 1 and s.index == 1 and s.trace == ("main:0",)


def test_symbolic_goto_branches():
    p = parse_program("proc main(x) { goto [x] 2; return 0; return 1 }")
    succ = SI(p).step(sym_start(p))
    assert len(succ) == 2
    assert {s.index for s in succ} == {2, 1}
    assert {s.pc for s in succ} == {SVar("x"), parse_expr("not #x")}
    assert [s.branch for s in succ] == [(0,), (1,)]


def test_top_return_is_normal():
    p = parse_program("proc main(x) { return x + 1 }")
    (s,) = CI(p).step(conc_start(p, 4))
    assert s.final and s.outcome.kind is Kind.NORMAL and s.outcome.value == 5


def test_call_and_return():
    p = parse_program("proc main(x) { y := f(x); return y + 1 } proc f(z) { return z * 2 }")
    run = CI(p).run(conc_start(p, 3))
    (f,) = run.finals
    assert f.outcome.value == 7 and run.steps == 3
    assert f.trace == ("main:0", "f:0", "main:1")


def test_dynamic_call_of_non_procedure_is_a_fault():
    p = parse_program("proc main(x) { y := (x)(1); return y }")
    with pytest.raises(EngineFault):
        CI(p).run(conc_start(p, 3))


def test_memory_action_miss_and_fail():
    p = parse_program("proc main(x) { v := [load](x); return v }")
    (f,) = CI(p).run(conc_start(p, Loc("l0"))).finals
    assert f.outcome.kind is Kind.MISS
    (f,) = CI(p).run(conc_start(p, 3)).finals
    assert f.outcome.kind is Kind.FAIL


def test_fail_and_vanish():
    p = parse_program("proc main(x) { goto [x] 2; fail 7; vanish }")
    assert [f.outcome.value for f in CI(p).run(conc_start(p, False)).finals] == [7]
    run = CI(p).run(conc_start(p, True))
    assert run.done and run.configs == []


def test_collect_step_passes_finals_through():
    p = parse_program("proc main(x) { goto [x] 2; return 0; return 1 }")
    it = SI(p)
    done = it.run(sym_start(p)).configs
    assert it.collect_step(done) == done
    mixed = [done[0], sym_start(p)]
    out = it.collect_step(mixed)
    assert done[0] in out and len(out) == 3
    assert it.collect_step([sym_start(p)]) == sorted(it.step(sym_start(p)), key=lambda c: c.branch)


def test_fuel():
    p = parse_program("proc main(x) { r := 1; r := 2; return r }")
    run = CI(p).run(conc_start(p, 0))
    assert run.done and run.steps <= 3
    loop = parse_program("proc main(x) { goto 0 }")
    run = CI(loop).run(conc_start(loop, 0), fuel=100)
    assert not run.done and run.steps == 100
    with pytest.raises(ValueError):
        CI(loop).run(conc_start(loop, 0), fuel=-1)


def test_concrete_isym_is_seeded():
    p = parse_program("proc main(x) { v := iSym(2); return v }")
    runs = [Interpreter(p, StateModel(CONCRETE, __import__("gilkit.allocator").allocator.ValueSupply(seed=9)))
            .run(conc_start(p, 0)).finals[0].outcome.value for _ in range(3)]
    assert runs[0] == runs[1] == runs[2]


def test_trace_sink_format():
    lines = []
    p = parse_program("proc main(x) { goto [x] 2; return 0; return 1 }")
    SI(p, trace_sink=lines.append).run(sym_start(p))
    assert lines[0] == "0 | goto [x] 2 | Cont | #x"
    assert all(len(l.split(" | ")) == 4 for l in lines)


# -- spec use -------------------------------------------------------------------------

READ = """
spec read(x) [[ #x : <cell>(#x; #v) ]] [[ <cell>(#x; #v) ]] returns #v
proc read(x) { v := [load](x); return v }
proc main(x) { y := read(x) with {#v -> 5}; return y }
proc pos(x) { y := nonneg(x) with {}; return y }
spec nonneg(x) [[ #x : emp /\\ #x > 0 ]] [[ emp /\\ #x > 0 ]] returns true
proc nonneg(x) { return true }
"""


def test_spec_call_success():
    p = parse_program(READ)
    h = Heap([(Lit(Loc("l0")), Lit(5))])
    st = State(h, Store({"x": Lit(Loc("l0"))}))
    (f,) = SI(p, specs=True).run(Config(st, (Frame("main"),), 0)).finals
    assert f.outcome.kind is Kind.NORMAL and f.outcome.value == Lit(5)
    assert f.state.mem == h
    assert f.trace == ("main:0", "main:1")


def test_spec_call_on_empty_heap_misses():
    p = parse_program(READ)
    st = State(Heap(), Store({"x": Lit(Loc("l0"))}))
    (f,) = SI(p, specs=True).run(Config(st, (Frame("main"),), 0)).finals
    assert f.outcome.kind is Kind.MISS


def test_spec_call_with_contradicted_pure_pre_is_an_error():
    p = parse_program(READ)
    st = State(Heap(), Store({"x": SVar("n")}), pc=parse_expr("#n < 0"))
    (f,) = SI(p, specs=True).run(Config(st, (Frame("pos"),), 0)).finals
    assert f.outcome.kind is Kind.FAIL


def test_annotated_call_without_spec_is_a_fault():
    p = parse_program("proc f(x) { return x } proc main(x) { y := f(x) with {}; return y }")
    with pytest.raises(EngineFault):
        SI(p, specs=True).run(sym_start(p))
    (f,) = SI(p).run(sym_start(p)).finals
    assert f.outcome.value == SVar("x")


# -- brute-force path oracle ------------------------------------------------------------

def random_branchy(rng: random.Random) -> str:
    """A loop-free main over one integer input with at most four gotos.

    Command i of the list sits at index i + 1, so jump targets start at i + 3 to keep the
    taken and fall-through labels distinct.
    """
    n = rng.randint(4, 9)
    cmds, gotos = [], 0
    for i in range(n - 1):
        r = rng.random()
        if r < 0.4 and gotos < 4 and i + 3 <= n:
            gotos += 1
            g = f"{rng.choice(['x', 'y'])} {rng.choice(['<', '=', '>'])} {rng.randint(-2, 3)}"
            cmds.append(f"goto [{g}] {rng.randint(i + 3, n)}")
        elif r < 0.7:
            cmds.append(f"y := {rng.choice(['x', 'y'])} {rng.choice(['+', '-'])} {rng.randint(0, 2)}")
        elif r < 0.8:
            cmds.append(f"return {rng.choice(['x', 'y'])}")
        else:
            cmds.append(f"goto [x * 2 > y] {rng.randint(i + 3, n)}" if i + 3 <= n else "y := y")
    cmds.append("return y")
    return "proc main(x) { y := x; " + "; ".join(cmds) + " }"


def concrete_paths(p, domain) -> set:
    out = set()
    for v in domain:
        run = CI(p).run(conc_start(p, v))
        assert run.done
        out.add(run.finals[0].trace)
    return out


@given(st.integers(0, 10**6))
def test_finals_match_path_oracle(seed):
    p = parse_program(random_branchy(random.Random(seed)))
    start = sym_start(p)
    st0 = State(start.state.mem, start.state.store, start.state.alloc, parse_expr("typeof(#x) = Int"))
    run = SI(p).run(Config(st0, start.stack, 0))
    assert run.done
    sym = {f.trace for f in run.finals}
    assert len(sym) == len(run.finals)
    assert sym == concrete_paths(p, range(-12, 13))


@given(st.integers(0, 10**6))
def test_coverage_on_every_step(seed):
    p = parse_program(random_branchy(random.Random(seed)))
    mon = CoverageMonitor()
    SI(p, observer=mon).run(sym_start(p))
    assert mon.failures == [] and mon.checked > 0
