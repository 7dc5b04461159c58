import random

from hypothesis import given, strategies as st

from gilkit import solver
from gilkit.assertions import (consume_asrt, consume_state, produce_asrt, produce_state, resource,
                               resource_ins, satisfies)
from gilkit.harness.asrtprops import check_asrt_props, gen_assertion
from gilkit.harness.generators import conc_heap
from gilkit.heap import CONCRETE, SYMBOLIC, Heap
from gilkit.memory import Res
from gilkit.parser import parse_asrt, parse_expr
from gilkit.state import State, Store
from gilkit.syntax import Atom, Lit, MemAsrt, SVar, StateAsrt, TRUE
from gilkit.values import Loc

L0, L1 = Loc("l0"), Loc("l1")
CELL = parse_asrt("<cell>(#x; #v)")
TH = {"x": L0, "v": 5}


def test_consume_cell():
    (o,) = consume_asrt(CONCRETE, Heap([(L0, 5)]), TH, CELL.mem)
    assert o.result is Res.S and o.mem == Heap()


def test_consume_out_mismatch_is_an_error():
    (o,) = consume_asrt(CONCRETE, Heap([(L0, 5)]), {"x": L0, "v": 6}, CELL.mem)
    assert o.result is Res.E


def test_consume_absent_cell_misses():
    (o,) = consume_asrt(CONCRETE, Heap(), TH, CELL.mem)
    assert o.result is Res.M


def test_consume_binds_unbound_outs():
    (o,) = consume_asrt(CONCRETE, Heap([(L0, 9)]), {"x": L0}, CELL.mem)
    assert o.result is Res.S and o.subst["v"] == 9


def test_produce_cell_and_duplication():
    (o,) = produce_asrt(CONCRETE, Heap(), TH, CELL.mem)
    assert o.result is Res.S and o.mem == Heap([(L0, 5)])
    twice = MemAsrt.of([Atom("cell", (SVar("x"),), (SVar("v"),)), Atom("cell", (SVar("x"),), (SVar("w"),))])
    (o,) = produce_asrt(CONCRETE, Heap(), {**TH, "w": 1}, twice)
    assert o.result is Res.E
    h = Heap([(L1, 3)])
    (o,) = produce_asrt(CONCRETE, h, {}, MemAsrt())
    assert o.result is Res.S and o.mem == h


def test_resource_function():
    assert resource(CONCRETE, TH, CELL.mem) == Heap([(L0, 5)])
    assert resource(CONCRETE, TH, MemAsrt()) == Heap()
    dup = parse_asrt("<cell>(#x; #v) * <cell>(#x; #w)")
    assert resource(CONCRETE, {**TH, "w": 5}, dup.mem) is None


def test_resource_ins():
    assert resource_ins(CONCRETE, TH, MemAsrt()) == set()
    (ins,) = resource_ins(CONCRETE, TH, CELL.mem)
    assert ins[0] == "cell" and len(ins[1]) == 1
    both = parse_asrt("<cell>(#x; #v) * <freed>(#y;)").mem
    th = {**TH, "y": L1}
    assert resource_ins(CONCRETE, th, both) == resource_ins(CONCRETE, th, CELL.mem) | resource_ins(
        CONCRETE, th, parse_asrt("<freed>(#y;)").mem)


def test_star_is_taken_modulo_commutativity():
    a = parse_asrt("<cell>(#x; #v) * <freed>(#y;)")
    b = parse_asrt("<freed>(#y;) * <cell>(#x; #v)")
    assert a == b


def test_consume_state_pure_part():
    st0 = State(Heap([(Lit(L0), Lit(5))]), Store(), pc=TRUE)
    th = {"x": Lit(L0)}
    (o,) = consume_state(SYMBOLIC, st0, th, parse_asrt("<cell>(#x; #v) /\\ #v > 0"))
    assert o.result is Res.S and o.state.mem == Heap() and o.subst["v"] == Lit(5)
    (o,) = consume_state(SYMBOLIC, st0, th, parse_asrt("<cell>(#x; #v) /\\ #v > 9"))
    assert o.result is Res.E


def test_consume_state_extends_path_condition():
    st0 = State(Heap([(Lit(L0), SVar("n"))]), Store(), pc=parse_expr("typeof(#n) = Int"))
    outs = consume_state(SYMBOLIC, st0, {"x": Lit(L0)}, parse_asrt("<cell>(#x; #v) /\\ #v > 0"))
    s = next(o for o in outs if o.result is Res.S)
    e = next(o for o in outs if o.result is Res.E)
    assert solver.entails(s.state.pc, parse_expr("#n > 0")) is True
    assert solver.entails(e.state.pc, parse_expr("not (#n > 0)")) is True


def test_produce_state_with_unsat_pure_has_no_successors():
    st0 = State(Heap(), Store(), pc=TRUE)
    a = parse_asrt("<cell>(#x; #v) /\\ #v > 1 /\\ #v < 1")
    assert produce_state(SYMBOLIC, st0, {"x": Lit(L0), "v": SVar("v")}, a) == []


def test_satisfies_examples():
    assert satisfies(CONCRETE, Heap([(L0, 5)]), TRUE, TH, CELL) is True
    assert satisfies(CONCRETE, Heap(), TRUE, TH, CELL) is False
    assert satisfies(CONCRETE, Heap([(L0, 5), (L1, 1)]), TRUE, TH, CELL) is False
    h = Heap([(SVar("k"), Lit(5))])
    pc = parse_expr("typeof(#k) = Loc")
    assert satisfies(SYMBOLIC, h, pc, {"x": SVar("k"), "v": Lit(5)}, CELL) is True


@given(st.integers(0, 10**6))
def test_resource_satisfies_its_assertion(seed):
    rng = random.Random(seed)
    mem = conc_heap(rng)
    p, theta, _ = gen_assertion(rng, CONCRETE, mem)
    g = resource(CONCRETE, theta, p)
    if g is not None:
        assert satisfies(CONCRETE, g, TRUE, theta, StateAsrt(p, TRUE)) is True


@given(st.integers(0, 10**6))
def test_successful_consume_extracts_a_satisfying_part(seed):
    rng = random.Random(seed)
    mem = conc_heap(rng)
    p, theta, _ = gen_assertion(rng, CONCRETE, mem)
    for o in consume_state(CONCRETE, State(mem, Store()), theta, StateAsrt(p, TRUE)):
        if o.result is Res.S:
            part = resource(CONCRETE, o.subst, p)
            assert part is not None
            assert CONCRETE.compose(o.state.mem, part) == CONCRETE.normal(mem)
            assert satisfies(CONCRETE, part, TRUE, o.subst, StateAsrt(p, TRUE)) is True


def test_assertion_property_suite():
    rep = check_asrt_props(trials=150, seed=5)
    assert rep.passed, rep.summary()
    assert rep["MAC-BC/symbolic"].trials > 0 and rep["MAC-FS/symbolic"].trials > 0
