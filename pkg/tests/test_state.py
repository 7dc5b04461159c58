import pytest
from hypothesis import given, strategies as st

from gilkit import solver
from gilkit.allocator import AllocRecord, Range
from gilkit.heap import CONCRETE, SYMBOLIC, Heap
from gilkit.memory import Res
from gilkit.parser import parse_expr
from gilkit.state import (Assume, Eval, GetStore, ISymA, MemAct, Pair, Seq, SetStore, SetVar, State, StateModel,
                          Store, USymA)
from gilkit.syntax import EngineFault, Lit, SVar, TRUE
from gilkit.values import Loc, UNDEFINED

CSM, SSM = StateModel(CONCRETE), StateModel(SYMBOLIC)
L0, L1 = Loc("l0"), Loc("l1")


def test_eval_examples():
    assert CSM.eval_expr(parse_expr("2 + 3"), Store()) == 5
    assert SSM.eval_expr(parse_expr("x"), Store({"x": parse_expr("#x + 1")})) == parse_expr("#x + 1")
    assert CSM.eval_expr(parse_expr("hd([1, 2])"), Store()) == 1


def test_eval_unbound_variable_is_an_engine_fault():
    with pytest.raises(EngineFault):
        CSM.eval_expr(parse_expr("y"), Store())
    with pytest.raises(EngineFault):
        SSM.eval_expr(parse_expr("y"), Store())


def test_assume_examples():
    st0 = SSM.initial({"x": SVar("x")})
    (o,) = SSM.ea(st0, Assume(), SVar("x"))
    assert o.state.pc == SVar("x")
    assert SSM.ea(st0, Assume(), Lit(False)) == []
    assert SSM.ea(State(Heap(), Store(), pc=SVar("x")), Assume(), parse_expr("not #x")) == []


def test_usym_allocates_fresh_locations():
    rec = AllocRecord.of({Range.LOCS: [L0]})
    (o,) = CSM.ea(State(Heap(), Store(), rec), USymA(), 2)
    a, b = o.value
    assert a != b and L0 not in (a, b)
    assert set(o.state.alloc.get(Range.LOCS)) == {L0, a, b}


def test_isym_symbolic_and_concrete():
    (o,) = SSM.ea(SSM.initial(), ISymA(), Lit(2))
    assert [type(x) for x in o.value.items] == [SVar, SVar]
    (c,) = CSM.ea(CSM.initial(), ISymA(), 1)
    assert len(c.value) == 1 and c.state.alloc.get(Range.VALUES) == c.value


def test_assignment_is_eval_then_setvar():
    st0 = CSM.initial({"x": 4})
    (o,) = CSM.ea(st0, Seq(Eval(parse_expr("x + 1")), SetVar("y")))
    assert o.state.store["y"] == 5


def test_seq_short_circuits_on_failure():
    st0 = CSM.initial({"l": L0})
    outs = CSM.ea(st0, Seq(Eval(parse_expr("l")), Seq(MemAct("load"), SetVar("v"))))
    (o,) = outs
    assert o.result is Res.M and "v" not in o.state.store


def test_pair_returns_undefined_on_left_failure():
    (o,) = CSM.ea(CSM.initial(), Pair(MemAct("load"), SetVar("v")), (L0, 1))
    assert o.result is Res.M and o.value == (False, UNDEFINED)


def test_store_round_trips_through_serialisation():
    s = Store({"b": 2, "a": (1, True)})
    ser = CSM.serialize_store(s)
    assert ser == (("a", (1, True)), ("b", 2))
    assert CSM.deserialize_store(ser) == s
    (o,) = CSM.ea(CSM.initial(), SetStore(), ser)
    (g,) = CSM.ea(o.state, GetStore())
    assert g.value == ser


_prog_values = st.one_of(st.integers(-3, 3), st.booleans())


@given(st.lists(st.tuples(st.sampled_from("xyz"), _prog_values), max_size=3),
       st.sampled_from(["x", "y", "z"]), st.integers(-3, 3))
def test_composite_equals_two_step_run(binds, var, k):
    st0 = CSM.initial(dict(binds))
    e = parse_expr(f"{k} + 1")
    (a,) = CSM.ea(st0, Seq(Eval(e), SetVar(var)))
    (m1,) = CSM.ea(st0, Eval(e))
    (m2,) = CSM.ea(m1.state, SetVar(var), m1.value)
    assert (a.state, a.value) == (m2.state, m2.value)


# -- composition --------------------------------------------------------------------

def test_compose_with_unit():
    s = SSM.initial({"x": Lit(1)}, Heap([(Lit(L0), Lit(1))]))
    assert SSM.compose(s, SSM.unit()) == s


def test_compose_needs_exactly_one_store():
    a = CSM.initial({"x": 1})
    assert CSM.compose(a, CSM.initial({"y": 2})) is None
    assert CSM.compose(CSM.unit(), CSM.unit()) is None


def test_compose_rejects_overlapping_cells():
    a = CSM.initial({"x": 1}, Heap([(L0, 1)]))
    b = CSM.initial({}, Heap([(L0, 2)]))
    assert CSM.compose(a, b) is None


def test_symbolic_compose_adds_separation():
    a = SSM.initial({"x": Lit(1)}, Heap([(SVar("a"), Lit(1))]))
    b = SSM.initial({}, Heap([(SVar("b"), Lit(2))]))
    c = SSM.compose(a, b)
    assert solver.entails(c.pc, parse_expr("not (#a = #b)")) is True
    assert SSM.compose(a, State(b.mem, Store(), pc=parse_expr("#a = #b"))) is None


def test_state_property_suite_small():
    from gilkit.harness.conformance import check_state_props
    rep = check_state_props(trials=40, seed=3)
    assert rep.passed, rep.summary()
