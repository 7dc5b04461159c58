import itertools
import os
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from gilkit import solver
from gilkit.ops import conj, evaluate, mk_not, simplify
from gilkit.parser import parse_expr
from gilkit.syntax import BinOp, EList, Lit, SVar, TRUE, UnOp, subterms
from gilkit.values import TYPES

INTS = ["i0", "i1", "i2"]
BOOLS = ["b0", "b1"]


# -- brute-force oracle -------------------------------------------------------------

def oracle_domain(pi) -> list[int]:
    """The bounded integer domain: small integers plus each literal and its neighbours."""
    lits = {s.value for s in subterms(pi) if type(s) is Lit and type(s.value) is int}
    return sorted(set(range(-3, 5)) | {c + d for c in lits for d in (-1, 0, 1)})


def oracle_models(pi, ints, bools):
    dom = oracle_domain(pi)
    for iv in itertools.product(dom, repeat=len(ints)):
        for bv in itertools.product([False, True], repeat=len(bools)):
            env = dict(zip(ints, iv)) | dict(zip(bools, bv))
            if solver.holds(pi, env):
                yield env


def typed(pi, ints, bools):
    decl = [BinOp("=", UnOp("typeof", SVar(n)), Lit(TYPES["Int"])) for n in ints]
    decl += [BinOp("=", UnOp("typeof", SVar(n)), Lit(TYPES["Bool"])) for n in bools]
    return conj(*decl, pi)


_int_term = st.recursive(
    st.one_of(st.sampled_from(INTS).map(SVar), st.integers(-2, 3).map(Lit)),
    lambda sub: st.tuples(st.sampled_from(["+", "-"]), sub, sub).map(lambda t: BinOp(*t)),
    max_leaves=3)
_atom = st.one_of(
    st.tuples(st.sampled_from(["<", "<=", "="]), _int_term, _int_term).map(lambda t: BinOp(*t)),
    st.sampled_from(BOOLS).map(SVar))
_formula = st.recursive(
    _atom,
    lambda sub: st.one_of(sub.map(lambda a: UnOp("not", a)),
                          st.tuples(st.sampled_from(["and", "or"]), sub, sub).map(lambda t: BinOp(*t))),
    max_leaves=5)


@given(_formula)
def test_sat_agrees_with_brute_force(pi):
    full = typed(pi, INTS, BOOLS)
    v = solver.sat(full)
    expected = next(oracle_models(full, INTS, BOOLS), None)
    # the solver's domain contains the oracle's, plus comparison boundary points
    if isinstance(v, solver.Sat):
        assert solver.holds(full, v.model)
    else:
        assert isinstance(v, solver.Unsat)
        assert expected is None


@given(_formula)
def test_simplify_preserves_verdict(pi):
    full = typed(pi, INTS, BOOLS)
    assert type(solver.sat(full)) is type(solver.sat(simplify(full)))


@given(_formula, _formula)
def test_conjunction_entails_its_part(p, q):
    assert solver.entails(typed(conj(p, q), INTS, BOOLS), p) is True


@given(_formula)
def test_models_are_distinct_and_genuine(pi):
    full = typed(pi, INTS, BOOLS)
    ms = solver.sample_models(full, 4, extra=INTS + BOOLS, seed=1)
    keys = {tuple(sorted(m.items())) for m in ms}
    assert len(keys) == len(ms)
    assert all(solver.holds(full, m) for m in ms)
    n_all = sum(1 for _ in oracle_models(full, INTS, BOOLS))
    assert min(4, n_all) <= len(ms) <= 4


# -- spec examples ----------------------------------------------------------------------

def test_simplify_examples():
    assert simplify(parse_expr("1 + 2 = 3")) == TRUE
    assert simplify(parse_expr("#x and true")) == SVar("x")
    assert simplify(parse_expr("not (#x = #x)")) == Lit(False)


def test_sat_examples():
    assert isinstance(solver.sat(parse_expr("#x and (not #x)")), solver.Unsat)
    v = solver.sat(parse_expr("#i > 0 and #i < 2"))
    assert isinstance(v, solver.Sat) and v.model == {"i": 1}
    # the model is unique in the bounded domain
    assert list(oracle_models(parse_expr("#i > 0 and #i < 2"), ["i"], [])) == [{"i": 1}]
    v = solver.sat(TRUE)
    assert isinstance(v, solver.Sat) and v.model == {}


def test_entails_examples():
    assert solver.entails(parse_expr("#x and #y"), SVar("x")) is True
    assert solver.entails(SVar("x"), parse_expr("#x and #y")) is False
    assert solver.counterexample(SVar("x"), parse_expr("#x and #y")) == {"x": True, "y": False}
    p = parse_expr("#i + 1 < #j")
    assert solver.entails(p, p) is True


def test_smt_export_examples():
    assert solver.export_smtlib2(SVar("x")) == "(declare-const x Bool)(assert x)(check-sat)"
    assert solver.export_smtlib2(parse_expr("#i = 3")) == "(declare-const i Int)(assert (= i 3))(check-sat)"
    with pytest.raises(solver.Unsupported):
        solver.export_smtlib2(BinOp("=", SVar("l"), EList((Lit(1), Lit(2)))))


def test_linear_boundaries_outside_literal_neighbourhoods():
    v = solver.sat(parse_expr("#x - 2 > 3"))
    assert isinstance(v, solver.Sat) and v.model["x"] > 5
    v = solver.sat(parse_expr("typeof(#x) = Int and not (#x * 2 > #x - 4)"))
    assert isinstance(v, solver.Sat) and v.model["x"] <= -4
    v = solver.sat(parse_expr("(#x - 1) - 2 > 2 and #x < 7"))
    assert isinstance(v, solver.Sat) and v.model == {"x": 6}


def test_uninterpreted_locations_with_disequalities():
    pi = parse_expr("typeof(#a) = Loc and typeof(#b) = Loc and typeof(#c) = Loc "
                    "and not (#a = #b) and not (#b = #c) and not (#a = #c)")
    v = solver.sat(pi)
    assert isinstance(v, solver.Sat) and len(set(v.model.values())) == 3


def test_lists_up_to_length_four():
    v = solver.sat(parse_expr("len(#l) = 3 and hd(#l) = 1"))
    assert isinstance(v, solver.Sat)
    assert len(v.model["l"]) == 3 and v.model["l"][0] == 1
    assert isinstance(solver.sat(parse_expr("len(#l) = 3 and hd(#l) = 1 and not (typeof(#l) = List)")),
                      solver.Unsat)


def test_domain_size_environment_override():
    code = ("from gilkit import solver; from gilkit.parser import parse_expr;"
            "print(type(solver.sat(parse_expr('#i > 4 and #i < 6 and #i * 1 = #i'))).__name__)")
    env = dict(os.environ, GIL_SOLVER_DOMAIN="12")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "Sat"


def test_unknown_is_not_unsat_under_tiny_budget():
    cfg = solver.SolverConfig(budget=5)
    pi = parse_expr("#a + #b + #c = 7 and #a < #b and #b < #c")
    r = solver.sat(pi, config=cfg)
    assert isinstance(r, solver.Unknown)
    assert solver.entails(pi, Lit(False), config=cfg) is solver.UNKNOWN


def test_sat_is_deterministic():
    pi = parse_expr("#i < #j and #j < 3")
    assert [solver.sat(pi) for _ in range(3)] == [solver.sat(pi)] * 3
    assert evaluate(pi, solver.sat(pi).model) is True
    assert mk_not(TRUE) == Lit(False)
