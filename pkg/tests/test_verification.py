import random

import pytest

from gilkit.corpus import specs_source
from gilkit.heap import SYMBOLIC, Heap
from gilkit.parser import parse_asrt, parse_program
from gilkit.state import State, Store
from gilkit.syntax import Lit, MemAsrt, SVar, TRUE
from gilkit.values import Loc
from gilkit.verification import (SpecError, Verdict, check_compositionality, check_post, check_registration,
                                 random_frame, verify_all, verify_spec)

# frozen from a run of the verifier over the bundled corpus, each checked by hand
# against the procedure body
MATRIX = {
    "dispose": Verdict.VERIFIED,
    "dispose_again": Verdict.VACUOUS,
    "double_free": Verdict.REFUTED,
    "leak": Verdict.REFUTED,
    "mkcell": Verdict.VERIFIED,
    "nonneg": Verdict.VERIFIED,
    "read": Verdict.VERIFIED,
    "read_framed": Verdict.VERIFIED,
    "read_off": Verdict.REFUTED,
    "swap": Verdict.VERIFIED,
    "unsat_pre": Verdict.VACUOUS,
    "write7": Verdict.VERIFIED,
    "write7_framed": Verdict.VERIFIED,
    "write7_lazy": Verdict.REFUTED,
}


@pytest.fixture(scope="module")
def corpus():
    return parse_program(specs_source())


def test_verdict_matrix(corpus):
    got = {r.spec: r.verdict for r in verify_all(corpus)}
    assert got == MATRIX


def test_refutations_carry_branch_and_model(corpus):
    for r in verify_all(corpus):
        if r.verdict is Verdict.REFUTED:
            assert r.branch is not None and r.reason
            assert r.model is not None


WRITE7 = """
spec write7(x) [[ #x : <cell>(#x; #v) ]] [[ <cell>(#x; 7) ]] returns true
proc write7(x) { u := [store]([x, 7]); return true }
"""


def test_write7_verified_and_lazy_refuted():
    p = parse_program(WRITE7)
    assert verify_spec(p, p.specs["write7"]).verdict is Verdict.VERIFIED
    lazy = parse_program(WRITE7.replace("u := [store]([x, 7]); ", ""))
    r = verify_spec(lazy, lazy.specs["write7"])
    assert r.verdict is Verdict.REFUTED and "postcondition" in r.reason


def test_unsat_pure_pre_is_vacuous():
    p = parse_program("spec f(x) [[ #x : emp /\\ #x > 1 /\\ #x < 1 ]] [[ emp /\\ #x > 1 /\\ #x < 1 ]] "
                      "returns null proc f(x) { return null }")
    assert verify_spec(p, p.specs["f"]).verdict is Verdict.VACUOUS


def test_fuel_exhaustion_is_inconclusive():
    p = parse_program("spec f(x) [[ #x : emp ]] [[ emp ]] returns null proc f(x) { goto 0 }")
    r = verify_spec(p, p.specs["f"], fuel=20)
    assert r.verdict is Verdict.INCONCLUSIVE and "fuel" in r.reason


def test_registration_rejects_new_pure_facts():
    p = parse_program("spec f(x) [[ #x : emp ]] [[ emp /\\ #x > 0 ]] returns null proc f(x) { return null }")
    with pytest.raises(SpecError):
        check_registration(p, p.specs["f"])
    with pytest.raises(SpecError):
        verify_spec(p, p.specs["f"])


def test_registration_rejects_unknown_procedure():
    p = parse_program("spec g(x) [[ #x : emp ]] [[ emp ]] returns null proc f(x) { return null }")
    with pytest.raises(SpecError):
        check_registration(p, p.specs["g"])


def test_check_post_examples():
    st_empty = State(Heap(), Store(), pc=TRUE)
    assert check_post(SYMBOLIC, st_empty, {}, parse_asrt("emp"), Lit(None), Lit(None)) is True
    l0 = Lit(Loc("l0"))
    st9 = State(Heap([(l0, Lit(9))]), Store(), pc=TRUE)
    assert check_post(SYMBOLIC, st9, {"x": l0}, parse_asrt("<cell>(#x; #y)"), SVar("y"), Lit(9)) is True
    assert check_post(SYMBOLIC, st9, {"x": l0}, parse_asrt("<cell>(#x; #y)"), SVar("y"), Lit(8)) is False
    assert check_post(SYMBOLIC, st9, {}, parse_asrt("emp"), Lit(True), Lit(True)) is False


def test_compositionality_examples(corpus):
    spec = corpus.specs["write7"]
    assert check_compositionality(corpus, spec, MemAsrt()).verdict is verify_spec(corpus, spec).verdict
    disjoint = parse_asrt("<cell>(#z; #w)").mem
    assert check_compositionality(corpus, spec, disjoint).verdict is Verdict.VERIFIED
    dup = parse_asrt("<cell>(#x; #u)").mem
    assert check_compositionality(corpus, spec, dup).verdict is Verdict.VACUOUS


def test_random_frames_are_disjoint_from_the_spec(corpus):
    rng = random.Random(3)
    for name in ("read", "swap"):
        spec = corpus.specs[name]
        for _ in range(10):
            f = random_frame(rng, spec)
            names = {e.name for a in f.atoms for e in a.ins if type(e) is SVar}
            assert names and names.isdisjoint({spec.param_svar} | {"a", "b", "v"})


def test_compositionality_on_twenty_frames(corpus):
    rng = random.Random(0)
    for name, v in MATRIX.items():
        if v is Verdict.VERIFIED:
            for _ in range(20):
                r = check_compositionality(corpus, corpus.specs[name], random_frame(rng, corpus.specs[name]))
                assert r.verdict is Verdict.VERIFIED, (name, r)


def test_verify_result_json(corpus):
    (r,) = verify_all(corpus, only="read_off")
    j = r.to_json()
    assert j["verdict"] == "Refuted" and j["spec"] == "read_off" and "model" in j
