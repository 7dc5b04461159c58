import json

import pytest

from gilkit import cli
from gilkit.corpus import specs_source


@pytest.fixture
def gil(tmp_path):
    def write(text: str, name: str = "p.gil") -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


def test_run_normal(gil, capsys):
    code, out = run(capsys, "run", gil("proc main(x) { return x + 1 }"), "--arg", "4")
    assert code == cli.EXIT_OK and "Normal(5)" in out.out


def test_run_fail_and_miss(gil, capsys):
    assert run(capsys, "run", gil("proc main(x) { fail 1 }"))[0] == cli.EXIT_FAIL
    p = gil("proc main(x) { l := uSym(1); l := hd(l); v := [load](l); return v }")
    assert run(capsys, "run", p)[0] == cli.EXIT_MISS


def test_run_fuel(gil, capsys):
    code, out = run(capsys, "run", gil("proc main(x) { goto 0 }"), "--fuel", "10")
    assert code == cli.EXIT_FUEL and "FuelExhausted" in out.out


def test_usage_errors(gil, capsys):
    assert run(capsys, "run", "/nonexistent.gil")[0] == cli.EXIT_USAGE
    assert run(capsys, "run", gil("proc main(x) { return"))[0] == cli.EXIT_USAGE
    assert run(capsys, "run", gil("proc f(x) { return x }"))[0] == cli.EXIT_USAGE
    assert run(capsys, "bogus")[0] == cli.EXIT_USAGE
    assert run(capsys, "run", gil("proc main(x) { return x }"), "--fuel", "-1")[0] == cli.EXIT_USAGE
    assert run(capsys, "check-model", "--mutant", "no-such-mutant")[0] == cli.EXIT_USAGE


def test_symexec_reports_every_branch_as_json(gil, capsys):
    p = gil("proc main(x) { goto [x > 0] 2; fail x; return x }")
    code, out = run(capsys, "symexec", p, "--json")
    assert code == cli.EXIT_FAIL
    rep = json.loads(out.out[out.out.index("{"):])
    assert {f["outcome"] for f in rep["finals"]} == {"Fail", "Normal"}
    (failing,) = [f for f in rep["finals"] if f["outcome"] == "Fail"]
    assert failing["models"]


def test_symexec_emits_smtlib(gil, capsys, tmp_path):
    p = gil("proc main(x) { goto [x > 0] 2; return 0; return 1 }")
    assert run(capsys, "symexec", p, "--emit-smt", str(tmp_path / "smt"))[0] == cli.EXIT_OK
    files = sorted((tmp_path / "smt").glob("*.smt2"))
    assert len(files) == 2 and "(check-sat)" in files[0].read_text()


def test_emit_ast(gil, capsys):
    code, out = run(capsys, "run", gil("proc main(x) { return x }"), "--emit-ast")
    assert code == cli.EXIT_OK and [p["name"] for p in json.loads(out.out)["procs"]] == ["main"]


def test_verify_exit_codes(gil, capsys):
    assert run(capsys, "verify", gil(specs_source()))[0] == cli.EXIT_REFUTED
    assert run(capsys, "verify", gil(specs_source()), "--spec", "read")[0] == cli.EXIT_OK
    assert run(capsys, "verify", gil(specs_source()), "--spec", "unsat_pre")[0] == cli.EXIT_OK
    loop = gil("spec f(x) [[ #x : emp ]] [[ emp ]] returns null proc f(x) { goto 0 }")
    assert run(capsys, "verify", loop, "--fuel", "20")[0] == cli.EXIT_INCONCLUSIVE
    assert run(capsys, "verify", gil("proc main(x) { return x }"))[0] == cli.EXIT_USAGE


def test_check_model_passes_and_planted_mutant_fails(capsys):
    assert run(capsys, "check-model", "--trials", "20")[0] == cli.EXIT_OK
    code, out = run(capsys, "check-model", "--trials", "40", "--mutant", "write-on-error")
    assert code == cli.EXIT_PROPERTY and "counterexample" in out.out


def test_fuzz_diff_small(capsys):
    code, out = run(capsys, "fuzz-diff", "--programs", "10", "--models", "2", "--frames", "10")
    assert code == cli.EXIT_OK and "GIL-BC" in out.out


def test_suite_json_is_byte_identical_without_timing(capsys):
    outs = [run(capsys, "fuzz-diff", "--programs", "5", "--json")[1].out for _ in range(2)]
    assert outs[0] == outs[1]
    t = run(capsys, "fuzz-diff", "--programs", "2", "--json", "--timing")[1].out
    assert '"seconds"' in t
