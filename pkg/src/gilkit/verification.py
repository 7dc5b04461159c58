"""Verifying procedure specifications by symbolic execution.

A spec ``{x̂, P} f(x) {Q}^ê`` is verified by producing P into an empty state
whose store maps x to x̂, running f's body to termination with spec use
enabled, and checking every final configuration returns normally in a state
that satisfies Q with the right return value.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from . import solver
from .allocator import AllocRecord, Range, alloc
from .assertions import _learn_pure, apply, consume_asrt, produce_state
from .heap import SYMBOLIC
from .interpreter import DEFAULT_FUEL, Config, Frame, Interpreter, Kind, branch_name
from .memory import MemoryModel, Res
from .ops import conj, mk_eq
from .printer import show_expr
from .state import State, StateModel, Store
from .syntax import (Atom, EngineFault, Expr, Lit, MemAsrt, ProcSpec, Prog, SVar, StateAsrt, TRUE, subterms,
                     svars)
from .values import Loc


class Verdict(str, Enum):
    VERIFIED = "Verified"
    VACUOUS = "Vacuous"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class VerifyResult:
    spec: str
    verdict: Verdict
    reason: str = ""
    branch: str | None = None
    model: dict | None = None
    finals: int = 0

    def to_json(self) -> dict:
        from .values import value_to_json
        out = {"spec": self.spec, "verdict": self.verdict.value, "reason": self.reason,
               "finals": self.finals}
        if self.branch is not None:
            out["branch"] = self.branch
        if self.model is not None:
            out["model"] = {k: value_to_json(v) for k, v in sorted(self.model.items())}
        return out


class SpecError(ValueError):
    """A specification that cannot be registered."""


def _asrt_locs(a: StateAsrt) -> set:
    out = set()
    exprs = [a.pure] + [e for at in a.mem.atoms for e in at.ins + at.outs]
    for e in exprs:
        for t in subterms(e):
            if type(t) is Lit and type(t.value) is Loc:
                out.add(t.value)
    return out


def check_registration(prog: Prog, spec: ProcSpec) -> None:
    """Reject specs for unknown procedures or whose post adds pure facts."""
    if spec.proc not in prog.procs:
        raise SpecError(f"specification for unknown procedure {spec.proc!r}")
    if prog.procs[spec.proc].param != spec.param:
        raise SpecError(f"{spec.proc}: specification parameter {spec.param!r} differs from procedure")
    r = solver.entails(spec.pre.pure, spec.post.pure)
    if r is solver.UNKNOWN:
        raise SpecError(f"{spec.proc}: cannot decide whether the pre's pure part implies the post's")
    if r is not True:
        raise SpecError(f"{spec.proc}: post pure part {show_expr(spec.post.pure)} is not implied "
                        f"by pre pure part {show_expr(spec.pre.pure)}")


def initial_state(spec: ProcSpec, mm: MemoryModel = SYMBOLIC) -> tuple[State, dict]:
    names = svars(spec.pre) | {spec.param_svar}
    theta = {s: SVar(s) for s in names}
    reserved = sorted(names | svars(spec.post))
    locs = sorted(_asrt_locs(spec.pre) | _asrt_locs(spec.post), key=lambda l: l.name)
    # locations the precondition owns through symbolic keys are in use as well
    keys = sorted({e.name for at in spec.pre.mem.atoms for e in at.ins if type(e) is SVar})
    rec = AllocRecord.of({Range.SVARS: [SVar(s) for s in reserved],
                          Range.LOCS: locs + [SVar(k) for k in keys]})
    st = State(mm.empty(), Store({spec.param: SVar(spec.param_svar)}), rec, TRUE)
    return st, theta


def check_post(mm: MemoryModel, st: State, theta: dict, post: StateAsrt, ret: Expr, value):
    """Does the final state satisfy the post with return value ``value``? True/False/UNKNOWN."""
    theta = dict(theta)
    if type(ret) is SVar and ret.name not in theta:
        theta[ret.name] = value
    bare_outs = {e.name for at in post.mem.atoms for e in at.outs if type(e) is SVar}
    rec = st.alloc
    # existentials only reachable through in-parameters get fresh names up front
    pending = sorted(svars(post.mem) - set(theta) - bare_outs)
    rec, xs = alloc(rec, len(pending), Range.SVARS)
    theta.update(zip(pending, xs))
    try:
        branches = consume_asrt(mm, st.mem, theta, post.mem, st.pc)
    except EngineFault:
        return False
    unknown = False
    for o in branches:
        if o.result is not Res.S or not mm.is_empty(o.mem):
            continue
        th = _learn_pure(mm, o.subst, post.pure)
        rest = sorted((svars(post.pure) | svars(ret)) - set(th))
        _, ys = alloc(rec, len(rest), Range.SVARS)
        th.update(zip(rest, ys))
        goal = conj(o.pc, apply(mm, th, post.pure), mk_eq(apply(mm, th, ret), value))
        r = solver.entails(st.pc, goal)
        if r is True:
            return True
        if r is solver.UNKNOWN:
            unknown = True
    return solver.UNKNOWN if unknown else False


def _model(pc: Expr) -> dict | None:
    r = solver.sat(pc)
    return dict(r.model) if isinstance(r, solver.Sat) else None


def verify_spec(prog: Prog, spec: ProcSpec, fuel: int = DEFAULT_FUEL,
                mm: MemoryModel = SYMBOLIC) -> VerifyResult:
    check_registration(prog, spec)
    sm = StateModel(mm)
    st0, theta = initial_state(spec, mm)
    produced = [o for o in produce_state(mm, st0, theta, spec.pre) if o.result is Res.S]
    if not produced:
        return VerifyResult(spec.proc, Verdict.VACUOUS, "precondition cannot be produced")
    it = Interpreter(prog, sm, specs=True)
    starts = [Config(o.state, (Frame(spec.proc),), 0, branch=(j,) if len(produced) > 1 else ())
              for j, o in enumerate(produced)]
    run = it.run(starts, fuel)
    if not run.done:
        return VerifyResult(spec.proc, Verdict.INCONCLUSIVE, f"fuel exhausted after {run.steps} steps")
    finals = run.finals
    inconclusive = None
    for cf in finals:
        bname = branch_name(cf.branch)
        if cf.outcome.kind is not Kind.NORMAL:
            sat = solver.sat(cf.pc)
            if isinstance(sat, solver.Sat):
                return VerifyResult(spec.proc, Verdict.REFUTED,
                                    f"{cf.outcome.kind.value} outcome at {cf.trace[-1]}",
                                    bname, dict(sat.model), len(finals))
            if isinstance(sat, solver.Unknown):
                inconclusive = inconclusive or f"solver unknown on branch {bname}"
            continue
        ok = check_post(mm, cf.state, theta, spec.post, spec.ret, cf.outcome.value)
        if ok is solver.UNKNOWN or (ok is not True and cf.unverified):
            inconclusive = inconclusive or f"postcondition undecided on branch {bname}"
        elif ok is not True:
            return VerifyResult(spec.proc, Verdict.REFUTED, "postcondition not established",
                                bname, _model(cf.pc), len(finals))
    if inconclusive:
        return VerifyResult(spec.proc, Verdict.INCONCLUSIVE, inconclusive, finals=len(finals))
    return VerifyResult(spec.proc, Verdict.VERIFIED, finals=len(finals))


def verify_all(prog: Prog, fuel: int = DEFAULT_FUEL, only: str | None = None) -> list[VerifyResult]:
    names = sorted(prog.specs) if only is None else [only]
    return [verify_spec(prog, prog.specs[n], fuel) for n in names]


def framed(spec: ProcSpec, frame: MemAsrt) -> ProcSpec:
    return replace(spec, pre=StateAsrt(spec.pre.mem.star(frame), spec.pre.pure),
                   post=StateAsrt(spec.post.mem.star(frame), spec.post.pure))


def check_compositionality(prog: Prog, spec: ProcSpec, frame: MemAsrt,
                           fuel: int = DEFAULT_FUEL) -> VerifyResult:
    """Verify {x̂, P * R} f(x) {Q * R}^ê against a program using the same body."""
    s = framed(spec, frame)
    return verify_spec(Prog(prog.procs, {**prog.specs, spec.proc: s}), s, fuel)


def random_frame(rng, spec: ProcSpec, max_atoms: int = 2) -> MemAsrt:
    """A frame over fresh symbolic keys, disjoint from anything the spec names."""
    taken = svars(spec.pre) | svars(spec.post) | {spec.param_svar}
    atoms = []
    n = rng.randint(1, max_atoms)
    i = 0
    for _ in range(n):
        while f"fz{i}" in taken:
            i += 1
        key = SVar(f"fz{i}")
        i += 1
        if rng.random() < 0.25:
            atoms.append(Atom("freed", (key,), ()))
        else:
            val = rng.choice([Lit(0), Lit(1), Lit("a"), Lit(True), SVar(f"fw{i}")])
            atoms.append(Atom("cell", (key,), (val,)))
    return MemAsrt.of(atoms)
