"""Single-trace, collecting and spec-using execution of GIL programs.

One ``Interpreter`` serves both modes; the mode comes from its state model.
Configurations carry their executed-command trace, a branch id (the tuple of
successor indices chosen at branching steps), an unverified flag raised when
the solver answered Unknown for a successor context, and a log of the
symbols handed out by uSym/iSym, which concrete replay uses to reproduce a
symbolic trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Iterable

from . import mutants, solver
from .allocator import EMPTY as EMPTY_ALLOC
from .assertions import apply as apply_subst
from .assertions import consume_state, produce_state
from .memory import Res
from .printer import show_cmd, show_expr
from .state import (Assume, Eval, GetStore, ISymA, MemAct, Pair, Seq, SetStore, SetVar, State,
                    StateModel, Store, USymA)
from .syntax import (Action, Assign, Call, EngineFault, Expr, Fail, ISym, IfGoto, Lit, Prog,
                     Return, TRUE, UnOp, USym, Vanish, cmd_at, svars)
from .values import ProcId

DEFAULT_FUEL = 10_000


class Kind(str, Enum):
    CONT = "Cont"
    NORMAL = "Normal"
    FAIL = "Fail"
    MISS = "Miss"


@dataclass(frozen=True)
class Outcome:
    kind: Kind = Kind.CONT
    value: Any = None


CONT = Outcome()


@dataclass(frozen=True)
class Frame:
    """Stack frame. The bottom frame has only ``proc``."""

    proc: str
    var: str | None = None
    store: Store | None = None
    ret: int | None = None


@dataclass(frozen=True)
class Config:
    state: State
    stack: tuple                      # top frame first
    index: int = 0
    outcome: Outcome = CONT
    trace: tuple = ()
    branch: tuple = ()
    unverified: bool = False
    fresh: tuple = ()                 # (("u"|"i"), items) in allocation order

    @property
    def final(self) -> bool:
        return self.outcome.kind is not Kind.CONT

    @property
    def pc(self) -> Expr:
        return self.state.pc


@dataclass
class RunResult:
    done: bool
    configs: list
    steps: int

    @property
    def finals(self) -> list:
        return [c for c in self.configs if c.final]


def branch_name(b: tuple) -> str:
    return ".".join(map(str, b)) if b else "root"


def _proc_name(v) -> str | None:
    if type(v) is Lit:
        v = v.value
    return v.name if type(v) is ProcId else None


class Interpreter:
    def __init__(self, prog: Prog, sm: StateModel, *, specs: bool = False,
                 observer: Callable | None = None, trace_sink: Callable[[str], None] | None = None):
        self.prog = prog
        self.sm = sm
        self.mm = sm.mm
        self.specs = specs
        self.observer = observer
        self.trace_sink = trace_sink

    # -- setup
    def initial(self, proc: str = "main", store: dict | None = None, state: State | None = None) -> Config:
        if proc not in self.prog.procs:
            raise EngineFault(f"no procedure {proc!r}")
        if state is None:
            state = self.sm.initial(store)
        return Config(state, (Frame(proc),), 0)

    # -- one step
    def step(self, cf: Config) -> list[Config]:
        if cf.final:
            raise EngineFault("final configurations are never stepped")
        cmd = cmd_at(self.prog, cf.stack, cf.index)
        label = f"{cf.stack[0].proc}:{cf.index}"
        succ = self._step(cf, cmd)
        many = len(succ) > 1
        out = []
        for j, s in enumerate(succ):
            s = replace(s, trace=cf.trace + (label,), branch=cf.branch + (j,) if many else cf.branch)
            if self.sm.symbolic and s.pc is not cf.pc and s.pc != cf.pc and not s.unverified:
                if solver.is_sat(s.pc) is solver.UNKNOWN:
                    s = replace(s, unverified=True)
            out.append(s)
        if self.observer is not None:
            self.observer(cf, cmd, out)
        if self.trace_sink is not None:
            for s in out:
                self.trace_sink(f"{branch_name(s.branch)} | {show_cmd(cmd)} | "
                                f"{_show_outcome(s.outcome)} | {show_expr(s.pc)}")
        return out

    def _next(self, cf: Config, st: State, index: int | None = None, **kw) -> Config:
        return replace(cf, state=st, index=cf.index + 1 if index is None else index, **kw)

    def _final(self, cf: Config, st: State, kind: Kind, v) -> Config:
        return replace(cf, state=st, outcome=Outcome(kind, v))

    def _step(self, cf: Config, cmd) -> list[Config]:
        sm, st = self.sm, cf.state
        t = type(cmd)
        if t is Assign:
            return [self._next(cf, o.state) for o in sm.ea(st, Seq(Eval(cmd.expr), SetVar(cmd.var)))]
        if t is IfGoto:
            yes = [self._next(cf, o.state, cmd.target)
                   for o in sm.ea(st, Seq(Eval(cmd.guard), Assume()))]
            no = [self._next(cf, o.state)
                  for o in sm.ea(st, Seq(Eval(UnOp("not", cmd.guard)), Assume()))]
            if mutants.active("drop-goto-branch") and sm.symbolic and yes:
                no = []
            return yes + no
        if t is Action:
            out = []
            act = Seq(Seq(Eval(cmd.arg), MemAct(cmd.action)), SetVar(cmd.var))
            for o in sm.ea(st, act):
                if o.result is Res.S:
                    out.append(self._next(cf, o.state))
                else:
                    kind = Kind.MISS if o.result is Res.M else Kind.FAIL
                    out.append(self._final(cf, o.state, kind, o.value))
            return out
        if t is USym or t is ISym:
            out = []
            sym = USymA() if t is USym else ISymA()
            for o in sm.ea(st, Seq(Eval(cmd.count), sym)):
                tag = "u" if t is USym else "i"
                n = len(self.mm.unpack(o.value) or ())
                log = cf.fresh + ((tag, tuple(sm.items(o.value, n))),)
                for o2 in sm.ea(o.state, SetVar(cmd.var), o.value):
                    out.append(self._next(cf, o2.state, fresh=log))
            return out
        if t is Call:
            if self.specs and cmd.subst is not None:
                return self._spec_call(cf, cmd)
            return self._call(cf, cmd)
        if t is Return:
            out = []
            for o in sm.ea(st, Eval(cmd.expr)):
                if len(cf.stack) == 1:
                    out.append(self._final(cf, o.state, Kind.NORMAL, o.value))
                    continue
                top, rest = cf.stack[0], cf.stack[1:]
                arg = sm.lst((sm.serialize_store(top.store), o.value))
                for o2 in sm.ea(o.state, Pair(SetStore(), SetVar(top.var)), arg):
                    out.append(replace(cf, state=o2.state, stack=rest, index=top.ret))
            return out
        if t is Fail:
            return [self._final(cf, o.state, Kind.FAIL, o.value) for o in sm.ea(st, Eval(cmd.expr))]
        if t is Vanish:
            return []
        raise EngineFault(f"unknown command {cmd!r}")

    def _call(self, cf: Config, cmd: Call) -> list[Config]:
        sm = self.sm
        out = []
        for o in sm.ea(cf.state, Pair(Eval(cmd.proc), Pair(Eval(cmd.arg), GetStore()))):
            fv, rest = sm.items(o.value, 2)
            v, caller_store = sm.items(rest, 2)
            name = _proc_name(fv)
            if name is None or name not in self.prog.procs:
                raise EngineFault(f"call target {fv!r} is not a known procedure")
            frame = Frame(name, cmd.var, sm.deserialize_store(caller_store), cf.index + 1)
            param = self.prog.procs[name].param
            arg = sm.lst((sm.lst((sm.const(param), v)),))
            for o2 in sm.ea(o.state, SetStore(), arg):
                out.append(replace(cf, state=o2.state, stack=(frame,) + cf.stack, index=0))
        return out

    def _spec_call(self, cf: Config, cmd: Call) -> list[Config]:
        sm, mm, st = self.sm, self.mm, cf.state
        name = _proc_name(sm.eval_expr(cmd.proc, st.store))
        spec = self.prog.specs.get(name) if name else None
        if spec is None:
            raise EngineFault(f"annotated call to {name or cmd.proc!r} has no specification")
        theta = {k: sm.eval_expr(e, st.store) for k, e in cmd.subst}
        theta[spec.param_svar] = sm.eval_expr(cmd.arg, st.store)
        branches = consume_state(mm, st, theta, spec.pre)
        if any(b.result is not Res.S for b in branches):
            out = []
            for b in branches:
                merged = sm.compose(st, State(mm.empty(), Store(), EMPTY_ALLOC, b.state.pc))
                fin = merged if merged is not None else replace(st, pc=b.state.pc)
                kind = Kind.MISS if b.result is Res.M else Kind.FAIL
                out.append(self._final(cf, fin, kind, sm.const(False)))
            return out
        out = []
        for b in branches:
            th = dict(b.subst)
            exist = sorted(svars(spec.post) - svars(spec.pre) - set(th))
            log = cf.fresh
            st_j = b.state
            if exist:
                (o,) = sm.ea(st_j, ISymA(), sm.const(len(exist)))
                vals = sm.items(o.value, len(exist))
                th.update(zip(exist, vals))
                log = log + (("i", tuple(vals)),)
                st_j = o.state
            for p in produce_state(mm, st_j, th, spec.post):
                if p.result is not Res.S:
                    continue
                ret = apply_subst(mm, th, spec.ret)
                for o2 in sm.ea(p.state, SetVar(cmd.var), ret):
                    out.append(self._next(cf, o2.state, fresh=log))
        return out

    # -- collecting semantics
    def collect_step(self, cfs: Iterable[Config]) -> list[Config]:
        out = []
        for cf in cfs:
            if cf.final:
                out.append(cf)
            else:
                out.extend(self.step(cf))
        out.sort(key=lambda c: c.branch)
        return out

    def run(self, cfs: Config | Iterable[Config], fuel: int = DEFAULT_FUEL) -> RunResult:
        if fuel < 0:
            raise ValueError("fuel must be non-negative")
        cur = [cfs] if isinstance(cfs, Config) else list(cfs)
        steps = 0
        while any(not c.final for c in cur):
            if steps >= fuel:
                return RunResult(False, cur, steps)
            cur = self.collect_step(cur)
            steps += 1
        return RunResult(True, cur, steps)


def _show_outcome(o: Outcome) -> str:
    if o.kind is Kind.CONT:
        return "Cont"
    v = show_expr(o.value) if isinstance(o.value, Expr) else repr(o.value)
    return f"{o.kind.value}({v})"


class CoverageMonitor:
    """Observer checking π(cf) ⇒ ⋁ π(successors) on every non-vanishing step."""

    def __init__(self):
        self.checked = 0
        self.failures: list = []
        self.unknown = 0

    def __call__(self, cf: Config, cmd, succ: list[Config]) -> None:
        if type(cmd) is Vanish:
            return
        from .ops import disj
        self.checked += 1
        r = solver.entails(cf.pc, disj([s.pc for s in succ]))
        if r is solver.UNKNOWN:
            self.unknown += 1
        elif r is not True:
            self.failures.append((cf, show_cmd(cmd)))
