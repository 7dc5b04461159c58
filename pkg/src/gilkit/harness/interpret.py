"""Interpretations: mapping symbolic objects to concrete ones under a model ε.

Every function returns ``None`` when the image is undefined (an operator
applied outside its domain, a variable missing from ε, a false context).
"""

from __future__ import annotations

from dataclasses import replace

from .. import solver
from ..allocator import AllocRecord, Range, item_key
from ..heap import CONCRETE, FREED, Heap, SYMBOLIC
from ..interpreter import Config, Frame, Outcome
from ..ops import EvalError, evaluate
from ..state import State, Store, state_svars
from ..syntax import Expr, Lit, TRUE, expr_svars
from ..values import vkey


class _Undef(Exception):
    pass


def value(eps: dict, v):
    if v is None or v is FREED:
        return v
    if not isinstance(v, Expr):
        return v
    try:
        return evaluate(v, eps)
    except EvalError:
        raise _Undef from None


def expr(eps: dict, e: Expr):
    try:
        return value(eps, e)
    except _Undef:
        return None


def _store(eps, s: Store) -> Store:
    return Store({k: value(eps, v) for k, v in s.items()})


def _alloc(eps, rec: AllocRecord) -> AllocRecord:
    d = {Range.LOCS: [value(eps, x) for x in rec.get(Range.LOCS)],
         Range.VALUES: list(rec.get(Range.VALUES)) + [value(eps, x) for x in rec.get(Range.SVARS)]}
    return AllocRecord.of({k: v for k, v in d.items() if v})


def state(eps: dict, st: State, mm=SYMBOLIC) -> State | None:
    try:
        if value(eps, st.pc) is not True:
            return None
        mem = mm.interpret(eps, st.mem)
        if mem is None:
            return None
        return State(mem, _store(eps, st.store), _alloc(eps, st.alloc), TRUE)
    except _Undef:
        return None


def config(eps: dict, cf: Config, mm=SYMBOLIC) -> Config | None:
    st = state(eps, cf.state, mm)
    if st is None:
        return None
    try:
        stack = tuple(Frame(f.proc, f.var, None if f.store is None else _store(eps, f.store), f.ret)
                      for f in cf.stack)
        out = Outcome(cf.outcome.kind, value(eps, cf.outcome.value))
        fresh = tuple((tag, tuple(value(eps, x) for x in items)) for tag, items in cf.fresh)
    except _Undef:
        return None
    return replace(cf, state=st, stack=stack, outcome=out, fresh=fresh, unverified=False)


def subst(eps: dict, theta: dict) -> dict | None:
    try:
        return {k: value(eps, v) for k, v in theta.items()}
    except _Undef:
        return None


def config_svars(cf: Config, mm=SYMBOLIC) -> set:
    acc = state_svars(cf.state, mm)
    for f in cf.stack:
        if f.store is not None:
            for v in f.store.values():
                if isinstance(v, Expr):
                    acc |= expr_svars(v)
    if isinstance(cf.outcome.value, Expr):
        acc |= expr_svars(cf.outcome.value)
    for _, items in cf.fresh:
        for x in items:
            if isinstance(x, Expr):
                acc |= expr_svars(x)
    return acc


def models(cf_or_state, n: int, seed=0, mm=SYMBOLIC) -> list[dict]:
    """Up to n distinct models of a symbolic configuration or state."""
    if isinstance(cf_or_state, Config):
        names, pc = config_svars(cf_or_state, mm), cf_or_state.pc
    else:
        names, pc = state_svars(cf_or_state, mm), cf_or_state.pc
    return solver.sample_models(pc, n, extra=names, seed=seed)


def all_models(cf: Config, limit: int, mm=SYMBOLIC) -> list[dict]:
    """Every model within the solver's domains, up to ``limit``."""
    out = []
    for m in solver.iter_models(cf.pc, extra=config_svars(cf, mm)):
        out.append(m)
        if len(out) >= limit:
            break
    return out


# -- comparison keys ------------------------------------------------------------

def _vk(v):
    if v is None:
        return None
    if v is FREED:
        return ("freed",)
    if isinstance(v, Expr):
        return ("e", v)
    return vkey(v)


def store_key(s: Store | None):
    if s is None:
        return None
    return tuple((k, _vk(s[k])) for k in s)


def state_key(st: State, mm=CONCRETE):
    mem = mm.normal(st.mem)
    return (tuple((_vk(k), _vk(v)) for k, v in mem), store_key(st.store),
            tuple((r.value, tuple(item_key(x) for x in xs)) for r, xs in st.alloc.ranges),
            _vk(st.pc) if isinstance(st.pc, Expr) and st.pc != TRUE else None)


def config_key(cf: Config, mm=CONCRETE, trace: bool = True):
    """Strict, sort-aware identity of a configuration (metadata other than the trace ignored)."""
    return (state_key(cf.state, mm),
            tuple((f.proc, f.var, store_key(f.store), f.ret) for f in cf.stack),
            cf.index, cf.outcome.kind.value, _vk(cf.outcome.value),
            cf.trace if trace else None)
