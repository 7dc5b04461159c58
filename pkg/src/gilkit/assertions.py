"""Consumers and producers of memory and state assertions, resource functions, satisfiability.

Substitutions are plain dicts from symbolic-variable names to values of the
model (expressions in symbolic models, concrete values otherwise).

Consumption learns bindings for variables the substitution leaves open: an
out-parameter that is a bare unbound variable is bound to the consumed value,
and a pure conjunct ``#v = e`` with ``#v`` unbound binds ``#v`` once ``e`` is
fully bound. In-parameters must be bound by the time their atom is consumed;
atoms are taken in canonical order, skipping ahead to the first atom whose
ins are bound.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from . import solver
from .memory import MemoryModel, Res
from .ops import EvalError, conj, conjuncts, evaluate, mk_eq, mk_not, simplify, subst_svars
from .state import State
from .syntax import (Atom, BinOp, EngineFault, Expr, Lit, MemAsrt, SVar, StateAsrt, TRUE,
                     expr_svars)
from .values import vkey

FALSE = Lit(False)


@dataclass(frozen=True)
class AsrtOutcome:
    mem: Any
    subst: dict
    result: Res
    pc: Expr = TRUE

    @property
    def value(self):
        return self.result is Res.S


@dataclass(frozen=True)
class StateAsrtOutcome:
    state: State
    subst: dict
    result: Res

    @property
    def value(self):
        return self.result is Res.S


# -- substitution application --------------------------------------------------

def apply(mm: MemoryModel, theta: dict, e: Expr):
    """θ(e). Raises EngineFault when e has variables outside dom(θ)."""
    free = expr_svars(e) - set(theta)
    if free:
        raise EngineFault(f"unbound symbolic variables {sorted(free)} in {e!r}")
    if mm.symbolic:
        try:
            return simplify(subst_svars(e, theta))
        except EvalError as err:
            raise EngineFault(f"ill-sorted assertion term: {err}") from None
    try:
        return evaluate(e, theta)
    except EvalError as err:
        raise EngineFault(f"ill-sorted assertion term: {err}") from None


def _bound(theta: dict, e: Expr) -> bool:
    return expr_svars(e) <= set(theta)


def _feasible(mm: MemoryModel, pc: Expr) -> bool:
    if not mm.symbolic:
        return True
    if pc == FALSE:
        return False
    return not isinstance(solver.sat(pc), solver.Unsat)


def _eq(mm: MemoryModel, a, b):
    """Equality as a context fragment (symbolic) or a boolean (concrete)."""
    if mm.symbolic:
        return mk_eq(a, b)
    return vkey(a) == vkey(b)


# -- memory assertions ---------------------------------------------------------

def _pick(atoms: tuple, theta: dict) -> int:
    for i, a in enumerate(atoms):
        if all(_bound(theta, e) for e in a.ins):
            return i
    raise EngineFault("no atom has all its in-parameters bound")


def _match_outs(mm, atom: Atom, vals: tuple, theta: dict):
    """Bind bare unbound outs; return (θ', equality constraint or bool)."""
    theta = dict(theta)
    eqs = []
    for e, v in zip(atom.outs, vals):
        if type(e) is SVar and e.name not in theta:
            theta[e.name] = v
        else:
            eqs.append(_eq(mm, apply(mm, theta, e), v))
    if mm.symbolic:
        return theta, conj(*eqs)
    return theta, all(eqs)


def consume_asrt(mm: MemoryModel, mem, theta: dict, p: MemAsrt, pc: Expr = TRUE) -> list[AsrtOutcome]:
    single = len(p.atoms) == 1
    return _consume(mm, mem, dict(theta), p.atoms, pc, mem, single)


def _consume(mm, mem, theta, atoms, pc, orig, single) -> list[AsrtOutcome]:
    if not atoms:
        return [AsrtOutcome(mem, theta, Res.S, pc)]
    i = _pick(atoms, theta)
    atom, rest = atoms[i], atoms[:i] + atoms[i + 1:]
    ins = tuple(apply(mm, theta, e) for e in atom.ins)
    out: list[AsrtOutcome] = []
    for o in mm.consume(atom.pred, mem, ins, pc):
        if o.result is not Res.S:
            out.append(AsrtOutcome(orig, theta, o.result, o.pc))
            continue
        th, match = _match_outs(mm, atom, o.value, theta)
        if mm.symbolic:
            good, bad = conj(o.pc, match), conj(o.pc, mk_not(match))
        else:
            good, bad = (o.pc, FALSE) if match else (FALSE, o.pc)
        if good != FALSE and _feasible(mm, good):
            out.extend(_consume(mm, o.mem, th, rest, good, orig, single))
        if bad != FALSE and _feasible(mm, bad):
            out.append(AsrtOutcome(o.mem if single else orig, theta, Res.E, bad))
    return out


def produce_asrt(mm: MemoryModel, mem, theta: dict, p: MemAsrt, pc: Expr = TRUE) -> list[AsrtOutcome]:
    return _produce(mm, mem, theta, p.atoms, pc, mem)


def _produce(mm, mem, theta, atoms, pc, orig) -> list[AsrtOutcome]:
    if not atoms:
        return [AsrtOutcome(mem, theta, Res.S, pc)]
    atom, rest = atoms[0], atoms[1:]
    ins = tuple(apply(mm, theta, e) for e in atom.ins)
    outs = tuple(apply(mm, theta, e) for e in atom.outs)
    out: list[AsrtOutcome] = []
    for o in mm.produce(atom.pred, mem, ins, outs, pc):
        if o.result is Res.S:
            out.extend(_produce(mm, o.mem, theta, rest, o.pc, orig))
        else:
            out.append(AsrtOutcome(orig, theta, o.result, o.pc))
    return out


def resource(mm: MemoryModel, theta: dict, p: MemAsrt, pc: Expr = TRUE):
    """Γ_θ(P): the memory produced from the unit, or None when production cannot succeed."""
    for o in produce_asrt(mm, mm.empty(), theta, p, pc):
        if o.result is Res.S:
            return o.mem
    return None


def resource_ins(mm: MemoryModel, theta: dict, p: MemAsrt) -> set:
    """Γⁱ_θ(P): core predicates with their in-parameters."""
    out = set()
    for a in p.atoms:
        ins = tuple(apply(mm, theta, e) for e in a.ins)
        out.add((a.pred, tuple(("e", x) if isinstance(x, Expr) else vkey(x) for x in ins)))
    return out


# -- state assertions ----------------------------------------------------------

def _learn_pure(mm, theta: dict, pure: Expr) -> dict:
    theta = dict(theta)
    changed = True
    while changed:
        changed = False
        for c in conjuncts(pure):
            if type(c) is BinOp and c.op == "=":
                for v, e in ((c.left, c.right), (c.right, c.left)):
                    if type(v) is SVar and v.name not in theta and _bound(theta, e):
                        theta[v.name] = apply(mm, theta, e)
                        changed = True
                        break
    return theta


def _pure_holds(mm, theta, pure) -> bool:
    try:
        return apply(mm, theta, pure) is True
    except EngineFault:
        return False


def consume_state(mm: MemoryModel, st: State, theta: dict, a: StateAsrt) -> list[StateAsrtOutcome]:
    out: list[StateAsrtOutcome] = []
    for o in consume_asrt(mm, st.mem, theta, a.mem, st.pc):
        if o.result is not Res.S:
            out.append(StateAsrtOutcome(replace(st, pc=o.pc), o.subst, o.result))
            continue
        th = _learn_pure(mm, o.subst, a.pure)
        if not mm.symbolic:
            if _pure_holds(mm, th, a.pure):
                out.append(StateAsrtOutcome(replace(st, mem=o.mem, pc=o.pc), th, Res.S))
            else:
                out.append(StateAsrtOutcome(st, th, Res.E))
            continue
        pi = apply(mm, th, a.pure)
        good, bad = conj(o.pc, pi), conj(o.pc, mk_not(pi))
        if good != FALSE and _feasible(mm, good):
            out.append(StateAsrtOutcome(replace(st, mem=o.mem, pc=good), th, Res.S))
        if bad != FALSE and _feasible(mm, bad):
            out.append(StateAsrtOutcome(replace(st, pc=bad), th, Res.E))
    return out


def produce_state(mm: MemoryModel, st: State, theta: dict, a: StateAsrt) -> list[StateAsrtOutcome]:
    out: list[StateAsrtOutcome] = []
    for o in produce_asrt(mm, st.mem, theta, a.mem, st.pc):
        if o.result is not Res.S:
            out.append(StateAsrtOutcome(replace(st, mem=o.mem, pc=o.pc), theta, o.result))
            continue
        if not mm.symbolic:
            if _pure_holds(mm, theta, a.pure):
                out.append(StateAsrtOutcome(replace(st, mem=o.mem), theta, Res.S))
            continue
        good = conj(o.pc, apply(mm, theta, a.pure))
        if good != FALSE and _feasible(mm, good):
            out.append(StateAsrtOutcome(replace(st, mem=o.mem, pc=good), theta, Res.S))
    return out


def satisfies(mm: MemoryModel, mem, pc: Expr, theta: dict, a: StateAsrt):
    """(μ, π'), θ ⊨ P ∧ π. True, False or solver.UNKNOWN."""
    wf = mm.wf(mem, pc)
    if wf is not True:
        return wf
    pure = apply(mm, theta, a.pure)
    if mm.symbolic:
        ok = solver.entails(pc, pure)
        if ok is not True:
            return ok
    elif pure is not True:
        return False
    unknown = False
    for o in consume_asrt(mm, mem, theta, a.mem, pc):
        if o.result is not Res.S or not mm.is_empty(o.mem):
            continue
        if not mm.symbolic:
            return True
        e = solver.entails(pc, o.pc)
        if e is True:
            return True
        if e is solver.UNKNOWN:
            unknown = True
    return solver.UNKNOWN if unknown else False
