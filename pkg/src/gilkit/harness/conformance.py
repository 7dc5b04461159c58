"""Property suites for memory models and state models.

Every trial draws a memory, an action and an argument from a seeded
generator and checks the model's laws on the outcomes. Entailments and
equivalences between contexts are decided by the solver; a trial whose
check comes back Unknown is counted as skipped rather than passed.

The symbolic model is also checked against the concrete one through
interpretations (backward completeness and forward soundness of memory
actions), and both are checked for equivariance under renamings.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .. import solver
from ..allocator import AllocRecord, Range, item_key
from ..allocator import compose as compose_alloc
from ..heap import CONCRETE, FREED, SYMBOLIC, Heap
from ..memory import MemoryModel, Renaming, Res
from ..ops import conj, disj, mk_eq, mk_not
from ..state import (Assume, Eval, ISymA, MemAct, SetVar, State, StateModel, Store, USymA,
                     state_svars)
from ..syntax import BinOp, EList, Expr, Lit, SVar, TRUE, UnOp, expr_svars, mk_list
from ..values import INT_T, LOC_T, Loc, vkey
from . import interpret as I
from .generators import (CONC_LOCS, SymMem, conc_heap, conc_key, conc_value, rng_for, sym_frame,
                         sym_heap, sym_key, sym_value, typeof_is)
from .report import Report

UNKNOWN = solver.UNKNOWN


@dataclass
class ConformanceConfig:
    trials: int = 500
    seed: int = 0
    models: int = 2            # interpretations sampled per outcome for MA-BC / MA-FS


# -- small helpers --------------------------------------------------------------

def _key(x):
    if x is FREED:
        return ("freed",)
    if isinstance(x, tuple):
        return ("t",) + tuple(_key(v) for v in x)
    if type(x) is EList:
        return ("t",) + tuple(_key(v) for v in x.items)
    if type(x) is Lit and type(x.value) is tuple:
        return ("t",) + tuple(_key(Lit(v)) for v in x.value)
    if isinstance(x, Expr):
        return ("e", x)
    return vkey(x)


def _same(a, b) -> bool:
    return _key(a) == _key(b)


def _and3(*rs):
    if any(r is False for r in rs):
        return False
    if any(r is UNKNOWN for r in rs):
        return UNKNOWN
    return True


def _entails(a, b):
    return solver.entails(a, b)


def _equiv(a, b):
    if a == b:
        return True
    return _and3(solver.entails(a, b), solver.entails(b, a))


def _sat(pc):
    return solver.is_sat(pc)


def _exists(items, pred) -> object:
    """Three-valued ∃: True if some item satisfies pred, UNKNOWN if undecided."""
    unknown = False
    for x in items:
        r = pred(x)
        if r is True:
            return True
        if r is UNKNOWN:
            unknown = True
    return UNKNOWN if unknown else False


def _record(rep: Report, name: str, r, seed, inp, expected, got=None) -> None:
    if r is UNKNOWN:
        rep[name].skipped += 1
    else:
        rep[name].check(r is True, seed, inp, expected, got)


def _show_outs(outs) -> list:
    return [{"mem": repr(o.mem), "value": o.value, "result": o.result.value, "pc": o.pc} for o in outs]


# -- generators for both variants -----------------------------------------------

class _ConcreteGen:
    mm = CONCRETE
    tag = "concrete"

    def memory(self, rng, prefix=""):
        return conc_heap(rng), TRUE

    def key(self, rng, mem):
        return conc_key(rng, mem), TRUE

    def fresh_key(self, rng, mem, taken=()):
        used = {vkey(k) for k in mem.keys()} | {vkey(k) for k in taken}
        free = [Loc(f"l{i}") for i in range(8) if vkey(Loc(f"l{i}")) not in used]
        return rng.choice(free), TRUE

    def value(self, rng):
        return conc_value(rng)

    def frame(self, rng, mem):
        used = {vkey(k) for k in mem.keys()}
        free = [Loc(f"l{i}") for i in range(8) if vkey(Loc(f"l{i}")) not in used]
        n = rng.randint(0, min(2, len(free)))
        keys = rng.sample(free, n)
        return Heap(sorted(((k, FREED if rng.random() < 0.2 else conc_value(rng)) for k in keys),
                           key=lambda kv: kv[0].name)), TRUE

    def lst(self, items):
        return tuple(items)

    def constraint(self, rng, names):
        return TRUE


class _SymbolicGen:
    mm = SYMBOLIC
    tag = "symbolic"

    def memory(self, rng, prefix=""):
        m = sym_heap(rng, prefix=prefix)
        return m.heap, m.pc

    def key(self, rng, mem):
        return sym_key(rng, SymMem(mem, TRUE))

    def fresh_key(self, rng, mem, taken=()):
        used = {k.value for k in list(mem.keys()) + list(taken) if type(k) is Lit}
        if rng.random() < 0.6:
            k = SVar("ck")
            return k, typeof_is(k, LOC_T)
        free = [Loc(f"l{i}") for i in range(8) if Loc(f"l{i}") not in used]
        return Lit(rng.choice(free)), TRUE

    def value(self, rng):
        return sym_value(rng)

    def frame(self, rng, mem):
        f = sym_frame(rng, SymMem(mem, TRUE))
        return f.heap, conj(f.pc, SYMBOLIC.separation(mem, f.heap))

    def lst(self, items):
        return mk_list(tuple(items))

    def constraint(self, rng, names):
        """A random extra constraint, for context-strengthening tests."""
        if not names:
            return Lit(True)
        x = SVar(rng.choice(sorted(names)))
        r = rng.random()
        if r < 0.4:
            return mk_eq(x, Lit(Loc(f"l{rng.randrange(4)}")))
        if r < 0.7:
            return BinOp(">", x, Lit(rng.randint(-1, 3))) if rng.random() < 0.5 else \
                conj(typeof_is(x, INT_T), BinOp(">", x, Lit(0)))
        return mk_not(mk_eq(x, Lit(rng.choice([0, 1, 7]))))


GENS = {"concrete": _ConcreteGen(), "symbolic": _SymbolicGen()}


def _action_arg(gen, rng, mm: MemoryModel, act: str, mem):
    key, ctx = gen.key(rng, mem)
    kind, _, pred = act.partition("_")
    if pred:
        n_outs = mm.preds[pred].n_outs
        if kind in ("cons", "getter"):
            return gen.lst([key]), ctx
        return gen.lst([key] + [gen.value(rng) for _ in range(n_outs)]), ctx
    if act == "store":
        if rng.random() < 0.08:
            return gen.lst([key]), ctx              # wrong arity
        return gen.lst([key, gen.value(rng)]), ctx
    return key, ctx


def _mem_svars(mm, mem) -> set:
    return mm.mem_svars(mem) if hasattr(mm, "mem_svars") else set()


def _val_svars(v) -> set:
    if isinstance(v, Expr):
        return expr_svars(v)
    if isinstance(v, tuple):
        out = set()
        for x in v:
            out |= _val_svars(x)
        return out
    return set()


# -- execution memory model properties ------------------------------------------

def _exec_props(mm: MemoryModel, gen, rng, mem, pc, act, arg, n_models: int):
    """Evaluate every execution-model law on one case. Yields (property, result, expected, got)."""
    symbolic = mm.symbolic
    wf_in = mm.wf(mem, pc)
    yield "input-wf", wf_in, "generated memory is well formed", None
    if wf_in is not True:
        return
    yield "wf-sat", _sat(pc), "well-formedness implies a satisfiable context", None
    outs = mm.exec_action(mem, act, arg, pc)
    shown = _show_outs(outs)
    yield "wf-preserved", _and3(*(mm.wf(o.mem, o.pc) for o in outs)), "every outcome well formed", shown
    yield "strengthening", _and3(*(_and3(_sat(o.pc), _entails(o.pc, pc)) for o in outs)), \
        "each outcome context is satisfiable and implies the input context", shown
    disjoint = [_sat(conj(outs[i].pc, outs[j].pc)) for i in range(len(outs)) for j in range(i + 1, len(outs))]
    yield "disjointness", _and3(*(UNKNOWN if d is UNKNOWN else not d for d in disjoint)), \
        "outcome contexts pairwise disjoint", shown
    yield "coverage", _entails(pc, disj([o.pc for o in outs])), \
        "input context covered by outcome contexts", shown
    yield "failure-keeps-memory", all(mm.normal(o.mem) == mm.normal(mem) for o in outs
                                          if o.result is not Res.S), \
        "non-successful outcomes leave the memory unchanged", shown
    # determinism of concrete action execution
    if not symbolic:
        yield "concrete-determinism", len(outs) <= 1, "at most one concrete outcome", shown
    names = expr_svars(pc) | _mem_svars(mm, mem) | _val_svars(arg)
    if symbolic:
        stronger = conj(pc, gen.constraint(rng, names))
        if _sat(stronger) is True:
            yield "wf-monotone", mm.wf(mem, stronger), "well formed under a stronger context", stronger
        fresh = set()
        for o in outs:
            fresh |= (_mem_svars(mm, o.mem) | _val_svars(o.value) | expr_svars(o.pc)) - names
        yield "symbols-from-inputs", not fresh, "outcomes mention only input symbols", sorted(fresh)
        yield from _ma_bc_fs(mm, mem, pc, act, arg, outs, names, rng, n_models)
    yield from _rename_equivariance(mm, mem, pc, act, arg, outs, names)


def _interp_outcome(eps, mm, o):
    return (SYMBOLIC.interpret(eps, o.mem) if mm.symbolic else o.mem), I.expr(eps, o.value), o.result


def _ma_bc_fs(mm, mem, pc, act, arg, outs, names, rng, n_models):
    seed = rng.randrange(2 ** 31)
    for j, o in enumerate(outs):
        extra = names | _mem_svars(mm, o.mem) | _val_svars(o.value)
        for eps in solver.sample_models(o.pc, n_models, extra=extra, seed=f"{seed}:{j}"):
            cmem = SYMBOLIC.interpret(eps, mem)
            carg = I.expr(eps, arg)
            want_mem, want_v, want_r = _interp_outcome(eps, mm, o)
            got = CONCRETE.exec_action(cmem, act, carg, TRUE) if cmem is not None else []
            ok = (len(got) == 1 and got[0].result is want_r and want_mem is not None
                  and CONCRETE.normal(got[0].mem) == CONCRETE.normal(want_mem) and _same(got[0].value, want_v))
            yield "MA-BC", ok, {"model": eps, "outcome": j, "want": (repr(want_mem), want_v, want_r.value)}, \
                _show_outs(got)
    for eps in solver.sample_models(pc, n_models, extra=names, seed=f"{seed}:in"):
        cmem = SYMBOLIC.interpret(eps, mem)
        got = CONCRETE.exec_action(cmem, act, I.expr(eps, arg), TRUE)
        if len(got) != 1:
            yield "MA-FS", False, {"model": eps}, _show_outs(got)
            continue
        g = got[0]

        def matches(o):
            if not solver.holds(o.pc, eps):
                return False
            m, v, r = _interp_outcome(eps, mm, o)
            return r is g.result and m is not None and CONCRETE.normal(m) == CONCRETE.normal(g.mem) \
                and _same(v, g.value)
        yield "MA-FS", any(matches(o) for o in outs), {"model": eps}, _show_outs(got)


def _renaming_for(mm, names) -> Renaming:
    locs = {Loc(f"l{i}"): Loc(f"l{i + 8}") for i in range(8)}
    return Renaming(locs, {n: f"r_{n}" for n in sorted(names)} if mm.symbolic else {})


def _ren(ren: Renaming, v):
    if v is FREED:
        return v
    return ren(v)


def _rename_equivariance(mm, mem, pc, act, arg, outs, names):
    ren = _renaming_for(mm, names)
    back = ren.inverse()
    rmem = mm.rename(mem, ren)
    inv = mm.normal(mm.rename(rmem, back)) == mm.normal(mem) and _same(_ren(back, _ren(ren, arg)), arg)
    yield "renaming-invertible", inv, "ℵ⁻¹(ℵ(t)) = t", None
    routs = mm.exec_action(rmem, act, _ren(ren, arg), ren(pc) if mm.symbolic else pc)
    if len(routs) != len(outs):
        yield "renaming-equivariance", False, _show_outs(outs), _show_outs(routs)
        return

    def match(o):
        want_mem = mm.normal(mm.rename(o.mem, ren))
        want_v = _ren(ren, o.value)

        def one(r):
            if r.result is not o.result or mm.normal(r.mem) != want_mem or not _same(r.value, want_v):
                return False
            return _equiv(r.pc, ren(o.pc)) if mm.symbolic else True
        return _exists(routs, one)
    yield "renaming-equivariance", _and3(*(match(o) for o in outs)), _show_outs(outs), _show_outs(routs)


def _shrink(fn: Callable, mem: Heap, prop: str) -> Heap:
    """Drop bindings while ``prop`` keeps failing."""
    changed = True
    while changed and len(mem):
        changed = False
        for i in range(len(mem)):
            cand = mem.without(i)
            if prop in fn(cand):
                mem, changed = cand, True
                break
    return mem


def check_exec_model_props(models=("concrete", "symbolic"), trials: int = 500, seed: int = 0,
                           n_models: int = 2) -> Report:
    """Execution memory model laws on random cases, for each named variant of the heap."""
    rep = Report("exec")
    for tag in models:
        gen = GENS[tag]
        mm = gen.mm
        acts = mm.actions()
        for t in range(trials):
            rng = rng_for(seed, "exec", tag, t)
            mem, pc = gen.memory(rng)
            act = rng.choice(acts)
            arg, ctx = _action_arg(gen, rng, mm, act, mem)
            pc = conj(pc, ctx)
            tseed = f"{seed}:exec:{tag}:{t}"
            state = rng.getstate()

            def failing(m, _pc=pc, _act=act, _arg=arg):
                r2 = random.Random()
                r2.setstate(state)
                return {p for p, r, _, _ in _exec_props(mm, gen, r2, m, _pc, _act, _arg, n_models)
                        if r is False}
            for prop, r, expected, got in _exec_props(mm, gen, rng, mem, pc, act, arg, n_models):
                name = f"{prop}/{tag}"
                inp = {"memory": repr(mem), "action": act, "arg": arg, "pc": pc}
                if r is False and len(rep[name].failures) < 1:
                    small = _shrink(failing, mem, prop)
                    inp["shrunk_memory"] = repr(small)
                _record(rep, name, r, tseed, inp, expected, got)
    return rep


# -- compositional memory model properties --------------------------------------

def _cons(mm, pred, mem, ins, pc):
    return mm.consume(pred, mem, ins, pc)


def _prod(mm, pred, mem, ins, outs, pc):
    return mm.produce(pred, mem, ins, outs, pc)


def _meq(mm, a, b) -> bool:
    return a is not None and b is not None and mm.normal(a) == mm.normal(b)


def _comp_props(mm: MemoryModel, gen, rng):
    sym = mm.symbolic
    pred = rng.choice(sorted(mm.preds))
    n_outs = mm.preds[pred].n_outs
    mem, pc = gen.memory(rng)
    key, ctx = gen.key(rng, mem)
    pc = conj(pc, ctx)
    ins = (key,)
    outs = tuple(gen.value(rng) for _ in range(n_outs))
    cpr = mm.cpr(pred, ins, outs)
    inp = {"pred": pred, "memory": repr(mem), "ins": key, "outs": outs, "pc": pc}
    if mm.wf(mem, pc) is not True:
        yield "input-wf", False, inp, "generated memory is well formed"
        return

    # PCM laws and well-formedness compatibility
    fmem, fpc = gen.frame(rng, mem)
    gmem, gpc = gen.memory(rng, prefix="g")
    m12, m21 = mm.compose(mem, fmem), mm.compose(fmem, mem)
    yield "pcm-commutative", (m12 is None and m21 is None) or _meq(mm, m12, m21), inp, "μ₁•μ₂ = μ₂•μ₁"
    a = mm.compose(m12, gmem) if m12 is not None else None
    m2g = mm.compose(fmem, gmem)
    b = mm.compose(mem, m2g) if m2g is not None else None
    yield "pcm-associative", (a is None and b is None) or _meq(mm, a, b), inp, "(μ₁•μ₂)•μ₃ = μ₁•(μ₂•μ₃)"
    yield "pcm-unit", _meq(mm, mm.compose(mem, mm.empty()), mem), inp, "μ•0 = μ"
    if m12 is not None and mm.is_empty(m12):
        yield "pcm-indivisible", mm.is_empty(mem), inp, "μ•μ₂ = 0 implies μ = 0"
    both = conj(pc, fpc)
    if m12 is not None and _sat(both) is True:
        w = mm.wf(m12, both)
        if w is True:
            yield "wf-composition", _and3(mm.wf(mem, both), mm.wf(fmem, both)), inp, \
                "Wf(μ₁•μ₂) implies Wf(μ₁) and Wf(μ₂)"
    yield "wf-unit", mm.wf(mm.empty(), pc), inp, "0 well formed in any satisfiable context"

    # producers
    if sym:
        loc_ctx = conj(pc, typeof_is(key, LOC_T)) if type(key) is not Lit else pc
    else:
        loc_ctx = pc
    loc_sorted = type(key.value if sym and type(key) is Lit else key) is Loc or \
        (sym and type(key) is not Lit)
    if loc_sorted and _sat(loc_ctx) is True:
        p0 = _prod(mm, pred, mm.empty(), ins, outs, loc_ctx)
        ok = len(p0) == 1 and p0[0].result is Res.S and _meq(mm, p0[0].mem, cpr) and \
            _same(p0[0].value, mm.const(True))
        yield "produce-empty", _and3(ok, _equiv(p0[0].pc, loc_ctx) if ok else True), inp, \
            _show_outs(p0)
    prods = _prod(mm, pred, mem, ins, outs, pc)
    shown = _show_outs(prods)
    yield "produce-adds", all(_meq(mm, o.mem, mm.compose(mem, cpr)) for o in prods if o.result is Res.S), \
        inp, shown
    yield "produce-never-missing", all(o.result is not Res.M for o in prods), inp, shown

    # consumers
    cons = _cons(mm, pred, mem, ins, pc)
    shown_c = _show_outs(cons)
    for o in cons:
        if o.result is not Res.S:
            continue
        eq = mm.equality(mem, mm.compose(o.mem, mm.cpr(pred, ins, o.value))) \
            if mm.compose(o.mem, mm.cpr(pred, ins, o.value)) is not None else Lit(False)
        yield "consume-iff-present", _equiv(o.pc, conj(pc, eq)) if sym else \
            _meq(mm, mem, mm.compose(o.mem, mm.cpr(pred, ins, o.value))), inp, shown_c
        # the consumed resource can be produced back
        back = _prod(mm, pred, o.mem, ins, o.value, o.pc)
        yield "reproducible", _exists(back, lambda p: _and3(p.result is Res.S, _equiv(p.pc, o.pc))
                                            if p.result is Res.S else False), inp, _show_outs(back)
        # a producer fails where the consumer succeeded
        yield "produce-fails-when-present", _exists(
            prods, lambda p: _and3(p.result is Res.E, _meq(mm, p.mem, mem), _equiv(p.pc, o.pc))
            if p.result is Res.E else False), inp, shown
        # non-duplicability: consuming the same resource again misses
        again = _cons(mm, pred, o.mem, ins, o.pc)
        yield "non-dup-consume", _exists(again, lambda c: _and3(_meq(mm, c.mem, o.mem), _equiv(c.pc, o.pc))
                                         if c.result is Res.M else False), inp, _show_outs(again)
        # successful consumers are frame preserving
        framed_pc = conj(o.pc, fpc)
        mf = mm.compose(mem, fmem)
        if mf is not None and _sat(framed_pc) is True and mm.wf(mf, conj(pc, fpc)) is True:
            fc = _cons(mm, pred, mf, ins, conj(pc, fpc))
            want = mm.compose(o.mem, fmem)
            yield "consume-frame-preserving", _exists(
                fc, lambda c: _and3(_meq(mm, c.mem, want), _same(c.value, o.value), _equiv(c.pc, framed_pc))
                if c.result is Res.S else False), {**inp, "frame": repr(fmem)}, _show_outs(fc)
    # missing consumer iff succeeding producer, same contexts
    for o in cons:
        if o.result is Res.M:
            yield "miss-iff-produce", _exists(
                prods, lambda p: _and3(_meq(mm, p.mem, mm.compose(mem, cpr)), _equiv(p.pc, o.pc))
                if p.result is Res.S else False), inp, shown
    for p in prods:
        if p.result is Res.S:
            yield "miss-iff-produce", _exists(
                cons, lambda c: _and3(_meq(mm, c.mem, mem), _equiv(c.pc, p.pc))
                if c.result is Res.M else False), inp, shown_c
            # invertibility and producer non-duplicability
            inv = _cons(mm, pred, p.mem, ins, p.pc)
            yield "invertibility", _exists(
                inv, lambda c: _and3(_meq(mm, c.mem, mem), _same(c.value, outs), _equiv(c.pc, p.pc))
                if c.result is Res.S else False), inp, _show_outs(inv)
            dup = _prod(mm, pred, p.mem, ins, outs, p.pc)
            yield "non-dup-produce", _exists(
                dup, lambda d: _and3(_meq(mm, d.mem, p.mem), _equiv(d.pc, p.pc))
                if d.result is Res.E else False), inp, _show_outs(dup)

    # converse: a memory built as μ''•CPR yields the resource
    base, bpc = gen.memory(rng, prefix="b")
    ck, cctx = gen.fresh_key(rng, base)
    cpr2 = mm.cpr(pred, (ck,), outs)
    built = mm.compose(base, cpr2)
    if built is not None:
        bctx = conj(bpc, cctx, mm.separation(base, cpr2) if sym else TRUE)
        if mm.wf(built, bctx) is True:
            got = _cons(mm, pred, built, (ck,), bctx)
            yield "present-consumed", _exists(
                got, lambda c: _and3(_meq(mm, c.mem, base), _same(c.value, outs), _equiv(c.pc, bctx))
                if c.result is Res.S else False), {"memory": repr(built), "ins": ck, "pc": bctx}, _show_outs(got)

    # erroneous consumer and producer executions are frame preserving
    mf = mm.compose(mem, fmem)
    fctx = conj(pc, fpc)
    if mf is not None and mm.wf(mf, fctx) is True:
        for kind, runs, act in (("cons", cons, lambda m, c: _cons(mm, pred, m, ins, c)),
                                ("prod", prods, lambda m, c: _prod(mm, pred, m, ins, outs, c))):
            framed = None
            for o in runs:
                if o.result is not Res.E or _sat(conj(o.pc, fpc)) is not True:
                    continue
                framed = framed if framed is not None else act(mf, fctx)
                want = mm.compose(o.mem, fmem)
                yield "error-frame-preserving", _exists(
                    framed, lambda f: _and3(_meq(mm, f.mem, want), _same(f.value, o.value),
                                            _equiv(f.pc, conj(o.pc, fpc)))
                    if f.result is Res.E else False), {**inp, "frame": repr(fmem), "action": kind}, \
                    _show_outs(framed)
        # successful producers are frame cancelling
        fprods = _prod(mm, pred, mf, ins, outs, fctx)
        for p in fprods:
            if p.result is not Res.S:
                continue
            if not _meq(mm, p.mem, mm.compose(mf, cpr)):
                continue
            alone = _prod(mm, pred, mem, ins, outs, p.pc)
            yield "frame-cancelling", _exists(
                alone, lambda a: _and3(_meq(mm, a.mem, mm.compose(mem, cpr)), _same(a.value, p.value),
                                       _equiv(a.pc, p.pc))
                if a.result is Res.S else False), {**inp, "frame": repr(fmem)}, _show_outs(alone)

    # non-duplicability across a composition
    if mf is not None and mm.wf(mf, fctx) is True:
        w = conj(fctx, SYMBOLIC.wf_constraint(mf)) if sym else fctx
        c1 = [o for o in _cons(mm, pred, mem, ins, w) if o.result is Res.S]
        c2 = [o for o in _cons(mm, pred, fmem, ins, w) if o.result is Res.S]
        pairs = [_sat(conj(x.pc, y.pc)) for x in c1 for y in c2]
        yield "non-dup-composition", _and3(*(UNKNOWN if s is UNKNOWN else not s for s in pairs)), \
            {**inp, "frame": repr(fmem)}, "resource present in at most one side"


def check_comp_model_props(models=("concrete", "symbolic"), trials: int = 500, seed: int = 0) -> Report:
    """Compositional memory model laws, the PCM laws and the derived frame lemmas."""
    rep = Report("comp")
    for tag in models:
        gen = GENS[tag]
        for t in range(trials):
            rng = rng_for(seed, "comp", tag, t)
            tseed = f"{seed}:comp:{tag}:{t}"
            for prop, r, inp, got in _comp_props(gen.mm, gen, rng):
                _record(rep, f"{prop}/{tag}", r, tseed, inp, prop, got)
    return rep


# -- state model properties -----------------------------------------------------

def _random_record(rng) -> AllocRecord:
    locs = [Loc(f"l{i}") for i in range(3) if rng.random() < 0.5]
    svs = [SVar(f"_{i}") for i in range(3) if rng.random() < 0.5]
    d = {}
    if locs:
        d[Range.LOCS] = locs
    if svs:
        d[Range.SVARS] = svs
    return AllocRecord.of(d)


def _state_props(sm: StateModel, gen, rng):
    mm = sm.mm
    sym = sm.symbolic
    mem, pc = gen.memory(rng)
    key, ctx = gen.key(rng, mem)
    pc = conj(pc, ctx)
    rec = _random_record(rng)
    if not sym:
        rec = AllocRecord.of({Range.LOCS: list(rec.get(Range.LOCS))}) if rec.get(Range.LOCS) else AllocRecord()
    store = Store({"x": key, "y": gen.value(rng)})
    st = State(mem, store, rec, pc)
    r = rng.random()
    if r < 0.35:
        act_name = rng.choice(mm.actions())
        arg, actx = _action_arg(gen, rng, mm, act_name, mem)
        st = State(mem, store, rec, conj(pc, actx))
        action, v = MemAct(act_name), arg
    elif r < 0.5:
        action, v = USymA(), mm.const(rng.randint(0, 3))
    elif r < 0.65:
        action, v = ISymA(), mm.const(rng.randint(0, 3))
    elif r < 0.85 and sym:
        names = state_svars(st, mm)
        action, v = Assume(), gen.constraint(rng, names) if rng.random() < 0.8 else Lit(False)
    elif r < 0.85:
        action, v = Assume(), rng.random() < 0.7
    elif r < 0.92:
        action, v = SetVar("z"), gen.value(rng)
    else:
        action, v = Eval(BinOp("=", UnOp("typeof", Lit(1)), Lit(INT_T))), None
    if mm.wf(st.mem, st.pc) is not True:
        return
    inp = {"state": repr(st.mem), "store": dict(st.store), "alloc": repr(st.alloc), "pc": st.pc,
           "action": repr(action), "arg": v}
    outs = sm.ea(st, action, v)
    shown = [{"mem": repr(o.state.mem), "pc": o.state.pc, "value": o.value, "result": o.result.value}
             for o in outs]
    yield "state-strengthening", _and3(*(_and3(_sat(o.state.pc), _entails(o.state.pc, st.pc)) for o in outs)), \
        inp, shown
    dis = [_sat(conj(outs[i].state.pc, outs[j].state.pc)) for i in range(len(outs)) for j in range(i + 1, len(outs))]
    yield "state-disjointness", _and3(*(UNKNOWN if d is UNKNOWN else not d for d in dis)), inp, shown
    if type(action) is not Assume:
        yield "state-coverage", _entails(st.pc, disj([o.state.pc for o in outs])), inp, shown
    else:
        want = conj(st.pc, v) if sym else (st.pc if v is True else Lit(False))
        if sym:
            s = _sat(want)
            ok = (not outs) if s is False else _and3(len(outs) == 1, _equiv(outs[0].state.pc, want)) if outs \
                else (False if s is True else UNKNOWN)
        else:
            ok = (len(outs) == 1) == (v is True)
        yield "assume-conjoins", ok, inp, shown
    yield "state-failure-context-only", all(
        o.state.mem == st.mem and o.state.store == st.store and o.state.alloc == st.alloc
        for o in outs if o.result is not Res.S), inp, shown
    if type(action) in (USymA, ISymA):
        rng_name = Range.LOCS if type(action) is USymA else (Range.SVARS if sym else Range.VALUES)
        for o in outs:
            n = v.value if sym else v
            items = mm.unpack(o.value, n) or ()
            old = {item_key(x.value if type(x) is Lit else x) for x in st.alloc.get(rng_name)}
            new = [item_key(x.value if type(x) is Lit else x) for x in items]
            fresh = rng_name is Range.VALUES or (len(set(new)) == len(new) and not (set(new) & old))
            yield "alloc-fresh", fresh, inp, shown
            grown = set(item_key(x) for x in o.state.alloc.get(rng_name))
            yield "alloc-recorded", old | set(new) <= grown, inp, shown
    # state composition laws
    ust = sm.unit()
    c = sm.compose(st, ust)
    yield "state-unit", c is not None and c.mem == mm.compose(st.mem, mm.empty()) and c.store == st.store, inp, \
        "σ•unit = σ"
    fmem, fpc = gen.frame(rng, st.mem)
    frame = State(fmem, Store(), AllocRecord(), fpc)
    a, b = sm.compose(st, frame), sm.compose(frame, st)
    comm = (a is None and b is None) or (a is not None and b is not None and mm.normal(a.mem) == mm.normal(b.mem)
                                         and a.store == b.store and a.alloc == b.alloc
                                         and (_equiv(a.pc, b.pc) if sym else True))
    yield "state-commutative", comm, inp, "σ₁•σ₂ = σ₂•σ₁"
    yield "state-both-stores", sm.compose(st, st) is None, inp, "two non-empty stores do not compose"
    r1, r2, r3 = _random_record(rng), _random_record(rng), _random_record(rng)
    yield "alloc-compose-monoid", compose_alloc(r1, AllocRecord()) == r1 and \
        compose_alloc(r1, r2) == compose_alloc(r2, r1) and \
        compose_alloc(compose_alloc(r1, r2), r3) == compose_alloc(r1, compose_alloc(r2, r3)), \
        {"records": [repr(r1), repr(r2), repr(r3)]}, "commutative monoid on records"


def check_state_props(models=("concrete", "symbolic"), trials: int = 300, seed: int = 0) -> Report:
    """State-model laws: context strengthening, coverage, assume, freshness and composition."""
    rep = Report("state")
    for tag in models:
        gen = GENS[tag]
        sm = StateModel(gen.mm)
        for t in range(trials):
            rng = rng_for(seed, "state", tag, t)
            tseed = f"{seed}:state:{tag}:{t}"
            for prop, r, inp, got in _state_props(sm, gen, rng):
                _record(rep, f"{prop}/{tag}", r, tseed, inp, prop, got)
    return rep
