"""Cell heap: core predicates ``cell(l; v)`` and ``freed(l;)``.

Both variants store an ordered tuple of ``(key, value)`` bindings where the
value is either a GIL value (or symbolic expression) or the ``FREED`` marker,
the negative resource recording that a location has been deallocated.
Concrete heaps keep bindings sorted; symbolic heaps keep insertion order and
branch on key equality in that order, so branch contexts are disjoint by
construction.
"""

from __future__ import annotations

import itertools

from . import mutants, solver
from .memory import CorePred, MemOutcome, MemoryModel, Renaming, Res
from .ops import EvalError, conj, conjuncts, disj, evaluate, mk_eq, mk_not
from .syntax import Expr, Lit, TRUE, UnOp, expr_svars, subterms
from .values import LOC_T, NULL, Loc, show_value, vkey


class _Freed:
    __slots__ = ()

    def __repr__(self) -> str:
        return "FREED"

    def __reduce__(self):
        return "FREED"


FREED = _Freed()


def _k(x) -> tuple:
    if x is FREED:
        return ("freed",)
    if isinstance(x, Expr):
        return ("e", x)
    return vkey(x)


class Heap:
    """Immutable list of bindings with strict (sort-aware) equality."""

    __slots__ = ("bindings", "_key")

    def __init__(self, bindings=()):
        self.bindings = tuple(bindings)
        self._key = tuple((_k(a), _k(b)) for a, b in self.bindings)

    def __eq__(self, other) -> bool:
        return isinstance(other, Heap) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __len__(self) -> int:
        return len(self.bindings)

    def __iter__(self):
        return iter(self.bindings)

    def keys(self) -> list:
        return [k for k, _ in self.bindings]

    def lookup(self, key):
        for k, v in self.bindings:
            if _k(k) == _k(key):
                return v
        return None

    def without(self, i: int) -> "Heap":
        return Heap(self.bindings[:i] + self.bindings[i + 1:])

    def plus(self, key, val) -> "Heap":
        return Heap(self.bindings + ((key, val),))

    def __repr__(self) -> str:
        return pretty(self)


def _show(x) -> str:
    if x is FREED:
        return "FREED"
    if isinstance(x, Expr):
        from .printer import show_expr
        s = show_expr(x)
        return s[1:] if type(x) is Lit and type(x.value) is Loc else s
    if type(x) is Loc:
        return x.name
    return show_value(x)


def pretty(h: Heap) -> str:
    if not h.bindings:
        return "{}"
    return "{ " + ", ".join(f"{_show(k)} -> {_show(v)}" for k, v in h.bindings) + " }"


PREDS = {"cell": CorePred("cell", 1, 1), "freed": CorePred("freed", 1, 0)}


def _val_of(pred: str, outs: tuple):
    return FREED if pred == "freed" else outs[0]


def _outs_of(pred: str, v) -> tuple | None:
    # None: binding is not this predicate's resource
    if pred == "freed":
        return () if v is FREED else None
    return None if v is FREED else (v,)


class ConcreteHeapModel(MemoryModel):
    name = "heap"
    symbolic = False
    preds = PREDS
    program_actions = ("alloc", "load", "store", "free")

    def empty(self) -> Heap:
        return Heap()

    def canon(self, bindings) -> Heap:
        return Heap(sorted(bindings, key=lambda kv: vkey(kv[0])))

    def wf(self, mem: Heap, pc=TRUE) -> bool:
        keys = mem.keys()
        return all(type(k) is Loc for k in keys) and len({vkey(k) for k in keys}) == len(keys)

    def compose(self, m1: Heap, m2: Heap):
        k1 = {vkey(k) for k in m1.keys()}
        if any(vkey(k) in k1 for k in m2.keys()):
            return None
        return self.canon(m1.bindings + m2.bindings)

    def normal(self, mem: Heap) -> Heap:
        return self.canon(mem.bindings)

    def rename(self, mem: Heap, ren: Renaming) -> Heap:
        return self.canon((ren.value(k), v if v is FREED else ren.value(v)) for k, v in mem)

    def pretty(self, mem: Heap) -> str:
        return pretty(mem)

    def cpr(self, pred, ins, outs) -> Heap:
        return self.canon([(ins[0], _val_of(pred, outs))])

    def consume(self, pred, mem: Heap, ins, pc=TRUE):
        (l,) = ins
        if type(l) is not Loc:
            return [MemOutcome(mem, False, Res.E, pc)]
        for i, (k, v) in enumerate(mem.bindings):
            if vkey(k) == vkey(l):
                outs = _outs_of(pred, v)
                if outs is None:
                    return [MemOutcome(mem, False, Res.E, pc)]
                return [MemOutcome(mem.without(i), outs, Res.S, pc)]
        if pred == "cell" and mutants.active("drop-neq-branch"):
            return []
        return [MemOutcome(mem, False, Res.M, pc)]

    def produce(self, pred, mem: Heap, ins, outs, pc=TRUE):
        (l,) = ins
        if type(l) is not Loc:
            return [MemOutcome(mem, False, Res.E, pc)]
        if mem.lookup(l) is not None and not (pred == "cell" and mutants.active("duplicate-producer")):
            return [MemOutcome(mem, False, Res.E, pc)]
        return [MemOutcome(self.canon(mem.bindings + ((l, _val_of(pred, outs)),)), True, Res.S, pc)]

    def overwrite(self, pred, mem: Heap, ins, outs):
        kept = [(k, v) for k, v in mem if vkey(k) != vkey(ins[0])]
        return self.canon(kept + [(ins[0], _val_of(pred, outs))])

    # whole-program actions
    def _act_alloc(self, mem, l, pc=TRUE):
        out = []
        for o in self.produce("cell", mem, (l,), (self.const(NULL),), pc):
            out.append(MemOutcome(o.mem, l, o.result, o.pc) if o.result is Res.S
                       else MemOutcome(mem, self.const(False), o.result, o.pc))
        return out

    def _act_load(self, mem, l, pc=TRUE):
        out = []
        for o in self.getter("cell", mem, (l,), pc):
            if o.result is Res.S:
                (v,) = self.unpack(o.value)
                o = MemOutcome(o.mem, v, Res.S, o.pc)
            out.append(o)
        return out

    def _act_store(self, mem, arg, pc=TRUE):
        items = self.unpack(arg, 2)
        if items is None:
            return [self.error(mem, pc)]
        return self.setter("cell", mem, items[:1], items[1:], pc)

    def _act_free(self, mem, l, pc=TRUE):
        out = []
        for c in self.consume("cell", mem, (l,), pc):
            if c.result is not Res.S:
                out.append(MemOutcome(mem, self.const(False), c.result, c.pc))
                continue
            for p in self.produce("freed", c.mem, (l,), (), c.pc):
                if p.result is Res.S:
                    out.append(MemOutcome(p.mem, self.const(True), Res.S, p.pc))
                else:
                    out.append(MemOutcome(mem, self.const(False), p.result, p.pc))
        return out

    def interpret(self, eps, mem):
        return mem


def _typeof_loc(e: Expr) -> Expr:
    return mk_eq(UnOp("typeof", e), Lit(LOC_T))


def _loc_guards(l: Expr, pc: Expr) -> tuple[Expr, Expr]:
    """(is-location, is-not-location) constraints for key l, trivial when decided."""
    if type(l) is Lit:
        return (TRUE, Lit(False)) if type(l.value) is Loc else (Lit(False), TRUE)
    pos = _typeof_loc(l)
    if pos in conjuncts(pc):
        return TRUE, Lit(False)
    return pos, mk_not(pos)


def _feasible(pc: Expr) -> bool:
    if pc == Lit(False):
        return False
    r = solver.sat(pc)
    # Unknown is kept: branches may only be dropped on a definite Unsat
    return not isinstance(r, solver.Unsat)


class SymbolicHeapModel(ConcreteHeapModel):
    name = "sheap"
    symbolic = True

    def canon(self, bindings) -> Heap:
        return Heap(bindings)

    def wf_constraint(self, mem: Heap) -> Expr:
        keys = mem.keys()
        parts = []
        for k in keys:
            parts.append(_loc_guards(k, TRUE)[0])
        for i in range(len(keys)):
            for j in range(i + 1, len(keys)):
                parts.append(mk_not(mk_eq(keys[i], keys[j])))
        return conj(*parts)

    def wf(self, mem: Heap, pc: Expr = TRUE):
        return solver.is_sat(conj(pc, self.wf_constraint(mem)))

    def compose(self, m1: Heap, m2: Heap):
        k1 = {_k(k) for k in m1.keys()}
        if any(_k(k) in k1 for k in m2.keys()):
            return None
        return Heap(m1.bindings + m2.bindings)

    def equality(self, m1: Heap, m2: Heap) -> Expr:
        """Some bijection between the bindings matches keys and values."""
        a, b = m1.bindings, m2.bindings
        if len(a) != len(b):
            return Lit(False)
        options = []
        for perm in itertools.permutations(range(len(b))):
            parts = []
            for (k, v), j in zip(a, perm):
                k2, v2 = b[j]
                if (v is FREED) != (v2 is FREED):
                    break
                parts.append(mk_eq(k, k2))
                if v is not FREED:
                    parts.append(mk_eq(v, v2))
            else:
                options.append(conj(*parts))
        return disj(options)

    def separation(self, m1: Heap, m2: Heap) -> Expr:
        return conj(*(mk_not(mk_eq(a, b)) for a in m1.keys() for b in m2.keys()))

    def normal(self, mem: Heap) -> Heap:
        from .printer import show_expr
        return Heap(sorted(mem.bindings, key=lambda kv: show_expr(kv[0])))

    def rename(self, mem: Heap, ren: Renaming) -> Heap:
        return Heap((ren.expr(k), v if v is FREED else ren.expr(v)) for k, v in mem)

    def consume(self, pred, mem: Heap, ins, pc=TRUE):
        (l,) = ins
        out = []
        neq: list[Expr] = []
        for i, (k, v) in enumerate(mem.bindings):
            here = conj(pc, mk_eq(l, k), *neq)
            if _feasible(here):
                outs = _outs_of(pred, v)
                if outs is None:
                    out.append(MemOutcome(mem, Lit(False), Res.E, here))
                else:
                    if mutants.active("strengthen-consumer") and pred == "cell":
                        here = conj(here, mk_not(mk_eq(outs[0], Lit(0))))
                    out.append(MemOutcome(mem.without(i), outs, Res.S, here))
            neq.append(mk_not(mk_eq(l, k)))
        rest = conj(pc, *neq)
        pos, neg = _loc_guards(l, rest)
        miss, bad = conj(rest, pos), conj(rest, neg)
        if not (pred == "cell" and mutants.active("drop-neq-branch")) and _feasible(miss):
            out.append(MemOutcome(mem, Lit(False), Res.M, miss))
        if _feasible(bad):
            out.append(MemOutcome(mem, Lit(False), Res.E, bad))
        return out

    def produce(self, pred, mem: Heap, ins, outs, pc=TRUE):
        (l,) = ins
        dup = pred == "cell" and mutants.active("duplicate-producer")
        out = []
        neq: list[Expr] = []
        if not dup:
            for k in mem.keys():
                here = conj(pc, mk_eq(l, k), *neq)
                if _feasible(here):
                    out.append(MemOutcome(mem, Lit(False), Res.E, here))
                neq.append(mk_not(mk_eq(l, k)))
        rest = conj(pc, *neq)
        pos, neg = _loc_guards(l, rest)
        good, bad = conj(rest, pos), conj(rest, neg)
        if _feasible(good):
            out.append(MemOutcome(mem.plus(l, _val_of(pred, outs)), Lit(True), Res.S, good))
        if _feasible(bad):
            out.append(MemOutcome(mem, Lit(False), Res.E, bad))
        return out

    def overwrite(self, pred, mem: Heap, ins, outs):
        kept = [(k, v) for k, v in mem if _k(k) != _k(ins[0])]
        return Heap(kept + [(ins[0], _val_of(pred, outs))])

    def interpret(self, eps: dict, mem: Heap):
        """Concrete heap under interpretation eps, or None when undefined."""
        out = []
        try:
            for k, v in mem:
                kv = evaluate(k, eps)
                vv = FREED if v is FREED else evaluate(v, eps)
                out.append((kv, vv))
        except EvalError:
            return None
        keys = [k for k, _ in out]
        if not all(type(k) is Loc for k in keys) or len({vkey(k) for k in keys}) != len(keys):
            return None
        return ConcreteHeapModel().canon(out)

    def mem_svars(self, mem: Heap) -> set:
        acc: set = set()
        for k, v in mem:
            expr_svars(k, acc)
            if v is not FREED:
                expr_svars(v, acc)
        return acc

    def mem_locs(self, mem: Heap) -> set:
        acc = set()
        for k, v in mem:
            for e in (k, v):
                if e is FREED:
                    continue
                for s in subterms(e):
                    if type(s) is Lit:
                        acc |= _locs_in(s.value)
        return acc


def _locs_in(v) -> set:
    if type(v) is Loc:
        return {v}
    if type(v) is tuple:
        out = set()
        for x in v:
            out |= _locs_in(x)
        return out
    return set()


def concrete_locs(mem: Heap) -> set:
    acc = set()
    for k, v in mem:
        acc |= _locs_in(k)
        if v is not FREED:
            acc |= _locs_in(v)
    return acc


CONCRETE = ConcreteHeapModel()
SYMBOLIC = SymbolicHeapModel()
