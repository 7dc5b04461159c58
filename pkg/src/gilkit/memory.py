"""Memory-model interface shared by every instantiation.

A model supplies the compositional primitives (unit, partial composition,
well-formedness, one consumer and one producer per core predicate) and its
whole-program actions. Getters and setters are derived here once, from the
consumer and producer, and cannot be overridden.

Values and contexts are concrete Python values with ``pc = true`` in
concrete models, and symbolic expressions in symbolic ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable

from .ops import substitute
from .syntax import EList, EngineFault, Expr, Lit, SVar, TRUE, mk_list
from .values import Loc, Value


class Res(str, Enum):
    S = "S"
    E = "E"
    M = "M"


@dataclass(frozen=True)
class MemOutcome:
    mem: Any
    value: Any
    result: Res
    pc: Expr = TRUE


@dataclass(frozen=True)
class CorePred:
    name: str
    n_ins: int
    n_outs: int


class Renaming:
    """Partial injective, sort-preserving map on locations and symbolic variables."""

    def __init__(self, locs: dict | None = None, svars: dict | None = None):
        self.locs = dict(locs or {})
        self.svars = dict(svars or {})
        for a, b in self.locs.items():
            if type(a) is not Loc or type(b) is not Loc:
                raise ValueError("renaming must map locations to locations")
        for a, b in self.svars.items():
            if not isinstance(a, str) or not isinstance(b, str):
                raise ValueError("renaming must map symbolic variables to symbolic variables")
        if len(set(self.locs.values())) != len(self.locs):
            raise ValueError("renaming is not injective on locations")
        if len(set(self.svars.values())) != len(self.svars):
            raise ValueError("renaming is not injective on symbolic variables")

    @property
    def is_identity(self) -> bool:
        return all(a == b for a, b in self.locs.items()) and all(a == b for a, b in self.svars.items())

    def inverse(self) -> "Renaming":
        return Renaming({b: a for a, b in self.locs.items()}, {b: a for a, b in self.svars.items()})

    def value(self, v: Value) -> Value:
        if type(v) is Loc:
            return self.locs.get(v, v)
        if type(v) is tuple:
            return tuple(self.value(x) for x in v)
        return v

    def expr(self, e: Expr) -> Expr:
        def leaf(x):
            if type(x) is SVar and x.name in self.svars:
                return SVar(self.svars[x.name])
            return None
        e = substitute(e, leaf)
        return _map_lits(e, self.value)

    def __call__(self, t):
        return self.expr(t) if isinstance(t, Expr) else self.value(t)

    def __repr__(self) -> str:
        parts = [f"{a!r}->{b!r}" for a, b in self.locs.items()]
        parts += [f"#{a}->#{b}" for a, b in self.svars.items()]
        return "ℵ{" + ", ".join(parts) + "}"


def _map_lits(e: Expr, f) -> Expr:
    from .syntax import BinOp, UnOp
    t = type(e)
    if t is Lit:
        return Lit(f(e.value))
    if t is UnOp:
        return UnOp(e.op, _map_lits(e.arg, f))
    if t is BinOp:
        return BinOp(e.op, _map_lits(e.left, f), _map_lits(e.right, f))
    if t is EList:
        return mk_list(_map_lits(i, f) for i in e.items)
    return e


class MemoryModel:
    """Base class of compositional memory models.

    Subclasses implement the primitives; ``exec_action`` dispatches
    whole-program actions (``_act_<name>``), predicate actions
    (``cons_<p>``, ``prod_<p>``) and the derived ``getter_<p>``/``setter_<p>``.
    """

    name = "abstract"
    symbolic = False
    preds: dict[str, CorePred] = {}
    program_actions: tuple = ()

    # -- primitives
    def empty(self):
        raise NotImplementedError

    def wf(self, mem, pc: Expr = TRUE):
        raise NotImplementedError

    def compose(self, m1, m2):
        """Partial composition; None when undefined."""
        raise NotImplementedError

    def consume(self, pred: str, mem, ins: tuple, pc: Expr = TRUE) -> list[MemOutcome]:
        """Outcomes whose S values are the tuple of out-parameters."""
        raise NotImplementedError

    def produce(self, pred: str, mem, ins: tuple, outs: tuple, pc: Expr = TRUE) -> list[MemOutcome]:
        raise NotImplementedError

    def normal(self, mem):
        raise NotImplementedError

    def rename(self, mem, ren: Renaming):
        raise NotImplementedError

    def separation(self, m1, m2) -> Expr:
        """Constraint under which the composition of m1 and m2 is well formed."""
        return TRUE

    def pretty(self, mem) -> str:
        return repr(mem)

    def cpr(self, pred: str, ins: tuple, outs: tuple):
        """The memory holding exactly the resource of one core-predicate instance."""
        raise NotImplementedError

    def equality(self, m1, m2) -> Expr:
        """Constraint under which m1 and m2 denote the same memory."""
        return Lit(self.normal(m1) == self.normal(m2))

    def overwrite(self, pred: str, mem, ins: tuple, outs: tuple):
        # only used by the write-on-error mutant
        return mem

    def is_empty(self, mem) -> bool:
        return self.normal(mem) == self.normal(self.empty())

    # -- values
    def unpack(self, arg, n: int | None = None) -> tuple | None:
        """Split a list argument into its items; None on a non-list or wrong arity."""
        if self.symbolic:
            if type(arg) is Lit and type(arg.value) is tuple:
                items = tuple(Lit(v) for v in arg.value)
            elif type(arg) is EList:
                items = arg.items
            elif type(arg) is Lit:
                return None
            else:
                raise EngineFault(f"symbolic action argument must be a list literal, got {arg!r}")
        else:
            if type(arg) is not tuple:
                return None
            items = arg
        if n is not None and len(items) != n:
            return None
        return items

    def pack(self, items: Iterable):
        items = tuple(items)
        return mk_list(items) if self.symbolic else items

    def const(self, v: Value):
        return Lit(v) if self.symbolic else v

    # -- actions
    def actions(self) -> list[str]:
        out = list(self.program_actions)
        for p in self.preds:
            out += [f"cons_{p}", f"prod_{p}", f"getter_{p}", f"setter_{p}"]
        return out

    def exec_action(self, mem, action: str, arg, pc: Expr = TRUE) -> list[MemOutcome]:
        kind, _, pname = action.partition("_")
        if pname in self.preds and kind in ("cons", "prod", "getter", "setter"):
            p = self.preds[pname]
            if kind in ("cons", "getter"):
                ins = self.unpack(arg, p.n_ins)
                if ins is None:
                    return [self.error(mem, pc)]
                if kind == "cons":
                    return [MemOutcome(o.mem, self.pack(o.value), o.result, o.pc)
                            if o.result is Res.S else o for o in self.consume(pname, mem, ins, pc)]
                return self.getter(pname, mem, ins, pc)
            items = self.unpack(arg, p.n_ins + p.n_outs)
            if items is None:
                return [self.error(mem, pc)]
            ins, outs = items[:p.n_ins], items[p.n_ins:]
            if kind == "prod":
                return self.produce(pname, mem, ins, outs, pc)
            return self.setter(pname, mem, ins, outs, pc)
        if action in self.program_actions:
            return getattr(self, f"_act_{action}")(mem, arg, pc)
        raise EngineFault(f"unknown memory action {action!r} for model {self.name}")

    def error(self, mem, pc: Expr) -> MemOutcome:
        return MemOutcome(mem, self.const(False), Res.E, pc)

    # -- derived getter and setter
    def getter(self, pred: str, mem, ins: tuple, pc: Expr = TRUE) -> list[MemOutcome]:
        out = []
        for c in self.consume(pred, mem, ins, pc):
            if c.result is not Res.S:
                out.append(MemOutcome(mem, self.const(False), c.result, c.pc))
                continue
            for p in self.produce(pred, c.mem, ins, c.value, c.pc):
                if p.result is Res.S:
                    out.append(MemOutcome(p.mem, self.pack(c.value), Res.S, p.pc))
                else:
                    out.append(MemOutcome(mem, self.const(False), p.result, p.pc))
        return out

    def setter(self, pred: str, mem, ins: tuple, outs: tuple, pc: Expr = TRUE) -> list[MemOutcome]:
        from . import mutants
        out = []
        for c in self.consume(pred, mem, ins, pc):
            if c.result is not Res.S:
                if mutants.active("write-on-error") and c.result is Res.E:
                    # planted bug: the failed write still lands
                    out.append(MemOutcome(self.overwrite(pred, mem, ins, outs), self.const(False),
                                          c.result, c.pc))
                    continue
                out.append(MemOutcome(mem, self.const(False), c.result, c.pc))
                continue
            for p in self.produce(pred, c.mem, ins, outs, c.pc):
                if p.result is Res.S:
                    out.append(MemOutcome(p.mem, self.const(True), Res.S, p.pc))
                else:
                    out.append(MemOutcome(mem, self.const(False), p.result, p.pc))
        return out
