"""States over a memory model, the basic state actions and their compositions."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Iterator, Mapping

from . import mutants, solver
from .allocator import AllocRecord, EMPTY as EMPTY_ALLOC, Range, ValueSupply, alloc
from .allocator import compose as compose_alloc
from .memory import MemoryModel, Res
from .ops import EvalError, conj, evaluate, mk_eq, mk_not, simplify, substitute
from .syntax import EngineFault, Expr, Lit, PVar, SVar, TRUE, mk_list
from .values import UNDEFINED, Value, vkey


def _vk(v) -> tuple:
    return ("e", v) if isinstance(v, Expr) else vkey(v)


class Store(Mapping):
    """Immutable variable store with sort-aware equality."""

    __slots__ = ("_d", "_key")

    def __init__(self, items=()):
        d = dict(items.items() if isinstance(items, Mapping) else items)
        self._d = d
        self._key = tuple(sorted((k, _vk(v)) for k, v in d.items()))

    def __getitem__(self, k):
        return self._d[k]

    def __iter__(self) -> Iterator:
        return iter(sorted(self._d))

    def __len__(self) -> int:
        return len(self._d)

    def __eq__(self, other) -> bool:
        return isinstance(other, Store) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def set(self, k: str, v) -> "Store":
        d = dict(self._d)
        d[k] = v
        return Store(d)

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{k}: {self._d[k]!r}" for k in self) + "}"


@dataclass(frozen=True)
class State:
    mem: Any
    store: Store = field(default_factory=Store)
    alloc: AllocRecord = EMPTY_ALLOC
    pc: Expr = TRUE


@dataclass(frozen=True)
class StOutcome:
    state: State
    value: Any
    result: Res = Res.S


# -- state actions -------------------------------------------------------------

@dataclass(frozen=True)
class MemAct:
    name: str


@dataclass(frozen=True)
class SetVar:
    var: str


@dataclass(frozen=True)
class SetStore:
    pass


@dataclass(frozen=True)
class GetStore:
    pass


@dataclass(frozen=True)
class Eval:
    expr: Expr


@dataclass(frozen=True)
class Assume:
    pass


@dataclass(frozen=True)
class USymA:
    pass


@dataclass(frozen=True)
class ISymA:
    pass


@dataclass(frozen=True)
class Seq:
    """Run ``first``; on success feed its value to ``then``."""

    first: Any
    then: Any


@dataclass(frozen=True)
class Pair:
    """Apply ``left`` to v1 and ``right`` to v2 of a pair value [v1, v2]."""

    left: Any
    right: Any


class StateModel:
    """Execution and compositional state model over a memory model.

    ``symbolic`` selects the symbolic variant: values are expressions,
    assume consults the solver, iSym allocates symbolic variables. In the
    concrete variant iSym draws values from ``supply``.
    """

    def __init__(self, mem: MemoryModel, supply: ValueSupply | None = None):
        self.mm = mem
        self.symbolic = mem.symbolic
        self.supply = supply if supply is not None else ValueSupply()

    # -- helpers
    def initial(self, store: Mapping | None = None, mem=None, rec: AllocRecord = EMPTY_ALLOC,
                pc: Expr = TRUE) -> State:
        return State(self.mm.empty() if mem is None else mem, Store(store or {}), rec, pc)

    def const(self, v: Value):
        return Lit(v) if self.symbolic else v

    def lst(self, items) -> Any:
        items = tuple(items)
        return mk_list(items) if self.symbolic else items

    def items(self, v, n: int) -> tuple:
        items = self.mm.unpack(v, n)
        if items is None:
            raise EngineFault(f"expected a list of {n} values, got {v!r}")
        return items

    def eval_expr(self, e: Expr, store: Store):
        if self.symbolic:
            def leaf(x):
                if type(x) is PVar:
                    if x.name not in store:
                        raise EngineFault(f"unbound variable {x.name}")
                    return store[x.name]
                raise EngineFault(f"symbolic variable #{x.name} in program expression")
            try:
                return simplify(substitute(e, leaf))
            except EvalError as err:
                raise EngineFault(f"ill-sorted expression: {err}") from None
        try:
            return evaluate(e, store, program=True)
        except EvalError as err:
            raise EngineFault(f"cannot evaluate: {err}") from None

    def serialize_store(self, store: Mapping):
        return self.lst(self.lst((self.const(k), store[k])) for k in sorted(store))

    def deserialize_store(self, v) -> Store:
        out = {}
        n = len(self.mm.unpack(v) or ())
        for pair in self.items(v, n):
            name, val = self.items(pair, 2)
            name = name.value if self.symbolic else name
            if not isinstance(name, str):
                raise EngineFault("store keys must be strings")
            out[name] = val
        return Store(out)

    # -- action execution
    def ea(self, st: State, a, v=None) -> list[StOutcome]:
        t = type(a)
        if t is MemAct:
            return [StOutcome(replace(st, mem=o.mem, pc=o.pc), o.value, o.result)
                    for o in self.mm.exec_action(st.mem, a.name, v, st.pc)]
        if t is SetVar:
            return [StOutcome(replace(st, store=st.store.set(a.var, v)), self.const(True))]
        if t is SetStore:
            return [StOutcome(replace(st, store=self.deserialize_store(v)), self.const(True))]
        if t is GetStore:
            return [StOutcome(st, self.serialize_store(st.store))]
        if t is Eval:
            return [StOutcome(st, self.eval_expr(a.expr, st.store))]
        if t is Assume:
            return self._assume(st, v)
        if t is USymA:
            n = self._count(v)
            rec, locs = alloc(st.alloc, n, Range.LOCS)
            pc = st.pc
            if self.symbolic:
                # the record may hold symbolic locations; fresh ones differ from them all
                held = [x for x in st.alloc.get(Range.LOCS) if isinstance(x, Expr)]
                pc = conj(pc, *(mk_not(mk_eq(Lit(l), x)) for l in locs for x in held))
            return [StOutcome(replace(st, alloc=rec, pc=pc), self.lst(self.const(l) for l in locs))]
        if t is ISymA:
            n = self._count(v)
            if self.symbolic:
                rec, xs = alloc(st.alloc, n, Range.SVARS)
                return [StOutcome(replace(st, alloc=rec), mk_list(xs))]
            rec, vs = alloc(st.alloc, n, Range.VALUES, self.supply)
            return [StOutcome(replace(st, alloc=rec), tuple(vs))]
        if t is Seq:
            out = []
            for o in self.ea(st, a.first, v):
                if o.result is not Res.S:
                    out.append(o)
                else:
                    out.extend(self.ea(o.state, a.then, o.value))
            return out
        if t is Pair:
            v1, v2 = self.items(v, 2) if v is not None else (None, None)
            out = []
            for o in self.ea(st, a.left, v1):
                if o.result is not Res.S:
                    out.append(StOutcome(o.state, self.lst((o.value, self.const(UNDEFINED))), o.result))
                    continue
                for o2 in self.ea(o.state, a.right, v2):
                    out.append(StOutcome(o2.state, self.lst((o.value, o2.value)), o2.result))
            return out
        raise EngineFault(f"unknown state action {a!r}")

    def _count(self, v) -> int:
        n = v.value if self.symbolic and type(v) is Lit else v
        if type(n) is not int or n < 0:
            raise EngineFault(f"symbol allocation needs a concrete non-negative count, got {v!r}")
        return n

    def _assume(self, st: State, v) -> list[StOutcome]:
        if not self.symbolic:
            return [StOutcome(st, True)] if v is True else []
        if mutants.active("weaken-assume"):
            return [StOutcome(st, Lit(True))] if v != Lit(False) else []
        pc = conj(st.pc, v)
        if pc == Lit(False):
            return []
        r = solver.sat(pc)
        if isinstance(r, solver.Unsat):
            return []
        return [StOutcome(replace(st, pc=pc), Lit(True))]

    # -- compositional
    def compose(self, s1: State, s2: State) -> State | None:
        if bool(s1.store) == bool(s2.store):
            return None
        mem = self.mm.compose(s1.mem, s2.mem)
        if mem is None:
            return None
        pc = conj(s1.pc, s2.pc)
        if self.symbolic:
            pc = conj(pc, self.mm.separation(s1.mem, s2.mem))
        wf = self.mm.wf(mem, pc)
        if wf is not True:
            return None
        store = s1.store if s1.store else s2.store
        return State(mem, store, compose_alloc(s1.alloc, s2.alloc), pc)

    def unit(self) -> State:
        return State(self.mm.empty(), Store(), EMPTY_ALLOC, TRUE)

    def wf(self, st: State):
        return self.mm.wf(st.mem, st.pc)


def svars_of_value(v) -> set:
    from .syntax import expr_svars
    return expr_svars(v) if isinstance(v, Expr) else set()


def state_svars(st: State, mm: MemoryModel) -> set:
    from .syntax import expr_svars
    acc = set(expr_svars(st.pc))
    for v in st.store.values():
        acc |= svars_of_value(v)
    if hasattr(mm, "mem_svars"):
        acc |= mm.mem_svars(st.mem)
    for x in st.alloc.get(Range.SVARS):
        acc.add(x.name)
    return acc


__all__ = ["Store", "State", "StOutcome", "StateModel", "MemAct", "SetVar", "SetStore",
           "GetStore", "Eval", "Assume", "USymA", "ISymA", "Seq", "Pair"]
