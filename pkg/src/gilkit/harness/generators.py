"""Random programs, memories, arguments and frames for the test suites.

Everything here is a pure function of a ``random.Random`` instance, so a
trial is reproduced from its seed alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..allocator import AllocRecord, Range
from ..heap import FREED, Heap, SYMBOLIC
from ..interpreter import Config, Frame
from ..ops import conj, mk_eq, mk_not
from ..state import State, Store
from ..syntax import (Action, Assign, BinOp, Call, Expr, Fail, ISym, IfGoto, Lit, PVar, Proc, Prog,
                      Return, SVar, UnOp, USym, Vanish, mk_list)
from ..values import BOOL_T, INT_T, LOC_T, NULL, Loc, ProcId


@dataclass
class GenConfig:
    """Bounds for generated programs and their symbolic inputs."""

    max_cmds: int = 25
    max_procs: int = 3
    max_inputs: int = 3          # symbolic input variables (int/bool) in main's store
    max_cells: int = 2           # cells in the initial symbolic heap
    max_gotos: int = 4
    vanish: bool = False
    seed: int = 0
    actions: tuple = ("alloc", "load", "store", "free")


def rng_for(*parts) -> random.Random:
    return random.Random(":".join(map(str, parts)))


# -- symbolic inputs ------------------------------------------------------------

@dataclass
class Inputs:
    """Initial symbolic state of a generated program."""

    store: dict
    heap: Heap
    pc: Expr
    svars: tuple
    locs: tuple = ()             # program variables holding locations

    def state(self) -> State:
        return State(self.heap, Store(self.store), AllocRecord(), self.pc)


def typeof_is(e: Expr, t) -> Expr:
    return mk_eq(UnOp("typeof", e), Lit(t))


def distinct(keys) -> Expr:
    keys = list(keys)
    return conj(*(mk_not(mk_eq(keys[i], keys[j]))
                  for i in range(len(keys)) for j in range(i + 1, len(keys))))


def gen_inputs(rng: random.Random, cfg: GenConfig, max_svars: int | None = None) -> Inputs:
    store, parts, names, locs = {}, [], [], []
    budget = max_svars if max_svars is not None else 99
    n_in = rng.randint(1, cfg.max_inputs)
    for i in range(n_in):
        if len(names) >= budget:
            break
        s = SVar(f"i{i}")
        names.append(s.name)
        if i == 0 or rng.random() < 0.6:
            parts.append(typeof_is(s, INT_T))
            store[f"n{i}"] = s
        else:
            parts.append(typeof_is(s, BOOL_T))
            store[f"b{i}"] = s
    bindings = []
    n_cells = rng.randint(0, cfg.max_cells)
    for c in range(n_cells):
        if len(names) >= budget:
            break
        k = SVar(f"k{c}")
        names.append(k.name)
        parts.append(typeof_is(k, LOC_T))
        if rng.random() < 0.2:
            v = FREED
        elif len(names) < budget and rng.random() < 0.6:
            v = SVar(f"v{c}")
            names.append(v.name)
            parts.append(typeof_is(v, INT_T))
        else:
            v = Lit(rng.choice([0, 1, 5]))
        bindings.append((k, v))
        store[f"p{c}"] = k
        locs.append(f"p{c}")
    parts.append(distinct(k for k, _ in bindings))
    if not store:
        store["n0"] = Lit(0)
    return Inputs(store, Heap(bindings), conj(*parts), tuple(names), tuple(locs))


def initial_config(prog: Prog, inp: Inputs) -> Config:
    return Config(inp.state(), (Frame("main"),), 0)


# -- programs -------------------------------------------------------------------

class _ProcGen:
    """Builds one loop-free procedure body over a fixed, pre-initialised variable set."""

    def __init__(self, rng, cfg: GenConfig, ints, bools, locs, anys, callees: list):
        self.rng, self.cfg = rng, cfg
        self.ints, self.bools, self.locs, self.anys = ints, bools, locs, anys
        self.callees = callees
        self.body: list = []
        self.gotos: list[int] = []
        self.inner: set[int] = set()     # second halves of two-command idioms, never jump targets

    # expressions over initialised variables; no partial operators
    def int_expr(self, d=0) -> Expr:
        r = self.rng.random()
        if d >= 2 or r < 0.35:
            if self.ints and self.rng.random() < 0.7:
                return PVar(self.rng.choice(self.ints))
            return Lit(self.rng.randint(-2, 5))
        op = self.rng.choice(["+", "-", "*", "+"])
        return BinOp(op, self.int_expr(d + 1), self.int_expr(d + 1))

    def bool_expr(self, d=0) -> Expr:
        r = self.rng.random()
        if d >= 2 or r < 0.5:
            k = self.rng.random()
            if k < 0.55:
                return BinOp(self.rng.choice(["<", "<=", ">", ">=", "="]), self.int_expr(1),
                             self.int_expr(1))
            if k < 0.75 and self.bools:
                return PVar(self.rng.choice(self.bools))
            if k < 0.9 and len(self.locs) + len(self.anys) >= 2:
                pool = self.locs + self.anys
                a, b = self.rng.sample(pool, 2)
                return BinOp("=", PVar(a), PVar(b))
            return Lit(self.rng.random() < 0.5)
        if self.rng.random() < 0.3:
            return UnOp("not", self.bool_expr(d + 1))
        return BinOp(self.rng.choice(["and", "or"]), self.bool_expr(d + 1), self.bool_expr(d + 1))

    def any_expr(self) -> Expr:
        k = self.rng.random()
        if k < 0.4:
            return self.int_expr(1)
        if k < 0.55 and self.bools:
            return PVar(self.rng.choice(self.bools))
        if k < 0.75 and self.anys:
            return PVar(self.rng.choice(self.anys))
        if k < 0.9 and self.locs:
            return PVar(self.rng.choice(self.locs))
        return Lit(self.rng.choice([NULL, "a", True]))

    def loc_expr(self) -> Expr:
        if self.locs and self.rng.random() < 0.85:
            return PVar(self.rng.choice(self.locs))
        if self.anys and self.rng.random() < 0.5:
            return PVar(self.rng.choice(self.anys))
        return Lit(self.rng.choice([NULL, 0]))

    def emit(self, c) -> None:
        self.body.append(c)

    def command(self, remaining: int) -> None:
        rng = self.rng
        r = rng.random()
        acts = self.cfg.actions
        if r < 0.18 and self.ints:
            self.emit(Assign(rng.choice(self.ints), self.int_expr()))
        elif r < 0.26 and self.bools:
            self.emit(Assign(rng.choice(self.bools), self.bool_expr()))
        elif r < 0.40 and len(self.gotos) < self.cfg.max_gotos:
            self.gotos.append(len(self.body))
            self.emit(IfGoto(self.bool_expr(), -1))
        elif r < 0.50 and "alloc" in acts and remaining >= 3:
            l = rng.choice(self.locs)
            self.emit(USym(l, Lit(1)))
            self.inner.add(len(self.body))
            self.emit(Assign(l, UnOp("hd", PVar(l))))
            self.emit(Action(rng.choice(self.anys), "alloc", PVar(l)))
        elif r < 0.62 and "load" in acts:
            self.emit(Action(rng.choice(self.anys), "load", self.loc_expr()))
        elif r < 0.74 and "store" in acts:
            self.emit(Action(rng.choice(self.anys), "store", mk_list([self.loc_expr(), self.any_expr()])))
        elif r < 0.80 and "free" in acts:
            self.emit(Action(rng.choice(self.anys), "free", self.loc_expr()))
        elif r < 0.84 and remaining >= 2:
            v = rng.choice(self.anys)
            self.emit(ISym(v, Lit(1)))
            self.inner.add(len(self.body))
            self.emit(Assign(v, UnOp("hd", PVar(v))))
        elif r < 0.90 and self.callees:
            name, sort = rng.choice(self.callees)
            arg = self.int_expr(1) if sort == "int" else self.loc_expr()
            self.emit(Call(rng.choice(self.anys), Lit(ProcId(name)), arg))
        elif r < 0.93:
            self.emit(Fail(self.any_expr()))
        elif r < 0.95 and self.cfg.vanish:
            self.emit(Vanish())
        else:
            self.emit(Return(self.any_expr()))

    def finish(self) -> tuple:
        self.body.append(Return(self.any_expr()))
        n = len(self.body)
        for g in self.gotos:
            c = self.body[g]
            targets = [t for t in range(g + 1, n) if t not in self.inner]
            self.body[g] = IfGoto(c.guard, self.rng.choice(targets))
        return tuple(self.body)


def gen_program(rng: random.Random, cfg: GenConfig, inp: Inputs) -> Prog:
    """A loop-free program; main sees the inputs' store, helpers take one parameter."""
    n_procs = rng.randint(1, cfg.max_procs)
    names = ["main"] + [f"h{i}" for i in range(1, n_procs)]
    sorts = {n: rng.choice(["int", "loc"]) for n in names[1:]}
    total = rng.randint(min(12, cfg.max_cmds), cfg.max_cmds)
    used = 0
    procs = {}
    for idx in range(n_procs - 1, -1, -1):
        name = names[idx]
        callees = [(n, sorts[n]) for n in names[idx + 1:]]
        init = []
        if name == "main":
            ints = [v for v in inp.store if v.startswith("n")]
            bools = [v for v in inp.store if v.startswith("b")]
            locs = list(inp.locs)
            param = "x"
        else:
            param = "x"
            ints, bools, locs = ([param], [], []) if sorts[name] == "int" else ([], [], [param])
        # locals, always initialised first so every path sees them bound
        ints = ints + ["t"]
        init.append(Assign("t", Lit(rng.randint(0, 3))))
        locs = locs + ["q"]
        init.append(Assign("q", Lit(NULL)))
        anys = ["a", "u"]
        init += [Assign("a", Lit(0)), Assign("u", Lit(NULL))]
        if not bools:
            bools = ["c"]
            init.append(Assign("c", Lit(False)))
        g = _ProcGen(rng, cfg, ints, bools, locs, anys, callees)
        g.body = list(init)
        size = rng.randint(7, 8) if name != "main" else total - used
        size = max(size, len(init) + 2)
        budget = size - len(init) - 1
        while len(g.body) - len(init) < budget:
            g.command(budget - (len(g.body) - len(init)))
        procs[name] = Proc(name, param, g.finish())
        used += len(procs[name].body)
    return Prog(dict(sorted(procs.items())), {})


def program_size(p: Prog) -> int:
    return sum(len(pr.body) for pr in p.procs.values())


# -- memories and arguments for model-level suites -------------------------------

CONC_LOCS = tuple(Loc(f"l{i}") for i in range(4))


def conc_value(rng) -> object:
    return rng.choice([0, 1, 7, -1, True, "a", NULL, CONC_LOCS[rng.randrange(4)]])


def conc_heap(rng, n_max: int = 3) -> Heap:
    n = rng.randint(0, n_max)
    keys = rng.sample(CONC_LOCS, n)
    b = [(k, FREED if rng.random() < 0.25 else conc_value(rng)) for k in keys]
    return Heap(sorted(b, key=lambda kv: kv[0].name))


def conc_key(rng, heap: Heap):
    r = rng.random()
    if heap.bindings and r < 0.55:
        return rng.choice(heap.keys())
    if r < 0.85:
        return rng.choice(CONC_LOCS)
    return rng.choice([3, NULL, "a"])


@dataclass
class SymMem:
    heap: Heap
    pc: Expr
    names: list = field(default_factory=list)


def sym_heap(rng, n_max: int = 3, prefix: str = "") -> SymMem:
    """A symbolic heap with pc ⇒ well-formedness (keys are locations and distinct)."""
    n = rng.randint(0, n_max)
    bindings, parts, names = [], [], []
    lits = rng.sample(range(4), 4)
    for i in range(n):
        if rng.random() < 0.4:
            k = Lit(Loc(f"l{lits[i]}"))
        else:
            k = SVar(f"{prefix}k{i}")
            names.append(k.name)
            parts.append(typeof_is(k, LOC_T))
        r = rng.random()
        if r < 0.2:
            v = FREED
        elif r < 0.6:
            v = SVar(f"{prefix}v{i}")
            names.append(v.name)
            if rng.random() < 0.7:
                parts.append(typeof_is(v, INT_T))
                if rng.random() < 0.3:
                    parts.append(BinOp(">", v, Lit(rng.randint(-1, 2))))
        else:
            v = Lit(rng.choice([0, 1, 7, True, "a"]))
        bindings.append((k, v))
    pc = conj(*parts, distinct(k for k, _ in bindings))
    return SymMem(Heap(bindings), pc, names)


def sym_key(rng, m: SymMem) -> tuple[Expr, Expr]:
    """An in-parameter and extra context for it."""
    r = rng.random()
    if m.heap.bindings and r < 0.5:
        return rng.choice(m.heap.keys()), Lit(True)
    if r < 0.65:
        return Lit(Loc(f"l{rng.randrange(4)}")), Lit(True)
    if r < 0.9:
        a = SVar("a")
        return a, typeof_is(a, LOC_T) if rng.random() < 0.6 else Lit(True)
    return Lit(rng.choice([3, NULL])), Lit(True)


def sym_value(rng) -> Expr:
    r = rng.random()
    if r < 0.5:
        return Lit(rng.choice([0, 1, 7, True, "a"]))
    return SVar("w")


def sym_frame(rng, base: SymMem, n_max: int = 2) -> SymMem:
    """A frame whose keys are fresh variables or literals unused by ``base``."""
    used = {k.value for k in base.heap.keys() if type(k) is Lit}
    free_lits = [Loc(f"l{i}") for i in range(4, 7)] + [Loc(f"l{i}") for i in range(4)
                                                         if Loc(f"l{i}") not in used]
    n = rng.randint(0, n_max)
    bindings, parts, names = [], [], []
    for i in range(n):
        if rng.random() < 0.3 and free_lits:
            k = Lit(free_lits.pop(rng.randrange(len(free_lits))))
        else:
            k = SVar(f"fk{i}")
            names.append(k.name)
            parts.append(typeof_is(k, LOC_T))
        v = FREED if rng.random() < 0.2 else Lit(rng.choice([0, 2, "b"]))
        bindings.append((k, v))
    pc = conj(*parts, distinct(k for k, _ in bindings))
    return SymMem(Heap(bindings), pc, names)
