"""Bounded model finder for path conditions.

The search works on the conjuncts of the simplified formula. Every symbolic
variable gets a finite candidate domain chosen from its inferred sort; top
level equalities ``#v = e`` define ``#v`` instead of enumerating it. Each
conjunct is checked as soon as the variables it depends on are assigned.
A candidate model is accepted only if the *original* formula evaluates to
true under it, so Sat answers are always genuine. Simplification only ever
weakens (under strict evaluation every model of the input is a model of the
simplified form), so exhausting the simplified search space also proves the
input unsatisfiable within the domains.

Unknown is returned when floats occur, when a variable must be a float, or
when the node budget runs out.
"""

from __future__ import annotations

import itertools
import os
import random
import threading
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Iterator

from .ops import EvalError, conj, conjuncts, disj, evaluate, mk_eq, mk_not, simplify
from .syntax import BinOp, EList, Expr, Lit, SVar, UnOp, expr_svars, subterms
from .values import (BOOL_T, INT_T, LIST_T, LOC_T, NULL, NUM_T, PROC_T, STR_T,
                     SYM_T, TYPE_T, TYPES, Loc, ProcId, Sym, TypeConst, vkey)


@dataclass(frozen=True)
class Sat:
    model: dict

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Unsat:
    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class Unknown:
    reason: str

    def __bool__(self) -> bool:
        raise TypeError(f"solver verdict is Unknown ({self.reason}); test it explicitly")


UNSAT = Unsat()
Verdict = Sat | Unsat | Unknown


class _UnknownTruth:
    """Third truth value returned by :func:`entails`."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __bool__(self) -> bool:
        raise TypeError("entailment is Unknown; compare with `is UNKNOWN` first")

    def __repr__(self) -> str:
        return "UNKNOWN"


UNKNOWN = _UnknownTruth()


@dataclass(frozen=True)
class SolverConfig:
    domain: int = 8          # size of the base integer domain
    budget: int = 200_000    # evaluation nodes per query
    list_len: int = 4
    split_cap: int = 64      # most case-split branches explored for top-level disjunctions

    @staticmethod
    def default() -> "SolverConfig":
        d = os.environ.get("GIL_SOLVER_DOMAIN")
        return SolverConfig(domain=int(d)) if d else SolverConfig()


class _Budget(Exception):
    pass


# -- sort inference ----------------------------------------------------------

_ARITH = {"+", "-", "*", "div", "mod", "<", "<=", ">", ">="}


class SortConflict(Exception):
    pass


def infer_sorts(pi: Expr) -> dict[str, TypeConst]:
    """Sorts forced on symbolic variables by their operator positions.

    Evaluation is strict, so a variable under an integer operator must be an
    integer in every model. Top-level ``typeof(#x) = T`` conjuncts force T.
    Raises SortConflict when two positions disagree.
    """
    out: dict[str, TypeConst] = {}

    def force(name: str, t: TypeConst) -> None:
        prev = out.setdefault(name, t)
        if prev != t:
            raise SortConflict(f"#{name} used as {prev} and {t}")

    def walk(e: Expr, want: TypeConst | None) -> None:
        t = type(e)
        if t is SVar:
            if want is not None:
                force(e.name, want)
        elif t is UnOp:
            walk(e.arg, {"-": INT_T, "not": BOOL_T, "len": LIST_T, "slen": STR_T,
                         "hd": LIST_T, "tl": LIST_T}.get(e.op))
        elif t is BinOp:
            op = e.op
            if op in _ARITH:
                walk(e.left, INT_T)
                walk(e.right, INT_T)
            elif op in ("and", "or", "=>"):
                walk(e.left, BOOL_T)
                walk(e.right, BOOL_T)
            elif op == "++":
                walk(e.left, STR_T)
                walk(e.right, STR_T)
            elif op == "::":
                walk(e.left, None)
                walk(e.right, LIST_T)
            elif op == "@":
                walk(e.left, LIST_T)
                walk(e.right, LIST_T)
            elif op == "nth":
                walk(e.left, LIST_T)
                walk(e.right, INT_T)
            else:
                walk(e.left, None)
                walk(e.right, None)
        elif t is EList:
            for i in e.items:
                walk(i, None)

    walk(pi, BOOL_T)
    for c in conjuncts(pi):
        if type(c) is BinOp and c.op == "=":
            for a, b in ((c.left, c.right), (c.right, c.left)):
                if (type(a) is UnOp and a.op == "typeof" and type(a.arg) is SVar
                        and type(b) is Lit and isinstance(b.value, TypeConst)):
                    force(a.arg.name, b.value)
    return out


# -- domains -----------------------------------------------------------------

def _base_ints(n: int) -> list[int]:
    out, k = [0], 1
    while len(out) < n:
        out.append(k)
        if len(out) < n:
            out.append(-k)
        k += 1
    return out


def _linear(e: Expr) -> dict | None:
    """Coefficients of an integer-linear term (the constant under key None), else None."""
    t = type(e)
    if t is Lit:
        return {None: e.value} if type(e.value) is int else None
    if t is SVar:
        return {e.name: 1}
    if t is UnOp and e.op == "-":
        a = _linear(e.arg)
        return None if a is None else {k: -v for k, v in a.items()}
    if t is not BinOp or e.op not in ("+", "-", "*"):
        return None
    a, b = _linear(e.left), _linear(e.right)
    if a is None or b is None:
        return None
    if e.op == "*":
        if set(a) == {None}:
            a, b = b, a
        if set(b) != {None}:
            return None
        return {k: v * b[None] for k, v in a.items()}
    sign = 1 if e.op == "+" else -1
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
    return out


def _boundaries(pi: Expr) -> list[int]:
    """Integer points where a one-variable linear comparison changes truth value.

    An atom such as ``#x - 3 > 2`` only holds outside the literal neighbourhoods, so
    the root of ``a * #x + b`` (rounded both ways, with neighbours) joins the domain.
    """
    out = []
    for s in subterms(pi):
        if not (type(s) is BinOp and s.op in ("<", "<=", ">", ">=", "=")):
            continue
        lin = _linear(BinOp("-", s.left, s.right))
        if lin is None:
            continue
        coeffs = {k: v for k, v in lin.items() if k is not None and v}
        if len(coeffs) != 1:
            continue
        (a,) = coeffs.values()
        lo = -lin.get(None, 0) // a
        out += [lo - 1, lo, lo + 1, lo + 2]
    return out


class _Fresh:
    """Interchangeable fresh constants of one kind, used with symmetry breaking."""

    def __init__(self, kind: type, prefix: str, taken: set, limit: int):
        self.kind = kind
        self.names = []
        i = 0
        while len(self.names) < limit:
            v = kind(f"{prefix}{i}")
            if vkey(v) not in taken:
                self.names.append(v)
            i += 1
        self.keys = {vkey(v) for v in self.names}

    def candidates(self, asg: dict) -> list:
        used = {vkey(v) for v in asg.values() if vkey(v) in self.keys}
        out = [v for v in self.names if vkey(v) in used]
        nxt = next((v for v in self.names if vkey(v) not in used), None)
        return out + ([nxt] if nxt is not None else [])


class _Domains:
    def __init__(self, pi: Expr, nvars: int, cfg: SolverConfig):
        lits = [s.value for s in subterms(pi) if type(s) is Lit]
        flat: list = []

        def add(v):
            if type(v) is tuple:
                for x in v:
                    add(x)
            flat.append(v)

        for v in lits:
            add(v)
        taken = {vkey(v) for v in flat}
        consts = sorted({v for v in flat if type(v) is int})
        near = []
        for c in consts:
            near += [c, c - 1, c + 1]
        self.ints = _dedup(_base_ints(cfg.domain) + near + _boundaries(pi))
        self.strs = _dedup(["", "a", "b"] + sorted(v for v in flat if type(v) is str))
        self.locs = _dedup(sorted((v for v in flat if type(v) is Loc), key=vkey))
        self.syms = _dedup([NULL] + sorted((v for v in flat if type(v) is Sym), key=vkey))
        self.procs = _dedup(sorted((v for v in flat if type(v) is ProcId), key=vkey))
        self.types = list(TYPES.values())
        lists = [v for v in flat if type(v) is tuple]
        elems = [0, 1]
        gen = [()]
        for n in range(1, cfg.list_len + 1):
            gen += [tuple(p) for p in itertools.product(elems, repeat=n)]
        self.lists = _dedup(gen + lists)
        small = _dedup(_base_ints(4) + near)
        type_lits = [v for v in flat if type(v) is TypeConst]
        self.mixed = _dedup([False, True] + small + self.strs[:1]
                            + [v for v in self.strs[3:]] + self.syms + self.locs
                            + self.procs + type_lits + [()] + lists)
        k = max(nvars, 1)
        self.fresh_loc = _Fresh(Loc, "_m", taken, k)
        self.fresh_sym = _Fresh(Sym, "_s", taken, min(k, 3))
        self.fresh_proc = _Fresh(ProcId, "_p", taken, 1)

    def static(self, sort: TypeConst | None) -> list:
        if sort == INT_T:
            return self.ints
        if sort == BOOL_T:
            return [False, True]
        if sort == STR_T:
            return self.strs
        if sort == LOC_T:
            return self.locs
        if sort == SYM_T:
            return self.syms
        if sort == PROC_T:
            return self.procs
        if sort == TYPE_T:
            return self.types
        if sort == LIST_T:
            return self.lists
        return self.mixed

    def fresh(self, sort: TypeConst | None) -> list[_Fresh]:
        if sort == LOC_T:
            return [self.fresh_loc]
        if sort == SYM_T:
            return [self.fresh_sym]
        if sort == PROC_T:
            return [self.fresh_proc]
        if sort is None:
            return [self.fresh_loc, self.fresh_sym]
        return []


def _dedup(vs: Iterable) -> list:
    seen, out = set(), []
    for v in vs:
        k = vkey(v)
        if k not in seen:
            seen.add(k)
            out.append(v)
    return out


# -- search ------------------------------------------------------------------

def _occurs(name: str, e: Expr) -> int:
    return sum(1 for s in subterms(e) if type(s) is SVar and s.name == name)


def _isolate(name: str, e: Expr, target: Expr) -> Expr | None:
    """Solve ``e = target`` for the single occurrence of #name in e, if linear."""
    while True:
        t = type(e)
        if t is SVar:
            return target if e.name == name else None
        if t is UnOp and e.op in ("-", "not"):
            e, target = e.arg, UnOp(e.op, target)
            continue
        if t is not BinOp:
            return None
        in_left = _occurs(name, e.left) > 0
        a, b = (e.left, e.right) if in_left else (e.right, e.left)
        if e.op == "+":
            e, target = a, BinOp("-", target, b)
        elif e.op == "-":
            e, target = (a, BinOp("+", target, b)) if in_left else (a, BinOp("-", b, target))
        elif e.op == "*" and type(b) is Lit and type(b.value) is int and b.value != 0:
            e, target = a, BinOp("div", target, b)
        else:
            return None


_PROJECTIONS = {"hd", "tl", "len", "slen", "nth", "typeof"}


def _projects(e: Expr) -> bool:
    return any(type(t) in (UnOp, BinOp) and t.op in _PROJECTIONS for t in subterms(e))


def _definitions(cs: list[Expr]) -> tuple[dict, list[Expr]]:
    """Pick acyclic definitions read off top-level equalities. Returns (defs, checks).

    ``#v = e`` is used directly and dropped from the checks. A linear
    equation with a single occurrence of a variable is inverted; the inverted
    form is exact but the equation stays as a check (for divisibility).
    """
    cands = []
    for idx, c in enumerate(cs):
        if not (type(c) is BinOp and c.op == "="):
            continue
        for side, other in ((c.left, c.right), (c.right, c.left)):
            if type(side) is SVar:
                if _occurs(side.name, other) == 0:
                    cands.append((side.name, other, idx, True))
                continue
            for n in sorted(expr_svars(side)):
                if _occurs(n, side) == 1 and _occurs(n, other) == 0:
                    sol = _isolate(n, side, other)
                    if sol is not None:
                        cands.append((n, sol, idx, False))
    # ground definitions first, then those built by constructors rather than
    # projections (so lists are assembled from their items), then by fewest
    # dependencies
    cands.sort(key=lambda c: (bool(expr_svars(c[1])), _projects(c[1]),
                              len(expr_svars(c[1])), not c[3], c[2]))
    defs: dict[str, Expr] = {}
    deps: dict[str, set] = {}
    used: set = set()

    def closure(names: set) -> set:
        out, todo = set(), list(names)
        while todo:
            n = todo.pop()
            if n in out:
                continue
            out.add(n)
            todo.extend(deps.get(n, ()))
        return out

    for name, e, idx, direct in cands:
        if name in defs or (direct and idx in used):
            continue
        fv = expr_svars(e)
        if name in closure(fv):
            continue
        defs[name] = e
        deps[name] = fv
        if direct:
            used.add(idx)
    rest = [c for i, c in enumerate(cs) if i not in used]
    return defs, rest


class _Search:
    def __init__(self, pi: Expr, extra: tuple, cfg: SolverConfig, seed):
        self.orig = pi
        self.cfg = cfg
        self.nodes = 0
        simp = simplify(pi)
        self.simp = simp
        self.sorts = infer_sorts(pi)
        names = sorted(expr_svars(pi) | set(extra))
        self.names = names
        cs = conjuncts(simp)
        self.defs, rest = _definitions(cs)
        self.rest = rest
        changed = True
        while changed:
            changed = False
            for n, e in self.defs.items():
                if type(e) is SVar and n in self.sorts and e.name not in self.sorts:
                    self.sorts[e.name] = self.sorts[n]
                    changed = True
        counts = {n: 0 for n in names}
        for c in rest:
            for n in expr_svars(c):
                counts[n] += 1
        free = [n for n in names if n not in self.defs]
        free.sort(key=lambda n: (-counts.get(n, 0), n))
        self.free = free
        pos = {n: i for i, n in enumerate(free)}

        memo: dict[str, int] = {}

        def level(n: str, stack=()) -> int:
            if n in pos:
                return pos[n]
            if n in memo:
                return memo[n]
            lv = max((level(m) for m in expr_svars(self.defs[n])), default=-1)
            memo[n] = lv
            return lv

        ndef = {n: level(n) for n in self.defs}
        # definitions in dependency order, grouped by the level they become computable
        order: list[str] = []
        done: set = set()

        def visit(n: str) -> None:
            if n in done or n not in self.defs:
                return
            done.add(n)
            for m in sorted(expr_svars(self.defs[n])):
                visit(m)
            order.append(n)

        for n in sorted(self.defs):
            visit(n)
        self.defs_at: dict[int, list[str]] = {}
        for n in order:
            self.defs_at.setdefault(ndef[n], []).append(n)
        self.checks_at: dict[int, list[Expr]] = {}
        for c in rest:
            lv = max((level(m) for m in expr_svars(c)), default=-1)
            self.checks_at.setdefault(lv, []).append(c)
        self.dom = _Domains(pi, len(names), cfg)
        self.rng = random.Random(seed) if seed is not None else None

    def space(self) -> int:
        """Number of leaf assignments a full enumeration would visit (an upper bound)."""
        n = 1
        for name in self.free:
            sort = self.sorts.get(name)
            n *= len(self.dom.static(sort)) + sum(len(f.names) for f in self.dom.fresh(sort))
        return n

    def _tick(self, k: int = 1) -> None:
        self.nodes += k
        if self.nodes > self.cfg.budget:
            raise _Budget()

    def _settle(self, level: int, asg: dict) -> bool:
        for n in self.defs_at.get(level, ()):
            self._tick()
            try:
                asg[n] = evaluate(self.defs[n], asg)
            except EvalError:
                return False
        for c in self.checks_at.get(level, ()):
            self._tick()
            try:
                if evaluate(c, asg) is not True:
                    return False
            except EvalError:
                return False
        return True

    def _candidates(self, name: str, asg: dict) -> list:
        sort = self.sorts.get(name)
        vals = list(self.dom.static(sort))
        for f in self.dom.fresh(sort):
            vals += f.candidates(asg)
        if self.rng is not None:
            self.rng.shuffle(vals)
        return vals

    def models(self) -> Iterator[dict]:
        asg: dict = {}
        if not self._settle(-1, asg):
            return
        yield from self._go(0, asg)

    def _go(self, k: int, asg: dict) -> Iterator[dict]:
        if k == len(self.free):
            self._tick()
            try:
                ok = evaluate(self.orig, asg) is True
            except EvalError:
                ok = False
            if ok:
                yield {n: asg[n] for n in self.names}
            return
        name = self.free[k]
        for v in self._candidates(name, asg):
            trial = dict(asg)
            trial[name] = v
            if self._settle(k, trial):
                yield from self._go(k + 1, trial)


def _precheck(pi: Expr) -> str | None:
    for s in subterms(pi):
        if type(s) is Lit and _has_float(s.value):
            return "float literal outside the decidable fragment"
    return None


def _has_float(v) -> bool:
    if type(v) is float:
        return True
    return type(v) is tuple and any(_has_float(x) for x in v)


def _prepare(pi: Expr, extra: tuple, cfg: SolverConfig, seed) -> _Search | Verdict:
    why = _precheck(pi)
    if why:
        return Unknown(why)
    try:
        s = _Search(pi, extra, cfg, seed)
    except EvalError:
        # a ground ill-sorted sub-term makes the formula false everywhere
        return UNSAT
    except SortConflict:
        return UNSAT
    if NUM_T in s.sorts.values():
        return Unknown("variable of float sort")
    return s


_lock = threading.Lock()


_SPLIT_SPACE = 20_000   # assignments below which plain enumeration beats case splitting


def _alternatives(c: Expr) -> list[Expr] | None:
    """The disjuncts of a disjunctive conjunct (an or, or a negated and)."""
    if type(c) is BinOp and c.op == "or":
        out, stack = [], [c]
        while stack:
            e = stack.pop()
            if type(e) is BinOp and e.op == "or":
                stack += [e.right, e.left]
            else:
                out.append(e)
        return out
    if type(c) is UnOp and c.op == "not" and type(c.arg) is BinOp and c.arg.op == "and":
        return [mk_not(x) for x in conjuncts(c.arg)]
    return None


def _negates(a: Expr, b: Expr) -> bool:
    return (type(a) is UnOp and a.op == "not" and a.arg == b) or \
        (type(b) is UnOp and b.op == "not" and b.arg == a)


def _refuted(x: Expr, units: set) -> bool:
    """Some conjunct of ``x`` is the negation of a unit."""
    for c in _flatten([x]):
        if type(c) is UnOp and c.op == "not" and c.arg in units:
            return True
        if UnOp("not", c) in units:
            return True
    return False


def _flatten(cs: list[Expr]) -> list[Expr]:
    """Top-level conjuncts with negated disjunctions pushed inwards."""
    out, stack = [], list(reversed(cs))
    while stack:
        c = stack.pop()
        if type(c) is BinOp and c.op == "and":
            stack += [c.right, c.left]
        elif type(c) is UnOp and c.op == "not" and type(c.arg) is BinOp and c.arg.op == "or":
            stack += [mk_not(c.arg.right), mk_not(c.arg.left)]
        elif type(c) is UnOp and c.op == "not" and type(c.arg) is UnOp and c.arg.op == "not":
            stack.append(c.arg.arg)
        else:
            out.append(c)
    return out


def _propagate(cs: list[Expr]) -> list[Expr] | None:
    """Unit propagation over top-level disjunctions; None when a clause is refuted.

    A disjunction with a disjunct among the other conjuncts is dropped, disjuncts
    with a conjunct whose negation is a unit are removed, and a single survivor
    becomes a unit.
    """
    cs = _flatten(cs)
    while True:
        units = {c for c in cs if _alternatives(c) is None}
        out, changed = [], False
        for c in cs:
            alts = _alternatives(c)
            if alts is None:
                out.append(c)
                continue
            if any(x in units for x in alts):
                changed = True
                continue
            keep = [x for x in alts if not _refuted(x, units)]
            if not keep:
                return None
            if len(keep) == 1:
                out.extend(_flatten([keep[0]]))
                changed = True
            elif len(keep) < len(alts):
                out.append(disj(keep))
                changed = True
            else:
                out.append(c)
        cs = out
        if not changed:
            return cs


def _split(cs: list[Expr]) -> tuple[list[Expr], list[Expr]] | None:
    """(other conjuncts, alternatives) for the narrowest disjunctive conjunct."""
    best = None
    for i, c in enumerate(cs):
        alts = _alternatives(c)
        if alts is not None and (best is None or len(alts) < len(best[1])):
            best = (i, alts)
    if best is None:
        return None
    i, alts = best
    return cs[:i] + cs[i + 1:], alts


@lru_cache(maxsize=1 << 16)
def _sat_cached(pi: Expr, extra: tuple, cfg: SolverConfig, seed, width: int = 1,
                propagated: bool = False) -> Verdict:
    # The search only prunes on conjuncts, so a formula whose disjunctions would be
    # enumerated in full is first unit-propagated and then case-split.
    s = _prepare(pi, extra, cfg, seed)
    if not isinstance(s, _Search):
        return s
    sp = None
    if s.space() > _SPLIT_SPACE and not propagated:
        cs = _propagate(conjuncts(s.simp))
        if cs is None:
            return UNSAT
        sp = _split(cs)
        if sp is None or width * len(sp[1]) > cfg.split_cap:
            reduced = conj(*cs)
            if reduced != s.simp:
                names = expr_svars(pi) | set(extra)
                return _sat_cached(reduced, tuple(sorted(names - expr_svars(reduced))), cfg, seed, width, True)
            sp = None
    if sp is not None:
        rest, alts = sp
        names = expr_svars(pi) | set(extra)
        # the branches share the node budget, so a split costs at most one search
        sub_cfg = replace(cfg, budget=max(1, cfg.budget // len(alts)))
        unknown = None
        for a in alts:
            sub = conj(*rest, a)
            r = _sat_cached(sub, tuple(sorted(names - expr_svars(sub))), sub_cfg, seed, width * len(alts))
            if isinstance(r, Sat):
                return r
            if isinstance(r, Unknown) and unknown is None:
                unknown = r
        return unknown if unknown is not None else UNSAT
    try:
        for m in s.models():
            return Sat(m)
    except _Budget:
        return Unknown("search budget exhausted")
    return UNSAT


def sat(pi: Expr, *, extra: Iterable[str] = (), config: SolverConfig | None = None,
        seed=None) -> Verdict:
    """Satisfiability of ``pi``. ``extra`` adds variables that must appear in the model."""
    cfg = config or SolverConfig.default()
    extra = tuple(sorted(set(extra) - expr_svars(pi)))
    r = _sat_cached(pi, extra, cfg, seed)
    if isinstance(r, Sat):
        return Sat(dict(r.model))
    return r


def is_sat(pi: Expr, **kw) -> bool | _UnknownTruth:
    r = sat(pi, **kw)
    if isinstance(r, Unknown):
        return UNKNOWN
    return isinstance(r, Sat)


def entails(pi: Expr, goal: Expr, **kw) -> bool | _UnknownTruth:
    """pi ⊢ goal, i.e. pi ∧ ¬goal is unsatisfiable."""
    r = sat(conj(pi, mk_not(goal)), **kw)
    if isinstance(r, Unknown):
        return UNKNOWN
    return isinstance(r, Unsat)


def counterexample(pi: Expr, goal: Expr, **kw) -> dict | None:
    r = sat(conj(pi, mk_not(goal)), **kw)
    return r.model if isinstance(r, Sat) else None


def holds(pi: Expr, model: dict) -> bool:
    try:
        return evaluate(pi, model) is True
    except EvalError:
        return False


def iter_models(pi: Expr, *, extra: Iterable[str] = (), config: SolverConfig | None = None,
                seed=None) -> Iterator[dict]:
    """All models within the bounded domains, without symmetric duplicates of fresh constants.

    Raises Unknown-worthy conditions as ValueError.
    """
    cfg = config or SolverConfig.default()
    s = _prepare(pi, tuple(sorted(set(extra))), cfg, seed)
    if isinstance(s, Unsat):
        return
    if isinstance(s, Unknown):
        raise ValueError(s.reason)
    try:
        yield from s.models()
    except _Budget:
        raise ValueError("search budget exhausted") from None


def _model_key(m: dict) -> tuple:
    return tuple(sorted((k, vkey(v)) for k, v in m.items()))


def sample_models(pi: Expr, n: int, *, extra: Iterable[str] = (), seed: int = 0,
                  config: SolverConfig | None = None) -> list[dict]:
    """Up to n distinct models.

    Each round searches with a differently seeded domain order and blocks the
    models found so far; remaining slots are filled by plain enumeration.
    """
    cfg = config or SolverConfig.default()
    extra = tuple(sorted(set(extra) | expr_svars(pi)))
    found: dict = {}
    blocked = pi
    for r in range(n):
        v = sat(blocked, extra=extra, config=cfg, seed=f"{seed}:{r}")
        if not isinstance(v, Sat):
            break
        m = v.model
        found[_model_key(m)] = m
        blocked = conj(blocked, block(m))
    return list(found.values())[:n]


def block(model: dict) -> Expr:
    eqs = [mk_eq(SVar(k), Lit(v)) for k, v in sorted(model.items())]
    return mk_not(conj(*eqs)) if eqs else Lit(False)


def clear_cache() -> None:
    _sat_cached.cache_clear()


# -- SMT-LIB export ----------------------------------------------------------

class Unsupported(Exception):
    pass


_SMT_BIN = {"+": "+", "-": "-", "*": "*", "div": "div", "mod": "mod", "<": "<", "<=": "<=",
            ">": ">", ">=": ">=", "=": "=", "and": "and", "or": "or", "=>": "=>"}


def export_smtlib2(pi: Expr) -> str:
    """SMT-LIB v2 script for the boolean/integer fragment."""
    try:
        sorts = infer_sorts(pi)
    except SortConflict as e:
        raise Unsupported(str(e)) from None
    _sorts_from_equalities(pi, sorts)
    names = sorted(expr_svars(pi))
    decls = []
    for n in names:
        s = sorts.get(n)
        if s not in (INT_T, BOOL_T):
            raise Unsupported(f"#{n} has no Int/Bool sort")
        decls.append(f"(declare-const {n} {'Int' if s == INT_T else 'Bool'})")
    return "".join(decls) + f"(assert {_smt(pi)})(check-sat)"


def _term_sort(e: Expr, sorts: dict):
    t = type(e)
    if t is Lit:
        return BOOL_T if type(e.value) is bool else (INT_T if type(e.value) is int else None)
    if t is SVar:
        return sorts.get(e.name)
    if t is UnOp:
        return {"-": INT_T, "not": BOOL_T}.get(e.op)
    if t is BinOp:
        if e.op in ("+", "-", "*", "div", "mod"):
            return INT_T
        if e.op in _SMT_BIN:
            return BOOL_T
    return None


def _sorts_from_equalities(pi: Expr, sorts: dict) -> None:
    # equality does not force a sort, but for export both sides must agree
    eqs = [s for s in subterms(pi) if type(s) is BinOp and s.op == "="]
    changed = True
    while changed:
        changed = False
        for q in eqs:
            for a, b in ((q.left, q.right), (q.right, q.left)):
                if type(a) is SVar and a.name not in sorts:
                    sb = _term_sort(b, sorts)
                    if sb is not None:
                        sorts[a.name] = sb
                        changed = True


def _smt(e: Expr) -> str:
    t = type(e)
    if t is SVar:
        return e.name
    if t is Lit:
        v = e.value
        if type(v) is bool:
            return "true" if v else "false"
        if type(v) is int:
            return str(v) if v >= 0 else f"(- {-v})"
        raise Unsupported(f"literal {v!r}")
    if t is UnOp:
        if e.op == "not":
            return f"(not {_smt(e.arg)})"
        if e.op == "-":
            return f"(- {_smt(e.arg)})"
        raise Unsupported(f"operator {e.op}")
    if t is BinOp and e.op in _SMT_BIN:
        return f"({_SMT_BIN[e.op]} {_smt(e.left)} {_smt(e.right)})"
    raise Unsupported(f"term {type(e).__name__} {getattr(e, 'op', '')}".strip())
