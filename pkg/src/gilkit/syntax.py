"""Abstract syntax: expressions, commands, procedures, programs, assertions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .values import Value, is_value, vkey


class Expr:
    """Base of expression nodes. Program expressions use PVar, symbolic ones SVar."""

    __slots__ = ()


@dataclass(frozen=True, slots=True, eq=False)
class Lit(Expr):
    value: Value

    # strict equality: Lit(True) and Lit(1) are different literals
    def __eq__(self, other: object) -> bool:
        return type(other) is Lit and vkey(self.value) == vkey(other.value)

    def __hash__(self) -> int:
        return hash(("lit", vkey(self.value)))


@dataclass(frozen=True, slots=True)
class PVar(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class SVar(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class UnOp(Expr):
    op: str
    arg: Expr


@dataclass(frozen=True, slots=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class EList(Expr):
    """List constructor with at least one non-literal item."""

    items: tuple


UNOPS = ("-", "not", "len", "slen", "hd", "tl", "typeof")
BINOPS = ("+", "-", "*", "div", "mod", "<", "<=", ">", ">=", "=",
          "and", "or", "=>", "++", "::", "@", "nth")

TRUE = Lit(True)
FALSE = Lit(False)


def mk_list(items: Iterable[Expr]) -> Expr:
    items = tuple(items)
    if all(type(i) is Lit for i in items):
        return Lit(tuple(i.value for i in items))
    return EList(items)


def lit(v: Value) -> Lit:
    if not is_value(v):
        raise TypeError(f"not a GIL value: {v!r}")
    return Lit(v)


def subterms(e: Expr) -> Iterator[Expr]:
    yield e
    if type(e) is UnOp:
        yield from subterms(e.arg)
    elif type(e) is BinOp:
        yield from subterms(e.left)
        yield from subterms(e.right)
    elif type(e) is EList:
        for i in e.items:
            yield from subterms(i)


def expr_svars(e: Expr, acc: set | None = None) -> set:
    acc = set() if acc is None else acc
    t = type(e)
    if t is SVar:
        acc.add(e.name)
    elif t is UnOp:
        expr_svars(e.arg, acc)
    elif t is BinOp:
        expr_svars(e.left, acc)
        expr_svars(e.right, acc)
    elif t is EList:
        for i in e.items:
            expr_svars(i, acc)
    return acc


def expr_pvars(e: Expr) -> set:
    return {s.name for s in subterms(e) if type(s) is PVar}


# -- commands ---------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True, slots=True)
class IfGoto:
    guard: Expr
    target: int


@dataclass(frozen=True, slots=True)
class Call:
    var: str
    proc: Expr
    arg: Expr
    # `with` annotation: ordered (symbolic variable, program expression) pairs
    subst: tuple | None = None


@dataclass(frozen=True, slots=True)
class Action:
    var: str
    action: str
    arg: Expr


@dataclass(frozen=True, slots=True)
class USym:
    var: str
    count: Expr


@dataclass(frozen=True, slots=True)
class ISym:
    var: str
    count: Expr


@dataclass(frozen=True, slots=True)
class Return:
    expr: Expr


@dataclass(frozen=True, slots=True)
class Fail:
    expr: Expr


@dataclass(frozen=True, slots=True)
class Vanish:
    pass


Cmd = Union[Assign, IfGoto, Call, Action, USym, ISym, Return, Fail, Vanish]


def cmd_exprs(c: Cmd) -> list[Expr]:
    if isinstance(c, Assign):
        return [c.expr]
    if isinstance(c, IfGoto):
        return [c.guard]
    if isinstance(c, Call):
        return [c.proc, c.arg] + [e for _, e in (c.subst or ())]
    if isinstance(c, Action):
        return [c.arg]
    if isinstance(c, (USym, ISym)):
        return [c.count]
    if isinstance(c, (Return, Fail)):
        return [c.expr]
    return []


# -- assertions -------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Atom:
    """Core-predicate instance <pred>(ins; outs)."""

    pred: str
    ins: tuple
    outs: tuple


@dataclass(frozen=True, slots=True)
class MemAsrt:
    """Separating conjunction of atoms, kept as a sorted multiset (empty tuple = emp)."""

    atoms: tuple = ()

    @staticmethod
    def of(atoms: Iterable[Atom]) -> "MemAsrt":
        from .printer import show_atom
        return MemAsrt(tuple(sorted(atoms, key=show_atom)))

    def star(self, other: "MemAsrt") -> "MemAsrt":
        return MemAsrt.of(self.atoms + other.atoms)

    @property
    def is_emp(self) -> bool:
        return not self.atoms


EMP = MemAsrt()


@dataclass(frozen=True, slots=True)
class StateAsrt:
    mem: MemAsrt = EMP
    pure: Expr = TRUE


def svars(a) -> set:
    """Symbolic variables occurring in an expression, atom or assertion."""
    if isinstance(a, Expr):
        return expr_svars(a)
    if isinstance(a, Atom):
        acc: set = set()
        for e in a.ins + a.outs:
            expr_svars(e, acc)
        return acc
    if isinstance(a, MemAsrt):
        acc = set()
        for at in a.atoms:
            acc |= svars(at)
        return acc
    if isinstance(a, StateAsrt):
        return svars(a.mem) | expr_svars(a.pure)
    raise TypeError(f"svars: unsupported {type(a).__name__}")


# -- procedures and programs ------------------------------------------------

@dataclass(frozen=True, slots=True)
class ProcSpec:
    """{param_svar, pre} proc(param) {post}^ret"""

    proc: str
    param: str
    param_svar: str
    pre: StateAsrt
    post: StateAsrt
    ret: Expr


@dataclass(frozen=True, slots=True)
class Proc:
    name: str
    param: str
    body: tuple


@dataclass
class Prog:
    procs: dict = field(default_factory=dict)
    specs: dict = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Prog) and self.procs == other.procs
                and self.specs == other.specs)


class EngineFault(Exception):
    """Malformed program or broken engine invariant; never a program outcome."""


def cmd_at(prog: Prog, stack, i: int) -> Cmd:
    """The i-th command of the procedure named in the top stack frame."""
    name = stack[0].proc
    proc = prog.procs.get(name)
    if proc is None:
        raise EngineFault(f"no procedure {name!r}")
    if not 0 <= i < len(proc.body):
        raise EngineFault(f"index {i} out of range for {name!r} ({len(proc.body)} commands)")
    return proc.body[i]


@dataclass(frozen=True)
class Diagnostic:
    proc: str
    index: int | None
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        where = self.proc if self.index is None else f"{self.proc}:{self.index}"
        return f"{self.severity}: {where}: {self.message}"


def _falls_off_end(body: tuple) -> bool:
    # any reachable control path running past the last command
    n = len(body)
    todo, seen = [0], set()
    while todo:
        i = todo.pop()
        if i in seen:
            continue
        if i >= n:
            return True
        seen.add(i)
        c = body[i]
        if isinstance(c, (Return, Fail, Vanish)):
            continue
        if isinstance(c, IfGoto):
            todo.append(c.target)
            if type(c.guard) is Lit and c.guard.value is True:
                continue
        todo.append(i + 1)
    return False


def check_program(prog: Prog) -> list[Diagnostic]:
    """Structural checks: goto targets, variable sorts and termination paths."""
    out: list[Diagnostic] = []
    for name, proc in prog.procs.items():
        n = len(proc.body)
        for i, c in enumerate(proc.body):
            if isinstance(c, IfGoto) and not 0 <= c.target < n:
                out.append(Diagnostic(name, i, f"goto target {c.target} outside body of length {n}"))
            for e in cmd_exprs(c):
                if expr_svars(e):
                    out.append(Diagnostic(name, i, "symbolic variable in program expression"))
            if isinstance(c, Call) and c.subst is not None:
                for _, e in c.subst:
                    if expr_svars(e):
                        out.append(Diagnostic(name, i, "symbolic variable in substitution"))
        if _falls_off_end(proc.body):
            out.append(Diagnostic(name, None, "some path does not end in return or fail",
                                  severity="warning"))
    for fname, spec in prog.specs.items():
        if fname not in prog.procs:
            out.append(Diagnostic(fname, None, "specification for unknown procedure"))
        elif prog.procs[fname].param != spec.param:
            out.append(Diagnostic(fname, None, "specification parameter differs from procedure"))
        for part in (spec.pre.pure, spec.post.pure, spec.ret):
            if expr_pvars(part):
                out.append(Diagnostic(fname, None, "program variable in specification"))
        for at in spec.pre.mem.atoms + spec.post.mem.atoms:
            if any(expr_pvars(e) for e in at.ins + at.outs):
                out.append(Diagnostic(fname, None, "program variable in specification"))
    return out


def errors(diags: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]
