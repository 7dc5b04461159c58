"""Canonical text form of expressions, commands, assertions and programs."""

from __future__ import annotations

from typing import Any

from .syntax import (Action, Assign, Atom, BinOp, Call, EList, Expr, Fail,
                     IfGoto, ISym, Lit, MemAsrt, Proc, ProcSpec, Prog, PVar,
                     Return, StateAsrt, SVar, UnOp, USym, Vanish, TRUE)
from .values import ProcId, show_value, value_to_json

HEADER = "// GIL program"
_FUNCS = ("len", "slen", "hd", "tl", "typeof")


def _wrap(e: Expr) -> str:
    s = show_expr(e)
    nested = type(e) is BinOp or (type(e) is UnOp and e.op == "not")
    return f"({s})" if nested else s


def show_expr(e: Expr) -> str:
    t = type(e)
    if t is Lit:
        return show_value(e.value)
    if t is PVar:
        return e.name
    if t is SVar:
        return "#" + e.name
    if t is UnOp:
        if e.op in _FUNCS:
            return f"{e.op}({show_expr(e.arg)})"
        if e.op == "not":
            return f"not ({show_expr(e.arg)})" if type(e.arg) in (BinOp, UnOp) else f"not {show_expr(e.arg)}"
        return f"-({show_expr(e.arg)})"
    if t is BinOp:
        if e.op == "nth":
            return f"nth({show_expr(e.left)}, {show_expr(e.right)})"
        return f"{_wrap(e.left)} {e.op} {_wrap(e.right)}"
    if t is EList:
        return "[" + ", ".join(show_expr(i) for i in e.items) + "]"
    raise TypeError(f"not an expression: {e!r}")


def show_cmd(c) -> str:
    if isinstance(c, Assign):
        return f"{c.var} := {show_expr(c.expr)}"
    if isinstance(c, IfGoto):
        return f"goto [{show_expr(c.guard)}] {c.target}"
    if isinstance(c, Call):
        if type(c.proc) is Lit and isinstance(c.proc.value, ProcId):
            callee = c.proc.value.name
        else:
            callee = f"({show_expr(c.proc)})"
        s = f"{c.var} := {callee}({show_expr(c.arg)})"
        if c.subst is not None:
            body = ", ".join(f"#{x} -> {show_expr(v)}" for x, v in c.subst)
            s += " with {" + (f" {body} " if body else "") + "}"
        return s
    if isinstance(c, Action):
        return f"{c.var} := [{c.action}]({show_expr(c.arg)})"
    if isinstance(c, USym):
        return f"{c.var} := uSym({show_expr(c.count)})"
    if isinstance(c, ISym):
        return f"{c.var} := iSym({show_expr(c.count)})"
    if isinstance(c, Return):
        return f"return {show_expr(c.expr)}"
    if isinstance(c, Fail):
        return f"fail {show_expr(c.expr)}"
    if isinstance(c, Vanish):
        return "vanish"
    raise TypeError(f"not a command: {c!r}")


def show_atom(a: Atom) -> str:
    ins = ", ".join(show_expr(e) for e in a.ins)
    outs = ", ".join(show_expr(e) for e in a.outs)
    return f"<{a.pred}>({ins}; {outs})" if a.outs else f"<{a.pred}>({ins};)"


def show_mem_asrt(p: MemAsrt) -> str:
    return " * ".join(show_atom(a) for a in p.atoms) if p.atoms else "emp"


def show_asrt(p: StateAsrt) -> str:
    s = show_mem_asrt(p.mem)
    if p.pure != TRUE:
        s += f" /\\ {show_expr(p.pure)}"
    return s


def show_proc(p: Proc) -> str:
    lines = [f"proc {p.name}({p.param}) {{"]
    n = len(p.body)
    for i, c in enumerate(p.body):
        sep = ";" if i < n - 1 else ""
        lines.append(f"  {i}: {show_cmd(c)}{sep}")
    lines.append("}")
    return "\n".join(lines)


def show_spec(s: ProcSpec) -> str:
    return (f"spec {s.proc}({s.param}) [[ #{s.param_svar} : {show_asrt(s.pre)} ]] "
            f"[[ {show_asrt(s.post)} ]] returns {show_expr(s.ret)}")


def print_program(p: Prog) -> str:
    parts = [HEADER]
    for name in p.procs:
        parts.append(show_proc(p.procs[name]))
    for name in p.specs:
        parts.append(show_spec(p.specs[name]))
    return "\n\n".join(parts) + "\n"


# -- structural JSON dump ------------------------------------------------------

def expr_to_json(e: Expr) -> Any:
    t = type(e)
    if t is Lit:
        return {"lit": value_to_json(e.value)}
    if t is PVar:
        return {"pvar": e.name}
    if t is SVar:
        return {"svar": e.name}
    if t is UnOp:
        return {"unop": e.op, "arg": expr_to_json(e.arg)}
    if t is BinOp:
        return {"binop": e.op, "left": expr_to_json(e.left), "right": expr_to_json(e.right)}
    return {"list": [expr_to_json(i) for i in e.items]}


def cmd_to_json(c) -> Any:
    kind = type(c).__name__.lower()
    out: dict = {"cmd": kind}
    for f in c.__dataclass_fields__:
        v = getattr(c, f)
        if isinstance(v, Expr):
            out[f] = expr_to_json(v)
        elif f == "subst" and v is not None:
            out[f] = [[x, expr_to_json(e)] for x, e in v]
        else:
            out[f] = v
    return out


def asrt_to_json(p: StateAsrt) -> Any:
    return {"atoms": [{"pred": a.pred, "ins": [expr_to_json(e) for e in a.ins],
                       "outs": [expr_to_json(e) for e in a.outs]} for a in p.mem.atoms],
            "pure": expr_to_json(p.pure)}


def program_to_json(p: Prog) -> Any:
    return {
        "procs": [{"name": pr.name, "param": pr.param,
                   "body": [cmd_to_json(c) for c in pr.body]} for pr in p.procs.values()],
        "specs": [{"proc": s.proc, "param": s.param, "param_svar": s.param_svar,
                   "pre": asrt_to_json(s.pre), "post": asrt_to_json(s.post),
                   "ret": expr_to_json(s.ret)} for s in p.specs.values()],
    }
