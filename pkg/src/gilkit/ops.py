"""Operator semantics, expression evaluation and simplification.

All operators are strict: an ill-sorted application raises :class:`EvalError`
and the error propagates through every enclosing operator. Equality and
``typeof`` are total. A formula therefore only "holds" under an assignment if
it evaluates to ``True`` without error.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .syntax import (BinOp, EList, Expr, FALSE, Lit, PVar, SVar, TRUE, UnOp,
                     mk_list)
from .values import Value, type_of, veq, vkey


class EvalError(Exception):
    """Ill-sorted or partial operation (e.g. hd of an empty list)."""


def _int(v: Value) -> int:
    if type(v) is not int:
        raise EvalError(f"expected integer, got {v!r}")
    return v


def _num(v: Value):
    if type(v) not in (int, float):
        raise EvalError(f"expected number, got {v!r}")
    return v


def _bool(v: Value) -> bool:
    if type(v) is not bool:
        raise EvalError(f"expected boolean, got {v!r}")
    return v


def _str(v: Value) -> str:
    if type(v) is not str:
        raise EvalError(f"expected string, got {v!r}")
    return v


def _list(v: Value) -> tuple:
    if type(v) is not tuple:
        raise EvalError(f"expected list, got {v!r}")
    return v


def _arith(a: Value, b: Value) -> None:
    _num(a)
    _num(b)
    if type(a) is not type(b):
        raise EvalError("mixed integer/float arithmetic")


def euclid_divmod(a: int, b: int) -> tuple[int, int]:
    # SMT-LIB integer division: remainder always non-negative
    if b == 0:
        raise EvalError("division by zero")
    r = a % abs(b)
    return (a - r) // b, r


def apply_unop(op: str, v: Value) -> Value:
    if op == "-":
        _num(v)
        return -v
    if op == "not":
        return not _bool(v)
    if op == "len":
        return len(_list(v))
    if op == "slen":
        return len(_str(v))
    if op == "hd":
        lst = _list(v)
        if not lst:
            raise EvalError("hd of empty list")
        return lst[0]
    if op == "tl":
        lst = _list(v)
        if not lst:
            raise EvalError("tl of empty list")
        return lst[1:]
    if op == "typeof":
        return type_of(v)
    raise EvalError(f"unknown unary operator {op!r}")


def apply_binop(op: str, a: Value, b: Value) -> Value:
    if op == "=":
        return veq(a, b)
    if op in ("and", "or", "=>"):
        x, y = _bool(a), _bool(b)
        if op == "and":
            return x and y
        if op == "or":
            return x or y
        return (not x) or y
    if op in ("+", "-", "*"):
        _arith(a, b)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        return a * b
    if op in ("div", "mod"):
        q, r = euclid_divmod(_int(a), _int(b))
        return q if op == "div" else r
    if op in ("<", "<=", ">", ">="):
        _arith(a, b)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        return a >= b
    if op == "++":
        return _str(a) + _str(b)
    if op == "::":
        return (a,) + _list(b)
    if op == "@":
        return _list(a) + _list(b)
    if op == "nth":
        lst, i = _list(a), _int(b)
        if not 0 <= i < len(lst):
            raise EvalError("nth out of range")
        return lst[i]
    raise EvalError(f"unknown binary operator {op!r}")


def evaluate(e: Expr, env: Mapping[str, Value], *, program: bool = False) -> Value:
    """Concrete evaluation.

    With ``program=True`` the environment binds program variables (a store);
    otherwise it binds symbolic variables (an interpretation).
    """
    t = type(e)
    if t is Lit:
        return e.value
    if t is PVar:
        if not program:
            raise EvalError(f"program variable {e.name} in symbolic expression")
        try:
            return env[e.name]
        except KeyError:
            raise EvalError(f"unbound variable {e.name}") from None
    if t is SVar:
        if program:
            raise EvalError(f"symbolic variable #{e.name} in program expression")
        try:
            return env[e.name]
        except KeyError:
            raise EvalError(f"uninterpreted symbolic variable #{e.name}") from None
    if t is UnOp:
        return apply_unop(e.op, evaluate(e.arg, env, program=program))
    if t is BinOp:
        return apply_binop(e.op, evaluate(e.left, env, program=program),
                           evaluate(e.right, env, program=program))
    if t is EList:
        return tuple(evaluate(i, env, program=program) for i in e.items)
    raise EvalError(f"not an expression: {e!r}")


def substitute(e: Expr, f: Callable[[Expr], Expr | None]) -> Expr:
    """Bottom-up replacement of leaves; ``f`` returns None to keep a leaf."""
    t = type(e)
    if t is SVar or t is PVar:
        r = f(e)
        return e if r is None else r
    if t is UnOp:
        a = substitute(e.arg, f)
        return e if a is e.arg else UnOp(e.op, a)
    if t is BinOp:
        left, right = substitute(e.left, f), substitute(e.right, f)
        return e if (left is e.left and right is e.right) else BinOp(e.op, left, right)
    if t is EList:
        items = tuple(substitute(i, f) for i in e.items)
        return mk_list(items)
    return e


def subst_svars(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    return substitute(e, lambda v: mapping.get(v.name) if type(v) is SVar else None)


# -- simplification ----------------------------------------------------------

def _items(e: Expr) -> tuple | None:
    # syntactic list items, or None when the list structure is not known
    if type(e) is EList:
        return e.items
    if type(e) is Lit and type(e.value) is tuple:
        return tuple(Lit(v) for v in e.value)
    return None


def _is_bool_lit(e: Expr, b: bool) -> bool:
    return type(e) is Lit and e.value is b


def mk_not(a: Expr) -> Expr:
    if type(a) is Lit and type(a.value) is bool:
        return FALSE if a.value else TRUE
    if type(a) is UnOp and a.op == "not":
        return a.arg
    return UnOp("not", a)


def mk_and(a: Expr, b: Expr) -> Expr:
    if _is_bool_lit(a, True):
        return b
    if _is_bool_lit(b, True):
        return a
    if _is_bool_lit(a, False) or _is_bool_lit(b, False):
        return FALSE
    if a == b:
        return a
    if mk_not(a) == b or mk_not(b) == a:
        return FALSE
    return BinOp("and", a, b)


def mk_or(a: Expr, b: Expr) -> Expr:
    if _is_bool_lit(a, False):
        return b
    if _is_bool_lit(b, False):
        return a
    if _is_bool_lit(a, True) or _is_bool_lit(b, True):
        return TRUE
    if a == b:
        return a
    if mk_not(a) == b or mk_not(b) == a:
        return TRUE
    return BinOp("or", a, b)


def mk_eq(a: Expr, b: Expr) -> Expr:
    if type(a) is Lit and type(b) is Lit:
        return Lit(veq(a.value, b.value))
    if a == b:
        return TRUE
    ia, ib = _items(a), _items(b)
    if ia is not None and ib is not None:
        if len(ia) != len(ib):
            return FALSE
        out: Expr = TRUE
        for x, y in zip(ia, ib):
            out = mk_and(out, mk_eq(x, y))
        return out
    # keep a canonical orientation so that a = b and b = a coincide
    if _order_key(b) < _order_key(a):
        a, b = b, a
    return BinOp("=", a, b)


def _order_key(e: Expr) -> tuple:
    from .printer import show_expr
    # literals to the right, variables to the left
    rank = 2 if type(e) is Lit else (0 if type(e) is SVar else 1)
    return (rank, show_expr(e))


def _fold_bin(op: str, a: Expr, b: Expr) -> Expr:
    if type(a) is Lit and type(b) is Lit:
        return Lit(apply_binop(op, a.value, b.value))
    if op == "and":
        return mk_and(a, b)
    if op == "or":
        return mk_or(a, b)
    if op == "=":
        return mk_eq(a, b)
    if op == "=>":
        if _is_bool_lit(a, True):
            return b
        if _is_bool_lit(a, False) or _is_bool_lit(b, True):
            return TRUE
        if a == b:
            return TRUE
        return BinOp(op, a, b)
    if op == "::":
        ib = _items(b)
        if ib is not None:
            return mk_list((a,) + ib)
    if op == "@":
        ia, ib = _items(a), _items(b)
        if ia is not None and ib is not None:
            return mk_list(ia + ib)
    if op == "nth":
        ia = _items(a)
        if ia is not None and type(b) is Lit and type(b.value) is int and 0 <= b.value < len(ia):
            return ia[b.value]
    return BinOp(op, a, b)


def _fold_un(op: str, a: Expr) -> Expr:
    if type(a) is Lit:
        return Lit(apply_unop(op, a.value))
    if op == "not":
        return mk_not(a)
    ia = _items(a)
    if ia is not None:
        if op == "len":
            return Lit(len(ia))
        if op == "hd" and ia:
            return ia[0]
        if op == "tl" and ia:
            return mk_list(ia[1:])
        if op == "typeof":
            return Lit(type_of(()))
    return UnOp(op, a)


def simplify(e: Expr) -> Expr:
    """Constant folding plus boolean and list identities; idempotent.

    Raises EvalError when a ground sub-term is ill-sorted.
    """
    t = type(e)
    if t is UnOp:
        return _fold_un(e.op, simplify(e.arg))
    if t is BinOp:
        return _fold_bin(e.op, simplify(e.left), simplify(e.right))
    if t is EList:
        return mk_list(simplify(i) for i in e.items)
    return e


# -- path conditions ---------------------------------------------------------

def conjuncts(pc: Expr) -> list[Expr]:
    out: list[Expr] = []
    stack = [pc]
    while stack:
        e = stack.pop()
        if type(e) is BinOp and e.op == "and":
            stack.append(e.right)
            stack.append(e.left)
        elif not _is_bool_lit(e, True):
            out.append(e)
    return out


def conj(*parts: Expr) -> Expr:
    """Flattened, de-duplicated conjunction (left-nested)."""
    seen: set = set()
    lits: list[Expr] = []
    for p in parts:
        for c in conjuncts(p):
            if _is_bool_lit(c, False):
                return FALSE
            if c not in seen:
                seen.add(c)
                lits.append(c)
    if not lits:
        return TRUE
    out = lits[0]
    for c in lits[1:]:
        out = BinOp("and", out, c)
    return out


def disj(parts) -> Expr:
    out: Expr = FALSE
    for p in parts:
        out = mk_or(out, p)
    return out


def sort_values(vs):
    return sorted(vs, key=vkey)
