"""GIL values.

Concrete values use native Python objects where that is unambiguous:

* ``int`` for arbitrary-precision integers, ``float`` for 64-bit floats
* ``str`` for strings, ``bool`` for booleans
* ``tuple`` for lists (nesting allowed)

Uninterpreted symbols, locations, type constants and procedure identifiers
get small wrapper classes. Because ``True == 1`` in Python, value equality
must go through :func:`vkey` / :func:`veq`, never plain ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True, slots=True)
class Sym:
    """Uninterpreted symbol."""

    name: str

    def __repr__(self) -> str:
        return f"'{self.name}"


@dataclass(frozen=True, slots=True)
class Loc(Sym):
    """Location: the distinguished subsort of uninterpreted symbols."""

    def __repr__(self) -> str:
        return f"${self.name}"


@dataclass(frozen=True, slots=True)
class TypeConst:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class ProcId:
    name: str

    def __repr__(self) -> str:
        return f"@{self.name}"


TYPE_NAMES = ("Int", "Num", "Str", "Bool", "Sym", "Loc", "Type", "Proc", "List")
TYPES = {n: TypeConst(n) for n in TYPE_NAMES}
INT_T, NUM_T, STR_T, BOOL_T = TYPES["Int"], TYPES["Num"], TYPES["Str"], TYPES["Bool"]
SYM_T, LOC_T, TYPE_T, PROC_T, LIST_T = (
    TYPES["Sym"], TYPES["Loc"], TYPES["Type"], TYPES["Proc"], TYPES["List"])

NULL = Sym("null")
# reserved second component of a failed pair composition; not writable in programs
UNDEFINED = Sym("undefined")

Value = Any


def is_loc(v: Value) -> bool:
    return isinstance(v, Loc)


def type_of(v: Value) -> TypeConst:
    if isinstance(v, bool):
        return BOOL_T
    if isinstance(v, int):
        return INT_T
    if isinstance(v, float):
        return NUM_T
    if isinstance(v, str):
        return STR_T
    if isinstance(v, Loc):
        return LOC_T
    if isinstance(v, Sym):
        return SYM_T
    if isinstance(v, TypeConst):
        return TYPE_T
    if isinstance(v, ProcId):
        return PROC_T
    if isinstance(v, tuple):
        return LIST_T
    raise TypeError(f"not a GIL value: {v!r}")


_TAGS = {bool: 0, int: 1, float: 2, str: 3, Loc: 4, Sym: 5, TypeConst: 6, ProcId: 7}


def vkey(v: Value) -> tuple:
    """Sort-aware key: equal keys iff equal GIL values. Also totally ordered."""
    t = type(v)
    if t is tuple:
        return (8, tuple(vkey(x) for x in v))
    tag = _TAGS.get(t)
    if tag is None:
        # symbolic expression nodes carry their own strict equality
        return (9, v)
    if tag >= 4:
        return (tag, v.name)
    return (tag, v)


def veq(a: Value, b: Value) -> bool:
    return vkey(a) == vkey(b)


def is_value(v: Any) -> bool:
    if type(v) is tuple:
        return all(is_value(x) for x in v)
    return type(v) in _TAGS


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def show_value(v: Value) -> str:
    """Surface syntax for a value (parseable back by the program parser)."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return _escape(v)
    if isinstance(v, tuple):
        return "[" + ", ".join(show_value(x) for x in v) + "]"
    if v == NULL:
        return "null"
    return repr(v)


def value_to_json(v: Value) -> Any:
    """Tagged JSON form, stable across runs."""
    if isinstance(v, bool):
        return {"bool": v}
    if isinstance(v, int):
        return {"int": str(v)}
    if isinstance(v, float):
        return {"num": repr(v)}
    if isinstance(v, str):
        return {"str": v}
    if isinstance(v, Loc):
        return {"loc": v.name}
    if isinstance(v, Sym):
        return {"sym": v.name}
    if isinstance(v, TypeConst):
        return {"type": v.name}
    if isinstance(v, ProcId):
        return {"proc": v.name}
    if isinstance(v, tuple):
        return {"list": [value_to_json(x) for x in v]}
    raise TypeError(f"not a GIL value: {v!r}")


def value_from_json(j: Any) -> Value:
    (tag, body), = j.items()
    if tag == "bool":
        return bool(body)
    if tag == "int":
        return int(body)
    if tag == "num":
        return float(body)
    if tag == "str":
        return body
    if tag == "loc":
        return Loc(body)
    if tag == "sym":
        return Sym(body)
    if tag == "type":
        return TYPES[body]
    if tag == "proc":
        return ProcId(body)
    if tag == "list":
        return tuple(value_from_json(x) for x in body)
    raise ValueError(f"unknown value tag {tag!r}")
