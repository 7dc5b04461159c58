"""Lexer and recursive-descent parser for the `.gil` text format."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ops import conj
from .syntax import (Action, Assign, Atom, BinOp, Call, Expr, Fail, IfGoto,
                     ISym, Lit, MemAsrt, Proc, ProcSpec, Prog, PVar, Return,
                     StateAsrt, SVar, UnOp, USym, Vanish, TRUE, mk_list)
from .values import NULL, TYPES, Loc, ProcId, Sym

KEYWORDS = {
    "proc", "spec", "returns", "with", "goto", "return", "fail", "vanish",
    "uSym", "iSym", "true", "false", "null", "emp", "not", "and", "or", "div",
    "mod", "len", "slen", "hd", "tl", "typeof", "nth",
} | set(TYPES)

_FUNC1 = ("len", "slen", "hd", "tl", "typeof")

_TOKEN = re.compile(r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<svar>\#[A-Za-z_][A-Za-z0-9_]*)
  | (?P<loc>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>'[A-Za-z_][A-Za-z0-9_]*)
  | (?P<pid>@[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|=>|<=|>=|!=|::|\+\+|/\\|\[\[|\]\]|->|[-+*<>=()\[\]{};:,@])
""", re.VERBOSE)


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int, expected: tuple = ()):
        self.line, self.col, self.expected = line, col, tuple(expected)
        exp = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"{line}:{col}: {msg}{exp}")


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    out: list[Tok] = []
    pos, line, lstart = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - lstart + 1)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            if kind == "ident" and s in KEYWORDS:
                kind = "kw"
            out.append(Tok(kind, s, line, pos - lstart + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            lstart = pos + s.rindex("\n") + 1
        pos = m.end()
    out.append(Tok("eof", "", line, pos - lstart + 1))
    return out


def _unescape(s: str) -> str:
    body, out, i = s[1:-1], [], 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            out.append({"n": "\n", "t": "\t"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text in texts

    def fail(self, msg: str, expected=()):
        t = self.tok
        raise ParseError(msg, t.line, t.col, expected)

    def eat(self, text: str) -> Tok:
        if not self.at(text):
            self.fail(f"unexpected {self.tok.text or 'end of input'!r}", (repr(text),))
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.fail(f"expected identifier, got {self.tok.text or 'end of input'!r}", ("identifier",))
        t = self.tok
        self.i += 1
        return t.text

    # -- program
    def program(self) -> Prog:
        prog = Prog()
        while self.tok.kind != "eof":
            if self.at("proc"):
                p = self.proc()
                if p.name in prog.procs:
                    self.fail(f"duplicate procedure {p.name}")
                prog.procs[p.name] = p
            elif self.at("spec"):
                s = self.spec()
                if s.proc in prog.specs:
                    self.fail(f"second specification for {s.proc}")
                prog.specs[s.proc] = s
            else:
                self.fail(f"unexpected {self.tok.text!r}", ("'proc'", "'spec'"))
        return prog

    def proc(self) -> Proc:
        self.eat("proc")
        name = self.ident()
        self.eat("(")
        param = self.ident()
        self.eat(")")
        self.eat("{")
        body = []
        while not self.at("}"):
            if self.tok.kind == "num" and self.peek().text == ":":
                label = self.tok
                if int(label.text) != len(body):
                    raise ParseError(f"label {label.text} does not match command index {len(body)}",
                                     label.line, label.col)
                self.i += 2
            body.append(self.cmd())
            if not self.at("}"):
                self.eat(";")
        self.eat("}")
        return Proc(name, param, tuple(body))

    def cmd(self):
        t = self.tok
        if self.at("goto"):
            self.i += 1
            if self.at("["):
                self.eat("[")
                g = self.expr()
                self.eat("]")
            else:
                g = TRUE
            return IfGoto(g, self.index())
        if self.at("return"):
            self.i += 1
            return Return(self.expr())
        if self.at("fail"):
            self.i += 1
            return Fail(self.expr())
        if self.at("vanish"):
            self.i += 1
            return Vanish()
        if t.kind != "ident":
            self.fail(f"unexpected {t.text or 'end of input'!r}",
                      ("identifier", "'goto'", "'return'", "'fail'", "'vanish'"))
        var = self.ident()
        self.eat(":=")
        return self.rhs(var)

    def index(self) -> int:
        if self.tok.kind != "num" or not self.tok.text.isdigit():
            self.fail("expected command index", ("integer",))
        v = int(self.tok.text)
        self.i += 1
        return v

    def rhs(self, var: str):
        # memory action: [name](e)
        if self.at("[") and self.peek().kind == "ident" and self.peek(2).text == "]" \
                and self.peek(3).text == "(":
            self.i += 1
            act = self.ident()
            self.eat("]")
            self.eat("(")
            arg = self.expr()
            self.eat(")")
            return Action(var, act, arg)
        if self.at("uSym", "iSym"):
            kind = self.tok.text
            self.i += 1
            self.eat("(")
            n = self.expr()
            self.eat(")")
            return USym(var, n) if kind == "uSym" else ISym(var, n)
        # static call f(e) or dynamic call (e)(e')
        callee = None
        if self.tok.kind == "ident" and self.peek().text == "(":
            callee = Lit(ProcId(self.ident()))
        elif self.at("(") and self._dynamic_call_ahead():
            self.eat("(")
            callee = self.expr()
            self.eat(")")
        if callee is not None:
            self.eat("(")
            arg = self.expr()
            self.eat(")")
            subst = None
            if self.at("with"):
                self.i += 1
                subst = self.subst()
            return Call(var, callee, arg, subst)
        return Assign(var, self.expr())

    def _dynamic_call_ahead(self) -> bool:
        depth, j = 0, self.i
        while j < len(self.toks):
            t = self.toks[j]
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                depth -= 1
                if depth == 0:
                    return self.toks[j + 1].text == "("
            elif t.kind == "eof":
                return False
            j += 1
        return False

    def subst(self) -> tuple:
        self.eat("{")
        pairs = []
        while not self.at("}"):
            if self.tok.kind != "svar":
                self.fail("expected symbolic variable", ("#name",))
            name = self.tok.text[1:]
            self.i += 1
            self.eat("->")
            pairs.append((name, self.expr()))
            if not self.at("}"):
                self.eat(",")
        self.eat("}")
        return tuple(pairs)

    # -- specifications and assertions
    def spec(self) -> ProcSpec:
        self.eat("spec")
        name = self.ident()
        self.eat("(")
        param = self.ident()
        self.eat(")")
        self.eat("[[")
        if self.tok.kind != "svar":
            self.fail("expected parameter symbolic variable", ("#name",))
        psv = self.tok.text[1:]
        self.i += 1
        self.eat(":")
        pre = self.state_asrt()
        self.eat("]]")
        self.eat("[[")
        post = self.state_asrt()
        self.eat("]]")
        self.eat("returns")
        ret = self.expr()
        return ProcSpec(name, param, psv, pre, post, ret)

    def state_asrt(self) -> StateAsrt:
        mem = self.mem_asrt()
        pures = []
        while self.at("/\\"):
            self.i += 1
            pures.append(self.expr())
        pure = pures[0] if len(pures) == 1 else (conj(*pures) if pures else TRUE)
        return StateAsrt(mem, pure)

    def mem_asrt(self) -> MemAsrt:
        if self.at("emp"):
            self.i += 1
            return MemAsrt()
        atoms = [self.atom()]
        while self.at("*"):
            self.i += 1
            if self.at("emp"):
                self.i += 1
                continue
            atoms.append(self.atom())
        return MemAsrt.of(atoms)

    def atom(self) -> Atom:
        self.eat("<")
        pred = self.ident()
        self.eat(">")
        self.eat("(")
        ins, outs = [], []
        cur = ins
        while not self.at(")"):
            if self.at(";"):
                if cur is outs:
                    self.fail("second ';' in predicate arguments")
                self.i += 1
                cur = outs
                continue
            cur.append(self.expr())
            if self.at(","):
                self.i += 1
            elif not self.at(";", ")"):
                self.fail(f"unexpected {self.tok.text!r}", ("','", "';'", "')'"))
        self.eat(")")
        return Atom(pred, tuple(ins), tuple(outs))

    # -- expressions
    def expr(self) -> Expr:
        left = self.or_()
        if self.at("=>"):
            self.i += 1
            return BinOp("=>", left, self.expr())
        return left

    def or_(self) -> Expr:
        e = self.and_()
        while self.at("or"):
            self.i += 1
            e = BinOp("or", e, self.and_())
        return e

    def and_(self) -> Expr:
        e = self.not_()
        while self.at("and"):
            self.i += 1
            e = BinOp("and", e, self.not_())
        return e

    def not_(self) -> Expr:
        if self.at("not"):
            self.i += 1
            return UnOp("not", self.not_())
        return self.cmp()

    def cmp(self) -> Expr:
        e = self.cons()
        if self.at("=", "!=", "<", "<=", ">", ">="):
            op = self.tok.text
            self.i += 1
            r = self.cons()
            if op == "!=":
                return UnOp("not", BinOp("=", e, r))
            return BinOp(op, e, r)
        return e

    def cons(self) -> Expr:
        e = self.add()
        if self.at("::"):
            self.i += 1
            return BinOp("::", e, self.cons())
        return e

    def add(self) -> Expr:
        e = self.mul()
        while self.at("+", "-", "++", "@"):
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.mul())
        return e

    def mul(self) -> Expr:
        e = self.unary()
        while self.at("*", "div", "mod"):
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.at("-"):
            self.i += 1
            if self.tok.kind == "num":
                return Lit(-self._number())
            return UnOp("-", self.unary())
        return self.atom_expr()

    def _number(self):
        s = self.tok.text
        self.i += 1
        return float(s) if any(c in s for c in ".eE") else int(s)

    def atom_expr(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            return Lit(self._number())
        if t.kind == "str":
            self.i += 1
            return Lit(_unescape(t.text))
        if t.kind == "svar":
            self.i += 1
            return SVar(t.text[1:])
        if t.kind == "loc":
            self.i += 1
            return Lit(Loc(t.text[1:]))
        if t.kind == "sym":
            if t.text == "'undefined":
                self.fail("'undefined is reserved")
            self.i += 1
            return Lit(Sym(t.text[1:]))
        if t.kind == "pid":
            self.i += 1
            return Lit(ProcId(t.text[1:]))
        if t.kind == "ident":
            self.i += 1
            return PVar(t.text)
        if t.kind == "kw":
            if t.text in ("true", "false"):
                self.i += 1
                return Lit(t.text == "true")
            if t.text == "null":
                self.i += 1
                return Lit(NULL)
            if t.text in TYPES:
                self.i += 1
                return Lit(TYPES[t.text])
            if t.text in _FUNC1:
                self.i += 1
                self.eat("(")
                a = self.expr()
                self.eat(")")
                return UnOp(t.text, a)
            if t.text == "nth":
                self.i += 1
                self.eat("(")
                a = self.expr()
                self.eat(",")
                b = self.expr()
                self.eat(")")
                return BinOp("nth", a, b)
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.eat(")")
            return e
        if self.at("["):
            self.i += 1
            items = []
            while not self.at("]"):
                items.append(self.expr())
                if not self.at("]"):
                    self.eat(",")
            self.eat("]")
            return mk_list(items)
        self.fail(f"unexpected {t.text or 'end of input'!r}", ("expression",))


def parse_program(text: str) -> Prog:
    return Parser(text).program()


def parse_expr(text: str) -> Expr:
    p = Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.fail(f"trailing input {p.tok.text!r}")
    return e


def parse_asrt(text: str) -> StateAsrt:
    p = Parser(text)
    a = p.state_asrt()
    if p.tok.kind != "eof":
        p.fail(f"trailing input {p.tok.text!r}")
    return a
