"""Shared constructors for tests."""

from gilkit.allocator import AllocRecord, Range
from gilkit.heap import SYMBOLIC
from gilkit.interpreter import Config, Frame
from gilkit.parser import parse_program
from gilkit.state import State, Store
from gilkit.syntax import SVar, TRUE


def prog(text: str):
    return parse_program(text)


def sym_start(p, entry: str = "main") -> Config:
    """Symbolic start of ``entry`` with its parameter bound to a like-named symbolic variable."""
    param = p.procs[entry].param
    st = State(SYMBOLIC.empty(), Store({param: SVar(param)}), AllocRecord.of({Range.SVARS: [SVar(param)]}), TRUE)
    return Config(st, (Frame(entry),), 0)
