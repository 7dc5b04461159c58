"""Allocation records and fresh-name allocation.

A record maps each range (locations, symbolic variables, values) to the
sorted tuple of things already handed out from it. Records are immutable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

from . import mutants
from .syntax import SVar
from .values import Loc, Value, vkey


class Range(str, Enum):
    LOCS = "Locations"
    SVARS = "SymVars"
    VALUES = "Values"


def item_key(v) -> tuple:
    return (10, v.name) if type(v) is SVar else vkey(v)


@dataclass(frozen=True)
class AllocRecord:
    # range -> tuple of allocated items, kept sorted for canonical equality
    ranges: tuple = ()

    @staticmethod
    def of(mapping: dict) -> "AllocRecord":
        items = []
        for r, vs in mapping.items():
            uniq = {item_key(v): v for v in vs}
            items.append((Range(r), tuple(uniq[k] for k in sorted(uniq))))
        return AllocRecord(tuple(sorted(items, key=lambda kv: kv[0].value)))

    def get(self, r: Range) -> tuple:
        for k, vs in self.ranges:
            if k == r:
                return vs
        return ()

    def domain(self) -> set:
        return {k for k, _ in self.ranges}

    def as_dict(self) -> dict:
        return {k: list(vs) for k, vs in self.ranges}

    def with_added(self, r: Range, new: Iterable) -> "AllocRecord":
        d = {k: list(vs) for k, vs in self.ranges}
        d.setdefault(r, []).extend(new)
        return AllocRecord.of(d)

    def restrict(self, keep: Iterable[Range]) -> "AllocRecord":
        keep = set(keep)
        return AllocRecord(tuple((k, vs) for k, vs in self.ranges if k in keep))

    def __repr__(self) -> str:
        parts = [f"{k.value}: {{{', '.join(_show(v) for v in vs)}}}" for k, vs in self.ranges]
        return "ξ(" + "; ".join(parts) + ")"


def _show(v) -> str:
    return f"#{v.name}" if type(v) is SVar else repr(v)


EMPTY = AllocRecord()


def compose(a: AllocRecord, b: AllocRecord) -> AllocRecord:
    d: dict = {}
    for rec in (a, b):
        for k, vs in rec.ranges:
            d.setdefault(k, []).extend(vs)
    return AllocRecord.of(d)


# -- value supply for concrete iSym ------------------------------------------

def _universe(rec: AllocRecord) -> list:
    base: list = [0, 1, -1, 2, 3, True, False, "", "a"]
    return base + list(rec.get(Range.LOCS))


@dataclass
class ValueSupply:
    """Source of values for allocations from the Values range.

    Draws are a pure function of (seed, draw index) unless a replay list is
    given, in which case its entries are used in order first.
    """

    seed: int = 0
    replay: list = field(default_factory=list)
    count: int = 0

    def draw(self, rec: AllocRecord) -> Value:
        i = self.count
        self.count += 1
        if i < len(self.replay):
            return self.replay[i]
        rng = random.Random(f"{self.seed}:{i}")
        return rng.choice(_universe(rec))

    def copy(self) -> "ValueSupply":
        return ValueSupply(self.seed, self.replay, self.count)


def _next_names(taken: set, k: int, make: Callable[[int], object]) -> list:
    out, i = [], 0
    reuse = mutants.active("non-fresh-alloc")
    while len(out) < k:
        v = make(i)
        if reuse or item_key(v) not in taken:
            out.append(v)
            taken.add(item_key(v))
        i += 1
    return out


def alloc(rec: AllocRecord, k: int, r: Range, supply: ValueSupply | None = None):
    """Allocate k items from range r. Returns (record', items)."""
    if k < 0:
        raise ValueError("negative allocation count")
    if k == 0:
        return rec, []
    r = Range(r)
    taken = {item_key(v) for v in rec.get(r)}
    if r is Range.LOCS:
        items = _next_names(taken, k, lambda i: Loc(f"l{i}"))
    elif r is Range.SVARS:
        items = _next_names(taken, k, lambda i: SVar(f"_{i}"))
    else:
        supply = supply if supply is not None else ValueSupply()
        items = [supply.draw(rec) for _ in range(k)]
    return rec.with_added(r, items), items
