from hypothesis import given, strategies as st

from gilkit.allocator import AllocRecord, Range, ValueSupply, alloc, compose, item_key
from gilkit.syntax import SVar
from gilkit.values import Loc

_locs = st.lists(st.integers(0, 6).map(lambda i: Loc(f"l{i}")), max_size=4)
_svs = st.lists(st.integers(0, 6).map(lambda i: SVar(f"_{i}")), max_size=4)
_vals = st.lists(st.sampled_from([0, 1, True, "a"]), max_size=3)
_records = st.builds(lambda l, s, v: AllocRecord.of({k: x for k, x in
                                                      ((Range.LOCS, l), (Range.SVARS, s), (Range.VALUES, v)) if x}),
                     _locs, _svs, _vals)


def _sets(rec):
    return {r: {item_key(x) for x in rec.get(r)} for r in Range}


def test_alloc_locations_from_empty():
    rec, items = alloc(AllocRecord(), 2, Range.LOCS)
    assert items == [Loc("l0"), Loc("l1")]
    assert rec.get(Range.LOCS) == (Loc("l0"), Loc("l1"))


def test_alloc_svar_avoids_recorded():
    rec = AllocRecord.of({Range.SVARS: [SVar("_0")]})
    _, (x,) = alloc(rec, 1, Range.SVARS)
    assert x != SVar("_0")


def test_alloc_zero_values():
    rec, items = alloc(AllocRecord(), 0, Range.VALUES)
    assert rec == AllocRecord() and items == []


@given(_records, st.integers(0, 4), st.sampled_from([Range.LOCS, Range.SVARS]))
def test_fresh_names_are_new_and_distinct(rec, k, r):
    before = _sets(rec)[r]
    rec2, items = alloc(rec, k, r)
    keys = [item_key(x) for x in items]
    assert len(set(keys)) == k
    assert not set(keys) & before
    assert _sets(rec2)[r] == before | set(keys)


@given(_records, st.integers(0, 3))
def test_values_allocation_is_seeded(rec, k):
    a = alloc(rec, k, Range.VALUES, ValueSupply(seed=5))
    b = alloc(rec, k, Range.VALUES, ValueSupply(seed=5))
    assert a == b


def test_value_supply_replays_first():
    s = ValueSupply(seed=0, replay=[42])
    assert s.draw(AllocRecord()) == 42
    assert s.count == 1


def test_compose_examples():
    x = AllocRecord.of({Range.LOCS: [Loc("l0")]})
    assert compose(x, AllocRecord()) == x
    assert _sets(compose(x, AllocRecord.of({Range.LOCS: [Loc("l1")]})))[Range.LOCS] == \
        {item_key(Loc("l0")), item_key(Loc("l1"))}


@given(_records, _records, _records)
def test_compose_is_a_commutative_monoid(a, b, c):
    assert _sets(compose(a, b)) == _sets(compose(b, a))
    assert _sets(compose(compose(a, b), c)) == _sets(compose(a, compose(b, c)))
    assert _sets(compose(a, AllocRecord())) == _sets(a)
    for r in Range:
        assert _sets(compose(a, b))[r] == _sets(a)[r] | _sets(b)[r]
