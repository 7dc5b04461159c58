"""Frame preservation of symbolic execution, up to a renaming of allocated symbols.

A generated program runs symbolically from its input state σ̂, and again
from σ̂ • σ̂_f for a random disjoint frame σ̂_f. The frame's allocation
record may already hold names the unframed run allocates, in which case
the framed run is handed different ones. The renaming ℵ pairs the symbols
of the two fresh logs along the common trace.

For every non-missing unframed final cf̂′ whose renamed context is
compatible with the frame, some framed final with the same trace must be
ℵ(cf̂′) • σ̂_f with context ℵ(π′) ∧ π_f ∧ π″, where π″ separates the final
renamed memory from the frame. Stores, values and memories are compared
under the framed context, so syntactic differences of simplification do
not matter.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .. import solver
from ..allocator import AllocRecord, Range
from ..allocator import compose as compose_alloc
from ..heap import SYMBOLIC
from ..interpreter import DEFAULT_FUEL, Config, Interpreter, Kind
from ..memory import Renaming
from ..ops import conj, mk_eq
from ..printer import print_program, show_expr
from ..state import State, StateModel, Store
from ..syntax import BinOp, Expr, Lit, SVar, TRUE
from ..values import Loc
from .generators import GenConfig, gen_inputs, gen_program, initial_config, rng_for, sym_frame, SymMem
from .report import Report

MM = SYMBOLIC


def renaming_from_logs(unframed: tuple, framed: tuple) -> Renaming | None:
    """Pair the symbols of two fresh logs, entry by entry; None if the logs disagree in shape."""
    if len(unframed) != len(framed):
        return None
    locs, svs = {}, {}
    for (t1, a), (t2, b) in zip(unframed, framed):
        if t1 != t2 or len(a) != len(b):
            return None
        for x, y in zip(a, b):
            if type(x) is SVar and type(y) is SVar:
                svs[x.name] = y.name
            elif type(x) is Lit and type(y) is Lit and type(x.value) is Loc and type(y.value) is Loc:
                locs[x.value] = y.value
            else:
                return None
    return Renaming(locs, svs)


def _rename_alloc(ren: Renaming, rec: AllocRecord) -> AllocRecord:
    d = {}
    for r, items in rec.ranges:
        d[r] = [SVar(ren.svars.get(x.name, x.name)) if type(x) is SVar else ren.value(x) for x in items]
    return AllocRecord.of(d)


def _store_eqs(ren: Renaming, s1: Store | None, s2: Store | None) -> Expr | None:
    if s1 is None or s2 is None:
        return TRUE if s1 is None and s2 is None else None
    if set(s1) != set(s2):
        return None
    return conj(*(mk_eq(ren(s1[k]), s2[k]) for k in sorted(s1)))


def _matches(ren: Renaming, cf: Config, g: Config, frame: State):
    """Does framed final g have the shape ℵ(cf) • frame? True / False / UNKNOWN."""
    if g.outcome.kind is not cf.outcome.kind or g.index != cf.index or len(g.stack) != len(cf.stack):
        return False
    if any(a.proc != b.proc or a.var != b.var or a.ret != b.ret for a, b in zip(cf.stack, g.stack)):
        return False
    if compose_alloc(_rename_alloc(ren, cf.state.alloc), frame.alloc) != g.state.alloc:
        return False
    rmem = MM.rename(cf.state.mem, ren)
    want_mem = MM.compose(rmem, frame.mem)
    if want_mem is None:
        return False
    parts = [MM.equality(want_mem, g.state.mem)]
    for s1, s2 in [(cf.state.store, g.state.store)] + [(a.store, b.store) for a, b in zip(cf.stack, g.stack)]:
        e = _store_eqs(ren, s1, s2)
        if e is None:
            return False
        parts.append(e)
    if cf.outcome.value is not None:
        parts.append(mk_eq(ren(cf.outcome.value), g.outcome.value))
    pi2 = MM.separation(rmem, frame.mem)
    shape = solver.entails(g.pc, conj(*parts))
    if shape is not True:
        return shape
    want_pc = conj(ren(cf.pc), frame.pc, pi2)
    fwd, back = solver.entails(g.pc, want_pc), solver.entails(want_pc, g.pc)
    if fwd is True and back is True:
        return True
    return solver.UNKNOWN if solver.UNKNOWN in (fwd, back) else False


def _frame_state(rng, base: State) -> State:
    f = sym_frame(rng, SymMem(base.mem, TRUE))
    lits = sorted({k.value for k in f.heap.keys() if type(k) is Lit}, key=lambda l: l.name)
    # the frame's allocator knows its own locations and possibly some names the program will want
    locs = lits + [Loc(f"l{i}") for i in range(3) if rng.random() < 0.7 and Loc(f"l{i}") not in lits]
    svs = [SVar(f"_{i}") for i in range(2) if rng.random() < 0.7]
    rec = {}
    if locs:
        rec[Range.LOCS] = locs
    if svs:
        rec[Range.SVARS] = svs
    pc = f.pc
    if rng.random() < 0.2:
        # a frame context that also constrains an input, exempting some branches
        pc = conj(pc, BinOp(">", SVar("i0"), Lit(rng.randint(-1, 3))))
    return State(f.heap, Store(), AllocRecord.of(rec), pc)


@dataclass
class FrameStats:
    pairs: int = 0
    nontrivial: int = 0
    identity: int = 0
    exempt: int = 0
    missing: int = 0
    nontrivial_pairs: int = 0


def check_pair(prog, start: Config, frame: State, rep: Report, tseed, stats: FrameStats,
               fuel: int = DEFAULT_FUEL) -> None:
    """Check one (program, frame) pair, recording into ``rep`` and ``stats``."""
    sm = StateModel(MM)
    composed = sm.compose(start.state, frame)
    ctx = {"program": print_program(prog), "frame": repr(frame.mem), "frame_alloc": repr(frame.alloc),
           "frame_pc": frame.pc}
    if not rep["framed-composition"].check(composed is not None, tseed, ctx, "σ̂ • σ̂_f defined"):
        return
    stats.pairs += 1
    frame = State(frame.mem, frame.store, frame.alloc, conj(frame.pc, MM.separation(start.state.mem, frame.mem)))
    it = Interpreter(prog, sm)
    plain = it.run(start, fuel).finals
    framed = it.run(replace(start, state=composed), fuel).finals
    by_trace: dict = {}
    for g in framed:
        by_trace.setdefault(g.trace, []).append(g)
    renamed_here = False
    for cf in plain:
        if cf.outcome.kind is Kind.MISS:
            stats.missing += 1
            continue
        cands = by_trace.get(cf.trace, [])
        rens = [(g, renaming_from_logs(cf.fresh, g.fresh)) for g in cands]
        rens = [(g, r) for g, r in rens if r is not None]
        # a branch whose context the frame contradicts is exempt; the renaming only touches
        # allocated names, so any candidate (or the identity) decides this
        ren = rens[0][1] if rens else Renaming()
        if solver.is_sat(conj(ren(cf.pc), frame.pc)) is False:
            stats.exempt += 1
            continue
        unknown = ok = False
        for g, r in rens:
            m = _matches(r, cf, g, frame)
            if m is True:
                ok = True
                if r.is_identity:
                    stats.identity += 1
                else:
                    stats.nontrivial += 1
                    renamed_here = True
                break
            if m is solver.UNKNOWN:
                unknown = True
        if ok:
            rep["frame-preservation"].ok()
        elif unknown:
            rep["frame-preservation"].skipped += 1
        else:
            rep["frame-preservation"].fail(
                tseed, {**ctx, "final": f"{cf.outcome.kind.value} {cf.outcome.value!r}",
                        "trace": list(cf.trace), "pc": show_expr(cf.pc)},
                "a framed final of shape ℵ(cf′ • π″) • σ̂_f",
                [f"{g.outcome.kind.value} {g.outcome.value!r} pc={show_expr(g.pc)}" for g in cands])
    stats.nontrivial_pairs += renamed_here


def check_frame(trials: int = 100, seed: int = 0, gen: GenConfig | None = None,
                fuel: int = DEFAULT_FUEL) -> Report:
    gen = gen or GenConfig()
    rep = Report("frame")
    for name in ("framed-composition", "frame-preservation"):
        rep[name]
    stats = FrameStats()
    for t in range(trials):
        rng = rng_for(seed, "frame", t)
        inp = gen_inputs(rng, gen)
        prog = gen_program(rng, gen, inp)
        start = initial_config(prog, inp)
        frame = _frame_state(rng, start.state)
        check_pair(prog, start, frame, rep, f"{seed}:frame:{t}", stats, fuel)
    rep.notes = {"pairs": stats.pairs, "nontrivial_renamings": stats.nontrivial,
                 "pairs_with_nontrivial_renaming": stats.nontrivial_pairs,
                 "identity_renamings": stats.identity, "exempt_unsat": stats.exempt,
                 "missing_finals_skipped": stats.missing}
    return rep
