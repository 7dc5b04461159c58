"""Differential testing of symbolic execution against concrete execution.

Backward completeness: every model of a symbolic final configuration is
reached by a concrete replay of the same trace, started from the model's
image of the initial configuration. The replay runs in lock step with the
symbolic ancestors, so each intermediate step is checked as well.

Forward soundness: every concrete run from a model of the initial symbolic
configuration ends in the image of some symbolic final with the same trace.

Symbols handed out by iSym are tied together through the fresh logs: on the
backward side the concrete value supply replays ε(x̂) for each allocated x̂;
on the forward side ε is extended by pairing each symbolic iSym variable with
the concrete value drawn at the same point of the trace.
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import solver
from ..allocator import ValueSupply
from ..heap import CONCRETE, SYMBOLIC
from ..interpreter import DEFAULT_FUEL, Config, CoverageMonitor, Interpreter, branch_name
from ..printer import print_program, show_expr
from ..state import StateModel
from ..syntax import SVar
from . import interpret as I
from .generators import GenConfig, Inputs, gen_inputs, gen_program, initial_config, program_size, rng_for
from .report import Report


@dataclass
class DiffConfig:
    programs: int = 200
    models: int = 3               # models per final (BC) and initial models per program (FS)
    exhaustive: int = 0           # extra programs with at most two input svars, checked on all models
    exhaustive_limit: int = 64     # cap on enumerated models per configuration
    fuel: int = DEFAULT_FUEL
    seed: int = 0


class _Recorder:
    """Observer remembering every symbolic configuration by (trace length, branch)."""

    def __init__(self, inner=None):
        self.seen: dict = {}
        self.inner = inner

    def __call__(self, cf, cmd, succ):
        self.seen.setdefault((len(cf.trace), cf.branch), cf)
        for s in succ:
            self.seen.setdefault((len(s.trace), s.branch), s)
        if self.inner is not None:
            self.inner(cf, cmd, succ)

    def ancestors(self, final: Config) -> list[Config]:
        out = []
        for k in range(len(final.trace) + 1):
            for j in range(len(final.branch), -1, -1):
                cf = self.seen.get((k, final.branch[:j]))
                if cf is not None:
                    out.append(cf)
                    break
        return out


def _fresh_values(cf: Config, tag: str = "i") -> list:
    return [x for t, items in cf.fresh if t == tag for x in items]


def _concrete(prog, replay=(), seed=0) -> Interpreter:
    return Interpreter(prog, StateModel(CONCRETE, ValueSupply(seed=seed, replay=list(replay))))


def _show_cfg(cf: Config | None) -> str | None:
    if cf is None:
        return None
    st = cf.state
    pc = show_expr(st.pc)
    return (f"{cf.outcome.kind.value}({cf.outcome.value!r}) at {cf.stack[0].proc}:{cf.index} "
            f"heap={st.mem!r} store={dict(st.store)!r} pc={pc} trace={list(cf.trace)}")


def check_bc(prog, start: Config, recorder: _Recorder, final: Config, eps: dict,
             rep: Report, seed, fuel: int) -> None:
    """Lock-step concrete replay of one model of one symbolic final."""
    ctx = {"program": print_program(prog), "branch": branch_name(final.branch), "model": eps}
    ancestors = recorder.ancestors(final) if recorder.seen else [start, final]
    mono = all(solver.holds(a.pc, eps) for a in ancestors)
    rep["monotonicity"].check(mono, seed, ctx, "ε satisfies every ancestor context", False)
    replay = [I.value(eps, x) for x in _fresh_values(final)]
    cur = I.config(eps, start)
    if cur is None:
        rep["GIL-BC"].fail(seed, ctx, "initial configuration is interpretable", None)
        return
    it = _concrete(prog, replay)
    by_len = {len(a.trace): a for a in ancestors}
    steps = 0
    while not cur.final and steps < fuel:
        nxt = it.step(cur)
        steps += 1
        if len(nxt) != 1:
            rep["GIL-BC"].fail(seed, ctx, "one concrete successor", f"{len(nxt)} successors")
            return
        cur = nxt[0]
        anc = by_len.get(steps)
        if anc is not None and len(anc.trace) <= len(final.trace):
            want = I.config(eps, anc)
            if want is None or I.config_key(want) != I.config_key(cur):
                rep["GIL-BC"].fail(seed, ctx, _show_cfg(want), _show_cfg(cur))
                return
    want = I.config(eps, final)
    ok = want is not None and I.config_key(want) == I.config_key(cur)
    rep["GIL-BC"].check(ok, seed, ctx, _show_cfg(want), _show_cfg(cur))


def check_fs(prog, start: Config, finals: list[Config], eps0: dict, rep: Report, seed,
             fuel: int, supply_seed: int) -> None:
    ctx = {"program": print_program(prog), "model": eps0}
    init = I.config(eps0, start)
    if init is None:
        rep["GIL-FS"].fail(seed, ctx, "initial configuration is interpretable", None)
        return
    run = _concrete(prog, seed=supply_seed).run(init, fuel)
    if not run.done or len(run.configs) != 1:
        rep["GIL-FS"].fail(seed, ctx, "a single terminated concrete run",
                           f"done={run.done}, configs={len(run.configs)}")
        return
    got = run.configs[0]
    key = I.config_key(got)
    drawn = _fresh_values(got)
    for cf in finals:
        if cf.trace != got.trace:
            continue
        syms = _fresh_values(cf)
        eps = dict(eps0)
        eps.update({x.name: v for x, v in zip(syms, drawn) if type(x) is SVar})
        img = I.config(eps, cf)
        if img is not None and I.config_key(img) == key:
            rep["GIL-FS"].ok()
            return
    rep["GIL-FS"].fail(seed, ctx, "a symbolic final with the same trace whose image matches",
                       _show_cfg(got))


def _one_program(cfg: GenConfig, dc: DiffConfig, idx: int, rep: Report, exhaustive: bool) -> dict:
    tag = "exh" if exhaustive else "prog"
    rng = rng_for(dc.seed, tag, idx)
    inp: Inputs = gen_inputs(rng, cfg, max_svars=2 if exhaustive else None)
    prog = gen_program(rng, cfg, inp)
    start = initial_config(prog, inp)
    cov = CoverageMonitor()
    rec = _Recorder(cov)
    run = Interpreter(prog, StateModel(SYMBOLIC), observer=rec).run(start, dc.fuel)
    seed = f"{dc.seed}:{tag}:{idx}"
    rep["symbolic-done"].check(run.done, seed, print_program(prog), "Done", f"{run.steps} steps")
    rep["coverage"].ok(cov.checked - len(cov.failures))
    for cf, cmd in cov.failures:
        rep["coverage"].fail(seed, print_program(prog), f"π covered by successors of {cmd}",
                             show_expr(cf.pc))
    rep["coverage"].skipped += cov.unknown
    finals = run.finals
    n_models = 0
    # backward completeness
    for j, cf in enumerate(finals):
        if exhaustive:
            try:
                ms = I.all_models(cf, dc.exhaustive_limit)
            except ValueError:
                rep["GIL-BC"].skipped += 1
                continue
        else:
            ms = I.models(cf, dc.models, seed=f"{seed}:{j}")
            # fewer samples are only acceptable when the final has fewer models
            enough = len(ms) >= dc.models or len(I.all_models(cf, dc.models)) == len(ms)
            rep["model-budget"].check(enough, seed, branch_name(cf.branch),
                                      f"{dc.models} models or all of them", len(ms))
        n_models += len(ms)
        for k, eps in enumerate(ms):
            check_bc(prog, start, rec, cf, eps, rep, f"{seed}:bc:{j}:{k}", dc.fuel)
    # forward soundness
    if exhaustive:
        try:
            inits = I.all_models(start, dc.exhaustive_limit)
        except ValueError:
            inits = []
            rep["GIL-FS"].skipped += 1
    else:
        inits = I.models(start, dc.models, seed=f"{seed}:init")
    for k, eps0 in enumerate(inits):
        supply = rng_for(seed, "supply", k).randrange(2 ** 31)
        check_fs(prog, start, finals, eps0, rep, f"{seed}:fs:{k}", dc.fuel, supply)
    return {"size": program_size(prog), "procs": len(prog.procs), "finals": len(finals),
            "bc_models": n_models, "fs_models": len(inits), "input_svars": len(inp.svars)}


def diff_test(gen: GenConfig | None = None, dc: DiffConfig | None = None) -> Report:
    gen = gen or GenConfig()
    dc = dc or DiffConfig()
    rep = Report("diff")
    for name in ("symbolic-done", "coverage", "model-budget", "monotonicity", "GIL-BC", "GIL-FS"):
        rep[name]
    stats = [_one_program(gen, dc, i, rep, False) for i in range(dc.programs)]
    # the exhaustive subset is reported under its own prefix so its verdict stays visible
    ex_rep = Report("exhaustive")
    for name in ("symbolic-done", "coverage", "monotonicity", "GIL-BC", "GIL-FS"):
        ex_rep[name]
    exh = [_one_program(gen, dc, i, ex_rep, True) for i in range(dc.exhaustive)]
    if dc.exhaustive:
        rep.merge(ex_rep)
    rep.notes = {
        "programs": len(stats),
        "exhaustive_programs": len(exh),
        "max_size": max((s["size"] for s in stats + exh), default=0),
        "max_procs": max((s["procs"] for s in stats + exh), default=0),
        "finals": sum(s["finals"] for s in stats + exh),
        "bc_models": sum(s["bc_models"] for s in stats + exh),
        "fs_models": sum(s["fs_models"] for s in stats + exh),
    }
    return rep
