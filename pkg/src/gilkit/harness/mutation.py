"""Mutation gate: every planted mutant must make some suite fail.

Each mutant is switched on in turn and a reduced run of every suite is made;
the gate records which suites caught it. A mutant that no suite catches is a
hole in the test harness, not in the engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import mutants, solver
from .asrtprops import check_asrt_props
from .conformance import check_comp_model_props, check_exec_model_props, check_state_props
from .difftest import DiffConfig, diff_test
from .frame import check_frame
from .report import Report


@dataclass
class GateConfig:
    trials: int = 120          # per conformance suite and heap variant
    programs: int = 60         # differential programs
    frames: int = 40
    seed: int = 0
    mutants: tuple = field(default_factory=lambda: tuple(sorted(mutants.MUTANTS)))


def _suites(cfg: GateConfig):
    return {
        "exec": lambda: check_exec_model_props(trials=cfg.trials, seed=cfg.seed),
        "comp": lambda: check_comp_model_props(trials=cfg.trials, seed=cfg.seed),
        "state": lambda: check_state_props(trials=cfg.trials, seed=cfg.seed),
        "asrt": lambda: check_asrt_props(trials=cfg.trials, seed=cfg.seed),
        "diff": lambda: diff_test(dc=DiffConfig(programs=cfg.programs, models=2, seed=cfg.seed)),
        "frame": lambda: check_frame(cfg.frames, cfg.seed),
    }


def caught_by(name: str, cfg: GateConfig | None = None, stop_early: bool = False) -> list[str]:
    """Suites (by name) that fail with mutant ``name`` enabled."""
    cfg = cfg or GateConfig()
    out = []
    with mutants.enabled(name):
        for suite, run in _suites(cfg).items():
            solver.clear_cache()
            if not run().passed:
                out.append(suite)
                if stop_early:
                    break
    solver.clear_cache()
    return out


def mutation_gate(cfg: GateConfig | None = None, stop_early: bool = False) -> Report:
    cfg = cfg or GateConfig()
    rep = Report("mutation")
    for name in cfg.mutants:
        suites = caught_by(name, cfg, stop_early)
        rep["detected"].check(bool(suites), name, {"mutant": name}, "some suite fails", suites)
        rep.notes[name] = suites
    return rep
