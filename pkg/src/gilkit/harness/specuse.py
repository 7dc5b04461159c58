"""Using verified specifications in place of procedure bodies.

Every caller in the corpus runs symbolically twice from the same input
state: once applying the callee's specification at annotated call sites,
and once executing the callee's body. Both runs must describe the same
concrete outcomes. For each final of one run and each sampled model of it,
the concrete image must also be an image of some final of the other run
under a model agreeing on the inputs. Images are compared on outcome,
return value, heap and store, up to a bijection on locations the caller
did not receive as input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .. import solver
from ..allocator import AllocRecord, Range
from ..heap import CONCRETE, SYMBOLIC
from ..interpreter import DEFAULT_FUEL, Config, Frame, Interpreter, branch_name
from ..memory import Renaming
from ..ops import conj, mk_eq
from ..printer import show_expr
from ..state import State, StateModel, Store
from ..syntax import Call, Lit, Prog, SVar, TRUE
from ..values import Loc
from ..verification import Verdict, verify_all
from . import interpret as I
from .report import Report


@dataclass
class SpecUseConfig:
    models: int = 4              # sampled models per final
    witness_limit: int = 64      # models of the other run searched per image
    fuel: int = DEFAULT_FUEL
    seed: int = 0
    prefix: str = "use_"         # callers are the procedures with this name prefix
    require_verified: bool = True  # only callers whose callees' specs verify


def callees(prog: Prog, name: str) -> set[str]:
    """Procedures called with a substitution annotation (so spec-eligible) from ``name``."""
    out = set()
    for c in prog.procs[name].body:
        if type(c) is Call and c.subst is not None and type(c.proc) is Lit:
            out.add(c.proc.value.name)
    return out


def caller_start(prog: Prog, name: str) -> Config:
    param = prog.procs[name].param
    st = State(SYMBOLIC.empty(), Store({param: SVar(param)}), AllocRecord.of({Range.SVARS: [SVar(param)]}),
               TRUE)
    return Config(st, (Frame(name),), 0)


def _locs(v, acc: list) -> None:
    if type(v) is Loc:
        if v not in acc:
            acc.append(v)
    elif type(v) is tuple:
        for x in v:
            _locs(x, acc)


def observe(eps: dict, cf: Config, fixed: set):
    """Concrete image of a final, canonical up to renaming of non-input locations."""
    img = I.config(eps, cf)
    if img is None:
        return None
    mem = CONCRETE.normal(img.state.mem)
    store = img.state.store
    found: list = []
    for k, v in mem:
        _locs(k, found)
        _locs(v, found)
    for k in sorted(store):
        _locs(store[k], found)
    _locs(img.outcome.value, found)
    free = [l for l in found if l not in fixed]
    best = None
    for perm in itertools.permutations(range(len(free))):
        ren = Renaming({l: Loc(f"~{i}") for l, i in zip(free, perm)})
        key = repr((img.outcome.kind.value, ren(img.outcome.value),
                    I.state_key(State(CONCRETE.rename(img.state.mem, ren),
                                      Store({k: ren(v) for k, v in store.items()}), AllocRecord(), TRUE))[:2]))
        if best is None or key < best:
            best = key
    return best


def _inputs(eps: dict, names) -> dict:
    return {n: eps[n] for n in names if n in eps}


def _fixed(inputs: dict) -> set:
    acc: list = []
    for v in inputs.values():
        _locs(v, acc)
    return set(acc)


def _witness(finals, inputs: dict, key, limit: int):
    """Is ``key`` an image of some final under a model extending ``inputs``? True/False/UNKNOWN."""
    unknown = False
    fixed = _fixed(inputs)
    for cf in finals:
        pc = conj(cf.pc, *(mk_eq(SVar(n), Lit(v)) for n, v in sorted(inputs.items())))
        try:
            for k, eps in enumerate(solver.iter_models(pc, extra=I.config_svars(cf))):
                if k >= limit:
                    unknown = True
                    break
                if observe(eps, cf, fixed) == key:
                    return True
        except ValueError:
            unknown = True
    return solver.UNKNOWN if unknown else False


def _direction(prop, name: str, src, dst, inputs_of, cfg: SpecUseConfig, rep: Report) -> int:
    n = 0
    for j, cf in enumerate(src):
        for k, eps in enumerate(I.models(cf, cfg.models, seed=f"{cfg.seed}:{name}:{prop}:{j}")):
            n += 1
            inputs = _inputs(eps, inputs_of)
            key = observe(eps, cf, _fixed(inputs))
            seed = f"{cfg.seed}:{name}:{prop}:{j}:{k}"
            if key is None:
                rep[prop].fail(seed, {"caller": name, "branch": branch_name(cf.branch), "model": eps},
                               "an interpretable final", show_expr(cf.pc))
                continue
            w = _witness(dst, inputs, key, cfg.witness_limit)
            if w is solver.UNKNOWN:
                rep[prop].skipped += 1
            else:
                rep[prop].check(w is True, seed, {"caller": name, "branch": branch_name(cf.branch),
                                                  "model": eps}, "a matching final of the other run", key)
    return n


def check_spec_use(prog: Prog, cfg: SpecUseConfig | None = None) -> Report:
    cfg = cfg or SpecUseConfig()
    rep = Report("spec-use")
    for name in ("runs-done", "spec-to-body", "body-to-spec"):
        rep[name]
    if cfg.require_verified:
        verified = {r.spec for r in verify_all(prog, cfg.fuel) if r.verdict is Verdict.VERIFIED}
    else:
        verified = set(prog.specs)
    used: set = set()
    callers, skipped, models = [], [], 0
    for name in sorted(n for n in prog.procs if n.startswith(cfg.prefix)):
        targets = callees(prog, name)
        if not targets or not targets <= verified:
            skipped.append(name)
            continue
        callers.append(name)
        used |= targets
        start = caller_start(prog, name)
        sm = StateModel(SYMBOLIC)
        with_specs = Interpreter(prog, sm, specs=True).run(start, cfg.fuel)
        inlined = Interpreter(prog, sm, specs=False).run(start, cfg.fuel)
        done = with_specs.done and inlined.done
        rep["runs-done"].check(done, name, name, "both runs terminate",
                               {"specs": with_specs.done, "inlined": inlined.done})
        if not done:
            continue
        inputs = {prog.procs[name].param}
        models += _direction("spec-to-body", name, with_specs.finals, inlined.finals, inputs, cfg, rep)
        models += _direction("body-to-spec", name, inlined.finals, with_specs.finals, inputs, cfg, rep)
    rep.notes = {"callers": callers, "callers_skipped": skipped, "specs_used": sorted(used),
                 "models": models}
    return rep
