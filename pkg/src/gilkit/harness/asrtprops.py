"""Property suite for memory-assertion consumers and producers.

Each trial draws a memory, a memory assertion P over fresh symbolic
variables and a substitution θ covering them. Keys in θ are biased towards
the memory's own keys so that consumption succeeds often, and outs towards
the stored values. The checks are the consumer/producer laws (production
adds exactly Γ_θ(P) and never misses, a successful consumption splits the
memory into residual and Γ_θ(P), consume and produce undo each other), the
satisfiability relation on produced resource, and for the symbolic model
forward soundness and backward completeness against the concrete consumer
under sampled interpretations.
"""

from __future__ import annotations

from .. import solver
from ..assertions import consume_asrt, produce_asrt, resource, satisfies
from ..heap import CONCRETE, FREED, SYMBOLIC
from ..memory import MemoryModel, Res
from ..ops import conj, disj, mk_and
from ..syntax import Atom, Lit, MemAsrt, SVar, StateAsrt, TRUE
from ..values import LOC_T, Loc
from . import interpret as I
from .conformance import GENS, UNKNOWN, _and3, _equiv, _mem_svars, _record, _sat, _val_svars
from .generators import conc_value, rng_for, sym_value, typeof_is
from .report import Report

SPARE = tuple(Loc(f"l{i}") for i in range(4, 7))


def gen_assertion(rng, mm: MemoryModel, mem, max_atoms: int = 3):
    """(P, θ, extra context): atoms over #p_i / #q_i with θ mapping them into the model."""
    atoms, theta, ctx = [], {}, []
    keys = list(mem.keys())
    for i in range(rng.randint(0, max_atoms)):
        k = f"p{i}"
        r = rng.random()
        if keys and r < 0.6:
            theta[k] = rng.choice(keys)
        elif r < 0.8 or not mm.symbolic:
            loc = rng.choice(SPARE)
            theta[k] = Lit(loc) if mm.symbolic else loc
        else:
            theta[k] = SVar(f"a{i}")
            ctx.append(typeof_is(theta[k], LOC_T))
        if rng.random() < 0.2:
            atoms.append(Atom("freed", (SVar(k),), ()))
            continue
        q = f"q{i}"
        stored = mem.lookup(theta[k])
        if rng.random() < 0.3:
            atoms.append(Atom("cell", (SVar(k),), (Lit(0),)))
            continue
        if stored is not None and stored is not FREED and rng.random() < 0.7:
            theta[q] = stored
        else:
            theta[q] = sym_value(rng) if mm.symbolic else conc_value(rng)
            if mm.symbolic and theta[q] == SVar("w"):
                theta[q] = SVar(f"w{i}")
        atoms.append(Atom("cell", (SVar(k),), (SVar(q),)))
    return MemAsrt.of(atoms), theta, conj(*ctx)


def _mem_equiv(mm: MemoryModel, pc, a, b):
    """a = b as memories, exactly (concrete) or entailed by pc (symbolic)."""
    if a is None or b is None:
        return a is None and b is None
    if not mm.symbolic:
        return CONCRETE.normal(a) == CONCRETE.normal(b)
    if mm.normal(a) == mm.normal(b):
        return True
    return solver.entails(pc, mm.equality(a, b))


def _outs(outs) -> list:
    return [{"result": o.result.value, "mem": repr(o.mem), "pc": o.pc} for o in outs]


def _asrt_props(mm: MemoryModel, gen, rng, n_models: int):
    mem, pc = gen.memory(rng)
    p, theta, ctx = gen_assertion(rng, mm, mem)
    pc = conj(pc, ctx)
    inp = {"memory": repr(mem), "assertion": repr(p), "theta": theta, "pc": pc}
    if mm.symbolic and _sat(pc) is not True:
        return
    gamma = resource(mm, theta, p, pc)

    prods = produce_asrt(mm, mem, theta, p, pc)
    yield "produce-never-missing", all(o.result is not Res.M for o in prods), inp, _outs(prods)
    for o in prods:
        if o.result is not Res.S:
            continue
        whole = mm.compose(mem, gamma) if gamma is not None else None
        yield "produce-adds-resource", _mem_equiv(mm, o.pc, o.mem, whole), inp, repr(o.mem)
        back = [b for b in consume_asrt(mm, o.mem, theta, p, o.pc) if b.result is Res.S]
        ok = _and3(_sat(o.pc) is not True or bool(back),
                   *(_mem_equiv(mm, b.pc, b.mem, mem) for b in back))
        if mm.symbolic and back:
            ok = _and3(ok, solver.entails(o.pc, disj([b.pc for b in back])))
        yield "produce-then-consume", ok, inp, _outs(back)

    cons = consume_asrt(mm, mem, theta, p, pc)
    if mm.symbolic:
        pairs = [_sat(mk_and(a.pc, b.pc)) for i, a in enumerate(cons) for b in cons[i + 1:]]
        yield "consume-coverage", _and3(*(UNKNOWN if s is UNKNOWN else not s for s in pairs),
                                        _equiv(disj([o.pc for o in cons]), pc)), inp, _outs(cons)
    else:
        yield "consume-coverage", len(cons) == 1, inp, _outs(cons)
    for o in cons:
        if o.result is not Res.S:
            continue
        g = resource(mm, o.subst, p, o.pc)
        parts = mm.compose(o.mem, g) if g is not None else None
        yield "consume-splits-memory", _mem_equiv(mm, o.pc, parts, mem), inp, repr(o.mem)
        again = [r for r in produce_asrt(mm, o.mem, o.subst, p, o.pc) if r.result is Res.S]
        yield "consume-then-produce", _and3(bool(again), *(_mem_equiv(mm, r.pc, r.mem, mem) for r in again)), \
            inp, _outs(again)

    if gamma is not None:
        ok = satisfies(mm, gamma, pc, theta, StateAsrt(p, TRUE))
        yield "satisfies-resource", ok, inp, repr(gamma)
        if p.atoms:
            yield "empty-lacks-resource", satisfies(mm, mm.empty(), pc, theta, StateAsrt(p, TRUE)) is False, \
                inp, "no resource in the empty memory"

    if mm.symbolic:
        yield from _mac_bc_fs(mem, pc, theta, p, cons, rng, n_models, inp)


def _concrete_consume(eps, mem, theta, p):
    cmem = SYMBOLIC.interpret(eps, mem)
    cth = I.subst(eps, theta)
    if cmem is None or cth is None:
        return None
    return consume_asrt(CONCRETE, cmem, cth, p, TRUE)


def _interp_matches(eps, o, g) -> bool:
    m = SYMBOLIC.interpret(eps, o.mem)
    return (o.result is g.result and m is not None
            and CONCRETE.normal(m) == CONCRETE.normal(g.mem))


def _mac_bc_fs(mem, pc, theta, p, cons, rng, n_models, inp):
    names = _mem_svars(SYMBOLIC, mem) | _val_svars(tuple(theta.values()))
    seed = rng.randrange(2 ** 31)
    for j, o in enumerate(cons):
        for eps in solver.sample_models(o.pc, n_models, extra=names, seed=f"{seed}:{j}"):
            got = _concrete_consume(eps, mem, theta, p)
            ok = got is not None and len(got) == 1 and _interp_matches(eps, o, got[0])
            yield "MAC-BC", ok, {**inp, "model": eps, "branch": j}, _outs(got or [])
    for eps in solver.sample_models(pc, n_models, extra=names, seed=f"{seed}:in"):
        got = _concrete_consume(eps, mem, theta, p)
        if not got or len(got) != 1:
            yield "MAC-FS", False, {**inp, "model": eps}, _outs(got or [])
            continue
        ok = any(solver.holds(o.pc, eps) and _interp_matches(eps, o, got[0]) for o in cons)
        yield "MAC-FS", ok, {**inp, "model": eps}, _outs(got)


def check_asrt_props(models=("concrete", "symbolic"), trials: int = 300, seed: int = 0,
                     n_models: int = 2) -> Report:
    rep = Report("asrt")
    for tag in models:
        gen = GENS[tag]
        for t in range(trials):
            rng = rng_for(seed, "asrt", tag, t)
            tseed = f"{seed}:asrt:{tag}:{t}"
            for prop, r, inp, got in _asrt_props(gen.mm, gen, rng, n_models):
                _record(rep, f"{prop}/{tag}", r, tseed, inp, prop, got)
    return rep
