"""Generators, enumerators and the property-suite runner."""

from __future__ import annotations

import json
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

from . import systems
from .clcs import (
    AShape,
    LStep,
    a_expand,
    find_a_step,
    i_contract,
    i_redexes,
    leadsto_F1,
    s_contract,
    s_reducts_all,
    scan_s,
)
from .labelled import is_standard, is_sterm, is_strongly_standard, refines
from .simulation import (
    PostponementError,
    SimulationError,
    extract_reduction_to_F,
    postpone_i,
    simulate_contraction,
    simulate_expansion,
    check_un_property,
)
from .systems import (
    ConditionUnknown,
    DEFAULT_FUEL,
    Fuel,
    RewriteError,
    Step,
    SystemId,
    Trace,
    Verdict,
)
from .terms import (
    C,
    C1,
    C2,
    F,
    F1,
    K,
    K1,
    S,
    T,
    T1,
    App,
    Const,
    Term,
    Tup,
    Var,
    Sv,
    LConst,
    positions,
    replace_at,
    spine,
)

CONSTANTS = (C, T, F, K, S)
LABELLED_ALPHABET = (C1, C2, K1, T1, F1, Sv(1, 1), T, F, K, Var("a"))


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_size: int = 25
    max_expansions: int = 8
    constants: tuple = ("C", "T", "F", "K", "S")
    const_weights: tuple = (1, 1, 1, 1, 1)
    variables: tuple = ("a", "b")
    var_weight: float = 1.0
    size_bound: int = 5  # for the exhaustive suites

    def rng(self, *salt) -> random.Random:
        return random.Random(":".join(map(str, (self.seed,) + salt)))


# ---------------------------------------------------------------------------
# random terms


def _atoms(cfg: GenConfig):
    atoms = [Const(c) for c in cfg.constants] + [Var(v) for v in cfg.variables]
    weights = list(cfg.const_weights) + [cfg.var_weight] * len(cfg.variables)
    return atoms, weights


def gen_term(cfg: GenConfig, rng: Optional[random.Random] = None, leaves: Optional[int] = None) -> Term:
    """A random term with at most ``cfg.max_size`` nodes."""
    rng = rng or cfg.rng("term")
    atoms, weights = _atoms(cfg)
    if leaves is None:
        leaves = rng.randint(1, max(1, (cfg.max_size + 1) // 2))

    def build(n: int) -> Term:
        if n == 1:
            return rng.choices(atoms, weights)[0]
        k = rng.randint(1, n - 1)
        return App(build(k), build(n - k))

    return build(leaves)


def _junk(rng: random.Random, cfg: GenConfig) -> Term:
    return gen_term(cfg, rng, leaves=rng.choice((1, 1, 1, 2)))


def _expansions(c: Term, rng: random.Random, cfg: GenConfig, budget: int):
    """Candidate expansions of ``c``: lists of (step on the bigger term, bigger term).

    Each list is a chain leading back to ``c`` (the S macro needs three steps).
    """
    pos, u = rng.choice(list(positions(c)))
    rule = rng.choice((1, 2, 3, 4, 5))
    j = _junk(rng, cfg)
    if rule == 1:
        return [(Step(SystemId.CLC0, 1, pos), replace_at(c, pos, C(T, u, j)))]
    if rule == 2:
        return [(Step(SystemId.CLC0, 2, pos), replace_at(c, pos, C(F, j, u)))]
    if rule == 3:
        return [(Step(SystemId.CLC0, 3, pos), replace_at(c, pos, C(j, u, u)))]
    if rule == 4:
        return [(Step(SystemId.CLC0, 4, pos), replace_at(c, pos, K(u, j)))]
    if type(u) is App and type(u.left) is App and type(u.right) is App and u.left.right == u.right.right:
        x, z, y = u.left.left, u.left.right, u.right.left
        return [(Step(SystemId.CLC0, 5, pos), replace_at(c, pos, S(x, y, z)))]
    if budget < 3:
        return []
    # u <- K u (y z) <- K (K u) z (y z) <- S (K (K u)) y z
    y, z = _junk(rng, cfg), _junk(rng, cfg)
    a = replace_at(c, pos, K(u, App(y, z)))
    b = replace_at(c, pos, K(K(u), z, App(y, z)))
    d = replace_at(c, pos, S(K(K(u)), y, z))
    return [
        (Step(SystemId.CLC0, 4, pos), a),
        (Step(SystemId.CLC0, 4, pos + (0,)), b),
        (Step(SystemId.CLC0, 5, pos), d),
    ]


def gen_convertible_to_F(cfg: GenConfig, rng: Optional[random.Random] = None) -> Trace:
    """A CLC0 conversion from a random term ``q`` to ``F``.

    Built as a random walk of ``cfg.max_expansions`` steps starting at F;
    terms never exceed ``cfg.max_size`` nodes.
    """
    rng = rng or cfg.rng("conv")
    walk = Trace(F)
    left = cfg.max_expansions
    tries = 0
    while left > 0 and tries < 50 * (cfg.max_expansions + 1):
        tries += 1
        c = walk.end
        reducts = [r for r in systems.one_step_reducts(SystemId.CLC0, c)[0] if r[1].size <= cfg.max_size]
        if reducts and rng.random() < 0.3:
            step, nxt = rng.choice(reducts)
            walk.append(step, nxt)
            left -= 1
            continue
        chain = _expansions(c, rng, cfg, left)
        if not chain or max(t.size for _, t in chain) > cfg.max_size:
            continue
        for step, bigger in chain:
            walk.append(Step(SystemId.CLC0, step.rule, step.pos, 0, "-"), bigger)
        left -= len(chain)
    return walk.reversed()


# ---------------------------------------------------------------------------
# random labelled terms


def gen_lterm(cfg: GenConfig, rng: Optional[random.Random] = None, budget: Optional[int] = None) -> Term:
    """A random labelled term, biased towards s-redexes."""
    rng = rng or cfg.rng("lterm")
    if budget is None:
        budget = rng.randint(3, max(3, cfg.max_size // 2))
    plain_atoms, weights = _atoms(cfg)
    lab_atoms = (C1, C2, K1, T1, F1)

    def leaf() -> Term:
        r = rng.random()
        if r < 0.35:
            return rng.choice(lab_atoms)
        return rng.choices(plain_atoms, weights)[0]

    def variant(t: Term, n: int) -> Term:
        # something with the same erasure most of the time
        if rng.random() < 0.8:
            return t
        return build(n)

    def build(n: int) -> Term:
        if n <= 1:
            return leaf()
        r = rng.random()
        if r < 0.15:
            return App(build(n // 2), build(n - n // 2))
        if r < 0.25:
            return rng.choice((T1, F1)) if n < 3 else C1(rng.choice((T1, F1)), build(n // 2), build(n // 3))
        if r < 0.4:
            x = build(n // 3)
            return C2(rng.choice((T, F, T1, F1, build(1))), x, variant(x, n // 3))
        if r < 0.55:
            return K1(build(n // 2), build(n // 3))
        if r < 0.7:
            k = rng.choice((1, 1, 2))
            vec = tuple(rng.choice((1, 1, 2)) for _ in range(k + 1))
            z = build(max(1, n // 4))
            zs = [variant(z, 1) for _ in range(sum(vec))]
            y = build(max(1, n // 4))
            ys = [variant(y, 1) for _ in range(k)]
            Y = ys[0] if k == 1 else Tup(ys)
            return App(App(App(Sv(*vec), build(n // 4)), Y), Tup(zs))
        if r < 0.78:
            return Tup([build(n // 3), build(n // 3)])
        if r < 0.85:
            return leaf()
        return App(build(n // 2), build(n - n // 2))

    return build(budget)


# ---------------------------------------------------------------------------
# enumeration


def enumerate_terms(max_size: int, alphabet=None, measure: str = "leaves") -> Iterator[Term]:
    """Every application tree over ``alphabet`` up to ``max_size``, smallest first.

    ``measure`` is ``"leaves"`` (number of atoms) or ``"nodes"`` (Term.size).
    """
    atoms = list(CONSTANTS if alphabet is None else alphabet)
    by_size: dict = {}
    if measure == "leaves":
        for n in range(1, max_size + 1):
            if n == 1:
                layer = atoms
            else:
                layer = [App(a, b) for k in range(1, n) for a in by_size[k] for b in by_size[n - k]]
            by_size[n] = layer
            yield from layer
    elif measure == "nodes":
        for n in range(1, max_size + 1):
            if n == 1:
                layer = atoms
            else:
                layer = [App(a, b) for k in range(1, n - 1) for a in by_size.get(k, ()) for b in by_size.get(n - 1 - k, ())]
            by_size[n] = layer
            yield from layer
    else:
        raise ValueError(f"unknown size measure {measure!r}")


def enumerate_lterms(max_size: int, alphabet=LABELLED_ALPHABET, max_tuple: int = 2) -> Iterator[Term]:
    """Labelled terms with at most ``max_size`` nodes, tuples of up to ``max_tuple`` items included."""
    atoms = list(alphabet)
    by_size: dict = {1: atoms}
    yield from atoms

    def splits(total: int, parts: int):
        if parts == 1:
            if total >= 1:
                yield (total,)
            return
        for k in range(1, total - parts + 2):
            for rest in splits(total - k, parts - 1):
                yield (k,) + rest

    for n in range(2, max_size + 1):
        layer = []
        for k in range(1, n - 1):
            for a in by_size.get(k, ()):
                for b in by_size.get(n - 1 - k, ()):
                    layer.append(App(a, b))
        for m in range(2, max_tuple + 1):
            for sizes in splits(n - 1, m):
                pools = [by_size.get(s, ()) for s in sizes]
                if all(pools):
                    layer.extend(Tup(items) for items in _product(pools))
        by_size[n] = layer
        yield from layer


def _product(pools):
    if not pools:
        yield ()
        return
    for x in pools[0]:
        for rest in _product(pools[1:]):
            if type(x) is not Tup:
                yield (x,) + rest


# ---------------------------------------------------------------------------
# reports


@dataclass
class SuiteReport:
    name: str
    cases: int = 0
    checks: int = 0
    passed: int = 0
    failed: int = 0
    unknown: int = 0
    unknown_reasons: Counter = field(default_factory=Counter)
    failures: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def merge(self, other: "SuiteReport") -> "SuiteReport":
        out = SuiteReport(self.name)
        for k in ("cases", "checks", "passed", "failed", "unknown"):
            setattr(out, k, getattr(self, k) + getattr(other, k))
        out.unknown_reasons = self.unknown_reasons + other.unknown_reasons
        out.failures = sorted(self.failures + other.failures, key=lambda f: f.get("case", 0))
        out.notes = {**self.notes, **other.notes}
        return out

    def hard_fail(self) -> bool:
        return self.failed > 0

    def ok(self, case: int = 0, n: int = 1):
        self.passed += n

    def fail(self, case: int, reason: str, **witness):
        self.failed += 1
        self.failures.append({"case": case, "reason": reason, **{k: _jsonable(v) for k, v in witness.items()}})

    def soft(self, reason: str):
        self.unknown += 1
        self.unknown_reasons[reason] += 1

    def as_dict(self) -> dict:
        return {
            "suite": self.name,
            "cases": self.cases,
            "checks": self.checks,
            "passed": self.passed,
            "failed": self.failed,
            "unknown": self.unknown,
            "unknown_reasons": dict(sorted(self.unknown_reasons.items())),
            "failures": self.failures,
            "notes": self.notes,
        }

    def summary(self) -> str:
        return f"{self.name}: {self.cases} cases, {self.passed} passed, {self.failed} failed, {self.unknown} unknown"


def _jsonable(v):
    if isinstance(v, Term):
        return str(v)
    if isinstance(v, (Trace,)):
        return trace_to_json(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _reason(exc: Exception) -> str:
    return type(exc).__name__


# ---------------------------------------------------------------------------
# the suites; each runs cases [lo, hi) so that work can be sharded


def _suite_sn(cfg: GenConfig, fuel: Fuel, lo: int, hi: int) -> SuiteReport:
    rep = SuiteReport("sn")
    for i in range(lo, hi):
        rep.cases += 1
        t = gen_lterm(cfg, cfg.rng("sn", i))
        g = s_reducts_all(t, fuel)
        bad = [(src, st, dst) for src, out in g.edges.items() for st, dst in out if dst.nlab >= src.nlab]
        n = g.edge_count()
        rep.checks += n
        if bad:
            src, st, dst = bad[0]
            rep.fail(i, "labelled-constant count did not drop", source=src, rule=st.rule, target=dst)
        else:
            rep.ok()
        if not g.complete:
            rep.soft("incomplete reduct graph")
    return rep


def _labelled_spine(t: Term) -> bool:
    """Cheap necessary condition for an s-redex: a labelled head applied to two or more arguments."""
    if type(t) is Tup:
        return any(_labelled_spine(x) for x in t.items)
    if type(t) is not App or not t.nlab:
        return False
    head, args = spine(t)
    if type(head) is LConst and len(args) >= 2:
        return True
    return any(_labelled_spine(a) for a in args) or _labelled_spine(head)


def postponement_composites(
    max_size: int = 10,
    alphabet=LABELLED_ALPHABET,
    pool=(Var("a"),),
    fuel: Fuel = DEFAULT_FUEL,
    shard: int = 0,
    shards: int = 1,
):
    """Every composite ``t <->i u ->s t'`` with ``t`` and ``u`` of at most ``max_size`` nodes.

    Yields ``(t, i_step, s_step, u)``.  i-expansions of ``u`` use the rules
    of CLC0 with extra material drawn from ``pool``.  ``shard``/``shards``
    split the enumeration round robin.
    """
    for idx, u in enumerate(enumerate_lterms(max_size, alphabet)):
        if idx % shards != shard or not u.nlab or not _labelled_spine(u):
            continue
        sredexes = scan_s(u, fuel).redexes
        if not sredexes:
            continue
        partners = []
        for pos, rule in i_redexes(u, fuel):
            # u ->i t, i.e. t <-i u
            partners.append((i_contract(u, pos, rule, fuel), LStep("i", pos, rule, "-")))
        for pos, sub in positions(u):
            if not sub.plain:
                continue
            for rule, big in _plain_expansions(sub, pool):
                t = replace_at(u, pos, big)
                if t.size <= max_size:
                    partners.append((t, LStep("i", pos, rule, "+")))
        for t, ist in partners:
            for spos, srule in sredexes:
                yield t, ist, LStep("s", spos, srule), u


def _plain_expansions(u: Term, pool):
    for j in pool:
        yield 1, C(T, u, j)
        yield 2, C(F, j, u)
        yield 3, C(j, u, u)
        yield 4, K(u, j)
    if type(u) is App and type(u.left) is App and type(u.right) is App and u.left.right == u.right.right:
        yield 5, S(u.left.left, u.right.left, u.left.right)


def _check_postpone(rep: SuiteReport, i: int, t, ist, sst, u, fuel: Fuel):
    rep.cases += 1
    try:
        out = postpone_i(t, ist, sst, fuel, u=u)
    except ConditionUnknown:
        rep.soft("condition undecided")
        return
    except PostponementError as exc:
        rep.fail(i, f"postponement: {exc}", t=t, u=u, i_pos=list(ist.pos), i_dir=ist.dir, s_pos=list(sst.pos), s_rule=sst.rule)
        return
    s_count = sum(1 for st in out.steps if st.kind == "s")
    i_count = sum(1 for st in out.steps if st.kind == "i")
    if s_count != 1 or i_count > 1 or out.start != t:
        rep.fail(i, "postponed trace has the wrong shape", t=t)
    else:
        rep.ok()


# Beyond this size an i-step inside a C2 pattern can block the s-step with no
# i-free replacement; see test_postpone_overlap_outside_bound.
POSTPONE_MAX_NODES = 10


def _postpone_case(cfg: GenConfig, rng: random.Random, fuel: Fuel):
    """One random composite ``t <->i u ->s t'`` within POSTPONE_MAX_NODES, or None."""
    u = gen_lterm(cfg, rng, budget=rng.randint(2, 4))
    sred = scan_s(u, fuel).redexes
    if not sred or u.size > POSTPONE_MAX_NODES:
        return None
    spos, srule = rng.choice(sred)
    ired = i_redexes(u, fuel)
    plain = [(p, s) for p, s in positions(u) if s.plain]
    atoms, weights = _atoms(cfg)
    if ired and rng.random() < 0.5:
        pos, rule = rng.choice(ired)
        t, ist = i_contract(u, pos, rule, fuel), LStep("i", pos, rule, "-")
    elif plain:
        pos, sub = rng.choice(plain)
        junk = rng.choices(atoms, weights)[0]
        rule, big = rng.choice(list(_plain_expansions(sub, (junk,))))
        t, ist = replace_at(u, pos, big), LStep("i", pos, rule, "+")
    else:
        return None
    if t.size > POSTPONE_MAX_NODES:
        return None
    return t, ist, LStep("s", spos, srule), u


def _suite_postpone(cfg: GenConfig, fuel: Fuel, lo: int, hi: int) -> SuiteReport:
    rep = SuiteReport("postpone")
    for i in range(lo, hi):
        rng = cfg.rng("postpone", i)
        for _ in range(50):
            case = _postpone_case(cfg, rng, fuel)
            if case is not None:
                _check_postpone(rep, i, *case, fuel)
                break
    return rep


def _suite_equivalence(cfg: GenConfig, fuel: Fuel, lo: int, hi: int) -> SuiteReport:
    rep = SuiteReport("equivalence")
    small = GenConfig(cfg.seed, max_size=7, variables=cfg.variables[:2])
    for i in range(lo, hi):
        rng = cfg.rng("equivalence", i)
        a = gen_term(small, rng)
        b = gen_term(small, rng) if rng.random() < 0.5 else _perturb(a, rng, small)
        _check_equivalence(rep, i, a, b, fuel)
    return rep


def _perturb(a: Term, rng: random.Random, cfg: GenConfig) -> Term:
    reducts = systems.one_step_reducts(SystemId.CLC0, a)[0]
    if reducts:
        return rng.choice(reducts)[1]
    return gen_term(cfg, rng)


def _check_equivalence(rep: SuiteReport, i: int, a: Term, b: Term, fuel: Fuel):
    rep.cases += 1
    verdicts = {}
    for sys in (SystemId.CLC0, SystemId.CLC, SystemId.CLCPLUS):
        res = systems.eq(sys, a, b, fuel)
        verdicts[sys] = res.verdict
        if res.verdict is Verdict.YES:
            try:
                res.witness.replay(fuel)
            except RewriteError as exc:
                rep.fail(i, f"{sys} witness does not replay: {exc}", a=a, b=b)
                return
    vals = set(verdicts.values())
    if Verdict.UNKNOWN in vals:
        rep.soft("eq undecided")
        decided = vals - {Verdict.UNKNOWN}
        if len(decided) > 1:
            rep.fail(i, "systems disagree", a=a, b=b, verdicts={str(k): v.value for k, v in verdicts.items()})
        return
    if len(vals) > 1:
        rep.fail(i, "systems disagree", a=a, b=b, verdicts={str(k): v.value for k, v in verdicts.items()})
    else:
        rep.ok()


def random_clc0_walk(q: Term, rng: random.Random, cfg: GenConfig, steps: int):
    """Random CLC0 contractions/expansions from ``q``: list of (kind, step, q_before, q_after)."""
    out = []
    for _ in range(steps):
        reducts = systems.one_step_reducts(SystemId.CLC0, q)[0]
        if reducts and rng.random() < 0.4:
            step, nxt = rng.choice(reducts)
            out.append(("contract", step, q, nxt))
            q = nxt
            continue
        for _ in range(20):
            chain = _expansions(q, rng, cfg, 1)
            if chain and chain[0][1].size <= cfg.max_size:
                step, bigger = chain[0]
                out.append(("expand", step, q, bigger))
                q = bigger
                break
        else:
            break
    return out


def _suite_simulation(cfg: GenConfig, fuel: Fuel, lo: int, hi: int) -> SuiteReport:
    rep = SuiteReport("simulation")
    for i in range(lo, hi):
        rng = cfg.rng("simulation", i)
        rep.cases += 1
        walk = random_clc0_walk(F, rng, cfg, rng.randint(1, 5))
        t, q = F1, F
        try:
            for kind, step, before, after in walk:
                if kind == "contract":
                    t, _ = simulate_contraction(t, before, step, fuel)
                else:
                    t, _ = simulate_expansion(t, before, after, step, fuel)
                q = after
                rep.checks += 1
                if not refines(t, q):
                    rep.fail(i, "lifted term does not refine", t=t, q=q)
                    break
                if not leadsto_F1(t, fuel):
                    rep.fail(i, "lifted term does not lead to F1", t=t, q=q)
                    break
            else:
                rep.ok()
        except ConditionUnknown:
            rep.soft("condition undecided")
        except SimulationError as exc:
            rep.fail(i, f"simulation: {exc}", t=t, q=q)
    return rep


def _suite_pipeline(cfg: GenConfig, fuel: Fuel, lo: int, hi: int) -> SuiteReport:
    rep = SuiteReport("pipeline")
    for i in range(lo, hi):
        rep.cases += 1
        conv = gen_convertible_to_F(cfg, cfg.rng("pipeline", i))
        try:
            red = extract_reduction_to_F(conv, fuel)
            red.replay(fuel)
            if red.start != conv.start or red.end != F:
                rep.fail(i, "wrong endpoints", conversion=conv)
            else:
                rep.ok()
                rep.checks += len(red)
        except ConditionUnknown:
            rep.soft("fuel exhausted")
        except RewriteError as exc:
            rep.fail(i, f"{_reason(exc)}: {exc}", conversion=conv)
    return rep


def _suite_un(cfg: GenConfig, fuel: Fuel, lo: int, hi: int) -> SuiteReport:
    rep = SuiteReport("un")
    if lo > 0:
        return rep
    res = check_un_property(cfg.size_bound, fuel)
    rep.cases = res.terms
    rep.checks = res.nodes
    for nfs in res.nf_violations:
        rep.fail(0, "convertible distinct normal forms", normal_forms=nfs)
    for t in res.transfer_violations:
        rep.fail(0, "CLC-redex without CLC0-redex", term=t)
    rep.passed = res.terms - len(res.transfer_violations)
    rep.unknown = res.transfer_unknown
    rep.notes = {"components": res.components, "truncated": res.truncated}
    return rep


def random_reduction(sys, q: Term, rng: random.Random, steps: int, fuel: Fuel) -> Trace:
    tr = Trace(q)
    for _ in range(steps):
        succ = systems.one_step_reducts(sys, tr.end, fuel)[0]
        if not succ:
            break
        step, nxt = rng.choice(succ)
        tr.append(step, nxt)
    return tr


def _suite_confluence(cfg: GenConfig, fuel: Fuel, lo: int, hi: int) -> SuiteReport:
    rep = SuiteReport("confluence-sample")
    src_cfg = GenConfig(cfg.seed, max_size=15, variables=cfg.variables)
    for i in range(lo, hi):
        rng = cfg.rng("confluence", i)
        rep.cases += 1
        s = _redex_rich_term(src_cfg, rng)
        left = random_reduction(SystemId.CLC, s, rng, rng.randint(0, 4), fuel)
        right = random_reduction(SystemId.CLC, s, rng, rng.randint(0, 4), fuel)
        found = systems.joinable(SystemId.CLC, left.end, right.end, fuel)
        if found is None:
            rep.soft("no common reduct within fuel")
            continue
        common, ta, tb = found
        try:
            ta.replay(fuel)
            tb.replay(fuel)
        except RewriteError as exc:
            rep.fail(i, f"join does not replay: {exc}", source=s)
            continue
        if ta.end != common or tb.end != common:
            rep.fail(i, "join traces do not meet", source=s)
        else:
            rep.ok()
    return rep


def _redex_rich_term(cfg: GenConfig, rng: random.Random) -> Term:
    for _ in range(30):
        t = gen_term(cfg, rng, leaves=rng.randint(4, (cfg.max_size + 1) // 2))
        if systems.redexes(SystemId.CLC, t):
            return t
    return t


def a_expansions(t: Term, pool=(Var("a"),), fuel: Fuel = DEFAULT_FUEL):
    """Every a-expansion ``t' ->a t`` at any s-term position, drawing i-terms from ``pool``.

    Yields ``(t', position, shape name)``.
    """
    for pos, sub in positions(t):
        if not is_sterm(sub):
            continue
        shapes = [AShape(k, q=q) for q in pool for k in ("C1T1", "C1F1", "K1")]
        g = s_reducts_all(sub, fuel)
        nodes = list(g.nodes)
        shapes += [AShape("C2", q=q, t1=x, t2=y) for q in pool for x in nodes for y in nodes]
        shapes.append(AShape("S"))
        for shape in shapes:
            try:
                big = a_expand(sub, shape, fuel)
            except ConditionUnknown:
                continue
            except RewriteError:
                continue
            yield replace_at(t, pos, big), pos, shape.kind


def _check_standardness(rep: SuiteReport, i: int, t: Term, fuel: Fuel, pool=(Var("a"),)):
    """Transport of standardness along a-expansions and s/a commutation for one ``t``."""
    try:
        if not is_standard(t, fuel):
            return
        strong = is_strongly_standard(t, fuel)
    except ConditionUnknown:
        rep.soft("standardness undecided")
        return
    rep.cases += 1
    for tp, pos, kind in a_expansions(t, pool, fuel):
        rep.checks += 1
        try:
            if strong and not is_standard(tp, fuel):
                rep.fail(i, "a-expansion of a strongly standard term is not standard", t=t, t_prime=tp, shape=kind)
                continue
            reach = set(s_reducts_all(t, fuel).nodes)
            for spos, srule in scan_s(tp, fuel).redexes:
                t1p = s_contract(tp, spos, srule, fuel)
                if t1p in reach:
                    continue
                if not any(find_a_step(t1p, t1, fuel) is not None for t1 in reach):
                    rep.fail(i, "s-step and a-step do not commute", t=t, t_prime=tp, s_pos=list(spos), s_rule=srule)
                    break
            else:
                rep.ok()
        except ConditionUnknown:
            rep.soft("condition undecided")


def _suite_standardness(cfg: GenConfig, fuel: Fuel, lo: int, hi: int) -> SuiteReport:
    rep = SuiteReport("standardness")
    for i in range(lo, hi):
        t = gen_lterm(cfg, cfg.rng("standardness", i), budget=4)
        _check_standardness(rep, i, t, fuel)
    return rep


SUITES = {
    "sn": _suite_sn,
    "postpone": _suite_postpone,
    "equivalence": _suite_equivalence,
    "simulation": _suite_simulation,
    "pipeline": _suite_pipeline,
    "un": _suite_un,
    "confluence-sample": _suite_confluence,
    "standardness": _suite_standardness,
}

DEFAULT_CASES = {
    "sn": 2000,
    "postpone": 2000,
    "equivalence": 500,
    "simulation": 200,
    "pipeline": 200,
    "un": 1,
    "confluence-sample": 200,
    "standardness": 300,
}


def _run_shard(args):
    name, cfg, fuel, lo, hi = args
    return SUITES[name](cfg, fuel, lo, hi)


def run_suite(name: str, cfg: GenConfig = GenConfig(), fuel: Fuel = DEFAULT_FUEL, cases: Optional[int] = None, workers: int = 1) -> SuiteReport:
    """Run one property suite.  Case ``i`` draws from its own seeded stream, so
    the report does not depend on ``workers``."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    n = DEFAULT_CASES[name] if cases is None else cases
    if name == "un" or workers <= 1 or n < 2 * workers:
        return SUITES[name](cfg, fuel, 0, n)
    bounds = [(n * k // workers, n * (k + 1) // workers) for k in range(workers)]
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(_run_shard, [(name, cfg, fuel, lo, hi) for lo, hi in bounds]))
    out = parts[0]
    for p in parts[1:]:
        out = out.merge(p)
    return out


# ---------------------------------------------------------------------------
# export


def trace_to_json(trace, with_terms: bool = True) -> list:
    """Trace or LTrace as a list of JSON-ready dicts: a header, then one per step."""
    rows = [{"start": str(trace.start)}]
    for st, term in zip(trace.steps, trace.terms):
        row = st.as_dict()
        if with_terms:
            row["term"] = str(term)
        rows.append(row)
    return rows


def trace_to_jsonl(trace) -> str:
    return "\n".join(json.dumps(r) for r in trace_to_json(trace))


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def reduction_graph(sys, t: Term, fuel: Fuel = DEFAULT_FUEL, max_nodes: int = 200):
    """Bounded breadth-first reduction graph: (nodes, edges, complete)."""
    from collections import deque

    nodes = {t: 0}
    edges = []
    queue = deque([t])
    complete = True
    while queue:
        node = queue.popleft()
        succ, ok = systems.one_step_reducts(sys, node, fuel)
        complete &= ok
        for step, nxt in succ:
            if nxt not in nodes:
                if len(nodes) >= max_nodes or nxt.size > fuel.max_term_size:
                    complete = False
                    continue
                nodes[nxt] = len(nodes)
                queue.append(nxt)
            edges.append((nodes[node], nodes[nxt], f"{step.rule}@{list(step.pos)}"))
    return nodes, edges, complete


def graph_to_dot(nodes: dict, edges: list, name: str = "reducts") -> str:
    lines = [f"digraph {name} {{", "  node [shape=box, fontname=monospace];"]
    for term, idx in sorted(nodes.items(), key=lambda kv: kv[1]):
        lines.append(f"  n{idx} [label={_dot_quote(str(term))}];")
    for a, b, label in edges:
        lines.append(f"  n{a} -> n{b} [label={_dot_quote(label)}];")
    lines.append("}")
    return "\n".join(lines)


def s_graph_to_dot(t: Term, fuel: Fuel = DEFAULT_FUEL) -> str:
    g = s_reducts_all(t, fuel)
    index = {n: i for i, n in enumerate(g.nodes)}
    edges = [(index[src], index[dst], f"s{st.rule}@{list(st.pos)}") for src, out in g.edges.items() for st, dst in out]
    return graph_to_dot(index, edges, "s_reducts")
