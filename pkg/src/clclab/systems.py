"""The unlabelled systems CLC0, CLC, CLC+ and R.

Conditional rules are evaluated by level.  A step of level ``n`` has its
condition established by a conversion whose steps all have level below
``n``; unconditional steps have level 0.  Every public entry point takes a
:class:`Fuel`; its ``max_level`` bounds the level of the steps it may use,
so conditions are checked with ``max_level - 1``.

Equality is only semi-decidable, hence three-valued.  ``NO`` verdicts rest on
the confluence of CLC (two distinct complete normal forms, or two disjoint
closed reduct sets) and are flagged ``theorem_dependent``.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional

from .syntax import format_term, parse_term
from .terms import (
    App,
    C,
    Const,
    F,
    K,
    Position,
    S,
    T,
    Term,
    Var,
    apply_subst,
    match_pattern,
    positions,
    replace_at,
    spine,
    subterm_at,
    variables,
)


class SystemId(str, enum.Enum):
    CLC0 = "CLC0"
    CLC = "CLC"
    CLCPLUS = "CLCPLUS"
    R = "R"

    def __str__(self):
        return self.value


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class RewriteError(Exception):
    pass


class NotARedex(RewriteError):
    pass


class ConditionUnknown(RewriteError):
    """A rule condition could not be decided within the fuel."""


class ReplayError(RewriteError):
    pass


@dataclass(frozen=True)
class Fuel:
    max_steps: int = 10_000
    max_term_size: int = 60
    max_level: int = 8

    def __post_init__(self):
        if min(self.max_steps, self.max_term_size, self.max_level) < 1:
            raise ValueError("fuel components must be strictly positive")


DEFAULT_FUEL = Fuel()


@dataclass(frozen=True)
class Rule:
    id: int
    lhs: Term
    rhs: Term
    # each atom is (left, right, positive): left = right, or left != right
    conds: tuple = ()

    @property
    def head(self):
        return spine(self.lhs)[0]

    @property
    def arity(self):
        return len(spine(self.lhs)[1])

    def __str__(self):
        text = f"{format_term(self.lhs)} -> {format_term(self.rhs)}"
        if self.conds:
            atoms = [
                f"{format_term(a)} {'=' if pos else '!='} {format_term(b)}" for a, b, pos in self.conds
            ]
            text += " <= " + " & ".join(atoms)
        return text


def _rule(i, lhs, rhs, *conds):
    atoms = tuple((parse_term(a), parse_term(b), pos) for a, b, pos in conds)
    return Rule(i, parse_term(lhs), parse_term(rhs), atoms)


RULES = {
    SystemId.CLC0: (
        _rule(1, "C T x y", "x"),
        _rule(2, "C F x y", "y"),
        _rule(3, "C z x x", "x"),
        _rule(4, "K x y", "x"),
        _rule(5, "S x y z", "x z (y z)"),
    ),
    SystemId.CLC: (
        _rule(1, "C T x y", "x"),
        _rule(2, "C F x y", "y"),
        _rule(3, "C z x y", "x", ("x", "y", True)),
        _rule(4, "K x y", "x"),
        _rule(5, "S x y z", "x z (y z)"),
    ),
    SystemId.CLCPLUS: (
        _rule(1, "C T x y", "x"),
        _rule(2, "C F x y", "y"),
        _rule(3, "C z x y", "x", ("x", "y", True)),
        _rule(4, "K x y", "x"),
        _rule(5, "S x y z", "x z (y z)"),
        _rule(6, "C z x y", "y", ("x", "y", True)),
    ),
    SystemId.R: (
        _rule(1, "C T x y", "x"),
        _rule(2, "C z x y", "y", ("z", "F", True)),
        _rule(3, "C z x y", "x", ("z", "F", False), ("x", "y", True)),
        _rule(4, "K x y", "x"),
        _rule(5, "S x y z", "x z (y z)"),
    ),
}

# conditions of R refer to =_CLC, the others to their own equality
_COND_SYSTEM = {
    SystemId.CLC0: SystemId.CLC0,
    SystemId.CLC: SystemId.CLC,
    SystemId.CLCPLUS: SystemId.CLCPLUS,
    SystemId.R: SystemId.CLC,
}

_BY_HEAD = {
    sys: {
        key: tuple(r for r in rules if (r.head, r.arity) == key)
        for key in {(r.head, r.arity) for r in rules}
    }
    for sys, rules in RULES.items()
}


def rule(sys: SystemId, rule_id: int) -> Rule:
    for r in RULES[SystemId(sys)]:
        if r.id == rule_id:
            return r
    raise KeyError(f"{sys} has no rule {rule_id}")


@dataclass(frozen=True)
class Step:
    system: SystemId
    rule: int
    pos: Position
    level: int = 0
    dir: str = "+"  # '+' contracts from the current term, '-' expands it

    def as_dict(self) -> dict:
        return {
            "dir": self.dir,
            "sys": str(self.system),
            "rule": self.rule,
            "pos": list(self.pos),
            "level": self.level,
        }


@dataclass
class Trace:
    """A start term plus steps; ``terms[i]`` is the term after ``steps[i]``.

    With all steps forward this is a reduction; with mixed directions it is
    a conversion sequence.
    """

    start: Term
    steps: list = field(default_factory=list)
    terms: list = field(default_factory=list)

    @property
    def end(self) -> Term:
        return self.terms[-1] if self.terms else self.start

    @property
    def level(self) -> int:
        return max((s.level for s in self.steps), default=0)

    @property
    def forward(self) -> bool:
        return all(s.dir == "+" for s in self.steps)

    def __len__(self):
        return len(self.steps)

    def append(self, step: Step, term: Term):
        self.steps.append(step)
        self.terms.append(term)

    def extend(self, other: "Trace"):
        if other.start != self.end:
            raise ValueError("traces do not compose")
        self.steps.extend(other.steps)
        self.terms.extend(other.terms)

    def reversed(self) -> "Trace":
        seq = [self.start] + self.terms
        out = Trace(self.end)
        for i in range(len(self.steps) - 1, -1, -1):
            s = self.steps[i]
            out.append(replace(s, dir="-" if s.dir == "+" else "+"), seq[i])
        return out

    def shifted(self, prefix: Position, context: Term) -> "Trace":
        """Lift a trace on a subterm into ``context`` at position ``prefix``."""
        out = Trace(replace_at(context, prefix, self.start))
        for s, t in zip(self.steps, self.terms):
            out.append(replace(s, pos=tuple(prefix) + tuple(s.pos)), replace_at(context, prefix, t))
        return out

    def replay(self, fuel: Fuel = DEFAULT_FUEL) -> bool:
        cur = self.start
        for i, (s, nxt) in enumerate(zip(self.steps, self.terms)):
            try:
                if s.dir == "+":
                    ok = contract(s.system, cur, s.pos, s.rule, fuel) == nxt
                else:
                    ok = contract(s.system, nxt, s.pos, s.rule, fuel) == cur
            except RewriteError as exc:
                raise ReplayError(f"step {i} does not replay: {exc}") from exc
            if not ok:
                raise ReplayError(f"step {i} produces a different term")
            cur = nxt
        return True


ConversionSequence = Trace


@dataclass
class EqResult:
    verdict: Verdict
    witness: Optional[Trace] = None
    reason: str = ""
    theorem_dependent: bool = False

    def __bool__(self):
        return self.verdict is Verdict.YES


# ---------------------------------------------------------------------------
# caches; confined to one process, cleared wholesale when they grow too large

_CACHE_LIMIT = 400_000
_eq_cache: dict = {}
_nf_cache: dict = {}
_scan_cache: dict = {}
_cond_cache: dict = {}


def clear_caches():
    for c in (_eq_cache, _nf_cache, _scan_cache, _cond_cache):
        c.clear()


def _remember(cache: dict, key, value):
    if len(cache) > _CACHE_LIMIT:
        cache.clear()
    cache[key] = value
    return value


# ---------------------------------------------------------------------------
# conditions and redexes


def _eval_cond(sys: SystemId, r: Rule, sigma: dict, fuel: Fuel, level: int):
    """Return (verdict, step level) for the condition of ``r`` under ``sigma``."""
    if not r.conds:
        return Verdict.YES, 0
    if level < 0:
        return Verdict.UNKNOWN, 0
    csys = _COND_SYSTEM[sys]
    result = Verdict.YES
    step_level = 1
    for a, b, positive in r.conds:
        va = apply_subst(sigma, a)
        vb = apply_subst(sigma, b)
        res = _eq(csys, va, vb, fuel, level)
        if positive:
            v = res.verdict
            if v is Verdict.YES:
                step_level = max(step_level, res.witness.level + 1)
        else:
            v = {Verdict.YES: Verdict.NO, Verdict.NO: Verdict.YES}.get(res.verdict, Verdict.UNKNOWN)
        if v is Verdict.NO:
            return Verdict.NO, 0
        if v is Verdict.UNKNOWN:
            result = Verdict.UNKNOWN
    return result, step_level


def _root_matches(sys: SystemId, t: Term):
    if type(t) is not App:
        return ()
    head, args = spine(t)
    rules = _BY_HEAD[sys].get((head, len(args)))
    if not rules:
        return ()
    out = []
    for r in rules:
        sigma = match_pattern(r.lhs, t)
        if sigma is not None:
            out.append((r, sigma))
    return out


@dataclass
class RedexScan:
    redexes: list  # (pos, rule id, level)
    unknown: list  # (pos, rule id) whose condition is undecided

    @property
    def complete(self) -> bool:
        return not self.unknown


def _scan(sys: SystemId, t: Term, fuel: Fuel, level: int) -> RedexScan:
    key = (sys, t, fuel.max_steps, fuel.max_term_size, level)
    hit = _scan_cache.get(key)
    if hit is not None:
        return hit
    found, unknown = [], []
    for pos, sub in positions(t):
        for r, sigma in _root_matches(sys, sub):
            v, lvl = _eval_cond(sys, r, sigma, fuel, level - 1)
            if v is Verdict.YES:
                found.append((pos, r.id, lvl))
            elif v is Verdict.UNKNOWN:
                unknown.append((pos, r.id))
    return _remember(_scan_cache, key, RedexScan(found, unknown))


def scan_redexes(sys, t: Term, fuel: Fuel = DEFAULT_FUEL) -> RedexScan:
    return _scan(SystemId(sys), t, fuel, fuel.max_level)


def redexes(sys, t: Term, fuel: Fuel = DEFAULT_FUEL) -> list:
    """Every (position, rule id) whose pattern matches and whose condition holds.

    Positions with undecided conditions are left out; see :func:`scan_redexes`.
    """
    return [(p, r) for p, r, _ in scan_redexes(sys, t, fuel).redexes]


def _contract(sys: SystemId, t: Term, pos: Position, rule_id: int, fuel: Fuel, level: int):
    sub = subterm_at(t, pos)
    r = rule(sys, rule_id)
    sigma = match_pattern(r.lhs, sub)
    if sigma is None:
        raise NotARedex(f"{format_term(sub)} does not match {r}")
    v, lvl = _eval_cond(sys, r, sigma, fuel, level - 1)
    if v is Verdict.NO:
        raise NotARedex(f"condition of {sys} rule {rule_id} fails at {list(pos)}")
    if v is Verdict.UNKNOWN:
        raise ConditionUnknown(f"condition of {sys} rule {rule_id} undecided at {list(pos)}")
    return replace_at(t, pos, apply_subst(sigma, r.rhs)), lvl


def contract(sys, t: Term, pos: Position, rule_id: int, fuel: Fuel = DEFAULT_FUEL) -> Term:
    return _contract(SystemId(sys), t, tuple(pos), rule_id, fuel, fuel.max_level)[0]


def contract_step(sys, t: Term, pos: Position, rule_id: int, fuel: Fuel = DEFAULT_FUEL) -> tuple:
    """Like :func:`contract` but also returns the :class:`Step` record."""
    sys = SystemId(sys)
    out, lvl = _contract(sys, t, tuple(pos), rule_id, fuel, fuel.max_level)
    return out, Step(sys, rule_id, tuple(pos), lvl)


def one_step_reducts(sys, t: Term, fuel: Fuel = DEFAULT_FUEL):
    sys = SystemId(sys)
    sc = _scan(sys, t, fuel, fuel.max_level)
    out = []
    for pos, rid, lvl in sc.redexes:
        r = rule(sys, rid)
        sigma = match_pattern(r.lhs, subterm_at(t, pos))
        out.append((Step(sys, rid, pos, lvl), replace_at(t, pos, apply_subst(sigma, r.rhs))))
    return out, sc.complete


# ---------------------------------------------------------------------------
# normalization


@dataclass
class NormalizeResult:
    term: Term
    trace: Trace
    complete: bool

    def __iter__(self):
        return iter((self.term, self.trace, self.complete))


def _lo_redex(sys: SystemId, t: Term, fuel: Fuel, level: int):
    """Leftmost-outermost redex, smaller rule id first.  Returns (hit, saw_unknown)."""
    unknown = False
    for pos, sub in positions(t):
        for r, sigma in _root_matches(sys, sub):
            v, lvl = _eval_cond(sys, r, sigma, fuel, level - 1)
            if v is Verdict.YES:
                return (pos, r, sigma, lvl), unknown
            if v is Verdict.UNKNOWN:
                unknown = True
    return None, unknown


def _normalize(sys: SystemId, t: Term, fuel: Fuel, level: int) -> NormalizeResult:
    key = (sys, t, fuel.max_steps, fuel.max_term_size, level)
    hit = _nf_cache.get(key)
    if hit is not None:
        return hit
    trace = Trace(t)
    cur = t
    complete = False
    for _ in range(fuel.max_steps):
        if cur.size > fuel.max_term_size:
            break
        found, unknown = _lo_redex(sys, cur, fuel, level)
        if found is None:
            complete = not unknown
            break
        pos, r, sigma, lvl = found
        cur = replace_at(cur, pos, apply_subst(sigma, r.rhs))
        trace.append(Step(sys, r.id, pos, lvl), cur)
    return _remember(_nf_cache, key, NormalizeResult(cur, trace, complete))


def normalize(sys, t: Term, fuel: Fuel = DEFAULT_FUEL) -> NormalizeResult:
    """Leftmost-outermost normalization.

    ``complete`` is true iff the result has no redex and no condition was left
    undecided in the final scan.
    """
    return _normalize(SystemId(sys), t, fuel, fuel.max_level)


# ---------------------------------------------------------------------------
# joinability


def _path(parents: dict, node: Term, start: Term) -> Trace:
    steps = []
    while node != start:
        prev, step = parents[node]
        steps.append((step, node))
        node = prev
    tr = Trace(start)
    for step, term in reversed(steps):
        tr.append(step, term)
    return tr


def _join_search(sys: SystemId, a: Term, b: Term, fuel: Fuel, level: int):
    """Breadth-first search of both reduct graphs.

    Returns ("join", common, trace_a, trace_b), ("disjoint",) when both graphs
    were exhausted without an undecided condition, or None.
    """
    sides = []
    for root in (a, b):
        sides.append({"parents": {root: None}, "frontier": deque([root]), "closed": True, "root": root})
    budget = fuel.max_steps
    visited = 2
    if a == b:
        return "join", a, Trace(a), Trace(b)
    while any(s["frontier"] for s in sides):
        for me, other in ((0, 1), (1, 0)):
            side = sides[me]
            if not side["frontier"]:
                continue
            node = side["frontier"].popleft()
            succ, complete = _one_step(sys, node, fuel, level)
            if not complete:
                side["closed"] = False
            for step, nxt in succ:
                if nxt in side["parents"]:
                    continue
                if nxt.size > fuel.max_term_size:
                    side["closed"] = False
                    continue
                side["parents"][nxt] = (node, step)
                visited += 1
                if nxt in sides[other]["parents"]:
                    ta = _path(sides[0]["parents"], nxt, a)
                    tb = _path(sides[1]["parents"], nxt, b)
                    return "join", nxt, ta, tb
                side["frontier"].append(nxt)
            if visited > budget:
                return None
    if sides[0]["closed"] and sides[1]["closed"]:
        return ("disjoint",)
    return None


def _one_step(sys: SystemId, t: Term, fuel: Fuel, level: int):
    sc = _scan(sys, t, fuel, level)
    out = []
    for pos, rid, lvl in sc.redexes:
        r = rule(sys, rid)
        sigma = match_pattern(r.lhs, subterm_at(t, pos))
        out.append((Step(sys, rid, pos, lvl), replace_at(t, pos, apply_subst(sigma, r.rhs))))
    return out, sc.complete


def joinable(sys, a: Term, b: Term, fuel: Fuel = DEFAULT_FUEL):
    """Search for a common reduct.  Returns (common, trace_a, trace_b) or None.

    None means the budget ran out; it is not a refutation.
    """
    sys = SystemId(sys)
    level = fuel.max_level
    na = _normalize(sys, a, fuel, level)
    nb = _normalize(sys, b, fuel, level)
    if na.term == nb.term:
        return na.term, na.trace, nb.trace
    res = _join_search(sys, a, b, fuel, level)
    if res and res[0] == "join":
        return res[1], res[2], res[3]
    return None


# ---------------------------------------------------------------------------
# conversion search in CLC0 (independent oracle: no conditions involved)

_CLC0_EXPANSIONS = (1, 2, 3, 4)


def _clc0_neighbours(t: Term, pool, max_size: int):
    for pos, rid, _ in _scan(SystemId.CLC0, t, DEFAULT_FUEL, 0).redexes:
        r = rule(SystemId.CLC0, rid)
        sigma = match_pattern(r.lhs, subterm_at(t, pos))
        yield Step(SystemId.CLC0, rid, pos, 0, "+"), replace_at(t, pos, apply_subst(sigma, r.rhs))
    for pos, sub in positions(t):
        grow = max_size - t.size
        # rule 5 backwards: x z (y z) <- S x y z
        if type(sub) is App and type(sub.left) is App and type(sub.right) is App:
            if sub.left.right == sub.right.right:
                x, z, y = sub.left.left, sub.left.right, sub.right.left
                new = App(App(App(S, x), y), z)
                if new.size - sub.size <= grow:
                    yield Step(SystemId.CLC0, 5, pos, 0, "-"), replace_at(t, pos, new)
        for junk in pool:
            cands = (
                (1, App(App(App(C, T), sub), junk)),
                (2, App(App(App(C, F), junk), sub)),
                (4, App(App(K, sub), junk)),
            )
            for rid, new in cands:
                if new.size - sub.size <= grow:
                    yield Step(SystemId.CLC0, rid, pos, 0, "-"), replace_at(t, pos, new)
            new = App(App(App(C, junk), sub), sub)
            if new.size - sub.size <= grow:
                yield Step(SystemId.CLC0, 3, pos, 0, "-"), replace_at(t, pos, new)


def conversion_search_clc0(a: Term, b: Term, fuel: Fuel = DEFAULT_FUEL, pool=None) -> Optional[Trace]:
    """Bidirectional breadth-first search over contractions and expansions of CLC0.

    Expansions draw the material they introduce from ``pool`` (default: the
    five constants and the variables of ``a`` and ``b``).  Terms larger than
    ``fuel.max_term_size`` are not visited.
    """
    if a == b:
        return Trace(a)
    if pool is None:
        pool = [Const(n) for n in "CTFKS"] + [Var(v) for v in sorted(variables(a) | variables(b))]
    parents = ({a: None}, {b: None})
    frontiers = (deque([a]), deque([b]))
    visited = 2
    while frontiers[0] or frontiers[1]:
        for me in (0, 1):
            if not frontiers[me]:
                continue
            node = frontiers[me].popleft()
            for step, nxt in _clc0_neighbours(node, pool, fuel.max_term_size):
                if nxt in parents[me]:
                    continue
                parents[me][nxt] = (node, step)
                visited += 1
                if nxt in parents[1 - me]:
                    left = _path(parents[0], nxt, a)
                    right = _path(parents[1], nxt, b)
                    left.extend(right.reversed())
                    return left
                frontiers[me].append(nxt)
                if visited > fuel.max_steps:
                    return None
    return None


# ---------------------------------------------------------------------------
# equality


_EQ_CONVERSION_BUDGET = 1_500


def _join_witness(ta: Trace, tb: Trace) -> Trace:
    w = Trace(ta.start, list(ta.steps), list(ta.terms))
    w.extend(tb.reversed())
    return w


def _eq(sys: SystemId, a: Term, b: Term, fuel: Fuel, level: int) -> EqResult:
    if a == b:
        return EqResult(Verdict.YES, Trace(a), "identical")
    key = (sys, a, b, fuel.max_steps, fuel.max_term_size, level)
    hit = _eq_cache.get(key)
    if hit is not None:
        return hit
    # provisional entry: a recursive request for the same question is undecided
    _eq_cache[key] = EqResult(Verdict.UNKNOWN, reason="cycle")

    na = _normalize(sys, a, fuel, level)
    nb = _normalize(sys, b, fuel, level)
    if na.term == nb.term:
        res = EqResult(Verdict.YES, _join_witness(na.trace, nb.trace), "common reduct")
        return _remember(_eq_cache, key, res)

    if sys is SystemId.CLC:
        ca, cb = na, nb
    else:
        ca = _normalize(SystemId.CLC, a, fuel, level)
        cb = _normalize(SystemId.CLC, b, fuel, level)
    if ca.complete and cb.complete and ca.term != cb.term:
        res = EqResult(Verdict.NO, None, "distinct normal forms", theorem_dependent=True)
        return _remember(_eq_cache, key, res)

    found = _join_search(sys, a, b, fuel, level)
    if found and found[0] == "join":
        res = EqResult(Verdict.YES, _join_witness(found[2], found[3]), "common reduct")
        return _remember(_eq_cache, key, res)
    if found and sys is not SystemId.CLC0:
        res = EqResult(Verdict.NO, None, "disjoint closed reduct sets", theorem_dependent=True)
        return _remember(_eq_cache, key, res)

    small = replace(fuel, max_steps=min(fuel.max_steps, _EQ_CONVERSION_BUDGET))
    conv = conversion_search_clc0(a, b, small)
    if conv is not None:
        return _remember(_eq_cache, key, EqResult(Verdict.YES, conv, "CLC0 conversion"))
    return _remember(_eq_cache, key, EqResult(Verdict.UNKNOWN, None, "fuel exhausted"))


def eq(sys, a: Term, b: Term, fuel: Fuel = DEFAULT_FUEL) -> EqResult:
    """Bounded three-valued equality in ``sys``.

    YES carries a replayable conversion witness.  NO is only given when a
    confluence-based argument applies (``theorem_dependent``).
    """
    return _eq(SystemId(sys), a, b, fuel, fuel.max_level)


def cond_eq(sys, a: Term, b: Term, fuel: Fuel = DEFAULT_FUEL) -> Verdict:
    """Equality as a rule condition sees it: one level below ``fuel.max_level``."""
    if a == b:
        return Verdict.YES
    level = fuel.max_level - 1
    if level < 0:
        return Verdict.UNKNOWN
    return _eq(SystemId(sys), a, b, fuel, level).verdict


def witness_replays(res: EqResult, fuel: Fuel = DEFAULT_FUEL) -> bool:
    return res.witness is not None and res.witness.replay(fuel)
