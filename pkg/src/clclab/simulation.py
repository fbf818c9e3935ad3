"""Constructive content of the confluence proof.

Each algorithm here builds a labelled witness for one step of the argument
and replays it before returning.  Anything that cannot be built raises a
:class:`SimulationError`; undecided rule conditions surface as
:class:`~clclab.systems.ConditionUnknown` (a fuel problem, not a bug).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import systems
from .clcs import (
    ERASED_RULE,
    AShape,
    LStep,
    LTrace,
    a_expand,
    i_contract,
    residual,
    s_contract,
    s_reducts_all,
    scan_s,
)
from .labelled import is_standard, is_strongly_standard, leftmost_erase, refines
from .systems import (
    ConditionUnknown,
    DEFAULT_FUEL,
    Fuel,
    ReplayError,
    RewriteError,
    Step,
    SystemId,
    Trace,
    Verdict,
)
from .terms import (
    F,
    F1,
    App,
    LConst,
    Position,
    T,
    T1,
    Term,
    Tup,
    children,
    inside_tuple,
    replace_at,
    spine,
    subterm_at,
)


class SimulationError(RewriteError):
    """A construction did not apply (violated precondition or a gap in the proof)."""


class PostponementError(SimulationError):
    pass


def _check_replay(trace, fuel: Fuel, what: str):
    try:
        trace.replay(fuel)
    except ReplayError as exc:
        raise SimulationError(f"{what}: output does not replay ({exc})") from exc


def _as_step(step) -> tuple:
    if isinstance(step, Step):
        return tuple(step.pos), step.rule
    pos, rule = step
    return tuple(pos), rule


# ---------------------------------------------------------------------------
# contraction


class _Runner:
    """A labelled term that is rewritten in place while the trace is recorded."""

    def __init__(self, t: Term, fuel: Fuel):
        self.trace = LTrace(t)
        self.fuel = fuel

    @property
    def cur(self) -> Term:
        return self.trace.end

    def s(self, pos: Position, rule: int):
        self.trace.append(LStep("s", pos, rule), s_contract(self.cur, pos, rule, self.fuel))

    def i(self, pos: Position, rule: int):
        self.trace.append(LStep("i", pos, rule), i_contract(self.cur, pos, rule, self.fuel))

    def follow(self, prefix: Position, path: LTrace):
        for st in path.steps:
            self.s(prefix + tuple(st.pos), st.rule)


_C_ARG0 = (0, 0, 1)


def _contract_at(run: _Runner, at: Position, q: Term, p: Position, rid: int):
    t = subterm_at(run.cur, at)
    if type(t) is Tup:
        for i in range(len(t.items)):
            _contract_at(run, at + (i,), q, p, rid)
        return
    if t.plain:
        run.i(at + p, rid)
        return
    if p:
        if type(t) is not App:
            raise SimulationError(f"labelled term has no node above redex position {list(p)}")
        _contract_at(run, at + (p[0],), children(q)[p[0]], p[1:], rid)
        return
    head, args = spine(t)
    if type(head) is not LConst:
        raise SimulationError(f"{t} is neither an i-term nor an s-term")
    name = head.name
    if rid in (1, 2):
        plain, lab = (T, T1) if rid == 1 else (F, F1)
        if name == "C1" and len(args) == 3 and args[0] is lab:
            run.s(at, rid)
            return
        if name == "C2" and len(args) == 3:
            if args[0] is plain:
                run.s(at, 4 if rid == 1 else 5)
                return
            if args[0] is lab:
                run.s(at, 6 if rid == 1 else 7)
                return
        raise SimulationError(f"no labelled counterpart of C {plain} x y at {t}")
    if rid == 3:
        if name == "C1" and len(args) == 3:
            g = s_reducts_all(args[0], run.fuel)
            for target, srule in ((T1, 1), (F1, 2)):
                if target in g.edges:
                    run.follow(at + _C_ARG0, g.path(target))
                    run.s(at, srule)
                    return
            if not g.complete:
                raise ConditionUnknown("s-reducts of the C1 condition not fully enumerated")
            raise SimulationError(f"C1 condition {args[0]} reaches neither T1 nor F1")
        if name == "C2" and len(args) == 3:
            run.s(at, 3)
            return
        raise SimulationError(f"no labelled counterpart of C z x x at {t}")
    if rid == 4 and name == "K1" and len(args) == 2:
        run.s(at, 8)
        return
    if rid == 5 and name == "S" and len(args) == 3:
        run.s(at, 9)
        return
    raise SimulationError(f"no labelled counterpart of CLC0 rule {rid} at {t}")


def simulate_contraction(t: Term, q: Term, step, fuel: Fuel = DEFAULT_FUEL, check: bool = False):
    """Follow ``q ->CLC0 q'`` on a labelling ``t`` of ``q``.

    Returns ``(t', trace)`` with ``trace`` an i/s-reduction from ``t`` to ``t'``
    and ``t'`` a labelling of ``q'``.
    """
    pos, rid = _as_step(step)
    if not refines(t, q):
        raise SimulationError("labelled term does not refine q")
    if check and not is_strongly_standard(t, fuel):
        raise SimulationError("labelled term is not strongly standard")
    q2 = systems.contract(SystemId.CLC0, q, pos, rid, fuel)
    run = _Runner(t, fuel)
    _contract_at(run, (), q, pos, rid)
    out = run.cur
    if not refines(out, q2):
        raise SimulationError("result does not refine the contractum")
    _check_replay(run.trace, fuel, "simulate_contraction")
    return out, run.trace


# ---------------------------------------------------------------------------
# expansion


_SHAPE_FOR_RULE = {1: "C1T1", 2: "C1F1", 3: "C2", 4: "K1", 5: "S"}


def _expand_at(t: Term, q2: Term, p: Position, rid: int, at: Position, steps: list, fuel: Fuel) -> Term:
    """Labelling of the expanded term; ``q2`` is the CLC0 redex side."""
    if type(t) is Tup:
        return Tup(_expand_at(x, q2, p, rid, at + (i,), steps, fuel) for i, x in enumerate(t.items))
    if t.plain:
        steps.append(LStep("i", at + p, rid))
        return q2
    if p:
        if type(t) is not App or type(q2) is not App:
            raise SimulationError(f"labelled term has no node above redex position {list(p)}")
        if p[0] == 0:
            return App(_expand_at(t.left, q2.left, p[1:], rid, at + (0,), steps, fuel), t.right)
        return App(t.left, _expand_at(t.right, q2.right, p[1:], rid, at + (1,), steps, fuel))
    _, args = spine(q2)
    kind = _SHAPE_FOR_RULE[rid]
    if kind == "C1T1":
        shape = AShape(kind, q=args[2])
    elif kind == "C1F1":
        shape = AShape(kind, q=args[1])
    elif kind == "C2":
        shape = AShape(kind, q=args[0])
    elif kind == "K1":
        shape = AShape(kind, q=args[1])
    else:
        shape = AShape(kind)
    try:
        out = a_expand(t, shape, fuel)
    except ConditionUnknown:
        raise
    except RewriteError as exc:
        raise SimulationError(f"{kind} a-expansion of {t} failed: {exc}") from exc
    steps.append(LStep("a", at, kind))
    return out


def simulate_expansion(t: Term, q: Term, q_prime: Term, step, fuel: Fuel = DEFAULT_FUEL, check: bool = False):
    """Follow the expansion ``q <-CLC0 q'`` on a labelling ``t`` of ``q``.

    ``step`` is the CLC0 step ``q' -> q`` (position and rule in ``q'``).
    Returns ``(t', trace)`` where ``trace`` is an i/a-reduction from ``t'`` to ``t``.
    """
    pos, rid = _as_step(step)
    if not refines(t, q):
        raise SimulationError("labelled term does not refine q")
    if systems.contract(SystemId.CLC0, q_prime, pos, rid, fuel) != q:
        raise SimulationError("the step does not contract q' to q")
    if check and not is_standard(t, fuel):
        raise SimulationError("labelled term is not standard")
    steps: list = []
    out = _expand_at(t, subterm_at(q_prime, ()), pos, rid, (), steps, fuel)
    if not refines(out, q_prime):
        raise SimulationError("expanded term does not refine q'")
    # the expansions sit at pairwise disjoint positions, so contract them one by one
    trace = LTrace(out)
    for st in steps:
        trace.append(st, replace_at(trace.end, st.pos, _contractum_of(st, t, out, fuel)))
    if trace.end != t:
        raise SimulationError("expansion trace does not end at the original term")
    _check_replay(trace, fuel, "simulate_expansion")
    return out, trace


def _contractum_of(st: LStep, t: Term, tp: Term, fuel: Fuel) -> Term:
    if st.kind == "a":
        return subterm_at(t, st.pos)
    return systems.contract(SystemId.CLC, subterm_at(tp, st.pos), (), st.rule, fuel)


# ---------------------------------------------------------------------------
# postponement of i-steps


def _below(a: Position, b: Position) -> bool:
    """``b`` is at or below ``a``."""
    return b[: len(a)] == a


def postpone_i(t: Term, i_step: LStep, s_step: LStep, fuel: Fuel = DEFAULT_FUEL, u: Optional[Term] = None) -> LTrace:
    """Turn ``t <->i u ->s t'`` into ``t ->s v <->i= t'``.

    ``i_step`` describes the i-step between ``t`` and ``u``: with ``dir='+'``
    it contracts the i-redex of ``t``; with ``dir='-'`` it is an i-expansion,
    i.e. ``u ->i t`` at that position, and ``u`` must be supplied.
    """
    pi, ps = tuple(i_step.pos), tuple(s_step.pos)
    if i_step.dir == "+":
        u_real = i_contract(t, pi, i_step.rule, fuel)
        if u is not None and u != u_real:
            raise SimulationError("u is not the i-contractum of t")
        u = u_real
    else:
        if u is None or i_contract(u, pi, i_step.rule, fuel) != t:
            raise SimulationError("t is not the i-contractum of u")
    t_end = s_contract(u, ps, s_step.rule, fuel)

    def related(v: Term, pos: Position) -> bool:
        # v <->i= t' with the i-step in the original direction
        try:
            if i_step.dir == "+":
                return i_contract(v, pos, i_step.rule, fuel) == t_end
            return i_contract(t_end, pos, i_step.rule, fuel) == v
        except RewriteError:
            return False

    out = LTrace(t)
    if _below(ps, pi) and pi != ps:
        rel = pi[len(ps):]
        how, new_rel = residual(subterm_at(u, ps), s_step.rule, rel)
        if how == "erased":
            v = s_contract(t, ps, s_step.rule, fuel)
            if v != t_end:
                raise PostponementError("erased i-step but the s-step results differ")
            out.append(LStep("s", ps, s_step.rule), v)
        elif how == "moved":
            v = s_contract(t, ps, s_step.rule, fuel)
            out.append(LStep("s", ps, s_step.rule), v)
            new_pos = ps + new_rel
            if not related(v, new_pos):
                raise PostponementError("moved i-step does not relate the results")
            out.append(LStep("i", new_pos, i_step.rule, i_step.dir), t_end)
        else:
            out = _postpone_overlap(t, ps, t_end, i_step, fuel)
    elif _below(pi, ps):
        raise SimulationError("an s-redex cannot lie inside an i-term")
    else:
        v = s_contract(t, ps, s_step.rule, fuel)
        if not related(v, pi):
            raise PostponementError("disjoint steps do not commute")
        out.append(LStep("s", ps, s_step.rule), v)
        out.append(LStep("i", pi, i_step.rule, i_step.dir), t_end)
    if out.end != t_end:
        raise PostponementError("postponed trace ends elsewhere")
    _check_replay(out, fuel, "postpone_i")
    return out


def _postpone_overlap(t: Term, ps: Position, t_end: Term, i_step: LStep, fuel: Fuel) -> LTrace:
    """The i-step rewrote a constant of the s-rule pattern (e.g. C2 (K F x) y z).

    Try every s-rule at the same position of ``t``; accept a result that
    equals ``t'`` or is one i-step away from it.
    """
    for pos, rule in scan_s(t, fuel).redexes:
        if pos != ps:
            continue
        v = s_contract(t, ps, rule, fuel)
        out = LTrace(t)
        out.append(LStep("s", ps, rule), v)
        if v == t_end:
            return out
        for cand in _i_neighbours(v, t_end, i_step, fuel):
            out.append(cand, t_end)
            return out
    raise PostponementError(f"i-step at {list(i_step.pos)} overlaps the s-redex pattern at {list(ps)}")


def _i_neighbours(v: Term, t_end: Term, i_step: LStep, fuel: Fuel):
    from .clcs import i_redexes

    src, dst = (v, t_end) if i_step.dir == "+" else (t_end, v)
    for pos, rule in i_redexes(src, fuel):
        try:
            if i_contract(src, pos, rule, fuel) == dst:
                yield LStep("i", pos, rule, i_step.dir)
        except RewriteError:
            continue


# ---------------------------------------------------------------------------
# tuple-free reductions


def _track(desc: Position, term: Term, step: LStep):
    """Follow the descendant at ``desc`` across one s-step.

    Returns ("keep", new position), ("erased", None) or ("touch", None).
    """
    ps = tuple(step.pos)
    if _below(desc, ps):
        return "touch", None
    if _below(ps, desc):
        how, rel = residual(subterm_at(term, ps), step.rule, desc[len(ps):])
        if how == "moved":
            return "keep", ps + rel
        if how == "erased":
            return "erased", None
        return "touch", None
    return "keep", desc


def _in_tuple_steps(trace: LTrace) -> list:
    seq = [trace.start] + trace.terms
    return [i for i, st in enumerate(trace.steps) if inside_tuple(seq[i], st.pos)]


def detuple_reduction(trace: LTrace, fuel: Fuel = DEFAULT_FUEL) -> LTrace:
    """An s-reduction to F1 in which no step lies inside a tuple."""
    if trace.end != F1 or any(st.kind != "s" for st in trace.steps):
        raise SimulationError("detuple_reduction needs an s-reduction ending at F1")
    _check_replay(trace, fuel, "detuple_reduction input")
    if not _in_tuple_steps(trace):
        return trace
    seq = [trace.start] + trace.terms
    # good[j]: tuple-free reduction from seq[j] to F1, built from the end
    good = LTrace(F1)
    for j in range(len(trace.steps) - 1, -1, -1):
        st = trace.steps[j]
        src = seq[j]
        if not inside_tuple(src, st.pos):
            nxt = LTrace(src)
            nxt.append(st, seq[j + 1])
            nxt.extend(good)
            good = nxt
            continue
        good = _pull_back(src, st, good, fuel)
    if _in_tuple_steps(good):
        raise SimulationError("detupled reduction still has a step inside a tuple")
    _check_replay(good, fuel, "detuple_reduction")
    return good


def _pull_back(src: Term, st: LStep, good: LTrace, fuel: Fuel) -> LTrace:
    """Prefix the in-tuple step ``st`` (from ``src``) to the tuple-free ``good``.

    The rules are linear, so the contractum has one descendant along ``good``
    until it is erased.  The step is dropped if that happens while the
    descendant is still inside a tuple; otherwise it is replayed at the first
    term where the descendant has left every tuple.
    """
    pos = tuple(st.pos)
    seq = [good.start] + good.terms
    desc = pos
    at = None
    for m in range(len(seq)):
        if not inside_tuple(seq[m], desc):
            at = m
            break
        if m == len(good.steps):
            break
        how, desc = _track(desc, seq[m], good.steps[m])
        if how == "touch":
            raise SimulationError("a tuple-free step touches a redex inside a tuple")
        if how == "erased":
            break
    out = LTrace(src)
    cur = src
    upto = len(good.steps) if at is None else at
    # replay the prefix with the redex still in place
    for gst in good.steps[:upto]:
        cur = s_contract(cur, gst.pos, gst.rule, fuel)
        out.append(gst, cur)
    if at is None:
        if cur != good.end:
            raise SimulationError("dropping the erased step changed the end term")
        return out
    cur = s_contract(cur, desc, st.rule, fuel)
    out.append(st._replace(pos=desc), cur)
    if cur != seq[at]:
        raise SimulationError("hoisted step does not rejoin the reduction")
    for gst, term in zip(good.steps[at:], good.terms[at:]):
        out.append(gst, term)
    return out


# ---------------------------------------------------------------------------
# erasure of tuple-free s-reductions


def erase_reduction(trace: LTrace, fuel: Fuel = DEFAULT_FUEL) -> Trace:
    """Map a tuple-free s-reduction of a refining labelling to a CLC reduction."""
    out = Trace(leftmost_erase(trace.start))
    for st, term in zip(trace.steps, trace.terms):
        rule = ERASED_RULE[st.rule]
        nxt, cstep = systems.contract_step(SystemId.CLC, out.end, st.pos, rule, fuel)
        if nxt != leftmost_erase(term):
            raise SimulationError(f"erased s-step {st.rule} at {list(st.pos)} diverges")
        out.append(cstep, nxt)
    return out


# ---------------------------------------------------------------------------
# conversions to reductions


@dataclass
class Extraction:
    """Intermediate artefacts of :func:`extract_reduction_to_F`."""

    labelled: Term
    s_reduction: LTrace
    tuple_free: LTrace
    reduction: Trace


def lift_conversion(conv: Trace, fuel: Fuel = DEFAULT_FUEL, check: bool = False) -> list:
    """Labellings of every term of a CLC0 conversion ending at F, starting from F1 at the end.

    Returns the list of labelled terms aligned with the terms of ``conv``.
    """
    seq = [conv.start] + conv.terms
    if seq[-1] != F:
        raise SimulationError("conversion does not end at F")
    labels = [None] * len(seq)
    t = F1
    labels[-1] = t
    for j in range(len(conv.steps) - 1, -1, -1):
        st = conv.steps[j]
        if st.system is not SystemId.CLC0:
            raise SimulationError("conversion steps must be CLC0 steps")
        if st.dir == "+":
            t, _ = simulate_expansion(t, seq[j + 1], seq[j], st, fuel, check=check)
        else:
            t, _ = simulate_contraction(t, seq[j + 1], st, fuel, check=check)
        labels[j] = t
    return labels


def extract_reduction_to_F(conv: Trace, fuel: Fuel = DEFAULT_FUEL, details: bool = False, check: bool = False):
    """Turn a CLC0 conversion ``q <->* F`` into a CLC reduction ``q ->* F``."""
    try:
        conv.replay(fuel)
    except ReplayError as exc:
        raise SimulationError(f"input conversion does not replay: {exc}") from exc
    t = lift_conversion(conv, fuel, check=check)[0]
    g = s_reducts_all(t, fuel)
    path = g.path(F1)
    if path is None:
        if not g.complete:
            raise ConditionUnknown("s-reducts of the lifted term not fully enumerated")
        raise SimulationError(f"lifted term {t} does not s-reduce to F1")
    clean = detuple_reduction(path, fuel)
    red = erase_reduction(clean, fuel)
    if red.start != conv.start or red.end != F:
        raise SimulationError("erased reduction has the wrong endpoints")
    _check_replay(red, fuel, "extract_reduction_to_F")
    if details:
        return Extraction(t, path, clean, red)
    return red


def reduction_to_F(q: Term, fuel: Fuel = DEFAULT_FUEL) -> Trace:
    """A CLC reduction ``q ->* F`` for a term the oracle shows equal to F."""
    nf = systems.normalize(SystemId.CLC, q, fuel)
    if nf.term == F:
        return nf.trace
    res = systems.eq(SystemId.CLC, q, F, fuel)
    if res.verdict is not Verdict.YES:
        raise ConditionUnknown(f"could not establish {q} = F")
    w = res.witness
    if w.forward and w.end == F:
        return w
    if all(s.system is SystemId.CLC0 for s in w.steps):
        return extract_reduction_to_F(w, fuel)
    raise ConditionUnknown(f"no usable witness for {q} = F")


# ---------------------------------------------------------------------------
# joins


def _r_step_in_clc(term: Term, step: Step, fuel: Fuel) -> Trace:
    pos, rid = tuple(step.pos), step.rule
    if rid == 2:
        sub = subterm_at(term, pos)
        z = sub.left.left.right
        prefix = reduction_to_F(z, fuel).shifted(pos + _C_ARG0, term)
        out = Trace(term, list(prefix.steps), list(prefix.terms))
        nxt, cstep = systems.contract_step(SystemId.CLC, out.end, pos, 2, fuel)
        out.append(cstep, nxt)
        return out
    out = Trace(term)
    nxt, cstep = systems.contract_step(SystemId.CLC, term, pos, rid, fuel)
    out.append(cstep, nxt)
    return out


def r_trace_in_clc(trace: Trace, fuel: Fuel = DEFAULT_FUEL) -> Trace:
    """Replace each step of an R reduction by a CLC reduction with the same endpoints."""
    out = Trace(trace.start)
    for st, term in zip(trace.steps, trace.terms):
        piece = _r_step_in_clc(out.end, st, fuel)
        if piece.end != term:
            raise SimulationError(f"R step {st.rule} at {list(st.pos)} maps to the wrong term")
        out.extend(piece)
    return out


def join_in_clc(q1: Term, q2: Term, conv: Optional[Trace] = None, fuel: Fuel = DEFAULT_FUEL):
    """A common CLC reduct of two convertible terms: ``(common, trace1, trace2)``."""
    if conv is not None:
        try:
            conv.replay(fuel)
        except ReplayError as exc:
            raise SimulationError(f"conversion does not replay: {exc}") from exc
        if conv.start != q1 or conv.end != q2:
            raise SimulationError("conversion does not connect q1 and q2")
    found = systems.joinable(SystemId.R, q1, q2, fuel)
    if found is not None:
        common, ta, tb = found
        ca, cb = r_trace_in_clc(ta, fuel), r_trace_in_clc(tb, fuel)
    else:
        found = systems.joinable(SystemId.CLC, q1, q2, fuel)
        if found is None:
            raise ConditionUnknown("no common reduct within the fuel")
        common, ca, cb = found
    for tr in (ca, cb):
        _check_replay(tr, fuel, "join_in_clc")
    return common, ca, cb


# ---------------------------------------------------------------------------
# unique normal forms


@dataclass
class UNReport:
    terms: int = 0
    nodes: int = 0
    components: int = 0
    nf_violations: list = None
    transfer_violations: list = None
    transfer_unknown: int = 0
    truncated: int = 0

    def __post_init__(self):
        self.nf_violations = self.nf_violations or []
        self.transfer_violations = self.transfer_violations or []

    @property
    def ok(self) -> bool:
        return not self.nf_violations and not self.transfer_violations


def _clc0_nf(t: Term) -> bool:
    return not systems.scan_redexes(SystemId.CLC0, t, DEFAULT_FUEL).redexes


def check_un_property(size_bound: int, fuel: Fuel = DEFAULT_FUEL, alphabet=None, max_nodes: int = 200, measure: str = "leaves") -> UNReport:
    """Unique normal forms and redex transfer on every term up to ``size_bound``.

    The CLC0 reducts of each enumerated term (at most ``max_nodes`` of them,
    each no larger than ``fuel.max_term_size``) are merged into conversion
    classes; a class holding two different normal forms is a violation.
    """
    from .harness import enumerate_terms

    parent: dict = {}

    def find(x):
        root = x
        while parent[root] is not root:
            root = parent[root]
        while parent[x] is not root:
            parent[x], x = root, parent[x]
        return root

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra is not rb:
            parent[ra] = rb

    report = UNReport()
    expanded: set = set()
    for t in enumerate_terms(size_bound, alphabet, measure=measure):
        report.terms += 1
        sc = systems.scan_redexes(SystemId.CLC, t, fuel)
        if sc.redexes and _clc0_nf(t):
            report.transfer_violations.append(t)
        elif sc.unknown and not sc.redexes:
            report.transfer_unknown += 1
        parent.setdefault(t, t)
        stack, budget = [t], max_nodes
        while stack and budget:
            node = stack.pop()
            if node in expanded:
                continue
            expanded.add(node)
            budget -= 1
            if node.size > fuel.max_term_size:
                continue
            for nxt in systems.one_step_reducts(SystemId.CLC0, node, fuel)[0]:
                term = nxt[1]
                parent.setdefault(term, term)
                union(node, term)
                stack.append(term)
        if stack:
            report.truncated += 1
    classes: dict = {}
    for node in parent:
        if _clc0_nf(node):
            classes.setdefault(find(node), []).append(node)
    report.nodes = len(parent)
    report.components = len({find(n) for n in parent})
    for nfs in classes.values():
        if len(nfs) > 1:
            report.nf_violations.append(sorted(nfs, key=str))
    return report
