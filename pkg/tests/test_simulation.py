import pytest

from clclab.clcs import LStep, LTrace, a_redex_check, leadsto_F1, s_contract
from clclab.labelled import refines
from clclab.simulation import (
    PostponementError,
    SimulationError,
    check_un_property,
    detuple_reduction,
    extract_reduction_to_F,
    join_in_clc,
    postpone_i,
    reduction_to_F,
    simulate_contraction,
    simulate_expansion,
)
from clclab.syntax import parse_lterm as L, parse_term as P
from clclab.systems import Step, SystemId, Trace, redexes
from clclab.terms import F, F1, T, inside_tuple

CLC0, CLC = SystemId.CLC0, SystemId.CLC


def conversion(start, *steps):
    """A CLC0 conversion from ``start``; each step is (rule, pos, dir, next)."""
    tr = Trace(P(start))
    for rule, pos, d, nxt in steps:
        tr.append(Step(CLC0, rule, pos, 0, d), P(nxt))
    assert tr.replay()
    return tr


def kinds(tr):
    return [(s.kind, s.rule) for s in tr.steps]


# contraction and expansion


def test_simulate_contraction_examples():
    out, tr = simulate_contraction(L("C2 F a a"), P("C F a a"), ((), 2))
    assert out == P("a") and kinds(tr) == [("s", 5)]
    out, tr = simulate_contraction(L("S^{1,1} K1 K <a,a>"), P("S K K a"), ((), 5))
    assert out == L("K1 a (K a)") and kinds(tr) == [("s", 9)]
    out, tr = simulate_contraction(P("K a b"), P("K a b"), ((), 4))
    assert out == P("a") and kinds(tr) == [("i", 4)]


def test_simulate_contraction_follows_c1_argument():
    # C z x x -> x on a C1 head: the test argument is first s-reduced to T1
    t = L("C1 (K1 T1 a) b b")
    out, tr = simulate_contraction(t, P("C (K T a) b b"), ((), 3))
    assert out == P("b")
    assert kinds(tr) == [("s", 8), ("s", 1)]


def test_simulate_contraction_congruence():
    t = L("C1 T1 (K1 F1 a) b")
    out, tr = simulate_contraction(t, P("C T (K F a) b"), ((0, 1), 4))
    assert out == L("C1 T1 F1 b")
    assert tr.replay() and tr.end == out


def test_simulate_contraction_in_tuple():
    t = L("S^{1,1} K1 K <K a b,K a b>")
    out, tr = simulate_contraction(t, P("S K K (K a b)"), ((1,), 4))
    assert out == L("S^{1,1} K1 K <a,a>")
    assert tr.replay() and len(tr.steps) == 2


def test_simulate_expansion_examples():
    out, tr = simulate_expansion(F1, F, P("C T F q"), ((), 1))
    assert out == L("C1 T1 F1 q") and tr.start == out and tr.end == F1
    out, tr = simulate_expansion(F1, F, P("C w F F"), ((), 3))
    assert out == L("C2 w F1 F1") and a_redex_check(out, F1)


def test_simulate_expansion_i_term_uses_i_step():
    # an unlabelled term is expanded by an ordinary i-step
    out, tr = simulate_expansion(P("a c (b c)"), P("a c (b c)"), P("S a b c"), ((), 5))
    assert out == P("S a b c") and kinds(tr) == [("i", 5)]


def test_simulate_expansion_s_regroup():
    out, tr = simulate_expansion(L("K1 c (b c)"), P("K c (b c)"), P("S K b c"), ((), 5))
    assert out == L("S^{1,1} K1 b <c,c>")
    assert a_redex_check(out, L("K1 c (b c)"))
    assert tr.replay()


# postponement


def test_postpone_erased():
    out = postpone_i(L("K1 a (K b c)"), LStep("i", (1,), 4, "+"), LStep("s", (), 8))
    assert kinds(out) == [("s", 8)] and out.end == P("a")


def test_postpone_variable_position():
    out = postpone_i(L("C1 T1 (K a b) q"), LStep("i", (0, 1), 4, "+"), LStep("s", (), 1))
    assert [(s.kind, s.pos) for s in out.steps] == [("s", ()), ("i", ())]
    assert out.end == P("a") and out.replay()


def test_postpone_disjoint():
    t = L("K1 (K1 a b) (K c d)")
    out = postpone_i(t, LStep("i", (1,), 4, "+"), LStep("s", (0, 1), 8))
    assert [(s.kind, s.pos) for s in out.steps] == [("s", (0, 1)), ("i", (1,))]
    assert out.end == L("K1 a c")


def test_postpone_expansion_direction():
    # t <-i u: the i-step runs backwards from t to u
    t = L("K1 a b")
    u = L("K1 (K a c) b")
    out = postpone_i(u, LStep("i", (0, 1), 4, "+"), LStep("s", (), 8))
    assert out.end == P("a")
    out = postpone_i(t, LStep("i", (0, 1), 4, "-"), LStep("s", (), 8), u=u)
    assert out.start == t and out.end == P("K a c") and out.replay()


def test_postpone_overlap_outside_bound():
    # an i-step inside the C2 test position blocks every s-step of t; the
    # smallest such composite has 11 nodes
    t = L("C2 (K T x) y z")
    assert t.size == 11
    with pytest.raises(PostponementError):
        postpone_i(t, LStep("i", (0, 0, 1), 4, "+"), LStep("s", (), 4))


def test_postpone_overlap_recovered():
    # same overlap, but rule 3 applies because the arguments are equal
    t = L("C2 (K T x) y y")
    out = postpone_i(t, LStep("i", (0, 0, 1), 4, "+"), LStep("s", (), 4))
    assert out.end == P("y") and out.replay()


# tuple-free reductions


def s_trace(start, *steps):
    tr = LTrace(start)
    cur = start
    for pos, rule in steps:
        cur = s_contract(cur, pos, rule)
        tr.append(LStep("s", pos, rule), cur)
    return tr


def test_detuple_no_tuple_steps_unchanged():
    tr = s_trace(L("C2 z F1 F1"), ((), 3))
    assert detuple_reduction(tr) is tr


def test_detuple_hoists_surviving_step():
    t = L("S^{1,1} K1 K <C1 T1 F1 q, C1 T1 F1 q>")
    tr = s_trace(t, ((1, 0), 1), ((), 9), ((), 8))
    out = detuple_reduction(tr)
    assert [(s.pos, s.rule) for s in out.steps] == [((), 9), ((0, 1), 1), ((), 8)]
    seq = [out.start] + out.terms
    assert not any(inside_tuple(seq[i], s.pos) for i, s in enumerate(out.steps))
    assert out.end == F1 and out.replay()


def test_detuple_drops_erased_step():
    t = L("K1 F1 <C1 T1 F1 q, C1 T1 F1 q>")
    tr = s_trace(t, ((1, 1), 1), ((), 8))
    out = detuple_reduction(tr)
    assert [(s.pos, s.rule) for s in out.steps] == [((), 8)]


def test_detuple_rejects_non_f1():
    with pytest.raises(SimulationError):
        detuple_reduction(s_trace(L("K1 a b"), ((), 8)))


# pipeline


def test_extract_examples():
    red = extract_reduction_to_F(conversion("K F T", (4, (), "+", "F")))
    assert [(s.system, s.rule, s.pos) for s in red.steps] == [(CLC, 4, ())]
    red = extract_reduction_to_F(conversion("C x F F", (3, (), "+", "F")))
    assert [(s.rule, s.level) for s in red.steps] == [(3, 1)]
    conv = conversion("C z (K F T) F", (4, (0, 1), "+", "C z F F"), (3, (), "+", "F"))
    red = extract_reduction_to_F(conv)
    assert red.start == P("C z (K F T) F") and red.end == F
    assert len(red.steps) <= 3 and red.replay()
    assert all(s.system is CLC for s in red.steps)


def test_extract_with_backward_steps():
    # forward steps, then a conversion written with backward steps
    conv = conversion("K (K F T) a", (4, (), "+", "K F T"), (4, (), "+", "F"))
    rev = conversion("F", (4, (), "-", "K F b"), (4, (0, 1), "-", "K (K F T) b"))
    red = extract_reduction_to_F(conv)
    assert red.end == F and red.replay()
    red = extract_reduction_to_F(rev.reversed())
    assert red.start == P("K (K F T) b") and red.end == F


def test_extract_needs_conversion_to_F():
    with pytest.raises(SimulationError):
        extract_reduction_to_F(conversion("K T F", (4, (), "+", "T")))


def test_reduction_to_F():
    tr = reduction_to_F(P("C z (K F T) F"))
    assert tr.end == F and tr.replay()


def test_leadsto_kept_along_lift():
    conv = conversion("C z (K F T) F", (4, (0, 1), "+", "C z F F"), (3, (), "+", "F"))
    ext = extract_reduction_to_F(conv, details=True)
    assert leadsto_F1(ext.labelled)
    assert refines(ext.labelled, conv.start)


# joins


def test_join_examples():
    common, ta, tb = join_in_clc(P("K a b"), P("a"))
    assert common == P("a")
    common, ta, tb = join_in_clc(P("C (K F T) a b"), P("b"))
    assert common == P("b")
    assert [(s.rule, s.pos) for s in ta.steps] == [(4, (0, 0, 1)), (2, ())]
    assert ta.terms == [P("C F a b"), P("b")]
    assert all(s.system is CLC for s in ta.steps) and ta.replay()
    common, ta, tb = join_in_clc(P("S a b"), P("S a b"))
    assert common == P("S a b") and not ta.steps and not tb.steps


# unique normal forms


def test_un_small():
    rep = check_un_property(3)
    assert rep.ok and rep.terms == 280


def test_un_redex_transfer_example():
    t = P("C x F F")
    assert ((), 3) in redexes(CLC, t) and ((), 3) in redexes(CLC0, t)


def test_un_distinct_normal_forms():
    from clclab.systems import conversion_search_clc0, Fuel

    assert conversion_search_clc0(T, F, Fuel(2000, 12, 8)) is None
