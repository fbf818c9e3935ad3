import pytest
from hypothesis import given, settings, strategies as st

from clclab.clcs import (
    AShape,
    LStep,
    LTrace,
    ReachabilityFailed,
    ShapeMismatch,
    a_expand,
    a_redex_check,
    find_a_step,
    i_contract,
    i_redexes,
    leadsto_F1,
    s_contract,
    s_normal_forms,
    s_redexes,
    s_reducts_all,
    s_regroup,
)
from clclab.harness import GenConfig, a_expansions, gen_lterm
from clclab.labelled import classify, is_sterm, leftmost_erase
from clclab.syntax import parse_lterm as L, parse_term as P
from clclab.systems import ReplayError, SystemId, Verdict, eq
from clclab.terms import F, F1, T, Var


def test_s_redexes_examples():
    assert ((), 1) in s_redexes(L("C1 T1 a b"))
    assert ((), 3) in s_redexes(L("C2 z a a"))
    assert ((), 9) in s_redexes(L("S^{1,1} a b <c,c>"))


def test_s_rule_conditions():
    # erasures of the arguments must be convertible
    assert ((), 3) in s_redexes(L("C2 z (K a b) a"))
    assert s_redexes(L("C2 z a b")) == []
    # the S condition compares erasures inside each group
    assert s_redexes(L("S^{1,1} a b <c,d>")) == []


def test_s_contract_examples():
    assert s_contract(L("K1 a b"), (), 8) == P("a")
    assert s_contract(L("S^{1,1} K1 K <a,a>"), (), 9) == L("K1 a (K a)")
    assert s_contract(L("C2 F1 a b"), (), 7) == P("b")


def test_s_contract_groups():
    t = L("S^{2,1,1} x <y,K y w> <z,z,K z w,z>")
    assert s_contract(t, (), 9) == L("x <z,z> <y (K z w), K y w z>")
    assert s_redexes(L("S^{2,1,1} x <y,w> <z,z,z,z>")) == []


def test_i_redexes_examples():
    t = L("C1 T1 a (K b c)")
    assert i_redexes(t) == [((1,), 4)]
    assert i_contract(t, (1,), 4) == L("C1 T1 a b")
    assert i_contract(L("K1 (S a b c) d"), (0, 1), 5) == L("K1 (a c (b c)) d")
    assert ((), 1) not in i_redexes(L("C1 T1 a b"))


def test_reduct_graph_examples():
    assert s_reducts_all(F1).nodes == {F1}
    g = s_reducts_all(L("C1 T1 F1 q"))
    assert len(g.nodes) == 2 and g.edge_count() == 1
    assert len(s_reducts_all(L("C2 z a a")).nodes) == 2


def test_normal_forms_and_leadsto():
    assert s_normal_forms(F1) == {F1}
    assert s_normal_forms(L("C1 T1 F1 q")) == {F1}
    assert s_normal_forms(L("K1 T q")) == {T}
    assert leadsto_F1(F1)
    assert leadsto_F1(L("C1 T1 F1 (S K K)"))
    assert not leadsto_F1(L("K1 T q"))


def test_graph_path_replays():
    t = L("C1 T1 (K1 F1 a) b")
    path = s_reducts_all(t).path(F1)
    assert path is not None and path.end == F1 and path.replay()


def test_a_expand_examples():
    q = P("K x y")
    assert a_expand(F1, AShape("C1T1", q=q)) == L("C1 T1 F1 (K x y)")
    assert a_expand(F1, AShape("C2", q=Var("z"), t1=F1, t2=F1)) == L("C2 z F1 F1")
    assert a_expand(L("K1 a (K a)"), AShape("S")) == L("S^{1,1} K1 K <a,a>")
    assert a_expand(F1, AShape("C1F1", q=q)) == L("C1 F1 (K x y) F1")
    assert a_expand(F1, AShape("K1", q=q)) == L("K1 F1 (K x y)")


def test_a_expand_errors():
    with pytest.raises(ShapeMismatch):
        a_expand(P("a"), AShape("K1", q=F))
    with pytest.raises(ReachabilityFailed):
        a_expand(F1, AShape("C2", q=Var("z"), t1=T, t2=F1))
    with pytest.raises(ShapeMismatch):
        a_expand(F1, AShape("S"))


def test_s_regroup_labelled_input():
    # K1 c (b c) regroups as S^{1,1} K1 b <c,c>
    assert s_regroup(L("K1 c (b c)")) == L("S^{1,1} K1 b <c,c>")
    assert s_regroup(L("C2 <c,c> (b c)")) == L("S^{2,1} C2 b <c,c,c>")


def test_a_redex_check_examples():
    assert a_redex_check(L("C1 T1 F1 q"), F1)
    assert a_redex_check(L("C2 z F1 F1"), F1)
    assert not a_redex_check(L("C1 T1 F1 q"), P("q"))
    # closed under contexts
    assert find_a_step(L("K1 (C1 T1 F1 q) a"), L("K1 F1 a")) == (0, 1)


def test_ltrace_replay_and_json():
    t = L("C1 T1 (K1 F1 a) b")
    tr = LTrace(t)
    tr.append(LStep("s", (0, 1), 8), L("C1 T1 F1 b"))
    tr.append(LStep("s", (), 1), F1)
    assert tr.replay()
    d = tr.steps[0].as_dict()
    assert d["kind"] == "s" and d["pos"] == [0, 1] and d["rule"] == 8
    bad = LTrace(t)
    bad.append(LStep("s", (), 1), F1)
    with pytest.raises(ReplayError):
        bad.replay()


gen = st.integers(0, 10**6).map(lambda s: gen_lterm(GenConfig(seed=s), budget=5))


@settings(max_examples=150, deadline=None)
@given(gen)
def test_sn_measure_and_erasure_stability(t):
    g = s_reducts_all(t)
    for src, out in g.edges.items():
        for step, dst in out:
            assert dst.nlab < src.nlab
            assert eq(SystemId.CLC, leftmost_erase(src), leftmost_erase(dst)).verdict is Verdict.YES


@settings(max_examples=100, deadline=None)
@given(gen)
def test_a_step_soundness(t):
    if not is_sterm(t):
        return
    reach = s_reducts_all(t).nodes
    for tp, pos, kind in a_expansions(t):
        if pos != ():
            continue
        assert classify(tp) is classify(t)
        # an a-redex is an s-redex, and its s-contractum meets t
        outs = [s_contract(tp, p, r) for p, r in s_redexes(tp) if p == ()]
        assert outs
        assert any(o in reach or set(s_reducts_all(o).nodes) & set(reach) for o in outs)
