from hypothesis import given, settings, strategies as st

from clclab.clcs import i_contract, i_redexes, s_reducts_all
from clclab.labelled import (
    Kind,
    classify,
    erasures,
    is_standard,
    is_strongly_standard,
    leftmost_erase,
    refines,
    subterms,
)
from clclab.syntax import parse_lterm as L, parse_term as P
from clclab.terms import App, F, F1, Tup, Var
from clclab.harness import GenConfig, gen_lterm


def test_classify_examples():
    assert classify(P("K x y")) is Kind.ITERM
    assert classify(L("C1 T1 a b")) is Kind.STERM
    assert classify(L("<a,b>")) is Kind.TUPLE
    assert classify(L("<a,b> c")) is Kind.OTHER
    assert classify(L("K C1")) is Kind.OTHER


def test_leftmost_erase_examples():
    assert leftmost_erase(F1) == F
    assert leftmost_erase(L("S^{1,1} K1 K <a,b>")) == P("S K K a")
    assert leftmost_erase(L("C2 q a a")) == P("C q a a")


def test_refines_examples():
    assert refines(F1, F)
    assert not refines(L("<a,b>"), Var("a"))
    assert refines(L("S^{1,1} K1 K <a,a>"), P("S K K a"))


def test_erasures_small():
    assert erasures(L("K1 <a,b> <c,d>")) == {P("K a c"), P("K a d"), P("K b c"), P("K b d")}


def test_is_standard_examples():
    assert is_standard(P("S (K a) (C T F) b"))
    assert not is_standard(L("C1 T a b"))
    assert is_standard(L("S^{1,1} a b <c,d>"))


def test_is_standard_shape_conditions():
    # tuple size must equal the sum of the vector
    assert not is_standard(L("S^{1,1} C2 b <c,d,e>"))
    assert is_standard(L("S^{2,1} C2 b <c,c,c>"))
    # with k > 1 the second argument is a tuple of size k
    assert is_standard(L("S^{1,1,1} C2 <b,b> <c,c,c>"))
    assert not is_standard(L("S^{1,1,1} C2 b <c,c,c>"))
    # every s-reduct of an s-term must be an s-term
    assert not is_standard(L("S^{2,1} a b <c,c,c>"))
    # no nested tuples
    assert not is_standard(L("K1 <a,<b,c>> d"))
    # a tuple in function position is never standard
    assert not is_standard(L("<a,b> c"))


def test_is_strongly_standard_examples():
    assert is_strongly_standard(F1)
    assert is_strongly_standard(L("C1 T1 F1 q"))
    assert not is_strongly_standard(L("C1 T a b"))


def test_sterm_reducing_to_iterm_is_not_standard():
    # C2 F a a s-reduces to the i-term a, which is not an s-term
    assert not is_standard(L("C2 F a a"))
    assert not is_standard(L("K1 a b"))
    assert is_standard(L("K1 F1 b"))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_refines_implies_leftmost(seed):
    t = gen_lterm(GenConfig(seed=seed), budget=4)
    q = leftmost_erase(t)
    assert refines(t, q) == (erasures(t) == {q})


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_subterms_of_standard_are_standard(seed):
    t = gen_lterm(GenConfig(seed=seed), budget=4)
    if not is_standard(t):
        return
    for sub in subterms(t):
        assert is_standard(sub)
    if type(t) is App:
        assert type(t.left) is not Tup
    if classify(t) is not Kind.TUPLE:
        assert not any(type(n) is Tup for n in s_reducts_all(t).nodes)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_classify_stable_under_i_steps(seed):
    t = gen_lterm(GenConfig(seed=seed), budget=4)
    kind = classify(t)
    for pos, rule in i_redexes(t):
        assert classify(i_contract(t, pos, rule)) is kind
