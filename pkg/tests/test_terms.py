import pytest
from hypothesis import given, strategies as st

from clclab.syntax import TermSyntaxError, format_lterm, format_term, parse_lterm, parse_term
from clclab.terms import (
    App,
    C,
    C1,
    F,
    F1,
    InvalidPosition,
    K,
    K1,
    S,
    Sv,
    T,
    T1,
    Tup,
    Var,
    apply_subst,
    match_pattern,
    positions,
    replace_at,
    subterm_at,
)

x, y, z, a, b = (Var(n) for n in "xyzab")


def test_parse_left_association():
    assert parse_term("K x y") == App(App(K, x), y)
    assert parse_term("S x y z") == App(App(App(S, x), y), z)
    assert parse_term("C (K F) T") == App(App(C, App(K, F)), T)


def test_format_minimal_parens():
    assert format_term(App(App(K, x), y)) == "K x y"
    assert format_term(App(K, App(x, y))) == "K (x y)"
    assert format_term(F) == "F"


def test_parse_error_offset():
    with pytest.raises(TermSyntaxError) as err:
        parse_term("K (x y")
    assert err.value.offset == 6
    with pytest.raises(TermSyntaxError):
        parse_term("K1 x")


def test_labelled_syntax():
    t = parse_lterm("S^{1,1} K1 K <a,b>")
    assert t == App(App(App(Sv(1, 1), K1), K), Tup([a, b]))
    assert format_lterm(t) == "S^{1,1} K1 K <a,b>"
    assert parse_lterm("C1 T1 F1 q") == C1(T1, F1, Var("q"))
    # a one-element grouping is the element itself
    assert parse_lterm("<a>") == a
    with pytest.raises(TermSyntaxError):
        parse_lterm("<a,>")
    with pytest.raises(TermSyntaxError):
        parse_lterm("S^{1} a b c")


def test_match_nonlinear():
    pat = parse_term("C z x x")
    assert match_pattern(pat, parse_term("C T (K a b) (K a b)")) == {"z": T, "x": parse_term("K a b")}
    assert match_pattern(pat, parse_term("C T a b")) is None
    assert match_pattern(parse_term("K x y"), parse_term("K F T")) == {"x": F, "y": T}


def test_positions_plumbing():
    t = parse_term("K x y")
    assert subterm_at(t, (0, 1)) == x
    assert replace_at(t, (1,), F) == parse_term("K x F")
    assert apply_subst({"x": F}, parse_term("K x x")) == parse_term("K F F")
    with pytest.raises(InvalidPosition):
        subterm_at(t, (1, 0))


def test_size_and_labels():
    t = parse_lterm("K1 a (K a)")
    assert t.size == 7
    assert t.nlab == 1
    assert F1.erased() is F


# property tests

atoms = st.sampled_from([C, T, F, K, S, x, y, z])
terms = st.recursive(atoms, lambda kids: st.builds(App, kids, kids), max_leaves=12)
latoms = st.sampled_from([C, T, F, K, S, C1, T1, F1, K1, Sv(1, 1), Sv(2, 1, 1), x, y])
lterms = st.recursive(
    latoms,
    lambda kids: st.one_of(
        st.builds(App, kids, kids),
        st.lists(kids, min_size=2, max_size=3).map(Tup),
    ),
    max_leaves=10,
)


@given(terms)
def test_roundtrip(t):
    assert parse_term(format_term(t)) == t


@given(lterms)
def test_roundtrip_labelled(t):
    assert parse_lterm(format_lterm(t)) == t


@given(terms, st.data())
def test_replace_own_subterm(t, data):
    pos, sub = data.draw(st.sampled_from(list(positions(t))))
    assert subterm_at(t, pos) is sub or subterm_at(t, pos) == sub
    assert replace_at(t, pos, sub) == t
    assert subterm_at(replace_at(t, pos, F), pos) == F


@given(terms, terms, terms)
def test_match_after_subst(p, s1, s2):
    sigma = {"x": s1, "y": s2}
    got = match_pattern(p, apply_subst(sigma, p))
    assert got is not None
    for name in ("x", "y"):
        if name in got:
            assert got[name] == sigma[name]
