import json

import pytest

from clclab.harness import (
    SUITES,
    GenConfig,
    SuiteReport,
    a_expansions,
    enumerate_lterms,
    enumerate_terms,
    gen_convertible_to_F,
    gen_lterm,
    gen_term,
    graph_to_dot,
    postponement_composites,
    reduction_graph,
    run_suite,
    s_graph_to_dot,
    trace_to_json,
    trace_to_jsonl,
)
from clclab.labelled import is_standard
from clclab.syntax import parse_lterm as L, parse_term as P
from clclab.systems import SystemId, normalize
from clclab.terms import F, K, K1, T, Tup, Var


def test_gen_term_deterministic():
    cfg = GenConfig(seed=7)
    assert gen_term(cfg) == gen_term(cfg)
    assert gen_lterm(cfg) == gen_lterm(cfg)


def test_gen_convertible_examples():
    conv = gen_convertible_to_F(GenConfig(seed=1, max_expansions=0))
    assert conv.start == F and not conv.steps
    for seed in range(20):
        conv = gen_convertible_to_F(GenConfig(seed=seed, max_expansions=1))
        assert len(conv.steps) == 1 and conv.end == F and conv.replay()
        if conv.steps[0].rule == 4:
            assert conv.start.left.left == K and conv.start.left.right == F
    conv = gen_convertible_to_F(GenConfig(seed=3, max_expansions=2))
    assert len(conv.steps) == 2 and conv.replay()


def test_gen_convertible_size_bound():
    for seed in range(50):
        conv = gen_convertible_to_F(GenConfig(seed=seed, max_expansions=8, max_size=25))
        assert conv.replay() and conv.end == F
        assert max(t.size for t in [conv.start] + conv.terms) <= 25


def test_enumerate_terms_examples():
    assert list(enumerate_terms(1, (F, T))) == [F, T]
    got = [str(t) for t in enumerate_terms(3, (K, F))]
    for s in ["K F", "F K", "K K", "F F", "K F F"]:
        assert s in got
    assert sum(1 for t in enumerate_terms(2) if t.size == 3) == 25


def test_enumerate_terms_exhaustive_and_ordered():
    terms = list(enumerate_terms(6, measure="nodes"))
    assert len(terms) == len(set(terms)) == 280
    sizes = [t.size for t in terms]
    assert sizes == sorted(sizes)


def test_enumerate_lterms_no_nested_tuples():
    terms = list(enumerate_lterms(5))
    assert len(terms) == len(set(terms))
    for t in terms:
        if type(t) is Tup:
            assert not any(type(x) is Tup for x in t.items)


def test_postponement_composites_shards():
    alphabet = (K1, K, Var("a"))
    whole = list(postponement_composites(9, alphabet))
    parts = [c for k in range(3) for c in postponement_composites(9, alphabet, shard=k, shards=3)]
    assert len(whole) == len(parts) == 36
    assert {(t, u) for t, _, _, u in whole} == {(t, u) for t, _, _, u in parts}


def test_a_expansions_are_standard_for_strong_input():
    t = L("C1 T1 F1 a")
    outs = list(a_expansions(t))
    assert outs
    for tp, pos, kind in outs:
        assert is_standard(tp)


def test_suite_report_merge():
    a, b = SuiteReport("x"), SuiteReport("x")
    a.ok()
    b.fail(3, "bad", t=F)
    b.soft("fuel")
    m = a.merge(b)
    assert (m.passed, m.failed, m.unknown) == (1, 1, 1)
    assert m.hard_fail()
    assert json.loads(json.dumps(m.as_dict()))["failures"][0]["case"] == 3


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suites_smoke(name):
    rep = run_suite(name, GenConfig(seed=42, size_bound=3), cases=40)
    assert not rep.hard_fail(), rep.failures[:3]


def test_run_suite_deterministic_across_workers():
    cfg = GenConfig(seed=5)
    one = run_suite("pipeline", cfg, cases=40, workers=1)
    two = run_suite("pipeline", cfg, cases=40, workers=2)
    assert one.as_dict() == two.as_dict()


def test_run_suite_unknown_name():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_trace_json():
    res = normalize(SystemId.CLC, P("S K K F"))
    rows = trace_to_json(res.trace)
    assert rows[0] == {"start": "S K K F"}
    assert rows[1]["dir"] == "+" and rows[1]["sys"] == "CLC" and rows[1]["pos"] == []
    assert {"rule", "level", "term"} <= rows[1].keys()
    lines = trace_to_jsonl(res.trace).splitlines()
    assert [json.loads(x) for x in lines] == rows


def test_dot_export():
    nodes, edges, _ = reduction_graph(SystemId.CLC, P("K (K a b) c"))
    dot = graph_to_dot(nodes, edges)
    assert dot.startswith("digraph") and dot.count("->") == len(edges) == 4
    assert "->" in s_graph_to_dot(L("C1 T1 F1 q"))
