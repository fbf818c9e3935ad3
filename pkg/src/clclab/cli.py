"""Command line front end: ``clclab VERB [options]``.

Exit codes: 0 success, 1 hard failure (or a negative answer), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import systems
from .harness import (
    SUITES,
    GenConfig,
    graph_to_dot,
    reduction_graph,
    run_suite,
    s_graph_to_dot,
    trace_to_json,
)
from .labelled import classify, is_standard, is_strongly_standard
from .simulation import extract_reduction_to_F, simulate_contraction, simulate_expansion
from .syntax import TermSyntaxError, parse_lterm, parse_term
from .systems import ConditionUnknown, Fuel, RewriteError, Step, SystemId, Trace, Verdict


class UsageError(Exception):
    pass


def _fuel(args) -> Fuel:
    return Fuel(args.fuel_steps, args.fuel_size, args.fuel_level)


def _system(args) -> SystemId:
    return SystemId(args.system.upper().replace("+", "PLUS"))


def _emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(payload))
    else:
        print(text)


def _emit_trace(args, trace, header: dict):
    if args.json:
        rows = trace_to_json(trace)
        rows[0].update(header)
        for r in rows:
            print(json.dumps(r))
    else:
        print(trace.start)
        for st, term in zip(trace.steps, trace.terms):
            d = st.as_dict()
            tag = d.get("kind", d["sys"])
            print(f"  {d['dir']}{tag} rule {d['rule']} at {d['pos']}: {term}")


def _parse_conversion(text: str) -> Trace:
    """A conversion as JSON lines (``trace_to_json`` format) or a file of them."""
    rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not rows or "start" not in rows[0]:
        raise UsageError("conversion must start with a {\"start\": TERM} line")
    tr = Trace(parse_term(rows[0]["start"]))
    for r in rows[1:]:
        st = Step(SystemId(r["sys"]), int(r["rule"]), tuple(r["pos"]), int(r.get("level", 0)), r.get("dir", "+"))
        tr.append(st, parse_term(r["term"]))
    return tr


def _read(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    return arg


# ---------------------------------------------------------------------------


def cmd_reduce(args) -> int:
    fuel = _fuel(args)
    sys_id = _system(args)
    t = parse_term(_read(args.term))
    if args.pos is None:
        steps, complete = systems.one_step_reducts(sys_id, t, fuel)
        rows = [{"rule": s.rule, "pos": list(s.pos), "level": s.level, "term": str(u)} for s, u in steps]
        _emit(args, {"term": str(t), "reducts": rows, "complete": complete},
              "\n".join(f"rule {r['rule']} at {r['pos']}: {r['term']}" for r in rows) or "(no redex)")
        return 0
    pos = tuple(int(x) for x in args.pos.split(",") if x != "")
    out, st = systems.contract_step(sys_id, t, pos, args.rule, fuel)
    tr = Trace(t)
    tr.append(st, out)
    _emit_trace(args, tr, {"sys": str(sys_id)})
    return 0


def cmd_normalize(args) -> int:
    fuel = _fuel(args)
    sys_id = _system(args)
    res = systems.normalize(sys_id, parse_term(_read(args.term)), fuel)
    _emit_trace(args, res.trace, {"sys": str(sys_id), "complete": res.complete})
    if not args.json:
        print(f"normal form: {res.term} ({'complete' if res.complete else 'incomplete'})")
    return 0


def cmd_join(args) -> int:
    fuel = _fuel(args)
    sys_id = _system(args)
    a, b = parse_term(args.a), parse_term(args.b)
    found = systems.joinable(sys_id, a, b, fuel)
    if found is None:
        _emit(args, {"joined": False}, "no common reduct found within the fuel")
        return 1
    common, ta, tb = found
    if args.json:
        print(json.dumps({"joined": True, "common": str(common), "left": trace_to_json(ta), "right": trace_to_json(tb)}))
    else:
        print(f"common reduct: {common}")
        _emit_trace(args, ta, {})
        _emit_trace(args, tb, {})
    return 0


def cmd_eq(args) -> int:
    fuel = _fuel(args)
    sys_id = _system(args)
    res = systems.eq(sys_id, parse_term(args.a), parse_term(args.b), fuel)
    payload = {"verdict": res.verdict.value, "reason": res.reason, "theorem_dependent": res.theorem_dependent}
    if res.witness is not None:
        payload["witness"] = trace_to_json(res.witness)
    _emit(args, payload, f"{res.verdict.value} ({res.reason})")
    return 0 if res.verdict is Verdict.YES else 1


def cmd_label_simulate(args) -> int:
    fuel = _fuel(args)
    t, q = parse_lterm(args.lterm), parse_term(args.term)
    pos = tuple(int(x) for x in args.pos.split(",") if x != "")
    if args.expand:
        q_prime = parse_term(args.expand)
        out, tr = simulate_expansion(t, q, q_prime, (pos, args.rule), fuel)
    else:
        out, tr = simulate_contraction(t, q, (pos, args.rule), fuel)
    _emit_trace(args, tr, {"result": str(out)})
    return 0


def cmd_extract(args) -> int:
    fuel = _fuel(args)
    text = _read(args.conversion)
    try:
        with open(text) as fh:
            text = fh.read()
    except (OSError, ValueError):
        pass
    conv = _parse_conversion(text)
    red = extract_reduction_to_F(conv, fuel)
    _emit_trace(args, red, {"sys": "CLC"})
    return 0


def cmd_check_standard(args) -> int:
    fuel = _fuel(args)
    t = parse_lterm(_read(args.lterm))
    std = is_standard(t, fuel)
    strong = is_strongly_standard(t, fuel) if std else False
    payload = {"term": str(t), "kind": classify(t).value, "standard": std, "strongly_standard": strong}
    _emit(args, payload, f"{t}: {classify(t).value}, standard={std}, strongly standard={strong}")
    return 0 if std else 1


def cmd_suite(args) -> int:
    cfg = GenConfig(seed=args.seed, size_bound=args.size_bound)
    rep = run_suite(args.name, cfg, _fuel(args), cases=args.cases, workers=args.workers)
    _emit(args, rep.as_dict(), rep.summary())
    return 1 if rep.hard_fail() else 0


def cmd_graph(args) -> int:
    fuel = _fuel(args)
    text = _read(args.term)
    try:
        t = parse_term(text)
        labelled = False
    except TermSyntaxError:
        t = parse_lterm(text)
        labelled = True
    if labelled:
        print(s_graph_to_dot(t, fuel))
    else:
        nodes, edges, _ = reduction_graph(_system(args), t, fuel, args.max_nodes)
        print(graph_to_dot(nodes, edges))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", default="CLC", help="CLC0, CLC, CLCPLUS or R (default CLC)")
    common.add_argument("--fuel-steps", type=int, default=10_000)
    common.add_argument("--fuel-size", type=int, default=60)
    common.add_argument("--fuel-level", type=int, default=8)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="JSON output (JSON lines for traces)")

    p = argparse.ArgumentParser(prog="clclab", description="Conditional combinatory logic workbench.")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("reduce", parents=[common], help="one-step reducts, or contract a given redex")
    s.add_argument("term")
    s.add_argument("--pos", help="comma-separated position; omit to list all redexes")
    s.add_argument("--rule", type=int, default=1)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("normalize", parents=[common], help="leftmost-outermost normalization")
    s.add_argument("term")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("join", parents=[common], help="search for a common reduct")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_join)

    s = sub.add_parser("eq", parents=[common], help="bounded equality oracle")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_eq)

    s = sub.add_parser("label-simulate", parents=[common], help="simulate a CLC0 step on a labelling")
    s.add_argument("lterm")
    s.add_argument("term")
    s.add_argument("--pos", default="")
    s.add_argument("--rule", type=int, required=True)
    s.add_argument("--expand", metavar="Q_PRIME", help="simulate the expansion from this term instead")
    s.set_defaults(func=cmd_label_simulate)

    s = sub.add_parser("extract-to-f", parents=[common], help="turn a CLC0 conversion to F into a CLC reduction")
    s.add_argument("conversion", help="JSON-lines conversion, a file name, or - for stdin")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("check-standard", parents=[common], help="standardness of a labelled term")
    s.add_argument("lterm")
    s.set_defaults(func=cmd_check_standard)

    s = sub.add_parser("suite", parents=[common], help="run a property suite")
    s.add_argument("name", choices=sorted(SUITES))
    s.add_argument("--cases", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--size-bound", type=int, default=5)
    s.set_defaults(func=cmd_suite)

    s = sub.add_parser("graph", parents=[common], help="DOT reduction graph (s-reducts for labelled terms)")
    s.add_argument("term")
    s.add_argument("--max-nodes", type=int, default=200)
    s.set_defaults(func=cmd_graph)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (TermSyntaxError, UsageError, ValueError, KeyError) as exc:
        print(f"clclab: {exc}", file=sys.stderr)
        return 2
    except ConditionUnknown as exc:
        print(f"clclab: fuel exhausted: {exc}", file=sys.stderr)
        return 1
    except RewriteError as exc:
        print(f"clclab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
