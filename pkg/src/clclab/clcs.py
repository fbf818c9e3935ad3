"""Significant (s), insignificant (i) and auxiliary (a) steps on labelled terms.

s-rules (ids used in traces)::

    1  C1 T1 x y -> x             6  C2 T1 x y -> x
    2  C1 F1 x y -> y             7  C2 F1 x y -> y
    3  C2 z x y  -> x  <= |x| = |y|
    4  C2 T x y  -> x             8  K1 x y -> x
    5  C2 F x y  -> y             9  S^{n0..nk} x <y1..yk> <z0.., .., zk..>
                                        -> x <z0..> <y1 <z1..>, .., yk <zk..>>

where |.| is leftmost erasure and = is equality in CLC.  The S rule also
requires all |y_i| equal and all |z_ij| equal.  i-steps are CLC steps whose
redex is an unlabelled subterm.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from . import systems
from .labelled import is_sterm, leftmost_erase
from .systems import (
    ConditionUnknown,
    DEFAULT_FUEL,
    Fuel,
    NotARedex,
    ReplayError,
    RewriteError,
    SystemId,
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
    positions,
    replace_at,
    spine,
    subterm_at,
    tup,
)

S_RULE_TEXT = {
    1: "C1 T1 x y -> x",
    2: "C1 F1 x y -> y",
    3: "C2 z x y -> x <= |x| = |y|",
    4: "C2 T x y -> x",
    5: "C2 F x y -> y",
    6: "C2 T1 x y -> x",
    7: "C2 F1 x y -> y",
    8: "K1 x y -> x",
    9: "S^{n} x <y..> <z..> -> x <z0..> <y1 <z1..>, ..>",
}

# s-rule -> CLC rule obtained by erasing labels
ERASED_RULE = {1: 1, 2: 2, 3: 3, 4: 1, 5: 2, 6: 1, 7: 2, 8: 4, 9: 5}


class LStep(NamedTuple):
    kind: str  # 's', 'i' or 'a'
    pos: Position
    rule: object  # s-rule id, CLC rule id, or a-shape name
    dir: str = "+"

    def as_dict(self) -> dict:
        sys = {"s": "CLCs", "i": "CLC", "a": "a"}[self.kind]
        return {"kind": self.kind, "dir": self.dir, "sys": sys, "rule": self.rule, "pos": list(self.pos), "level": 0}


@dataclass
class LTrace:
    start: Term
    steps: list = field(default_factory=list)
    terms: list = field(default_factory=list)

    @property
    def end(self) -> Term:
        return self.terms[-1] if self.terms else self.start

    def __len__(self):
        return len(self.steps)

    def append(self, step: LStep, term: Term):
        self.steps.append(step)
        self.terms.append(term)

    def extend(self, other: "LTrace"):
        if other.start != self.end:
            raise ValueError("traces do not compose")
        self.steps.extend(other.steps)
        self.terms.extend(other.terms)

    def shifted(self, prefix: Position, context: Term) -> "LTrace":
        out = LTrace(replace_at(context, prefix, self.start))
        for s, t in zip(self.steps, self.terms):
            out.append(s._replace(pos=tuple(prefix) + tuple(s.pos)), replace_at(context, prefix, t))
        return out

    def replay(self, fuel: Fuel = DEFAULT_FUEL) -> bool:
        cur = self.start
        for i, (s, nxt) in enumerate(zip(self.steps, self.terms)):
            src, dst = (cur, nxt) if s.dir == "+" else (nxt, cur)
            try:
                if s.kind == "s":
                    ok = s_contract(src, s.pos, s.rule, fuel) == dst
                elif s.kind == "i":
                    ok = i_contract(src, s.pos, s.rule, fuel) == dst
                else:
                    ok = (
                        replace_at(src, s.pos, subterm_at(dst, s.pos)) == dst
                        and a_root_check(subterm_at(src, s.pos), subterm_at(dst, s.pos), fuel)
                    )
            except RewriteError as exc:
                raise ReplayError(f"step {i} does not replay: {exc}") from exc
            if not ok:
                raise ReplayError(f"step {i} ({s.kind} {s.rule} at {list(s.pos)}) does not replay")
            cur = nxt
        return True


# ---------------------------------------------------------------------------
# conditions


def erasure_eq(x: Term, y: Term, fuel: Fuel) -> Verdict:
    ex, ey = leftmost_erase(x), leftmost_erase(y)
    if ex == ey:
        return Verdict.YES
    return systems.cond_eq(SystemId.CLC, ex, ey, fuel)


def _all_equal(terms, fuel: Fuel) -> Verdict:
    out = Verdict.YES
    for t in terms[1:]:
        v = erasure_eq(terms[0], t, fuel)
        if v is Verdict.NO:
            return v
        if v is Verdict.UNKNOWN:
            out = v
    return out


class SParts(NamedTuple):
    head: Term
    ys: tuple
    groups: tuple  # groups[i] = z_i1 .. z_in_i


def split_s(head: LConst, args) -> Optional[SParts]:
    """Match ``S^{n} x Y Z`` against the S-rule pattern."""
    vec = head.vec
    k = len(vec) - 1
    x, ys, zs = args
    if k == 1:
        ys = (ys,)
    elif type(ys) is Tup and len(ys.items) == k:
        ys = ys.items
    else:
        return None
    if type(zs) is not Tup or len(zs.items) != sum(vec):
        return None
    groups, at = [], 0
    for n in vec:
        groups.append(zs.items[at : at + n])
        at += n
    return SParts(x, tuple(ys), tuple(groups))


def s_rhs(parts: SParts) -> Term:
    x, ys, groups = parts
    return App(App(x, tup(groups[0])), tup(App(y, tup(g)) for y, g in zip(ys, groups[1:])))


def _root_rules(t: Term, fuel: Fuel):
    """(s-rule id, verdict) for every s-rule whose pattern matches ``t`` at the root."""
    if type(t) is not App or t.nlab == 0:
        return ()
    head, args = spine(t)
    if type(head) is not LConst:
        return ()
    name, n = head.name, len(args)
    out = []
    if name == "C1" and n == 3:
        if args[0] is T1:
            out.append((1, Verdict.YES))
        elif args[0] is F1:
            out.append((2, Verdict.YES))
    elif name == "C2" and n == 3:
        out.append((3, erasure_eq(args[1], args[2], fuel)))
        z = args[0]
        for rid, const in ((4, T), (5, F), (6, T1), (7, F1)):
            if z is const:
                out.append((rid, Verdict.YES))
    elif name == "K1" and n == 2:
        out.append((8, Verdict.YES))
    elif name == "S" and n == 3:
        parts = split_s(head, args)
        if parts is not None:
            v = _all_equal(parts.ys, fuel)
            if v is not Verdict.NO:
                zs = [z for g in parts.groups for z in g]
                w = _all_equal(zs, fuel)
                v = w if w is not Verdict.YES else v
            out.append((9, v))
    return out


def _root_contractum(t: Term, rule: int) -> Term:
    head, args = spine(t)
    if rule in (1, 3, 4, 6, 8):
        return args[-2] if rule == 8 else args[1]
    if rule in (2, 5, 7):
        return args[2]
    return s_rhs(split_s(head, args))


# ---------------------------------------------------------------------------
# s-steps


class SScan(NamedTuple):
    redexes: list  # (pos, rule)
    unknown: list  # (pos, rule)


_scan_cache: dict = {}
_graph_cache: dict = {}


def clear_caches():
    _scan_cache.clear()
    _graph_cache.clear()


def scan_s(t: Term, fuel: Fuel = DEFAULT_FUEL) -> SScan:
    key = (t, fuel)
    hit = _scan_cache.get(key)
    if hit is not None:
        return hit
    found, unknown = [], []
    if t.nlab:
        for pos, sub in positions(t):
            if sub.nlab == 0:
                continue
            for rid, v in _root_rules(sub, fuel):
                if v is Verdict.YES:
                    found.append((pos, rid))
                elif v is Verdict.UNKNOWN:
                    unknown.append((pos, rid))
    if len(_scan_cache) > 300_000:
        _scan_cache.clear()
    _scan_cache[key] = out = SScan(found, unknown)
    return out


def s_redexes(t: Term, fuel: Fuel = DEFAULT_FUEL) -> list:
    return scan_s(t, fuel).redexes


def has_s_redex(t: Term, fuel: Fuel = DEFAULT_FUEL) -> bool:
    sc = scan_s(t, fuel)
    if sc.redexes:
        return True
    if sc.unknown:
        raise ConditionUnknown(f"s-redex status of {t} undecided")
    return False


def s_contract(t: Term, pos: Position, rule: int, fuel: Fuel = DEFAULT_FUEL) -> Term:
    pos = tuple(pos)
    sub = subterm_at(t, pos)
    for rid, v in _root_rules(sub, fuel):
        if rid == rule:
            if v is Verdict.YES:
                return replace_at(t, pos, _root_contractum(sub, rule))
            if v is Verdict.UNKNOWN:
                raise ConditionUnknown(f"condition of s-rule {rule} undecided at {list(pos)}")
            break
    raise NotARedex(f"no s-redex for rule {rule} at {list(pos)}")


def s_layout(redex: Term, rule: int):
    """Pattern-variable occurrences of an s-redex: list of (lhs path, rhs path or None)."""
    if rule in (1, 4, 6):
        return [((0, 1), ()), ((1,), None)]
    if rule in (2, 5, 7):
        return [((0, 1), None), ((1,), ())]
    if rule == 3:
        return [((0, 0, 1), None), ((0, 1), ()), ((1,), None)]
    if rule == 8:
        return [((0, 1), ()), ((1,), None)]
    head, args = spine(redex)
    parts = split_s(head, args)
    k = len(parts.ys)
    out = [((0, 0, 1), (0, 0))]
    n0 = len(parts.groups[0])
    flat = 0
    for j in range(n0):
        out.append(((1, flat), (0, 1) if n0 == 1 else (0, 1, j)))
        flat += 1
    for i in range(1, k + 1):
        elem = (1,) if k == 1 else (1, i - 1)
        out.append(((0, 1) if k == 1 else (0, 1, i - 1), elem + (0,)))
        ni = len(parts.groups[i])
        for j in range(ni):
            out.append(((1, flat), elem + ((1,) if ni == 1 else (1, j))))
            flat += 1
    return out


def residual(redex: Term, rule: int, rel: Position):
    """Where a position ``rel`` inside a contracted s-redex ends up.

    Returns ("moved", new relative position), ("erased", None) or
    ("overlap", None) when ``rel`` is not below a variable of the pattern.
    """
    for lhs, rhs in s_layout(redex, rule):
        if rel[: len(lhs)] == lhs:
            if rhs is None:
                return "erased", None
            return "moved", rhs + rel[len(lhs) :]
    return "overlap", None


# ---------------------------------------------------------------------------
# i-steps


def scan_i(t: Term, fuel: Fuel = DEFAULT_FUEL):
    """CLC redexes inside unlabelled subterms: (redexes [(pos, rule)], unknown)."""
    found, unknown = [], []

    def walk(s: Term, prefix: Position):
        if s.plain:
            sc = systems.scan_redexes(SystemId.CLC, s, fuel)
            found.extend((prefix + p, r) for p, r, _ in sc.redexes)
            unknown.extend((prefix + p, r) for p, r in sc.unknown)
            return
        for i, c in enumerate(children(s)):
            walk(c, prefix + (i,))

    walk(t, ())
    return found, unknown


def i_redexes(t: Term, fuel: Fuel = DEFAULT_FUEL) -> list:
    return scan_i(t, fuel)[0]


def i_contract(t: Term, pos: Position, rule: int, fuel: Fuel = DEFAULT_FUEL) -> Term:
    pos = tuple(pos)
    sub = subterm_at(t, pos)
    if not sub.plain:
        raise NotARedex(f"subterm at {list(pos)} is not an i-term")
    return replace_at(t, pos, systems.contract(SystemId.CLC, sub, (), rule, fuel))


# ---------------------------------------------------------------------------
# exhaustive s-reduct graphs


@dataclass
class ReductGraph:
    root: Term
    edges: dict  # term -> list of (LStep, target)
    unknown: list  # (term, pos, rule) with an undecided condition
    truncated: bool = False

    @property
    def nodes(self):
        return self.edges.keys()

    @property
    def complete(self) -> bool:
        return not self.unknown and not self.truncated

    def sinks(self) -> set:
        return {t for t, out in self.edges.items() if not out}

    def edge_count(self) -> int:
        return sum(len(v) for v in self.edges.values())

    def path(self, target: Term) -> Optional[LTrace]:
        """Shortest s-reduction from the root to ``target``."""
        if target not in self.edges:
            return None
        parent = {self.root: None}
        queue = deque([self.root])
        while queue:
            node = queue.popleft()
            if node == target:
                break
            for step, nxt in self.edges[node]:
                if nxt not in parent:
                    parent[nxt] = (node, step)
                    queue.append(nxt)
        if target not in parent:
            return None
        chain = []
        node = target
        while parent[node] is not None:
            prev, step = parent[node]
            chain.append((step, node))
            node = prev
        tr = LTrace(self.root)
        for step, term in reversed(chain):
            tr.append(step, term)
        return tr


def s_reducts_all(t: Term, fuel: Fuel = DEFAULT_FUEL) -> ReductGraph:
    """Every s-reduct of ``t`` with the s-steps between them.

    Finite because each s-step removes a labelled constant; at most
    ``fuel.max_steps`` nodes are expanded before the graph is marked truncated.
    """
    key = (t, fuel)
    hit = _graph_cache.get(key)
    if hit is not None:
        return hit
    edges, unknown = {}, []
    queue = deque([t])
    edges[t] = None
    truncated = False
    while queue:
        node = queue.popleft()
        if len(edges) > fuel.max_steps:
            truncated = True
            edges[node] = edges[node] or []
            continue
        sc = scan_s(node, fuel)
        unknown.extend((node, p, r) for p, r in sc.unknown)
        out = []
        for pos, rid in sc.redexes:
            nxt = replace_at(node, pos, _root_contractum(subterm_at(node, pos), rid))
            out.append((LStep("s", pos, rid), nxt))
            if nxt not in edges:
                edges[nxt] = None
                queue.append(nxt)
        edges[node] = out
    for k_, v in edges.items():
        if v is None:
            edges[k_] = []
    g = ReductGraph(t, edges, unknown, truncated)
    if len(_graph_cache) > 50_000:
        _graph_cache.clear()
    _graph_cache[key] = g
    return g


def s_normal_forms(t: Term, fuel: Fuel = DEFAULT_FUEL) -> set:
    return s_reducts_all(t, fuel).sinks()


def leadsto_F1(t: Term, fuel: Fuel = DEFAULT_FUEL) -> bool:
    """Strongly standard with F1 as its only s-normal form."""
    from .labelled import is_strongly_standard

    g = s_reducts_all(t, fuel)
    if not g.complete:
        raise ConditionUnknown(f"s-reducts of {t} not fully enumerated")
    return g.sinks() == {F1} and is_strongly_standard(t, fuel)


# ---------------------------------------------------------------------------
# a-steps


class AShape(NamedTuple):
    kind: str  # 'C1T1', 'C1F1', 'C2', 'K1' or 'S'
    q: Optional[Term] = None
    t1: Optional[Term] = None
    t2: Optional[Term] = None


class ShapeMismatch(RewriteError):
    pass


class ReachabilityFailed(RewriteError):
    pass


def s_regroup(t: Term):
    """Read ``t`` as ``t0 <r0..> <s1 <r1..>, .., sk <rk..>>`` and return the a-redex.

    Raises ShapeMismatch when ``t`` does not have that form.
    """
    if type(t) is not App or type(t.left) is not App:
        raise ShapeMismatch("S-form needs t0 tb tc")
    t0, tb, tc = t.left.left, t.left.right, t.right
    r0 = tb.items if type(tb) is Tup else (tb,)
    elems = tc.items if type(tc) is Tup else (tc,)
    us, groups = [], [tuple(r0)]
    for e in elems:
        if type(e) is not App:
            raise ShapeMismatch("S-form needs every second-group element to be an application")
        us.append(e.left)
        w = e.right
        groups.append(w.items if type(w) is Tup else (w,))
    vec = tuple(len(g) for g in groups)
    return App(App(App(LConst("S", vec), t0), tup(us)), Tup([z for g in groups for z in g]))


def a_root_check(rp: Term, r: Term, fuel: Fuel = DEFAULT_FUEL) -> bool:
    """``rp`` is an a-redex with a-contractum ``r`` (both at the root)."""
    if not is_sterm(r) or type(rp) is not App:
        return False
    head, args = spine(rp)
    if type(head) is not LConst:
        return False
    name, n = head.name, len(args)
    if name == "C1" and n == 3:
        if args[0] is T1:
            return args[1] == r and args[2].plain
        if args[0] is F1:
            return args[1].plain and args[2] == r
        return False
    if name == "K1" and n == 2:
        return args[0] == r and args[1].plain
    if name == "C2" and n == 3:
        if not args[0].plain:
            return False
        g = s_reducts_all(r, fuel)
        if args[1] in g.edges and args[2] in g.edges:
            return True
        if not g.complete:
            raise ConditionUnknown("s-reducts of the a-contractum not fully enumerated")
        return False
    if name == "S" and n == 3:
        parts = split_s(head, args)
        if parts is None:
            return False
        if any(type(x) is Tup for x in parts.ys) or any(type(z) is Tup for g in parts.groups for z in g):
            return False
        if s_rhs(parts) != r:
            return False
        v = _all_equal(parts.ys, fuel)
        if v is Verdict.YES:
            v = _all_equal([z for g in parts.groups for z in g], fuel)
        if v is Verdict.UNKNOWN:
            raise ConditionUnknown("erasure equality in S-form undecided")
        return v is Verdict.YES
    return False


def a_expand(t: Term, shape: AShape, fuel: Fuel = DEFAULT_FUEL) -> Term:
    """Build the a-redex ``t'`` with ``t' ->a t`` for the given shape."""
    from .terms import C1, C2, K1

    if not is_sterm(t):
        raise ShapeMismatch("an a-contractum must be an s-term")
    kind = shape.kind
    if kind in ("C1T1", "C1F1", "K1", "C2") and (shape.q is None or not shape.q.plain):
        raise ShapeMismatch(f"{kind} form needs an i-term q")
    if kind == "C1T1":
        out = App(App(App(C1, T1), t), shape.q)
    elif kind == "C1F1":
        out = App(App(App(C1, F1), shape.q), t)
    elif kind == "K1":
        out = App(App(K1, t), shape.q)
    elif kind == "C2":
        t1 = t if shape.t1 is None else shape.t1
        t2 = t if shape.t2 is None else shape.t2
        g = s_reducts_all(t, fuel)
        if t1 not in g.edges or t2 not in g.edges:
            if not g.complete:
                raise ConditionUnknown("s-reducts of t not fully enumerated")
            raise ReachabilityFailed("t does not s-reduce to both C2 arguments")
        out = App(App(App(C2, shape.q), t1), t2)
    elif kind == "S":
        out = s_regroup(t)
    else:
        raise ShapeMismatch(f"unknown a-shape {kind!r}")
    if not a_root_check(out, t, fuel):
        raise ShapeMismatch(f"{kind} side conditions do not hold")
    return out


def a_expand_at(t: Term, pos: Position, shape: AShape, fuel: Fuel = DEFAULT_FUEL) -> Term:
    return replace_at(t, pos, a_expand(subterm_at(t, pos), shape, fuel))


def find_a_step(tp: Term, t: Term, fuel: Fuel = DEFAULT_FUEL) -> Optional[Position]:
    """Position of an a-step ``tp ->a t``, or None."""
    if a_root_check(tp, t, fuel):
        return ()
    if type(tp) is App and type(t) is App:
        if tp.left == t.left:
            p = find_a_step(tp.right, t.right, fuel)
            return None if p is None else (1,) + p
        if tp.right == t.right:
            p = find_a_step(tp.left, t.left, fuel)
            return None if p is None else (0,) + p
        return None
    if type(tp) is Tup and type(t) is Tup and len(tp.items) == len(t.items):
        diff = [i for i, (a, b) in enumerate(zip(tp.items, t.items)) if a != b]
        if len(diff) == 1:
            p = find_a_step(tp.items[diff[0]], t.items[diff[0]], fuel)
            return None if p is None else (diff[0],) + p
    return None


def a_redex_check(tp: Term, t: Term, fuel: Fuel = DEFAULT_FUEL) -> bool:
    return find_a_step(tp, t, fuel) is not None
