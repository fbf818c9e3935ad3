"""Labelled terms: classification, erasure, refinement and standardness."""

from __future__ import annotations

import enum

from .systems import ConditionUnknown, DEFAULT_FUEL, Fuel
from .terms import F1, App, LConst, T1, Term, Tup, spine


class Kind(enum.Enum):
    ITERM = "i-term"
    STERM = "s-term"
    TUPLE = "tuple"
    OTHER = "other"


def classify(t: Term) -> Kind:
    if t.plain:
        return Kind.ITERM
    if type(t) is Tup:
        return Kind.TUPLE
    if type(spine(t)[0]) is LConst:
        return Kind.STERM
    return Kind.OTHER


def is_sterm(t: Term) -> bool:
    return not t.plain and type(t) is not Tup and type(spine(t)[0]) is LConst


_erase_cache: dict = {}


def leftmost_erase(t: Term) -> Term:
    """Drop every label and keep the first element of every tuple."""
    if t.plain:
        return t
    hit = _erase_cache.get(t)
    if hit is not None:
        return hit
    tt = type(t)
    if tt is LConst:
        out = t.erased
    elif tt is Tup:
        out = leftmost_erase(t.items[0])
    else:
        out = App(leftmost_erase(t.left), leftmost_erase(t.right))
    if len(_erase_cache) > 200_000:
        _erase_cache.clear()
    _erase_cache[t] = out
    return out


def refines(t: Term, q: Term) -> bool:
    """``t |> q``: every erasure of ``t`` is identical with ``q``.

    Structural: a tuple refines ``q`` iff each element does, so the
    exponentially many erasures are never listed.
    """
    if t.plain:
        return t == q
    tt = type(t)
    if tt is Tup:
        return all(refines(x, q) for x in t.items)
    if tt is LConst:
        return q is t.erased
    return type(q) is App and refines(t.left, q.left) and refines(t.right, q.right)


def erasures(t: Term) -> set:
    """All erasures, by enumeration.  Exponential; meant for cross-checking."""
    if t.plain:
        return {t}
    tt = type(t)
    if tt is LConst:
        return {t.erased}
    if tt is Tup:
        out = set()
        for x in t.items:
            out |= erasures(x)
        return out
    return {App(a, b) for a in erasures(t.left) for b in erasures(t.right)}


def subterms(t: Term) -> set:
    out = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if s in out:
            continue
        out.add(s)
        if type(s) is App:
            stack += (s.left, s.right)
        elif type(s) is Tup:
            stack += s.items
    return out


# ---------------------------------------------------------------------------
# standardness

_local_cache: dict = {}


def clear_caches():
    _local_cache.clear()
    _erase_cache.clear()


def standard_violation(sub: Term, fuel: Fuel = DEFAULT_FUEL):
    """Which standardness condition (1-5) the occurrence ``sub`` itself breaks, or None.

    Raises ConditionUnknown when an s-reduct enumeration is incomplete.
    """
    from .clcs import has_s_redex, s_reducts_all

    if sub.plain:
        return None
    key = (sub, fuel)
    if key in _local_cache:
        return _local_cache[key]
    kind = classify(sub)
    bad = None
    if kind is Kind.OTHER:
        bad = 1
    elif kind is Kind.TUPLE:
        if any(type(x) is Tup for x in sub.items):
            bad = 5
    else:
        head, args = spine(sub)
        if head.name == "C1" and len(args) == 3:
            t0 = args[0]
            if t0 is not T1 and t0 is not F1 and not has_s_redex(t0, fuel):
                bad = 2
        elif head.name == "S" and len(args) == 3:
            k = len(head.vec) - 1
            t1, t2 = args[1], args[2]
            if type(t2) is not Tup or len(t2.items) != sum(head.vec):
                bad = 3
            elif k > 1 and (type(t1) is not Tup or len(t1.items) != k):
                bad = 3
        if bad is None:
            g = s_reducts_all(sub, fuel)
            if not g.complete:
                raise ConditionUnknown(f"s-reducts of {sub} not fully enumerated")
            if not all(is_sterm(n) for n in g.nodes):
                bad = 4
    if len(_local_cache) > 200_000:
        _local_cache.clear()
    _local_cache[key] = bad
    return bad


def is_standard(t: Term, fuel: Fuel = DEFAULT_FUEL) -> bool:
    if t.plain:
        return True
    return all(standard_violation(s, fuel) is None for s in subterms(t))


def is_strongly_standard(t: Term, fuel: Fuel = DEFAULT_FUEL) -> bool:
    """Every s-reduct of ``t`` (including ``t``) is standard."""
    from .clcs import s_reducts_all

    if t.plain:
        return True
    g = s_reducts_all(t, fuel)
    if not g.complete:
        raise ConditionUnknown(f"s-reducts of {t} not fully enumerated")
    return all(is_standard(n, fuel) for n in g.nodes)
