"""First-order terms over the combinators C, T, F, K, S and their labelled variants.

One node family serves both unlabelled terms and labelled terms.  An
unlabelled term (an *i-term*) is simply a term in which no labelled constant
and no tuple occurs; ``t.plain`` tells the two apart in O(1).

Nodes are immutable.  Each node caches its size, its number of labelled
constants and its hash, so terms can be used freely as dictionary keys.
"""

from __future__ import annotations

from typing import Iterator, Optional

Position = tuple  # tuple[int, ...]; 0 = function / first element, 1 = argument

PLAIN_CONSTANTS = ("C", "T", "F", "K", "S")
LABELLED_NAMES = ("C1", "C2", "T1", "F1", "K1", "S")


class InvalidPosition(ValueError):
    pass


class Term:
    __slots__ = ("size", "nlab", "plain", "_hash")

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return self._hash

    def __repr__(self):
        from .syntax import format_lterm

        return f"<{type(self).__name__} {format_lterm(self)}>"

    def __str__(self):
        from .syntax import format_lterm

        return format_lterm(self)

    def __call__(self, *args: "Term") -> "Term":
        return app(self, *args)


class Var(Term):
    __slots__ = ("name",)
    _table: dict = {}

    def __new__(cls, name: str):
        hit = cls._table.get(name)
        if hit is not None:
            return hit
        self = object.__new__(cls)
        self.name = name
        self.size = 1
        self.nlab = 0
        self.plain = True
        self._hash = hash(("v", name))
        cls._table[name] = self
        return self

    def __reduce__(self):
        return (Var, (self.name,))


class Const(Term):
    __slots__ = ("name",)
    _table: dict = {}

    def __new__(cls, name: str):
        hit = cls._table.get(name)
        if hit is not None:
            return hit
        if name not in PLAIN_CONSTANTS:
            raise ValueError(f"unknown constant {name!r}")
        self = object.__new__(cls)
        self.name = name
        self.size = 1
        self.nlab = 0
        self.plain = True
        self._hash = hash(("c", name))
        cls._table[name] = self
        return self

    def __reduce__(self):
        return (Const, (self.name,))


class LConst(Term):
    """A labelled constant: C1, C2, T1, F1, K1 or S^{n0,...,nk}."""

    __slots__ = ("name", "vec")
    _table: dict = {}

    def __new__(cls, name: str, vec: tuple = ()):
        key = (name, tuple(vec))
        hit = cls._table.get(key)
        if hit is not None:
            return hit
        if name not in LABELLED_NAMES:
            raise ValueError(f"unknown labelled constant {name!r}")
        vec = tuple(int(n) for n in vec)
        if name == "S":
            if len(vec) < 2 or any(n < 1 for n in vec):
                raise ValueError("S label needs k >= 1 and every n_i >= 1")
        elif vec:
            raise ValueError(f"{name} takes no label vector")
        self = object.__new__(cls)
        self.name = name
        self.vec = vec
        self.size = 1
        self.nlab = 1
        self.plain = False
        self._hash = hash(("l", name, vec))
        cls._table[key] = self
        return self

    @property
    def erased(self) -> Const:
        return Const(self.name[0])

    def __reduce__(self):
        return (LConst, (self.name, self.vec))


class App(Term):
    __slots__ = ("left", "right")

    def __init__(self, left: Term, right: Term):
        self.left = left
        self.right = right
        self.size = 1 + left.size + right.size
        self.nlab = left.nlab + right.nlab
        self.plain = left.plain and right.plain
        self._hash = hash((left._hash, right._hash, 7))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is App
            and self._hash == other._hash
            and self.size == other.size
            and self.left == other.left
            and self.right == other.right
        )

    __hash__ = Term.__hash__

    def __reduce__(self):
        return (App, (self.left, self.right))


class Tup(Term):
    """A tuple <t1,...,tn> with n >= 2.  Use :func:`tup` to get the <t> == t convention."""

    __slots__ = ("items",)

    def __init__(self, items):
        items = tuple(items)
        if len(items) < 2:
            raise ValueError("tuples have at least two elements")
        self.items = items
        self.size = 1 + sum(x.size for x in items)
        self.nlab = sum(x.nlab for x in items)
        self.plain = False
        self._hash = hash((tuple(x._hash for x in items), 11))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is Tup
            and self._hash == other._hash
            and len(self.items) == len(other.items)
            and all(a == b for a, b in zip(self.items, other.items))
        )

    __hash__ = Term.__hash__

    def __reduce__(self):
        return (Tup, (self.items,))


C, T, F, K, S = (Const(n) for n in PLAIN_CONSTANTS)
C1, C2, T1, F1, K1 = (LConst(n) for n in ("C1", "C2", "T1", "F1", "K1"))


def Sv(*vec: int) -> LConst:
    return LConst("S", vec)


def var(name: str) -> Var:
    return Var(name)


def app(head: Term, *args: Term) -> Term:
    t = head
    for a in args:
        t = App(t, a)
    return t


def tup(items) -> Term:
    items = tuple(items)
    if not items:
        raise ValueError("empty grouping")
    return items[0] if len(items) == 1 else Tup(items)


def spine(t: Term) -> tuple[Term, list]:
    """Split ``h a1 ... an`` into ``(h, [a1, ..., an])``."""
    args = []
    while type(t) is App:
        args.append(t.right)
        t = t.left
    args.reverse()
    return t, args


def children(t: Term) -> tuple:
    if type(t) is App:
        return (t.left, t.right)
    if type(t) is Tup:
        return t.items
    return ()


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        kids = children(t)
        if not 0 <= i < len(kids):
            raise InvalidPosition(f"position {list(p)} does not address a node")
        t = kids[i]
    return t


def replace_at(t: Term, p: Position, s: Term) -> Term:
    if not p:
        return s
    i, rest = p[0], p[1:]
    if type(t) is App:
        if i == 0:
            return App(replace_at(t.left, rest, s), t.right)
        if i == 1:
            return App(t.left, replace_at(t.right, rest, s))
    elif type(t) is Tup and 0 <= i < len(t.items):
        items = list(t.items)
        items[i] = replace_at(items[i], rest, s)
        return Tup(items)
    raise InvalidPosition(f"position {list(p)} does not address a node")


def positions(t: Term, prefix: Position = ()) -> Iterator[tuple[Position, Term]]:
    """Pre-order (outermost first, then left to right) walk of all occurrences."""
    stack = [(prefix, t)]
    while stack:
        p, s = stack.pop()
        yield p, s
        kids = children(s)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((p + (i,), kids[i]))


def inside_tuple(t: Term, p: Position) -> bool:
    """True iff some proper prefix of ``p`` addresses a tuple node of ``t``."""
    for i in p:
        if type(t) is Tup:
            return True
        t = children(t)[i]
    return False


def variables(t: Term) -> set:
    return {s.name for _, s in positions(t) if type(s) is Var}


def apply_subst(sigma: dict, t: Term) -> Term:
    if type(t) is Var:
        return sigma.get(t.name, t)
    if type(t) is App:
        left = apply_subst(sigma, t.left)
        right = apply_subst(sigma, t.right)
        if left is t.left and right is t.right:
            return t
        return App(left, right)
    if type(t) is Tup:
        return Tup(apply_subst(sigma, x) for x in t.items)
    return t


def match_pattern(pattern: Term, subject: Term, sigma: Optional[dict] = None) -> Optional[dict]:
    """Syntactic matching; repeated pattern variables must bind identical subterms.

    Variables occurring in ``subject`` are inert: they only match themselves
    or a pattern variable.
    """
    sigma = {} if sigma is None else dict(sigma)
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        tp = type(p)
        if tp is Var:
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = s
            elif bound != s:
                return None
        elif tp is App:
            if type(s) is not App:
                return None
            stack.append((p.right, s.right))
            stack.append((p.left, s.left))
        elif tp is Tup:
            if type(s) is not Tup or len(s.items) != len(p.items):
                return None
            stack.extend(zip(p.items, s.items))
        elif p is not s:
            return None
    return sigma
