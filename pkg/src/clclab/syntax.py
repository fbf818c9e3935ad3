"""Text syntax for terms and labelled terms.

Grammar (juxtaposition associates to the left)::

    term  ::= atom+
    atom  ::= VAR | CONST | LCONST | '(' term ')' | '<' term (',' term)* '>'
    VAR   ::= [a-z][A-Za-z0-9_']*
    CONST ::= C | T | F | K | S
    LCONST::= C1 | C2 | T1 | F1 | K1 | S^{n0,...,nk}

The Unicode spellings C₁ C₂ T₁ F₁ K₁ and the brackets ⟨ ⟩ are accepted on
input.  Output is always the ASCII form with single spaces and minimal
parentheses.
"""

from __future__ import annotations

import re

from .terms import App, Const, LConst, Term, Tup, Var, tup

_UNICODE = str.maketrans({"₁": "1", "₂": "2", "⟨": "<", "⟩": ">", "′": "'"})

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<slab>S\^\{\s*\d+(?:\s*,\s*\d+)+\s*\})
  | (?P<lab>C1|C2|T1|F1|K1)(?![A-Za-z0-9_])
  | (?P<const>[CTFKS])(?![A-Za-z0-9_^])
  | (?P<var>[a-z][A-Za-z0-9_']*)
  | (?P<punct>[()<>,])
    """,
    re.VERBOSE,
)


class TermSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


def _tokenize(text: str):
    src = text.translate(_UNICODE)
    # byte offsets refer to the caller's original text
    byte_at = [0]
    for ch in text:
        byte_at.append(byte_at[-1] + len(ch.encode("utf-8")))
    pos = 0
    out = []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise TermSyntaxError(f"unexpected character {src[pos]!r}", byte_at[pos])
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), byte_at[pos]))
        pos = m.end()
    out.append(("eof", "", byte_at[len(src)]))
    return out


class _Parser:
    def __init__(self, text: str, labelled: bool):
        self.toks = _tokenize(text)
        self.i = 0
        self.labelled = labelled

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, off = self.take()
        if text != value:
            raise TermSyntaxError(f"expected {value!r}, found {text or 'end of input'!r}", off)

    def starts_atom(self) -> bool:
        kind, text, _ = self.peek()
        return kind in ("var", "const", "lab", "slab") or text in ("(", "<")

    def term(self) -> Term:
        if not self.starts_atom():
            kind, text, off = self.peek()
            raise TermSyntaxError(f"expected a term, found {text or 'end of input'!r}", off)
        t = self.atom()
        while self.starts_atom():
            t = App(t, self.atom())
        return t

    def atom(self) -> Term:
        kind, text, off = self.take()
        if kind == "var":
            return Var(text)
        if kind == "const":
            return Const(text)
        if kind in ("lab", "slab"):
            if not self.labelled:
                raise TermSyntaxError(f"labelled constant {text!r} in an unlabelled term", off)
            if kind == "lab":
                return LConst(text)
            vec = tuple(int(n) for n in re.findall(r"\d+", text))
            try:
                return LConst("S", vec)
            except ValueError as exc:
                raise TermSyntaxError(str(exc), off) from None
        if text == "(":
            t = self.term()
            self.expect(")")
            return t
        if text == "<":
            if not self.labelled:
                raise TermSyntaxError("tuple in an unlabelled term", off)
            items = [self.term()]
            while self.peek()[1] == ",":
                self.take()
                items.append(self.term())
            self.expect(">")
            return tup(items)
        raise TermSyntaxError(f"unexpected {text or 'end of input'!r}", off)


def _parse(text: str, labelled: bool) -> Term:
    p = _Parser(text, labelled)
    t = p.term()
    kind, rest, off = p.peek()
    if kind != "eof":
        raise TermSyntaxError(f"trailing input {rest!r}", off)
    return t


def parse_term(text: str) -> Term:
    """Parse an unlabelled term; labelled constants and tuples are rejected."""
    return _parse(text, labelled=False)


def parse_lterm(text: str) -> Term:
    return _parse(text, labelled=True)


def _atom_name(t: Term) -> str:
    if type(t) is LConst and t.name == "S":
        return "S^{" + ",".join(map(str, t.vec)) + "}"
    return t.name


def format_lterm(t: Term) -> str:
    parts: list[str] = []

    def emit(t: Term, as_arg: bool):
        tt = type(t)
        if tt is App:
            if as_arg:
                parts.append("(")
            emit(t.left, False)
            parts.append(" ")
            emit(t.right, True)
            if as_arg:
                parts.append(")")
        elif tt is Tup:
            parts.append("<")
            for i, x in enumerate(t.items):
                if i:
                    parts.append(",")
                emit(x, False)
            parts.append(">")
        else:
            parts.append(_atom_name(t))

    emit(t, False)
    return "".join(parts)


format_term = format_lterm
