"""Text grammar for formulas and compound conditional expressions.

Formula grammar (EBNF)::

    formula := disj ;  disj := conj { "or" conj } ;  conj := neg { "and" neg } ;
    neg     := "not" neg | "(" formula ")" | "true" | "false" | IDENT .

Compound expressions extend it with ``cond(f, g)`` (consequent given
antecedent), ``and(c1, c2)``, ``given(consequent, antecedent)``,
``bicond(f, g)`` and ``quasi(c1, c2)``; a bare formula means the formula
conditioned on "true".
"""

from __future__ import annotations

import re
from typing import Mapping, Union

from .errors import DomainError, ParseError
from .logic import ConditionalEvent, Formula, Workspace
from . import crq

Definable = Union[Formula, ConditionalEvent, "crq.CompoundQuantity"]

_TOKEN_RE = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(),])|(?P<bad>\S))")

_COMPOUND_HEADS = ("cond", "given", "and", "bicond", "quasi")


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        if m.group("bad"):
            raise ParseError(f"unexpected character {m.group('bad')!r}", m.start("bad"))
        if m.group("ident"):
            tokens.append(_Token("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(_Token(m.group("punct"), m.group("punct"), m.start("punct")))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, workspace: Workspace,
                 names: Mapping[str, Definable] | None):
        self.text = text
        self.workspace = workspace
        self.names = names or {}
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.current
        if tok.kind != kind:
            what = tok.text or "end of input"
            raise ParseError(f"expected {kind!r}, found {what!r}", tok.pos)
        return self.advance()

    def at_word(self, word: str) -> bool:
        tok = self.current
        return tok.kind == "ident" and tok.text == word

    # -- formula level --------------------------------------------------------

    def formula(self) -> Formula:
        f = self.conj()
        while self.at_word("or"):
            self.advance()
            f = f | self.conj()
        return f

    def conj(self) -> Formula:
        f = self.neg()
        while self.at_word("and"):
            self.advance()
            f = f & self.neg()
        return f

    def neg(self) -> Formula:
        tok = self.current
        if self.at_word("not"):
            self.advance()
            return ~self.neg()
        if tok.kind == "(":
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if self.at_word("true"):
            self.advance()
            return self.workspace.true
        if self.at_word("false"):
            self.advance()
            return self.workspace.false
        if tok.kind == "ident":
            self.advance()
            return self._resolve_formula(tok)
        what = tok.text or "end of input"
        raise ParseError(f"expected a formula, found {what!r}", tok.pos)

    def _resolve_formula(self, tok: _Token) -> Formula:
        name = tok.text
        if name in _COMPOUND_HEADS + ("and", "or", "not"):
            raise ParseError(f"reserved word {name!r} cannot be used as an event name", tok.pos)
        if name in self.names:
            obj = self.names[name]
            if isinstance(obj, Formula):
                return obj
            raise ParseError(f"{name!r} names a conditional, but a formula is expected here", tok.pos)
        try:
            return self.workspace.atom(name)
        except DomainError:
            raise ParseError(f"unknown atom {name!r}", tok.pos) from None

    # -- compound level -------------------------------------------------------

    def cexpr(self) -> Definable:
        tok = self.current
        if tok.kind == "ident" and tok.text in _COMPOUND_HEADS \
                and self.tokens[self.i + 1].kind == "(":
            head = self.advance().text
            self.expect("(")
            if head == "cond":
                cons = self.formula()
                self.expect(",")
                ante = self.formula()
                self.expect(")")
                return self._make_event(cons, ante, tok.pos)
            if head == "bicond":
                a = self.formula()
                self.expect(",")
                b = self.formula()
                self.expect(")")
                return self._domain(lambda: crq.biconditional(a, b), tok.pos)
            first = self.cexpr()
            self.expect(",")
            second = self.cexpr()
            self.expect(")")
            if head == "and":
                return self._domain(lambda: crq.conjoin(first, second), tok.pos)
            if head == "quasi":
                return self._domain(lambda: crq.quasi_conjunction(first, second), tok.pos)
            # given(consequent, antecedent)
            return self._domain(lambda: crq.iterate(second, first), tok.pos)
        if tok.kind == "ident" and tok.text in self.names \
                and not isinstance(self.names[tok.text], Formula):
            self.advance()
            return self.names[tok.text]
        return self.formula()

    def _make_event(self, cons: Formula, ante: Formula, pos: int) -> ConditionalEvent:
        return self._domain(lambda: ConditionalEvent(cons, ante), pos)

    def _domain(self, build, pos: int):
        try:
            return build()
        except DomainError as exc:
            raise ParseError(str(exc), pos) from exc

    def finish(self, value):
        tok = self.current
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return value


def parse_formula(text: str, workspace: Workspace,
                  names: Mapping[str, Definable] | None = None) -> Formula:
    """Parse ``text`` as a formula over the workspace."""
    p = _Parser(text, workspace, names)
    return p.finish(p.formula())


def parse_cexpr(text: str, workspace: Workspace,
                names: Mapping[str, Definable] | None = None) -> Definable:
    """Parse a compound conditional expression (or a bare formula)."""
    p = _Parser(text, workspace, names)
    return p.finish(p.cexpr())
