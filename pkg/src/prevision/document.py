"""Workspace documents: a small line-oriented input format.

A document declares the atom set, optional logical constraints, named
definitions (formulas, conditionals, compounds) and named assessments::

    atoms A, B, H, K
    constraint A and K          # asserted impossible
    define cAH  = cond(A, H)
    define both = and(cAH, cond(B, K))
    assess M : cAH = 1/2, both = 0.25

Values are rationals ("1/2"), finite decimals ("0.25", read exactly in base
ten) or bare identifiers, which declare free symbols for symbolic tables.
Constraint lines must precede definitions, since they reshape the universe
every later formula lives in.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .crq import Assessment
from .errors import DomainError, ParseError
from .expressions import Definable, parse_cexpr, parse_formula
from .logic import Workspace

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_NUMBER_RE = re.compile(r"-?\d+(?:/\d+|\.\d+)?$")


@dataclass(frozen=True)
class Document:
    workspace: Workspace
    definitions: dict[str, Definable]
    assessments: dict[str, Assessment]
    constraints: tuple[str, ...]

    def definition(self, name: str) -> Definable:
        if name not in self.definitions:
            raise DomainError(f"no definition named {name!r}")
        return self.definitions[name]

    def assessment(self, name: str) -> Assessment:
        if name not in self.assessments:
            raise DomainError(f"no assessment named {name!r}")
        return self.assessments[name]


def _fail(message: str, lineno: int, column: int = 1) -> ParseError:
    return ParseError(message, 0, line=lineno, column=column)


def _strip(line: str) -> str:
    if "#" in line:
        line = line[:line.index("#")]
    return line.strip()


def _located(exc: ParseError, lineno: int, offset: int) -> ParseError:
    return ParseError(exc.message, exc.position, line=lineno,
                      column=offset + exc.position + 1)


def parse_value(text: str):
    """A value entry: exact rational, exact base-10 decimal, or a symbol name."""
    text = text.strip()
    if _NUMBER_RE.match(text):
        return Fraction(text)
    if _NAME_RE.match(text):
        return text
    raise DomainError(f"cannot read value {text!r}")


def parse_document(text: str) -> Document:
    lines = text.splitlines()
    atoms: list[str] | None = None
    constraint_srcs: list[tuple[int, str]] = []
    rest: list[tuple[int, str, str]] = []  # (lineno, keyword, payload)
    for lineno, raw in enumerate(lines, start=1):
        line = _strip(raw)
        if not line:
            continue
        keyword, _, payload = line.partition(" ")
        payload = payload.strip()
        if keyword == "atoms":
            if atoms is not None:
                raise _fail("duplicate atoms line", lineno)
            if rest or constraint_srcs:
                raise _fail("the atoms line must come first", lineno)
            atoms = [a for a in payload.replace(",", " ").split() if a]
            if not atoms:
                raise _fail("atoms line declares no atoms", lineno)
        elif keyword == "constraint":
            if rest:
                raise _fail("constraint lines must precede definitions", lineno)
            constraint_srcs.append((lineno, payload))
        elif keyword in ("define", "assess"):
            rest.append((lineno, keyword, payload))
        else:
            raise _fail(f"unknown directive {keyword!r}", lineno)
    if atoms is None:
        raise _fail("document declares no atoms", len(lines) or 1)
    try:
        base = Workspace(atoms)
    except DomainError as exc:
        raise _fail(str(exc), 1)
    impossible = []
    for lineno, src in constraint_srcs:
        offset = lines[lineno - 1].index(src) if src else 0
        try:
            impossible.append(parse_formula(src, base))
        except ParseError as exc:
            raise _located(exc, lineno, offset) from exc
    try:
        ws = base.with_constraints(impossible) if impossible else base
    except DomainError as exc:
        raise _fail(str(exc), constraint_srcs[-1][0] if constraint_srcs else 1)

    definitions: dict[str, Definable] = {}
    assessments: dict[str, Assessment] = {}

    def check_name(name: str, lineno: int) -> None:
        if not _NAME_RE.match(name):
            raise _fail(f"invalid name {name!r}", lineno)
        if name in ws.atoms or name in definitions or name in assessments:
            raise _fail(f"name {name!r} is already in use", lineno)

    for lineno, keyword, payload in rest:
        if keyword == "define":
            name, eq, expr_src = payload.partition("=")
            name = name.strip()
            expr_src = expr_src.strip()
            if not eq or not name or not expr_src:
                raise _fail("expected: define <name> = <expression>", lineno)
            check_name(name, lineno)
            offset = lines[lineno - 1].index(expr_src, lines[lineno - 1].index("="))
            try:
                definitions[name] = parse_cexpr(expr_src, ws, definitions)
            except ParseError as exc:
                raise _located(exc, lineno, offset) from exc
        else:
            name, colon, body = payload.partition(":")
            name = name.strip()
            if not colon or not name or not body.strip():
                raise _fail("expected: assess <name> : <ref> = <value>, ...", lineno)
            check_name(name, lineno)
            family = []
            values = []
            for item in body.split(","):
                ref, eq, value_src = item.partition("=")
                ref = ref.strip()
                if not eq:
                    raise _fail(f"expected <ref> = <value>, got {item.strip()!r}", lineno)
                if ref not in definitions:
                    raise _fail(f"assessment refers to undefined name {ref!r}", lineno)
                try:
                    value = parse_value(value_src)
                except DomainError as exc:
                    raise _fail(str(exc), lineno)
                if isinstance(value, str) and (value in ws.atoms or value in definitions):
                    raise _fail(
                        f"symbol {value!r} collides with an existing name", lineno)
                family.append(definitions[ref])
                values.append(value)
            try:
                assessments[name] = Assessment(family, values)
            except DomainError as exc:
                raise _fail(str(exc), lineno)
    return Document(ws, definitions, assessments, tuple(s for _, s in constraint_srcs))
