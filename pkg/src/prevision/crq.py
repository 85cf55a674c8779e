"""Conditional random quantities and compound-conditional constructors.

A conditional event E|H embeds as the random quantity that is 1 on EH, 0 on
(not E)H and equal to its own prevision on (not H).  Conjunctions and
iterated conditionals of two conditional events are conditional random
quantities whose table entries are polynomials in the previsions of the
quantities involved; everything is exact-rational.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import DomainError, UnresolvedParameterError
from .logic import ConditionalEvent, Formula, Workspace

Key = tuple
Rational = Union[Fraction, int]

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Param:
    """A named unknown: the prevision of the quantity identified by ``key``."""

    key: Key


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise DomainError(f"expected an exact rational, got {v!r}")


def _mono_key(mono: tuple) -> tuple:
    return tuple(sorted(mono))


class ValueExpr:
    """A sparse polynomial over prevision parameters with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, Fraction] | None = None):
        cleaned = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = _as_fraction(coeff)
                if coeff != 0:
                    cleaned[_mono_key(mono)] = coeff
        object.__setattr__(self, "terms", cleaned)

    # construction helpers
    @staticmethod
    def const(c: Rational) -> "ValueExpr":
        return ValueExpr({(): _as_fraction(c)})

    @staticmethod
    def param(key: Key) -> "ValueExpr":
        return ValueExpr({(key,): ONE})

    @staticmethod
    def coerce(v) -> "ValueExpr":
        if isinstance(v, ValueExpr):
            return v
        if isinstance(v, Param):
            return ValueExpr.param(v.key)
        return ValueExpr.const(v)

    # algebra
    def __add__(self, other) -> "ValueExpr":
        other = ValueExpr.coerce(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            terms[mono] = terms.get(mono, ZERO) + coeff
        return ValueExpr(terms)

    __radd__ = __add__

    def __neg__(self) -> "ValueExpr":
        return ValueExpr({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "ValueExpr":
        return self + (-ValueExpr.coerce(other))

    def __rsub__(self, other) -> "ValueExpr":
        return ValueExpr.coerce(other) + (-self)

    def __mul__(self, other) -> "ValueExpr":
        other = ValueExpr.coerce(other)
        terms: dict[tuple, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_key(m1 + m2)
                terms[mono] = terms.get(mono, ZERO) + c1 * c2
        return ValueExpr(terms)

    __rmul__ = __mul__

    # inspection
    def free_keys(self) -> frozenset:
        return frozenset(k for mono in self.terms for k in mono)

    @property
    def is_constant(self) -> bool:
        return all(not mono for mono in self.terms)

    def constant(self) -> Fraction:
        if not self.is_constant:
            raise UnresolvedParameterError(
                "expression is not constant", self.free_keys())
        return self.terms.get((), ZERO)

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def substitute(self, env: Mapping[Key, object]) -> "ValueExpr":
        """Replace parameters by rationals or expressions; partial maps allowed."""
        out = ValueExpr()
        for mono, coeff in self.terms.items():
            term = ValueExpr.const(coeff)
            for k in mono:
                term = term * ValueExpr.coerce(env[k]) if k in env else term * ValueExpr.param(k)
            out = out + term
        return out

    def value(self, env: Mapping[Key, object]) -> Fraction:
        """Full evaluation; raises if any parameter stays unresolved."""
        result = self.substitute(env)
        if not result.is_constant:
            raise UnresolvedParameterError(
                "unresolved prevision parameters", result.free_keys())
        return result.constant()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant and self.constant() == other
        return isinstance(other, ValueExpr) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def render(self, names: Mapping[Key, str] | None = None) -> str:
        """Deterministic text form, e.g. ``x + mu - x*mu``."""
        if not self.terms:
            return "0"
        names = names or {}

        def name_of(key: Key) -> str:
            return names.get(key, _fallback_name(key))

        order = sorted(self.terms,
                       key=lambda m: (len(m), tuple(name_of(k) for k in m)))
        parts = []
        for mono in order:
            coeff = self.terms[mono]
            sym = "*".join(name_of(k) for k in mono)
            if not mono:
                body = str(abs(coeff))
            elif abs(coeff) == 1:
                body = sym
            else:
                body = f"{abs(coeff)}*{sym}"
            if not parts:
                parts.append(body if coeff > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"<ValueExpr {self.render()}>"


def _fallback_name(key: Key) -> str:
    if key and key[0] == "sym":
        return key[1]
    return "P<" + repr(key) + ">"


@dataclass(frozen=True)
class CompoundQuantity:
    """A conditional random quantity given by a conditioning event and a table.

    ``table`` maps a partition of the sure event to value expressions; on the
    complement of ``condition`` the entries of well-formed constructions
    evaluate to the quantity's own prevision (for the unreduced iterated
    conditional this holds on every coherent assessment, by the product
    formula).  ``key`` identifies the quantity; its own prevision parameter is
    ``Param(key)``.
    """

    workspace: Workspace
    condition: Formula
    table: tuple[tuple[Formula, ValueExpr], ...]
    key: Key
    kind: str
    parts: tuple[ConditionalEvent, ...]
    label: str = field(compare=False)
    reduced: bool = False

    @property
    def own_param(self) -> Param:
        return Param(self.key)

    def param_keys(self) -> frozenset:
        keys = set()
        for _, expr in self.table:
            keys |= expr.free_keys()
        keys.discard(self.key)
        return frozenset(keys)

    def entry_at(self, index: int) -> ValueExpr:
        bit = 1 << index
        for region, expr in self.table:
            if region.mask & bit:
                return expr
        raise DomainError("assignment outside the workspace's possible worlds")

    def __repr__(self) -> str:
        return f"<CompoundQuantity {self.label}>"


def _validated(workspace: Workspace, condition: Formula, entries, key: Key,
               kind: str, parts, label: str, reduced: bool = False) -> CompoundQuantity:
    table = []
    covered = 0
    for region, expr in entries:
        if region.is_false:
            continue
        if region.mask & covered:
            raise DomainError("table regions overlap")
        covered |= region.mask
        table.append((region, ValueExpr.coerce(expr)))
        # Constituents must not straddle the conditioning event.
        if not (region.implies(condition) or region.implies(~condition)):
            raise DomainError("table region straddles the conditioning event")
    if covered != workspace.allowed:
        raise DomainError("table does not cover the sure event")
    if condition.is_false:
        raise DomainError("conditioning event must be possible")
    return CompoundQuantity(workspace, condition, tuple(table), key, kind,
                            tuple(parts), label, reduced)


def as_quantity(obj) -> CompoundQuantity:
    """Normalize a formula or conditional event into a compound quantity."""
    if isinstance(obj, CompoundQuantity):
        return obj
    if isinstance(obj, ConditionalEvent):
        return embed_conditional(obj)
    if isinstance(obj, Formula):
        return embed_conditional(ConditionalEvent(obj, obj.workspace.true))
    raise DomainError(f"cannot interpret {obj!r} as a conditional random quantity")


def _event_label(ce: ConditionalEvent) -> str:
    if ce.antecedent.is_true:
        return ce.consequent.to_text()
    return f"cond({ce.consequent.to_text()}, {ce.antecedent.to_text()})"


def embed_conditional(ce: ConditionalEvent) -> CompoundQuantity:
    """Indicator embedding: 1 on EH, 0 on (not E)H, own prevision on (not H)."""
    own = ValueExpr.param(ce.key)
    entries = [
        (ce.true_part, ValueExpr.const(1)),
        (ce.false_part, ValueExpr.const(0)),
        (ce.void_part, own),
    ]
    return _validated(ce.workspace, ce.antecedent, entries, ce.key, "event",
                      (ce,), _event_label(ce))


def _component_events(a, b, what: str) -> tuple[ConditionalEvent, ConditionalEvent]:
    qa, qb = as_quantity(a), as_quantity(b)
    if qa.kind != "event" or qb.kind != "event":
        raise DomainError(
            f"{what} is defined for conditional events only; "
            "compounds of compounds are not supported")
    return qa.parts[0], qb.parts[0]


def conjunction_key(c1: ConditionalEvent, c2: ConditionalEvent) -> Key:
    return ("conj", frozenset((c1.key, c2.key)))


def conjoin(a, b) -> CompoundQuantity:
    """Conjunction of two conditional events, as a conditional random quantity.

    With c1 = A|H and c2 = B|K the table is: 1 on AHBK, 0 on (not A)H or
    (not B)K, x on (not H)BK, y on AH(not K), and the conjunction's own
    prevision z on (not H)(not K).
    """
    c1, c2 = _component_events(a, b, "conjunction")
    ws = c1.workspace
    x = ValueExpr.param(c1.key)
    y = ValueExpr.param(c2.key)
    key = conjunction_key(c1, c2)
    z = ValueExpr.param(key)
    both_true = c1.true_part & c2.true_part
    any_false = c1.false_part | c2.false_part
    v1_t2 = c1.void_part & c2.true_part
    t1_v2 = c1.true_part & c2.void_part
    both_void = c1.void_part & c2.void_part
    entries = [
        (both_true, ValueExpr.const(1)),
        (any_false, ValueExpr.const(0)),
        (v1_t2, x),
        (t1_v2, y),
        (both_void, z),
    ]
    condition = c1.antecedent | c2.antecedent
    label = f"and({_event_label(c1)}, {_event_label(c2)})"
    return _validated(ws, condition, entries, key, "conj", (c1, c2), label)


def iterate(antecedent, consequent, *,
            reduce_by_product_formula: bool = False) -> CompoundQuantity:
    """Iterated conditional (B|K)|(A|H) of two conditional events.

    The table has seven cases: 1 on AHBK, 0 on AH(not B)K, y on AH(not K),
    mu on (not A)H, x + mu(1-x) on (not H)BK, mu(1-x) on (not H)(not B)K and
    z + mu(1-x) on (not H)(not K), where x, y, z are the previsions of A|H,
    B|K and their conjunction and mu is the iterated conditional's own
    prevision.  With ``reduce_by_product_formula`` the substitution z = mu*x
    (valid on every coherent assessment) eliminates z, turning the last entry
    into mu.  The conditioning event is AH, where the antecedent conditional
    is true.
    """
    ce_a, ce_c = _component_events(antecedent, consequent, "iterated conditioning")
    ws = ce_a.workspace
    if ce_a.true_part.is_false:
        raise DomainError("iterated conditioning needs a possible antecedent-true event")
    x = ValueExpr.param(ce_a.key)
    y = ValueExpr.param(ce_c.key)
    key = ("iter", ce_a.key, ce_c.key)
    mu = ValueExpr.param(key)
    z = ValueExpr.param(conjunction_key(ce_a, ce_c))
    mu_1mx = mu - mu * x
    tail = ValueExpr.coerce(mu) if reduce_by_product_formula else z + mu_1mx
    entries = [
        (ce_a.true_part & ce_c.true_part, ValueExpr.const(1)),
        (ce_a.true_part & ce_c.false_part, ValueExpr.const(0)),
        (ce_a.true_part & ce_c.void_part, y),
        (ce_a.false_part, mu),
        (ce_a.void_part & ce_c.true_part, x + mu_1mx),
        (ce_a.void_part & ce_c.false_part, mu_1mx),
        (ce_a.void_part & ce_c.void_part, tail),
    ]
    label = f"given({_event_label(ce_c)}, {_event_label(ce_a)})"
    return _validated(ws, ce_a.true_part, entries, key, "iter", (ce_a, ce_c),
                      label, reduced=reduce_by_product_formula)


def biconditional(a: Formula, b: Formula) -> ConditionalEvent:
    """The biconditional event A||B, i.e. (A and B) given (A or B)."""
    union = a | b
    if union.is_false:
        raise DomainError("biconditional needs a possible disjunction")
    return ConditionalEvent(a & b, union)


def quasi_conjunction(a, b) -> ConditionalEvent:
    """Quasi conjunction: the material parts conjoined, given H or K."""
    c1, c2 = _component_events(a, b, "quasi conjunction")
    material1 = c1.true_part | c1.void_part
    material2 = c2.true_part | c2.void_part
    return ConditionalEvent(material1 & material2, c1.antecedent | c2.antecedent)


# -- assessments ----------------------------------------------------------------


def _as_value(v):
    if isinstance(v, str):
        return v
    return _as_fraction(v)


@dataclass(frozen=True)
class Assessment:
    """An ordered family of quantities with one assessed value each.

    Values are exact rationals in [0, 1]; a bare string names a free symbol,
    which keeps the assessment out of the numeric engine but lets tables be
    rendered symbolically.
    """

    family: tuple[CompoundQuantity, ...]
    values: tuple

    def __init__(self, family: Sequence, values: Iterable):
        family = tuple(as_quantity(q) for q in family)
        values = tuple(_as_value(v) for v in values)
        if len(family) != len(values):
            raise DomainError("family and value vector lengths differ")
        if not family:
            raise DomainError("assessment needs at least one quantity")
        ws = family[0].workspace
        seen = set()
        for q in family:
            if q.workspace is not ws:
                raise DomainError("family members belong to different workspaces")
            if q.key in seen:
                raise DomainError(f"quantity assessed twice: {q.label}")
            seen.add(q.key)
        for q, v in zip(family, values):
            if isinstance(v, Fraction) and not 0 <= v <= 1:
                raise DomainError(
                    f"value {v} for {q.label} outside [0, 1]; "
                    "quantities here take values in [0, 1]")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "values", values)

    @property
    def workspace(self) -> Workspace:
        return self.family[0].workspace

    @property
    def is_numeric(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.values)

    def env(self) -> dict:
        """Substitution map from quantity keys to values (or free symbols)."""
        out = {}
        for q, v in zip(self.family, self.values):
            out[q.key] = v if isinstance(v, Fraction) else ValueExpr.param(("sym", v))
        return out

    def extended(self, quantity, value) -> "Assessment":
        return Assessment(self.family + (as_quantity(quantity),),
                          self.values + (value,))

    def __repr__(self) -> str:
        pairs = ", ".join(f"{q.label}={v}" for q, v in zip(self.family, self.values))
        return f"<Assessment {pairs}>"


def value_table(quantity, assessment: Assessment) -> dict[Formula, Fraction]:
    """The quantity's table with every entry evaluated under the assessment."""
    q = as_quantity(quantity)
    env = assessment.env()
    return {region: expr.value(env) for region, expr in q.table}


def value_function(quantity, assessment: Assessment) -> dict[int, Fraction]:
    """Evaluated value of the quantity on every allowed assignment."""
    out = {}
    for region, value in value_table(quantity, assessment).items():
        for idx in region.minterms():
            out[idx] = value
    return out
