"""Closed-form propagation rules and coherent-set descriptions.

Each function evaluates one of the published prevision-propagation formulas
over exact rationals, with the division-by-zero branches made explicit.  The
``match_rule`` registry recognizes the assessments the formulas apply to, so
the extension engine can certify closed-form endpoints against the LP oracle
and report the rule by name.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .crq import Assessment, CompoundQuantity, as_quantity, conjunction_key
from .errors import DomainError
from .logic import ConditionalEvent, Formula

Rational = Union[Fraction, int]

ZERO = Fraction(0)
ONE = Fraction(1)


def _unit(value: Rational, name: str) -> Fraction:
    v = Fraction(value)
    if not 0 <= v <= 1:
        raise DomainError(f"{name} must lie in [0, 1], got {v}")
    return v


@dataclass(frozen=True)
class BoundPair:
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise DomainError("lower bound exceeds upper bound")

    def __iter__(self):
        return iter((self.lower, self.upper))


def frechet_bounds(x: Rational, y: Rational) -> BoundPair:
    """Bounds for the prevision of the conjunction of two conditional events."""
    x, y = _unit(x, "x"), _unit(y, "y")
    return BoundPair(max(x + y - 1, ZERO), min(x, y))


def centering_bounds(x: Rational, y: Rational) -> BoundPair:
    """Bounds on the iterated conditional's prevision from the previsions of
    its antecedent (x) and consequent (y)."""
    x, y = _unit(x, "x"), _unit(y, "y")
    if x == 0:
        return BoundPair(ZERO, ONE)
    return BoundPair(max((x + y - 1) / x, ZERO), min(y / x, ONE))


def unconditional_centering_bounds(x: Rational, y: Rational) -> BoundPair:
    """Bounds on P(B|A) given P(A)=x and P(B)=y.

    The formulas coincide with :func:`centering_bounds`; the unconditional
    premise set forces nothing stronger despite the extra logical ties.
    """
    return centering_bounds(x, y)


def biconditional_bounds(x: Rational, y: Rational) -> BoundPair:
    """Bounds on the biconditional event's probability given P(A)=x, P(B)=y."""
    x, y = _unit(x, "x"), _unit(y, "y")
    lower = max(x + y - 1, ZERO)
    if x == 0 and y == 0:
        return BoundPair(lower, ONE)
    return BoundPair(lower, min(x, y) / max(x, y))


def hamacher_propagation(x: Rational, y: Rational) -> Fraction:
    """The unique coherent biconditional probability given (x, y) on the two
    converse conditionals: the Hamacher t-norm with parameter zero."""
    x, y = _unit(x, "x"), _unit(y, "y")
    if x == 0 or y == 0:
        return ZERO
    return x * y / (x + y - x * y)


@dataclass(frozen=True)
class CoherentSetDescriptor:
    """Exact membership test for one of the published coherent sets."""

    kind: str
    parameters: tuple[Fraction, ...]

    def contains(self, *point: Rational) -> bool:
        if self.kind == "D_z":
            (z,) = self.parameters
            if len(point) != 2:
                raise DomainError("D_z membership takes a point (x, y)")
            x, y = (_unit(v, "coordinate") for v in point)
            if z == 0:
                return x == 0 or y == 0
            return z <= x <= 1 and y * (x - z + x * z) == x * z
        raise DomainError(f"unknown descriptor kind {self.kind!r}")


def reverse_biconditional_set(z: Rational) -> CoherentSetDescriptor:
    """The set D_z of coherent (x, y) on the converse conditionals, given the
    biconditional's value z: the z=0 cross, or the curve y = xz/(x - z + xz)."""
    z = _unit(z, "z")
    return CoherentSetDescriptor("D_z", (z,))


_PI_KINDS = ("Pi_iterated", "Pi_unconditional")


def coherent_set_membership(kind: str, point) -> bool:
    """Membership of (x, y, z, mu) in the coherent set of the four-element
    centering family; the conditional and the unconditional variants have the
    same description."""
    if kind not in _PI_KINDS:
        raise DomainError(f"kind must be one of {_PI_KINDS}")
    if len(point) != 4:
        raise DomainError("membership takes a point (x, y, z, mu)")
    x, y, z, mu = (_unit(v, "coordinate") for v in point)
    if x == 0:
        return z == 0
    lower, upper = frechet_bounds(x, y)
    return lower <= z <= upper and mu * x == z


def counterfactual_prevision(y: Rational, a_formula: Formula,
                             b_formula: Formula) -> Fraction:
    """Prevision of (C|A) given B when A and B are incompatible: it equals
    P(C|A) = y no matter what probability B carries, including zero."""
    y = _unit(y, "y")
    if b_formula.is_false:
        raise DomainError("counterfactual antecedent must be possible")
    if not (a_formula & b_formula).is_false:
        raise DomainError("counterfactual identity needs incompatible events "
                          "(the conjunction must be impossible)")
    return y


# -- rule registry ---------------------------------------------------------------


@dataclass(frozen=True)
class MatchedRule:
    name: str
    lower: Fraction
    upper: Fraction


def _event_family(assessment: Assessment) -> list[ConditionalEvent] | None:
    events = []
    for q in assessment.family:
        if q.kind != "event":
            return None
        events.append(q.parts[0])
    return events


def _independent_pair(c1: ConditionalEvent, c2: ConditionalEvent) -> bool:
    """All nine status combinations of the two conditionals are possible."""
    for p1 in (c1.true_part, c1.false_part, c1.void_part):
        for p2 in (c2.true_part, c2.false_part, c2.void_part):
            if (p1 & p2).is_false:
                return False
    return True


def _free_pair(a: Formula, b: Formula) -> bool:
    """The four joint truth combinations of two events are all possible."""
    for pa in (a, ~a):
        for pb in (b, ~b):
            if (pa & pb).is_false:
                return False
    return True


def match_rule(assessment: Assessment, target) -> MatchedRule | None:
    """Recognize a (family, target) pair covered by a closed-form rule.

    Matching is structural and conservative: logical side conditions are
    verified on the workspace, and a non-match simply sends the caller to the
    generic LP path, so false negatives are harmless.
    """
    target = as_quantity(target)
    events = _event_family(assessment)
    if events is None or len(events) != 2:
        return None
    e1, e2 = events
    v1, v2 = assessment.values[0], assessment.values[1]
    if not (isinstance(v1, Fraction) and isinstance(v2, Fraction)):
        return None
    by_key = {e1.key: v1, e2.key: v2}

    if target.kind == "conj":
        c1, c2 = target.parts
        if {c1.key, c2.key} != set(by_key):
            return None
        x, y = by_key[c1.key], by_key[c2.key]
        if _is_converse_pair(c1, c2):
            t = hamacher_propagation(x, y)
            return MatchedRule("Hamacher t-norm", t, t)
        unconditional = c1.antecedent.is_true and c2.antecedent.is_true
        if (unconditional and _free_pair(c1.consequent, c2.consequent)) \
                or _independent_pair(c1, c2):
            lo, hi = frechet_bounds(x, y)
            return MatchedRule("Frechet-Hoeffding", lo, hi)
        return None

    if target.kind == "iter":
        ante, cons = target.parts
        if {ante.key, cons.key} != set(by_key):
            return None
        x, y = by_key[ante.key], by_key[cons.key]
        if ante.antecedent.is_true and cons.antecedent.is_true:
            if _free_pair(ante.consequent, cons.consequent):
                lo, hi = unconditional_centering_bounds(x, y)
                return MatchedRule("unconditional centering", lo, hi)
            return None
        if ante.antecedent.is_true and \
                (ante.consequent & cons.antecedent).is_false:
            t = counterfactual_prevision(y, cons.antecedent, ante.consequent)
            return MatchedRule("counterfactual", t, t)
        if _independent_pair(ante, cons):
            lo, hi = centering_bounds(x, y)
            return MatchedRule("centering", lo, hi)
        return None

    if target.kind == "event":
        ce = target.parts[0]
        if _is_biconditional_of(ce, e1, e2):
            x, y = v1, v2
            if e1.antecedent.is_true and e2.antecedent.is_true:
                if _free_pair(e1.consequent, e2.consequent):
                    lo, hi = biconditional_bounds(x, y)
                    return MatchedRule("biconditional", lo, hi)
                return None
            if _is_converse_pair(e1, e2):
                t = hamacher_propagation(x, y)
                return MatchedRule("Hamacher t-norm", t, t)
            return None
        if e1.antecedent.is_true and e2.antecedent.is_true:
            for (ea, va), (eb, vb) in (((e1, v1), (e2, v2)), ((e2, v2), (e1, v1))):
                a, b = ea.consequent, eb.consequent
                if _free_pair(a, b) and not a.is_false \
                        and ce.key == ConditionalEvent(b, a).key:
                    lo, hi = unconditional_centering_bounds(va, vb)
                    return MatchedRule("unconditional centering", lo, hi)
        return None
    return None


def _is_converse_pair(c1: ConditionalEvent, c2: ConditionalEvent) -> bool:
    """c1 = A|B and c2 = B|A for two free events A, B.

    Both true parts equal AB and each antecedent is the other's conclusion,
    so it suffices that the true parts coincide with the intersection of the
    antecedents and that the antecedents are logically free.
    """
    t = c1.true_part
    return (not t.is_false
            and c2.true_part == t
            and (c1.antecedent & c2.antecedent) == t
            and _free_pair(c1.antecedent, c2.antecedent))


def _is_biconditional_of(ce: ConditionalEvent, e1: ConditionalEvent,
                         e2: ConditionalEvent) -> bool:
    """ce is (A and B) given (A or B) for the events asserted by e1, e2."""
    if e1.antecedent.is_true and e2.antecedent.is_true:
        a, b = e1.consequent, e2.consequent
    elif _is_converse_pair(e1, e2):
        a, b = e1.antecedent, e2.antecedent
    else:
        return False
    if (a | b).is_false:
        return False
    return ce.key == ConditionalEvent(a & b, a | b).key
