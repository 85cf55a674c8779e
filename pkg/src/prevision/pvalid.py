"""p-consistency, p-entailment, and the catalogue of inference rules.

A family is p-consistent when the all-ones assessment on it is coherent, and
it p-entails a quantity when every coherent assessment giving the premises
value one forces the conclusion to one as well.  For premise sets that pin
every prevision the conclusion's table refers to, the decision is an exact
extension-bounds computation; otherwise the referenced conditionals join the
family as free components and the decision combines an achievability
certificate with exhaustive exact refutation on a grid over the free values
(the route the underlying theorems themselves take).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .coherence import ExtensionBounds, check_coherence, extension_bounds
from .crq import (Assessment, CompoundQuantity, as_quantity, conjoin,
                  embed_conditional, iterate)
from .errors import DomainError, EngineError, IncoherentPremisesError
from .logic import ConditionalEvent, Workspace

ONE = Fraction(1)
GRID = tuple(Fraction(k, 4) for k in range(5))


def quantity_from_key(ws: Workspace, key: tuple) -> CompoundQuantity:
    """Rebuild the quantity a prevision parameter refers to."""
    tag = key[0]
    if tag == "event":
        return embed_conditional(
            ConditionalEvent(ws.formula(key[1]), ws.formula(key[2])))
    if tag == "conj":
        k1, k2 = sorted(key[1])
        return conjoin(quantity_from_key(ws, k1), quantity_from_key(ws, k2))
    if tag == "iter":
        return iterate(quantity_from_key(ws, key[1]), quantity_from_key(ws, key[2]))
    raise DomainError(f"cannot rebuild a quantity from key {key!r}")


def _close_family(quantities: list[CompoundQuantity]) -> tuple[
        list[CompoundQuantity], list[int]]:
    """Add the quantities whose previsions the family refers to but does not
    assess; returns the closed family and the positions of the added members."""
    ws = quantities[0].workspace
    family = list(quantities)
    keys = {q.key for q in family}
    added = []
    while True:
        missing = set()
        for q in family:
            missing |= q.param_keys() - keys
        if not missing:
            return family, added
        for key in sorted(missing, key=repr):
            added.append(len(family))
            family.append(quantity_from_key(ws, key))
            keys.add(key)


def p_consistent(family) -> bool:
    """Whether the all-ones assessment on the family is coherent.

    When the family's tables refer to unassessed component previsions, those
    components join as free quantities: the all-ones completion decides most
    cases immediately and a grid over the free values settles the rest.
    """
    quantities = [as_quantity(q) for q in family]
    closed, free = _close_family(quantities)
    n = len(quantities)
    if not free:
        return check_coherence(Assessment(closed, [ONE] * n)).coherent
    if check_coherence(Assessment(closed, [ONE] * len(closed))).coherent:
        return True
    for combo in product(GRID, repeat=len(free)):
        values = [ONE] * n + list(combo)
        if check_coherence(Assessment(closed, values)).coherent:
            return True
    return False


@dataclass(frozen=True)
class EntailmentResult:
    entails: bool
    method: str  # "interval" | "grid"
    interval: ExtensionBounds | None
    witness: Assessment | None

    def __bool__(self) -> bool:
        return self.entails


def _reduce_if_needed(conclusion: CompoundQuantity,
                      available: set) -> CompoundQuantity:
    if conclusion.kind == "iter" and not conclusion.reduced:
        conj_keys = {k for k in conclusion.param_keys() if k[0] == "conj"}
        if conj_keys - available:
            return iterate(*conclusion.parts, reduce_by_product_formula=True)
    return conclusion


def p_entails(premises, conclusion, *, depth: int = 20) -> EntailmentResult:
    """Decide whether the premise family p-entails the conclusion."""
    premise_qs = [as_quantity(p) for p in premises]
    if not premise_qs:
        raise DomainError("p-entailment needs a nonempty premise family")
    if not p_consistent(premise_qs):
        raise IncoherentPremisesError("premises are not p-consistent")
    premise_keys = {q.key for q in premise_qs}
    conclusion_q = _reduce_if_needed(as_quantity(conclusion), premise_keys)

    free_refs = (set().union(*(q.param_keys() for q in premise_qs))
                 | conclusion_q.param_keys()) - premise_keys - {conclusion_q.key}
    all_ones = Assessment(premise_qs, [ONE] * len(premise_qs))

    if not free_refs:
        interval = extension_bounds(all_ones, conclusion_q, depth=depth)
        if interval.lower == 1:
            if not interval.lower_exact:
                raise EngineError("cannot certify the entailment's lower "
                                  "endpoint at the configured depth")
            return EntailmentResult(True, "interval", interval, None)
        witness = _non_entailment_witness(all_ones, conclusion_q, interval)
        return EntailmentResult(False, "interval", interval, witness)

    # Free component previsions: certify that value one is achievable, then
    # refute every grid completion with a smaller conclusion value.
    closed, free_pos = _close_family(premise_qs + [conclusion_q])
    ncore = len(premise_qs)
    ones = Assessment(closed, [ONE] * len(closed))
    if not check_coherence(ones).coherent:
        raise EngineError(
            "all-ones completion of the closed family is incoherent; "
            "the grid decision cannot certify achievability")
    for combo in product(GRID, repeat=len(free_pos)):
        for t in GRID:
            if t == 1:
                continue
            values = [ONE] * len(closed)
            values[ncore] = t
            for pos, v in zip(free_pos, combo):
                values[pos] = v
            candidate = Assessment(closed, values)
            if check_coherence(candidate).coherent:
                return EntailmentResult(False, "grid", None, candidate)
    return EntailmentResult(True, "grid", None, None)


def _non_entailment_witness(all_ones: Assessment, conclusion: CompoundQuantity,
                            interval: ExtensionBounds) -> Assessment:
    span = interval.upper - interval.lower
    for t in (interval.lower, interval.lower + span / 2, interval.upper):
        if t < 1:
            candidate = all_ones.extended(conclusion, t)
            if check_coherence(candidate).coherent:
                return candidate
    raise EngineError("failed to realize a non-entailment witness")


def p_entails_family(premises, conclusions, *, depth: int = 20) -> bool:
    """Whether the premise family p-entails every member of the conclusions."""
    if not conclusions:
        raise DomainError("p-entailment needs a nonempty conclusion family")
    return all(p_entails(premises, c, depth=depth).entails for c in conclusions)


# -- the rule catalogue -----------------------------------------------------------


@dataclass(frozen=True)
class InferenceRule:
    """A named inference schema together with its machine-checked verdict."""

    name: str
    premises: tuple[str, ...]
    conclusion: str
    side_conditions: str | None
    p_valid: bool
    method: str
    derivation: str | None
    witness: tuple[tuple[str, Fraction], ...] | None


def _verify(name: str, premise_objs, conclusion_obj, *, expected: bool,
            side_conditions: str | None = None,
            derivation: str | None = None) -> InferenceRule:
    result = p_entails(premise_objs, conclusion_obj)
    if result.entails != expected:
        raise EngineError(
            f"catalogue verification failed for {name!r}: "
            f"expected p_valid={expected}, engine said {result.entails}")
    witness = None
    if result.witness is not None:
        witness = tuple((q.label, v) for q, v in
                        zip(result.witness.family, result.witness.values))
    labels = tuple(as_quantity(p).label for p in premise_objs)
    return InferenceRule(name, labels, as_quantity(conclusion_obj).label,
                         side_conditions, result.entails, result.method,
                         derivation, witness)


@lru_cache(maxsize=1)
def rule_catalogue() -> tuple[InferenceRule, ...]:
    """The named rules, re-verified through the engine on construction."""
    ws = Workspace(["A", "B", "H", "K"])
    a_h = ConditionalEvent(ws.atom("A"), ws.atom("H"))
    b_k = ConditionalEvent(ws.atom("B"), ws.atom("K"))
    conj = conjoin(a_h, b_k)
    ws2 = Workspace(["A", "B"])
    a, b = ws2.atom("A"), ws2.atom("B")
    a_b = ConditionalEvent(a, b)
    b_a = ConditionalEvent(b, a)
    bicond = ConditionalEvent(a & b, a | b)
    ws3 = Workspace(["A", "B", "C"])
    ws3 = ws3.with_constraints([ws3.atom("A") & ws3.atom("B")])
    rules = [
        _verify("AND rule", [a_h, b_k], conj, expected=True),
        _verify("one-premise centering", [conj], iterate(a_h, b_k),
                expected=True,
                derivation="product formula: the conjunction's prevision is "
                           "the iterated conditional's prevision times the "
                           "antecedent's, so value one transfers"),
        _verify("two-premise centering", [a_h, b_k],
                iterate(a_h, b_k, reduce_by_product_formula=True),
                expected=True,
                derivation="AND rule composed with one-premise centering"),
        _verify("biconditional AND rule", [a_b, b_a], conjoin(a_b, b_a),
                expected=True),
        _verify("one-premise biconditional centering", [a & b], bicond,
                expected=True,
                derivation="one-premise centering applied to both converse "
                           "conditionals, then the biconditional AND rule"),
        _verify("two-premise biconditional centering", [a, b], bicond,
                expected=True,
                derivation="two-premise centering twice, then the "
                           "biconditional AND rule"),
        _verify("counterfactual centering",
                [ws3.atom("B"), ConditionalEvent(ws3.atom("C"), ws3.atom("A"))],
                iterate(ws3.atom("B"),
                        ConditionalEvent(ws3.atom("C"), ws3.atom("A")),
                        reduce_by_product_formula=True),
                expected=True,
                side_conditions="A and B is impossible"),
        _verify("negated conjuncts to biconditional", [~a, ~b], bicond,
                expected=False),
        _verify("false antecedent to conditional", [~a],
                ConditionalEvent(b, a), expected=False),
    ]
    return tuple(rules)
