"""Command-line front end.

Subcommands: ``check``, ``bounds``, ``entails``, ``pconsistent``, ``table``,
``constituents``.  Exit codes: 0 for an affirmative verdict (or plain
success), 1 for a negative verdict, 2 for parse errors, 3 for domain or
precondition errors.  ``--format json`` emits versioned machine-readable
reports whose rationals are fraction strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .coherence import check_coherence, extension_bounds, family_classes
from .crq import (Assessment, CompoundQuantity, ValueExpr, as_quantity,
                  conjunction_key, iterate)
from .document import Document, parse_document
from .errors import (DomainError, ParseError, PrevisionError,
                     UnresolvedParameterError)
from .expressions import parse_cexpr, parse_formula
from .logic import constituents as logic_constituents
from .pvalid import p_consistent, p_entails

SCHEMA_VERSION = 1


def frac_str(v: Fraction) -> str:
    return str(v)


def parse_frac(text: str) -> Fraction:
    return Fraction(text)


def _print_json(payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    print(json.dumps(payload, indent=2))


def _load(path: str) -> Document:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_document(text)


def _entry_text(expr: ValueExpr) -> str:
    return expr.render()


def _witness_payload(witness, family) -> dict:
    return {
        "stakes": [frac_str(s) for s in witness.stakes],
        "subfamily": [family[i].label for i in witness.subfamily],
        "conditioning": witness.conditioning.to_text(),
        "sign": "positive" if witness.sign > 0 else "negative",
        "gains": [{"constituent": region.to_text(), "gain": frac_str(g)}
                  for region, g in witness.gains],
    }


def _trace_payload(trace, family) -> list[dict]:
    return [{"family": [family[i].label for i in step.indices],
             "constituents": step.classes,
             "solvable": step.solvable,
             "zero_mass": [family[i].label for i in step.i0]}
            for step in trace]


def cmd_check(args) -> int:
    doc = _load(args.input)
    assessment = doc.assessment(args.assessment)
    if not assessment.is_numeric:
        raise DomainError("coherence checking needs a numeric assessment")
    verdict = check_coherence(assessment)
    if args.format == "json":
        payload = {
            "command": "check",
            "assessment": args.assessment,
            "status": verdict.status,
            "witness": None if verdict.witness is None
            else _witness_payload(verdict.witness, assessment.family),
            "trace": _trace_payload(verdict.trace, assessment.family),
        }
        _print_json(payload)
    else:
        print(f"assessment {args.assessment}: {verdict.status}")
        for step in verdict.trace:
            labels = ", ".join(assessment.family[i].label for i in step.indices)
            zero = ", ".join(assessment.family[i].label for i in step.i0) or "-"
            state = "solvable" if step.solvable else "unsolvable"
            print(f"  [{labels}] -> {step.classes} constituents, {state}, "
                  f"zero-mass: {zero}")
        w = verdict.witness
        if w is not None:
            stakes = ", ".join(
                f"{assessment.family[i].label}={frac_str(w.stakes[i])}"
                for i in w.subfamily)
            sign = "positive" if w.sign > 0 else "negative"
            print(f"  Dutch book: stakes {stakes}")
            print(f"  gains on {w.conditioning.to_text()} are all {sign}:")
            for region, g in w.gains:
                print(f"    {region.to_text()}: {frac_str(g)}")
    return 0 if verdict.coherent else 1


def _resolve_target(doc: Document, name: str, assessment: Assessment):
    target = as_quantity(doc.definition(name))
    if target.kind == "iter" and not target.reduced:
        family_keys = {q.key for q in assessment.family}
        missing = {k for k in target.param_keys() if k[0] == "conj"} - family_keys
        if missing:
            # Product-formula reduction keeps the target self-contained when
            # the conjunction's prevision is not among the premises.
            return iterate(*target.parts, reduce_by_product_formula=True), True
    return target, False


def cmd_bounds(args) -> int:
    doc = _load(args.input)
    assessment = doc.assessment(args.assessment)
    if not assessment.is_numeric:
        raise DomainError("extension bounds need a numeric assessment")
    target, reduced = _resolve_target(doc, args.target, assessment)
    result = extension_bounds(assessment, target, depth=args.bisection_depth)
    if args.format == "json":
        payload = {
            "command": "bounds",
            "assessment": args.assessment,
            "target": args.target,
            "lower": frac_str(result.lower),
            "upper": frac_str(result.upper),
            "lower_exact": result.lower_exact,
            "upper_exact": result.upper_exact,
            "rule": result.rule,
            "product_formula_reduction": reduced,
        }
        _print_json(payload)
    else:
        flags = (f"lower {'exact' if result.lower_exact else 'approximate'}, "
                 f"upper {'exact' if result.upper_exact else 'approximate'}")
        print(f"bounds for {args.target} given {args.assessment}: "
              f"[{frac_str(result.lower)}, {frac_str(result.upper)}] ({flags})")
        if result.rule:
            print(f"rule: {result.rule}")
        if reduced:
            print("note: product-formula reduction applied to the target")
    return 0


def cmd_entails(args) -> int:
    doc = _load(args.input)
    premises = [doc.definition(name.strip())
                for name in args.premises.split(",") if name.strip()]
    if not premises:
        raise DomainError("no premises given")
    conclusion = doc.definition(args.conclusion)
    result = p_entails(premises, conclusion, depth=args.bisection_depth)
    if args.format == "json":
        payload = {
            "command": "entails",
            "premises": [as_quantity(p).label for p in premises],
            "conclusion": as_quantity(conclusion).label,
            "entails": result.entails,
            "method": result.method,
            "witness": None if result.witness is None else {
                q.label: frac_str(v)
                for q, v in zip(result.witness.family, result.witness.values)},
        }
        _print_json(payload)
    else:
        verb = "p-entails" if result.entails else "does not p-entail"
        print(f"{{{args.premises}}} {verb} {args.conclusion} "
              f"(method: {result.method})")
        if result.witness is not None:
            pairs = ", ".join(f"{q.label}={frac_str(v)}" for q, v in
                              zip(result.witness.family, result.witness.values))
            print(f"witness assessment: {pairs}")
    return 0 if result.entails else 1


def cmd_pconsistent(args) -> int:
    doc = _load(args.input)
    family = [doc.definition(name.strip())
              for name in args.premises.split(",") if name.strip()]
    if not family:
        raise DomainError("no family members given")
    verdict = p_consistent(family)
    if args.format == "json":
        _print_json({"command": "pconsistent",
                     "family": [as_quantity(q).label for q in family],
                     "p_consistent": verdict})
    else:
        state = "p-consistent" if verdict else "not p-consistent"
        print(f"{{{args.premises}}} is {state}")
    return 0 if verdict else 1


def _canonical_param_names(q: CompoundQuantity) -> dict:
    names: dict = {}
    if q.kind == "event":
        names[q.key] = "p"
    elif q.kind == "conj":
        c1, c2 = q.parts
        names[c1.key] = "x"
        names[c2.key] = "y"
        names[q.key] = "z"
    elif q.kind == "iter":
        ante, cons = q.parts
        names[ante.key] = "x"
        names[cons.key] = "y"
        names[conjunction_key(ante, cons)] = "z"
        names[q.key] = "mu"
    return names


def _expression_table(q: CompoundQuantity) -> list[tuple[str, str]]:
    names = _canonical_param_names(q)
    return [(region.to_text(), expr.render(names)) for region, expr in q.table]


def _assessment_table(assessment: Assessment) -> tuple[list[str], list[dict]]:
    classes, c0, _ = family_classes(assessment.family)
    env = assessment.env()
    columns = [q.label for q in assessment.family]
    rows = []
    for h, cls in enumerate(classes, start=1):
        point = [_entry_text(expr.substitute(env)) for expr in cls.exprs]
        rows.append({"name": f"C{h}", "constituent": cls.region.to_text(),
                     "point": point})
    if c0 is not None:
        point = [frac_str(v) if isinstance(v, Fraction) else v
                 for v in assessment.values]
        rows.append({"name": "C0", "constituent": c0.to_text(), "point": point})
    return columns, rows


def cmd_table(args) -> int:
    doc = _load(args.input)
    if bool(args.assessment) == bool(args.expr):
        raise DomainError("table needs exactly one of --assessment or --expr")
    if args.assessment:
        assessment = doc.assessment(args.assessment)
        columns, rows = _assessment_table(assessment)
        if args.format == "json":
            _print_json({"command": "table", "assessment": args.assessment,
                         "columns": columns, "rows": rows})
        else:
            print("  ".join(["Ch", "constituent"] + columns))
            for row in rows:
                point = "(" + ", ".join(row["point"]) + ")"
                print(f"{row['name']}  {row['constituent']}  {point}")
    else:
        expr = parse_cexpr(args.expr, doc.workspace, doc.definitions)
        q = as_quantity(expr)
        table = _expression_table(q)
        if args.format == "json":
            _print_json({"command": "table", "expression": q.label,
                         "rows": [{"constituent": region, "value": value}
                                  for region, value in table]})
        else:
            print(f"value table for {q.label}")
            for region, value in table:
                print(f"{region}  {value}")
    return 0


def cmd_constituents(args) -> int:
    doc = _load(args.input)
    conditions = []
    for src in args.premises.split(","):
        src = src.strip()
        if not src:
            continue
        conditions.append(parse_formula(src, doc.workspace, doc.definitions))
    if not conditions:
        raise DomainError("no conditions given")
    c0, parts = logic_constituents(conditions)
    if args.format == "json":
        _print_json({"command": "constituents",
                     "c0": None if c0 is None else c0.to_text(),
                     "constituents": [p.to_text() for p in parts]})
    else:
        for h, part in enumerate(parts, start=1):
            print(f"C{h}  {part.to_text()}")
        if c0 is not None:
            print(f"C0  {c0.to_text()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prevision",
        description="Coherence, extension bounds and p-entailment for "
                    "conditional events and compound conditionals.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, target=False, assessment=False, premises=False,
               conclusion=False, depth=False):
        p.add_argument("--input", required=True, help="workspace document")
        p.add_argument("--format", choices=["text", "json"], default="text")
        if assessment:
            p.add_argument("--assessment", help="assessment name")
        if target:
            p.add_argument("--target", required=True, help="definition name")
        if premises:
            p.add_argument("--premises", required=True,
                           help="comma-separated definition names")
        if conclusion:
            p.add_argument("--conclusion", required=True, help="definition name")
        if depth:
            p.add_argument("--bisection-depth", type=int, default=20,
                           metavar="K", help="endpoint resolution 2**-K")

    p = sub.add_parser("check", help="decide coherence of an assessment")
    common(p, assessment=True)
    p.set_defaults(func=cmd_check, require_assessment=True)

    p = sub.add_parser("bounds", help="coherent extension interval for a target")
    common(p, assessment=True, target=True, depth=True)
    p.set_defaults(func=cmd_bounds, require_assessment=True)

    p = sub.add_parser("entails", help="decide p-entailment")
    common(p, premises=True, conclusion=True, depth=True)
    p.set_defaults(func=cmd_entails)

    p = sub.add_parser("pconsistent", help="decide p-consistency of a family")
    common(p, premises=True)
    p.set_defaults(func=cmd_pconsistent)

    p = sub.add_parser("table", help="value table or constituent/point table")
    common(p, assessment=True)
    p.add_argument("--expr", help="compound expression to tabulate")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("constituents", help="constituents of condition formulas")
    common(p, premises=True)
    p.set_defaults(func=cmd_constituents)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "require_assessment", False) and not args.assessment:
        print("error: --assessment is required", file=sys.stderr)
        return 3
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except UnresolvedParameterError as exc:
        print(f"error: {exc} (unassessed previsions: "
              f"{', '.join(map(repr, exc.keys))})", file=sys.stderr)
        return 3
    except (DomainError, PrevisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
