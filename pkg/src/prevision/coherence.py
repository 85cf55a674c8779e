"""Coherence checking and coherent extension bounds.

The engine follows the operative characterization: an assessment is coherent
iff the system expressing that the assessed vector lies in the convex hull of
the constituent points is solvable, and, whenever some conditioning events
can only receive zero mass, the restricted sub-assessment is coherent too.
Everything runs on exact rationals; incoherence verdicts carry a betting
witness extracted from a Farkas certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import simplex
from .crq import Assessment, CompoundQuantity, ValueExpr, as_quantity
from .errors import (DomainError, EngineError, IncoherentPremisesError,
                     UnresolvedParameterError)
from .logic import Formula, iter_bits

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class ConstituentClass:
    """A block of assignments on which every family member takes one entry."""

    region: Formula
    exprs: tuple[ValueExpr, ...]
    rank: tuple[int, ...]
    in_condition: tuple[bool, ...]


def family_classes(family: Sequence[CompoundQuantity]) -> tuple[
        list[ConstituentClass], Formula | None, Formula]:
    """Constituent classes of a family of quantities.

    Returns ``(classes, c0_region, conditioning_disjunction)``: the classes
    partition the disjunction of the conditioning events, grouped by the
    vector of table entries and ordered the way the entries are listed in
    each quantity's table (true cases first, then false, then void); the
    remaining event, where every bet is called off, is returned separately.
    """
    family = [as_quantity(q) for q in family]
    ws = family[0].workspace
    hcal = ws.false
    for q in family:
        hcal = hcal | q.condition
    guard_of: list[dict[int, int]] = []
    for q in family:
        lookup = {}
        for gi, (region, _) in enumerate(q.table):
            for idx in iter_bits(region.mask):
                lookup[idx] = gi
        guard_of.append(lookup)
    groups: dict[tuple[int, ...], int] = {}
    for idx in iter_bits(hcal.mask):
        sig = tuple(lookup[idx] for lookup in guard_of)
        groups[sig] = groups.get(sig, 0) | (1 << idx)
    classes = []
    for sig in sorted(groups):
        region = ws.formula(groups[sig])
        exprs = tuple(q.table[gi][1] for q, gi in zip(family, sig))
        inside = tuple(region.implies(q.condition) for q in family)
        classes.append(ConstituentClass(region, exprs, sig, inside))
    rest = ~hcal
    return classes, (None if rest.is_false else rest), hcal


@dataclass(frozen=True)
class PointSystem:
    """The constituent points Q_h, the assessed vector, and the mass masks."""

    family: tuple[CompoundQuantity, ...]
    classes: tuple[ConstituentClass, ...]
    points: tuple[tuple[Fraction, ...], ...]
    target: tuple[Fraction, ...]
    condition_masks: tuple[frozenset[int], ...]
    c0_region: Formula | None
    conditioning: Formula

    @property
    def m(self) -> int:
        return len(self.points)

    def rows(self) -> tuple[list[list[Fraction]], list[Fraction]]:
        """Equality system: columns are hull classes, rows quantities plus mass one."""
        n = len(self.family)
        A = [[self.points[h][i] for h in range(self.m)] for i in range(n)]
        A.append([ONE] * self.m)
        b = list(self.target) + [ONE]
        return A, b


def _build_system(family: Sequence[CompoundQuantity], values: Sequence[Fraction],
                  env: dict) -> PointSystem:
    classes, c0, hcal = family_classes(family)
    points = []
    for cls in classes:
        points.append(tuple(expr.value(env) for expr in cls.exprs))
    masks = []
    for i in range(len(family)):
        masks.append(frozenset(h for h, cls in enumerate(classes) if cls.in_condition[i]))
    return PointSystem(tuple(family), tuple(classes), tuple(points),
                       tuple(values), tuple(masks), c0, hcal)


def build_points(assessment: Assessment) -> PointSystem:
    """Exact constituent points for a fully numeric assessment."""
    if not assessment.is_numeric:
        raise DomainError("point system needs a numeric assessment")
    return _build_system(assessment.family, assessment.values, assessment.env())


@dataclass(frozen=True)
class SigmaSolution:
    """Nonnegative masses on the constituent points that average to the assessment."""

    lambdas: tuple[Fraction, ...]


def solve_sigma(ps: PointSystem) -> SigmaSolution | None:
    """A solution of the hull-membership system, or None when there is none."""
    A, b = ps.rows()
    point = simplex.feasible_point(A, b)
    return None if point is None else SigmaSolution(tuple(point))


def compute_I0(ps: PointSystem, solution: SigmaSolution | None = None) -> frozenset[int]:
    """Indices whose conditioning events get zero mass in every solution."""
    if solution is None:
        solution = solve_sigma(ps)
        if solution is None:
            raise DomainError("system is unsolvable; I0 is undefined")
    A, b = ps.rows()
    out = []
    for i, mask in enumerate(ps.condition_masks):
        if sum((solution.lambdas[h] for h in mask), ZERO) > 0:
            continue
        cost = [ONE if h in mask else ZERO for h in range(ps.m)]
        res = simplex.optimize(A, b, cost, maximize=True)
        assert res is not None
        if res[0] == 0:
            out.append(i)
    return frozenset(out)


@dataclass(frozen=True)
class TraceStep:
    indices: tuple[int, ...]
    classes: int
    solvable: bool
    i0: tuple[int, ...]


@dataclass(frozen=True)
class Witness:
    """Stakes whose gain is strictly one-signed on the conditioning disjunction."""

    stakes: tuple[Fraction, ...]
    subfamily: tuple[int, ...]
    conditioning: Formula
    gains: tuple[tuple[Formula, Fraction], ...]
    sign: int


@dataclass(frozen=True)
class CoherenceVerdict:
    status: str  # "coherent" | "incoherent"
    witness: Witness | None
    trace: tuple[TraceStep, ...]

    @property
    def coherent(self) -> bool:
        return self.status == "coherent"


def _extract_witness(ps: PointSystem, indices: tuple[int, ...],
                     family_size: int) -> Witness:
    A, b = ps.rows()
    y = simplex.farkas_certificate(A, b)
    local_stakes = y[:-1]
    gains = []
    signs = set()
    for h in range(ps.m):
        g = sum((local_stakes[i] * (ps.points[h][i] - ps.target[i])
                 for i in range(len(indices))), ZERO)
        if g == 0:
            raise EngineError("degenerate witness gain")
        signs.add(g > 0)
        gains.append((ps.classes[h].region, g))
    if len(signs) != 1:
        raise EngineError("witness gains are not one-signed")
    stakes = [ZERO] * family_size
    for pos, i in enumerate(indices):
        stakes[i] = local_stakes[pos]
    return Witness(tuple(stakes), indices, ps.conditioning, tuple(gains),
                   1 if signs.pop() else -1)


def check_coherence(assessment: Assessment) -> CoherenceVerdict:
    """Decide coherence of a numeric assessment; incoherence carries a witness.

    Recursion on the zero-mass index set is guaranteed to terminate because
    that set is always a strict subset of the current indices (asserted).
    """
    if not assessment.is_numeric:
        raise DomainError("coherence checking needs a numeric assessment")
    env = assessment.env()
    family = assessment.family
    values = assessment.values
    trace: list[TraceStep] = []
    active = tuple(range(len(family)))
    while True:
        sub_family = [family[i] for i in active]
        sub_values = [values[i] for i in active]
        ps = _build_system(sub_family, sub_values, env)
        solution = solve_sigma(ps)
        if solution is None:
            trace.append(TraceStep(active, ps.m, False, ()))
            witness = _extract_witness(ps, active, len(family))
            return CoherenceVerdict("incoherent", witness, tuple(trace))
        i0 = compute_I0(ps, solution)
        mapped = tuple(active[i] for i in sorted(i0))
        trace.append(TraceStep(active, ps.m, True, mapped))
        if not i0:
            return CoherenceVerdict("coherent", None, tuple(trace))
        if len(i0) >= len(active):
            raise EngineError(
                "zero-mass index set is not a strict subset; "
                "the operative characterization does not apply")
        active = mapped


def verify_witness(assessment: Assessment, witness: Witness) -> bool:
    """Recompute the witness gains by enumeration and check one-signedness."""
    env = assessment.env()
    sub_family = [assessment.family[i] for i in witness.subfamily]
    sub_values = [assessment.values[i] for i in witness.subfamily]
    ps = _build_system(sub_family, sub_values, env)
    if ps.conditioning != witness.conditioning:
        return False
    stakes = [witness.stakes[i] for i in witness.subfamily]
    reported = dict(witness.gains)
    signs = set()
    for h in range(ps.m):
        g = sum((stakes[i] * (ps.points[h][i] - ps.target[i])
                 for i in range(len(stakes))), ZERO)
        region = ps.classes[h].region
        if region not in reported or reported[region] != g:
            return False
        if g == 0:
            return False
        signs.add(g > 0)
    return len(signs) == 1 and len(reported) == ps.m


# -- coherent extension bounds --------------------------------------------------


@dataclass(frozen=True)
class ExtensionBounds:
    lower: Fraction
    upper: Fraction
    lower_exact: bool
    upper_exact: bool
    rule: str | None = None


def simplest_rational(lo: Fraction, hi: Fraction, *, open_left: bool = True,
                      open_right: bool = False) -> Fraction | None:
    """The smallest-denominator rational in an interval, Stern-Brocot style."""
    if lo > hi or (lo == hi and (open_left or open_right)):
        return None
    if lo == hi:
        return lo
    floor_lo = lo.numerator // lo.denominator
    candidate = floor_lo if (lo == floor_lo and not open_left) else floor_lo + 1
    if candidate < hi or (candidate == hi and not open_right):
        return Fraction(candidate)
    # The interval sits inside one unit gap (floor_lo, floor_lo + 1).
    a = lo - floor_lo
    b = hi - floor_lo
    if a == 0:
        # (0, b): the simplest member is the largest unit fraction inside.
        n = -((-b.denominator) // b.numerator)  # ceil(1/b)
        if open_right and n * b.numerator == b.denominator:
            n += 1
        return floor_lo + Fraction(1, n)
    inner = simplest_rational(1 / b, 1 / a,
                              open_left=open_right, open_right=open_left)
    assert inner is not None and inner > 0
    return floor_lo + 1 / inner


def _parametric_range(assessment: Assessment,
                      target: CompoundQuantity) -> tuple[Fraction, Fraction] | None:
    """Outer bounds on the extension value from the hull system alone.

    The target's value appears both as a coordinate of the assessed vector
    and inside the constituent points, making the joint system bilinear; the
    standard lift (mass-weighted copies of the unknown) relaxes it to a
    linear program whose optimum brackets every coherent extension.
    """
    env = assessment.env()
    classes, _, _ = family_classes(assessment.family + (target,))
    n = len(assessment.family)
    m = len(classes)
    const_part: list[list[Fraction]] = []
    coeff_part: list[list[Fraction]] = []
    for cls in classes:
        const_row = []
        coeff_row = []
        for expr in cls.exprs:
            reduced = expr.substitute(env)
            free = reduced.free_keys()
            missing = free - {target.key}
            if missing:
                raise UnresolvedParameterError(
                    "the extension refers to previsions not assessed in the family",
                    missing)
            if reduced.degree() > 1:
                raise EngineError("extension value enters a point nonlinearly")
            coeff = reduced.terms.get((target.key,), ZERO)
            const = reduced.terms.get((), ZERO)
            const_row.append(const)
            coeff_row.append(coeff)
        const_part.append(const_row)
        coeff_part.append(coeff_row)
    # Variables: lambda (m), nu (m), slack (m) with nu_h <= lambda_h.
    nvars = 3 * m
    A: list[list[Fraction]] = []
    b: list[Fraction] = []
    for i in range(n):
        row = [ZERO] * nvars
        for h in range(m):
            row[h] = const_part[h][i]
            row[m + h] = coeff_part[h][i]
        A.append(row)
        b.append(assessment.values[i])
    row = [ZERO] * nvars
    for h in range(m):
        row[h] = const_part[h][n]
        row[m + h] = coeff_part[h][n] - ONE
    A.append(row)
    b.append(ZERO)
    A.append([ONE] * m + [ZERO] * (2 * m))
    b.append(ONE)
    for h in range(m):
        row = [ZERO] * nvars
        row[h] = ONE
        row[m + h] = -ONE
        row[2 * m + h] = -ONE
        A.append(row)
        b.append(ZERO)
    cost = [ZERO] * m + [ONE] * m + [ZERO] * m
    low = simplex.optimize(A, b, cost, maximize=False)
    if low is None:
        return None
    high = simplex.optimize(A, b, cost, maximize=True)
    assert high is not None
    return low[0], high[0]


_SEED_DENOMINATORS = range(1, 33)


def _seed_candidates(bracket: tuple[Fraction, Fraction],
                     hints: list[Fraction]) -> list[Fraction]:
    lo, hi = bracket
    seen = set()
    out = []
    mid = (lo + hi) / 2
    for t in hints + [mid, lo, hi, Fraction(1, 2), ZERO, ONE]:
        if isinstance(t, Fraction) and 0 <= t <= 1 and t not in seen:
            seen.add(t)
            out.append(t)
    for q in _SEED_DENOMINATORS:
        for p in range(q + 1):
            t = Fraction(p, q)
            if lo <= t <= hi and t not in seen:
                seen.add(t)
                out.append(t)
    return out


def extension_bounds(assessment: Assessment, target, *, depth: int = 20,
                     use_closed_forms: bool = True,
                     interior_samples: int = 2) -> ExtensionBounds:
    """Infimum and supremum of the coherent extension values for ``target``.

    Closed-form candidates (when a propagation rule from the catalogue
    matches) and the outer hull relaxation are certified against the
    coherence oracle; only if certification fails does the engine fall back
    to bisection to ``2**-depth`` resolution, reporting the simplest rational
    in the final bracket.  The interval property of the coherent set is
    asserted by sampling interior points.
    """
    target = as_quantity(target)
    if not assessment.is_numeric:
        raise DomainError("extension bounds need a numeric assessment")
    base = check_coherence(assessment)
    if not base.coherent:
        raise IncoherentPremisesError("base assessment is incoherent")
    for q, v in zip(assessment.family, assessment.values):
        if q.key == target.key:
            return ExtensionBounds(v, v, True, True)

    eps = Fraction(1, 2 ** depth)
    cache: dict[Fraction, bool] = {}

    def oracle(t: Fraction) -> bool:
        if t not in cache:
            cache[t] = check_coherence(assessment.extended(target, t)).coherent
        return cache[t]

    rule = None
    if use_closed_forms:
        from . import bounds as _bounds
        rule = _bounds.match_rule(assessment, target)

    outer_cache: list = []

    def outer_range() -> tuple[Fraction, Fraction] | None:
        if not outer_cache:
            outer_cache.append(_parametric_range(assessment, target))
        return outer_cache[0]

    def resolve(side: str) -> tuple[Fraction, bool]:
        """Returns (endpoint, exact) for side in {"lower", "upper"}."""
        lower_side = side == "lower"
        if rule is not None:
            c = rule.lower if lower_side else rule.upper
            boundary = ZERO if lower_side else ONE
            beyond = c - eps if lower_side else c + eps
            if oracle(c) and (c == boundary or not oracle(beyond)):
                return c, True
        outer = outer_range()
        if outer is not None:
            c = outer[0] if lower_side else outer[1]
            if 0 <= c <= 1 and oracle(c):
                return c, True
        # Bisection between the outer bound (incoherent) and a coherent seed.
        hints = []
        if rule is not None:
            hints += [rule.lower, rule.upper, (rule.lower + rule.upper) / 2]
        bracket = outer if outer is not None else (ZERO, ONE)
        bracket = (max(ZERO, bracket[0]), min(ONE, bracket[1]))
        seed = next((t for t in _seed_candidates(bracket, hints) if oracle(t)), None)
        if seed is None:
            raise EngineError("no coherent extension value found; "
                              "cannot bracket the endpoint")
        far = bracket[0] if lower_side else bracket[1]
        far = max(ZERO, far) if lower_side else min(ONE, far)
        if oracle(far):
            return far, True
        a, b = (far, seed) if lower_side else (seed, far)
        # Invariant: for the lower side a is incoherent and b coherent (and
        # symmetrically for the upper side).
        for _ in range(depth):
            mid = (a + b) / 2
            if oracle(mid):
                if lower_side:
                    b = mid
                else:
                    a = mid
            else:
                if lower_side:
                    a = mid
                else:
                    b = mid
        if lower_side:
            cand = simplest_rational(a, b, open_left=True, open_right=False)
        else:
            cand = simplest_rational(a, b, open_left=False, open_right=True)
        assert cand is not None
        if oracle(cand):
            boundary = ZERO if lower_side else ONE
            beyond = cand - eps if lower_side else cand + eps
            exact = cand == boundary or not oracle(beyond)
            return cand, exact
        return (b, False) if lower_side else (a, False)

    lower, lower_exact = resolve("lower")
    upper, upper_exact = resolve("upper")
    if lower > upper:
        raise EngineError("extension bounds crossed; coherent set inconsistent")
    if lower < upper and interior_samples > 0:
        span = upper - lower
        for k in range(1, interior_samples + 1):
            t = lower + span * Fraction(k, interior_samples + 1)
            if not oracle(t):
                raise EngineError(
                    "coherent extension set is not an interval at "
                    f"{t}; interval assumption violated")
    rule_name = None
    if rule is not None and (rule.lower, rule.upper) == (lower, upper):
        rule_name = rule.name
    return ExtensionBounds(lower, upper, lower_exact, upper_exact, rule_name)
