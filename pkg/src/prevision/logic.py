"""Event algebra over a finite workspace of atoms.

A formula is stored canonically as the set of satisfying truth assignments,
encoded as a bitmask over the workspace's minterms.  Logical constraints
declared on the workspace (formulas asserted impossible) simply remove
minterms from the universe, so equality, implication and emptiness tests are
all "modulo constraints" by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DomainError

MAX_ATOMS = 20

RESERVED_WORDS = frozenset(
    ["and", "or", "not", "true", "false", "cond", "given", "bicond", "quasi"]
)


def _is_identifier(name: str) -> bool:
    return name.isidentifier() and name.lower() not in RESERVED_WORDS


class Workspace:
    """An ordered set of atoms plus the minterms allowed by its constraints.

    Minterm indices encode assignments with atom 0 as the most significant
    bit, so descending index order is lexicographic order of assignments
    with "true" sorting first.
    """

    __slots__ = ("atoms", "n", "size", "full_mask", "allowed", "_atom_masks",
                 "_index")

    def __init__(self, atoms: Sequence[str], impossible: Iterable[int] = ()):
        atoms = tuple(atoms)
        if not atoms:
            raise DomainError("workspace needs at least one atom")
        if len(atoms) > MAX_ATOMS:
            raise DomainError(f"at most {MAX_ATOMS} atoms per workspace")
        seen = set()
        for name in atoms:
            if not _is_identifier(name):
                raise DomainError(f"invalid atom name {name!r}")
            if name in seen:
                raise DomainError(f"duplicate atom name {name!r}")
            seen.add(name)
        self.atoms = atoms
        self.n = len(atoms)
        self.size = 1 << self.n
        self.full_mask = (1 << self.size) - 1
        self._atom_masks = tuple(self._var_mask(j) for j in range(self.n))
        self._index = {name: j for j, name in enumerate(atoms)}
        allowed = self.full_mask
        for mask in impossible:
            allowed &= self.full_mask & ~mask
        if allowed == 0:
            raise DomainError("constraints leave no possible world")
        self.allowed = allowed

    def _var_mask(self, j: int) -> int:
        # Bit b of a minterm index is the truth value of atom n-1-b.
        b = self.n - 1 - j
        block = ((1 << (1 << b)) - 1) << (1 << b)
        period = 1 << (b + 1)
        mask = 0
        for start in range(0, self.size, period):
            mask |= block << start
        return mask

    def with_constraints(self, impossible: Iterable["Formula"]) -> "Workspace":
        """A copy of this workspace with further formulas asserted impossible."""
        masks = []
        for f in impossible:
            if f.workspace is not self:
                raise DomainError("constraint formula from a different workspace")
            masks.append(f.mask)
        masks.append(self.full_mask & ~self.allowed)
        return Workspace(self.atoms, masks)

    # -- formula constructors ------------------------------------------------

    def formula(self, mask: int) -> "Formula":
        return Formula(self, mask & self.allowed)

    def atom(self, name: str) -> "Formula":
        try:
            j = self._index[name]
        except KeyError:
            raise DomainError(f"unknown atom {name!r}") from None
        return self.formula(self._atom_masks[j])

    @property
    def true(self) -> "Formula":
        return self.formula(self.full_mask)

    @property
    def false(self) -> "Formula":
        return self.formula(0)

    def minterm(self, index: int) -> "Formula":
        return self.formula(1 << index)

    def atom_value(self, index: int, j: int) -> bool:
        return bool((index >> (self.n - 1 - j)) & 1)

    def minterm_text(self, index: int) -> str:
        lits = []
        for j, name in enumerate(self.atoms):
            lits.append(name if self.atom_value(index, j) else f"not {name}")
        return " and ".join(lits)

    def __repr__(self) -> str:
        return f"Workspace({list(self.atoms)!r})"


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Formula:
    """A canonical event: the set of allowed assignments satisfying it."""

    workspace: Workspace
    mask: int

    def _check(self, other: "Formula") -> None:
        if self.workspace is not other.workspace:
            raise DomainError("formulas belong to different workspaces")

    def __and__(self, other: "Formula") -> "Formula":
        self._check(other)
        return Formula(self.workspace, self.mask & other.mask)

    def __or__(self, other: "Formula") -> "Formula":
        self._check(other)
        return Formula(self.workspace, self.mask | other.mask)

    def __invert__(self) -> "Formula":
        return Formula(self.workspace, self.workspace.allowed & ~self.mask)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Formula)
                and self.workspace is other.workspace
                and self.mask == other.mask)

    def __hash__(self) -> int:
        return hash((id(self.workspace), self.mask))

    @property
    def is_false(self) -> bool:
        return self.mask == 0

    @property
    def is_true(self) -> bool:
        return self.mask == self.workspace.allowed

    def implies(self, other: "Formula") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def count(self) -> int:
        return bin(self.mask).count("1")

    def minterms(self) -> list[int]:
        """Satisfying assignments, lexicographic ("true" first)."""
        return sorted(iter_bits(self.mask), reverse=True)

    def to_text(self) -> str:
        """Render in the formula grammar; reparsing yields an equal formula."""
        return render_formula(self)

    def __repr__(self) -> str:
        return f"<Formula {self.to_text()}>"


def implies(f: Formula, g: Formula) -> bool:
    """True iff f logically implies g, i.e. f and not g is impossible."""
    return f.implies(g)


@dataclass(frozen=True)
class ConditionalEvent:
    """A three-valued entity: true on EH, false on (not E)H, void on not H."""

    consequent: Formula
    antecedent: Formula

    def __post_init__(self):
        self.consequent._check(self.antecedent)
        if self.antecedent.is_false:
            raise DomainError("conditional event needs a possible antecedent")

    @property
    def workspace(self) -> Workspace:
        return self.antecedent.workspace

    @property
    def true_part(self) -> Formula:
        return self.consequent & self.antecedent

    @property
    def false_part(self) -> Formula:
        return ~self.consequent & self.antecedent

    @property
    def void_part(self) -> Formula:
        return ~self.antecedent

    @property
    def key(self) -> tuple:
        # E|H and EH|H are the same conditional event.
        return ("event", self.true_part.mask, self.antecedent.mask)

    def status(self, index: int) -> str:
        bit = 1 << index
        if self.true_part.mask & bit:
            return "T"
        if self.false_part.mask & bit:
            return "F"
        return "V"

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, ConditionalEvent)
                and self.workspace is other.workspace
                and self.key == other.key)

    def __hash__(self) -> int:
        return hash((id(self.workspace),) + self.key)

    def __repr__(self) -> str:
        return f"<ConditionalEvent {self.consequent.to_text()} | {self.antecedent.to_text()}>"


def gn_inclusion(c1: ConditionalEvent, c2: ConditionalEvent) -> bool:
    """Goodman-Nguyen inclusion: E1H1 implies E2H2 and (not E2)H2 implies (not E1)H1."""
    return (c1.true_part.implies(c2.true_part)
            and c2.false_part.implies(c1.false_part))


def constituents(conditions: Sequence[Formula]) -> tuple[Formula | None, list[Formula]]:
    """Constituents generated by a list of conditioning events.

    Returns ``(c0, [c1, ..., cm])`` where the c_h are the single allowed
    assignments implying the disjunction of the conditions, in lexicographic
    order, and c0 is the remaining event (all conditions false), present only
    when it is possible.
    """
    if not conditions:
        raise DomainError("need at least one condition")
    ws = conditions[0].workspace
    union = ws.false
    for h in conditions:
        if h.workspace is not ws:
            raise DomainError("conditions belong to different workspaces")
        if h.is_false:
            raise DomainError("conditions must be possible events")
        union = union | h
    parts = [ws.minterm(i) for i in union.minterms()]
    rest = ~union
    return (None if rest.is_false else rest), parts


# -- rendering ----------------------------------------------------------------

def _prime_implicants(ws: Workspace, mask: int) -> list[tuple[int, int]]:
    """Prime implicants of ``mask`` with the disallowed minterms as don't-cares.

    Implicants are (care, values) pairs over atom positions: a minterm m is
    covered when m agrees with ``values`` on every atom in ``care``.
    """
    dont_care = ws.full_mask & ~ws.allowed
    all_care = ws.size - 1
    current = {(all_care, m) for m in iter_bits(mask | dont_care)}
    primes: set[tuple[int, int]] = set()
    while current:
        merged: set[tuple[int, int]] = set()
        used: set[tuple[int, int]] = set()
        by_care: dict[int, set[int]] = {}
        for care, vals in current:
            by_care.setdefault(care, set()).add(vals)
        for care, vals_set in by_care.items():
            for vals in vals_set:
                for b in iter_bits(care):
                    partner = vals ^ (1 << b)
                    if partner in vals_set:
                        merged.add((care & ~(1 << b), vals & ~(1 << b)))
                        used.add((care, vals))
                        used.add((care, partner))
        primes |= current - used
        current = merged
    return sorted(primes)


def _implicant_mask(ws: Workspace, care: int, vals: int) -> int:
    mask = ws.full_mask
    for b in iter_bits(care):
        j = ws.n - 1 - b
        amask = ws._atom_masks[j]
        mask &= amask if (vals >> b) & 1 else ~amask
    return mask & ws.full_mask


def _implicant_text(ws: Workspace, care: int, vals: int) -> str:
    if care == 0:
        return "true"
    lits = []
    for j, name in enumerate(ws.atoms):
        b = ws.n - 1 - j
        if (care >> b) & 1:
            lits.append(name if (vals >> b) & 1 else f"not {name}")
    return " and ".join(lits)


def render_formula(f: Formula) -> str:
    """Human-readable rendering as a disjunction of cubes.

    Greedy prime-implicant cover; disallowed minterms are don't-cares, so the
    output can be shorter than the allowed satisfying set suggests.
    """
    ws = f.workspace
    if f.is_false:
        return "false"
    if f.is_true:
        return "true"
    if ws.n > 12:
        return " or ".join(ws.minterm_text(i) for i in f.minterms())
    primes = _prime_implicants(ws, f.mask)
    target = f.mask
    chosen: list[tuple[int, int]] = []
    remaining = target
    while remaining:
        best = None
        best_gain = -1
        for care, vals in primes:
            gain = bin(_implicant_mask(ws, care, vals) & remaining).count("1")
            if gain > best_gain:
                best, best_gain = (care, vals), gain
        assert best is not None and best_gain > 0
        chosen.append(best)
        remaining &= ~_implicant_mask(ws, *best)
        primes.remove(best)

    def literal_key(cv: tuple[int, int]) -> tuple:
        care, vals = cv
        lits = []
        for j in range(ws.n):
            b = ws.n - 1 - j
            if (care >> b) & 1:
                lits.append((j, 0 if (vals >> b) & 1 else 1))
        return tuple(lits)

    chosen.sort(key=literal_key)
    return " or ".join(_implicant_text(ws, care, vals) for care, vals in chosen)
