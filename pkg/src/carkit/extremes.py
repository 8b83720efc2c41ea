"""Deciding the CAR property, testing extremality, and enumerating all vertices.

The set of CAR mechanisms over a fixed space is a convex polytope; a mechanism
is a vertex exactly when the incidence system of its support pins it down as
the unique, strictly positive solution of M z = 1.  Vertices therefore have at
most n support sets, so exhaustive enumeration over covers by at most n subsets
finds them all.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .linalg import SolutionKind, SolveOutcome, solve_unit_masks
from .model import (
    CarMechanism,
    CoarseningMechanism,
    InvariantError,
    SampleSpace,
    Subset,
    validate_coarsening,
)

# Families of <= n subsets drawn from the 2^n - 1 candidates blow up roughly
# like C(2^n - 1, n); n = 5 stays interactive, n = 6 takes minutes.
ENUMERATION_BOUND = 5


@dataclass(frozen=True)
class CarDisagreement:
    """Two members of one set that are coarsened to it with different probabilities."""

    subset: Subset
    x: int
    x_prob: Fraction
    y: int
    y_prob: Fraction

    def __str__(self) -> str:
        return (
            f"{self.subset!r}: probability {self.x_prob} for element {self.x} "
            f"but {self.y_prob} for element {self.y}"
        )


@dataclass(frozen=True)
class CarCheck:
    """Outcome of the CAR decision: the collapsed mechanism, or the disagreements."""

    mechanism: CarMechanism | None
    disagreements: tuple[CarDisagreement, ...]

    @property
    def is_car(self) -> bool:
        return self.mechanism is not None


def check_car(mech: CoarseningMechanism) -> CarCheck:
    """Decide whether a coarsening mechanism treats all members of each set alike.

    An absent entry counts as probability zero, so a set reported for one of
    its members but never for another is a disagreement, not a pass.  The
    mechanism must be a valid coarsening law (see `validate_coarsening`).
    """
    problems = validate_coarsening(mech)
    if problems:
        raise InvariantError(
            "not a valid coarsening mechanism: " + "; ".join(str(p) for p in problems)
        )
    support = sorted({subset for _, subset in mech.entries})
    zero = Fraction(0)
    pi: dict[Subset, Fraction] = {}
    disagreements: list[CarDisagreement] = []
    for subset in support:
        values = [(x, mech.entries.get((x, subset), zero)) for x in subset.members]
        agreed = True
        for (x, px), (y, py) in itertools.combinations(values, 2):
            if px != py:
                disagreements.append(CarDisagreement(subset, x, px, y, py))
                agreed = False
        if agreed:
            pi[subset] = values[0][1]
    if disagreements:
        return CarCheck(None, tuple(disagreements))
    return CarCheck(CarMechanism(mech.space, pi), ())


@dataclass(frozen=True)
class ExtremeCheck:
    """Vertex test result; the certificate is the unique solution over the support."""

    extreme: bool
    certificate: tuple[Fraction, ...] | None
    reason: str | None

    def __bool__(self) -> bool:
        return self.extreme


def is_extreme(car: CarMechanism) -> ExtremeCheck:
    """Test whether a CAR mechanism is a vertex of the CAR polytope.

    True iff the incidence system of the support gives M z = 1 a unique,
    strictly positive solution; the certificate is that solution in canonical
    support order, which for a valid mechanism necessarily equals its stored
    probabilities.
    """
    support = car.support
    outcome = solve_unit_masks(car.space.n, tuple(s.mask for s in support))
    if outcome.kind is SolutionKind.UNDERDETERMINED:
        return ExtremeCheck(False, None, "rank-deficient support: other CAR mechanisms share it")
    if outcome.kind is SolutionKind.NO_SOLUTION:
        return ExtremeCheck(False, None, "support system is inconsistent")
    assert outcome.z is not None
    if any(value <= 0 for value in outcome.z):
        return ExtremeCheck(False, None, "unique solution has a nonpositive entry")
    return ExtremeCheck(True, outcome.z, None)


def cover_families(
    subsets: Sequence[Subset], full_mask: int, max_sets: int
) -> Iterator[tuple[Subset, ...]]:
    """Families of 1..max_sets distinct sets from `subsets` whose union is everything.

    Families are emitted smaller-first, then lexicographically by position in
    `subsets`, so passing a canonically sorted pool gives the canonical family
    order.  Branches whose remaining pool can no longer complete the cover are
    pruned by a suffix-union table.
    """
    masks = [s.mask for s in subsets]
    count = len(masks)
    suffix = [0] * (count + 1)
    for i in range(count - 1, -1, -1):
        suffix[i] = suffix[i + 1] | masks[i]
    chosen: list[int] = []

    def walk(start: int, union: int, need: int) -> Iterator[tuple[Subset, ...]]:
        if need == 0:
            if union == full_mask:
                yield tuple(subsets[i] for i in chosen)
            return
        for i in range(start, count - need + 1):
            if union | suffix[i] != full_mask:
                break
            chosen.append(i)
            yield from walk(i + 1, union | masks[i], need - 1)
            chosen.pop()

    for size in range(1, max_sets + 1):
        yield from walk(0, 0, size)


def _check_bound(n: int, allow_large: bool) -> None:
    if n > ENUMERATION_BOUND and not allow_large:
        raise ValueError(
            f"n={n} exceeds the enumeration bound {ENUMERATION_BOUND}; "
            "pass allow_large=True (CLI: --max-n-override) to force it"
        )


def enumerate_covers(
    n: int, max_sets: int, *, allow_large: bool = False
) -> Iterator[tuple[Subset, ...]]:
    """All covers of a size-n space by 1..max_sets distinct nonempty subsets.

    Each family appears exactly once, in canonical order (family size, then
    lexicographic over the canonical subset list).
    """
    if max_sets < 1:
        raise ValueError("max_sets must be at least 1")
    space = SampleSpace(n)
    _check_bound(n, allow_large)
    return cover_families(space.subsets(), space.full_mask, max_sets)


def enumerate_extremes(n: int, *, allow_large: bool = False) -> list[CarMechanism]:
    """Every extreme CAR mechanism over a size-n space, canonically ordered.

    Tries each cover with at most n sets; a cover contributes a vertex exactly
    when its system has a unique strictly positive solution.  Supports are
    never revisited, so the output is duplicate-free.
    """
    space = SampleSpace(n)
    _check_bound(n, allow_large)
    found: list[CarMechanism] = []
    for family in cover_families(space.subsets(), space.full_mask, n):
        outcome = solve_unit_masks(n, tuple(s.mask for s in family))
        if outcome.kind is SolutionKind.UNIQUE and all(value > 0 for value in outcome.z):
            found.append(CarMechanism(space, dict(zip(family, outcome.z))))
    return found


@functools.lru_cache(maxsize=65536)
def _solve_family(n: int, masks: tuple[int, ...]) -> SolveOutcome:
    # Decomposition re-solves the same shrinking supports over and over; the
    # solver is pure, so memoizing by mask tuple is free determinism-wise.
    return solve_unit_masks(n, masks)


def extremes_within(space: SampleSpace, subsets: Sequence[Subset]) -> Iterator[CarMechanism]:
    """Extreme mechanisms whose support uses only the given sets, canonically ordered."""
    pool = sorted(subsets)
    max_size = min(space.n, len(pool))
    if max_size < 1:
        return
    for family in cover_families(pool, space.full_mask, max_size):
        outcome = _solve_family(space.n, tuple(s.mask for s in family))
        if outcome.kind is SolutionKind.UNIQUE and all(value > 0 for value in outcome.z):
            yield CarMechanism(space, dict(zip(family, outcome.z)))
