"""Exact rank and unit-vector solving for 0/1 incidence matrices of set covers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable

from .model import InvariantError, SampleSpace, Subset


@dataclass(frozen=True)
class IncidenceSystem:
    """The 0/1 matrix of a cover: rows are elements, columns are the given sets.

    Column order is the caller's, because some natural matrix families (the
    staircase matrices in `fibonacci`) state their solutions in construction
    order; `from_cover` sorts canonically for enumeration work.  Columns must
    be distinct and nonempty and must jointly cover every element.
    """

    space: SampleSpace
    columns: tuple[Subset, ...]

    def __post_init__(self) -> None:
        columns = tuple(self.columns)
        object.__setattr__(self, "columns", columns)
        if not columns:
            raise InvariantError("a cover needs at least one set")
        union = 0
        seen: set[int] = set()
        for column in columns:
            if not column.within(self.space):
                raise InvariantError(f"{column!r} is not a subset of the sample space")
            if column.mask in seen:
                raise InvariantError(f"duplicate column {column!r}")
            seen.add(column.mask)
            union |= column.mask
        if union != self.space.full_mask:
            raise InvariantError("columns do not cover every element")

    @classmethod
    def from_cover(cls, space: SampleSpace, sets: Iterable[Subset]) -> "IncidenceSystem":
        return cls(space, tuple(sorted(sets)))

    def rows(self) -> list[list[int]]:
        return [[1 if x in column else 0 for column in self.columns] for x in self.space.elements()]


class SolutionKind(Enum):
    UNIQUE = "unique"
    NO_SOLUTION = "no-solution"
    UNDERDETERMINED = "underdetermined"


@dataclass(frozen=True)
class SolveOutcome:
    """Classification of the solution set of (incidence matrix) @ z = all-ones.

    `z` is present exactly for the unique case and then satisfies the system
    with exact equality; it is listed in the system's column order.
    """

    kind: SolutionKind
    z: tuple[Fraction, ...] | None = None


NO_SOLUTION = SolveOutcome(SolutionKind.NO_SOLUTION)
UNDERDETERMINED = SolveOutcome(SolutionKind.UNDERDETERMINED)


def _eliminate(rows: list[list[int]], width: int) -> int:
    """Fraction-free (Bareiss) forward elimination on the leading `width` columns.

    Mutates `rows` in place and returns the rank.  Every update divides by the
    previous pivot, which is exact by the Bareiss minor identity, so entries
    stay integers and grow only like minors of the original matrix rather than
    exponentially.  Pivots are the first nonzero entry in column order; with
    exact arithmetic no numerical pivoting is needed and the result is
    bit-deterministic.
    """
    total = len(rows[0])
    rank = 0
    prev = 1
    for col in range(width):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        head = rows[rank]
        p = head[col]
        for r in range(rank + 1, len(rows)):
            row = rows[r]
            lead = row[col]
            # Zero-lead rows are rescaled too: Bareiss exactness needs every
            # row below the pivot to carry the same minor structure.
            for c in range(col, total):
                row[c] = (p * row[c] - lead * head[c]) // prev
        prev = p
        rank += 1
    return rank


def column_rank(system: IncidenceSystem) -> int:
    """Rank of the incidence matrix over the rationals."""
    rows = system.rows()
    return _eliminate(rows, len(system.columns))


def solve_unit_masks(n: int, masks: tuple[int, ...]) -> SolveOutcome:
    """`solve_unit` on raw column bitmasks, for hot enumeration loops.

    Returns UNIQUE with the exact solution when the matrix has full column rank
    and the system is consistent, UNDERDETERMINED when consistent with a rank
    deficit, and NO_SOLUTION otherwise.
    """
    m = len(masks)
    rows = [[(mask >> x) & 1 for mask in masks] + [1] for x in range(n)]
    rank = _eliminate(rows, m)
    if any(rows[r][m] for r in range(rank, n)):
        return NO_SOLUTION
    if rank < m:
        return UNDERDETERMINED
    # Full column rank: the eliminated block is upper triangular with nonzero
    # diagonal, so back-substitution over Fractions recovers the reduced z.
    z = [Fraction(0)] * m
    for i in range(m - 1, -1, -1):
        acc = Fraction(rows[i][m])
        for j in range(i + 1, m):
            if rows[i][j]:
                acc -= rows[i][j] * z[j]
        z[i] = acc / rows[i][i]
    return SolveOutcome(SolutionKind.UNIQUE, tuple(z))


def solve_unit(system: IncidenceSystem) -> SolveOutcome:
    """Classify the solutions of M z = 1 for an incidence system, exactly."""
    return solve_unit_masks(system.space.n, tuple(col.mask for col in system.columns))
