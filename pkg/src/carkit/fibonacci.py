"""Staircase incidence matrices whose unique CAR solution has Fibonacci height.

The staircase family is the exponential-complexity witness: for odd n the n-th
matrix pins down an extreme CAR mechanism whose multicover height is the n-th
Fibonacci number, far beyond what partitions (height 1) ever need, while the
general upper bound for a size-n space is n!.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .extremes import is_extreme
from .linalg import IncidenceSystem, SolutionKind, solve_unit
from .model import CarMechanism, SampleSpace, Subset
from .multicover import UniformMulticover, to_multicover

VERIFY_BOUND = 25

_fib_cache = [1, 1]


def fib(j: int) -> int:
    """The j-th Fibonacci number: F(1) = F(2) = 1, F(j) = F(j-1) + F(j-2)."""
    if j < 1:
        raise ValueError("Fibonacci numbers start at index 1")
    while len(_fib_cache) < j:
        _fib_cache.append(_fib_cache[-1] + _fib_cache[-2])
    return _fib_cache[j - 1]


def staircase_matrix(n: int) -> IncidenceSystem:
    """The n-th zigzag-bordered 0/1 incidence system, columns in construction order.

    Start from the single 1x1 cover.  Growing an odd-sized matrix prepends an
    isolated element covered only by its own new set; growing an even-sized one
    prepends an element lying in all old sets plus one new set holding all old
    elements.  The result is symmetric, and for odd n its unit system has the
    Fibonacci-ratio solution checked by `verify_fibonacci_height`.
    """
    if n < 1:
        raise ValueError("matrix size must be at least 1")
    cols = [1]
    for size in range(1, n):
        if size % 2 == 1:
            cols = [1] + [mask << 1 for mask in cols]
        else:
            cols = [((1 << (size + 1)) - 1) ^ 1] + [(mask << 1) | 1 for mask in cols]
    return IncidenceSystem(SampleSpace(n), tuple(Subset(mask) for mask in cols))


def fibonacci_solution(n: int) -> tuple[Fraction, ...]:
    """The exact unit-system solution of the odd staircase: (F(n-1), ..., F(1), 1) / F(n)."""
    if n < 1:
        raise ValueError("size must be at least 1")
    if n % 2 == 0:
        raise ValueError("the Fibonacci solution exists for odd sizes only")
    denominator = fib(n)
    numerators = [fib(i) for i in range(n - 1, 0, -1)] + [1]
    return tuple(Fraction(num, denominator) for num in numerators)


@dataclass(frozen=True)
class HeightWitnessReport:
    """Everything checked about one odd staircase witness, with per-claim verdicts."""

    n: int
    system: IncidenceSystem
    solution: tuple[Fraction, ...]
    multicover: UniformMulticover | None
    checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def height(self) -> int | None:
        return self.multicover.k if self.multicover is not None else None


def verify_fibonacci_height(n: int, *, max_n: int = VERIFY_BOUND) -> HeightWitnessReport:
    """Check every claim packaged in the odd staircase witness at size n.

    Verified: the solver finds the unit system's solution uniquely and it is
    the Fibonacci-ratio vector; substituting that vector back gives exact unit
    row sums (independent of the solver); the mechanism is extreme; its
    multicover height is F(n) with multiplicities (F(n-1), ..., F(1), 1); and
    the telescoping identity F(n) = F(1) + ... + F(n-2) + 1 holds.  A failed
    check marks the report rather than raising, since it would mean a bug, not
    bad input.
    """
    if n % 2 == 0:
        raise ValueError("the witness exists for odd sizes only")
    if n > max_n:
        raise ValueError(f"n={n} exceeds the practical bound {max_n}")
    system = staircase_matrix(n)
    expected = fibonacci_solution(n)
    checks: dict[str, bool] = {}
    outcome = solve_unit(system)
    checks["unique_solution"] = (
        outcome.kind is SolutionKind.UNIQUE and outcome.z == expected
    )
    checks["row_sums"] = all(
        sum((z for column, z in zip(system.columns, expected) if x in column), Fraction(0)) == 1
        for x in system.space.elements()
    )
    multicover: UniformMulticover | None = None
    if checks["row_sums"]:
        mechanism = CarMechanism(system.space, dict(zip(system.columns, expected)))
        checks["extreme"] = is_extreme(mechanism).extreme
        multicover = to_multicover(mechanism)
        checks["height_is_fibonacci"] = multicover.k == fib(n)
        expected_mults = [fib(i) for i in range(n - 1, 0, -1)] + [1]
        checks["multiplicities"] = [
            multicover.mults[column] for column in system.columns
        ] == expected_mults
    else:
        checks["extreme"] = False
        checks["height_is_fibonacci"] = False
        checks["multiplicities"] = False
    checks["telescoping_identity"] = fib(n) == sum(fib(i) for i in range(1, n - 1)) + 1
    return HeightWitnessReport(n, system, expected, multicover, checks)
