"""Uniform multicovers and their exact correspondence with rational CAR mechanisms.

A k-cover is a multiset of subsets covering every element exactly k times; it
generates the CAR mechanism with probability multiplicity/k per set.  In the
other direction, a rational CAR mechanism comes from exactly one canonical
multicover, whose height k is the lcm of the probability denominators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .extremes import is_extreme
from .model import CarMechanism, InvariantError, SampleSpace, Subset


@dataclass(frozen=True)
class UniformMulticover:
    """A multiset of subsets meant to cover every element exactly k times.

    Stored as (set, multiplicity) pairs and never expanded: heights grow like
    Fibonacci numbers, so the expanded multiset is infeasible.  Exact uniform
    coverage is checked by `validate_multicover`, not at construction, so
    broken inputs can be loaded and reported.
    """

    space: SampleSpace
    k: int
    mults: Mapping[Subset, int]

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise InvariantError(f"height must be a positive integer, got {self.k!r}")
        clean: dict[Subset, int] = {}
        for subset in sorted(self.mults):
            if not subset.within(self.space):
                raise InvariantError(f"{subset!r} is not a subset of the sample space")
            mult = self.mults[subset]
            if not isinstance(mult, int) or mult < 1:
                raise InvariantError(f"multiplicity of {subset!r} must be a positive integer")
            clean[subset] = mult
        if not clean:
            raise InvariantError("a multicover needs at least one set")
        object.__setattr__(self, "mults", clean)

    def coverage(self, x: int) -> int:
        """How many times element x is covered, counting multiplicity."""
        return sum(m for s, m in self.mults.items() if x in s)


@dataclass(frozen=True)
class CoverageViolation:
    x: int
    count: int
    k: int

    def __str__(self) -> str:
        return f"element {self.x} is covered {self.count} times, expected {self.k}"


def validate_multicover(mc: UniformMulticover) -> list[CoverageViolation]:
    """Report every element not covered exactly k times (empty list means valid)."""
    return [
        CoverageViolation(x, count, mc.k)
        for x in mc.space.elements()
        if (count := mc.coverage(x)) != mc.k
    ]


def _require_valid(mc: UniformMulticover) -> None:
    problems = validate_multicover(mc)
    if problems:
        raise InvariantError("not a uniform multicover: " + "; ".join(str(p) for p in problems))


def from_multicover(mc: UniformMulticover) -> CarMechanism:
    """The CAR mechanism a multicover generates: probability multiplicity/height."""
    _require_valid(mc)
    return CarMechanism(mc.space, {s: Fraction(m, mc.k) for s, m in mc.mults.items()})


def to_multicover(car: CarMechanism) -> UniformMulticover:
    """The canonical multicover generating `car`.

    The height is the lcm of the (reduced) probability denominators, which
    makes the result canonical automatically: no prime can divide the height
    and every multiplicity at once.
    """
    k = math.lcm(*(p.denominator for p in car.pi.values()))
    return UniformMulticover(car.space, k, {s: int(p * k) for s, p in car.pi.items()})


def canonicalize(mc: UniformMulticover) -> UniformMulticover:
    """Divide out the common factor of the height and all multiplicities."""
    _require_valid(mc)
    g = math.gcd(mc.k, *mc.mults.values())
    if g == 1:
        return mc
    return UniformMulticover(mc.space, mc.k // g, {s: m // g for s, m in mc.mults.items()})


def is_extreme_multicover(mc: UniformMulticover) -> bool:
    """Whether the generated CAR mechanism is a vertex of the CAR polytope.

    Scale-invariant, so canonical and non-canonical representatives agree.
    """
    return is_extreme(from_multicover(mc)).extreme


def has_uniform_submulticover(mc: UniformMulticover) -> bool:
    """Direct search for a proper nonempty sub-multiset that covers uniformly.

    Exponential in the product of multiplicities; this is a small-size
    cross-check oracle for `is_extreme_multicover` (extreme multicovers are
    conjecturally exactly the ones without such a sub-multiset), not a
    production path.
    """
    _require_valid(mc)
    sets = list(mc.mults)
    bounds = [mc.mults[s] for s in sets]
    for combo in itertools.product(*(range(b + 1) for b in bounds)):
        if not any(combo) or list(combo) == bounds:
            continue
        degrees = {
            x: sum(c for s, c in zip(sets, combo) if x in s) for x in mc.space.elements()
        }
        distinct = set(degrees.values())
        if len(distinct) == 1 and distinct.pop() >= 1:
            return True
    return False
