"""Sample spaces, subsets, and coarsening/CAR mechanisms with exact probabilities.

Every probability in the data model is a `fractions.Fraction`, so the row-sum
identities that define coarsening mechanisms hold exactly, never up to
rounding.  All values are immutable after construction and every operation is a
pure function; floating point enters only at the approximation and statistics
boundaries (see `decompose` and `sampler`).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union


class InvariantError(ValueError):
    """A structural invariant of one of the domain types is violated."""


@dataclass(frozen=True)
class SampleSpace:
    """The finite set of underlying outcomes, labeled 0 .. n-1."""

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise InvariantError(f"a sample space needs at least one element, got n={self.n!r}")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def elements(self) -> range:
        return range(self.n)

    def subsets(self) -> list["Subset"]:
        """All nonempty subsets in canonical order (cardinality, then members)."""
        return sorted(Subset(mask) for mask in range(1, 1 << self.n))


@functools.total_ordering
@dataclass(frozen=True)
class Subset:
    """A nonempty subset of a sample space, stored as a bitmask.

    The bit encoding makes equality structural and membership O(1); canonical
    ordering (by cardinality, then lexicographically on the sorted member list)
    is what every enumeration and serialization in the package uses.
    """

    mask: int

    def __post_init__(self) -> None:
        if not isinstance(self.mask, int) or self.mask <= 0:
            raise InvariantError("subsets must be nonempty")

    @classmethod
    def of(cls, members: Iterable[int]) -> "Subset":
        mask = 0
        for x in members:
            if not isinstance(x, int) or x < 0:
                raise InvariantError(f"bad element label {x!r}")
            mask |= 1 << x
        return cls(mask)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.mask.bit_length()) if self.mask >> i & 1)

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.mask.bit_length() and self.mask >> x & 1 == 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __lt__(self, other: "Subset") -> bool:
        if not isinstance(other, Subset):
            return NotImplemented
        return (len(self), self.members) < (len(other), other.members)

    def within(self, space: SampleSpace) -> bool:
        return self.mask <= space.full_mask

    def __repr__(self) -> str:
        return "Subset({%s})" % ", ".join(map(str, self.members))


@dataclass(frozen=True)
class CoarseningMechanism:
    """A conditional law x -> A: the probability of reporting set A for outcome x.

    Zero-probability entries are never stored, so the key set is the support.
    Row sums and membership (x in A) are deliberately *not* enforced here;
    `validate_coarsening` reports them as data, which lets broken inputs be
    loaded and inspected instead of rejected at parse time.
    """

    space: SampleSpace
    entries: Mapping[tuple[int, Subset], Fraction]

    def __post_init__(self) -> None:
        clean: dict[tuple[int, Subset], Fraction] = {}
        for (x, subset), prob in sorted(self.entries.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            if not 0 <= x < self.space.n:
                raise InvariantError(f"element {x} lies outside the sample space")
            if not subset.within(self.space):
                raise InvariantError(f"{subset!r} is not a subset of the sample space")
            prob = Fraction(prob)
            if prob < 0:
                raise InvariantError(f"negative probability for ({x}, {subset!r})")
            if prob > 0:
                clean[x, subset] = prob
        object.__setattr__(self, "entries", clean)

    def row(self, x: int) -> dict[Subset, Fraction]:
        """The stored entries for outcome x, in canonical set order."""
        return {subset: p for (y, subset), p in self.entries.items() if y == x}


@dataclass(frozen=True)
class CarMechanism:
    """A coarsening-at-random law: one probability per support set, shared by all its members.

    Construction enforces the defining identity exactly: for every outcome x,
    the probabilities of the stored sets containing x sum to one.  Entries are
    positive only, so the key set is the support, which therefore covers the
    space.
    """

    space: SampleSpace
    pi: Mapping[Subset, Fraction]

    def __post_init__(self) -> None:
        clean: dict[Subset, Fraction] = {}
        for subset in sorted(self.pi):
            if not subset.within(self.space):
                raise InvariantError(f"{subset!r} is not a subset of the sample space")
            prob = Fraction(self.pi[subset])
            if prob <= 0:
                raise InvariantError(f"nonpositive probability for {subset!r}")
            clean[subset] = prob
        for x in self.space.elements():
            total = sum((p for s, p in clean.items() if x in s), Fraction(0))
            if total != 1:
                raise InvariantError(
                    f"probabilities of the sets containing {x} sum to {total}, expected 1"
                )
        object.__setattr__(self, "pi", clean)

    @property
    def support(self) -> tuple[Subset, ...]:
        return tuple(self.pi)

    def as_coarsening(self) -> CoarseningMechanism:
        """Expand to conditional form: each member of a set gets the set's probability."""
        entries = {(x, s): p for s, p in self.pi.items() for x in s.members}
        return CoarseningMechanism(self.space, entries)


@dataclass(frozen=True)
class Mixture:
    """A convex combination of CAR mechanisms over one sample space."""

    weights: tuple[Fraction, ...]
    components: tuple[CarMechanism, ...]

    def __post_init__(self) -> None:
        weights = tuple(Fraction(w) for w in self.weights)
        components = tuple(self.components)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", components)
        if not components or len(weights) != len(components):
            raise InvariantError("a mixture needs matching, nonempty weight and component lists")
        if any(w <= 0 for w in weights):
            raise InvariantError("mixture weights must be positive")
        if sum(weights) != 1:
            raise InvariantError(f"mixture weights sum to {sum(weights)}, expected 1")
        if len({c.space for c in components}) != 1:
            raise InvariantError("component spaces mismatch")

    @property
    def space(self) -> SampleSpace:
        return self.components[0].space


@dataclass(frozen=True)
class RowSumViolation:
    """An outcome whose reported-set probabilities do not sum to one."""

    x: int
    total: Fraction

    def __str__(self) -> str:
        return f"element {self.x}: probabilities sum to {self.total}, expected 1"


@dataclass(frozen=True)
class MembershipViolation:
    """An entry whose conditioning outcome is not a member of the reported set."""

    x: int
    subset: Subset

    def __str__(self) -> str:
        return f"entry ({self.x}, {self.subset!r}): the outcome is not a member of the set"


Violation = Union[RowSumViolation, MembershipViolation]


def validate_coarsening(mech: CoarseningMechanism) -> list[Violation]:
    """Check the two coarsening laws: x in A for every entry, rows sum to one.

    Violations are returned as data (an empty list means the mechanism is
    valid); they name the offending outcome or (outcome, set) pair.
    """
    violations: list[Violation] = []
    for x, subset in mech.entries:
        if x not in subset:
            violations.append(MembershipViolation(x, subset))
    for x in mech.space.elements():
        total = sum(mech.row(x).values(), Fraction(0))
        if total != 1:
            violations.append(RowSumViolation(x, total))
    return violations


def mix(mixture: Mixture) -> CarMechanism:
    """Collapse a mixture into the single CAR mechanism it represents, exactly."""
    acc: dict[Subset, Fraction] = {}
    for weight, component in zip(mixture.weights, mixture.components):
        for subset, prob in component.pi.items():
            acc[subset] = acc.get(subset, Fraction(0)) + weight * prob
    return CarMechanism(mixture.space, acc)


def partition_car(space: SampleSpace, blocks: Iterable[Subset]) -> CarMechanism:
    """The unique CAR mechanism supported on a partition: every block gets probability 1."""
    block_list = list(blocks)
    covered = 0
    for block in block_list:
        if not block.within(space):
            raise InvariantError(f"{block!r} is not a subset of the sample space")
        if block.mask & covered:
            raise InvariantError("not a partition: blocks overlap")
        covered |= block.mask
    if covered != space.full_mask:
        raise InvariantError("not a partition: blocks do not cover the space")
    return CarMechanism(space, {block: Fraction(1) for block in block_list})


def support_of(mech: CoarseningMechanism | CarMechanism) -> tuple[Subset, ...]:
    """The sets carrying positive probability, in canonical order."""
    if isinstance(mech, CarMechanism):
        return mech.support
    return tuple(sorted({subset for _, subset in mech.entries}))
