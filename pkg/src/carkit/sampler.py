"""Seeded, exact simulation of the multicover coarsening procedure.

The procedure: draw the underlying outcome x, pick one of the configured
multicovers by weight (independently of x), then choose uniformly among the k
slots of that multicover which contain x.  With a single 1-cover this is the
classic pick-a-partition-at-random procedure; general heights simulate every
rational CAR mechanism.

All draws are integer-exact: probabilities are put over a common denominator
and a single uniform integer below it selects the outcome, so no floating-point
bias enters.  The generator is Python's `random.Random` (Mersenne Twister),
advanced only through `randrange`, which makes every run reproducible from its
seed within this implementation.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .model import (
    CarMechanism,
    CoarseningMechanism,
    InvariantError,
    SampleSpace,
    Subset,
    validate_coarsening,
)
from .multicover import UniformMulticover, validate_multicover

MIN_RECORDS_PER_ELEMENT = 1000


@dataclass(frozen=True)
class ProceduralModel:
    """Weighted uniform multicovers over one space; the machine behind every rational CAR law."""

    weights: tuple[Fraction, ...]
    multicovers: tuple[UniformMulticover, ...]

    def __post_init__(self) -> None:
        weights = tuple(Fraction(w) for w in self.weights)
        multicovers = tuple(self.multicovers)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "multicovers", multicovers)
        if not multicovers or len(weights) != len(multicovers):
            raise InvariantError("a model needs matching, nonempty weight and multicover lists")
        if any(w <= 0 for w in weights):
            raise InvariantError("model weights must be positive")
        if sum(weights) != 1:
            raise InvariantError(f"model weights sum to {sum(weights)}, expected 1")
        if len({mc.space for mc in multicovers}) != 1:
            raise InvariantError("multicover spaces mismatch")
        for mc in multicovers:
            problems = validate_multicover(mc)
            if problems:
                raise InvariantError(
                    "invalid multicover in model: " + "; ".join(str(p) for p in problems)
                )

    @property
    def space(self) -> SampleSpace:
        return self.multicovers[0].space


@dataclass(frozen=True)
class NatureDistribution:
    """The law generating underlying outcomes, indexed by element label."""

    space: SampleSpace
    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) != self.space.n:
            raise InvariantError(f"need {self.space.n} probabilities, got {len(probs)}")
        if any(p < 0 for p in probs):
            raise InvariantError("outcome probabilities must be nonnegative")
        if sum(probs) != 1:
            raise InvariantError(f"outcome probabilities sum to {sum(probs)}, expected 1")

    @classmethod
    def uniform(cls, space: SampleSpace) -> "NatureDistribution":
        return cls(space, tuple(Fraction(1, space.n) for _ in space.elements()))


@dataclass(frozen=True)
class SampleRecord:
    """One simulated observation; `j` is the multicover index when the draw had one."""

    x: int
    subset: Subset
    j: int | None = None

    def __post_init__(self) -> None:
        if self.x not in self.subset:
            raise InvariantError(f"record outcome {self.x} is not in {self.subset!r}")


def _integer_weights(fractions_: Sequence[Fraction]) -> tuple[list[int], int]:
    """Common-denominator integer weights; the total is the denominator times the sum."""
    denom = math.lcm(*(f.denominator for f in fractions_))
    weights = [int(f * denom) for f in fractions_]
    return weights, sum(weights)


def _draw(rng: random.Random, weights: Sequence[int], total: int) -> int:
    """Index i with probability weights[i]/total, from one exact uniform integer."""
    u = rng.randrange(total)
    acc = 0
    for i, w in enumerate(weights):
        acc += w
        if u < acc:
            return i
    raise AssertionError("weights do not sum to the stated total")


def _cover_rows(mc: UniformMulticover) -> list[tuple[list[Subset], list[int]]]:
    """Per element: the multicover's sets through it and their multiplicities."""
    rows = []
    for x in mc.space.elements():
        sets = [s for s in mc.mults if x in s]
        rows.append((sets, [mc.mults[s] for s in sets]))
    return rows


def sample_observation(model: ProceduralModel, x: int, rng: random.Random) -> Subset:
    """One observed set for the outcome x; advances `rng` in place.

    The law of the result is exactly the model's mixture law: sum over
    multicovers of weight * multiplicity/height, restricted to sets through x.
    """
    if not 0 <= x < model.space.n:
        raise ValueError(f"element {x} lies outside the sample space")
    lam, lam_total = _integer_weights(model.weights)
    j = _draw(rng, lam, lam_total)
    mc = model.multicovers[j]
    sets = [s for s in mc.mults if x in s]
    return sets[_draw(rng, [mc.mults[s] for s in sets], mc.k)]


def simulate(
    model: ProceduralModel, nature: NatureDistribution, count: int, seed: int
) -> list[SampleRecord]:
    """Draw `count` independent records, reproducibly from `seed`."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if nature.space != model.space:
        raise InvariantError("nature and model live on different spaces")
    rng = random.Random(seed)
    nat_weights, nat_total = _integer_weights(nature.probs)
    lam, lam_total = _integer_weights(model.weights)
    rows = [_cover_rows(mc) for mc in model.multicovers]
    heights = [mc.k for mc in model.multicovers]
    records: list[SampleRecord] = []
    for _ in range(count):
        x = _draw(rng, nat_weights, nat_total)
        j = _draw(rng, lam, lam_total)
        sets, mults = rows[j][x]
        subset = sets[_draw(rng, mults, heights[j])]
        records.append(SampleRecord(x, subset, j))
    return records


def simulate_coarsening(
    mech: CoarseningMechanism, nature: NatureDistribution, count: int, seed: int
) -> list[SampleRecord]:
    """Sample records straight from a conditional law, CAR or not.

    This is how deliberately non-CAR data for the conformance test is made;
    rows must still be honest distributions (validated), and all draws use the
    same exact integer scheme as `simulate`.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if nature.space != mech.space:
        raise InvariantError("nature and mechanism live on different spaces")
    problems = validate_coarsening(mech)
    if problems:
        raise InvariantError(
            "not a valid coarsening mechanism: " + "; ".join(str(p) for p in problems)
        )
    rows = []
    for x in mech.space.elements():
        row = mech.row(x)
        sets = list(row)
        weights, total = _integer_weights([row[s] for s in sets])
        rows.append((sets, weights, total))
    rng = random.Random(seed)
    nat_weights, nat_total = _integer_weights(nature.probs)
    records: list[SampleRecord] = []
    for _ in range(count):
        x = _draw(rng, nat_weights, nat_total)
        sets, weights, total = rows[x]
        records.append(SampleRecord(x, sets[_draw(rng, weights, total)]))
    return records


def observation_law(model: ProceduralModel) -> CoarseningMechanism:
    """The exact conditional law of the procedure, computed symbolically.

    Equals the expansion of the mixture of the multicovers' CAR mechanisms;
    this identity is what makes the procedure a CAR simulator.
    """
    entries: dict[tuple[int, Subset], Fraction] = {}
    for weight, mc in zip(model.weights, model.multicovers):
        for subset, mult in mc.mults.items():
            p = weight * Fraction(mult, mc.k)
            for x in subset.members:
                entries[x, subset] = entries.get((x, subset), Fraction(0)) + p
    return CoarseningMechanism(model.space, entries)


@dataclass(frozen=True)
class EmpiricalMechanism:
    """Observed counts and relative frequencies of (outcome, reported set) pairs."""

    space: SampleSpace
    row_counts: Mapping[int, int]
    cell_counts: Mapping[tuple[int, Subset], int]

    def frequency(self, x: int, subset: Subset) -> float:
        return self.cell_counts.get((x, subset), 0) / self.row_counts[x]

    def observed_sets(self, x: int) -> list[Subset]:
        return sorted({s for (y, s) in self.cell_counts if y == x})


def estimate_empirical(
    space: SampleSpace, records: Iterable[SampleRecord]
) -> EmpiricalMechanism:
    """Per-outcome relative frequencies of the reported sets.

    Outcomes that never occur get no row; a warning is emitted for each,
    since their conditional law is simply unobservable from the data.
    """
    row_counts: dict[int, int] = {}
    cell_counts: dict[tuple[int, Subset], int] = {}
    for record in records:
        row_counts[record.x] = row_counts.get(record.x, 0) + 1
        key = (record.x, record.subset)
        cell_counts[key] = cell_counts.get(key, 0) + 1
    if not row_counts:
        raise ValueError("no records")
    for x in space.elements():
        if x not in row_counts:
            warnings.warn(f"element {x} was never observed; its row is omitted", stacklevel=2)
    ordered_rows = dict(sorted(row_counts.items()))
    ordered_cells = dict(sorted(cell_counts.items(), key=lambda kv: (kv[0][0], kv[0][1])))
    return EmpiricalMechanism(space, ordered_rows, ordered_cells)


@dataclass(frozen=True)
class CellCheck:
    x: int
    subset: Subset
    count: int
    observed: float
    expected: float
    bound: float
    ok: bool


@dataclass(frozen=True)
class PairCheck:
    subset: Subset
    x: int
    y: int
    x_freq: float
    y_freq: float
    bound: float
    ok: bool


@dataclass(frozen=True)
class ConformanceReport:
    cells: tuple[CellCheck, ...]
    pairs: tuple[PairCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.cells) and all(p.ok for p in self.pairs)

    @property
    def failing_cells(self) -> tuple[CellCheck, ...]:
        return tuple(c for c in self.cells if not c.ok)


def car_conformance_test(
    empirical: EmpiricalMechanism, expected: CarMechanism, z_threshold: float = 4.0
) -> ConformanceReport:
    """Compare observed frequencies against a CAR law, cell by cell.

    A cell (x, A) passes when |freq - pi_A| <= z * sqrt(pi_A (1 - pi_A) / count(x));
    sets the law never produces get bound zero, so any sighting fails them.  On
    top of the cells, the members of each support set must agree with each
    other within a pooled two-proportion bound: that agreement is the
    observable fingerprint of coarsening at random.  Needs at least
    MIN_RECORDS_PER_ELEMENT observations of every element.
    """
    if empirical.space != expected.space:
        raise ValueError("empirical and expected mechanisms live on different spaces")
    for x in expected.space.elements():
        if empirical.row_counts.get(x, 0) < MIN_RECORDS_PER_ELEMENT:
            raise ValueError(
                f"undersized sample: element {x} has {empirical.row_counts.get(x, 0)} records, "
                f"need at least {MIN_RECORDS_PER_ELEMENT}"
            )
    cells: list[CellCheck] = []
    for x in expected.space.elements():
        count = empirical.row_counts[x]
        candidates = sorted(
            {s for s in expected.pi if x in s} | set(empirical.observed_sets(x))
        )
        for subset in candidates:
            p = float(expected.pi.get(subset, 0))
            observed = empirical.frequency(x, subset)
            bound = z_threshold * math.sqrt(p * (1.0 - p) / count)
            cells.append(
                CellCheck(x, subset, count, observed, p, bound, abs(observed - p) <= bound)
            )
    pairs: list[PairCheck] = []
    for subset in expected.support:
        for i, x in enumerate(subset.members):
            for y in subset.members[i + 1 :]:
                cx, cy = empirical.row_counts[x], empirical.row_counts[y]
                fx, fy = empirical.frequency(x, subset), empirical.frequency(y, subset)
                pooled = (
                    empirical.cell_counts.get((x, subset), 0)
                    + empirical.cell_counts.get((y, subset), 0)
                ) / (cx + cy)
                bound = z_threshold * math.sqrt(pooled * (1.0 - pooled) * (1.0 / cx + 1.0 / cy))
                pairs.append(PairCheck(subset, x, y, fx, fy, bound, abs(fx - fy) <= bound))
    return ConformanceReport(tuple(cells), tuple(pairs))
