"""Writing CAR mechanisms as convex mixtures of vertices, and rational approximation."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .extremes import ENUMERATION_BOUND, extremes_within
from .model import CarMechanism, Mixture, SampleSpace, Subset, mix
from .multicover import UniformMulticover, from_multicover


def decompose(car: CarMechanism, *, allow_large: bool = False) -> Mixture:
    """Peel extreme mechanisms off `car` until nothing is left.

    Each round takes the first extreme mechanism (in canonical cover order)
    supported inside the residual support, subtracts the largest multiple of it
    that keeps all probabilities nonnegative, and renormalizes the rest.  Both
    the residual and the extreme have unit row sums, so that multiple is at
    most 1; the set attaining it drops out of the support, so at most
    |support| rounds run, and the emitted weights recombine to `car` with
    exact equality.
    """
    if car.space.n > ENUMERATION_BOUND and not allow_large:
        raise ValueError(
            f"n={car.space.n} exceeds the enumeration bound {ENUMERATION_BOUND}; "
            "pass allow_large=True (CLI: --max-n-override) to force it"
        )
    residual = dict(car.pi)
    scale = Fraction(1)
    weights: list[Fraction] = []
    parts: list[CarMechanism] = []
    for _ in range(len(residual)):
        extreme = next(extremes_within(car.space, tuple(residual)), None)
        if extreme is None:
            raise RuntimeError(
                "no extreme mechanism inside a nonempty CAR support; "
                "this cannot happen for a valid mechanism"
            )
        ratio = min(residual[s] / p for s, p in extreme.pi.items())
        weights.append(scale * ratio)
        parts.append(extreme)
        if ratio == 1:
            break
        remaining = Fraction(1) - ratio
        nxt: dict[Subset, Fraction] = {}
        for s, p in residual.items():
            value = (p - ratio * extreme.pi.get(s, Fraction(0))) / remaining
            if value:
                nxt[s] = value
        residual = nxt
        scale *= remaining
    else:
        raise RuntimeError("peeling failed to terminate; this cannot happen")
    return Mixture(tuple(weights), tuple(parts))


def recombine(mixture: Mixture) -> CarMechanism:
    """Exact convex combination of the mixture's components (alias of `mix`)."""
    return mix(mixture)


def approximate_rational(
    space: SampleSpace, values: Mapping[Subset, float], epsilon: float
) -> CarMechanism:
    """Round binary64 CAR probabilities to a nearby, exactly valid rational CAR law.

    Rounds every probability to a multiple of 1/k (k a power of two past
    2n/epsilon), repairs each element's coverage through its own singleton set,
    and keeps doubling k until the repaired mechanism sits within `epsilon` of
    the input in sup norm.  The input may miss the row-sum identity by up to
    epsilon/(4n) per element; the output satisfies it exactly.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    exact: dict[Subset, Fraction] = {}
    for subset, value in values.items():
        if not subset.within(space):
            raise ValueError(f"{subset!r} is not a subset of the sample space")
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"probability {value!r} for {subset!r} is outside [0, 1]")
        if value:
            exact[subset] = Fraction(value)
    delta = Fraction(epsilon) / (4 * space.n)
    for x in space.elements():
        total = sum((v for s, v in exact.items() if x in s), Fraction(0))
        if abs(total - 1) > delta:
            raise ValueError(
                f"row sum {float(total)} at element {x} is further than {float(delta)} from 1"
            )
    eps_exact = Fraction(epsilon)
    k = 1
    while Fraction(1, k) * 2 * space.n >= eps_exact:
        k *= 2
    while True:
        mults = _round_and_repair(space, exact, k)
        if mults is not None:
            candidate = from_multicover(UniformMulticover(space, k, mults))
            if _sup_distance(candidate, exact) < eps_exact:
                return candidate
        k *= 2


def _round_and_repair(
    space: SampleSpace, exact: Mapping[Subset, Fraction], k: int
) -> dict[Subset, int] | None:
    """Nearest-multiple rounding of k*pi, then per-element coverage repair.

    Each element's deficit is absorbed by its singleton set; when that would
    need a negative multiplicity, the largest-multiplicity set through the
    element is decremented instead (canonically smallest on ties).  Singleton
    fixes touch one row only, decrements ripple, so passes repeat until stable;
    None means the caller should retry with a doubled k.
    """
    mults: dict[Subset, int] = {}
    for subset, value in exact.items():
        rounded = round(k * value)
        if rounded > 0:
            mults[subset] = rounded
    for _ in range(space.n + 1):
        for x in space.elements():
            deficit = k - sum(m for s, m in mults.items() if x in s)
            if deficit == 0:
                continue
            singleton = Subset(1 << x)
            target = mults.get(singleton, 0) + deficit
            while target < 0:
                candidates = [s for s in mults if x in s and s != singleton]
                if not candidates:
                    return None
                bulky = min(candidates, key=lambda s: (-mults[s], s))
                mults[bulky] -= 1
                if mults[bulky] == 0:
                    del mults[bulky]
                target += 1
            if target > 0:
                mults[singleton] = target
            else:
                mults.pop(singleton, None)
        if all(
            sum(m for s, m in mults.items() if x in s) == k for x in space.elements()
        ):
            return mults
    return None


def _sup_distance(car: CarMechanism, exact: Mapping[Subset, Fraction]) -> Fraction:
    keys = set(car.pi) | set(exact)
    return max(
        abs(car.pi.get(s, Fraction(0)) - exact.get(s, Fraction(0))) for s in keys
    )
