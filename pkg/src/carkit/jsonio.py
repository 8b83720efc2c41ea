"""JSON grammars for every file format the toolkit reads or writes.

Output is canonical: probabilities print as reduced "p/q" (bare "p" when the
denominator is 1), sets print as strictly increasing member arrays, and all
collections are in canonical order, so two runs produce byte-identical files.
Grammar problems raise plain ValueError; semantically invalid but well-formed
data raises InvariantError from the constructors.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, Iterable, Iterator

from .model import (
    CarMechanism,
    CoarseningMechanism,
    Mixture,
    SampleSpace,
    Subset,
)
from .multicover import UniformMulticover
from .sampler import NatureDistribution, ProceduralModel, SampleRecord

_FRACTION_RE = re.compile(r"-?\d+(?:/\d+)?\Z")


def format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: Any) -> Fraction:
    if not isinstance(text, str) or not _FRACTION_RE.match(text):
        raise ValueError(f"bad rational {text!r}: expected 'p' or 'p/q'")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ValueError(f"bad rational {text!r}: zero denominator") from None


def subset_to_json(subset: Subset) -> list[int]:
    return list(subset.members)


def parse_subset(obj: Any, space: SampleSpace) -> Subset:
    if not isinstance(obj, list) or not obj:
        raise ValueError("a set must be a nonempty array of element labels")
    for value in obj:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ValueError(f"bad element label {value!r}")
    if any(b <= a for a, b in zip(obj, obj[1:])):
        raise ValueError(f"set members must be strictly increasing, got {obj}")
    if obj[0] < 0 or obj[-1] >= space.n:
        raise ValueError(f"set member out of range for n={space.n}: {obj}")
    return Subset.of(obj)


def _parse_space(obj: Any) -> SampleSpace:
    if not isinstance(obj, dict):
        raise ValueError("expected a JSON object")
    n = obj.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"bad sample-space size {n!r}")
    return SampleSpace(n)


def _parse_items(obj: Any, key: str) -> list[Any]:
    items = obj.get(key)
    if not isinstance(items, list):
        raise ValueError(f"expected an array under {key!r}")
    return items


def car_to_json(car: CarMechanism) -> dict[str, Any]:
    return {
        "n": car.space.n,
        "pi": [
            {"set": subset_to_json(s), "prob": format_fraction(p)}
            for s, p in car.pi.items()
        ],
    }


def parse_car(obj: Any) -> CarMechanism:
    space = _parse_space(obj)
    pi: dict[Subset, Fraction] = {}
    for item in _parse_items(obj, "pi"):
        if not isinstance(item, dict):
            raise ValueError("each pi entry must be an object")
        subset = parse_subset(item.get("set"), space)
        if subset in pi:
            raise ValueError(f"duplicate set {subset_to_json(subset)}")
        pi[subset] = parse_fraction(item.get("prob"))
    return CarMechanism(space, pi)


def coarsening_to_json(mech: CoarseningMechanism) -> dict[str, Any]:
    return {
        "n": mech.space.n,
        "entries": [
            {"x": x, "set": subset_to_json(s), "prob": format_fraction(p)}
            for (x, s), p in mech.entries.items()
        ],
    }


def parse_coarsening(obj: Any) -> CoarseningMechanism:
    space = _parse_space(obj)
    entries: dict[tuple[int, Subset], Fraction] = {}
    for item in _parse_items(obj, "entries"):
        if not isinstance(item, dict):
            raise ValueError("each entry must be an object")
        x = item.get("x")
        if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < space.n:
            raise ValueError(f"bad element {x!r}")
        subset = parse_subset(item.get("set"), space)
        if (x, subset) in entries:
            raise ValueError(f"duplicate entry ({x}, {subset_to_json(subset)})")
        entries[x, subset] = parse_fraction(item.get("prob"))
    return CoarseningMechanism(space, entries)


def multicover_to_json(mc: UniformMulticover) -> dict[str, Any]:
    return {
        "n": mc.space.n,
        "k": mc.k,
        "sets": [
            {"set": subset_to_json(s), "mult": m} for s, m in mc.mults.items()
        ],
    }


def parse_multicover(obj: Any) -> UniformMulticover:
    space = _parse_space(obj)
    k = obj.get("k")
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValueError(f"bad height {k!r}")
    mults: dict[Subset, int] = {}
    for item in _parse_items(obj, "sets"):
        if not isinstance(item, dict):
            raise ValueError("each multicover entry must be an object")
        subset = parse_subset(item.get("set"), space)
        mult = item.get("mult")
        if not isinstance(mult, int) or isinstance(mult, bool) or mult < 1:
            raise ValueError(f"bad multiplicity {mult!r}")
        if subset in mults:
            raise ValueError(f"duplicate set {subset_to_json(subset)}")
        mults[subset] = mult
    return UniformMulticover(space, k, mults)


def mixture_to_json(mixture: Mixture) -> dict[str, Any]:
    return {
        "weights": [format_fraction(w) for w in mixture.weights],
        "components": [car_to_json(c) for c in mixture.components],
    }


def model_to_json(model: ProceduralModel) -> dict[str, Any]:
    return {
        "weights": [format_fraction(w) for w in model.weights],
        "components": [multicover_to_json(mc) for mc in model.multicovers],
    }


def _parse_weighted(obj: Any) -> tuple[tuple[Fraction, ...], list[Any]]:
    if not isinstance(obj, dict):
        raise ValueError("expected a JSON object")
    weights = obj.get("weights")
    if not isinstance(weights, list):
        raise ValueError("expected an array under 'weights'")
    return tuple(parse_fraction(w) for w in weights), _parse_items(obj, "components")


def parse_mixture(obj: Any) -> Mixture:
    weights, raw = _parse_weighted(obj)
    components = []
    for item in raw:
        if not isinstance(item, dict) or "pi" not in item:
            raise ValueError("mixture components must be CAR mechanisms")
        components.append(parse_car(item))
    return Mixture(weights, tuple(components))


def parse_procedural_model(obj: Any) -> ProceduralModel:
    weights, raw = _parse_weighted(obj)
    multicovers = []
    for item in raw:
        if not isinstance(item, dict) or "sets" not in item:
            raise ValueError("model components must be multicovers")
        multicovers.append(parse_multicover(item))
    return ProceduralModel(weights, tuple(multicovers))


def nature_to_json(nature: NatureDistribution) -> dict[str, Any]:
    return {
        "n": nature.space.n,
        "probs": [format_fraction(p) for p in nature.probs],
    }


def parse_nature(obj: Any) -> NatureDistribution:
    space = _parse_space(obj)
    probs = _parse_items(obj, "probs")
    return NatureDistribution(space, tuple(parse_fraction(p) for p in probs))


def parse_float_car(obj: Any) -> tuple[SampleSpace, dict[Subset, float]]:
    """A CAR mechanism with binary64 probabilities, for `approximate_rational`."""
    space = _parse_space(obj)
    values: dict[Subset, float] = {}
    for item in _parse_items(obj, "pi"):
        if not isinstance(item, dict):
            raise ValueError("each pi entry must be an object")
        subset = parse_subset(item.get("set"), space)
        prob = item.get("prob")
        if isinstance(prob, bool) or not isinstance(prob, (int, float)):
            raise ValueError(f"bad probability {prob!r}: expected a number")
        if subset in values:
            raise ValueError(f"duplicate set {subset_to_json(subset)}")
        values[subset] = float(prob)
    return space, values


def record_to_json(record: SampleRecord, *, hide_x: bool = False) -> dict[str, Any]:
    out: dict[str, Any] = {} if hide_x else {"x": record.x}
    out["set"] = subset_to_json(record.subset)
    if record.j is not None:
        out["j"] = record.j
    return out


def parse_record(obj: Any, space: SampleSpace) -> SampleRecord:
    if not isinstance(obj, dict):
        raise ValueError("each record must be an object")
    if "x" not in obj:
        raise ValueError("record has no underlying outcome 'x'")
    x = obj["x"]
    if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < space.n:
        raise ValueError(f"bad record outcome {x!r}")
    subset = parse_subset(obj.get("set"), space)
    j = obj.get("j")
    if j is not None and (not isinstance(j, int) or isinstance(j, bool) or j < 0):
        raise ValueError(f"bad multicover index {j!r}")
    return SampleRecord(x, subset, j)


def record_lines(records: Iterable[SampleRecord], *, hide_x: bool = False) -> Iterator[str]:
    for record in records:
        yield json.dumps(record_to_json(record, hide_x=hide_x))


def dumps(payload: Any) -> str:
    """Canonical file serialization: two-space indent, trailing newline."""
    return json.dumps(payload, indent=2) + "\n"
