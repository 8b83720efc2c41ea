"""Command-line entry point: file-to-file operations with documented exit codes.

Exit codes: 0 for success or a passing check; 1 for a domain-level negative
(validation violations, a non-CAR mechanism, a failed extremality or
conformance check); 2 for usage, I/O, or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from . import jsonio
from .decompose import approximate_rational, decompose, recombine
from .extremes import check_car, enumerate_extremes, is_extreme
from .fibonacci import verify_fibonacci_height
from .model import CarMechanism, InvariantError, validate_coarsening
from .multicover import canonicalize, from_multicover, to_multicover
from .sampler import car_conformance_test, estimate_empirical, simulate

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


def _load(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _emit(args: argparse.Namespace, payload: Any, text_lines: Iterable[str]) -> None:
    """Reports go to stdout; data goes to --out when given, else to stdout."""
    rendered = jsonio.dumps(payload)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
    if args.format == "json":
        if not args.out:
            sys.stdout.write(rendered)
    else:
        for line in text_lines:
            print(line)


def _set_text(subset) -> str:
    return "{%s}" % ",".join(map(str, subset.members))


def _car_lines(car: CarMechanism) -> list[str]:
    return [f"{_set_text(s)}: {jsonio.format_fraction(p)}" for s, p in car.pi.items()]


def _cmd_check(args: argparse.Namespace) -> int:
    mech = jsonio.parse_coarsening(_load(args.mechanism))
    problems = validate_coarsening(mech)
    if problems:
        for problem in problems:
            print(f"VIOLATION: {problem}")
        return EXIT_NEGATIVE
    result = check_car(mech)
    if not result.is_car:
        for disagreement in result.disagreements:
            print(f"NOT CAR: {disagreement}")
        return EXIT_NEGATIVE
    car = result.mechanism
    _emit(args, jsonio.car_to_json(car), ["CAR mechanism:"] + _car_lines(car))
    return EXIT_OK


def _cmd_is_extreme(args: argparse.Namespace) -> int:
    car = jsonio.parse_car(_load(args.mechanism))
    result = is_extreme(car)
    payload = {
        "extreme": result.extreme,
        "certificate": [jsonio.format_fraction(v) for v in result.certificate]
        if result.certificate
        else None,
        "reason": result.reason,
    }
    if result.extreme:
        certificate = " ".join(jsonio.format_fraction(v) for v in result.certificate)
        _emit(args, payload, [f"extreme: certificate {certificate}"])
        return EXIT_OK
    _emit(args, payload, [f"not extreme: {result.reason}"])
    return EXIT_NEGATIVE


def _cmd_enumerate(args: argparse.Namespace) -> int:
    found = enumerate_extremes(args.n, allow_large=args.max_n_override)
    payload = [jsonio.car_to_json(car) for car in found]
    lines = [f"{len(found)} extreme CAR mechanisms for n={args.n}"]
    for car in found:
        lines.append("  " + "  ".join(_car_lines(car)))
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_to_multicover(args: argparse.Namespace) -> int:
    car = jsonio.parse_car(_load(args.mechanism))
    mc = to_multicover(car)
    _emit(args, jsonio.multicover_to_json(mc), _multicover_lines(mc))
    return EXIT_OK


def _multicover_lines(mc) -> list[str]:
    lines = [f"height {mc.k}"]
    lines += [f"{_set_text(s)} x{m}" for s, m in mc.mults.items()]
    return lines


def _cmd_from_multicover(args: argparse.Namespace) -> int:
    mc = jsonio.parse_multicover(_load(args.multicover))
    car = from_multicover(mc)
    _emit(args, jsonio.car_to_json(car), _car_lines(car))
    return EXIT_OK


def _cmd_canonicalize(args: argparse.Namespace) -> int:
    mc = canonicalize(jsonio.parse_multicover(_load(args.multicover)))
    _emit(args, jsonio.multicover_to_json(mc), _multicover_lines(mc))
    return EXIT_OK


def _cmd_decompose(args: argparse.Namespace) -> int:
    car = jsonio.parse_car(_load(args.mechanism))
    mixture = decompose(car, allow_large=args.max_n_override)
    lines = []
    for weight, component in zip(mixture.weights, mixture.components):
        supports = " ".join(_set_text(s) for s in component.support)
        lines.append(f"weight {jsonio.format_fraction(weight)}: {supports}")
    _emit(args, jsonio.mixture_to_json(mixture), lines)
    return EXIT_OK


def _cmd_recombine(args: argparse.Namespace) -> int:
    mixture = jsonio.parse_mixture(_load(args.mixture))
    car = recombine(mixture)
    _emit(args, jsonio.car_to_json(car), _car_lines(car))
    return EXIT_OK


def _cmd_approximate(args: argparse.Namespace) -> int:
    space, values = jsonio.parse_float_car(_load(args.mechanism))
    car = approximate_rational(space, values, args.epsilon)
    _emit(args, jsonio.car_to_json(car), _car_lines(car))
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    model = jsonio.parse_procedural_model(_load(args.model))
    nature = jsonio.parse_nature(_load(args.nature))
    records = simulate(model, nature, args.count, args.seed)
    lines = jsonio.record_lines(records, hide_x=args.hide_x)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            for line in lines:
                handle.write(line + "\n")
        print(f"wrote {len(records)} records to {args.out}")
    else:
        for line in lines:
            print(line)
    return EXIT_OK


def _cmd_test_car(args: argparse.Namespace) -> int:
    expected = jsonio.parse_car(_load(args.expected))
    records = []
    with open(args.records, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(jsonio.parse_record(json.loads(line), expected.space))
    empirical = estimate_empirical(expected.space, records)
    report = car_conformance_test(empirical, expected, args.z)
    payload = {
        "ok": report.ok,
        "cells": [
            {
                "x": c.x,
                "set": jsonio.subset_to_json(c.subset),
                "observed": c.observed,
                "expected": c.expected,
                "bound": c.bound,
                "ok": c.ok,
            }
            for c in report.cells
        ],
        "pairs": [
            {
                "set": jsonio.subset_to_json(p.subset),
                "x": p.x,
                "y": p.y,
                "x_freq": p.x_freq,
                "y_freq": p.y_freq,
                "bound": p.bound,
                "ok": p.ok,
            }
            for p in report.pairs
        ],
    }
    if args.format == "json":
        sys.stdout.write(jsonio.dumps(payload))
    else:
        for c in report.cells:
            verdict = "pass" if c.ok else "FAIL"
            print(
                f"cell x={c.x} set={_set_text(c.subset)}: observed {c.observed:.6f} "
                f"expected {c.expected:.6f} bound {c.bound:.6f} {verdict}"
            )
        for p in report.pairs:
            verdict = "pass" if p.ok else "FAIL"
            print(
                f"pair set={_set_text(p.subset)} x={p.x} y={p.y}: "
                f"{p.x_freq:.6f} vs {p.y_freq:.6f} bound {p.bound:.6f} {verdict}"
            )
        print("CONFORMS" if report.ok else "DOES NOT CONFORM")
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def _cmd_fib_demo(args: argparse.Namespace) -> int:
    report = verify_fibonacci_height(args.n)
    payload = {
        "n": report.n,
        "matrix": report.system.rows(),
        "solution": [jsonio.format_fraction(v) for v in report.solution],
        "height": report.height,
        "multicover": jsonio.multicover_to_json(report.multicover)
        if report.multicover
        else None,
        "checks": report.checks,
        "ok": report.ok,
    }
    if args.format == "json":
        sys.stdout.write(jsonio.dumps(payload))
    else:
        for row in report.system.rows():
            print(" ".join(map(str, row)))
        print("solution:", " ".join(jsonio.format_fraction(v) for v in report.solution))
        print("height:", report.height)
        if report.multicover:
            print("multicover:", ", ".join(
                f"{_set_text(s)} x{m}" for s, m in report.multicover.mults.items()
            ))
        for name, ok in report.checks.items():
            print(f"{'PASS' if ok else 'FAIL'} {name}")
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", help="write the resulting data to this file")
    sub.add_argument("--format", choices=("text", "json"), default="text")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carkit",
        description="Exact toolkit for coarsening-at-random mechanisms on finite spaces.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("check", help="validate a coarsening mechanism and collapse it to CAR form")
    sub.add_argument("mechanism")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_check)

    sub = commands.add_parser("is-extreme", help="test whether a CAR mechanism is a polytope vertex")
    sub.add_argument("mechanism")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_is_extreme)

    sub = commands.add_parser("enumerate-extremes", help="list every extreme CAR mechanism for a space size")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--max-n-override", action="store_true", help="lift the n<=5 enumeration bound")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_enumerate)

    sub = commands.add_parser("to-multicover", help="canonical uniform multicover of a rational CAR mechanism")
    sub.add_argument("mechanism")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_to_multicover)

    sub = commands.add_parser("from-multicover", help="CAR mechanism generated by a uniform multicover")
    sub.add_argument("multicover")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_from_multicover)

    sub = commands.add_parser("canonicalize", help="divide out the common factor of a multicover")
    sub.add_argument("multicover")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_canonicalize)

    sub = commands.add_parser("decompose", help="write a CAR mechanism as a mixture of extremes")
    sub.add_argument("mechanism")
    sub.add_argument("--max-n-override", action="store_true", help="lift the n<=5 enumeration bound")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_decompose)

    sub = commands.add_parser("recombine", help="collapse a mixture back into one CAR mechanism")
    sub.add_argument("mixture")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_recombine)

    sub = commands.add_parser("approximate", help="round a float-valued CAR law to an exact rational one")
    sub.add_argument("mechanism")
    sub.add_argument("--epsilon", type=float, required=True)
    _add_common(sub)
    sub.set_defaults(handler=_cmd_approximate)

    sub = commands.add_parser("simulate", help="draw coarsened records from a procedural model")
    sub.add_argument("--model", required=True)
    sub.add_argument("--nature", required=True)
    sub.add_argument("--count", type=int, required=True)
    sub.add_argument("--seed", type=int, required=True)
    sub.add_argument("--hide-x", action="store_true", help="emit observations only")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_simulate)

    sub = commands.add_parser("test-car", help="statistical conformance of records against a CAR law")
    sub.add_argument("--records", required=True)
    sub.add_argument("--expected", required=True)
    sub.add_argument("--z", type=float, default=4.0)
    _add_common(sub)
    sub.set_defaults(handler=_cmd_test_car)

    sub = commands.add_parser("fib-demo", help="verify the Fibonacci-height staircase witness")
    sub.add_argument("--n", type=int, required=True)
    _add_common(sub)
    sub.set_defaults(handler=_cmd_fib_demo)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InvariantError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
