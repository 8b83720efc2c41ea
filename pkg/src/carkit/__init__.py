"""Exact-arithmetic toolkit for coarsening-at-random (CAR) mechanisms on finite spaces."""

from .model import (
    CarMechanism,
    CoarseningMechanism,
    InvariantError,
    MembershipViolation,
    Mixture,
    RowSumViolation,
    SampleSpace,
    Subset,
    mix,
    partition_car,
    support_of,
    validate_coarsening,
)
from .linalg import (
    IncidenceSystem,
    SolutionKind,
    SolveOutcome,
    column_rank,
    solve_unit,
)
from .extremes import (
    CarCheck,
    CarDisagreement,
    ExtremeCheck,
    check_car,
    enumerate_covers,
    enumerate_extremes,
    is_extreme,
)
from .multicover import (
    CoverageViolation,
    UniformMulticover,
    canonicalize,
    from_multicover,
    has_uniform_submulticover,
    is_extreme_multicover,
    to_multicover,
    validate_multicover,
)
from .decompose import approximate_rational, decompose, recombine
from .sampler import (
    CellCheck,
    ConformanceReport,
    EmpiricalMechanism,
    NatureDistribution,
    PairCheck,
    ProceduralModel,
    SampleRecord,
    car_conformance_test,
    estimate_empirical,
    observation_law,
    sample_observation,
    simulate,
    simulate_coarsening,
)
from .fibonacci import (
    HeightWitnessReport,
    fib,
    fibonacci_solution,
    staircase_matrix,
    verify_fibonacci_height,
)

__version__ = "0.1.0"

__all__ = [
    "CarCheck",
    "CarDisagreement",
    "CarMechanism",
    "CellCheck",
    "CoarseningMechanism",
    "ConformanceReport",
    "CoverageViolation",
    "EmpiricalMechanism",
    "ExtremeCheck",
    "HeightWitnessReport",
    "IncidenceSystem",
    "InvariantError",
    "MembershipViolation",
    "Mixture",
    "NatureDistribution",
    "PairCheck",
    "ProceduralModel",
    "RowSumViolation",
    "SampleRecord",
    "SampleSpace",
    "SolutionKind",
    "SolveOutcome",
    "Subset",
    "UniformMulticover",
    "approximate_rational",
    "canonicalize",
    "car_conformance_test",
    "check_car",
    "column_rank",
    "decompose",
    "enumerate_covers",
    "enumerate_extremes",
    "estimate_empirical",
    "fib",
    "fibonacci_solution",
    "from_multicover",
    "has_uniform_submulticover",
    "is_extreme",
    "is_extreme_multicover",
    "mix",
    "observation_law",
    "partition_car",
    "recombine",
    "sample_observation",
    "simulate",
    "simulate_coarsening",
    "solve_unit",
    "staircase_matrix",
    "support_of",
    "to_multicover",
    "validate_coarsening",
    "validate_multicover",
    "verify_fibonacci_height",
]
