"""Correlated mixed Poisson processes by backward simulation."""

from bsmpp._core import (
    CalibratedModel,
    CorrelationCurve,
    ExtremeMeasure,
    MixedPoissonDistribution,
    MonotonicityStructure,
    Path,
    PathSet,
    TruncatedPmf,
    admissible_range,
    build_extreme_measure,
    calibrate,
    chi_square_pmf,
    correlation_curve,
    correlation_matrix,
    enumerate_structures,
    ks_uniform,
    mixture,
    negative_binomial,
    poisson,
    rho_bs,
    rho_fc,
    simulate,
    thin_pmf,
    z_function,
)

__all__ = [
    "CalibratedModel",
    "CorrelationCurve",
    "ExtremeMeasure",
    "MixedPoissonDistribution",
    "MonotonicityStructure",
    "Path",
    "PathSet",
    "TruncatedPmf",
    "admissible_range",
    "build_extreme_measure",
    "calibrate",
    "chi_square_pmf",
    "correlation_curve",
    "correlation_matrix",
    "enumerate_structures",
    "ks_uniform",
    "mixture",
    "negative_binomial",
    "poisson",
    "rho_bs",
    "rho_fc",
    "simulate",
    "thin_pmf",
    "z_function",
]
