"""Lagrangian Monge-Ampere operator, cones and Dirichlet solver."""

from ._core import (
    LagpotError,
    axis_restricted_det,
    boundary_report,
    canonical_op,
    cone_membership,
    freeness,
    garding_eigenvalues,
    int_decompose,
    lag_part,
    lag_spectrum,
    lambda_min,
    m_lag,
    m_lag_gradient,
    run_cli,
    sample_boundary_probes,
    sampled_min_trace,
    solve,
    spinor_det,
)

__all__ = [
    "LagpotError",
    "axis_restricted_det",
    "boundary_report",
    "canonical_op",
    "cone_membership",
    "freeness",
    "garding_eigenvalues",
    "int_decompose",
    "lag_part",
    "lag_spectrum",
    "lambda_min",
    "m_lag",
    "m_lag_gradient",
    "run_cli",
    "sample_boundary_probes",
    "sampled_min_trace",
    "solve",
    "spinor_det",
]
