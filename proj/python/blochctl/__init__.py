"""Bloch-radius controllability analysis of dissipative two-level systems."""

from ._core import (
    ProjectedSystem,
    bloch_rhs,
    brute_force_envelope,
    classify,
    common_eigenvector,
    eigenpair,
    envelope_at,
    envelope_curve,
    integrate_bloch,
    project_gks,
    project_lindblad,
    projected_system,
    pure_state_rate,
    radial_rate,
    reachable,
    steer,
    trap_radius,
    validate_inequality,
)

__all__ = [
    "ProjectedSystem",
    "bloch_rhs",
    "brute_force_envelope",
    "classify",
    "common_eigenvector",
    "eigenpair",
    "envelope_at",
    "envelope_curve",
    "integrate_bloch",
    "project_gks",
    "project_lindblad",
    "projected_system",
    "pure_state_rate",
    "radial_rate",
    "reachable",
    "steer",
    "trap_radius",
    "validate_inequality",
]
