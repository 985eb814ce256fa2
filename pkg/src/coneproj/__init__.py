"""Convexity-constrained least squares by Gram-Schmidt cone projection."""

__version__ = "0.1.0"

from .constraints import (
    ConstraintMatrix,
    DataSet,
    build_equispaced,
    build_for,
    build_general,
    negate,
    validate_abscissae,
)
from .gram_schmidt import OrthonormalBasis, ProjectionSplit, orthonormalize, project
from .oracle import KktCertificate, equality_project, oracle_project, verify_kkt
from .simulate import SimulationPlan, WeightEstimate, compare_engines, simulate_weights
from .solver import (
    ProjectionResult,
    SolverConfig,
    Status,
    check_convex,
    kkt_diagnostics,
    select_max_violation,
    solve,
)

__all__ = [
    "ConstraintMatrix", "DataSet", "build_equispaced", "build_for", "build_general", "negate",
    "validate_abscissae", "OrthonormalBasis", "ProjectionSplit", "orthonormalize", "project",
    "KktCertificate", "equality_project", "oracle_project", "verify_kkt", "SimulationPlan",
    "WeightEstimate", "compare_engines", "simulate_weights", "ProjectionResult", "SolverConfig",
    "Status", "check_convex", "kkt_diagnostics", "select_max_violation", "solve",
]
