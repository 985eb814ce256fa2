"""Cone projection under convexity constraints via a Gram-Schmidt polar basis.

The solver looks for ``y`` closest to ``phi`` with ``A @ y >= 0``.  Starting
from ``y = phi`` it repeatedly takes the most violated constraint
(largest entry of ``b = R @ y`` with ``R = -A``), adds its index to the
working set ``J``, and recomputes ``y`` as ``phi`` minus its orthogonal
projection onto the span of the rows ``{r_j : j in J}``.  Indices are never
removed and no Lagrange multipliers are computed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .constraints import ConstraintMatrix, negate
from .errors import DimensionMismatch, InvalidConfig
from .gram_schmidt import DEFAULT_RANK_TOL, OrthonormalBasis, orthonormalize, project


class Status(str, enum.Enum):
    ALREADY_CONVEX = "AlreadyConvex"
    VIOLATION_CLEARED = "ViolationCleared"
    STAGNATED = "Stagnated"
    INDEX_REPEATED = "IndexRepeated"
    ADDITION_CAP_REACHED = "AdditionCapReached"

    def __str__(self):
        return self.value

    @property
    def clean(self):
        return self in (Status.ALREADY_CONVEX, Status.VIOLATION_CLEARED)


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and switches for :func:`solve`.

    ``eps1`` bounds the largest tolerated violation, ``eps2`` the L1 change
    in ``b`` below which progress counts as stalled.  With
    ``scale_tolerances`` both are multiplied by ``max(1, max|phi|)``; the
    violation test on later iterates uses ``max(1, max|y|)`` instead.
    ``incremental=False`` rebuilds the basis from the sorted index set on
    every step instead of extending it by one column.
    """

    eps1: float = 1e-9
    eps2: float = 1e-12
    max_additions: int | None = None
    trace: bool = False
    scale_tolerances: bool = True
    incremental: bool = True
    rank_tol: float = DEFAULT_RANK_TOL

    def __post_init__(self):
        if not self.eps1 > 0:
            raise InvalidConfig(f"eps1 must be positive, got {self.eps1}")
        if not self.eps2 > 0:
            raise InvalidConfig(f"eps2 must be positive, got {self.eps2}")
        if self.max_additions is not None and self.max_additions < 1:
            raise InvalidConfig(f"max_additions must be at least 1, got {self.max_additions}")
        if not 0 < self.rank_tol < 1:
            raise InvalidConfig(f"rank_tol must lie in (0, 1), got {self.rank_tol}")

    def scale_for(self, phi):
        if not self.scale_tolerances:
            return 1.0
        return max(1.0, float(np.max(np.abs(phi))))

    def to_dict(self):
        return {
            "eps1": self.eps1,
            "eps2": self.eps2,
            "max_additions": self.max_additions,
            "trace": self.trace,
            "scale_tolerances": self.scale_tolerances,
            "incremental": self.incremental,
            "rank_tol": self.rank_tol,
        }


@dataclass
class TraceRecord:
    J: list
    s: float
    i: int
    b: np.ndarray
    rho_norm: float

    def to_dict(self):
        return {"J": list(self.J), "s": self.s, "i": self.i, "b": self.b.tolist(), "rho_norm": self.rho_norm}


@dataclass
class ProjectionResult:
    """Outcome of :func:`solve`.

    ``J`` holds 1-based constraint indices.  ``mu`` are the coordinates of
    ``phi`` in the final orthonormal basis, whose columns come from the rows
    listed in ``basis_indices`` (insertion order when the basis is grown
    incrementally, sorted otherwise).
    """

    y: np.ndarray
    rho: np.ndarray
    J: list
    status: Status
    iterations: int
    s: float
    scale: float
    diagnostics: dict
    mu: np.ndarray = field(default_factory=lambda: np.zeros(0))
    basis_indices: tuple = ()
    trace: list | None = None
    basis: OrthonormalBasis | None = field(default=None, repr=False)

    @property
    def k(self):
        return len(self.J)


def _check_dims(phi, R):
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (R.n,):
        raise DimensionMismatch(f"phi has shape {phi.shape}, constraints expect length {R.n}")
    return phi


def check_convex(phi, R, eps1):
    """True when every entry of ``R @ phi`` is at most ``eps1``."""
    phi = _check_dims(phi, R)
    return bool(np.max(R.matvec(phi)) <= eps1)


def select_max_violation(b):
    """Largest entry of ``b`` and its 1-based index; ties go to the smallest index."""
    i = int(np.argmax(b))
    return float(b[i]), i + 1


def kkt_diagnostics(y, rho, A, phi=None):
    """Feasibility ``min(A @ y)``, orthogonality ``<y, rho>`` and, given the
    original ``phi``, the reconstruction error ``max|y + rho - phi|``."""
    y = np.asarray(y, dtype=float)
    rho = np.asarray(rho, dtype=float)
    out = {
        "min_feasibility": float(np.min(A.matvec(y))),
        "orthogonality": float(y @ rho),
    }
    if phi is not None:
        out["reconstruction"] = float(np.max(np.abs((y + rho) - phi)))
    return out


def _finish(phi, A, y, rho, J, status, iterations, s, scale, cfg, mu, trace, basis=None):
    diag = kkt_diagnostics(y, rho, A)
    diag = {
        "max_violation": s,
        "min_feasibility": diag["min_feasibility"],
        "orthogonality": diag["orthogonality"],
        "solution_check_passed": bool(abs(diag["orthogonality"]) <= cfg.eps1 * scale),
    }
    return ProjectionResult(
        y=y, rho=rho, J=list(J), status=status, iterations=iterations, s=s, scale=scale,
        diagnostics=diag, mu=mu, trace=trace, basis=basis,
        basis_indices=tuple(basis.source_indices) if basis is not None else (),
    )


def solve(phi, A: ConstraintMatrix, cfg: SolverConfig | None = None) -> ProjectionResult:
    """Project ``phi`` onto the cone ``{y : A @ y >= 0}``.

    Parameters
    ----------
    phi : array_like, shape (n,)
        Data vector.
    A : ConstraintMatrix
        Convexity constraints, shape ``(n - 2, n)``.
    cfg : SolverConfig, optional

    Returns
    -------
    ProjectionResult
        ``y + rho == phi`` holds exactly as computed (``y`` is formed as
        ``phi - rho``).  The exit reason is in ``status``; when several stop
        rules fire together the precedence is ViolationCleared, then
        IndexRepeated, then Stagnated.
    """
    cfg = cfg or SolverConfig()
    R = negate(A)
    phi = _check_dims(phi, R)
    m = R.m
    cap = m if cfg.max_additions is None else cfg.max_additions
    if cap > m:
        raise InvalidConfig(f"max_additions={cap} exceeds the {m} available constraints")
    scale = cfg.scale_for(phi)
    eps1 = cfg.eps1 * scale
    eps2 = cfg.eps2 * scale
    trace = [] if cfg.trace else None

    b = R.matvec(phi)
    s, i = select_max_violation(b)
    if s <= eps1:
        return _finish(phi, A, phi.copy(), np.zeros_like(phi), [], Status.ALREADY_CONVEX, 0, s, scale, cfg,
                       np.zeros(0), trace)

    J = []
    basis = OrthonormalBasis(R.n, cfg.rank_tol, capacity=m)

    def add(i):
        J.append(i)
        J.sort()
        if cfg.incremental:
            basis.extend(R.row(i), i)
            return basis
        return orthonormalize(R.rows(J), cfg.rank_tol, labels=J)

    # first projection: onto the single most violated row
    V = add(i)
    split = project(V, phi)
    rho, y = split.rho, split.y
    iterations = 1
    if trace is not None:
        trace.append(TraceRecord(list(J), s, i, b, float(np.linalg.norm(rho))))
    b = R.matvec(y)
    b_old = b + (eps2 + 1.0)

    while True:
        s, i = select_max_violation(b)
        # violation tolerance is scaled by the iterate under test, so a
        # cleared y passes the convexity check when fed back in
        if s <= cfg.eps1 * cfg.scale_for(y):
            status = Status.VIOLATION_CLEARED
            break
        if i in J:
            status = Status.INDEX_REPEATED
            break
        if np.sum(np.abs(b - b_old)) < eps2:
            status = Status.STAGNATED
            break
        if len(J) >= cap:
            status = Status.ADDITION_CAP_REACHED
            break
        V = add(i)
        split = project(V, phi)
        rho, y = split.rho, split.y
        iterations += 1
        if trace is not None:
            trace.append(TraceRecord(list(J), s, i, b, float(np.linalg.norm(rho))))
        b_old, b = b, R.matvec(y)

    return _finish(phi, A, y, rho, J, status, iterations, s, scale, cfg, split.mu, trace, V)
