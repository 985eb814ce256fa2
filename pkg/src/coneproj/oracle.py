"""Exact cone projection by enumerating active sets, with KKT certificates.

For a candidate set ``J`` the point ``phi`` minus its projection onto the
rows ``A_J`` is the nearest point on the face ``{A_J y = 0}``.  It is the
cone projection iff it is feasible and the residual ``rho = phi - y`` is a
nonnegative combination of the negated active rows, ``rho = -A_J.T @ lam``
with ``lam >= 0``.  The projection is unique, so the first certified
candidate is the answer.  Only meant for small problems (``m <= 12``).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, KktReject, NoCertificate, TooLarge
from .gram_schmidt import DEFAULT_RANK_TOL, orthonormalize, project

MAX_CONSTRAINTS = 12
ACTIVE_TOL = 1e-8
MULTIPLIER_TOL = 1e-10
REPRESENTATION_TOL = 1e-9


@dataclass
class KktCertificate:
    """Evidence that ``y`` is the projection.

    ``lambda_hat`` are the coefficients of ``rho`` over the negated rows
    indexed by ``J_star`` (1-based); the Lagrange multipliers of the
    squared-distance objective are twice these values.
    """

    J_star: list
    lambda_hat: np.ndarray
    feasibility_margin: float
    representation_residual: float

    def to_dict(self):
        return {
            "J_star": list(self.J_star),
            "lambda_hat": self.lambda_hat.tolist(),
            "feasibility_margin": self.feasibility_margin,
            "representation_residual": self.representation_residual,
        }


def _scale(phi):
    return max(1.0, float(np.max(np.abs(phi))))


def equality_project(phi, A, J):
    """``phi`` minus its orthogonal projection onto the rows of ``A`` in ``J``."""
    phi = np.asarray(phi, dtype=float)
    J = sorted(J)
    if not J:
        return phi.copy()
    V = orthonormalize(A.rows(J), DEFAULT_RANK_TOL, labels=J)
    return project(V, phi).y


def verify_kkt(phi, y, A, J=None):
    """Certify ``y`` as the projection of ``phi``, or raise :class:`KktReject`.

    The multipliers are fitted over the constraint set ``J`` (1-based) when
    given, else over every constraint with ``|A y| <= ACTIVE_TOL * scale``.
    """
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    if phi.shape != (A.n,) or y.shape != (A.n,):
        raise DimensionMismatch(f"expected vectors of length {A.n}")
    scale = _scale(phi)
    rho = phi - y
    Ay = A.matvec(y)
    margin = float(np.min(Ay))
    if margin < -ACTIVE_TOL * scale:
        raise KktReject("Infeasible", f"min(A y) = {margin:.3e}")
    if J is None:
        J = [int(j) + 1 for j in np.flatnonzero(np.abs(Ay) <= ACTIVE_TOL * scale)]
    else:
        J = sorted(int(j) for j in J)
        if J and np.max(np.abs(Ay[np.array(J) - 1])) > ACTIVE_TOL * scale:
            raise KktReject("BadRepresentation", "a listed constraint is not active")
    if J:
        negrows = -A.rows(J)
        V = orthonormalize(negrows, DEFAULT_RANK_TOL, labels=J)
        if V.dropped:
            keep = [J.index(j) for j in V.source_indices]
            J = list(V.source_indices)
            negrows = negrows[:, keep]
        # negrows = V @ T with T upper triangular, so T @ lam = V.T @ rho
        lam = solve_triangular(V.coefficients, V.vectors.T @ rho, lower=False)
        resid = float(np.max(np.abs(rho - negrows @ lam)))
    else:
        lam = np.zeros(0)
        resid = float(np.max(np.abs(rho)))
    if resid > REPRESENTATION_TOL * scale:
        raise KktReject("BadRepresentation", f"residual {resid:.3e}")
    if lam.size and lam.min() < -MULTIPLIER_TOL * scale:
        raise KktReject("NegativeMultiplier", f"min lambda = {lam.min():.3e}")
    return KktCertificate(J, lam, margin, resid)


def oracle_project(phi, A):
    """Exact projection by trying every active set in order of size.

    The certificate's ``J_star`` is the first (smallest) certified set, so a
    convex ``phi`` gives ``J_star == []`` even when some constraints hold with
    equality.

    Returns
    -------
    y : ndarray
    cert : KktCertificate
    """
    phi = np.asarray(phi, dtype=float)
    m = A.m
    if m > MAX_CONSTRAINTS:
        raise TooLarge(m, MAX_CONSTRAINTS)
    if phi.shape != (A.n,):
        raise DimensionMismatch(f"phi has shape {phi.shape}, expected ({A.n},)")
    for size in range(m + 1):
        for J in combinations(range(1, m + 1), size):
            y = equality_project(phi, A, J)
            try:
                cert = verify_kkt(phi, y, A, J)
            except KktReject:
                continue
            return y, cert
    raise NoCertificate(f"no active set certified for phi={phi.tolist()}")
