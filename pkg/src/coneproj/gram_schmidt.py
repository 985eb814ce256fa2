"""Orthonormal bases by Gram-Schmidt and projections onto their span.

Projections here never form ``X.T @ X`` or any inverse of it.  Each new
column is orthogonalized against the current basis with modified
Gram-Schmidt, and the sweep is repeated once ("twice is enough"), which
keeps the basis orthogonal to working precision even when the source
columns are nearly parallel.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, EmptyBasis

DEFAULT_RANK_TOL = 1e-10


class ProjectionSplit(NamedTuple):
    """Coordinates ``mu`` of ``phi`` in the basis, its component ``rho``
    in the spanned subspace, and the remainder ``y = phi - rho``."""

    mu: np.ndarray
    rho: np.ndarray
    y: np.ndarray


class OrthonormalBasis:
    """Orthonormal columns built one source vector at a time.

    Attributes
    ----------
    vectors : ndarray, shape (n, k)
        The retained orthonormal columns.
    source_indices : tuple of int
        Labels of the source columns behind each retained column, in
        column order.
    dropped : tuple of int
        Labels of source columns discarded as linearly dependent.
    coefficients : ndarray, shape (k, k)
        Upper triangular factor with ``sources == vectors @ coefficients``
        for the retained source columns.
    """

    def __init__(self, n, rank_tol=DEFAULT_RANK_TOL, capacity=None):
        self.n = int(n)
        self.rank_tol = rank_tol
        cap = self.n if capacity is None else max(int(capacity), 1)
        self._q = np.zeros((self.n, cap))
        self._r = np.zeros((cap, cap))
        self.k = 0
        self.source_indices = ()
        self.dropped = ()

    def __len__(self):
        return self.k

    @property
    def vectors(self):
        return self._q[:, : self.k]

    @property
    def coefficients(self):
        return self._r[: self.k, : self.k]

    def _grow(self):
        cap = 2 * self._q.shape[1]
        q = np.zeros((self.n, cap))
        q[:, : self.k] = self.vectors
        r = np.zeros((cap, cap))
        r[: self.k, : self.k] = self.coefficients
        self._q, self._r = q, r

    def extend(self, column, label=None):
        """Orthogonalize ``column`` against the basis and append it.

        Returns ``False`` (and records ``label`` as dropped) when the
        residual norm falls below ``rank_tol`` times the original norm.
        """
        w = np.array(column, dtype=float)
        if w.shape != (self.n,):
            raise DimensionMismatch(f"expected a column of length {self.n}, got shape {w.shape}")
        label = self.k + len(self.dropped) if label is None else label
        norm0 = np.sqrt(w @ w)
        k = self.k
        coef = np.zeros(k + 1)
        q = self._q
        for _ in range(2):
            for j in range(k):
                c = q[:, j] @ w
                w -= c * q[:, j]
                coef[j] += c
        norm = np.sqrt(w @ w)
        if norm0 == 0.0 or norm < self.rank_tol * norm0:
            self.dropped += (label,)
            return False
        if k == q.shape[1]:
            self._grow()
        self._q[:, k] = w / norm
        coef[k] = norm
        self._r[: k + 1, k] = coef
        self.k += 1
        self.source_indices += (label,)
        return True

    def gram_error(self):
        """Largest entry of ``|V.T @ V - I|``."""
        v = self.vectors
        return float(np.max(np.abs(v.T @ v - np.eye(self.k)), initial=0.0))


def orthonormalize(X, rank_tol=DEFAULT_RANK_TOL, labels=None):
    """Gram-Schmidt basis for the columns of ``X``.

    Parameters
    ----------
    X : array_like, shape (n, k)
        Source columns; they need not be independent.
    rank_tol : float
        Relative residual norm under which a column counts as dependent.
    labels : sequence, optional
        Identifiers recorded in ``source_indices`` and ``dropped``
        (defaults to column positions).

    Raises
    ------
    EmptyBasis
        When every column is dropped.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if k < 1:
        raise EmptyBasis("no columns given")
    labels = range(k) if labels is None else labels
    basis = OrthonormalBasis(n, rank_tol, capacity=k)
    for c, label in zip(range(k), labels):
        basis.extend(X[:, c], label)
    if not basis.k:
        raise EmptyBasis(f"all {k} columns were dropped as dependent")
    return basis


def project(V, phi):
    """Split ``phi`` into its projection onto ``span(V)`` and the remainder."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (V.n,):
        raise DimensionMismatch(f"basis has length {V.n}, phi has shape {phi.shape}")
    if not V.k:
        raise EmptyBasis("cannot project onto an empty basis")
    v = V.vectors
    mu = v.T @ phi
    rho = v @ mu
    return ProjectionSplit(mu, rho, phi - rho)
