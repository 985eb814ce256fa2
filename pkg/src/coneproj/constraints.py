"""Second-difference (convexity) constraint matrices.

A vector ``y`` sampled at strictly increasing abscissae ``x`` is convex
when every second divided difference is nonnegative.  Multiplying out the
denominators gives one linear inequality per interior point::

    (x[i+2] - x[i+1]) y[i] + (x[i] - x[i+2]) y[i+1] + (x[i+1] - x[i]) y[i+2] >= 0

Stacking the ``n - 2`` inequalities gives a banded matrix ``A`` with three
nonzeros per row, so ``A @ y >= 0``.  For equally spaced data the common
factor ``dx`` is dropped and every row reduces to ``(1, -2, 1)``.

Row indices are 1-based wherever they leave this module's internals.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotIncreasing, TooShort

GENERAL = "general"
EQUISPACED = "equispaced"


def validate_abscissae(x):
    """Check that ``x`` has at least 3 entries and is strictly increasing.

    Raises
    ------
    TooShort
        If fewer than 3 abscissae are given.
    NotIncreasing
        At the 1-based index of the first entry not above its predecessor.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch(f"abscissae must be a vector, got shape {x.shape}")
    if x.size < 3:
        raise TooShort(x.size)
    if not np.all(np.isfinite(x)):
        raise ValueError("abscissae must be finite")
    bad = np.flatnonzero(np.diff(x) <= 0)
    if bad.size:
        raise NotIncreasing(int(bad[0]) + 2)
    return x


@dataclass(frozen=True)
class DataSet:
    """Abscissae ``x`` and ordinates ``phi`` of one projection problem."""

    x: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        x = validate_abscissae(self.x)
        phi = np.asarray(self.phi, dtype=float)
        if phi.shape != x.shape:
            raise DimensionMismatch(f"x has {x.size} entries but phi has {phi.size}")
        x.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "phi", phi)

    @property
    def n(self):
        return self.x.size

    @classmethod
    def equispaced(cls, phi, start=0.0, step=1.0):
        phi = np.asarray(phi, dtype=float)
        return cls(start + step * np.arange(phi.size), phi)

    def is_equispaced(self, rtol=1e-12):
        d = np.diff(self.x)
        return bool(np.all(np.abs(d - d[0]) <= rtol * abs(d[0])))


class ConstraintMatrix:
    """Banded ``(n - 2) x n`` matrix with nonzeros on columns ``i, i+1, i+2``.

    The three bands are stored as ``left``, ``middle`` and ``right``
    coefficient arrays of length ``m = n - 2``.  Products with vectors cost
    O(n); :meth:`to_dense` gives the full array when needed.
    """

    __slots__ = ("left", "middle", "right", "spacing_kind", "_dense")

    def __init__(self, left, middle, right, spacing_kind=GENERAL):
        bands = [np.array(b, dtype=float) for b in (left, middle, right)]
        if bands[0].ndim != 1 or not bands[0].size:
            raise TooShort(bands[0].size + 2)
        if not bands[0].shape == bands[1].shape == bands[2].shape:
            raise DimensionMismatch("band lengths differ")
        for b in bands:
            b.setflags(write=False)
        self.left, self.middle, self.right = bands
        self.spacing_kind = spacing_kind
        self._dense = None

    @property
    def m(self):
        return self.left.size

    @property
    def n(self):
        return self.left.size + 2

    @property
    def shape(self):
        return (self.m, self.n)

    def __repr__(self):
        return f"ConstraintMatrix(m={self.m}, n={self.n}, spacing_kind={self.spacing_kind!r})"

    def __eq__(self, other):
        if not isinstance(other, ConstraintMatrix):
            return NotImplemented
        return (
            np.array_equal(self.left, other.left)
            and np.array_equal(self.middle, other.middle)
            and np.array_equal(self.right, other.right)
        )

    def __neg__(self):
        return negate(self)

    def matvec(self, y):
        """Return ``A @ y``."""
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n,):
            raise DimensionMismatch(f"expected a vector of length {self.n}, got shape {y.shape}")
        return self.left * y[:-2] + self.middle * y[1:-1] + self.right * y[2:]

    def rmatvec(self, lam):
        """Return ``A.T @ lam``."""
        lam = np.asarray(lam, dtype=float)
        if lam.shape != (self.m,):
            raise DimensionMismatch(f"expected a vector of length {self.m}, got shape {lam.shape}")
        out = np.zeros(self.n)
        out[:-2] += self.left * lam
        out[1:-1] += self.middle * lam
        out[2:] += self.right * lam
        return out

    def __matmul__(self, y):
        return self.matvec(y)

    def row(self, i):
        """Dense copy of row ``i`` (1-based)."""
        if not 1 <= i <= self.m:
            raise IndexError(f"row {i} outside 1..{self.m}")
        r = np.zeros(self.n)
        r[i - 1 : i + 2] = (self.left[i - 1], self.middle[i - 1], self.right[i - 1])
        return r

    def rows(self, indices):
        """Dense ``n x k`` array whose columns are the requested rows (1-based)."""
        out = np.zeros((self.n, len(indices)))
        for c, i in enumerate(indices):
            out[i - 1 : i + 2, c] = (self.left[i - 1], self.middle[i - 1], self.right[i - 1])
        return out

    def to_dense(self):
        if self._dense is None:
            dense = np.zeros(self.shape)
            idx = np.arange(self.m)
            dense[idx, idx] = self.left
            dense[idx, idx + 1] = self.middle
            dense[idx, idx + 2] = self.right
            dense.setflags(write=False)
            self._dense = dense
        return self._dense

    @classmethod
    def from_dense(cls, dense, spacing_kind=GENERAL):
        dense = np.asarray(dense, dtype=float)
        m, n = dense.shape
        if n != m + 2:
            raise DimensionMismatch(f"expected shape (m, m + 2), got {dense.shape}")
        idx = np.arange(m)
        out = cls(dense[idx, idx], dense[idx, idx + 1], dense[idx, idx + 2], spacing_kind)
        if not np.array_equal(out.to_dense(), dense):
            raise ValueError("matrix has entries outside the three bands")
        return out


def build_general(x):
    """Constraint matrix for arbitrary strictly increasing abscissae."""
    x = validate_abscissae(x)
    return ConstraintMatrix(x[2:] - x[1:-1], x[:-2] - x[2:], x[1:-1] - x[:-2], GENERAL)


def build_equispaced(n):
    """Constraint matrix with rows ``(1, -2, 1)`` for ``n`` equally spaced points."""
    n = int(n)
    if n < 3:
        raise TooShort(n)
    m = n - 2
    return ConstraintMatrix(np.ones(m), np.full(m, -2.0), np.ones(m), EQUISPACED)


def build_for(data):
    """Pick the equispaced matrix when the data allows it, else the general one."""
    if data.is_equispaced():
        return build_equispaced(data.n)
    return build_general(data.x)


def negate(A):
    """Entrywise negation, ``R = -A``."""
    return ConstraintMatrix(-A.left, -A.middle, -A.right, A.spacing_kind)
