"""Subspaces of R^n and the gap between them.

A :class:`Subspace` stores an orthonormal basis. The one-sided deviation
``delta(M, N) = sup{dist(x, N) : x in M, ||x|| = 1}`` is evaluated in closed
form as the largest singular value of ``(I - P_N) U_M``, which is exact in
the Euclidean norm.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionError, NotComplementaryError

#: gap below which two subspaces are treated as equal in postconditions
SAME_SUBSPACE_TOL = 1e-8

#: smallest singular value of [U_M | U_N] required for a direct sum
COMPLEMENT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of R^n given by an orthonormal basis (``n x k``)."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.float64)
        if b.ndim != 2 or b.shape[0] < 1:
            raise DimensionError(f"basis must be n x k with n >= 1, got shape {b.shape}")
        if b.shape[1] > b.shape[0]:
            raise DimensionError("more basis vectors than the ambient dimension")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    @classmethod
    def trivial(cls, n):
        return cls(np.zeros((n, 0)))

    @classmethod
    def whole(cls, n):
        return cls(np.eye(n))

    def complement(self):
        """Orthogonal complement in the same ambient space."""
        return Subspace(linalg.nullspace_basis(self.basis.T, rank=self.dim))

    def projector(self):
        return orth_projector(self)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def from_spanning(vectors, tol=None):
    """Orthonormalize the column span of ``vectors``.

    Columns that are dependent at ``tol`` (default: the package rank
    tolerance) are dropped. Zero input yields the trivial subspace.
    """
    V = np.asarray(vectors, dtype=np.float64)
    if V.ndim == 1:
        V = V[:, None]
    V = linalg.as_matrix(V, "vectors")
    if V.shape[1] == 0 or not np.any(V):
        return Subspace.trivial(V.shape[0])
    return Subspace(linalg.range_basis(V, tol=tol))


def _check_same_ambient(M, N):
    if M.ambient_dim != N.ambient_dim:
        raise DimensionError(
            f"ambient dimensions differ: {M.ambient_dim} vs {N.ambient_dim}")


def _residual(X, N):
    # (I - P_N) X without forming P_N
    return X - N.basis @ (N.basis.T @ X)


def dist_point(x, N):
    """Euclidean distance from the vector ``x`` to ``N``."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != N.ambient_dim:
        raise DimensionError(f"vector has length {x.shape[0]}, subspace lives in R^{N.ambient_dim}")
    return float(np.linalg.norm(_residual(x, N)))


def delta(M, N):
    """One-sided deviation of ``M`` from ``N``; 0 when ``M`` is trivial."""
    _check_same_ambient(M, N)
    if M.dim == 0:
        return 0.0
    value = linalg.spectral_norm(_residual(M.basis, N))
    return min(value, 1.0)


def gap(M, N):
    """Symmetric gap ``max(delta(M, N), delta(N, M))``."""
    return max(delta(M, N), delta(N, M))


def orth_projector(M):
    return M.basis @ M.basis.T


def is_complementary(M, N, tol=COMPLEMENT_TOL):
    """True iff ``M`` and ``N`` form a direct sum equal to the ambient space."""
    _check_same_ambient(M, N)
    n = M.ambient_dim
    if M.dim + N.dim != n:
        return False
    s = linalg.svd(np.hstack([M.basis, N.basis])).singular_values
    return bool(s[-1] > tol)


def oblique_projector(range_part, null_part, tol=COMPLEMENT_TOL):
    """Idempotent with range ``range_part`` and kernel ``null_part``.

    With ``W = [U_R | U_N]`` the projector is ``W diag(I, 0) W^{-1}``.
    """
    _check_same_ambient(range_part, null_part)
    if not is_complementary(range_part, null_part, tol):
        raise NotComplementaryError(
            f"subspaces of dims {range_part.dim} and {null_part.dim} do not "
            f"span R^{range_part.ambient_dim} as a direct sum")
    r = range_part.dim
    W = np.hstack([range_part.basis, null_part.basis])
    W_inv = linalg.solve_square(W, np.eye(W.shape[0]))
    return range_part.basis @ W_inv[:r, :]
