"""Outer inverses with prescribed range and kernel, and the classical
generalized inverses obtained from them.

The outer inverse ``A2 = A^(2)_{T,S}`` of ``A`` (``n_Y x n_X``) is the unique
``G2`` with ``G2 A G2 = G2``, ``R(G2) = T`` and ``N(G2) = S``. It exists iff
``N(A) & T = {0}`` and ``A T (+) S = R^{n_Y}``. It is built here as
``(G A)^g G`` for any ``G`` with range ``T`` and kernel ``S``, where ``^g``
is the group inverse.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (DimensionError, InfeasiblePrescriptionError,
                     NoGroupInverseError, NotDefinedError, NotSolvableError,
                     SingularMatrixError, WeightError)
from .subspace import Subspace, gap, is_complementary, orth_projector

#: relative tolerance for the N(A) & T = {0} test and the AT (+) S test
EXIST_TOL = 1e-10

#: BC must have at least this reciprocal condition for index <= 1
GROUP_RCOND = 1e-12


@dataclass(frozen=True)
class ExistenceDiagnostics:
    """Outcome of :func:`exists_outer_inverse`; truthy iff the inverse exists."""

    dims_ok: bool
    kernel_ok: bool
    complement_ok: bool
    sigma_min_AT: float
    sigma_min_ATS: float

    def __bool__(self):
        return self.dims_ok and self.kernel_ok and self.complement_ok

    def describe(self):
        parts = []
        if not self.dims_ok:
            parts.append("dim T + dim S != n_Y")
        if not self.kernel_ok:
            parts.append(f"N(A) meets T (sigma_min(A U_T) = {self.sigma_min_AT:.3e})")
        if not self.complement_ok:
            parts.append(f"AT and S are not complementary (sigma_min = {self.sigma_min_ATS:.3e})")
        return "; ".join(parts) or "solvable"

    def to_dict(self):
        return {
            "exists": bool(self),
            "dims_ok": self.dims_ok,
            "kernel_ok": self.kernel_ok,
            "complement_ok": self.complement_ok,
            "sigma_min_AT": self.sigma_min_AT,
            "sigma_min_ATS": self.sigma_min_ATS,
        }


@dataclass(frozen=True, eq=False)
class OuterInverseSolution:
    G2: np.ndarray
    kappa: float
    residual_defining_eq: float
    range_gap: float
    kernel_gap: float
    # rel. difference between (GA)^g G and G (AG)^g
    factorization_diff: float


def _check_shapes(A, T, S):
    n_Y, n_X = A.shape
    if T.ambient_dim != n_X:
        raise DimensionError(f"T lives in R^{T.ambient_dim}, A has {n_X} columns")
    if S.ambient_dim != n_Y:
        raise DimensionError(f"S lives in R^{S.ambient_dim}, A has {n_Y} rows")


def image_subspace(A, T):
    """``A T`` as a subspace, assuming ``A`` is injective on ``T``."""
    return Subspace(linalg.range_basis(A @ T.basis, rank=T.dim))


def exists_outer_inverse(A, T, S, tol=EXIST_TOL):
    """Check ``N(A) & T = {0}`` and ``A T (+) S = R^{n_Y}``.

    The kernel condition is ``sigma_min(A U_T) > tol * ||A||``; the direct sum
    is tested with :func:`~outerinv.subspace.is_complementary` at ``tol``.
    """
    A = linalg.as_matrix(A, "A")
    _check_shapes(A, T, S)
    n_Y = A.shape[0]
    dims_ok = T.dim + S.dim == n_Y

    if T.dim == 0:
        sigma_AT, kernel_ok = np.inf, True
    elif T.dim > n_Y:
        sigma_AT, kernel_ok = 0.0, False
    else:
        sigma_AT = float(linalg.svd(A @ T.basis).singular_values[-1])
        kernel_ok = sigma_AT > tol * linalg.spectral_norm(A)

    sigma_ATS, complement_ok = 0.0, False
    if dims_ok and kernel_ok:
        AT = image_subspace(A, T)
        sigma_ATS = float(linalg.svd(np.hstack([AT.basis, S.basis])).singular_values[-1])
        complement_ok = is_complementary(AT, S, tol)
    return ExistenceDiagnostics(dims_ok, kernel_ok, complement_ok, sigma_AT, sigma_ATS)


def prescribed_operator(T, S, mixing=None):
    """An operator ``G = U_T M Z^T`` with ``R(G) = T`` and ``N(G) = S``.

    ``Z`` is an orthonormal basis of the orthogonal complement of ``S`` and
    ``M`` is the invertible ``mixing`` matrix (identity by default). Any
    choice of ``M`` gives a valid ``G``.
    """
    t = T.dim
    if t + S.dim != S.ambient_dim:
        raise InfeasiblePrescriptionError(
            f"dim T ({t}) + dim S ({S.dim}) must equal {S.ambient_dim}")
    Z = S.complement().basis
    if mixing is None:
        return T.basis @ Z.T
    mixing = linalg.as_matrix(mixing, "mixing")
    if mixing.shape != (t, t):
        raise DimensionError(f"mixing must be {t} x {t}, got {mixing.shape}")
    rc = linalg.rcond(mixing)
    if rc < linalg.SINGULAR_RCOND:
        raise SingularMatrixError(f"mixing matrix is singular (rcond={rc:.3e})", rc)
    return T.basis @ mixing @ Z.T


def group_inverse(M, tol=None, rank=None):
    """Group inverse through a full-rank factorization.

    With ``M = C B`` (``C = U_r diag(s_r)``, ``B = V_r^T``) the group inverse
    is ``C (BC)^{-2} B``. It exists iff ``BC`` is invertible, i.e. the index
    of ``M`` is at most one.

    Parameters
    ----------
    M : (n, n) array
    tol : float, optional
        Rank tolerance; defaults to ``n * sigma_1 * eps``.
    rank : int, optional
        Known rank, overriding ``tol``.
    """
    M = linalg.as_matrix(M, "M")
    n = M.shape[0]
    if M.shape != (n, n):
        raise DimensionError(f"M must be square, got {M.shape}")
    U, s, Vt = linalg.svd(M)
    r = linalg._rank_from(M, s, tol, rank)
    if r == 0:
        return np.zeros_like(M)
    C = U[:, :r] * s[:r]
    B = Vt[:r]
    BC = B @ C
    rc = linalg.rcond(BC)
    if rc < GROUP_RCOND:
        raise NoGroupInverseError(f"index of M exceeds one (rcond(BC)={rc:.3e})")
    X = np.linalg.solve(BC, np.linalg.solve(BC, B))
    return C @ X


class OuterInverseProblem:
    """The triple ``(A, T, S)``; solving caches the solution."""

    def __init__(self, A, T, S):
        self.A = linalg.as_matrix(A, "A")
        _check_shapes(self.A, T, S)
        self.T = T
        self.S = S
        self._solution = None

    def exists(self, tol=EXIST_TOL):
        return exists_outer_inverse(self.A, self.T, self.S, tol)

    def solve(self):
        if self._solution is None:
            self._solution = outer_inverse(self.A, self.T, self.S)
        return self._solution

    @property
    def kappa(self):
        return self.solve().kappa


def outer_inverse(A, T, S, mixing=None, tol=EXIST_TOL):
    """Compute ``A^(2)_{T,S}`` as ``(G A)^g G``.

    ``G (A G)^g`` is computed as well and the relative difference between the
    two is stored in ``factorization_diff``.

    Raises
    ------
    NotSolvableError
        If the existence conditions fail at ``tol``. The exception carries the
        :class:`ExistenceDiagnostics`.
    """
    A = linalg.as_matrix(A, "A")
    diag = exists_outer_inverse(A, T, S, tol)
    if not diag:
        raise NotSolvableError(f"A^(2)_(T,S) does not exist: {diag.describe()}", diag)

    t = T.dim
    G = prescribed_operator(T, S, mixing)
    G2 = group_inverse(G @ A, rank=t) @ G
    G2_alt = G @ group_inverse(A @ G, rank=t)

    norm_G2 = np.linalg.norm(G2)
    residual = np.linalg.norm(G2 @ A @ G2 - G2) / max(1.0, norm_G2)
    range_gap = gap(Subspace(linalg.range_basis(G2, rank=t)), T)
    kernel_gap = gap(Subspace(linalg.nullspace_basis(G2, rank=t)), S)
    kappa = linalg.spectral_norm(A) * linalg.spectral_norm(G2)
    return OuterInverseSolution(
        G2=G2,
        kappa=kappa,
        residual_defining_eq=float(residual),
        range_gap=range_gap,
        kernel_gap=kernel_gap,
        factorization_diff=linalg.rel_diff(G2, G2_alt),
    )


def condition_number(A, solution):
    """``||A|| * ||A^(2)_{T,S}||`` in the spectral norm."""
    return linalg.spectral_norm(A) * linalg.spectral_norm(solution.G2)


def moore_penrose(A, tol=None):
    """Pseudoinverse as the outer inverse with ``T = R(A^T)``, ``S = N(A^T)``."""
    A = linalg.as_matrix(A, "A")
    r = linalg.numerical_rank(A, tol)
    T = Subspace(linalg.range_basis(A.T, rank=r))
    S = Subspace(linalg.nullspace_basis(A.T, rank=r))
    return outer_inverse(A, T, S, tol=0.0).G2


def _check_spd(W, name):
    W = linalg.as_matrix(W, name)
    if W.shape[0] != W.shape[1]:
        raise WeightError(f"{name} must be square, got {W.shape}")
    if np.linalg.norm(W - W.T) > 1e-12 * max(1.0, np.linalg.norm(W)):
        raise WeightError(f"{name} is not symmetric")
    try:
        np.linalg.cholesky(W)
    except np.linalg.LinAlgError as exc:
        raise WeightError(f"{name} is not positive definite") from exc
    return W


def weighted_moore_penrose(A, M, N, tol=None):
    """Weighted pseudoinverse ``A^+_{MN}``.

    ``M`` (``m x m``) weights the residual and ``N`` (``n x n``) the solution
    norm. Uses ``T = R(N^{-1} A^T M)`` and ``S = N(A^T M)``.
    """
    A = linalg.as_matrix(A, "A")
    m, n = A.shape
    M = _check_spd(M, "M")
    N = _check_spd(N, "N")
    if M.shape != (m, m) or N.shape != (n, n):
        raise DimensionError(f"weights must be {m}x{m} and {n}x{n}")
    r = linalg.numerical_rank(A, tol)
    AtM = A.T @ M
    T = Subspace(linalg.range_basis(np.linalg.solve(N, AtM), rank=r))
    S = Subspace(linalg.nullspace_basis(AtM, rank=r))
    return outer_inverse(A, T, S, tol=0.0).G2


def drazin_index(A, tol=None):
    """Smallest ``k >= 0`` with ``rank(A^k) == rank(A^{k+1})``."""
    A = linalg.as_matrix(A, "A")
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionError(f"A must be square, got {A.shape}")
    power = np.eye(n)
    rank = n
    for k in range(n + 1):
        nxt = power @ A
        next_rank = linalg.numerical_rank(nxt, tol)
        if next_rank == rank:
            return k
        power, rank = nxt, next_rank
    return n


def drazin(A, tol=None):
    """Drazin inverse: ``T = R(A^k)``, ``S = N(A^k)`` with ``k`` the index."""
    A = linalg.as_matrix(A, "A")
    k = drazin_index(A, tol)
    Ak = np.linalg.matrix_power(A, k)
    r = linalg.numerical_rank(Ak, tol)
    T = Subspace(linalg.range_basis(Ak, rank=r))
    S = Subspace(linalg.nullspace_basis(Ak, rank=r))
    return outer_inverse(A, T, S, tol=0.0).G2


def bott_duffin(A, L):
    """Bott-Duffin inverse of ``A`` with respect to ``L`` (``T = L``,
    ``S`` the orthogonal complement of ``L``)."""
    A = linalg.as_matrix(A, "A")
    n = A.shape[0]
    if A.shape != (n, n) or L.ambient_dim != n:
        raise DimensionError("A must be square and L must live in its domain")
    P = orth_projector(L)
    rc = linalg.rcond(A @ P + np.eye(n) - P)
    if rc < linalg.SINGULAR_RCOND:
        raise NotDefinedError(f"A P_L + P_L^perp is singular (rcond={rc:.3e})")
    return outer_inverse(A, L, L.complement(), tol=0.0).G2
