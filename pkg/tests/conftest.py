import numpy as np
import pytest

from outerinv.subspace import Subspace

# (criterion, passed, detail) rows collected by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_subspace(rng, n, k):
    """Orthonormalized Gaussian k-dimensional subspace of R^n."""
    if k == 0:
        return Subspace.trivial(n)
    return Subspace(np.linalg.qr(rng.standard_normal((n, k)))[0])


def closed_form_outer(A, T, S):
    """``U_T (Z^T A U_T)^{-1} Z^T`` with ``Z`` an orthonormal basis of S^perp.

    Independent of the group-inverse route used by the package.
    """
    n_Y = A.shape[0]
    if T.dim == 0:
        return np.zeros((A.shape[1], n_Y))
    Q = np.linalg.qr(np.hstack([S.basis, np.random.default_rng(0).standard_normal((n_Y, n_Y))]))[0]
    Z = Q[:, S.dim:n_Y]
    return T.basis @ np.linalg.solve(Z.T @ A @ T.basis, Z.T)


def rel(X, Y):
    return np.linalg.norm(X - Y) / max(np.linalg.norm(Y), 1e-300)


def random_mixing(rng, t):
    """Well-conditioned random invertible t x t matrix (cond <= 4)."""
    Q1 = np.linalg.qr(rng.standard_normal((t, t)))[0]
    Q2 = np.linalg.qr(rng.standard_normal((t, t)))[0]
    return Q1 @ np.diag(rng.uniform(0.5, 2.0, t)) @ Q2


def unimodular(rng, n, steps=None):
    """Integer matrix with determinant +-1 and small entries, plus its inverse."""
    P = np.eye(n)
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.choice(n, 2, replace=False)
        E = np.eye(n)
        E[i, j] = rng.choice([-1, 1])
        P = P @ E
    return P, np.round(np.linalg.inv(P))


def index_matrix(rng, n, k):
    """Integer ``n x n`` matrix of index exactly ``k``.

    Similar (by an integer unimodular matrix) to ``diag(B, N)`` with ``B``
    invertible triangular and ``N`` nilpotent with a Jordan block of size
    ``k``. Powers are exact in floating point.
    """
    core = n - k - int(rng.integers(0, max(1, n - k) if k else 1))
    core = max(core, 0) if k else n
    nil = n - core
    B = np.triu(rng.integers(-1, 2, (core, core)).astype(float), 1)
    B += np.diag(rng.choice([-2.0, -1.0, 1.0, 2.0], core))
    N = np.zeros((nil, nil))
    # one block of size k, the rest split into blocks of size <= k
    sizes, left = [k] if k else [], nil - k
    while left > 0:
        s = int(rng.integers(1, min(k, left) + 1))
        sizes.append(s)
        left -= s
    pos = 0
    for s in sizes:
        for i in range(s - 1):
            N[pos + i, pos + i + 1] = 1.0
        pos += s
    D = np.zeros((n, n))
    D[:core, :core] = B
    D[core:, core:] = N
    P, P_inv = unimodular(rng, n)
    return P @ D @ P_inv
