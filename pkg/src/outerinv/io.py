"""CSV matrix files: one row per line, comma separated, no header."""

import warnings

import numpy as np

from .linalg import as_matrix
from .subspace import from_spanning


def read_matrix_csv(path):
    with warnings.catch_warnings():
        # loadtxt warns on empty input; we raise instead
        warnings.simplefilter("ignore", UserWarning)
        data = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    if data.size == 0:
        raise ValueError(f"{path}: no matrix entries")
    return as_matrix(data, str(path))


def read_subspace_csv(path, tol=None):
    """Subspace spanned by the columns of the matrix stored at ``path``."""
    return from_spanning(read_matrix_csv(path), tol)


def format_matrix_csv(A):
    return "".join(",".join(repr(float(x)) for x in row) + "\n" for row in np.atleast_2d(A))


def write_matrix_csv(path, A):
    with open(path, "w") as fh:
        fh.write(format_matrix_csv(A))
