"""Sketch application and matrix IO.

``apply`` computes (1/sqrt(p*m)) * S @ A by scattering each input row into
the output rows named by the matching sketch column, so the cost is
proportional to the input nonzeros times the per-column sketch sparsity.
The result is returned dense (m and d are small relative to n).

Matrices move through Matrix Market files: ``array`` format for dense
matrices, ``coordinate`` (1-based indices) for sparse.
"""

import numpy as np
import scipy.io
import scipy.sparse

from .errors import FormatError, ParameterError
from .sketch import DenseSketch


def apply(sketch, A):
    """(scale * S) @ A as a dense (m x d) array."""
    A_rows = A.shape[0]
    if A_rows != sketch.n:
        raise ParameterError(
            f"dimension mismatch: sketch has n = {sketch.n} columns, "
            f"input has {A_rows} rows"
        )
    if isinstance(sketch, DenseSketch):
        out = sketch.matrix @ A
    else:
        out = sketch.tocsc() @ A
    if scipy.sparse.issparse(out):
        out = out.toarray()
    return sketch.scale * np.asarray(out)


def apply_to_vector(sketch, x):
    """Vector specialization of :func:`apply`."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ParameterError(f"expected a vector, got shape {x.shape}")
    return apply(sketch, x)


def materialize_dense(sketch, max_entries=50_000_000):
    """Scaled dense matrix equal to the embedding entrywise."""
    return sketch.materialize(max_entries=max_entries)


def load_matrix(path, *, sparse_as="csr"):
    """Read a Matrix Market file; coordinate files stay sparse."""
    try:
        with open(path, "rb") as fh:
            M = scipy.io.mmread(fh)
    except (ValueError, OSError) as exc:
        raise FormatError(f"{path}: failed to parse Matrix Market file: {exc}") from exc
    if scipy.sparse.issparse(M):
        return M.asformat(sparse_as)
    return np.asarray(M, dtype=np.float64)


def save_matrix(path, M, comment=""):
    """Write dense arrays as MM array format, sparse as coordinate."""
    with open(path, "wb") as fh:
        if scipy.sparse.issparse(M):
            scipy.io.mmwrite(fh, M.tocoo(), comment=comment)
        else:
            scipy.io.mmwrite(fh, np.atleast_2d(np.asarray(M)), comment=comment)
