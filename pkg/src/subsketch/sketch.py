"""Sketch containers and the on-disk sketch format.

A :class:`SparseSketch` stores the *unscaled* matrix S column-major
(CSC-style arrays) together with the global scale 1/sqrt(p*m); the
embedding matrix is ``scale * S``.  Row indices are 0-based and strictly
increasing within each column.  :class:`DenseSketch` is the analogous
holder for the dense baselines.

File format (``.skt``), version 1, little-endian throughout:

    bytes 0..7    magic ``b"SKCHv001"``
    bytes 8..15   uint64 header length H
    next H bytes  UTF-8 JSON header: format, kind, m, n, p, seed,
                  degree_k, family, scale, nnz and, for score-adapted
                  kinds, beta1, beta2, scores_sha256
    then          indptr  int64[n + 1]
    then          rows    int64[nnz]
    then          values  float64[nnz]
"""

import hashlib
import json
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np
import scipy.sparse

from .errors import FormatError, ParameterError

_MAGIC = b"SKCHv001"
FORMAT_VERSION = 1


@dataclass
class SparseSketch:
    spec: object
    indptr: np.ndarray
    rows: np.ndarray
    values: np.ndarray
    scale: float

    def __post_init__(self):
        self.indptr = np.asarray(self.indptr, dtype=np.int64)
        self.rows = np.asarray(self.rows, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        self._csc = None

    @property
    def m(self):
        return self.spec.m

    @property
    def n(self):
        return self.spec.n

    @property
    def nnz(self):
        return int(self.rows.size)

    @property
    def pm(self):
        """Column energy target p*m of the unscaled matrix."""
        return float(self.spec.p) * self.spec.m

    def tocsc(self):
        """Unscaled S as a scipy CSC matrix (cached)."""
        if self._csc is None:
            self._csc = scipy.sparse.csc_matrix(
                (self.values, self.rows, self.indptr), shape=(self.m, self.n)
            )
        return self._csc

    def column_energy(self):
        """Per-column sums of squared unscaled entries."""
        cols = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return np.bincount(cols, weights=self.values**2, minlength=self.n)

    def apply(self, A):
        """(scale * S) @ A as a dense array."""
        from .apply import apply as _apply

        return _apply(self, A)

    def materialize(self, max_entries=50_000_000):
        """Dense scaled matrix; refuses to allocate above ``max_entries``."""
        if self.m * self.n > max_entries:
            raise ParameterError(
                f"materializing {self.m}x{self.n} exceeds the "
                f"{max_entries}-entry cap"
            )
        return self.scale * self.tocsc().toarray()

    def _header(self):
        spec = self.spec
        header = {
            "format": FORMAT_VERSION,
            "kind": spec.kind,
            "m": int(spec.m),
            "n": int(spec.n),
            "p": float(spec.p),
            "seed": int(spec.seed),
            "degree_k": int(spec.degree_k),
            "family": getattr(spec, "family", "kwise"),
            "scale": float(self.scale),
            "nnz": self.nnz,
        }
        scores = getattr(spec, "scores", None)
        if scores is not None:
            header["beta1"] = float(scores.beta1)
            header["beta2"] = float(scores.beta2)
            header["scores_sha256"] = scores.digest()
        return header

    def save(self, path):
        header = json.dumps(self._header()).encode()
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(np.uint64(len(header)).tobytes())
            fh.write(header)
            fh.write(self.indptr.astype("<i8").tobytes())
            fh.write(self.rows.astype("<i8").tobytes())
            fh.write(self.values.astype("<f8").tobytes())


@dataclass
class DenseSketch:
    """Unscaled dense baseline matrix plus the global scale."""

    spec: object
    matrix: np.ndarray
    scale: float

    @property
    def m(self):
        return self.spec.m

    @property
    def n(self):
        return self.spec.n

    @property
    def pm(self):
        return float(self.spec.p) * self.spec.m

    @property
    def nnz(self):
        return int(np.count_nonzero(self.matrix))

    def column_energy(self):
        return np.einsum("ij,ij->j", self.matrix, self.matrix)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def apply(self, A):
        from .apply import apply as _apply

        return _apply(self, A)

    def materialize(self, max_entries=50_000_000):
        if self.m * self.n > max_entries:
            raise ParameterError(
                f"materializing {self.m}x{self.n} exceeds the "
                f"{max_entries}-entry cap"
            )
        return self.scale * self.matrix


def scores_digest(z, beta1, beta2):
    h = hashlib.sha256()
    h.update(np.asarray(z, dtype=np.float64).tobytes())
    h.update(np.float64(beta1).tobytes())
    h.update(np.float64(beta2).tobytes())
    return h.hexdigest()


def sketch_from_dense(matrix, scale, spec):
    """Rebuild the CSC arrays of a sketch from its scaled dense form."""
    csc = scipy.sparse.csc_matrix(np.asarray(matrix) / scale)
    csc.sort_indices()
    return SparseSketch(
        spec=spec,
        indptr=csc.indptr.astype(np.int64),
        rows=csc.indices.astype(np.int64),
        values=csc.data.astype(np.float64),
        scale=scale,
    )


def load_sketch(path):
    """Read a ``.skt`` file written by :meth:`SparseSketch.save`."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, not a sketch file")
        (hlen,) = np.frombuffer(fh.read(8), dtype="<u8")
        try:
            header = json.loads(fh.read(int(hlen)).decode())
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"{path}: corrupt header: {exc}") from exc
        if header.get("format") != FORMAT_VERSION:
            raise FormatError(f"{path}: unsupported format {header.get('format')}")
        n = header["n"]
        nnz = header["nnz"]
        if not (isinstance(n, int) and isinstance(nnz, int) and n >= 1 and nnz >= 0):
            raise FormatError(f"{path}: invalid dimensions in header (n={n}, nnz={nnz})")
        indptr = np.frombuffer(fh.read(8 * (n + 1)), dtype="<i8").astype(np.int64)
        rows = np.frombuffer(fh.read(8 * nnz), dtype="<i8").astype(np.int64)
        values = np.frombuffer(fh.read(8 * nnz), dtype="<f8").astype(np.float64)
    if indptr.size != n + 1 or rows.size != nnz or values.size != nnz:
        raise FormatError(f"{path}: truncated payload")
    spec = SimpleNamespace(
        kind=header["kind"],
        m=header["m"],
        n=header["n"],
        p=header["p"],
        seed=header["seed"],
        degree_k=header["degree_k"],
        family=header.get("family", "kwise"),
        extras={
            k: header[k]
            for k in ("beta1", "beta2", "scores_sha256")
            if k in header
        },
    )
    return SparseSketch(
        spec=spec, indptr=indptr, rows=rows, values=values, scale=header["scale"]
    )
