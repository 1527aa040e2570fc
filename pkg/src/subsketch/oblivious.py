"""Oblivious sketch constructions and their parameter defaults.

Kinds:

* ``osnap`` -- each column is split into s = p*m equal blocks of height
  m/s; every block holds exactly one +-1 entry at a position drawn
  uniformly within the block.  Signs and positions come from
  domain-separated sub-streams of one hash family.
* ``ose-ie`` -- every entry is independently nonzero with probability p
  and carries an independent sign.
* ``gaussian-dense`` / ``rademacher-dense`` -- dense comparison models
  with matching entry variance p.

All builders return the unscaled matrix S with the global scale
1/sqrt(p*m) attached; they are pure functions of (spec, family) and
deterministic for a fixed seed regardless of execution environment.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ._field import M61, derive_seed
from .calibration import CONSTANTS
from .errors import ParameterError
from .kwise import IndependentFamily, KWiseFamily
from .sketch import DenseSketch, SparseSketch

KINDS = ("osnap", "ose-ie", "gaussian-dense", "rademacher-dense")
FAMILY_MODES = ("kwise", "independent")


@dataclass(frozen=True)
class SketchSpec:
    """Embedding parameters; ``s = p*m`` is the per-column sparsity."""

    kind: str
    m: int
    n: int
    p: float
    degree_k: int = 8
    seed: int = 0
    family: str = "kwise"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown sketch kind {self.kind!r}")
        if self.family not in FAMILY_MODES:
            raise ParameterError(f"unknown family mode {self.family!r}")
        if self.m < 1 or self.n < 1:
            raise ParameterError("m and n must be >= 1")
        if not 0.0 < self.p <= 1.0:
            raise ParameterError(f"p must be in (0, 1], got {self.p}")
        if self.degree_k < 1:
            raise ParameterError("degree_k must be >= 1")
        if self.kind == "osnap":
            s = self.p * self.m
            s_int = round(s)
            if s_int < 1 or abs(s - s_int) > 1e-9 * max(1.0, s):
                raise ParameterError(
                    f"osnap requires s = p*m to be a positive integer, got {s}"
                )
            if self.m % s_int != 0:
                raise ParameterError(
                    f"osnap requires s = {s_int} to divide m = {self.m}"
                )

    @property
    def s(self):
        """Integer per-column sparsity p*m (exact for osnap)."""
        return int(round(self.p * self.m))

    @classmethod
    def from_sparsity(cls, kind, m, n, s, **kwargs):
        return cls(kind=kind, m=m, n=n, p=s / m, **kwargs)


def make_family(spec):
    """The hash family a builder uses when none is supplied."""
    if spec.family == "independent":
        return IndependentFamily(seed=spec.seed)
    return KWiseFamily(seed=spec.seed, degree_k=spec.degree_k, field_modulus=M61)


def build_osnap(spec, family=None):
    """Sample a blocked one-hot sketch: s one-hot blocks per column.

    Sub-stream (l, gamma) uses hash points 2*(l*s + gamma) for the sign and
    2*(l*s + gamma) + 1 for the in-block position.
    """
    if spec.kind != "osnap":
        raise ParameterError(f"build_osnap needs kind 'osnap', got {spec.kind!r}")
    family = family or make_family(spec)
    s = spec.s
    block = spec.m // s
    idx = np.arange(spec.n * s, dtype=np.uint64)
    signs = family.rademacher(idx * np.uint64(2))
    offsets = family.uniform_range(idx * np.uint64(2) + np.uint64(1), 0, block - 1)
    gamma = (np.arange(spec.n * s, dtype=np.int64)) % s
    rows = gamma * block + offsets
    indptr = np.arange(0, spec.n * s + 1, s, dtype=np.int64)
    return SparseSketch(
        spec=spec,
        indptr=indptr,
        rows=rows,
        values=signs,
        scale=1.0 / math.sqrt(spec.p * spec.m),
    )


def _bernoulli_grid_positions(rng, cells, p):
    """Sorted flat positions of an exact Bernoulli(p) process on [0, cells).

    Walks the grid by geometric gaps, which reproduces i.i.d. per-cell
    inclusion without touching all cells.
    """
    if p >= 1.0:
        return np.arange(cells, dtype=np.int64)
    out = []
    pos = -1
    expect = cells * p
    while True:
        budget = int(expect - sum(len(o) for o in out)) + 1
        draw = max(64, int(budget + 6.0 * math.sqrt(max(expect, 1.0))))
        gaps = rng.geometric(p, size=draw).astype(np.int64)
        pts = pos + np.cumsum(gaps)
        out.append(pts)
        pos = int(pts[-1])
        if pos >= cells - 1:
            break
    flat = np.concatenate(out)
    return flat[flat < cells]


def build_ose_ie(spec, family=None):
    """Sample an i.i.d.-entry sketch: each cell kept with probability p.

    With an independent-mode family the Bernoulli process is generated by
    geometric gap-sampling in O(nnz); a K-wise family forces a full scan of
    the m*n grid (kept for A/B testing at small sizes).
    """
    if spec.kind != "ose-ie":
        raise ParameterError(f"build_ose_ie needs kind 'ose-ie', got {spec.kind!r}")
    family = family or make_family(spec)
    m, n, p = spec.m, spec.n, spec.p
    if isinstance(family, IndependentFamily):
        rng = np.random.default_rng(derive_seed(family.seed, 0x05E1E))
        flat = _bernoulli_grid_positions(rng, m * n, p)
        rows = flat % m
        cols = flat // m
        signs = rng.integers(0, 2, size=flat.size).astype(np.float64) * 2.0 - 1.0
    else:
        cells = np.arange(m * n, dtype=np.uint64)
        threshold = np.uint64(int(p * family.field_modulus))
        keep = family.evaluate(cells * np.uint64(2) + np.uint64(1)) < threshold
        flat = np.nonzero(keep)[0]
        rows = flat % m
        cols = flat // m
        signs = family.rademacher(flat.astype(np.uint64) * np.uint64(2))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, cols + 1, 1)
    indptr = np.cumsum(indptr)
    return SparseSketch(
        spec=spec,
        indptr=indptr,
        rows=rows.astype(np.int64),
        values=np.asarray(signs, dtype=np.float64),
        scale=1.0 / math.sqrt(p * m),
    )


def build_dense_baseline(spec, family=None):
    """Dense Gaussian or Rademacher comparison matrix with entry variance p.

    Gaussian entries come from the inverse normal CDF applied to the
    family's uniform stream.
    """
    if spec.kind not in ("gaussian-dense", "rademacher-dense"):
        raise ParameterError(
            f"build_dense_baseline needs a dense kind, got {spec.kind!r}"
        )
    family = family or make_family(spec)
    m, n, p = spec.m, spec.n, spec.p
    pts = np.arange(m * n, dtype=np.uint64) * np.uint64(2)
    if spec.kind == "gaussian-dense":
        u = family.uniform01(pts)
        entries = ndtri(u) * math.sqrt(p)
    else:
        entries = family.rademacher(pts) * math.sqrt(p)
    matrix = entries.reshape(n, m).T.copy()  # column-major point order
    return DenseSketch(spec=spec, matrix=matrix, scale=1.0 / math.sqrt(p * m))


def build(spec, family=None):
    """Dispatch to the builder for ``spec.kind``."""
    if spec.kind == "osnap":
        return build_osnap(spec, family)
    if spec.kind == "ose-ie":
        return build_ose_ie(spec, family)
    return build_dense_baseline(spec, family)


def _log_term(x):
    return math.log(max(x, math.e))


def osnap_sparsity_target(d, eps, delta, c_s=None):
    """Continuous sparsity target C_s * (log^2(d/(eps*delta))/eps + log^3)."""
    c_s = CONSTANTS.c_s_osnap if c_s is None else c_s
    L = _log_term(d / (eps * delta))
    return c_s * (L**2 / eps + L**3)


def oseie_sparsity_target(d, eps, delta, c_s=None, c_e=None):
    """Blocked-kind target plus the i.i.d. model's extra log(d/(eps*delta))/eps^2."""
    c_e = CONSTANTS.c_e_oseie if c_e is None else c_e
    L = _log_term(d / (eps * delta))
    return osnap_sparsity_target(d, eps, delta, c_s) + c_e * L / eps**2


def independence_degree(d, eps, delta, pm):
    """Independence degree 8 * ceil(log(max(d/(eps*delta), p*m)))."""
    return 8 * math.ceil(_log_term(max(d / (eps * delta), pm)))


def default_parameters(d, n, eps, delta, kind, *, seed=0, c_m=None, c_s=None, c_e=None):
    """Calibrated spec for a (eps, delta, d)-embedding of subspaces of R^n.

    m = ceil(C_m * (d + ln(1/delta)) / eps^2), rounded up so the sparsity
    divides it; the sparsity targets come from
    :func:`osnap_sparsity_target` / :func:`oseie_sparsity_target` and are
    capped at m (p = 1 with a warning when the cap binds).
    """
    if not (0.0 < eps < 1.0 and 0.0 < delta < 1.0):
        raise ParameterError("eps and delta must lie in (0, 1)")
    if not 1 <= d <= n:
        raise ParameterError("need 1 <= d <= n")
    if kind not in KINDS:
        raise ParameterError(f"unknown sketch kind {kind!r}")
    c_m = CONSTANTS.c_m_oblivious if c_m is None else c_m
    m0 = math.ceil(c_m * (d + math.log(1.0 / delta)) / eps**2)
    m0 = max(m0, 1)
    if kind in ("gaussian-dense", "rademacher-dense"):
        degree_k = independence_degree(d, eps, delta, m0)
        return SketchSpec(
            kind=kind, m=m0, n=n, p=1.0, degree_k=degree_k, seed=seed,
            family="independent",
        )
    if kind == "osnap":
        s_raw = osnap_sparsity_target(d, eps, delta, c_s)
        family = "kwise"
    else:
        s_raw = oseie_sparsity_target(d, eps, delta, c_s, c_e)
        family = "independent"
    s = math.ceil(s_raw)
    if s >= m0:
        warnings.warn(
            f"required sparsity {s} reaches m = {m0}; falling back to p = 1",
            stacklevel=2,
        )
        s = m0
        m = m0
    elif kind == "osnap":
        m = math.ceil(m0 / s) * s
    else:
        m = m0
    degree_k = independence_degree(d, eps, delta, s)
    return SketchSpec(
        kind=kind, m=m, n=n, p=s / m, degree_k=degree_k, seed=seed, family=family
    )
