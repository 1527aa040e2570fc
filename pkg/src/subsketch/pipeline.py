"""End-to-end fast subspace embedding.

``fast_subspace_embed`` chains coarse leverage-score approximation,
score-adapted parameter selection, sketch construction and application,
and reports per-stage timings plus nonzero accounting.  Oblivious kinds
skip the leverage stage.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse

from ._field import derive_seed
from .apply import apply as _apply
from .errors import ParameterError
from .leverage import approx_leverage
from .less import build_less_ic, build_less_ie, less_default_parameters
from .oblivious import SketchSpec, build, default_parameters

PIPELINE_KINDS = ("osnap", "ose-ie", "less-ic", "less-ie", "gaussian-dense")


@dataclass(frozen=True)
class Overrides:
    """Optional explicit parameter pins; None leaves the default in place."""

    m: int = None
    pm: int = None
    degree_k: int = None


@dataclass(frozen=True)
class PipelineConfig:
    eps: float
    delta: float
    gamma: float = 0.25
    seed: int = 0
    kind: str = "less-ic"
    overrides: Overrides = field(default_factory=Overrides)
    validate: bool = False

    def __post_init__(self):
        for name in ("eps", "delta", "gamma"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ParameterError(f"{name} must lie in (0, 1), got {v}")
        if self.kind not in PIPELINE_KINDS:
            raise ParameterError(f"unknown pipeline kind {self.kind!r}")


@dataclass
class PipelineReport:
    kind: str
    m: int
    n: int
    d: int
    pm: float
    timings: dict
    total_seconds: float
    nnz_input: int
    nnz_sketch: int
    nnz_bound: float = None
    beta1: float = None
    beta2: float = None
    sublinear_term_dominates: bool = False
    distortion: dict = None

    def to_dict(self):
        out = {
            "kind": self.kind,
            "m": self.m,
            "n": self.n,
            "d": self.d,
            "pm": self.pm,
            "timings": self.timings,
            "total_seconds": self.total_seconds,
            "nnz_input": self.nnz_input,
            "nnz_sketch": self.nnz_sketch,
            "sublinear_term_dominates": self.sublinear_term_dominates,
        }
        if self.nnz_bound is not None:
            out["nnz_bound"] = self.nnz_bound
            out["beta1"] = self.beta1
            out["beta2"] = self.beta2
        if self.distortion is not None:
            out["distortion"] = self.distortion
        return out


def _nnz(A):
    if scipy.sparse.issparse(A):
        return int(A.nnz)
    return int(np.count_nonzero(A))


def _validate_distortion(A, A_tilde):
    """Singular-value band of A_tilde against an orthonormal basis of A."""
    dense = A.toarray() if scipy.sparse.issparse(A) else np.asarray(A)
    R = np.linalg.qr(dense, mode="r")
    diag = np.abs(np.diag(R))
    if diag.min() <= max(dense.shape) * np.finfo(np.float64).eps * diag.max():
        raise ParameterError("input matrix is numerically rank deficient")
    Y = scipy.linalg.solve_triangular(R, A_tilde.T, lower=False, trans="T").T
    svals = np.linalg.svd(Y, compute_uv=False)
    return {"s_min": float(svals[-1]), "s_max": float(svals[0])}


def fast_subspace_embed(A, config):
    """Compute A_tilde = Pi A with the score-adapted pipeline.

    Returns (A_tilde, PipelineReport).  Stage names in the report:
    ``leverage``, ``parameters``, ``build``, ``apply`` and optionally
    ``validate``.
    """
    n, d = A.shape
    if n < d:
        raise ParameterError(f"need a tall matrix, got shape {n}x{d}")
    timings = {}
    t_total = time.perf_counter()
    scores = None
    ov = config.overrides

    if config.kind in ("less-ic", "less-ie"):
        t0 = time.perf_counter()
        scores = approx_leverage(A, config.gamma, seed=derive_seed(config.seed, 0x5C0))
        timings["leverage"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if config.kind in ("less-ic", "less-ie"):
        spec = less_default_parameters(
            d, config.eps, config.delta, scores, seed=config.seed
        )
        m = ov.m or spec.m
        pm = ov.pm or round(spec.p * spec.m)
        degree_k = ov.degree_k or spec.degree_k
        spec = type(spec)(
            m=m, p=pm / m, scores=scores, degree_k=degree_k, seed=config.seed
        )
    else:
        spec = default_parameters(d, n, config.eps, config.delta, config.kind,
                                  seed=config.seed)
        if ov.m or ov.pm or ov.degree_k:
            m = ov.m or spec.m
            pm = ov.pm or spec.s
            spec = SketchSpec(
                kind=spec.kind, m=m, n=n, p=pm / m,
                degree_k=ov.degree_k or spec.degree_k,
                seed=config.seed, family=spec.family,
            )
    timings["parameters"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if config.kind == "less-ic":
        sketch = build_less_ic(spec)
    elif config.kind == "less-ie":
        sketch = build_less_ie(scores, spec.p, spec.m, seed=config.seed)
    else:
        sketch = build(spec)
    timings["build"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    A_tilde = _apply(sketch, A)
    timings["apply"] = time.perf_counter() - t0

    distortion_info = None
    if config.validate:
        t0 = time.perf_counter()
        distortion_info = _validate_distortion(A, A_tilde)
        timings["validate"] = time.perf_counter() - t0

    total = time.perf_counter() - t_total
    nnz_sketch = sketch.nnz if hasattr(sketch, "nnz") else spec.m * spec.n
    report = PipelineReport(
        kind=config.kind,
        m=spec.m,
        n=n,
        d=d,
        pm=float(spec.p) * spec.m,
        timings=timings,
        total_seconds=total,
        nnz_input=_nnz(A),
        nnz_sketch=int(nnz_sketch),
        distortion=distortion_info,
    )
    if scores is not None:
        report.beta1 = scores.beta1
        report.beta2 = scores.beta2
        report.nnz_bound = n + 4.0 * scores.beta1 * scores.beta2 * report.pm * d
        report.sublinear_term_dominates = (nnz_sketch - n) > report.nnz_input
    return A_tilde, report
