"""Exact and coarse approximate leverage scores of a tall matrix.

The i-th leverage score of A is the squared norm of the i-th row of any
orthonormal basis of A's column space.  Approximate scores here are
one-sided overestimates: z_i >= l_i / beta1 with sum(z) <= beta2 * d.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse

from ._field import derive_seed
from .errors import ParameterError, RankDeficiencyError
from .sketch import scores_digest


@dataclass
class LeverageScores:
    """Scores z in [0, 1]^n with the claimed (beta1, beta2) guarantees."""

    z: np.ndarray
    beta1: float = 1.0
    beta2: float = 1.0

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=np.float64)
        if self.z.ndim != 1:
            raise ParameterError("scores must be a 1-D vector")
        if np.any(self.z < -1e-12) or np.any(self.z > 1.0 + 1e-12):
            raise ParameterError("scores must lie in [0, 1]")
        self.z = np.clip(self.z, 0.0, 1.0)
        if self.beta1 < 1.0 or self.beta2 < 1.0:
            raise ParameterError("beta1 and beta2 must be >= 1")

    @property
    def n(self):
        return self.z.size

    def digest(self):
        return scores_digest(self.z, self.beta1, self.beta2)

    def to_dict(self):
        return {"beta1": self.beta1, "beta2": self.beta2, "z": self.z.tolist()}

    @classmethod
    def from_dict(cls, payload):
        return cls(
            z=np.asarray(payload["z"], dtype=np.float64),
            beta1=float(payload["beta1"]),
            beta2=float(payload["beta2"]),
        )


def _dense(A):
    if scipy.sparse.issparse(A):
        return np.asarray(A.todense())
    return np.asarray(A, dtype=np.float64)


def exact_leverage(A):
    """Row norms squared of an orthonormal basis, via SVD.

    Singular values below max(n, d) * eps * s_max count as zero; a
    deficient matrix raises :class:`RankDeficiencyError` naming the
    numerical rank.
    """
    A = _dense(A)
    n, d = A.shape
    if n < d:
        raise ParameterError(f"need a tall matrix, got shape {n}x{d}")
    U, svals, _ = np.linalg.svd(A, full_matrices=False)
    tol = max(n, d) * np.finfo(np.float64).eps * (svals[0] if svals.size else 0.0)
    rank = int(np.sum(svals > tol))
    if rank < d:
        raise RankDeficiencyError(
            f"matrix is rank deficient: numerical rank {rank} < {d}", rank
        )
    z = np.minimum(np.einsum("ij,ij->i", U, U), 1.0)
    return LeverageScores(z=z, beta1=1.0, beta2=1.0)


def _sketch_r_factor(A, d, n, seed, attempt):
    """R from a QR of a blocked sketch of A; None when numerically singular."""
    from .apply import apply as _apply
    from .oblivious import SketchSpec, build_osnap

    s0 = 8
    rows = max(math.ceil(8 * d * math.log(max(n, 4))), 4 * d, s0)
    rows = math.ceil(rows / s0) * s0
    spec = SketchSpec.from_sparsity(
        "osnap", m=rows, n=n, s=s0, degree_k=16,
        seed=derive_seed(seed, 0x1E7 + attempt),
    )
    SA = _apply(build_osnap(spec), A)
    R = np.linalg.qr(SA, mode="r")
    diag = np.abs(np.diag(R))
    if diag.min() <= max(rows, d) * np.finfo(np.float64).eps * max(diag.max(), 1e-300):
        return None
    return R


def approx_leverage(A, gamma, *, seed=0, safety=2.0):
    """Coarse scores with beta1 = O(n^gamma), beta2 = O(1).

    Sketch A, take R from a QR of the sketch, and estimate the row norms
    of A R^-1 with ceil(4/gamma) Gaussian test vectors; estimates are
    inflated by ``safety`` and clamped to [0, 1].  The claimed beta1 is
    max(2 n^gamma, 4); beta2 is reported as measured, max(1, sum(z)/d).
    """
    if not 0.0 < gamma < 1.0:
        raise ParameterError(f"gamma must be in (0, 1), got {gamma}")
    n, d = A.shape
    if n < d:
        raise ParameterError(f"need a tall matrix, got shape {n}x{d}")
    R = None
    for attempt in range(3):
        R = _sketch_r_factor(A, d, n, seed, attempt)
        if R is not None:
            break
    if R is None:
        raise RankDeficiencyError(
            "sketch of A stayed rank deficient after 3 attempts "
            "(is A full column rank?)",
            int(np.linalg.matrix_rank(_dense(A))),
        )
    k = math.ceil(4.0 / gamma)
    rng = np.random.default_rng(derive_seed(seed, 0x7E57))
    G = rng.standard_normal((d, k)) / math.sqrt(k)
    W = scipy.linalg.solve_triangular(R, G, lower=False)
    E = np.asarray(A @ W)
    est = np.einsum("ij,ij->i", E, E)
    z = np.clip(safety * est, 0.0, 1.0)
    beta1 = max(safety * n**gamma, 4.0)
    beta2 = max(1.0, float(z.sum()) / d)
    return LeverageScores(z=z, beta1=beta1, beta2=beta2)


@dataclass
class ScoreValidation:
    """Outcome of checking scores against the exact oracle."""

    passed: bool
    lower_ok: bool
    sum_ok: bool
    lower_margin: float  # min_i (z_i - l_i / beta1); negative = violation
    sum_margin: float  # beta2 * d - sum(z); negative = violation
    violating_indices: list = field(default_factory=list)

    def to_dict(self):
        return {
            "pass": self.passed,
            "lower_ok": self.lower_ok,
            "sum_ok": self.sum_ok,
            "lower_margin": self.lower_margin,
            "sum_margin": self.sum_margin,
            "violating_indices": self.violating_indices,
        }


def validate_scores(A, scores):
    """Check both approximate-score inequalities against exact scores."""
    exact = exact_leverage(A)
    d = A.shape[1]
    slack = 1e-12
    gaps = scores.z - exact.z / scores.beta1
    lower_ok = bool(np.all(gaps >= -slack))
    sum_margin = scores.beta2 * d - float(scores.z.sum())
    sum_ok = bool(sum_margin >= -slack * d)
    violating = np.nonzero(gaps < -slack)[0].tolist()
    return ScoreValidation(
        passed=lower_ok and sum_ok,
        lower_ok=lower_ok,
        sum_ok=sum_ok,
        lower_margin=float(gaps.min()) if gaps.size else 0.0,
        sum_margin=sum_margin,
        violating_indices=violating,
    )
