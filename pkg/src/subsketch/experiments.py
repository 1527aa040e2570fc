"""Reusable experiment drivers behind ``verify`` and ``bench``.

A JSON experiment config (schema_version 1) selects one driver:

    {"schema_version": 1, "experiment": "embedding",
     "kind": "osnap", "d": 16, "n": 4096, "eps": 0.5, "delta": 0.05,
     "trials": 200, "sampler": "haar", "seed": 1,
     "m": null, "s": null, "target": null}

    {"schema_version": 1, "experiment": "trace_moment" | "gamma_moment",
     "kind": "...", "d": 8, "n": 128, "m": 64, "s": 16, "q": 1,
     "trials": 500, "seed": 1}

``embedding`` reports a failure fraction and distortion quantiles and
passes when the fraction is at or below ``target`` (default: delta).
Moment probes report (estimate, std_error) and always pass.

Score-adapted kinds rebuild their sketch per trial from the exact
leverage scores of the sampled basis.
"""

import math

import numpy as np

from .errors import ParameterError
from .kwise import derive_seed
from .leverage import LeverageScores, exact_leverage
from .less import LessIcSpec, build_less_ic, build_less_ie
from .oblivious import (
    SketchSpec,
    build,
    default_parameters,
    oseie_sparsity_target,
    osnap_sparsity_target,
    independence_degree,
)
from .diagnostics import SAMPLERS, decoupled_gamma_moment, embedding_trial, trace_moment

SCHEMA_VERSION = 1


def oblivious_builder(spec):
    """builder(seed, U) ignoring U, rebuilding ``spec`` with a fresh seed."""

    def _build(seed, U):
        fresh = SketchSpec(
            kind=spec.kind, m=spec.m, n=spec.n, p=spec.p,
            degree_k=spec.degree_k, seed=seed, family=spec.family,
        )
        return build(fresh)

    return _build


def less_ic_builder(m, pm, degree_k=None, beta1=1.0):
    """builder(seed, U) adapting block sizes to U's exact leverage scores."""

    def _build(seed, U):
        scores = exact_leverage(U)
        if beta1 != 1.0:
            scores = LeverageScores(
                z=np.minimum(scores.z * beta1, 1.0), beta1=beta1, beta2=beta1
            )
        spec = LessIcSpec(
            m=m, p=pm / m, scores=scores,
            degree_k=degree_k or 8, seed=seed,
        )
        return build_less_ic(spec)

    return _build


def less_ie_builder(m, pm):
    """builder(seed, U) keeping entries with probability z_j * pm / m."""

    def _build(seed, U):
        scores = exact_leverage(U)
        return build_less_ie(scores, pm / m, m, seed=seed)

    return _build


def builder_for(kind, spec=None, *, m=None, pm=None, degree_k=None):
    if kind in ("osnap", "ose-ie", "gaussian-dense", "rademacher-dense"):
        return oblivious_builder(spec)
    if kind == "less-ic":
        return less_ic_builder(m, pm, degree_k)
    if kind == "less-ie":
        return less_ie_builder(m, pm)
    raise ParameterError(f"unknown kind {kind!r}")


def _spec_from_config(cfg):
    kind = cfg["kind"]
    d, n = int(cfg["d"]), int(cfg["n"])
    eps = float(cfg.get("eps", 0.5))
    delta = float(cfg.get("delta", 0.05))
    seed = int(cfg.get("seed", 0))
    if kind in ("less-ic", "less-ie"):
        from .less import less_default_parameters

        uniform = LeverageScores(z=np.full(n, min(1.0, 2.0 * d / n)))
        base = less_default_parameters(d, eps, delta, uniform, seed=seed)
        m = int(cfg.get("m") or base.m)
        pm = int(cfg.get("s") or round(base.p * base.m))
        return None, {"m": m, "pm": pm, "degree_k": base.degree_k}
    spec = default_parameters(d, n, eps, delta, kind, seed=seed)
    if cfg.get("m") or cfg.get("s"):
        m = int(cfg.get("m") or spec.m)
        s = min(int(cfg.get("s") or spec.s), m)
        if kind == "osnap" and m % s:
            m = math.ceil(m / s) * s
        spec = SketchSpec(
            kind=kind, m=m, n=n, p=s / m, degree_k=spec.degree_k,
            seed=seed, family=spec.family,
        )
    return spec, {"m": spec.m, "pm": spec.s, "degree_k": spec.degree_k}


def run_config(cfg):
    """Dispatch one experiment config; returns (report_dict, passed)."""
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ParameterError(
            f"unsupported schema_version {cfg.get('schema_version')!r}"
        )
    experiment = cfg.get("experiment")
    missing = [k for k in ("kind", "d", "n") if k not in cfg]
    if missing:
        raise ParameterError(f"experiment config is missing keys: {missing}")
    kind = cfg["kind"]
    d, n = int(cfg["d"]), int(cfg["n"])
    seed = int(cfg.get("seed", 0))
    trials = int(cfg.get("trials", 100))
    spec, dims = _spec_from_config(cfg)
    builder = builder_for(kind, spec, **dims)

    if experiment == "embedding":
        if "eps" not in cfg or "delta" not in cfg:
            raise ParameterError("embedding experiments need eps and delta")
        eps = float(cfg["eps"])
        sampler_name = cfg.get("sampler", "haar")
        if sampler_name not in SAMPLERS:
            raise ParameterError(f"unknown sampler {sampler_name!r}")
        sampler = lambda rng: SAMPLERS[sampler_name](n, d, rng)  # noqa: E731
        summary = embedding_trial(builder, sampler, trials, eps, seed)
        target = float(cfg.get("target") or cfg["delta"])
        report = {
            "experiment": "embedding",
            "kind": kind,
            "config": dims | {"d": d, "n": n, "eps": eps, "sampler": sampler_name},
            "result": summary.to_dict(),
            "target": target,
        }
        return report, summary.failure_fraction <= target

    if experiment in ("trace_moment", "gamma_moment"):
        q = int(cfg.get("q", 1))
        rng = np.random.default_rng(derive_seed(seed, 0xBA5E))
        U = SAMPLERS[cfg.get("sampler", "haar")](n, d, rng)
        probe_fn = trace_moment if experiment == "trace_moment" else decoupled_gamma_moment
        probe = probe_fn(builder, U, q, trials, seed)
        report = {
            "experiment": experiment,
            "kind": kind,
            "config": dims | {"d": d, "n": n, "q": q},
            "result": probe.to_dict(),
        }
        return report, True

    raise ParameterError(f"unknown experiment {experiment!r}")


def eps_sweep(kind, d=16, delta=0.05, eps_grid=(0.5, 0.25, 0.125), n=8192,
              trials=50, seed=7, sampler="coordinate", c_m=None):
    """Failure fraction and calibrated sparsity across an eps grid.

    m follows C_m * d / eps^2 (rounded up to a sparsity multiple for the
    blocked kind); rows carry the continuous sparsity target for trend
    fits.
    """
    from .calibration import CONSTANTS

    c_m = CONSTANTS.c_m_oblivious if c_m is None else c_m
    rows = []
    for eps in eps_grid:
        m0 = math.ceil(c_m * d / eps**2)
        if kind == "osnap":
            target = osnap_sparsity_target(d, eps, delta)
        elif kind == "ose-ie":
            target = oseie_sparsity_target(d, eps, delta)
        else:
            raise ParameterError(f"eps sweep supports sparse kinds, got {kind!r}")
        s = max(1, math.ceil(target))
        if s >= m0:
            s = m0
            m = m0
        elif kind == "osnap":
            m = math.ceil(m0 / s) * s
        else:
            m = m0
        if m >= n:
            raise ParameterError(
                f"sweep point eps={eps} needs m={m} >= n={n}; raise n"
            )
        spec = SketchSpec(
            kind=kind, m=m, n=n, p=s / m,
            degree_k=independence_degree(d, eps, delta, s),
            seed=seed,
            family="kwise" if kind == "osnap" else "independent",
        )
        builder = oblivious_builder(spec)
        sampler_fn = lambda rng: SAMPLERS[sampler](n, d, rng)  # noqa: E731
        summary = embedding_trial(
            builder, sampler_fn, trials, eps, derive_seed(seed, round(1 / eps))
        )
        rows.append(
            {
                "kind": kind,
                "eps": eps,
                "m": m,
                "s": s,
                "s_target": target,
                "trials": trials,
                "failure_fraction": summary.failure_fraction,
                "q95_distortion": summary.quantiles["0.95"],
            }
        )
    return rows


def m_sweep(kind, d=16, n=4096, eps=0.5, delta=0.05, factors=(1, 2, 4),
            trials=100, seed=7, sampler="haar"):
    """Distortion quantiles as m doubles at fixed sparsity."""
    spec0 = default_parameters(d, n, eps, delta, kind, seed=seed)
    s = spec0.s
    rows = []
    for f in factors:
        m = spec0.m * f
        spec = SketchSpec(
            kind=kind, m=m, n=n, p=s / m, degree_k=spec0.degree_k,
            seed=seed, family=spec0.family,
        )
        builder = oblivious_builder(spec)
        sampler_fn = lambda rng: SAMPLERS[sampler](n, d, rng)  # noqa: E731
        summary = embedding_trial(builder, sampler_fn, trials, eps,
                                  derive_seed(seed, f))
        rows.append(
            {
                "kind": kind,
                "eps": eps,
                "m": m,
                "s": s,
                "trials": trials,
                "failure_fraction": summary.failure_fraction,
                "q95_distortion": summary.quantiles["0.95"],
            }
        )
    return rows


def nnz_sweep(m=256, s=8, d=16, base_n=4096, factors=(1, 2, 4, 8), reps=5,
              seed=7):
    """Wall time of one application as the input nonzeros double.

    The sketch is rebuilt per n (columns must match the input rows) at
    fixed (m, s), so per-column work is constant and time should scale
    linearly with nnz.
    """
    import time

    import scipy.sparse

    from .apply import apply as _apply

    rows = []
    for f in factors:
        n = base_n * f
        spec = SketchSpec.from_sparsity("osnap", m=m, n=n, s=s, seed=seed)
        sketch = build(spec)
        A = scipy.sparse.random(n, d, density=0.05, random_state=seed,
                                format="csr")
        best = math.inf
        for _ in range(reps):
            t0 = time.perf_counter()
            _apply(sketch, A)
            best = min(best, time.perf_counter() - t0)
        rows.append({"nnz": int(A.nnz), "n": n, "m": m, "s": s,
                     "seconds": best})
    return rows


def s_sweep(kind="osnap", d=16, n=4096, eps=0.5, delta=0.05,
            s_grid=(2, 4, 8, 16, 32), trials=100, seed=7, sampler="coordinate"):
    """Failure fraction as the per-column sparsity varies at fixed m."""
    spec0 = default_parameters(d, n, eps, delta, kind, seed=seed)
    rows = []
    for s in s_grid:
        m = math.ceil(spec0.m / s) * s if kind == "osnap" else spec0.m
        spec = SketchSpec(
            kind=kind, m=m, n=n, p=s / m, degree_k=spec0.degree_k,
            seed=seed, family=spec0.family,
        )
        builder = oblivious_builder(spec)
        sampler_fn = lambda rng: SAMPLERS[sampler](n, d, rng)  # noqa: E731
        summary = embedding_trial(builder, sampler_fn, trials, eps,
                                  derive_seed(seed, s))
        rows.append(
            {
                "kind": kind,
                "eps": eps,
                "m": m,
                "s": s,
                "trials": trials,
                "failure_fraction": summary.failure_fraction,
                "q95_distortion": summary.quantiles["0.95"],
            }
        )
    return rows
