"""Command-line surface.

Commands: ``sketch``, ``apply``, ``leverage``, ``verify``, ``bench``,
``pipeline``.  Every command takes ``--seed``, ``--threads`` and (where it
writes something) ``--out``.  Computation is deterministic for a fixed
seed regardless of the thread count; ``--threads 1`` is the reference
mode.

Exit codes: 0 success, 2 parameter error, 3 IO/parse error,
4 verification failure.
"""

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .apply import apply as _apply
from .apply import load_matrix, save_matrix
from .errors import FormatError, ParameterError
from .experiments import eps_sweep, m_sweep, nnz_sweep, run_config, s_sweep
from .leverage import LeverageScores, approx_leverage, exact_leverage
from .less import LessIcSpec, build_less_ic, build_less_ie
from .oblivious import SketchSpec, build
from .pipeline import Overrides, PipelineConfig, fast_subspace_embed
from .sketch import load_sketch

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_IO = 3
EXIT_VERIFY = 4


def _add_common(p, out_required=False):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1,
                   help="accepted for interface stability; results are "
                        "thread-count independent")
    p.add_argument("--out", required=out_required, help="output path")


def _build_parser():
    root = argparse.ArgumentParser(prog="subsketch", description=__doc__)
    root.add_argument("--version", action="version", version=__version__)
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sketch", help="build a sketch and write a .skt file")
    p.add_argument("--kind", required=True,
                   choices=["osnap", "ose-ie", "less-ic", "less-ie"])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--s", type=int, help="per-column sparsity (alternative to --p)")
    p.add_argument("--degree-k", type=int, default=8)
    p.add_argument("--family", choices=["kwise", "independent"])
    p.add_argument("--scores", help="scores JSON (required for less-* kinds)")
    _add_common(p, out_required=True)

    p = sub.add_parser("apply", help="apply a sketch file to a Matrix Market matrix")
    p.add_argument("sketch_file")
    p.add_argument("matrix_file")
    _add_common(p, out_required=True)

    p = sub.add_parser("leverage", help="compute leverage scores of a matrix")
    p.add_argument("matrix_file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--exact", action="store_true")
    g.add_argument("--gamma", type=float)
    _add_common(p, out_required=True)

    p = sub.add_parser("verify", help="run a JSON experiment config")
    p.add_argument("--config", required=True)
    _add_common(p)

    p = sub.add_parser("bench", help="parameter sweeps and calibration, CSV out")
    p.add_argument("--sweep", choices=["eps", "m", "s", "nnz"])
    p.add_argument("--calibrate", action="store_true")
    p.add_argument("--kind", default="osnap")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--d", type=int, default=16)
    p.add_argument("--n", type=int)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.05)
    _add_common(p)

    p = sub.add_parser("pipeline", help="fast subspace embedding of a matrix")
    p.add_argument("matrix_file")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--gamma", type=float, default=0.25)
    p.add_argument("--kind", default="less-ic",
                   choices=["osnap", "ose-ie", "less-ic", "less-ie", "gaussian-dense"])
    p.add_argument("--m", type=int, help="override embedding dimension")
    p.add_argument("--pm", type=int, help="override sparsity p*m")
    p.add_argument("--validate", action="store_true",
                   help="also measure distortion against an exact basis")
    p.add_argument("--report", help="write the run report JSON here")
    _add_common(p, out_required=True)

    return root


def _load_scores(path):
    with open(path) as fh:
        return LeverageScores.from_dict(json.load(fh))


def _cmd_sketch(args):
    if args.p is None and args.s is None:
        raise ParameterError("give either --p or --s")
    if args.kind in ("osnap", "ose-ie"):
        if args.n is None:
            raise ParameterError(f"{args.kind} needs --n")
        p = args.p if args.p is not None else args.s / args.m
        spec = SketchSpec(
            kind=args.kind, m=args.m, n=args.n, p=p,
            degree_k=args.degree_k, seed=args.seed,
            family=args.family or ("kwise" if args.kind == "osnap" else "independent"),
        )
        sk = build(spec)
    else:
        if not args.scores:
            raise ParameterError(f"{args.kind} needs --scores")
        scores = _load_scores(args.scores)
        p = args.p if args.p is not None else args.s / args.m
        if args.kind == "less-ic":
            spec = LessIcSpec(
                m=args.m, p=p, scores=scores, degree_k=args.degree_k,
                seed=args.seed, family=args.family or "kwise",
            )
            sk = build_less_ic(spec)
        else:
            sk = build_less_ie(scores, p, args.m, seed=args.seed)
    sk.save(args.out)
    print(f"wrote {args.out}: kind={sk.spec.kind} m={sk.m} n={sk.n} nnz={sk.nnz}")
    return EXIT_OK


def _cmd_apply(args):
    sk = load_sketch(args.sketch_file)
    A = load_matrix(args.matrix_file)
    result = _apply(sk, A)
    save_matrix(args.out, result)
    print(f"wrote {args.out}: {result.shape[0]}x{result.shape[1]}")
    return EXIT_OK


def _cmd_leverage(args):
    A = load_matrix(args.matrix_file)
    if args.exact:
        scores = exact_leverage(A)
    else:
        scores = approx_leverage(A, args.gamma, seed=args.seed)
    with open(args.out, "w") as fh:
        json.dump(scores.to_dict(), fh)
    print(f"wrote {args.out}: n={scores.n} beta1={scores.beta1:.3g} "
          f"beta2={scores.beta2:.3g}")
    return EXIT_OK


def _cmd_verify(args):
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{args.config}: invalid JSON: {exc}") from exc
    if "seed" not in cfg:
        cfg["seed"] = args.seed
    report, passed = run_config(cfg)
    payload = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    print(payload)
    return EXIT_OK if passed else EXIT_VERIFY


def _write_csv(path, rows):
    if not rows:
        return
    fields = list(rows[0].keys())
    def emit(fh):
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)
    if path:
        with open(path, "w", newline="") as fh:
            emit(fh)
    else:
        emit(sys.stdout)


def _cmd_bench(args):
    if args.calibrate:
        from .calibration import calibrate

        constants, rows = calibrate(trials=args.trials, seed=args.seed or None)
        _write_csv(args.out, rows)
        print(json.dumps(constants.as_dict(), indent=2))
        return EXIT_OK
    if not args.sweep:
        raise ParameterError("bench needs --sweep or --calibrate")
    kwargs = dict(d=args.d, eps=args.eps, delta=args.delta,
                  trials=args.trials, seed=args.seed)
    if args.sweep == "eps":
        kwargs.pop("eps")
        rows = eps_sweep(args.kind, n=args.n or 8192, **kwargs)
    elif args.sweep == "m":
        rows = m_sweep(args.kind, n=args.n or 4096, **kwargs)
    elif args.sweep == "nnz":
        rows = nnz_sweep(d=args.d, base_n=args.n or 4096, seed=args.seed)
    else:
        rows = s_sweep(args.kind, n=args.n or 4096, **kwargs)
    _write_csv(args.out, rows)
    if args.out:
        print(f"wrote {args.out} ({len(rows)} rows)")
    return EXIT_OK


def _cmd_pipeline(args):
    A = load_matrix(args.matrix_file)
    config = PipelineConfig(
        eps=args.eps, delta=args.delta, gamma=args.gamma, seed=args.seed,
        kind=args.kind, overrides=Overrides(m=args.m, pm=args.pm),
        validate=args.validate,
    )
    A_tilde, report = fast_subspace_embed(A, config)
    save_matrix(args.out, A_tilde)
    payload = json.dumps(report.to_dict(), indent=2)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(payload + "\n")
    print(payload)
    return EXIT_OK


_COMMANDS = {
    "sketch": _cmd_sketch,
    "apply": _cmd_apply,
    "leverage": _cmd_leverage,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
    "pipeline": _cmd_pipeline,
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER


if __name__ == "__main__":
    sys.exit(main())
