"""Command-line harness: gen, transform, band, bench, digits, plot."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import generators as gen
from . import transforms as tr
from .bands import band_to_csv, cm_band
from .harness import ExperimentConfig, run_experiment
from .moments import MomentSequence, hankel_report
from .plotting import emit_plot
from .polish import polish
from .transforms import MatrixCache, uniform_grid


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--precision-digits", type=int, default=None)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--out", default=None, help="output file or directory")


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def cmd_gen(args) -> int:
    rng = _rng(args.seed)
    if args.type == "canonical":
        m = gen.generate_canonical(args.n, rng)
        spec_json = {"type": "canonical", "n": args.n}
    elif args.type == "cm":
        spec = gen.random_decay_spec(args.decay_class, rng)
        digits = args.precision_digits or max(64, tr.spec_moment_digits(spec, args.n))
        m = gen.decay_moments(spec, args.n, digits=digits)
        spec_json = json.loads(spec.to_json())
    elif args.type == "beta-mixture":
        spec = gen.random_beta_mixture_spec(rng)
        m = gen.beta_mixture_moments(spec, args.n, digits=args.precision_digits)
        spec_json = json.loads(spec.to_json())
    else:
        raise SystemExit(f"unknown generator type {args.type}")
    rep = hankel_report(m)
    payload = {"generator": spec_json, "seed": args.seed, "n": m.n,
               "classification": rep.classification,
               "moments": json.loads(m.to_json())}
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def _load_moments(path: str) -> MomentSequence:
    obj = json.loads(Path(path).read_text())
    if isinstance(obj, dict):
        obj = obj["moments"]
    return MomentSequence.from_json(json.dumps(obj))


def cmd_transform(args) -> int:
    m = _load_moments(args.moments)
    if args.n is not None:
        m = m.truncated(args.n)
    cache = MatrixCache(args.cache_dir)
    digits = args.precision_digits
    method = args.method
    if method == "bm":
        raw = tr.bm_samples(m, digits=digits, cache=cache)
    elif method == "fl":
        raw = tr.fl_samples(m, digits=digits, cache=cache)
    elif method == "fc":
        raw = tr.fc_samples(m, digits=digits, cache=cache)
    elif method == "fj":
        raw, _ = tr.fj_samples(m, digits=digits)
    elif method == "me":
        raw, params = tr.me_samples(m)
        if not params.converged:
            print(f"warning: ME not converged (grad {params.gradient_norm:.3g})",
                  file=sys.stderr)
    elif method == "cm":
        band = cm_band(m, uniform_grid(m.n), digits=digits)
        raw = tr.cm_average(band)
    else:
        raise SystemExit(f"unknown method {method}")
    pol = polish(raw)
    lines = ["x,raw,polished"]
    for x, v in zip(raw.grid, raw.values):
        lines.append(f"{x:.12g},{v:.12g},{pol(float(x)):.12g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return 0


def cmd_band(args) -> int:
    m = _load_moments(args.moments)
    if args.n is not None:
        m = m.truncated(args.n)
    band = cm_band(m, uniform_grid(args.grid_size), support_grid_size=args.support,
                   lp_tol=args.lp_tol, digits=args.precision_digits)
    out = args.out or "band.csv"
    band_to_csv(band, out)
    print(f"band written to {out} (converged={band.converged}, "
          f"achieved={band.achieved_tol:.3g})")
    return 0


def cmd_bench(args) -> int:
    if args.config:
        cfg = ExperimentConfig.from_json(Path(args.config).read_text())
        if args.seed is not None:
            cfg.seed = args.seed
    else:
        cfg = ExperimentConfig(experiment=args.experiment, seed=args.seed or 0)
        if args.trials:
            cfg.trials = args.trials
        if args.orders:
            cfg.orders = tuple(int(x) for x in args.orders.split(","))
        if args.methods:
            cfg.methods = tuple(args.methods.split(","))
        if args.classes:
            cfg.decay_classes = tuple(args.classes.split(","))
        if args.generator:
            cfg.generator = args.generator
    if args.out:
        cfg.out_dir = args.out
    if args.cache_dir:
        cfg.cache_dir = args.cache_dir
    if args.precision_digits:
        cfg.precision_digits = args.precision_digits
    result = run_experiment(cfg)
    print(f"wrote {result}")
    return 0


def cmd_digits(args) -> int:
    if args.method:
        print(f"{args.method} n={args.n}: {tr.required_digits(args.method, args.n)} digits")
    if args.decay_class:
        d = tr.required_moment_digits(args.decay_class, args.n, args.s, args.a, args.b)
        print(f"{args.decay_class} moments n={args.n} s={args.s}: {d} digits")
    return 0


def cmd_plot(args) -> int:
    out = args.out or (str(Path(args.csv).with_suffix(".svg")))
    emit_plot(args.csv, args.kind, out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hmt",
                                 description="Hausdorff moment transforms")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a random moment sequence as JSON")
    p.add_argument("--type", choices=("canonical", "cm", "beta-mixture"),
                   default="canonical")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--decay-class", choices=gen.DECAY_CLASSES, default="power")
    _add_common(p)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("transform", help="run one method on a sequence")
    p.add_argument("--method", required=True,
                   choices=("bm", "me", "fj", "fl", "fc", "cm"))
    p.add_argument("--moments", required=True, help="JSON file from `hmt gen`")
    p.add_argument("--n", type=int, default=None, help="truncate to this order")
    _add_common(p)
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("band", help="Chebyshev-Markov band CSV")
    p.add_argument("--moments", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--grid-size", type=int, default=50)
    p.add_argument("--support", type=int, default=2001)
    p.add_argument("--lp-tol", type=float, default=1e-6)
    _add_common(p)
    p.set_defaults(fn=cmd_band)

    p = sub.add_parser("bench", help="run an experiment suite")
    p.add_argument("--config", default=None, help="ExperimentConfig JSON file")
    p.add_argument("--experiment", default="decay-sweep",
                   choices=("decay-sweep", "gp-sensitivity", "timing",
                            "cm-histogram", "single-run"))
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--orders", default=None, help="comma-separated order list")
    p.add_argument("--methods", default=None, help="comma-separated method list")
    p.add_argument("--classes", default=None, help="comma-separated decay classes")
    p.add_argument("--generator", default=None,
                   choices=("cm", "beta_mixture", "canonical"))
    _add_common(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("digits", help="precision requirement estimators")
    p.add_argument("--method", choices=("bm", "fl", "fc"), default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--decay-class", dest="decay_class",
                   choices=gen.DECAY_CLASSES, default=None)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.set_defaults(fn=cmd_digits)

    p = sub.add_parser("plot", help="render an experiment CSV to SVG")
    p.add_argument("--csv", required=True)
    p.add_argument("--kind", choices=("distance", "histogram", "samples"),
                   required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
