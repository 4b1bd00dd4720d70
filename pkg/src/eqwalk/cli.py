"""Command-line front end: ``eqwalk <subcommand> [flags]``.

Exit status is 0 on success, 2 on a usage error and 1 when the run itself
fails.  Outputs go to ``--out`` or standard output.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analytic, experiments
from .density import gaussian_planar_density, kluyver_radial_density
from .density.kluyver import MIN_STEPS
from .experiments import GapConfiguration, RunConfig
from .geometry import count_self_intersections
from .rng import SeedSpec
from .sampler import polygon_sampler, sample_walk


class UsageError(Exception):
    """Bad flag value; carries the flag name."""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _vertices_json(v: np.ndarray) -> str:
    return "[" + ", ".join(f"[{_fmt(x)}, {_fmt(y)}]" for x, y in v) + "]\n"


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    Path(out).write_text(text, encoding="utf-8")


# ------------------------------------------------------------ subcommands

def _single_n(args) -> int:
    if len(args.n) != 1:
        raise UsageError("--n", "expects a single value here")
    return args.n[0]


def cmd_walk(args) -> None:
    n = _single_n(args)
    if n < 1:
        raise UsageError("--n", "must be >= 1")
    w = sample_walk(n, SeedSpec(args.seed, args.replicate))
    _emit(_vertices_json(w.vertices), args.out)


def cmd_polygon(args) -> None:
    n = _single_n(args)
    if n < 3:
        raise UsageError("--n", "a polygon needs at least 3 steps")
    if n == 4 and args.sampler == "conditional":
        raise UsageError("--n", "the conditional sampler cannot draw 4-step polygons; use --sampler mcmc")
    p = polygon_sampler(args.sampler)(n, SeedSpec(args.seed, args.replicate))
    _emit(_vertices_json(p.vertices), args.out)


def cmd_count(args) -> None:
    try:
        data = json.loads(Path(args.input).read_text(encoding="utf-8"))
    except OSError as e:
        raise UsageError("--input", f"cannot read {args.input}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise UsageError("--input", f"not valid JSON: {e}") from None
    v = np.asarray(data, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
        raise UsageError("--input", "expected a JSON array of at least two [x, y] pairs")
    if args.kind == "auto":
        closed = v.shape[0] >= 4 and math.hypot(*(v[-1] - v[0])) <= 1e-9
    else:
        closed = args.kind == "polygon"
    res = count_self_intersections(v, args.counter, closed=closed)
    out = {"count": res.count, "pairs_examined": res.pairs_examined,
           "method": res.method, "fallback": res.fallback, "closed": closed}
    _emit(json.dumps(out) + "\n", args.out)


def cmd_density(args) -> None:
    n = _single_n(args)
    if n < MIN_STEPS:
        raise UsageError("--n", f"the Bessel integral route needs n >= {MIN_STEPS}")
    if args.step <= 0:
        raise UsageError("--step", "must be positive")
    r_max = float(n) if args.r_max is None else args.r_max
    if not 0 < r_max <= n:
        raise UsageError("--r-max", f"must lie in (0, {n}]")
    rs = np.arange(0.0, r_max + args.step / 2, args.step)
    f = np.asarray(kluyver_radial_density(n, rs), dtype=float)
    g = 2.0 * math.pi * rs * np.asarray(gaussian_planar_density(n, rs), dtype=float)
    lines = ["r,density,gaussian,difference"]
    lines += [f"{_fmt(a)},{_fmt(b)},{_fmt(c)},{_fmt(b - c)}" for a, b, c in zip(rs, f, g)]
    _emit("\n".join(lines) + "\n", args.out)


def cmd_constants(args) -> None:
    spots = {"0": 0.0, "pi/6": math.pi / 6, "pi/4": math.pi / 4,
             "pi/3": math.pi / 3, "pi/2": math.pi / 2}
    out = {
        "J": analytic.triple_integral_J(1e-10),
        "J_rho_route": analytic.triple_integral_J_rho(),
        "two_over_pi_squared": analytic.TWO_OVER_PI2,
        "inner_integral": {k: analytic.inner_integral(v) for k, v in spots.items()},
    }
    _emit(json.dumps(out, indent=2) + "\n", args.out)


def _write_rows(rows, args) -> None:
    if args.out is None or args.out == "-":
        text = experiments.format_json(rows) if args.format == "json" else experiments.format_csv(rows)
        sys.stdout.write(text)
    else:
        experiments.persist_results(rows, args.out, args.format)


def cmd_probe_em(args) -> None:
    if args.m < 1:
        raise UsageError("--m", "must be >= 1")
    if args.samples < experiments.MIN_EM_SAMPLES:
        raise UsageError("--samples", f"must be >= {experiments.MIN_EM_SAMPLES}")
    row = experiments.estimate_em_probability(args.m, args.samples, SeedSpec(args.seed), args.threads)
    _write_rows([row], args)


def _run_config(args) -> RunConfig:
    try:
        return RunConfig(kind=args.kind, n_grid=args.n, samples_per_n=args.samples,
                         base_seed=args.seed, counter=args.counter,
                         polygon_sampler=args.sampler, threads=args.threads,
                         timing=args.timing)
    except ValueError as e:
        msg = str(e)
        flag = "--samples" if "samples" in msg else "--threads" if "threads" in msg else "--n"
        raise UsageError(flag, msg) from None


def cmd_mean(args) -> None:
    rows = experiments.run_mean_experiment(_run_config(args))
    _write_rows(rows, args)


def cmd_variance(args) -> None:
    if args.samples < experiments.MIN_VARIANCE_SAMPLES:
        raise UsageError("--samples", f"variance runs need >= {experiments.MIN_VARIANCE_SAMPLES}")
    rows = experiments.run_variance_experiment(_run_config(args))
    _write_rows(rows, args)


def cmd_probe_covar(args) -> None:
    n = _single_n(args)
    if len(args.gaps) != 4:
        raise UsageError("--gaps", "expects four integers a,b,c,d")
    try:
        g = GapConfiguration(*args.gaps, pattern=args.pattern)
        g.check_fits(n, args.kind)
    except ValueError as e:
        raise UsageError("--gaps", str(e)) from None
    if args.samples < 2:
        raise UsageError("--samples", "must be >= 2")
    res = experiments.probe_covariance(n, g, args.samples, SeedSpec(args.seed), kind=args.kind,
                                       sampler=args.sampler, threads=args.threads)
    out = res.as_dict()
    first, second = g.predicted()
    out["predicted_first"] = first
    out["predicted_second_given_first"] = second
    out["pairs"] = [list(p) for p in g.pairs()]
    _emit(json.dumps(out, indent=2) + "\n", args.out)


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = argparse.ArgumentParser(prog="eqwalk", formatter_class=fmt,
                                description="Self-intersections of planar equilateral random walks.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, description=help_, formatter_class=fmt)
        sp.set_defaults(func=fn)
        return sp

    def common(sp, *, n_default=None, samples=None, out=True):
        sp.add_argument("--n", type=_int_list, default=n_default, required=n_default is None,
                        help="number of steps (comma list where a grid is accepted)")
        if samples is not None:
            sp.add_argument("--samples", type=int, default=samples, help="Monte Carlo sample count")
        sp.add_argument("--seed", type=int, default=0, help="base seed")
        if out:
            sp.add_argument("--out", default=None, help="output file (standard output if omitted)")

    threads = experiments.default_threads()

    sp = add("walk", cmd_walk, "Sample one equilateral walk; writes [[x, y], ...] JSON.")
    common(sp)
    sp.add_argument("--replicate", type=int, default=0, help="replicate index of the random stream")

    sp = add("polygon", cmd_polygon, "Sample one equilateral polygon; writes [[x, y], ...] JSON.")
    common(sp)
    sp.add_argument("--replicate", type=int, default=0, help="replicate index of the random stream")
    sp.add_argument("--sampler", choices=experiments.SAMPLERS, default="conditional", help="polygon sampler")

    sp = add("count", cmd_count, "Count self-intersections of a walk or polygon read from JSON.")
    sp.add_argument("--input", required=True, help="JSON array of [x, y] vertices")
    sp.add_argument("--kind", choices=("auto", "walk", "polygon"), default="auto",
                    help="treat the input as open or closed; auto closes when the ends coincide")
    sp.add_argument("--counter", choices=experiments.COUNTERS, default="sweep", help="counting method")
    sp.add_argument("--out", default=None, help="output file (standard output if omitted)")

    sp = add("density", cmd_density, "Tabulate the radial end-to-end density against its Gaussian.")
    common(sp)
    sp.add_argument("--step", type=float, default=0.1, help="grid spacing in r")
    sp.add_argument("--r-max", type=float, default=None, help="largest r (default n)")

    sp = add("constants", cmd_constants, "Print the crossing-geometry constants as JSON.")
    sp.add_argument("--out", default=None, help="output file (standard output if omitted)")

    sp = add("probe-em", cmd_probe_em, "Estimate the pair crossing probability across m steps.")
    sp.add_argument("--m", type=int, required=True, help="steps between the two segments")
    sp.add_argument("--samples", type=int, default=10 ** 6, help="Monte Carlo sample count")
    sp.add_argument("--seed", type=int, default=0, help="base seed")
    sp.add_argument("--out", default=None, help="output file (standard output if omitted)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    sp.add_argument("--threads", type=int, default=threads, help="worker threads")

    for name, fn, help_, samples in (
            ("mean", cmd_mean, "Mean crossing count over a grid of n.", 2000),
            ("variance", cmd_variance, "Crossing-count variance over a grid of n.", 2000)):
        sp = add(name, fn, help_)
        sp.add_argument("--kind", choices=experiments.KINDS, default="walk", help="walks or polygons")
        common(sp, samples=samples)
        sp.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
        sp.add_argument("--threads", type=int, default=threads, help="worker threads")
        sp.add_argument("--counter", choices=experiments.COUNTERS, default="sweep", help="counting method")
        sp.add_argument("--sampler", choices=experiments.SAMPLERS, default="conditional",
                        help="polygon sampler")
        sp.add_argument("--timing", action="store_true",
                        help="record wall_ms (makes output depend on the machine)")

    sp = add("probe-covar", cmd_probe_covar, "Joint crossing frequencies for a gap configuration.")
    sp.add_argument("--kind", choices=experiments.KINDS, default="walk", help="walks or polygons")
    common(sp, samples=10 ** 5)
    sp.add_argument("--pattern", choices=experiments.PATTERNS, required=True, help="index pattern")
    sp.add_argument("--gaps", type=_int_list, required=True, help="gap lengths a,b,c,d")
    sp.add_argument("--threads", type=int, default=threads, help="worker threads")
    sp.add_argument("--sampler", choices=experiments.SAMPLERS, default="conditional",
                    help="polygon sampler")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "threads", 1) < 1:
        print("eqwalk: error: --threads: must be >= 1", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except UsageError as e:
        print(f"eqwalk {args.command}: error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130
    except Exception as e:  # noqa: BLE001 - report and map to exit 1
        print(f"eqwalk {args.command}: failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
