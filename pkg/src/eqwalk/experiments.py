"""Seeded Monte Carlo harness for crossing counts.

Replicate ``r`` at size ``n`` draws from ``SeedSpec(base_seed, (n << 32) | r)``,
so a result depends only on the base seed and never on how replicates were
spread over threads.  Counts are integers and are accumulated exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analytic import TWO_OVER_PI2, crosses_array, parallel_sum
from .density.tables import default_tables
from .geometry import count_self_intersections
from .rng import SeedSpec
from .sampler import FoldChain, polygon_sampler, sample_polygon_conditional, sample_walk

KINDS = ("walk", "polygon")
COUNTERS = ("naive", "sweep")
SAMPLERS = ("conditional", "mcmc")
PATTERNS = ("nested", "interleaved", "disjoint")
EM_BLOCK = 1 << 16
PROBE_BLOCK = 1 << 14
MIN_EM_SAMPLES = 1000
MIN_VARIANCE_SAMPLES = 200
CSV_FIELDS = ("kind", "n", "samples", "mean", "variance", "std_error", "min", "max",
              "seed", "counter", "sampler", "wall_ms")


def default_threads() -> int:
    return os.cpu_count() or 1


def replicate_seed(base_seed: int, n: int, r: int) -> SeedSpec:
    return SeedSpec(base_seed, (n << 32) | r)


# --------------------------------------------------------------- statistics

@dataclass(frozen=True)
class SummaryStats:
    n: int
    samples: int
    mean: float
    variance: float
    std_error: float
    min: int
    max: int
    kind: str = ""
    seed: int | None = None
    counter: str = ""
    sampler: str = ""
    wall_ms: float | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.variance < 0:
            raise ValueError("variance must be >= 0")
        if not self.min <= self.mean <= self.max:
            raise ValueError("mean must lie in [min, max]")

    @classmethod
    def from_counts(cls, n: int, counts, **meta) -> "SummaryStats":
        acc = StatsAccumulator()
        for c in counts:
            acc.add(c)
        return acc.result(n, **meta)


class StatsAccumulator:
    """Exact one-pass moments of integer data."""

    __slots__ = ("count", "s1", "s2", "lo", "hi")

    def __init__(self):
        self.count = 0
        self.s1 = 0
        self.s2 = 0
        self.lo = None
        self.hi = None

    def add(self, x) -> None:
        x = int(x)
        self.count += 1
        self.s1 += x
        self.s2 += x * x
        self.lo = x if self.lo is None or x < self.lo else self.lo
        self.hi = x if self.hi is None or x > self.hi else self.hi

    def add_many(self, xs) -> None:
        xs = np.asarray(xs, dtype=np.int64)
        if xs.size == 0:
            return
        self.count += int(xs.size)
        self.s1 += int(xs.sum())
        self.s2 += sum(int(v) * int(v) for v in xs.tolist())
        lo, hi = int(xs.min()), int(xs.max())
        self.lo = lo if self.lo is None else min(self.lo, lo)
        self.hi = hi if self.hi is None else max(self.hi, hi)

    def merge(self, other: "StatsAccumulator") -> None:
        if other.count == 0:
            return
        self.count += other.count
        self.s1 += other.s1
        self.s2 += other.s2
        self.lo = other.lo if self.lo is None else min(self.lo, other.lo)
        self.hi = other.hi if self.hi is None else max(self.hi, other.hi)

    def result(self, n: int, **meta) -> SummaryStats:
        N = self.count
        if N < 2:
            raise ValueError("need at least 2 samples for a variance")
        mean = Fraction(self.s1, N)
        var = Fraction(N * self.s2 - self.s1 * self.s1, N * (N - 1))
        return SummaryStats(
            n=n, samples=N, mean=float(mean), variance=float(var),
            std_error=math.sqrt(var / N), min=self.lo, max=self.hi, **meta)


# ------------------------------------------------------------------ configs

@dataclass(frozen=True)
class RunConfig:
    kind: str
    n_grid: tuple[int, ...]
    samples_per_n: int
    base_seed: int
    counter: str = "sweep"
    polygon_sampler: str = "conditional"
    threads: int = field(default_factory=default_threads)
    timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.counter not in COUNTERS:
            raise ValueError(f"counter must be one of {COUNTERS}, got {self.counter!r}")
        if self.polygon_sampler not in SAMPLERS:
            raise ValueError(f"polygon_sampler must be one of {SAMPLERS}")
        if self.samples_per_n < 2:
            raise ValueError("samples_per_n must be >= 2")
        if not self.n_grid:
            raise ValueError("n_grid is empty")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        floor = 3 if self.kind == "polygon" else 1
        if self.n_grid[0] < floor:
            raise ValueError(f"n must be >= {floor} for {self.kind}s")
        if self.kind == "polygon" and self.polygon_sampler == "conditional" and 4 in self.n_grid:
            raise ValueError("the conditional sampler cannot draw 4-step polygons")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


def _chunks(total: int, parts: int) -> list[range]:
    parts = max(1, min(parts, total))
    step = -(-total // parts)
    return [range(lo, min(lo + step, total)) for lo in range(0, total, step)]


def _count_replicates(cfg: RunConfig, n: int, reps: range) -> list[int]:
    out = []
    if cfg.kind == "walk":
        for r in reps:
            w = sample_walk(n, replicate_seed(cfg.base_seed, n, r))
            out.append(count_self_intersections(w, cfg.counter).count)
        return out
    draw = polygon_sampler(cfg.polygon_sampler)
    for r in reps:
        p = draw(n, replicate_seed(cfg.base_seed, n, r))
        out.append(count_self_intersections(p, cfg.counter).count)
    return out


def _run_counts(cfg: RunConfig) -> list[SummaryStats]:
    if cfg.kind == "polygon" and cfg.polygon_sampler == "conditional":
        # build every table up front so worker threads only read them
        tables = default_tables()
        for n in cfg.n_grid:
            tables.ensure_polygon(n)
    rows = []
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        for n in cfg.n_grid:
            t0 = time.perf_counter()
            parts = _chunks(cfg.samples_per_n, cfg.threads)
            results = list(pool.map(lambda reps: _count_replicates(cfg, n, reps), parts))
            acc = StatsAccumulator()
            for block in results:
                for c in block:
                    acc.add(c)
            wall = (time.perf_counter() - t0) * 1e3 if cfg.timing else None
            rows.append(acc.result(
                n, kind=cfg.kind, seed=cfg.base_seed, counter=cfg.counter,
                sampler=cfg.polygon_sampler if cfg.kind == "polygon" else "",
                wall_ms=wall))
    return rows


def run_mean_experiment(cfg: RunConfig) -> list[SummaryStats]:
    """Per-n count statistics; identical for any thread count."""
    return _run_counts(cfg)


def run_variance_experiment(cfg: RunConfig) -> list[SummaryStats]:
    if cfg.samples_per_n < MIN_VARIANCE_SAMPLES:
        raise ValueError(f"variance runs need samples_per_n >= {MIN_VARIANCE_SAMPLES}")
    return _run_counts(cfg)


def fit_nlogn_coefficient(rows) -> tuple[float, float, float]:
    """Fit ``mean/n = c ln n + b``; returns ``(c, b, se(c))``.

    Rows are weighted by ``(n / std_error)^2``.  When any standard error is
    zero the weights are meaningless and the fit is unweighted, with the
    slope error taken from the residuals.
    """
    rows = list(rows)
    if len({r.n for r in rows}) < 2:
        raise ValueError("need at least 2 distinct n to fit a slope")
    n = np.array([r.n for r in rows], dtype=float)
    x = np.log(n)
    y = np.array([r.mean for r in rows]) / n
    se = np.array([r.std_error for r in rows]) / n
    A = np.column_stack([x, np.ones_like(x)])
    weighted = bool(np.all(se > 0))
    w = 1.0 / se if weighted else np.ones_like(x)
    coef, *_ = np.linalg.lstsq(A * w[:, None], y * w, rcond=None)
    c, b = float(coef[0]), float(coef[1])
    cov = np.linalg.inv((A * (w * w)[:, None]).T @ A)
    if not weighted:
        dof = len(rows) - 2
        resid = y - A @ coef
        cov = cov * (float(resid @ resid) / dof if dof > 0 else 0.0)
    return c, b, math.sqrt(max(float(cov[0, 0]), 0.0))


# ---------------------------------------------------------- pair probability

def _em_block(m: int, seed: SeedSpec, block: int, size: int) -> int:
    u = seed.generator(block).random((size, m + 2))
    theta = 2.0 * math.pi * u[:, :m]
    qx = np.cos(theta).sum(axis=1)
    qy = np.sin(theta).sum(axis=1)
    big_theta = np.arctan2(qy, qx)
    psi = math.pi * (2.0 * u[:, m] - 1.0)
    phi = math.pi * (2.0 * u[:, m + 1] - 1.0)
    s_dir = big_theta + psi
    t_dir = big_theta + math.pi - phi
    hit = crosses_array(0.0, 0.0, np.cos(s_dir), np.sin(s_dir),
                        qx, qy, qx + np.cos(t_dir), qy + np.sin(t_dir))
    return int(np.count_nonzero(hit))


def em_block_sizes(samples: int) -> list[int]:
    full, rest = divmod(samples, EM_BLOCK)
    return [EM_BLOCK] * full + ([rest] if rest else [])


def estimate_em_probability(m: int, samples: int, seed, threads: int = 1) -> SummaryStats:
    """Frequency with which two unit segments hanging off an m-step walk cross.

    ``S`` leaves the walk's start at angle ``psi`` from the chord ``Q``;
    ``T`` leaves its end at angle ``phi`` measured the other way round.
    Block ``b`` of ``EM_BLOCK`` samples reads ``seed.generator(b)`` row by
    row: ``m`` step angles, then ``psi``, then ``phi``, all as ``2 pi u`` or
    ``pi (2u - 1)``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if samples < MIN_EM_SAMPLES:
        raise ValueError(f"samples must be >= {MIN_EM_SAMPLES}")
    if isinstance(seed, (int, np.integer)):
        seed = SeedSpec(int(seed))
    sizes = em_block_sizes(samples)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        hits = list(pool.map(lambda b: _em_block(m, seed, b, sizes[b]), range(len(sizes))))
    acc = StatsAccumulator()
    acc.count = samples
    acc.s1 = acc.s2 = sum(hits)
    acc.lo = 0 if acc.s1 < samples else 1
    acc.hi = 1 if acc.s1 > 0 else 0
    return acc.result(m, kind="em", seed=seed.base_seed)


# --------------------------------------------------------- covariance probes

@dataclass(frozen=True)
class GapConfiguration:
    """Gaps between four segment indices ``x1 < x2 < x3 < x4``.

    ``a``, ``b``, ``c`` are the step counts strictly between consecutive
    indices and ``d`` the count after ``x4`` (for polygons, wrapping back to
    ``x1``).  The pattern says which indices form the first pair ``(i, j)``
    and the second ``(k, l)``:

    nested       k < i < j < l
    interleaved  i < k < j < l
    disjoint     i < j < k < l
    """
    a: int
    b: int
    c: int
    d: int
    pattern: str

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise ValueError(f"pattern must be one of {PATTERNS}, got {self.pattern!r}")
        if min(self.a, self.b, self.c, self.d) < 1:
            raise ValueError("all gaps must be >= 1")

    @property
    def span(self) -> int:
        """Steps needed: four segments plus all gaps."""
        return self.a + self.b + self.c + self.d + 4

    def indices(self) -> tuple[int, int, int, int]:
        """1-based ``(x1, x2, x3, x4)``, with ``x1 = 1``."""
        x1 = 1
        x2 = x1 + self.a + 1
        x3 = x2 + self.b + 1
        x4 = x3 + self.c + 1
        return x1, x2, x3, x4

    def pairs(self) -> tuple[tuple[int, int], tuple[int, int]]:
        x1, x2, x3, x4 = self.indices()
        if self.pattern == "nested":
            return (x2, x3), (x1, x4)
        if self.pattern == "interleaved":
            return (x1, x3), (x2, x4)
        return (x1, x2), (x3, x4)

    def predicted(self) -> tuple[float, float]:
        """Leading-order ``(Pr[L_ij], Pr[L_kl | L_ij])`` for a long walk."""
        a, b, c = self.a, self.b, self.c
        if self.pattern == "nested":
            return TWO_OVER_PI2 / b, TWO_OVER_PI2 / (a + c)
        if self.pattern == "interleaved":
            return TWO_OVER_PI2 / (a + b + 1), TWO_OVER_PI2 / (parallel_sum(a, b) + c)
        return TWO_OVER_PI2 / a, TWO_OVER_PI2 / c

    def check_fits(self, n: int, kind: str) -> None:
        if kind == "polygon":
            if self.span != n:
                raise ValueError(f"polygon gaps must satisfy a+b+c+d+4 = n; got {self.span} for n = {n}")
        elif self.span > n:
            raise ValueError(f"gaps need {self.span} steps but the walk has n = {n}")


@dataclass(frozen=True)
class CovarianceProbeResult:
    p_first: float
    p_second: float
    p_joint: float
    p_second_given_first: float
    covariance: float
    std_errors: dict
    samples: int
    first_hits: int
    joint_hits: int

    def __post_init__(self):
        for v in (self.p_first, self.p_second, self.p_joint, self.p_second_given_first):
            if not 0.0 <= v <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _pair_hits(v: np.ndarray, i: int, j: int) -> np.ndarray:
    # v has shape (samples, n + 1, 2); segment k joins vertices k-1 and k
    a, b = v[:, i - 1], v[:, i]
    c, d = v[:, j - 1], v[:, j]
    return crosses_array(a[:, 0], a[:, 1], b[:, 0], b[:, 1], c[:, 0], c[:, 1], d[:, 0], d[:, 1])


def _walk_block(n: int, seed: SeedSpec, block: int, size: int, pairs) -> tuple[np.ndarray, np.ndarray]:
    theta = 2.0 * math.pi * seed.generator(block).random((size, n))
    v = np.zeros((size, n + 1, 2))
    v[:, 1:, 0] = np.cumsum(np.cos(theta), axis=1)
    v[:, 1:, 1] = np.cumsum(np.sin(theta), axis=1)
    return _pair_hits(v, *pairs[0]), _pair_hits(v, *pairs[1])


def _polygon_block(n: int, base_seed: int, reps: range, sampler: str, pairs):
    if sampler == "mcmc":
        chain = FoldChain(n, SeedSpec(base_seed, reps.start))
        polys = [chain.sample() for _ in reps]
    else:
        polys = [sample_polygon_conditional(n, None, SeedSpec(base_seed, r)) for r in reps]
    v = np.stack([p.vertices for p in polys])
    return _pair_hits(v, *pairs[0]), _pair_hits(v, *pairs[1])


def probe_covariance(n: int, g: GapConfiguration, samples: int, seed, kind: str = "walk",
                     sampler: str = "conditional", threads: int = 1) -> CovarianceProbeResult:
    """Joint and marginal frequencies of the two crossing events of ``g``.

    Standard errors are binomial for the frequencies, a ratio estimate for
    the conditional one and the delta method for the covariance.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if sampler not in SAMPLERS:
        raise ValueError(f"sampler must be one of {SAMPLERS}")
    if samples < 2:
        raise ValueError("samples must be >= 2")
    g.check_fits(n, kind)
    if isinstance(seed, (int, np.integer)):
        seed = SeedSpec(int(seed))
    pairs = g.pairs()
    if kind == "walk":
        full, rest = divmod(samples, PROBE_BLOCK)
        sizes = [PROBE_BLOCK] * full + ([rest] if rest else [])
        jobs = [lambda b=b: _walk_block(n, seed, b, sizes[b], pairs) for b in range(len(sizes))]
    else:
        if sampler == "conditional":
            default_tables().ensure_polygon(n)
        # one chain per block of replicates keeps MCMC state inside a task
        blocks = [range(lo, min(lo + 256, samples)) for lo in range(0, samples, 256)]
        jobs = [lambda reps=reps: _polygon_block(n, seed.base_seed, reps, sampler, pairs)
                for reps in blocks]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = list(pool.map(lambda job: job(), jobs))
    x = np.concatenate([p[0] for p in parts])
    y = np.concatenate([p[1] for p in parts])
    return _probe_result(x, y)


def _probe_result(x: np.ndarray, y: np.ndarray) -> CovarianceProbeResult:
    N = x.size
    nx = int(np.count_nonzero(x))
    ny = int(np.count_nonzero(y))
    nxy = int(np.count_nonzero(x & y))
    px, py, pxy = nx / N, ny / N, nxy / N
    cond = nxy / nx if nx else 0.0
    cov = pxy - px * py
    xf, yf = x.astype(float), y.astype(float)
    infl = xf * yf - py * xf - px * yf
    se = {
        "p_first": math.sqrt(px * (1 - px) / N),
        "p_second": math.sqrt(py * (1 - py) / N),
        "p_joint": math.sqrt(pxy * (1 - pxy) / N),
        "p_second_given_first": math.sqrt(cond * (1 - cond) / nx) if nx else 0.0,
        "covariance": float(infl.std(ddof=1)) / math.sqrt(N),
    }
    return CovarianceProbeResult(px, py, pxy, cond, cov, se, N, nx, nxy)


# -------------------------------------------------------------- persistence

def _fmt_float(v) -> str:
    return format(float(v), ".17g")


def _row_values(r: SummaryStats) -> dict:
    return {
        "kind": r.kind, "n": r.n, "samples": r.samples,
        "mean": r.mean, "variance": r.variance, "std_error": r.std_error,
        "min": r.min, "max": r.max, "seed": r.seed,
        "counter": r.counter, "sampler": r.sampler, "wall_ms": r.wall_ms,
    }


def format_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        d = _row_values(r)
        w.writerow([
            d["kind"], d["n"], d["samples"], _fmt_float(d["mean"]), _fmt_float(d["variance"]),
            _fmt_float(d["std_error"]), d["min"], d["max"],
            "" if d["seed"] is None else d["seed"], d["counter"], d["sampler"],
            "" if d["wall_ms"] is None else _fmt_float(d["wall_ms"]),
        ])
    return buf.getvalue()


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, float):
        return _fmt_float(v) if math.isfinite(v) else "null"
    return json.dumps(v)


def format_json(rows) -> str:
    # json.dumps writes shortest round-trip floats; we want fixed 17 digits
    objs = []
    for r in rows:
        d = _row_values(r)
        body = ", ".join(f"{json.dumps(k)}: {_json_value(d[k])}" for k in CSV_FIELDS)
        objs.append("  {" + body + "}")
    return "[\n" + ",\n".join(objs) + "\n]\n" if objs else "[]\n"


def persist_results(rows, path, format: str = "csv") -> None:
    if format == "csv":
        text = format_csv(rows)
    elif format == "json":
        text = format_json(rows)
    else:
        raise ValueError(f"format must be csv or json, got {format!r}")
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write results to {path}: {e.strerror or e}") from e


def _from_record(d: dict) -> SummaryStats:
    def opt_float(v):
        return None if v in ("", None) else float(v)

    def opt_int(v):
        return None if v in ("", None) else int(v)

    return SummaryStats(
        n=int(d["n"]), samples=int(d["samples"]), mean=float(d["mean"]),
        variance=float(d["variance"]), std_error=float(d["std_error"]),
        min=int(d["min"]), max=int(d["max"]), kind=d["kind"] or "",
        seed=opt_int(d["seed"]), counter=d["counter"] or "", sampler=d["sampler"] or "",
        wall_ms=opt_float(d["wall_ms"]))


def read_results(path, format: str | None = None) -> list[SummaryStats]:
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv"
    text = path.read_text(encoding="utf-8")
    if format == "json":
        return [_from_record(d) for d in json.loads(text)]
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
    return [_from_record(d) for d in reader]
