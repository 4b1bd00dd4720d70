"""Tabulated endpoint densities for the conditional polygon sampler.

Each table holds the planar density ``q_m`` on a uniform grid ``r = k * step``.
Values between nodes are linearly interpolated; beyond the last node the
density is taken to be zero.  For large ``m`` the grid stops at
``8 sqrt(m) + 4`` where ``q_m`` is far below double precision relative to its
peak.

Tables are kept in memory and, optionally, as ``.npy`` files in a cache
directory (``EQWALK_CACHE`` or ``~/.cache/eqwalk``).
"""
from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from . import kluyver
from .bessel import bessel_j0
from .short import cell_average, planar_density_3, planar_density_4

STEP = 0.01
SHARED_MIN = 40
_FORMAT = 1


def table_top(m: int) -> float:
    return float(min(m, 8.0 * math.sqrt(m) + 4.0))


class TableMissError(KeyError):
    """A density table for the requested step count is not available."""


@dataclass(frozen=True)
class RadialDensityTable:
    n: int
    step: float
    planar_values: np.ndarray = field(repr=False)

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.planar_values.size) * self.step

    @property
    def values(self) -> np.ndarray:
        """Radial density ``2 pi r q(r)`` on the grid."""
        return 2.0 * math.pi * self.grid * self.planar_values

    @property
    def top(self) -> float:
        return (self.planar_values.size - 1) * self.step

    def planar(self, r: float) -> float:
        """Interpolated planar density at a single radius."""
        t = r / self.step
        k = int(t)
        if k >= self.planar_values.size - 1:
            return 0.0
        f = t - k
        pv = self.planar_values
        return pv[k] + f * (pv[k + 1] - pv[k])

    def planar_many(self, r) -> np.ndarray:
        return np.interp(r, self.grid, self.planar_values, right=0.0)

    def max_planar(self, lo: float, hi: float) -> float:
        """Largest interpolated value on ``[lo, hi]``."""
        a = int(lo / self.step)
        b = int(hi / self.step) + 2
        seg = self.planar_values[a:b]
        return float(seg.max()) if seg.size else 0.0

    def normalization(self) -> float:
        """Integral of the radial density over the table.

        Simpson for the smooth tables; the three- and four-step ones carry
        cell averages around their singular points, which the trapezoid rule
        (the mass of the interpolant) handles better.
        """
        v = self.values
        if self.n < 5:
            return float(integrate.trapezoid(v, dx=self.step))
        if v.size % 2 == 0:
            v = np.append(v, 0.0)
        return float(integrate.simpson(v, dx=self.step))


def _grid(m: int, step: float) -> np.ndarray:
    count = int(math.floor(table_top(m) / step + 1e-9)) + 1
    return np.arange(count) * step


def _build_small(m: int, step: float) -> np.ndarray:
    # q3 has a log singularity at r = 1; q4 one at r = 0 and a square-root
    # cusp at r = 2.  Nodes near them carry cell averages so the interpolated
    # density keeps the right mass.  q3 is cheap enough to average everywhere.
    r = _grid(m, step)
    if m == 3:
        func, rough = planar_density_3, (1.0,)
    else:
        func, rough = planar_density_4, (0.0, 2.0)
    reach = 4.0 if m == 3 else 0.1
    out = np.empty_like(r)
    for k, rv in enumerate(r[:-1]):
        if min(abs(rv - p) for p in rough) < reach:
            out[k] = cell_average(func, rv - 0.5 * step, rv + 0.5 * step, rough)
        else:
            out[k] = func(rv)
    # q3 jumps to zero at r = 3, keep its left limit on the last node
    out[-1] = func(r[-1] - 1e-12) if m == 3 else 0.0
    return out


def _shared_nodes(step: float, top_m: int):
    """Quadrature nodes good enough for every m >= SHARED_MIN."""
    cut = kluyver.certified_cutoff(SHARED_MIN)
    rmax = table_top(top_m)
    width = min(0.5, 6.0 / (rmax + 21.0), 1.0 / math.sqrt(SHARED_MIN))
    return kluyver._panels(0.0, cut, width)


def _build_shared(ms: list[int], step: float) -> dict[int, np.ndarray]:
    top_m = max(ms)
    x, w = _shared_nodes(step, top_m)
    j0x = bessel_j0(x)
    weights = np.stack([w * x * j0x ** m for m in ms], axis=1) / (2.0 * math.pi)
    r = _grid(top_m, step)
    out = np.empty((r.size, len(ms)))
    chunk = 512
    for s in range(0, r.size, chunk):
        out[s:s + chunk] = bessel_j0(np.multiply.outer(r[s:s + chunk], x)) @ weights
    result = {}
    for i, m in enumerate(ms):
        size = _grid(m, step).size
        col = out[:size, i].copy()
        if r[size - 1] >= m:
            col[-1] = 0.0
        result[m] = col
    return result


def build_planar_values(m: int, step: float = STEP) -> np.ndarray:
    if m in (3, 4):
        return _build_small(m, step)
    if m < 3:
        raise ValueError(f"no table for m = {m}; use the closed form")
    r = _grid(m, step)
    vals = kluyver.kluyver_planar_density(m, r)
    if r[-1] >= m:
        vals[-1] = 0.0
    return vals


def default_cache_dir() -> Path:
    env = os.environ.get("EQWALK_CACHE")
    if env is not None:
        return Path(env)
    return Path.home() / ".cache" / "eqwalk"


class TableSet:
    """Lazily built, thread-safe collection of density tables."""

    def __init__(self, step: float = STEP, cache_dir: str | Path | None = None,
                 use_disk: bool = True):
        self.step = step
        self.cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
        self.use_disk = use_disk
        self._tables: dict[int, RadialDensityTable] = {}
        self._lock = threading.Lock()

    def _path(self, m: int) -> Path:
        return self.cache_dir / f"v{_FORMAT}-h{self.step:g}" / f"q{m}.npy"

    def _load(self, m: int) -> np.ndarray | None:
        if not self.use_disk:
            return None
        p = self._path(m)
        try:
            vals = np.load(p)
        except (OSError, ValueError):
            return None
        return vals if vals.size == _grid(m, self.step).size else None

    def _store(self, m: int, vals: np.ndarray) -> None:
        if not self.use_disk:
            return
        p = self._path(m)
        try:
            p.parent.mkdir(parents=True, exist_ok=True)
            tmp = p.with_suffix(f".{os.getpid()}.{threading.get_ident()}.tmp")
            with open(tmp, "wb") as fh:
                np.save(fh, vals)
            os.replace(tmp, p)
        except OSError:
            pass

    def __contains__(self, m: int) -> bool:
        return m in self._tables

    def get(self, m: int) -> RadialDensityTable:
        t = self._tables.get(m)
        if t is None:
            self.ensure([m])
            t = self._tables[m]
        return t

    def require(self, m: int) -> RadialDensityTable:
        """Like ``get`` but never builds; raises TableMissError."""
        try:
            return self._tables[m]
        except KeyError:
            raise TableMissError(f"no density table for m = {m}") from None

    def ensure(self, ms) -> None:
        with self._lock:
            missing = []
            for m in sorted(set(int(v) for v in ms)):
                if m in self._tables:
                    continue
                vals = self._load(m)
                if vals is None:
                    missing.append(m)
                else:
                    self._add(m, vals)
            shared = [m for m in missing if m >= SHARED_MIN]
            if shared:
                for m, vals in _build_shared(shared, self.step).items():
                    self._store(m, vals)
                    self._add(m, vals)
            for m in missing:
                if m < SHARED_MIN:
                    vals = build_planar_values(m, self.step)
                    self._store(m, vals)
                    self._add(m, vals)

    def ensure_polygon(self, n: int) -> None:
        """Tables needed to sample an n-gon conditionally."""
        self.ensure(range(3, n - 1))

    def _add(self, m: int, vals: np.ndarray) -> None:
        vals = np.ascontiguousarray(vals, dtype=float)
        vals.setflags(write=False)
        self._tables[m] = RadialDensityTable(m, self.step, vals)


_default: TableSet | None = None
_default_lock = threading.Lock()


def default_tables() -> TableSet:
    global _default
    with _default_lock:
        if _default is None:
            _default = TableSet()
        return _default


def watson_integral_check(a: float, r: float) -> tuple[float, float]:
    """Quadrature values of ``int J0(rx) exp(-a x^2) x dx`` and the ``x^5`` analogue."""
    if a <= 0:
        raise ValueError("a must be positive")
    top = math.sqrt(40.0 / a) + 10.0

    def first(x):
        return bessel_j0(r * x) * math.exp(-a * x * x) * x

    def fifth(x):
        return bessel_j0(r * x) * math.exp(-a * x * x) * x ** 5

    opts = dict(limit=400, epsabs=1e-14, epsrel=1e-13)
    v1, _ = integrate.quad(first, 0.0, top, **opts)
    v5, _ = integrate.quad(fifth, 0.0, top, **opts)
    return v1, v5
