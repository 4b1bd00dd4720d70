"""Equilateral random walks and polygons in the plane."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .density.tables import RadialDensityTable, TableMissError, TableSet, default_tables
from .rng import as_generator

TWO_PI = 2.0 * math.pi
STEP_TOL = 1e-12
CLOSURE_TOL = 1e-9
ENVELOPE_MARGIN = 1.05


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("point coordinates must be finite")


def _freeze(vertices) -> np.ndarray:
    v = np.array(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
        raise ValueError("vertices must be an (n+1, 2) array with n >= 1")
    if not np.isfinite(v).all():
        raise ValueError("vertex coordinates must be finite")
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class Walk:
    """Vertices ``X_0 = 0, X_1, ..., X_n`` joined by unit steps."""

    vertices: np.ndarray

    closed = False

    def __post_init__(self):
        v = _freeze(self.vertices)
        object.__setattr__(self, "vertices", v)
        if v[0, 0] != 0.0 or v[0, 1] != 0.0:
            raise ValueError("a walk starts at the origin")
        bad = np.abs(self.step_lengths() - 1.0) > STEP_TOL
        if bad.any():
            k = int(np.argmax(bad)) + 1
            raise ValueError(f"step {k} does not have unit length")

    @property
    def n(self) -> int:
        return self.vertices.shape[0] - 1

    def steps(self) -> np.ndarray:
        return np.diff(self.vertices, axis=0)

    def step_lengths(self) -> np.ndarray:
        d = self.steps()
        return np.hypot(d[:, 0], d[:, 1])

    def angles(self) -> np.ndarray:
        """Step directions in ``[0, 2 pi)``."""
        d = self.steps()
        return np.mod(np.arctan2(d[:, 1], d[:, 0]), TWO_PI)

    def points(self) -> list[Point]:
        return [Point(float(x), float(y)) for x, y in self.vertices]

    def endpoint(self) -> Point:
        return Point(float(self.vertices[-1, 0]), float(self.vertices[-1, 1]))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Polygon(Walk):
    """A closed walk; the last vertex repeats the first."""

    closed = True

    def __post_init__(self):
        super().__post_init__()
        if self.n < 3:
            raise ValueError("a polygon needs at least 3 steps")
        gap = math.hypot(*(self.vertices[-1] - self.vertices[0]))
        if gap > CLOSURE_TOL:
            raise ValueError(f"polygon does not close (gap {gap:.3g})")


def sample_walk(n: int, seed) -> Walk:
    """Walk of ``n`` unit steps with independent uniform directions."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    rng = as_generator(seed)
    theta = rng.random(int(n)) * TWO_PI
    v = np.zeros((int(n) + 1, 2))
    v[1:, 0] = np.cumsum(np.cos(theta))
    v[1:, 1] = np.cumsum(np.sin(theta))
    return Walk(v)


# ------------------------------------------------------------ closing steps

def _two_step_radius(uniform, rho: float) -> float:
    """Draw ``s = |P + u|`` for a uniform unit ``u`` weighted by the 2-step density at ``s``.

    In ``s`` the law is proportional to
    ``1 / sqrt((4 - s^2)(s^2 - L^2)((rho + 1)^2 - s^2))`` on ``[L, U]`` with
    ``L = |rho - 1|`` and ``U = min(rho + 1, 2)``.  The two inverse square
    roots at the ends are absorbed by ``s = L + (U - L)(1 - cos t)/2`` with
    uniform ``t``; the remaining factor is bounded and handled by rejection.
    """
    up = rho + 1.0
    lo = abs(rho - 1.0)
    hi = min(up, 2.0)
    other = 2.0 if up < 2.0 else up  # the end point that is not active
    slack = other - hi
    if hi <= lo or lo <= 0.0 or slack <= 0.0:
        raise FloatingPointError(f"degenerate closure geometry at |P| = {rho!r}")
    g_max = 1.0 / math.sqrt(2.0 * lo * (up + lo) * (2.0 + lo) * slack)
    while True:
        t = math.pi * uniform()
        s = lo + (hi - lo) * 0.5 * (1.0 - math.cos(t))
        g = 1.0 / math.sqrt((s + lo) * (up + s) * (2.0 + s) * (other - s))
        if uniform() * g_max <= g:
            return s


def _two_step_vertex(uniform, px: float, py: float) -> tuple[float, float]:
    """Next position after a unit step from ``P``, given that two more unit steps reach the origin."""
    rho = math.hypot(px, py)
    s = _two_step_radius(uniform, rho)
    c = (s * s - rho * rho - 1.0) / (2.0 * rho)
    delta = math.acos(max(-1.0, min(1.0, c)))
    if uniform() < 0.5:
        delta = -delta
    a = math.atan2(py, px) + delta
    return px + math.cos(a), py + math.sin(a)


def _closing_vertex(uniform, px: float, py: float) -> tuple[float, float]:
    """Middle vertex of the two unit steps from ``P`` to the origin (mirror by coin)."""
    gap = math.hypot(px, py)
    if gap > 2.0 + CLOSURE_TOL:
        raise FloatingPointError(f"closure impossible, residual {gap!r} exceeds 2")
    h = math.sqrt(max(0.0, 1.0 - 0.25 * gap * gap))
    if uniform() < 0.5:
        h = -h
    ex, ey = (-px / gap, -py / gap) if gap > 0.0 else (1.0, 0.0)
    return px + 0.5 * gap * ex - h * ey, py + 0.5 * gap * ey + h * ex


# ---------------------------------------------------------------- fold moves

class DegenerateChordError(ValueError):
    """The two chord vertices of a fold coincide."""


def regular_polygon(n: int) -> Polygon:
    if n < 3:
        raise ValueError("a polygon needs at least 3 steps")
    theta = TWO_PI * np.arange(n) / n
    v = np.zeros((n + 1, 2))
    v[1:, 0] = np.cumsum(np.cos(theta))
    v[1:, 1] = np.cumsum(np.sin(theta))
    v[n] = 0.0
    return Polygon(v)


def _reflect_inplace(v: np.ndarray, i: int, j: int) -> None:
    a = v[i]
    d = v[j] - a
    norm = math.hypot(d[0], d[1])
    if norm < STEP_TOL:
        raise DegenerateChordError(f"vertices {i} and {j} coincide")
    e = d / norm
    y = v[i + 1:j] - a
    along = y @ e
    v[i + 1:j] = a + 2.0 * np.outer(along, e) - y


def fold_move(p: Polygon, i: int, j: int, side: bool) -> Polygon:
    """Reflect the vertices strictly between ``i`` and ``j`` across the chord ``X_i X_j``.

    ``side`` is the fair coin of the move; when false ``p`` is returned as is.
    """
    n = p.n
    if not (0 <= i < j <= n):
        raise ValueError(f"need 0 <= i < j <= n, got i={i}, j={j}, n={n}")
    v = p.vertices
    if math.hypot(*(v[j] - v[i])) < STEP_TOL:
        raise DegenerateChordError(f"vertices {i} and {j} coincide")
    if not side or j - i < 2:
        return p
    w = v.copy()
    _reflect_inplace(w, i, j)
    return type(p)(w)


class FoldChain:
    """Fold-move Markov chain on closed n-gons, started at the regular n-gon.

    A fold picks a chord ``(i, j)`` uniformly among pairs that leave at least
    one vertex strictly inside, then flips a fair coin.  Folds are discrete
    reflections, so on their own they can be stuck on a finite set of shapes
    (every pentagon chord spans two edges).  Half of the moves are therefore
    heat-bath updates that redraw three consecutive edges from their exact law
    given the two end vertices.  When a sample is taken the polygon is also
    turned by a uniform angle about ``X_0``.  Every move keeps the closed-walk
    law invariant.
    """

    def __init__(self, n: int, seed, burn_in: int | None = None, stride: int | None = None):
        if int(n) != n or n < 3:
            raise ValueError("a polygon needs at least 3 steps")
        self.n = int(n)
        self.burn_in = 50 * self.n if burn_in is None else int(burn_in)
        self.stride = 5 * self.n if stride is None else int(stride)
        if self.burn_in < 1 or self.stride < 1:
            raise ValueError("burn_in and stride must be >= 1")
        self.rng = as_generator(seed)
        self._v = regular_polygon(self.n).vertices.copy()
        self.moves = 0
        self._started = False
        self._buf = np.empty(0)
        self._pos = 0

    def _uniform(self) -> float:
        if self._pos >= self._buf.size:
            self._buf = self.rng.random(4096)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return float(u)

    def _move(self) -> None:
        if self.n > 3 and self._uniform() < 0.5:
            self._redraw_three(int(self._uniform() * (self.n - 2)))
        else:
            self._fold()
        self.moves += 1

    def _redraw_three(self, i: int) -> None:
        v = self._v
        bx, by = v[i + 3]
        px, py = v[i, 0] - bx, v[i, 1] - by
        rho = math.hypot(px, py)
        if rho < 1e-9 or abs(rho - 1.0) < 1e-9:
            return  # measure-zero geometry, leave the state alone
        px, py = _two_step_vertex(self._uniform, px, py)
        qx, qy = _closing_vertex(self._uniform, px, py)
        v[i + 1] = px + bx, py + by
        v[i + 2] = qx + bx, qy + by

    def _fold(self) -> None:
        n = self.n
        while True:
            i = int(self._uniform() * (n + 1))
            j = int(self._uniform() * (n + 1))
            if i > j:
                i, j = j, i
            if j - i < 2 or (i == 0 and j == n):
                continue
            flip = self._uniform() < 0.5
            if not flip:
                break
            try:
                _reflect_inplace(self._v, i, j)
            except DegenerateChordError:
                continue
            break

    def _rotate(self) -> None:
        a = self._uniform() * TWO_PI
        c, s = math.cos(a), math.sin(a)
        x = self._v[:, 0].copy()
        y = self._v[:, 1]
        self._v[:, 0] = c * x - s * y
        self._v[:, 1] = s * x + c * y
        self._v[0] = 0.0
        self._v[-1] = 0.0

    def advance(self, moves: int) -> None:
        for _ in range(moves):
            self._move()

    def sample(self) -> Polygon:
        """Burn in on the first call, then ``stride`` moves between samples."""
        self.advance(self.stride if self._started else self.burn_in)
        self._started = True
        self._rotate()
        return Polygon(self._v.copy())

    def __iter__(self) -> Iterator[Polygon]:
        while True:
            yield self.sample()


def sample_polygon_mcmc(n: int, burn_in: int | None = None, stride: int | None = None,
                        seed=0) -> Polygon:
    """First state of a fresh fold chain after ``burn_in`` moves."""
    return FoldChain(n, seed, burn_in, stride).sample()


def mcmc_polygons(n: int, count: int, seed, burn_in: int | None = None,
                  stride: int | None = None) -> list[Polygon]:
    chain = FoldChain(n, seed, burn_in, stride)
    return [chain.sample() for _ in range(count)]


# ------------------------------------------------------- conditional sampler

def _table(tables, m: int) -> RadialDensityTable:
    if isinstance(tables, TableSet):
        return tables.get(m)
    try:
        return tables[m]
    except KeyError:
        raise TableMissError(f"no density table for m = {m}") from None


def sample_polygon_conditional(n: int, tables: TableSet | Mapping[int, RadialDensityTable] | None = None,
                               seed=0) -> Polygon:
    """Exact sample from the closed-walk law by sequential conditioning.

    Step ``k`` is drawn with angular density proportional to the planar
    density of the remaining ``n - k`` steps at the new position.  The last
    two steps close the gap; the mirror choice is a fair coin.  The four-step
    law is degenerate (its conditional density at the origin is infinite) and
    is refused.
    """
    if int(n) != n or n < 3:
        raise ValueError("a polygon needs at least 3 steps")
    n = int(n)
    if n == 4:
        raise ValueError("closed 4-step walks have no proper conditional law "
                         "(the 4-step density is infinite at the origin)")
    if tables is None:
        tables = default_tables()
    if isinstance(tables, TableSet):
        tables.ensure_polygon(n)
    rng = as_generator(seed)
    v = np.zeros((n + 1, 2))
    a = TWO_PI * rng.random()
    px, py = math.cos(a), math.sin(a)
    v[1] = px, py
    for k in range(2, n - 2):
        tab = _table(tables, n - k)
        rho = math.hypot(px, py)
        env = tab.max_planar(abs(rho - 1.0), rho + 1.0) * ENVELOPE_MARGIN
        if env <= 0.0:
            raise FloatingPointError(f"density table for m = {n - k} vanishes at |P| = {rho:.6g}")
        while True:
            a = TWO_PI * rng.random()
            cx, cy = px + math.cos(a), py + math.sin(a)
            if rng.random() * env <= tab.planar(math.hypot(cx, cy)):
                break
        px, py = cx, cy
        v[k] = px, py
    if n > 3:
        px, py = _two_step_vertex(rng.random, px, py)
        v[n - 2] = px, py
    v[n - 1] = _closing_vertex(rng.random, px, py)
    return Polygon(v)


def polygon_sampler(name: str):
    """``(n, seed) -> Polygon`` for ``'conditional'`` or ``'mcmc'``."""
    if name == "conditional":
        return lambda n, seed: sample_polygon_conditional(n, None, seed)
    if name == "mcmc":
        return lambda n, seed: sample_polygon_mcmc(n, seed=seed)
    raise ValueError(f"unknown polygon sampler {name!r}")
