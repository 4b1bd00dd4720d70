"""Proper segment crossings and self-intersection counts of polylines.

Segment ``k`` (1-based) joins ``X_{k-1}`` and ``X_k``.  Segments ``k < l``
form an admissible pair when ``l - k >= 2``; for a closed polygon the pair
``(1, n)`` is also skipped since those two share ``X_0 = X_n``.

The kernels come from the compiled extension when it is importable and from
``eqwalk._fallback`` otherwise; both make identical decisions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _fallback
from ._fallback import EPS
from .sampler import Point, Polygon, Walk

try:
    from . import _kernels as _backend
    BACKEND = "compiled"
except ImportError:  # pragma: no cover - exercised when the extension is absent
    _backend = _fallback
    BACKEND = "python"


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point
    index: int

    def __post_init__(self):
        if self.a.x == self.b.x and self.a.y == self.b.y:
            raise ValueError("segment has zero length")


@dataclass(frozen=True)
class CountResult:
    count: int
    pairs_examined: int
    method: str
    fallback: bool = False

    def __post_init__(self):
        if self.method not in ("naive", "sweep"):
            raise ValueError(f"unknown counting method {self.method!r}")
        if not 0 <= self.count <= self.pairs_examined:
            raise ValueError("count must lie in [0, pairs_examined]")


def segments_properly_intersect(s: Segment, t: Segment) -> bool:
    """True iff the open segments cross; touching and overlap do not count."""
    return _fallback.crosses(s.a.x, s.a.y, s.b.x, s.b.y, t.a.x, t.a.y, t.b.x, t.b.y)


def segments(w: Walk) -> list[Segment]:
    pts = w.points()
    return [Segment(pts[k - 1], pts[k], k) for k in range(1, len(pts))]


def _unpack(w, closed: bool | None) -> tuple[np.ndarray, bool]:
    if isinstance(w, Walk):
        v = w.vertices
        closed = isinstance(w, Polygon) if closed is None else closed
    else:
        v = np.asarray(w, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise ValueError("vertices must be an (n+1, 2) array with n >= 1")
        closed = bool(closed)
    return np.ascontiguousarray(v, dtype=float), closed


def count_self_intersections_naive(w, closed: bool | None = None, backend=None) -> CountResult:
    """Check every admissible pair.

    ``w`` is a Walk/Polygon or a raw vertex array (then ``closed`` says which).
    """
    v, closed = _unpack(w, closed)
    count, pairs = (backend or _backend).count_naive(v, closed)
    return CountResult(int(count), int(pairs), "naive")


def count_self_intersections_sweep(w, closed: bool | None = None, backend=None) -> CountResult:
    """Sweep-line count; falls back to the naive count on ambiguous event order."""
    v, closed = _unpack(w, closed)
    be = backend or _backend
    count, pairs, ok = be.count_sweep(v, closed)
    if ok:
        return CountResult(int(count), int(pairs), "sweep")
    count, pairs = be.count_naive(v, closed)
    return CountResult(int(count), int(pairs), "naive", fallback=True)


COUNTERS = {
    "naive": count_self_intersections_naive,
    "sweep": count_self_intersections_sweep,
}


def count_self_intersections(w, method: str = "sweep", closed: bool | None = None) -> CountResult:
    try:
        fn = COUNTERS[method]
    except KeyError:
        raise ValueError(f"unknown counter {method!r}") from None
    return fn(w, closed)
