"""Pure Python counting kernels; same arithmetic as the compiled ones.

Both kernels take an ``(n+1, 2)`` float array of vertices and a ``closed``
flag.  Segment ``k`` (0-based) joins vertices ``k`` and ``k+1``.  A pair of
segments is admissible when their indices differ by at least 2 and, for
closed polygons, not by ``n - 1``.
"""
from __future__ import annotations

import heapq

import numpy as np

EPS = 1e-12


def _orient(px, py, qx, qy, rx, ry):
    return (qx - px) * (ry - py) - (qy - py) * (rx - px)


def crosses(ax, ay, bx, by, cx, cy, dx, dy) -> bool:
    d1 = _orient(ax, ay, bx, by, cx, cy)
    d2 = _orient(ax, ay, bx, by, dx, dy)
    if not ((d1 > EPS and d2 < -EPS) or (d1 < -EPS and d2 > EPS)):
        return False
    d3 = _orient(cx, cy, dx, dy, ax, ay)
    d4 = _orient(cx, cy, dx, dy, bx, by)
    return (d3 > EPS and d4 < -EPS) or (d3 < -EPS and d4 > EPS)


def admissible_pairs(n: int, closed: bool) -> int:
    if n < 3:
        return 0
    total = (n - 1) * (n - 2) // 2
    return total - 1 if closed else total


def count_naive(v: np.ndarray, closed: bool) -> tuple[int, int]:
    """Return ``(count, pairs_examined)`` over all admissible pairs."""
    v = np.ascontiguousarray(v, dtype=float)
    n = v.shape[0] - 1
    if n < 3:
        return 0, 0
    ax, ay = v[:-1, 0], v[:-1, 1]
    bx, by = v[1:, 0], v[1:, 1]
    count = 0
    pairs = 0
    for k in range(n - 2):
        lo = k + 2
        hi = n - 1 if (closed and k == 0) else n
        if hi <= lo:
            continue
        cx, cy, dx, dy = ax[lo:hi], ay[lo:hi], bx[lo:hi], by[lo:hi]
        d1 = _orient(ax[k], ay[k], bx[k], by[k], cx, cy)
        d2 = _orient(ax[k], ay[k], bx[k], by[k], dx, dy)
        d3 = _orient(cx, cy, dx, dy, ax[k], ay[k])
        d4 = _orient(cx, cy, dx, dy, bx[k], by[k])
        ok = (((d1 > EPS) & (d2 < -EPS)) | ((d1 < -EPS) & (d2 > EPS))) & \
             (((d3 > EPS) & (d4 < -EPS)) | ((d3 < -EPS) & (d4 > EPS)))
        count += int(np.count_nonzero(ok))
        pairs += hi - lo
    return count, pairs


class _Ambiguous(Exception):
    pass


def count_sweep(v: np.ndarray, closed: bool) -> tuple[int, int, bool]:
    """Bentley-Ottmann style sweep.

    Returns ``(count, pairs_examined, ok)``; ``ok`` is false when an event
    ordering could not be decided safely, in which case the count is void.
    """
    v = np.ascontiguousarray(v, dtype=float)
    n = v.shape[0] - 1
    if n < 3:
        return 0, 0, True
    try:
        return _Sweep(v, closed).run() + (True,)
    except _Ambiguous:
        return 0, 0, False


class _Sweep:
    def __init__(self, v: np.ndarray, closed: bool):
        self.n = n = v.shape[0] - 1
        self.closed = closed
        self.xs = xs = v[:, 0].tolist()
        self.ys = ys = v[:, 1].tolist()
        # left end and slope of each segment
        self.lx = [0.0] * n
        self.ly = [0.0] * n
        self.slope = [0.0] * n
        for k in range(n):
            x0, y0, x1, y1 = xs[k], ys[k], xs[k + 1], ys[k + 1]
            if x1 < x0:
                x0, y0, x1, y1 = x1, y1, x0, y0
            self.lx[k], self.ly[k] = x0, y0
            self.slope[k] = (y1 - y0) / (x1 - x0) if x1 - x0 > EPS else 0.0

    def admissible(self, a: int, b: int) -> bool:
        d = abs(a - b)
        return d >= 2 and not (self.closed and d == self.n - 1)

    def y_at(self, k: int, x: float) -> float:
        return self.ly[k] + self.slope[k] * (x - self.lx[k])

    def crossing_x(self, a: int, b: int) -> float:
        xs, ys = self.xs, self.ys
        ax, ay, bx, by = xs[a], ys[a], xs[a + 1], ys[a + 1]
        cx, cy, dx, dy = xs[b], ys[b], xs[b + 1], ys[b + 1]
        o1 = _orient(cx, cy, dx, dy, ax, ay)
        o2 = _orient(cx, cy, dx, dy, bx, by)
        t = o1 / (o1 - o2)
        return ax + t * (bx - ax)

    def check(self, a: int, b: int) -> None:
        if not self.admissible(a, b):
            return
        key = (a, b) if a < b else (b, a)
        if key in self.seen:
            return
        xs, ys = self.xs, self.ys
        self.pairs += 1
        if not crosses(xs[a], ys[a], xs[a + 1], ys[a + 1],
                       xs[b], ys[b], xs[b + 1], ys[b + 1]):
            return
        xc = self.crossing_x(key[0], key[1])
        if xc <= self.cur + EPS:
            raise _Ambiguous
        self.seen.add(key)
        heapq.heappush(self.heap, (xc, 1, key[0], key[1]))

    def run(self) -> tuple[int, int]:
        n, xs, ys = self.n, self.xs, self.ys
        nv = n if self.closed else n + 1
        order = sorted(range(nv), key=xs.__getitem__)
        for p, q in zip(order, order[1:]):
            if xs[q] - xs[p] < EPS:
                raise _Ambiguous
        self.heap = [(xs[p], 0, p, 0) for p in order]
        heapq.heapify(self.heap)
        self.seen = set()
        self.pairs = 0
        self.cur = -np.inf
        st: list[int] = []
        count = 0
        while self.heap:
            x, kind, a, b = heapq.heappop(self.heap)
            if x - self.cur < EPS:
                raise _Ambiguous
            self.cur = x
            if kind == 1:
                i = st.index(a)
                if i + 1 < len(st) and st[i + 1] == b:
                    lo = i
                elif i > 0 and st[i - 1] == b:
                    lo = i - 1
                else:
                    raise _Ambiguous
                st[lo], st[lo + 1] = st[lo + 1], st[lo]
                count += 1
                if lo > 0:
                    self.check(st[lo - 1], st[lo])
                if lo + 2 < len(st):
                    self.check(st[lo + 1], st[lo + 2])
                continue
            p = a
            inc = self.incident(p)
            # removals first, then insertions
            for k in inc:
                if self.lx[k] < x:
                    i = st.index(k)
                    del st[i]
                    if 0 < i < len(st):
                        self.check(st[i - 1], st[i])
            for k in inc:
                if self.lx[k] == x:
                    self.insert(st, k, p, inc)
        return count, self.pairs

    def incident(self, p: int) -> tuple[int, ...]:
        n = self.n
        if self.closed:
            return ((n - 1, 0) if p == 0 else (p - 1, p))
        if p == 0:
            return (0,)
        if p == n:
            return (n - 1,)
        return (p - 1, p)

    def insert(self, st: list[int], k: int, p: int, inc) -> None:
        x, y = self.xs[p], self.ys[p]
        lo, hi = 0, len(st)
        while lo < hi:
            mid = (lo + hi) // 2
            s = st[mid]
            ys = self.y_at(s, x)
            if abs(ys - y) < EPS:
                if s not in inc:
                    raise _Ambiguous
                below = self.slope[k] < self.slope[s]
            else:
                below = y < ys
            if below:
                hi = mid
            else:
                lo = mid + 1
        st.insert(lo, k)
        if lo > 0:
            self.check(st[lo - 1], k)
        if lo + 1 < len(st):
            self.check(k, st[lo + 1])
