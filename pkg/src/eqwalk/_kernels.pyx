# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled counting kernels; decisions match eqwalk._fallback exactly."""
import numpy as np

from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memmove
from libcpp.unordered_set cimport unordered_set

cdef double EPS = 1e-12


cdef inline double orient(double px, double py, double qx, double qy,
                          double rx, double ry) noexcept nogil:
    return (qx - px) * (ry - py) - (qy - py) * (rx - px)


cdef inline bint crosses(double ax, double ay, double bx, double by,
                         double cx, double cy, double dx, double dy) noexcept nogil:
    cdef double d1 = orient(ax, ay, bx, by, cx, cy)
    cdef double d2 = orient(ax, ay, bx, by, dx, dy)
    if not ((d1 > EPS and d2 < -EPS) or (d1 < -EPS and d2 > EPS)):
        return False
    cdef double d3 = orient(cx, cy, dx, dy, ax, ay)
    cdef double d4 = orient(cx, cy, dx, dy, bx, by)
    return (d3 > EPS and d4 < -EPS) or (d3 < -EPS and d4 > EPS)


def count_naive(const double[:, ::1] v, bint closed):
    """Return ``(count, pairs_examined)`` over all admissible pairs."""
    cdef Py_ssize_t n = v.shape[0] - 1
    cdef Py_ssize_t k, l, hi
    cdef long long count = 0, pairs = 0
    cdef double ax, ay, bx, by
    if n < 3:
        return 0, 0
    with nogil:
        for k in range(n - 2):
            ax = v[k, 0]; ay = v[k, 1]; bx = v[k + 1, 0]; by = v[k + 1, 1]
            hi = n - 1 if (closed and k == 0) else n
            for l in range(k + 2, hi):
                pairs += 1
                if crosses(ax, ay, bx, by, v[l, 0], v[l, 1], v[l + 1, 0], v[l + 1, 1]):
                    count += 1
    return count, pairs


cdef struct Event:
    double x
    int a
    int b


cdef struct Heap:
    Event* data
    Py_ssize_t size
    Py_ssize_t cap


cdef inline bint ev_less(Event* e, Event* f) noexcept nogil:
    if e.x != f.x:
        return e.x < f.x
    if e.a != f.a:
        return e.a < f.a
    return e.b < f.b


cdef int heap_push(Heap* h, double x, int a, int b) noexcept nogil:
    cdef Event* grown
    cdef Py_ssize_t i, parent
    cdef Event tmp
    if h.size == h.cap:
        grown = <Event*> realloc(h.data, 2 * h.cap * sizeof(Event))
        if grown == NULL:
            return -1
        h.data = grown
        h.cap *= 2
    i = h.size
    h.data[i].x = x
    h.data[i].a = a
    h.data[i].b = b
    h.size += 1
    while i > 0:
        parent = (i - 1) // 2
        if ev_less(&h.data[i], &h.data[parent]):
            tmp = h.data[i]; h.data[i] = h.data[parent]; h.data[parent] = tmp
            i = parent
        else:
            break
    return 0


cdef Event heap_pop(Heap* h) noexcept nogil:
    cdef Event top = h.data[0]
    cdef Py_ssize_t i = 0, c, m
    cdef Event tmp
    h.size -= 1
    h.data[0] = h.data[h.size]
    while True:
        c = 2 * i + 1
        if c >= h.size:
            break
        m = c
        if c + 1 < h.size and ev_less(&h.data[c + 1], &h.data[c]):
            m = c + 1
        if ev_less(&h.data[m], &h.data[i]):
            tmp = h.data[i]; h.data[i] = h.data[m]; h.data[m] = tmp
            i = m
        else:
            break
    return top


cdef struct Sweep:
    const double* xs
    const double* ys
    double* lx
    double* ly
    double* slope
    int* st
    int* pos
    int size
    int n
    bint closed
    double cur
    long long pairs
    Heap heap
    unordered_set[long long]* seen


cdef inline double y_at(Sweep* s, int k, double x) noexcept nogil:
    return s.ly[k] + s.slope[k] * (x - s.lx[k])


# return codes: 0 fine, 1 ambiguous, -1 out of memory
cdef int check(Sweep* s, int a, int b) noexcept nogil:
    cdef int d = a - b if a > b else b - a
    cdef int lo, hi
    cdef long long key
    cdef double o1, o2, t, xc
    if d < 2 or (s.closed and d == s.n - 1):
        return 0
    lo = a if a < b else b
    hi = b if a < b else a
    key = <long long> lo * s.n + hi
    if s.seen.count(key):
        return 0
    s.pairs += 1
    if not crosses(s.xs[a], s.ys[a], s.xs[a + 1], s.ys[a + 1],
                   s.xs[b], s.ys[b], s.xs[b + 1], s.ys[b + 1]):
        return 0
    o1 = orient(s.xs[hi], s.ys[hi], s.xs[hi + 1], s.ys[hi + 1], s.xs[lo], s.ys[lo])
    o2 = orient(s.xs[hi], s.ys[hi], s.xs[hi + 1], s.ys[hi + 1], s.xs[lo + 1], s.ys[lo + 1])
    t = o1 / (o1 - o2)
    xc = s.xs[lo] + t * (s.xs[lo + 1] - s.xs[lo])
    if xc <= s.cur + EPS:
        return 1
    s.seen.insert(key)
    return heap_push(&s.heap, xc, lo, hi)


cdef inline void set_pos(Sweep* s, int from_i) noexcept nogil:
    cdef int i
    for i in range(from_i, s.size):
        s.pos[s.st[i]] = i


cdef int remove_seg(Sweep* s, int k) noexcept nogil:
    cdef int i = s.pos[k]
    memmove(&s.st[i], &s.st[i + 1], (s.size - i - 1) * sizeof(int))
    s.size -= 1
    s.pos[k] = -1
    set_pos(s, i)
    if 0 < i < s.size:
        return check(s, s.st[i - 1], s.st[i])
    return 0


cdef int insert_seg(Sweep* s, int k, int p, int inc0, int inc1) noexcept nogil:
    cdef double x = s.xs[p], y = s.ys[p], yv
    cdef int lo = 0, hi = s.size, mid, other, rc
    cdef bint below
    while lo < hi:
        mid = (lo + hi) // 2
        other = s.st[mid]
        yv = y_at(s, other, x)
        if (yv - y if yv > y else y - yv) < EPS:
            if other != inc0 and other != inc1:
                return 1
            below = s.slope[k] < s.slope[other]
        else:
            below = y < yv
        if below:
            hi = mid
        else:
            lo = mid + 1
    memmove(&s.st[lo + 1], &s.st[lo], (s.size - lo) * sizeof(int))
    s.st[lo] = k
    s.size += 1
    set_pos(s, lo)
    if lo > 0:
        rc = check(s, s.st[lo - 1], k)
        if rc:
            return rc
    if lo + 1 < s.size:
        return check(s, k, s.st[lo + 1])
    return 0


cdef int run_sweep(Sweep* s, const long* order, int nv, long long* count) noexcept nogil:
    cdef int vi = 0, rc = 0, p, i, lo, j, k
    cdef int inc[2]
    cdef int ninc
    cdef double x
    cdef Event e
    cdef bint take_vertex
    while vi < nv or s.heap.size > 0:
        if vi < nv and s.heap.size > 0:
            take_vertex = s.xs[order[vi]] <= s.heap.data[0].x
        else:
            take_vertex = vi < nv
        if take_vertex:
            p = order[vi]
            vi += 1
            x = s.xs[p]
        else:
            e = heap_pop(&s.heap)
            x = e.x
        if x - s.cur < EPS:
            return 1
        s.cur = x
        if not take_vertex:
            i = s.pos[e.a]
            if i + 1 < s.size and s.st[i + 1] == e.b:
                lo = i
            elif i > 0 and s.st[i - 1] == e.b:
                lo = i - 1
            else:
                return 1
            j = s.st[lo]; s.st[lo] = s.st[lo + 1]; s.st[lo + 1] = j
            s.pos[s.st[lo]] = lo
            s.pos[s.st[lo + 1]] = lo + 1
            count[0] += 1
            if lo > 0:
                rc = check(s, s.st[lo - 1], s.st[lo])
                if rc:
                    return rc
            if lo + 2 < s.size:
                rc = check(s, s.st[lo + 1], s.st[lo + 2])
                if rc:
                    return rc
            continue
        if s.closed:
            if p == 0:
                inc[0] = s.n - 1; inc[1] = 0
            else:
                inc[0] = p - 1; inc[1] = p
            ninc = 2
        elif p == 0:
            inc[0] = 0; inc[1] = -1; ninc = 1
        elif p == s.n:
            inc[0] = s.n - 1; inc[1] = -1; ninc = 1
        else:
            inc[0] = p - 1; inc[1] = p; ninc = 2
        for j in range(ninc):
            k = inc[j]
            if s.lx[k] < x:
                rc = remove_seg(s, k)
                if rc:
                    return rc
        for j in range(ninc):
            k = inc[j]
            if s.lx[k] == x:
                rc = insert_seg(s, k, p, inc[0], inc[1])
                if rc:
                    return rc
    return 0


def count_sweep(const double[:, ::1] v, bint closed):
    """Return ``(count, pairs_examined, ok)``; see eqwalk._fallback.count_sweep."""
    cdef int n = v.shape[0] - 1
    cdef int nv, k
    cdef double x0, y0, x1, y1
    cdef long long count = 0
    cdef int rc
    cdef Sweep s
    if n < 3:
        return 0, 0, True
    nv = n if closed else n + 1
    xs = np.ascontiguousarray(v[:, 0])
    ys = np.ascontiguousarray(v[:, 1])
    cdef const double[::1] xv = xs
    cdef const double[::1] yv = ys
    order_arr = np.argsort(xs[:nv], kind="stable").astype(np.int_)
    cdef const long[::1] order = order_arr
    cdef Py_ssize_t q
    for q in range(nv - 1):
        if xv[order[q + 1]] - xv[order[q]] < EPS:
            return 0, 0, False

    s.xs = &xv[0]
    s.ys = &yv[0]
    s.n = n
    s.closed = closed
    s.cur = -np.inf
    s.pairs = 0
    s.size = 0
    s.lx = <double*> malloc(n * sizeof(double))
    s.ly = <double*> malloc(n * sizeof(double))
    s.slope = <double*> malloc(n * sizeof(double))
    s.st = <int*> malloc(n * sizeof(int))
    s.pos = <int*> malloc(n * sizeof(int))
    s.heap.cap = 64
    s.heap.size = 0
    s.heap.data = <Event*> malloc(s.heap.cap * sizeof(Event))
    s.seen = new unordered_set[long long]()
    try:
        if (s.lx == NULL or s.ly == NULL or s.slope == NULL or s.st == NULL
                or s.pos == NULL or s.heap.data == NULL):
            raise MemoryError()
        for k in range(n):
            x0 = xv[k]; y0 = yv[k]; x1 = xv[k + 1]; y1 = yv[k + 1]
            if x1 < x0:
                x0, y0, x1, y1 = x1, y1, x0, y0
            s.lx[k] = x0
            s.ly[k] = y0
            s.slope[k] = (y1 - y0) / (x1 - x0) if x1 - x0 > EPS else 0.0
            s.pos[k] = -1
        with nogil:
            rc = run_sweep(&s, &order[0], nv, &count)
        if rc < 0:
            raise MemoryError()
        if rc:
            return 0, 0, False
        return count, s.pairs, True
    finally:
        free(s.lx); free(s.ly); free(s.slope); free(s.st); free(s.pos)
        free(s.heap.data)
        del s.seen
