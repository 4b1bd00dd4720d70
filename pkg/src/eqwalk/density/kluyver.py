"""Kluyver integrals for the planar equilateral random walk.

For an ``n``-step walk with unit steps the endpoint distance ``R`` has

* distribution ``F(r) = r * int_0^inf J1(r x) J0(x)**n dx``
* radial density ``f(r) = r * int_0^inf J0(r x) J0(x)**n x dx``
* planar density ``q(r) = f(r) / (2 pi r) = (1/2pi) int_0^inf J0(r x) J0(x)**n x dx``

The integrals are evaluated on composite Gauss-Legendre panels.  Two regimes:

``n >= CERTIFIED_MIN``
    The integral is truncated at the point where the envelope
    ``|J0(x)| <= min(1, sqrt(2/(pi x)))`` bounds the remaining tail by
    ``TAIL_TOL``.
``5 <= n < CERTIFIED_MIN``
    The tail decays too slowly for truncation (as ``1/X`` for ``n = 5``).
    The integrand is multiplied by a C-infinity cutoff that switches off on
    ``[X/2, X]``; oscillating parts of the tail are suppressed
    super-algebraically.  Components of the Hankel expansion whose frequency
    is close to zero (``r`` near an integer of the parity of ``n``) are added
    back analytically, and a final Richardson step in ``X`` removes the
    next-order remainder.
"""
from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np

from .bessel import bessel_j0, bessel_j1

CERTIFIED_MIN = 14
TAIL_TOL = 1e-13
MIN_STEPS = 5

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_TWO_PI = 2.0 * math.pi


def _panels(a: float, b: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    count = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, count + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    return (mid[:, None] + half[:, None] * _GL_X).ravel(), (half[:, None] * _GL_W).ravel()


def certified_cutoff(n: int, tol: float = TAIL_TOL) -> float:
    """Smallest X with ``int_X^inf x |J0(x)|**n dx <= tol`` by the envelope bound."""
    if n <= 4:
        raise ValueError("envelope tail bound needs n > 4")
    s = n / 2.0 - 2.0
    # (2/pi)**(n/2) * X**(-s) / s <= tol
    log_x = ((n / 2.0) * math.log(2.0 / math.pi) - math.log(s) - math.log(tol)) / s
    return max(math.exp(log_x), 2.5)


def _long_cutoff(n: int) -> float:
    return 1000.0 if n <= 7 else 300.0


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity switch: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def _window(x: np.ndarray, big_x: float) -> np.ndarray:
    return 1.0 - _smooth_step((x - 0.5 * big_x) / (0.5 * big_x))


def _tail_closed(big_x: float, p: float, omega: float, phase: float) -> float:
    """``int_X^inf x**-p cos(omega x + phase) dx``."""
    if omega == 0.0:
        return math.cos(phase) * big_x ** (1.0 - p) / (p - 1.0)
    z = complex(0.0, -omega * big_x)
    val = mpmath.expint(p, z) * mpmath.exp(1j * phase) * big_x ** (1.0 - p)
    return float(mpmath.re(val))


_RESONANCE_BAND = 80.0


def _resonant_correction(n: int, r: float, big_x: float, order: int) -> float:
    """Leading-order tail lost to the cutoff window, near-resonant components only.

    ``order`` 0 is the density integrand ``x J0(rx) J0(x)^n``; order 1 is the
    distribution integrand ``J1(rx) J0(x)^n``.
    """
    if r * big_x < 2 * _RESONANCE_BAND:
        if order == 0 and n % 2 == 0:
            return _slow_bessel_correction(n, r, big_x)
        return 0.0
    if order == 0:
        p = (n - 1) / 2.0
        base_phase = -math.pi / 4.0
    else:
        p = (n + 1) / 2.0
        base_phase = -3.0 * math.pi / 4.0
    amp = (2.0 / math.pi) ** ((n + 1) / 2.0) / math.sqrt(r) / 2.0 ** n
    xs, ws = _panels(0.5 * big_x, big_x, 2.0)
    lost = 1.0 - _window(xs, big_x)
    total = 0.0
    for j in range(n + 1):
        k = n - 2 * j
        omega = r - k
        if abs(omega) * big_x > _RESONANCE_BAND:
            continue
        # cos(r x + base) * cos(k (x - pi/4)) folded over +-k
        phase = base_phase + k * math.pi / 4.0
        c = amp * math.comb(n, j)
        inner = np.sum(ws * lost * xs ** (-p) * np.cos(omega * xs + phase))
        total += c * (inner + _tail_closed(big_x, p, omega, phase))
    return total


def _power_bessel_tail(s: float, a: float) -> float:
    """``int_a^inf t**-s J0(t) dt`` for ``s > 1``."""
    far = a + 400.0
    ts, ws = _panels(a, far, 0.5)
    head = float(np.sum(ws * ts ** (-s) * bessel_j0(ts)))
    # J0(t) ~ sqrt(2/(pi t)) (cos(t - pi/4) + sin(t - pi/4) / (8 t))
    c = math.sqrt(2.0 / math.pi)
    tail = c * (_tail_closed(far, s + 0.5, 1.0, -math.pi / 4.0)
                + _tail_closed(far, s + 1.5, 1.0, -3.0 * math.pi / 4.0) / 8.0)
    return head + tail


def _slow_bessel_correction(n: int, r: float, big_x: float) -> float:
    """Even-n zero-frequency tail when ``J0(r x)`` is still far from asymptotic."""
    s = n / 2.0 - 1.0
    amp = (2.0 / math.pi) ** (n / 2.0) * math.comb(n, n // 2) / 2.0 ** n
    xs, ws = _panels(0.5 * big_x, big_x, 2.0)
    lost = 1.0 - _window(xs, big_x)
    inner = np.sum(ws * lost * xs ** (-s) * bessel_j0(r * xs))
    if r == 0.0:
        tail = big_x ** (1.0 - s) / (s - 1.0)
    else:
        tail = r ** (s - 1.0) * _power_bessel_tail(s, r * big_x)
    return amp * (inner + tail)


def _integrand_values(n: int, r: np.ndarray, x: np.ndarray, order: int) -> np.ndarray:
    jn = bessel_j0(x) ** n
    rx = np.multiply.outer(r, x)
    if order == 0:
        return bessel_j0(rx) * (jn * x)
    return bessel_j1(rx) * jn


def _kluyver_core(n: int, r: np.ndarray, order: int) -> np.ndarray:
    """``int_0^inf K(r x) J0(x)**n x**(1-order) dx`` for K = J0 (order 0) or J1."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty_like(r)
    rmax = float(r.max()) if r.size else 0.0
    width = min(0.5, 6.0 / (rmax + min(n, 20) + 1.0), 1.0 / math.sqrt(n))
    chunk = 256
    if n >= CERTIFIED_MIN:
        x, w = _panels(0.0, certified_cutoff(n), width)
        for s in range(0, r.size, chunk):
            vals = _integrand_values(n, r[s:s + chunk], x, order)
            out[s:s + chunk] = vals @ w
        return out

    big_x = _long_cutoff(n)
    x, w = _panels(0.0, 2.0 * big_x, width)
    w1 = w * _window(x, big_x)
    w2 = w * _window(x, 2.0 * big_x)
    expo = (n - 1) / 2.0 if order == 0 else (n + 1) / 2.0
    for s in range(0, r.size, chunk):
        rs = r[s:s + chunk]
        vals = _integrand_values(n, rs, x, order)
        i1 = vals @ w1
        i2 = vals @ w2
        for idx, rv in enumerate(rs):
            i1[idx] += _resonant_correction(n, rv, big_x, order)
            i2[idx] += _resonant_correction(n, rv, 2.0 * big_x, order)
        e = expo
        if order == 0 and n % 2 == 0:
            # next-order remainder of the slow zero-frequency component
            e = np.where(rs * big_x < 2 * _RESONANCE_BAND, (n - 2) / 2.0, expo)
        fac = 2.0 ** e
        out[s:s + chunk] = (fac * i2 - i1) / (fac - 1.0)
    return out


def _check_n(n: int) -> None:
    if int(n) != n or n < MIN_STEPS:
        raise ValueError(f"Kluyver integrals need an integer n >= {MIN_STEPS}, got {n!r}")


def _as_output(r, values):
    return float(values[0]) if np.ndim(r) == 0 else values.reshape(np.shape(r))


def kluyver_planar_density(n: int, r):
    """Planar density of the endpoint of an ``n``-step walk at distance ``r``."""
    _check_n(n)
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    vals = np.zeros_like(rr)
    inside = rr <= n
    if inside.any():
        vals[inside] = _kluyver_core(n, rr[inside], 0) / _TWO_PI
    return _as_output(r, vals)


def kluyver_radial_density(n: int, r):
    """Radial density of ``|X_n|``."""
    rr = np.asarray(r, dtype=float)
    return _as_output(r, np.atleast_1d(_TWO_PI * rr * kluyver_planar_density(n, rr)))


def kluyver_radial_cdf(n: int, r):
    """Distribution function of ``|X_n|``."""
    _check_n(n)
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    vals = np.ones_like(rr)
    inside = rr < n
    if inside.any():
        vals[inside] = rr[inside] * _kluyver_core(n, rr[inside], 1)
    vals[rr <= 0] = 0.0
    return _as_output(r, vals)


def gaussian_planar_density(n: float, r):
    """Planar n-Gaussian density ``exp(-r^2/n) / (pi n)``."""
    if n <= 0:
        raise ValueError("n must be positive")
    return np.exp(-np.square(r) / n) / (math.pi * n)


@lru_cache(maxsize=None)
def quasi_gaussian_error(n: int, step: float = 0.01) -> float:
    """Sup-norm gap between the planar walk density and the n-Gaussian density."""
    _check_n(n)
    top = min(float(n), 6.0 * math.sqrt(n))
    r = np.arange(0.0, top + 0.5 * step, step)
    diff = kluyver_planar_density(n, r) - gaussian_planar_density(n, r)
    return float(np.max(np.abs(diff)))
