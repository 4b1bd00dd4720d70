"""Planar endpoint densities of walks with two, three and four unit steps.

The Kluyver integral does not converge absolutely below five steps, so the
short walks get their own routes:

* two steps: elementary closed form;
* three steps: Gauss hypergeometric closed form (logarithmic at ``r = 1``);
* four steps: one-dimensional convolution of the three-step density with the
  unit circle (logarithmic at ``r = 0``).
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate, special

_EULER_PREFACTOR = 1.0 / (special.gamma(1.0 / 3.0) * special.gamma(2.0 / 3.0))


def planar_density_2(s):
    """``1 / (pi^2 s sqrt(4 - s^2))`` on ``(0, 2)``, zero outside."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 1.0 / (math.pi ** 2 * s * np.sqrt(4.0 - s * s))
    return np.where((s > 0) & (s < 2), val, 0.0)


def radial_density_2(s):
    """``2 / (pi sqrt(4 - s^2))`` on ``(0, 2)``."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 2.0 / (math.pi * np.sqrt(4.0 - s * s))
    return np.where((s >= 0) & (s < 2), val, 0.0)


def _hyp_third(z: float, w: float) -> float:
    """``2F1(1/3, 2/3; 1; z)`` for ``0 <= z <= 1``, given ``w = 1 - z`` accurately."""
    if w > 0.05:
        return float(special.hyp2f1(1.0 / 3.0, 2.0 / 3.0, 1.0, z))
    if w <= 0.0:
        return math.inf
    # logarithmic case c = a + b of the connection formula around z = 1
    a, b = 1.0 / 3.0, 2.0 / 3.0
    log_w = math.log(w)
    total = 0.0
    coef = 1.0
    for k in range(40):
        if k:
            coef *= (a + k - 1) * (b + k - 1) / (k * k) * w
        total += coef * (2 * special.digamma(k + 1) - special.digamma(a + k)
                         - special.digamma(b + k) - log_w)
        if abs(coef) < 1e-18:
            break
    return _EULER_PREFACTOR * total


def planar_density_3(r: float) -> float:
    if r < 0 or r >= 3:
        return 0.0
    r2 = r * r
    cube = (3.0 + r2) ** 3
    z = r2 * (9.0 - r2) ** 2 / cube
    w = 27.0 * (1.0 - r2) ** 2 / cube
    return math.sqrt(3.0) / (math.pi ** 2 * (3.0 + r2)) * _hyp_third(z, w)


def _ring_average(inner, r: float, top: float, log_points: tuple[float, ...]) -> float:
    """``(1/pi) int_0^pi inner(|r e + u(t)|) dt`` rewritten over ``s = |r e + u|``.

    ``inner`` vanishes beyond ``top``; ``log_points`` are interior log
    singularities of ``inner``.
    """
    lo = abs(r - 1.0)
    if any(abs(lo - p) < 1e-12 for p in log_points):
        # move the singularity off the endpoint; the density is continuous here
        r -= 1e-8
        lo = abs(r - 1.0)
    up = r + 1.0
    hi = min(up, top)
    if hi <= lo:
        return 0.0

    def smooth(s):
        v = inner(s)
        if s + lo <= 0.0 or math.isinf(v):
            # endpoint sample exactly on a log singularity (measure zero)
            return 0.0
        return v * s / math.sqrt((s + lo) * (up + s))

    cuts = [lo] + [p for p in log_points if lo < p < hi] + [hi]
    with warnings.catch_warnings():
        # the log singularity sits at a cut; quad's extrapolation can flag
        # roundoff there while still meeting the tolerance we need
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return 2.0 / math.pi * _ring_pieces(smooth, cuts, lo, up)


def _ring_pieces(smooth, cuts, lo: float, up: float) -> float:
    total = 0.0
    opts = dict(limit=200, epsabs=1e-14, epsrel=1e-11)
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (a + b)
        # left half
        if a == lo:
            f = (lambda s: smooth(s) / math.sqrt(up - s)) if b < up else smooth
            v, _ = integrate.quad(f, a, mid, weight="alg", wvar=(-0.5, 0.0), **opts)
        else:
            v, _ = integrate.quad(lambda s: smooth(s) / math.sqrt((s - lo) * (up - s)), a, mid, **opts)
        total += v
        # right half
        if b == up:
            v, _ = integrate.quad(lambda s: smooth(s) / math.sqrt(s - lo), mid, b,
                                  weight="alg", wvar=(0.0, -0.5), **opts)
        else:
            v, _ = integrate.quad(lambda s: smooth(s) / math.sqrt((s - lo) * (up - s)), mid, b, **opts)
        total += v
    return total


def planar_density_4(r: float) -> float:
    if r <= 0:
        return math.inf
    if r >= 4:
        return 0.0
    return _ring_average(planar_density_3, r, 3.0, (1.0,))


def cell_average(func, a: float, b: float, singular: tuple[float, ...] = ()) -> float:
    """Mean of ``func`` over ``[a, b]``; used for table cells holding a log singularity."""
    pts = [p for p in singular if a < p < b]
    v, _ = integrate.quad(func, max(a, 0.0), b, points=pts or None, limit=200,
                          epsabs=1e-12, epsrel=1e-9)
    return v / (b - max(a, 0.0))
