"""Crossing geometry of two unit segments hanging off a chord.

The chord ``Q`` runs from the origin to ``(r, 0)``.  Segment ``S`` leaves the
origin at angle ``psi`` (counterclockwise from ``Q``); segment ``T`` leaves
``(r, 0)`` at angle ``phi`` measured clockwise from the direction back along
``Q``, i.e. with direction ``pi - phi``.  For ``psi, phi`` of the same sign the
three pieces form a triangle once ``r`` is small enough, and the law of sines
gives the largest such ``r``:

    rho(psi, phi) = sin(psi + phi) / max(sin psi, sin phi)   (0 < psi + phi < pi)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._fallback import EPS, crosses
from .rng import as_generator

TWO_OVER_PI2 = 2.0 / math.pi ** 2


@dataclass(frozen=True)
class IntersectionGeometry:
    r: float
    psi: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.r <= 2.0:
            raise ValueError(f"r must lie in [0, 2], got {self.r!r}")
        for name in ("psi", "phi"):
            v = getattr(self, name)
            if not -math.pi < v < math.pi:
                raise ValueError(f"{name} must lie in (-pi, pi), got {v!r}")

    def segments(self):
        """End points ``(S0, S1, T0, T1)`` with the chord along the x axis."""
        s1 = (math.cos(self.psi), math.sin(self.psi))
        t1 = (self.r - math.cos(self.phi), math.sin(self.phi))
        return (0.0, 0.0), s1, (self.r, 0.0), t1


def rho(psi: float, phi: float) -> float:
    """Critical chord length below which ``S`` and ``T`` cross."""
    if psi < 0.0 and phi < 0.0:
        psi, phi = -psi, -phi
    if not (psi > 0.0 and phi > 0.0):
        return 0.0
    total = psi + phi
    if total >= math.pi:
        return 0.0
    value = math.sin(total) / max(math.sin(psi), math.sin(phi))
    return min(max(value, 0.0), 2.0)


def indicator(g: IntersectionGeometry) -> bool:
    """Whether ``S`` and ``T`` cross, decided by the segment predicate."""
    (ax, ay), (bx, by), (cx, cy), (dx, dy) = g.segments()
    return crosses(ax, ay, bx, by, cx, cy, dx, dy)


def crosses_array(ax, ay, bx, by, cx, cy, dx, dy) -> np.ndarray:
    """Vectorised proper-crossing predicate (same arithmetic as the scalar one)."""
    d1 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    d2 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
    d3 = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
    d4 = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
    return ((((d1 > EPS) & (d2 < -EPS)) | ((d1 < -EPS) & (d2 > EPS)))
            & (((d3 > EPS) & (d4 < -EPS)) | ((d3 < -EPS) & (d4 > EPS))))


def inner_integral(psi: float) -> float:
    """``int_psi^{pi-psi} sin^2(phi+psi) / sin^2(phi) dphi`` in closed form."""
    if not 0.0 <= psi <= math.pi / 2:
        raise ValueError("psi must lie in [0, pi/2]")
    return (math.pi - 2.0 * psi) * math.cos(2.0 * psi) + math.sin(2.0 * psi)


def inner_integral_quadrature(psi: float, tol: float = 1e-12) -> float:
    if not 0.0 <= psi <= math.pi / 2:
        raise ValueError("psi must lie in [0, pi/2]")
    if psi == math.pi / 2:
        return 0.0

    def f(phi):
        return (math.sin(phi + psi) / math.sin(phi)) ** 2

    v, _ = integrate.quad(f, psi, math.pi - psi, epsabs=tol, epsrel=tol, limit=200)
    return v


def triple_integral_J(tol: float = 1e-10) -> float:
    """``J = 2 int_0^{pi/2} inner(psi) dpsi``; equals 4."""
    if tol < 1e-10:
        raise ValueError("tol must be >= 1e-10")
    v, err = integrate.quad(inner_integral, 0.0, math.pi / 2,
                            epsabs=tol / 10.0, epsrel=0.0, limit=200)
    return 2.0 * v


def triple_integral_J_rho(tol: float = 1e-9) -> float:
    """``J = (1/2) int int rho(psi, phi)^2`` over the full square, folded by symmetry."""
    # the same-sign quadrants contribute equally; inside (0, pi)^2 rho
    # vanishes above the anti-diagonal and is symmetric about the diagonal
    def inner(psi):
        def g(phi):
            return rho(psi, phi) ** 2
        v, _ = integrate.quad(g, psi, math.pi - psi, epsabs=tol / 10, epsrel=tol / 10, limit=200)
        return v
    v, _ = integrate.quad(inner, 0.0, math.pi / 2, epsabs=tol / 10, epsrel=tol / 10, limit=200)
    return 2.0 * v


def triple_integral_J_monte_carlo(samples: int, seed, chunk: int = 1_000_000) -> tuple[float, float]:
    """Estimate of ``int int int I(r, psi, phi) r`` over ``[0,2] x (-pi,pi)^2`` and its standard error."""
    rng = as_generator(seed)
    volume = 2.0 * (2.0 * math.pi) ** 2
    s1 = 0.0
    s2 = 0.0
    left = samples
    while left > 0:
        k = min(chunk, left)
        u = rng.random((k, 3))
        r = 2.0 * u[:, 0]
        psi = math.pi * (2.0 * u[:, 1] - 1.0)
        phi = math.pi * (2.0 * u[:, 2] - 1.0)
        hit = crosses_array(0.0, 0.0, np.cos(psi), np.sin(psi),
                            r, 0.0, r - np.cos(phi), np.sin(phi))
        x = np.where(hit, r, 0.0) * volume
        s1 += float(x.sum())
        s2 += float((x * x).sum())
        left -= k
    mean = s1 / samples
    var = (s2 - samples * mean * mean) / (samples - 1)
    return mean, math.sqrt(var / samples)


def predicted_pair_probability(m: int) -> float:
    """Leading term ``2 / (pi^2 m)`` of the crossing probability across ``m`` steps."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return TWO_OVER_PI2 / m


def parallel_sum(v: float, w: float) -> float:
    """Harmonic composition ``v w / (v + w)``."""
    if v <= 0 or w <= 0:
        raise ValueError("parallel_sum needs positive arguments")
    return v * w / (v + w)


def predicted_mean(n: int) -> float:
    """Leading term ``(2/pi^2) n ln n`` of the expected crossing count."""
    if n < 3:
        raise ValueError("n must be >= 3")
    return TWO_OVER_PI2 * n * math.log(n)
