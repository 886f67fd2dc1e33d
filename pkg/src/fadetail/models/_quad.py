"""Quadrature helpers shared by the models without closed-form CDFs."""

from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np
from scipy import integrate

from .base import CdfEstimate, QuadratureError


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(f, a: float, b: float, n: int) -> float:
    x, w = _gauss_legendre(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    vals = np.array([f(mid + half * xi) for xi in x])
    return half * math.fsum(w * vals)


def adaptive_gauss_legendre(f, a: float, b: float, *, rtol: float = 1e-13,
                            n0: int = 16, nmax: int = 1024) -> tuple[float, float]:
    """Double the Gauss-Legendre order until two successive sums agree."""
    prev = gauss_legendre(f, a, b, n0)
    n = n0
    while n < nmax:
        n *= 2
        cur = gauss_legendre(f, a, b, n)
        err = abs(cur - prev)
        if err <= rtol * abs(cur) or cur == 0.0:
            return cur, err
        prev = cur
    raise QuadratureError(f"Gauss-Legendre did not converge with {nmax} nodes", cur, err)


def quad_cdf(f, a: float, b: float, *, points=None, method: str = "quadrature") -> CdfEstimate:
    """Integrate a density with QUADPACK; absolute target min(1e-15, 1e-3 * result)."""
    if b <= a:
        return CdfEstimate(0.0, 0.0, method)
    pts = None
    if points:
        pts = sorted(p for p in points if a < p < b) or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, points=pts, limit=400, epsabs=0.0, epsrel=1e-11)
    val = min(max(val, 0.0), 1.0)
    est = CdfEstimate(val, err, method)
    if not est.converged:
        raise QuadratureError("quadrature did not converge", val, err)
    return est
