"""Channels built from a few specular waves: two-wave, three-wave and TWDP."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .. import specfun
from ._quad import adaptive_gauss_legendre, quad_cdf
from .base import (
    CdfEstimate,
    ChannelModel,
    DomainError,
    PowerLawTail,
    UnsupportedModelError,
    _nonneg,
    _positive,
    phi_target,
)

SQRT2_OVER_PI = math.sqrt(2.0) / math.pi
_K_ARG_MAX = 1.0 - 2.0 ** -52


def delta_ratio(rho1: float, rho2: float) -> float:
    """Peak-to-average ratio of two specular powers, 2 rho1 rho2 / (rho1^2 + rho2^2)."""
    if not (rho1 > 0 and rho2 > 0):
        raise DomainError(f"amplitudes must be > 0, got ({rho1}, {rho2})")
    return 2.0 * rho1 * rho2 / (rho1 * rho1 + rho2 * rho2)


@dataclass(frozen=True)
class TwoWave(ChannelModel):
    rho1: float
    rho2: float
    name = "TwoWave"

    def __post_init__(self):
        _positive("rho1", self.rho1)
        _positive("rho2", self.rho2)

    @property
    def delta(self) -> float:
        return delta_ratio(self.rho1, self.rho2)

    def mean_power(self):
        return self.rho1 ** 2 + self.rho2 ** 2

    def support(self):
        A, d = self.mean_power(), self.delta
        return math.sqrt(A * max(0.0, 1.0 - d)), math.sqrt(A * (1.0 + d))

    def _q(self, P_R):
        # P_R* / A, the shifted relative power
        d = self.delta
        p = self.rel(P_R)
        return (p - (1.0 - d)) / d

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        lo, hi = self.support()
        if r < lo or r > hi:
            return 0.0
        A, d = self.mean_power(), self.delta
        disc = d * d - (1.0 - r * r / A) ** 2
        if disc <= 0:
            return math.inf
        return 2.0 * r / (math.pi * A * math.sqrt(disc))

    def cdf_estimate(self, P_R):
        q = self._q(P_R)
        if q <= 0:
            return CdfEstimate(0.0)
        if q >= 2:
            return CdfEstimate(1.0)
        # 1/2 - asin(1 - q)/pi written without cancellation
        return CdfEstimate(2.0 / math.pi * math.asin(math.sqrt(q / 2.0)))

    def power_law(self):
        A, d = self.mean_power(), self.delta
        return PowerLawTail(SQRT2_OVER_PI, 0.5, A, valid_from=A * (1.0 - d) if d < 1 else 0.0)

    def tail_approx(self, P_R):
        q = self._q(P_R)
        if q < 0:
            raise DomainError(
                f"two-wave tail needs P_R >= A(1 - Delta) = {self.power_law().valid_from}, got {P_R}")
        return SQRT2_OVER_PI * math.sqrt(q)

    def log_tail_approx(self, P_R):
        v = self.tail_approx(P_R)
        return math.log(v) if v > 0 else -math.inf

    @staticmethod
    def _phi_q(q):
        return 4.0 / 3.0 / math.sqrt(2.0) * (1.0 + q) * q / (2.0 - q) ** 1.5

    def phi(self, P_R):
        q = self._q(P_R)
        if q < 0 or q >= 2:
            raise DomainError(f"two-wave error function defined for A(1-Delta) <= P_R < A(1+Delta), got {P_R}")
        return self._phi_q(q)

    def validity_bound(self, eta):
        t = phi_target(eta)
        q = optimize.brentq(lambda q: self._phi_q(q) - t, 0.0, 2.0 - 1e-15, xtol=1e-300, rtol=1e-15)
        A, d = self.mean_power(), self.delta
        return A * (d * q + (1.0 - d))

    def local_slope(self, P_R):
        if P_R <= 0:
            raise DomainError(f"local_slope needs P_R > 0, got {P_R}")
        d = self.delta
        p = self.rel(P_R)
        if p <= 1.0 - d:
            raise DomainError("two-wave slope undefined below the support")
        return 0.5 * p / (p - (1.0 - d))

    def invert_tail(self, eps):
        if not 0 < eps < 1:
            raise DomainError(f"eps must be in (0, 1), got {eps}")
        q = (eps / SQRT2_OVER_PI) ** 2
        A, d = self.mean_power(), self.delta
        return A * (d * q + (1.0 - d))

    def sample(self, rng, n):
        ph = rng.uniform(0.0, 2.0 * math.pi, n)
        r1, r2 = self.rho1, self.rho2
        return r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * np.cos(ph)


@dataclass(frozen=True)
class ThreeWave(ChannelModel):
    rho1: float
    rho2: float
    rho3: float
    name = "ThreeWave"

    def __post_init__(self):
        for k in ("rho1", "rho2", "rho3"):
            _positive(k, getattr(self, k))

    @property
    def ordered(self) -> tuple[float, float, float]:
        return tuple(sorted((self.rho1, self.rho2, self.rho3), reverse=True))

    @property
    def delta_rho(self) -> float:
        r1, r2, r3 = self.ordered
        return r1 - (r2 + r3)

    def mean_power(self):
        return self.rho1 ** 2 + self.rho2 ** 2 + self.rho3 ** 2

    def support(self):
        return max(self.delta_rho, 0.0), self.rho1 + self.rho2 + self.rho3

    def delta_r2(self, r: float) -> float:
        """Squared triangle-area quantity Delta_r^2 that switches the density branches."""
        r1, r2, r3 = self.ordered
        return ((r + r1) ** 2 - (r2 - r3) ** 2) * ((r2 + r3) ** 2 - (r - r1) ** 2) / 16.0

    def _switch_points(self):
        # roots of Delta_r^2(r) - rho1 rho2 rho3 r, a quartic in r
        r1, r2, r3 = self.ordered
        prod = r1 * r2 * r3
        P = np.polynomial.Polynomial
        first = P([r1 * r1 - (r2 - r3) ** 2, 2 * r1, 1.0])
        second = P([(r2 + r3) ** 2 - r1 * r1, 2 * r1, -1.0])
        quartic = first * second / 16.0 - P([0.0, prod])
        lo, hi = self.support()
        roots = quartic.roots()
        return sorted(float(z.real) for z in roots if abs(z.imag) < 1e-9 and lo < z.real < hi)

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        lo, hi = self.support()
        if r < lo or r > hi or r == 0:
            return 0.0
        r1, r2, r3 = self.ordered
        prod = r1 * r2 * r3
        d2 = max(self.delta_r2(r), 0.0)
        if d2 <= prod * r:
            m = min(d2 / (prod * r), _K_ARG_MAX)
            return math.sqrt(r) / (math.pi ** 2 * math.sqrt(prod)) * specfun.elliptic_k(m)
        m = min(prod * r / d2, _K_ARG_MAX)
        return r / (math.pi ** 2 * math.sqrt(d2)) * specfun.elliptic_k(m)

    def cdf_estimate(self, P_R):
        self.rel(P_R)
        lo, hi = self.support()
        r = math.sqrt(P_R)
        if r <= lo:
            return CdfEstimate(0.0)
        if r >= hi:
            return CdfEstimate(1.0)
        return quad_cdf(self.pdf, lo, r, points=self._switch_points(), method="quadrature")

    def power_law(self):
        if self.delta_rho >= 0:
            return None
        return PowerLawTail(self.mean_power() / (4.0 * math.pi * math.sqrt(self.delta_r2(0.0))),
                            1.0, self.mean_power())

    def tail_approx(self, P_R):
        if self.power_law() is None:
            raise UnsupportedModelError(
                "three-wave power-law tail exists only when the two weaker waves can cancel the strongest")
        return super().tail_approx(P_R)

    def slope_info(self, P_R: float) -> tuple[float, str]:
        """Local slope with its provenance: "table", "asserted" or "numerical"."""
        if P_R <= 0:
            raise DomainError(f"local_slope needs P_R > 0, got {P_R}")
        if self.delta_rho < 0:
            return 1.0, "table"
        if self.delta_rho == 0:
            return 0.75, "asserted"
        lo, _ = self.support()
        if P_R <= lo * lo:
            raise DomainError("three-wave slope undefined below the support")
        h = 1e-4
        up, down = P_R * math.exp(h), max(P_R * math.exp(-h), lo * lo * (1 + 1e-12))
        f_up, f_down = self.cdf(up), self.cdf(down)
        return (math.log(f_up) - math.log(f_down)) / (math.log(up) - math.log(down)), "numerical"

    def local_slope(self, P_R):
        return self.slope_info(P_R)[0]

    def sample(self, rng, n):
        ph = rng.uniform(0.0, 2.0 * math.pi, (2, n))
        re = self.rho1 + self.rho2 * np.cos(ph[0]) + self.rho3 * np.cos(ph[1])
        im = self.rho2 * np.sin(ph[0]) + self.rho3 * np.sin(ph[1])
        return re * re + im * im


@dataclass(frozen=True)
class TWDP(ChannelModel):
    """Two specular waves plus diffuse power (k-factor ``k2``, balance ``delta``)."""

    k2: float
    delta: float
    A: float = 1.0
    name = "TWDP"

    def __post_init__(self):
        _nonneg("k2", self.k2)
        _nonneg("delta", self.delta)
        if self.delta > 1:
            raise DomainError(f"delta must be in [0, 1], got {self.delta}")
        _positive("A", self.A)

    def _k_psi(self, psi):
        return self.k2 * (1.0 + self.delta * math.cos(psi))

    def _average(self, f):
        if self.delta == 0 or self.k2 == 0:
            return f(0.0), 0.0
        val, err = adaptive_gauss_legendre(f, 0.0, math.pi)
        return val / math.pi, err / math.pi

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        from .diffuse import Rician

        two_sigma2 = self.A / (self.k2 + 1.0)

        def cond(psi):
            k = self._k_psi(psi)
            return Rician(k, two_sigma2 * (k + 1.0)).pdf(r)

        return self._average(cond)[0]

    def cdf_estimate(self, P_R):
        b = math.sqrt(2.0 * self.rel(P_R) * (self.k2 + 1.0))

        def cond(psi):
            return specfun.marcum_p(1.0, math.sqrt(2.0 * self._k_psi(psi)), b)

        val, err = self._average(cond)
        return CdfEstimate(min(val, 1.0), err, "gauss-legendre")

    def log_cdf(self, P_R):
        b = math.sqrt(2.0 * self.rel(P_R) * (self.k2 + 1.0))
        if b == 0:
            return -math.inf
        if self.delta == 0 or self.k2 == 0:
            return specfun.log_marcum_p(1.0, math.sqrt(2.0 * self.k2), b)
        direct = self.cdf(P_R)
        if direct > 1e-280:
            return math.log(direct)
        # log of a Gauss-Legendre average, evaluated with logsumexp
        from scipy.special import logsumexp

        x, w = np.polynomial.legendre.leggauss(64)
        psi = 0.5 * math.pi * (x + 1.0)
        logs = np.array([specfun.log_marcum_p(1.0, math.sqrt(2.0 * self._k_psi(p)), b) for p in psi])
        return float(logsumexp(logs, b=0.5 * w))

    def power_law(self):
        k, d = self.k2, self.delta
        log_alpha = math.log(k + 1.0) - k + specfun.log_bessel_i(0, k * d)
        return PowerLawTail(math.exp(log_alpha), 1.0, self.A)

    def amplitudes(self) -> tuple[float, float, float]:
        """(rho1, rho2, sigma) reproducing (k2, delta, A)."""
        s = self.k2 * self.A / (self.k2 + 1.0)
        plus = math.sqrt(s * (1.0 + self.delta))
        minus = math.sqrt(s * max(0.0, 1.0 - self.delta))
        sigma = math.sqrt(self.A / (2.0 * (self.k2 + 1.0)))
        return 0.5 * (plus + minus), 0.5 * (plus - minus), sigma

    def sample(self, rng, n):
        r1, r2, sigma = self.amplitudes()
        ph = rng.uniform(0.0, 2.0 * math.pi, n)
        x = rng.standard_normal((2, n))
        re = r1 + r2 * np.cos(ph) + sigma * x[0]
        im = r2 * np.sin(ph) + sigma * x[1]
        return re * re + im * im
