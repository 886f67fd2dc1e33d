"""Shadowed and log-normal channels.

Suzuki (log-normal shadowed Rayleigh), plain log-normal, Nakagami-m shadowed
kappa-mu and inverse-gamma shadowed kappa-mu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import warnings
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy import special as sc

from .. import specfun
from ._quad import quad_cdf
from .base import (
    DB_TO_NEPER,
    CdfEstimate,
    ChannelModel,
    DomainError,
    PowerLawTail,
    QuadratureError,
    UnsupportedModelError,
    _nonneg,
    _positive,
)

#: Shift of the log-normal tail exponent, fitted so the tail holds for 3..24 dB spread.
LN_SHIFT_A = 0.223


@lru_cache(maxsize=None)
def _hermite(n: int):
    x, w = np.polynomial.hermite.hermgauss(n)
    return x, w / math.sqrt(math.pi)


@dataclass(frozen=True)
class LogNormal(ChannelModel):
    """Log-normal envelope: ln r ~ N(mu_l, sigma_l) with both given in dB."""

    sigma_dB: float
    mu_dB: float = 0.0
    name = "LogNormal"

    def __post_init__(self):
        _positive("sigma_dB", self.sigma_dB)
        if not math.isfinite(self.mu_dB):
            raise DomainError(f"mu_dB must be finite, got {self.mu_dB}")

    @classmethod
    def unit_mean(cls, sigma_dB: float) -> "LogNormal":
        """The member with mean power 1 (mu_l = -sigma_l^2)."""
        sigma_l = sigma_dB * DB_TO_NEPER
        return cls(sigma_dB, -sigma_l * sigma_l / DB_TO_NEPER)

    @property
    def sigma_l(self) -> float:
        return self.sigma_dB * DB_TO_NEPER

    @property
    def mu_l(self) -> float:
        return self.mu_dB * DB_TO_NEPER

    def mean_power(self):
        return math.exp(2.0 * self.sigma_l ** 2 + 2.0 * self.mu_l)

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        if r == 0:
            return 0.0
        z = (math.log(r) - self.mu_l) / self.sigma_l
        return math.exp(-0.5 * z * z) / (r * self.sigma_l * math.sqrt(2.0 * math.pi))

    def _x(self, P_R):
        self.rel(P_R)
        return (0.5 * math.log(P_R) - self.mu_l) / (self.sigma_l * math.sqrt(2.0))

    def cdf_estimate(self, P_R):
        if P_R == 0:
            return CdfEstimate(0.0)
        return CdfEstimate(0.5 * specfun.erfc(-self._x(P_R)))

    def log_cdf(self, P_R):
        if P_R == 0:
            return -math.inf
        return specfun.log_erfc(-self._x(P_R)) - math.log(2.0)

    def _shifted(self, P_R):
        return 0.5 * math.log(P_R) - LN_SHIFT_A * self.sigma_l - self.mu_l

    def tail_approx(self, P_R):
        self.rel(P_R)
        if P_R == 0:
            return 0.0
        return 0.25 * math.exp(-self._shifted(P_R) ** 2 / (2.0 * self.sigma_l ** 2))

    def log_tail_approx(self, P_R):
        if P_R == 0:
            return -math.inf
        return math.log(0.25) - self._shifted(P_R) ** 2 / (2.0 * self.sigma_l ** 2)

    def local_slope(self, P_R):
        if P_R <= 0:
            raise DomainError(f"local_slope needs P_R > 0, got {P_R}")
        return -self._shifted(P_R) / (2.0 * self.sigma_l ** 2)

    def invert_tail(self, eps):
        if not 0 < eps < 0.25:
            raise DomainError(f"log-normal tail inversion needs 0 < eps < 1/4, got {eps}")
        half_log = (LN_SHIFT_A * self.sigma_l + self.mu_l
                    - math.sqrt(2.0) * self.sigma_l * math.sqrt(-math.log(4.0 * eps)))
        return math.exp(2.0 * half_log)

    def sample(self, rng, n):
        return np.exp(2.0 * (self.mu_l + self.sigma_l * rng.standard_normal(n)))


@dataclass(frozen=True)
class Suzuki(ChannelModel):
    """Rayleigh fading whose mean power is log-normal (envelope spread in dB).

    The Rayleigh part has unit mean power, so all level shifts come from ``mu_dB``.
    """

    sigma_dB: float
    mu_dB: float = 0.0
    name = "Suzuki"

    def __post_init__(self):
        _positive("sigma_dB", self.sigma_dB)
        if not math.isfinite(self.mu_dB):
            raise DomainError(f"mu_dB must be finite, got {self.mu_dB}")

    @classmethod
    def unit_mean(cls, sigma_dB: float) -> "Suzuki":
        sigma_l = sigma_dB * DB_TO_NEPER
        return cls(sigma_dB, -sigma_l * sigma_l / DB_TO_NEPER)

    @property
    def sigma_l(self) -> float:
        return self.sigma_dB * DB_TO_NEPER

    @property
    def mu_l(self) -> float:
        return self.mu_dB * DB_TO_NEPER

    def mean_power(self):
        return math.exp(2.0 * self.sigma_l ** 2 + 2.0 * self.mu_l)

    def _shadow_powers(self, n):
        # local mean power A_s = r^2 with ln r ~ N(mu_l, sigma_l)
        x, w = _hermite(n)
        return np.exp(2.0 * (self.mu_l + self.sigma_l * math.sqrt(2.0) * x)), w

    def _hermite_average(self, g, P, rtol=1e-12):
        prev = None
        with np.errstate(over="ignore", divide="ignore"):
            for n in (40, 80, 160, 256):
                a_s, w = self._shadow_powers(n)
                cur = math.fsum(w * g(a_s))
                if prev is not None and abs(cur - prev) <= rtol * abs(cur):
                    return cur, abs(cur - prev)
                prev = cur
        # wide shadowing makes the Rayleigh step too sharp for fixed nodes
        return self._quad_average(g, P)

    def _quad_average(self, g, P):
        s, mu = self.sigma_l, self.mu_l

        def f(z):
            return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi) * float(g(np.exp(2.0 * (mu + s * z))))

        # split where the shadow power crosses P and around the weight's bulk
        z_step = min(max((0.5 * math.log(P) - mu) / s, -39.0), 39.0) if P > 0 else 0.0
        edges = sorted({-40.0, -2.0 * s, 0.0, z_step, 40.0})
        total, err = 0.0, 0.0
        with warnings.catch_warnings(), np.errstate(over="ignore", divide="ignore"):
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            for lo, hi in zip(edges[:-1], edges[1:]):
                v, e = integrate.quad(f, lo, hi, limit=400, epsabs=0.0, epsrel=1e-12)
                total += v
                err += e
        if err > max(1e-15, 1e-3 * abs(total)):
            raise QuadratureError("log-normal average did not converge", total, err)
        return total, err

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        P = r * r
        val, _ = self._hermite_average(lambda a: np.exp(-P / a - np.log(a)), P)
        return 2.0 * r * val

    def cdf_estimate(self, P_R):
        self.rel(P_R)
        val, err = self._hermite_average(lambda a: -np.expm1(-P_R / a), P_R)
        return CdfEstimate(min(val, 1.0), err, "gauss-hermite")

    def log_cdf(self, P_R):
        if self.rel(P_R) == 0:
            return -math.inf
        a_s, w = self._shadow_powers(256)
        return float(sc.logsumexp(np.log(-np.expm1(-P_R / a_s)), b=w))

    def power_law(self):
        return PowerLawTail(math.exp(4.0 * self.sigma_l ** 2), 1.0, self.mean_power())

    def bounds(self, P_R: float) -> tuple[float, float]:
        """Lower and upper analytic bounds on the outage probability."""
        p = self.rel(P_R)
        s2 = self.sigma_l ** 2
        upper = p * math.exp(4.0 * s2)
        return upper - p * p * math.exp(12.0 * s2), upper

    def sample(self, rng, n):
        shadow = np.exp(2.0 * (self.mu_l + self.sigma_l * rng.standard_normal(n)))
        x = rng.standard_normal((2, n))
        return shadow * 0.5 * (x[0] ** 2 + x[1] ** 2)


@dataclass(frozen=True)
class KappaMuM(ChannelModel):
    """kappa-mu fading with Nakagami-m shadowing of the specular parts."""

    kappa: float
    mu: float
    m: float
    A: float = 1.0
    name = "KappaMuM"

    def __post_init__(self):
        _nonneg("kappa", self.kappa)
        _positive("mu", self.mu)
        _positive("m", self.m)
        _positive("A", self.A)

    def _consts(self):
        k, mu, m = self.kappa, self.mu, self.m
        log_c = m * (math.log(m) - math.log(k * mu + m))
        z = k * (1.0 + k) * mu * mu / (k * mu + m)
        return log_c, z

    def _log_density_rel(self, p):
        """log of the density of p = P / A (array input)."""
        k, mu, m = self.kappa, self.mu, self.m
        log_c, z = self._consts()
        p = np.asarray(p, dtype=float)
        with np.errstate(divide="ignore"):
            return (mu * math.log(mu * (1.0 + k)) - math.lgamma(mu) + (mu - 1.0) * np.log(p)
                    - (1.0 + k) * mu * p + log_c + specfun.log_kummer_1f1(m, mu, z * p))

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        if r == 0:
            if self.mu != 0.5:
                return 0.0 if self.mu > 0.5 else math.inf
            log_c, _ = self._consts()
            k = self.kappa
            return 2.0 * math.exp(0.5 * math.log(0.5 * (1.0 + k)) - math.lgamma(0.5) + log_c) / math.sqrt(self.A)
        p = r * r / self.A
        return float(2.0 * r / self.A * np.exp(self._log_density_rel(p)))

    def cdf_estimate(self, P_R):
        p = self.rel(P_R)
        if p == 0:
            return CdfEstimate(0.0)
        k, mu, m = self.kappa, self.mu, self.m
        log_c, z = self._consts()
        log_pref = (mu - 1.0) * math.log(mu) + mu * math.log1p(k) - math.lgamma(mu) + log_c

        # t = p^mu removes the p^(mu-1) endpoint behaviour
        def near(t):
            u = t ** (1.0 / mu)
            return math.exp(log_pref - (1.0 + k) * mu * u + specfun.log_kummer_1f1(m, mu, z * u))

        head = quad_cdf(near, 0.0, min(p, 1.0) ** mu, method="quadrature")
        if p <= 1.0:
            return head
        tail = quad_cdf(lambda q: float(np.exp(self._log_density_rel(q))), 1.0, p, method="quadrature")
        return CdfEstimate(min(head.value + tail.value, 1.0), head.abserr + tail.abserr, "quadrature")

    def power_law(self):
        k, mu = self.kappa, self.mu
        log_c, _ = self._consts()
        log_alpha = mu * math.log(mu * (1.0 + k)) - math.lgamma(mu + 1.0) + log_c
        return PowerLawTail(math.exp(log_alpha), mu, self.A)

    def sample(self, rng, n):
        k, mu, m = self.kappa, self.mu, self.m
        sigma2 = self.A / (2.0 * mu * (1.0 + k))
        xi2 = rng.gamma(m, 1.0 / m, n)
        if k == 0:
            return sigma2 * rng.chisquare(2.0 * mu, n)
        return sigma2 * rng.noncentral_chisquare(2.0 * mu, 2.0 * k * mu * xi2)


@dataclass(frozen=True)
class KappaMuAlpha(ChannelModel):
    """kappa-mu fading whose total power is inverse-gamma shadowed (shape ``alpha_ig``).

    The shadowing scale is alpha_ig - 1 so the mean shadow power is one.
    """

    kappa: float
    mu: float
    alpha_ig: float
    A: float = 1.0
    name = "KappaMuAlpha"

    def __post_init__(self):
        _nonneg("kappa", self.kappa)
        _positive("mu", self.mu)
        _positive("A", self.A)
        if not (math.isfinite(self.alpha_ig) and self.alpha_ig > 1):
            raise DomainError(f"alpha_ig must exceed 1 for a normalized shadow power, got {self.alpha_ig}")

    @property
    def beta_scale(self) -> float:
        return self.alpha_ig - 1.0

    @property
    def c(self) -> float:
        return self.mu * (1.0 + self.kappa) / self.beta_scale

    def _log_norm(self):
        k, mu, a = self.kappa, self.mu, self.alpha_ig
        return -k * mu - sc.betaln(a, mu)

    def _v(self, p):
        cp = self.c * p
        return cp / (1.0 + cp)

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        if r == 0:
            return 0.0 if self.mu > 0.5 else math.inf
        k, mu, a = self.kappa, self.mu, self.alpha_ig
        p = r * r / self.A
        v = self._v(p)
        log_dens_v = (self._log_norm() + (mu - 1.0) * math.log(v) + (a - 1.0) * math.log1p(-v)
                      + specfun.log_kummer_1f1(a + mu, mu, k * mu * v))
        dv_dp = self.c / (1.0 + self.c * p) ** 2
        return 2.0 * r / self.A * math.exp(log_dens_v) * dv_dp

    def cdf_estimate(self, P_R):
        p = self.rel(P_R)
        if p == 0:
            return CdfEstimate(0.0)
        k, mu, a = self.kappa, self.mu, self.alpha_ig
        log_pref = self._log_norm() - math.log(mu)
        V = self._v(p)

        # w = v^mu; density of w is bounded at 0
        def integrand(w):
            v = w ** (1.0 / mu)
            return math.exp(log_pref + (a - 1.0) * math.log1p(-v)
                            + specfun.log_kummer_1f1(a + mu, mu, k * mu * v))

        return quad_cdf(integrand, 0.0, V ** mu, method="quadrature")

    def power_law(self):
        k, mu, a = self.kappa, self.mu, self.alpha_ig
        log_alpha = (mu * (-k + math.log((k + 1.0) * mu)) - math.lgamma(mu + 1.0)
                     + math.lgamma(a + mu) - mu * math.log(a - 1.0) - math.lgamma(a))
        return PowerLawTail(math.exp(log_alpha), mu, self.A)

    def _leading(self, P_R):
        k, mu, a = self.kappa, self.mu, self.alpha_ig
        V = self._v(self.rel(P_R))
        if V == 0:
            return -math.inf, 0.0
        log_val = (self._log_norm() - math.log(mu) + mu * math.log(V)
                   + specfun.log_kummer_1f1(a + mu, mu + 1.0, k * mu * V))
        return log_val, V

    def upper_bound(self, P_R: float) -> float:
        """Leading-term bound obtained by dropping the shadowing denominator."""
        log_val, _ = self._leading(P_R)
        return math.exp(log_val)

    def tail_approx_heuristic(self, P_R: float) -> float:
        """Leading term with the (c p + 1)^(alpha - 1) denominator restored."""
        log_val, V = self._leading(P_R)
        if V == 0:
            return 0.0
        return math.exp(log_val + (self.alpha_ig - 1.0) * math.log1p(-V))

    def sample(self, rng, n):
        k, mu, a = self.kappa, self.mu, self.alpha_ig
        omega = self.beta_scale / rng.gamma(a, 1.0, n)
        sigma2 = self.A / (2.0 * mu * (1.0 + k))
        if k == 0:
            base = sigma2 * rng.chisquare(2.0 * mu, n)
        else:
            base = sigma2 * rng.noncentral_chisquare(2.0 * mu, 2.0 * k * mu, n)
        return omega * base


def kappamu_alpha_heuristic(model: KappaMuAlpha, P_R: float) -> float:
    if not isinstance(model, KappaMuAlpha):
        raise UnsupportedModelError("heuristic expansion exists only for KappaMuAlpha")
    return model.tail_approx_heuristic(P_R)
