"""Channels with a diffuse component and closed-form CDFs.

Rayleigh, Rician, Weibull, Nakagami-m and kappa-mu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from .. import specfun
from .base import (
    CdfEstimate,
    ChannelModel,
    DomainError,
    PowerLawTail,
    _nonneg,
    _positive,
    phi_target,
)


def _log_bessel_i_any(order, x):
    # mu < 1 needs orders in (-1, 0), where I is still positive
    if order >= 0:
        return specfun.log_bessel_i(order, x)
    return math.log(sc.ive(order, x)) + x


@dataclass(frozen=True)
class Rayleigh(ChannelModel):
    A: float = 1.0
    name = "Rayleigh"

    def __post_init__(self):
        _positive("A", self.A)

    def pdf(self, r: float) -> float:
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        return 2.0 * r / self.A * math.exp(-r * r / self.A)

    def cdf_estimate(self, P_R):
        return CdfEstimate(-math.expm1(-self.rel(P_R)))

    def log_cdf(self, P_R):
        p = self.rel(P_R)
        if p == 0:
            return -math.inf
        return math.log(-math.expm1(-p))

    def power_law(self):
        return PowerLawTail(1.0, 1.0, self.A)

    def phi(self, P_R):
        return self.rel(P_R) / 2.0

    def validity_bound(self, eta):
        return 2.0 * self.A * phi_target(eta)

    def sample(self, rng, n):
        x = rng.standard_normal((2, n))
        return 0.5 * self.A * (x[0] ** 2 + x[1] ** 2)


@dataclass(frozen=True)
class Rician(ChannelModel):
    k1: float
    A: float = 1.0
    name = "Rician"

    def __post_init__(self):
        _nonneg("k1", self.k1)
        _positive("A", self.A)

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        if r == 0:
            return 0.0
        two_sigma2 = self.A / (self.k1 + 1.0)
        arg = 2.0 * r * math.sqrt(self.k1 / two_sigma2)
        log_f = (math.log(2.0 * r / two_sigma2) - r * r / two_sigma2 - self.k1
                 + specfun.log_bessel_i(0, arg))
        return math.exp(log_f)

    def _marcum_args(self, P_R):
        p = self.rel(P_R)
        return math.sqrt(2.0 * self.k1), math.sqrt(2.0 * p * (self.k1 + 1.0))

    def cdf_estimate(self, P_R):
        a, b = self._marcum_args(P_R)
        return CdfEstimate(specfun.marcum_p(1.0, a, b))

    def log_cdf(self, P_R):
        a, b = self._marcum_args(P_R)
        return specfun.log_marcum_p(1.0, a, b)

    def power_law(self):
        return PowerLawTail((self.k1 + 1.0) * math.exp(-self.k1), 1.0, self.A)

    def phi(self, P_R):
        p = self.rel(P_R)
        return math.exp(self.k1 / 2.0) * math.expm1(p * (self.k1 + 1.0))

    def validity_bound(self, eta):
        t = phi_target(eta)
        return self.A * math.log1p(t * math.exp(-self.k1 / 2.0)) / (self.k1 + 1.0)

    def sample(self, rng, n):
        sigma = math.sqrt(self.A / (2.0 * (self.k1 + 1.0)))
        rho = math.sqrt(self.k1 * self.A / (self.k1 + 1.0))
        x = rng.standard_normal((2, n))
        return (rho + sigma * x[0]) ** 2 + (sigma * x[1]) ** 2


@dataclass(frozen=True)
class Weibull(ChannelModel):
    beta_w: float
    A: float = 1.0
    name = "Weibull"

    def __post_init__(self):
        _positive("beta_w", self.beta_w)
        if self.beta_w < 0.5:
            raise DomainError(f"Weibull shape must be >= 1/2, got {self.beta_w}")
        _positive("A", self.A)

    @property
    def _g(self):
        return math.gamma(1.0 + 1.0 / self.beta_w)

    def _x(self, P_R):
        return (self._g * self.rel(P_R)) ** self.beta_w

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        b = self.beta_w
        two_sigma2 = (self.A / self._g) ** b
        if r == 0:
            return 0.0 if b > 0.5 else 2.0 * b / two_sigma2
        return 2.0 * b * r ** (2 * b - 1) / two_sigma2 * math.exp(-r ** (2 * b) / two_sigma2)

    def cdf_estimate(self, P_R):
        return CdfEstimate(-math.expm1(-self._x(P_R)))

    def log_cdf(self, P_R):
        x = self._x(P_R)
        return math.log(-math.expm1(-x)) if x > 0 else -math.inf

    def power_law(self):
        return PowerLawTail(self._g ** self.beta_w, self.beta_w, self.A)

    def phi(self, P_R):
        x = self._x(P_R)
        return x / (1.0 + x)

    def validity_bound(self, eta):
        # x / (1 + x) = eta / (1 + eta)  <=>  x = eta
        phi_target(eta)
        return self.A * eta ** (1.0 / self.beta_w) / self._g

    def sample(self, rng, n):
        x = rng.standard_normal((2, n))
        e = 0.5 * (x[0] ** 2 + x[1] ** 2)
        return self.A / self._g * e ** (1.0 / self.beta_w)


@dataclass(frozen=True)
class Nakagami(ChannelModel):
    m: float
    A: float = 1.0
    name = "Nakagami"

    def __post_init__(self):
        _positive("m", self.m)
        if self.m < 0.5:
            raise DomainError(f"Nakagami m must be >= 1/2, got {self.m}")
        _positive("A", self.A)

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        m, A = self.m, self.A
        if r == 0:
            return 0.0 if m > 0.5 else 2.0 * math.sqrt(m / (math.pi * A))
        log_f = (math.log(2.0) + m * math.log(m) - math.lgamma(m) - m * math.log(A)
                 + (2 * m - 1) * math.log(r) - m * r * r / A)
        return math.exp(log_f)

    def cdf_estimate(self, P_R):
        return CdfEstimate(specfun.reg_lower_gamma(self.m, self.m * self.rel(P_R)))

    def log_cdf(self, P_R):
        return specfun.log_reg_lower_gamma(self.m, self.m * self.rel(P_R))

    def power_law(self):
        m = self.m
        return PowerLawTail(math.exp(m * math.log(m) - math.lgamma(m + 1.0)), m, self.A)

    def phi(self, P_R):
        return -math.expm1(-self.m * self.rel(P_R))

    def validity_bound(self, eta):
        t = phi_target(eta)
        return -self.A * math.log1p(-t) / self.m

    def sample(self, rng, n):
        return self.A * rng.gamma(self.m, 1.0 / self.m, n)


@dataclass(frozen=True)
class KappaMu(ChannelModel):
    kappa: float
    mu: float
    A: float = 1.0
    name = "KappaMu"

    def __post_init__(self):
        _nonneg("kappa", self.kappa)
        _positive("mu", self.mu)
        _positive("A", self.A)

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        k, mu = self.kappa, self.mu
        if r == 0:
            if mu > 0.5:
                return 0.0
            if mu < 0.5:
                return math.inf
            s = math.sqrt(self.A / (mu * (1.0 + k)))
            return 2.0 / (s * math.sqrt(math.pi)) * math.exp(-k * mu)
        s = math.sqrt(self.A / (mu * (1.0 + k)))  # sqrt(2 sigma^2)
        y = r / s
        if k == 0:
            log_f = math.log(2.0 / s) + (2 * mu - 1) * math.log(y) - y * y - math.lgamma(mu)
        else:
            log_f = (math.log(2.0 / s) + 0.5 * (1 - mu) * math.log(k * mu) - k * mu
                     + mu * math.log(y) - y * y
                     + _log_bessel_i_any(mu - 1.0, 2.0 * math.sqrt(k * mu) * y))
        return math.exp(log_f)

    def _marcum_args(self, P_R):
        p = self.rel(P_R)
        k, mu = self.kappa, self.mu
        return math.sqrt(2.0 * k * mu), math.sqrt(2.0 * (1.0 + k) * mu * p)

    def cdf_estimate(self, P_R):
        a, b = self._marcum_args(P_R)
        return CdfEstimate(specfun.marcum_p(self.mu, a, b))

    def log_cdf(self, P_R):
        a, b = self._marcum_args(P_R)
        return specfun.log_marcum_p(self.mu, a, b)

    def power_law(self):
        k, mu = self.kappa, self.mu
        log_alpha = mu * (-k + math.log((k + 1.0) * mu)) - math.lgamma(mu + 1.0)
        return PowerLawTail(math.exp(log_alpha), mu, self.A)

    def phi(self, P_R):
        k, mu = self.kappa, self.mu
        return math.exp(k * mu / 2.0) * math.expm1((k + 1.0) * mu * self.rel(P_R))

    def validity_bound(self, eta):
        k, mu = self.kappa, self.mu
        t = phi_target(eta)
        return self.A * math.log1p(t * math.exp(-k * mu / 2.0)) / ((k + 1.0) * mu)

    def sample(self, rng, n):
        k, mu = self.kappa, self.mu
        sigma2 = self.A / (2.0 * mu * (1.0 + k))
        if k == 0:
            return sigma2 * rng.chisquare(2.0 * mu, n)
        return sigma2 * rng.noncentral_chisquare(2.0 * mu, 2.0 * k * mu, n)
