"""Cascaded (double) Rayleigh channel with power correlation ``gamma_corr``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from .. import specfun
from ._quad import quad_cdf
from .base import CdfEstimate, ChannelModel, DomainError, UnsupportedModelError, _positive

# below this the closed form loses digits to cancellation against 1
_CLOSED_FORM_MIN = 1e-3


@dataclass(frozen=True)
class CascadedRayleigh(ChannelModel):
    gamma_corr: float = 0.0
    A: float = 1.0
    name = "CascadedRayleigh"

    def __post_init__(self):
        g = self.gamma_corr
        if not (isinstance(g, (int, float)) and 0.0 <= g <= 1.0):
            raise DomainError(f"gamma_corr must be in [0, 1], got {g!r}")
        _positive("A", self.A)

    @property
    def singular(self) -> bool:
        return self.gamma_corr == 1.0

    @property
    def _s(self) -> float:
        # sigma_1 sigma_2
        return math.sqrt(self.A / (4.0 * (1.0 + self.gamma_corr)))

    @property
    def _link_power(self) -> float:
        # mean power of the single Rayleigh link in the fully correlated case
        return math.sqrt(self.A / 2.0)

    def _u(self, r):
        return r / (self._s * (1.0 - self.gamma_corr))

    def pdf(self, r):
        if r < 0:
            raise DomainError(f"envelope must be >= 0, got {r}")
        if self.singular:
            a1 = self._link_power
            return math.exp(-r / a1) / a1
        if r == 0:
            return 0.0
        g = self.gamma_corr
        u = self._u(r)
        sg = math.sqrt(g)
        # I0(u sqrt g) K0(u) with exponential scaling
        prod = sc.ive(0, u * sg) * sc.k0e(u) * math.exp(u * (sg - 1.0))
        return u / self._s * prod

    def _closed_form(self, u):
        g = self.gamma_corr
        sg = math.sqrt(g)
        scale = math.exp(u * (sg - 1.0))
        bracket = (sg * sc.ive(1, u * sg) * sc.k0e(u) + sc.ive(0, u * sg) * sc.k1e(u)) * scale
        return 1.0 - u * bracket

    def cdf_estimate(self, P_R):
        self.rel(P_R)
        if P_R == 0:
            return CdfEstimate(0.0)
        r = math.sqrt(P_R)
        if self.singular:
            return CdfEstimate(-math.expm1(-r / self._link_power))
        u = self._u(r)
        closed = self._closed_form(u)
        if closed >= _CLOSED_FORM_MIN:
            return CdfEstimate(min(closed, 1.0))
        g = self.gamma_corr
        sg = math.sqrt(g)

        def integrand(t):
            if t == 0:
                return 0.0
            return (1.0 - g) * t * sc.ive(0, t * sg) * sc.k0e(t) * math.exp(t * (sg - 1.0))

        return quad_cdf(integrand, 0.0, u, method="quadrature")

    def knee(self) -> float:
        """Relative power below which the logarithmic tail applies."""
        g = self.gamma_corr
        return 0.25 * (1.0 - g) ** 2 / (1.0 + g)

    def below_knee(self, P_R: float) -> bool:
        return self.singular or self.rel(P_R) < self.knee()

    def _y(self, P_R):
        g = self.gamma_corr
        return self.rel(P_R) * (1.0 + g) / (1.0 - g) ** 2

    def tail_approx(self, P_R):
        p = self.rel(P_R)
        if self.singular:
            return math.sqrt(2.0 * p)
        if p == 0:
            return 0.0
        y = self._y(P_R)
        if y >= 1.0:
            raise DomainError(
                f"cascaded tail approximation needs P_R/A < (1-G)^2/(1+G) = {(1 - self.gamma_corr) ** 2 / (1 + self.gamma_corr)}")
        return -(1.0 - self.gamma_corr) * y * math.log(y)

    def log_tail_approx(self, P_R):
        if self.singular:
            p = self.rel(P_R)
            return 0.5 * math.log(2.0 * p) if p > 0 else -math.inf
        v = self.tail_approx(P_R)
        return math.log(v) if v > 0 else -math.inf

    def local_slope(self, P_R):
        if P_R <= 0:
            raise DomainError(f"local_slope needs P_R > 0, got {P_R}")
        if self.singular:
            return 0.5
        y = self._y(P_R)
        if y >= 1.0:
            raise DomainError("cascaded slope undefined above the log-tail range")
        return 1.0 + 1.0 / math.log(y)

    def invert_tail(self, eps):
        g = self.gamma_corr
        if self.singular:
            if not 0 < eps < 1:
                raise DomainError(f"eps must be in (0, 1), got {eps}")
            return self.A * eps * eps / 2.0
        cap = (1.0 - g) / math.e
        if not 0 < eps < cap:
            raise DomainError(f"cascaded tail inversion needs 0 < eps < (1-G)/e = {cap}")
        z = -eps / (1.0 - g)
        w = specfun.lambert_w(specfun.WBranch.LOWER, z)
        return -self.A * eps * (1.0 - g) / ((1.0 + g) * w)

    def phi(self, P_R):
        raise UnsupportedModelError("CascadedRayleigh has no approximation error function")

    def sample(self, rng, n):
        g = self.gamma_corr
        x = rng.standard_normal((4, n)) * math.sqrt(0.5)
        v1 = x[0] + 1j * x[1]
        w = x[2] + 1j * x[3]
        v2 = math.sqrt(g) * v1 + math.sqrt(1.0 - g) * w
        return (np.abs(v1) ** 2 * np.abs(v2) ** 2) * (self.A / (1.0 + g))
