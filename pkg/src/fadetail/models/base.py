"""Shared types for the channel catalog."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from ..specfun import DomainError

DB_TO_NEPER = math.log(10.0) / 20.0

#: Quadrature results below this are reported as at the precision floor.
PRECISION_FLOOR = 1e-13


class UnsupportedModelError(TypeError):
    """The requested quantity is not defined for this channel model."""


class QuadratureError(ArithmeticError):
    """Numerical integration did not reach the requested tolerance."""

    def __init__(self, message: str, partial: float, abserr: float):
        super().__init__(f"{message} (partial={partial!r}, abserr={abserr!r})")
        self.partial = partial
        self.abserr = abserr


@dataclass(frozen=True)
class CdfEstimate:
    """An outage probability together with how it was obtained."""

    value: float
    abserr: float = 0.0
    method: str = "closed-form"

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "abserr", float(self.abserr))

    @property
    def converged(self) -> bool:
        return self.abserr <= max(1e-15, 1e-3 * self.value)

    @property
    def at_precision_floor(self) -> bool:
        return self.method != "closed-form" and self.value < PRECISION_FLOOR


@dataclass(frozen=True)
class PowerLawTail:
    """Power-law tail ``alpha_offset * (P_R / A) ** beta_slope``.

    ``valid_from`` is the smallest P_R where the law applies (nonzero only for
    the unbalanced two-wave channel, whose CDF vanishes below its support).
    """

    alpha_offset: float
    beta_slope: float
    A: float
    valid_from: float = 0.0

    def __post_init__(self):
        if not (self.alpha_offset > 0 and self.beta_slope > 0 and self.A > 0):
            raise DomainError(f"invalid power law {self}")

    def __call__(self, P_R: float) -> float:
        if P_R < 0:
            raise DomainError(f"P_R must be >= 0, got {P_R}")
        return self.alpha_offset * (P_R / self.A) ** self.beta_slope

    def log(self, P_R: float) -> float:
        if P_R <= 0:
            return -math.inf
        return math.log(self.alpha_offset) + self.beta_slope * math.log(P_R / self.A)

    def invert(self, eps: float) -> float:
        if not 0 < eps:
            raise DomainError(f"eps must be > 0, got {eps}")
        return self.A * (eps / self.alpha_offset) ** (1.0 / self.beta_slope)


@dataclass(frozen=True)
class TailReport:
    p_rel: float
    eps_exact: float | None
    eps_tail: float
    phi: float | None
    within_tolerance: bool

    def sandwich_holds(self, slack: float = 0.0) -> bool:
        if self.phi is None or self.eps_exact is None:
            return True
        lo = self.eps_tail * (1.0 - self.phi) - slack
        hi = self.eps_tail * (1.0 + self.phi) + slack
        return lo <= self.eps_exact <= hi


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


def _nonneg(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
        raise DomainError(f"{name} must be a nonnegative finite number, got {value!r}")


class ChannelModel:
    """Base class of the fading-channel catalog.

    Subclasses are frozen dataclasses; the dataclass field names are the JSON
    parameter names. Powers are absolute (same units as ``mean_power``).
    """

    name: ClassVar[str]
    registry: ClassVar[dict[str, type["ChannelModel"]]] = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if "name" in cls.__dict__:
            ChannelModel.registry[cls.name] = cls

    # --- serialization -------------------------------------------------
    def to_json(self) -> dict:
        return {"model": self.name, "params": dataclasses.asdict(self)}

    @staticmethod
    def from_json(obj: dict) -> "ChannelModel":
        try:
            cls = ChannelModel.registry[obj["model"]]
        except KeyError as exc:
            raise DomainError(f"unknown model {obj.get('model')!r}") from exc
        params = obj.get("params", {})
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(params) - known
        if extra:
            raise DomainError(f"{cls.name}: unknown parameters {sorted(extra)}")
        return cls(**{k: float(v) for k, v in params.items()})

    # --- interface ------------------------------------------------------
    def mean_power(self) -> float:
        return self.A  # type: ignore[attr-defined]

    def rel(self, P_R: float) -> float:
        if P_R < 0 or math.isnan(P_R):
            raise DomainError(f"P_R must be >= 0, got {P_R}")
        return P_R / self.mean_power()

    def pdf(self, r: float) -> float:
        """Envelope density at ``r`` (zero outside the support)."""
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        return 0.0, math.inf

    def cdf_estimate(self, P_R: float) -> CdfEstimate:
        raise NotImplementedError

    def cdf(self, P_R: float) -> float:
        return self.cdf_estimate(P_R).value

    def log_cdf(self, P_R: float) -> float:
        v = self.cdf(P_R)
        return math.log(v) if v > 0 else -math.inf

    def power_law(self) -> PowerLawTail | None:
        return None

    def tail_approx(self, P_R: float) -> float:
        law = self.power_law()
        if law is None:
            raise NotImplementedError
        self.rel(P_R)
        return law(P_R)

    def log_tail_approx(self, P_R: float) -> float:
        law = self.power_law()
        if law is None:
            v = self.tail_approx(P_R)
            return math.log(v) if v > 0 else -math.inf
        return law.log(P_R)

    def phi(self, P_R: float) -> float:
        raise UnsupportedModelError(f"{self.name} has no approximation error function")

    def validity_bound(self, eta: float) -> float:
        raise UnsupportedModelError(f"{self.name} has no approximation error function")

    def local_slope(self, P_R: float) -> float:
        if P_R <= 0:
            raise DomainError(f"local_slope needs P_R > 0, got {P_R}")
        law = self.power_law()
        if law is None:
            raise NotImplementedError
        return law.beta_slope

    def invert_tail(self, eps: float) -> float:
        law = self.power_law()
        if law is None:
            raise UnsupportedModelError(f"{self.name} tail is not invertible")
        if not 0 < eps < 1:
            raise DomainError(f"eps must be in (0, 1), got {eps}")
        return law.invert(eps)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` i.i.d. draws of received power."""
        raise NotImplementedError


def phi_target(eta: float) -> float:
    if not eta > 0:
        raise DomainError(f"eta must be > 0, got {eta}")
    return eta / (1.0 + eta)


__all__ = [
    "DB_TO_NEPER",
    "PRECISION_FLOOR",
    "ChannelModel",
    "CdfEstimate",
    "DomainError",
    "PowerLawTail",
    "QuadratureError",
    "TailReport",
    "UnsupportedModelError",
    "phi_target",
    "_positive",
    "_nonneg",
]
