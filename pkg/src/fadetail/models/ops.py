"""Free-function front end over the model catalog."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .. import specfun
from .base import ChannelModel, DomainError, PowerLawTail, TailReport, UnsupportedModelError, phi_target
from .diffuse import KappaMu
from .shadowed import KappaMuAlpha, kappamu_alpha_heuristic
from .specular import delta_ratio  # noqa: F401  (re-exported)


def outage_threshold(rate: float) -> float:
    """Smallest received power that supports ``rate`` bits per channel use."""
    if not (rate >= 0 and math.isfinite(rate)):
        raise DomainError(f"rate must be a finite number >= 0, got {rate}")
    return math.expm1(rate * math.log(2.0))


def mean_power(model: ChannelModel) -> float:
    return model.mean_power()


def pdf(model: ChannelModel, r: float) -> float:
    return model.pdf(r)


def cdf(model: ChannelModel, P_R: float) -> float:
    return model.cdf(P_R)


def power_law(model: ChannelModel) -> PowerLawTail | None:
    return model.power_law()


def tail_approx(model: ChannelModel, P_R: float) -> float:
    return model.tail_approx(P_R)


def tail_approx_kappamu_alpha_heuristic(model: KappaMuAlpha, P_R: float) -> float:
    return kappamu_alpha_heuristic(model, P_R)


def approx_error_phi(model: ChannelModel, P_R: float) -> float:
    return model.phi(P_R)


def validity_bound(model: ChannelModel, eta: float) -> float:
    return model.validity_bound(eta)


def local_slope(model: ChannelModel, P_R: float) -> float:
    return model.local_slope(P_R)


def invert_tail(model: ChannelModel, eps: float) -> float:
    return model.invert_tail(eps)


def kappamu_exact_tail_series(model: KappaMu, P_R: float, n_terms: int) -> tuple[float, float]:
    """Partial sum of the Laguerre series of the kappa-mu CDF and a bound on the rest.

    Returns ``(partial, remainder_bound)``; the exact CDF lies within
    ``partial +- remainder_bound``.
    """
    if not isinstance(model, KappaMu):
        raise UnsupportedModelError("Laguerre tail series exists only for KappaMu")
    if n_terms < 1:
        raise DomainError(f"n_terms must be >= 1, got {n_terms}")
    k, mu = model.kappa, model.mu
    p = model.rel(P_R)
    if p == 0:
        return 0.0, 0.0
    x = (k + 1.0) * mu * p
    km = k * mu
    log_x = math.log(x)
    terms = []
    for n in range(n_terms):
        lag = specfun.gen_laguerre(n, mu - 1.0, km)
        if lag == 0.0:
            continue
        log_mag = -km + (n + mu) * log_x - math.lgamma(mu + n + 1.0) + math.log(abs(lag))
        sign = (-1.0) ** n * math.copysign(1.0, lag)
        terms.append(sign * math.exp(log_mag))
    partial = math.fsum(terms)
    # |L_n| <= Gamma(mu+n)/(n! Gamma(mu)) e^{km/2} turns the tail into e^x P(N, x)
    eps_tail = math.exp(-km + mu * log_x - math.lgamma(mu + 1.0))
    rest = eps_tail * math.exp(km / 2.0 + x) * specfun.reg_lower_gamma(float(n_terms), x)
    return partial, rest


def tail_report(model: ChannelModel, P_R: float, eta: float = 0.1) -> TailReport:
    """Exact and approximate outage at one threshold with the error bound where known."""
    phi_target(eta)
    p = model.rel(P_R)
    eps_tail = model.tail_approx(P_R)
    est = model.cdf_estimate(P_R)
    eps_exact = None if est.at_precision_floor else est.value
    try:
        phi = model.phi(P_R)
    except (UnsupportedModelError, DomainError):
        phi = None
    if phi is not None:
        ok = phi <= phi_target(eta)
    elif eps_exact is not None and eps_exact > 0:
        ok = abs(eps_tail / eps_exact - 1.0) <= eta
    else:
        ok = False
    return TailReport(p, eps_exact, eps_tail, phi, ok)


def load_model(source: str | dict) -> ChannelModel:
    """Build a model from a JSON object, a JSON string or a path to a JSON file."""
    if isinstance(source, dict):
        return ChannelModel.from_json(source)
    text = source.strip()
    if not text.startswith("{"):
        text = Path(source).read_text()
    return ChannelModel.from_json(json.loads(text))
