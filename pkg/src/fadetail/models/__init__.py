"""Catalog of fading channel models and the operations defined on them."""

from .base import (
    DB_TO_NEPER,
    PRECISION_FLOOR,
    CdfEstimate,
    ChannelModel,
    DomainError,
    PowerLawTail,
    QuadratureError,
    TailReport,
    UnsupportedModelError,
    phi_target,
)
from .cascaded import CascadedRayleigh
from .diffuse import KappaMu, Nakagami, Rayleigh, Rician, Weibull
from .ops import (
    approx_error_phi,
    cdf,
    invert_tail,
    kappamu_exact_tail_series,
    load_model,
    local_slope,
    mean_power,
    outage_threshold,
    pdf,
    power_law,
    tail_approx,
    tail_approx_kappamu_alpha_heuristic,
    tail_report,
    validity_bound,
)
from .shadowed import LN_SHIFT_A, KappaMuAlpha, KappaMuM, LogNormal, Suzuki
from .specular import TWDP, ThreeWave, TwoWave, delta_ratio

ALL_MODELS = (TwoWave, ThreeWave, Rayleigh, Rician, TWDP, Weibull, Nakagami, KappaMu,
              KappaMuM, KappaMuAlpha, Suzuki, LogNormal, CascadedRayleigh)

__all__ = [
    "ALL_MODELS", "DB_TO_NEPER", "LN_SHIFT_A", "PRECISION_FLOOR",
    "CascadedRayleigh", "CdfEstimate", "ChannelModel", "DomainError", "KappaMu", "KappaMuAlpha",
    "KappaMuM", "LogNormal", "Nakagami", "PowerLawTail", "QuadratureError", "Rayleigh", "Rician",
    "Suzuki", "TWDP", "TailReport", "ThreeWave", "TwoWave", "UnsupportedModelError", "Weibull",
    "approx_error_phi", "cdf", "delta_ratio", "invert_tail", "kappamu_exact_tail_series",
    "load_model", "local_slope", "mean_power", "outage_threshold", "pdf", "phi_target",
    "power_law", "tail_approx", "tail_approx_kappamu_alpha_heuristic", "tail_report",
    "validity_bound",
]
