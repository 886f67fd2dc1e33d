"""Outage of independent receive branches under selection and maximum-ratio combining."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .models.base import ChannelModel, DomainError, PowerLawTail, UnsupportedModelError
from .specfun import LogProbability


class DiversityScheme(enum.Enum):
    SelectionCombining = "SC"
    MaximumRatioCombining = "MRC"

    @classmethod
    def parse(cls, text: str) -> "DiversityScheme":
        key = text.strip().upper()
        for s in cls:
            if s.value == key:
                return s
        raise DomainError(f"unknown combining scheme {text!r} (use SC or MRC)")


SC = DiversityScheme.SelectionCombining
MRC = DiversityScheme.MaximumRatioCombining


class PhiUnavailableError(UnsupportedModelError):
    """A branch without an error function blocks the combined bound."""

    def __init__(self, index: int, model: ChannelModel):
        super().__init__(f"branch {index} ({model.name}) has no approximation error function")
        self.index = index
        self.model = model


@dataclass(frozen=True)
class BranchSet:
    """Independent receive branches. Correlated branches are not supported."""

    branches: tuple[ChannelModel, ...]

    def __init__(self, branches: Sequence[ChannelModel], correlation=None):
        if correlation is not None and any(c != 0 for c in _flat(correlation)):
            raise DomainError("correlated branches are not supported; branches must be independent")
        branches = tuple(branches)
        if not branches:
            raise DomainError("a branch set needs at least one branch")
        for i, b in enumerate(branches):
            if not isinstance(b, ChannelModel):
                raise DomainError(f"branch {i} is not a channel model: {b!r}")
            if not b.mean_power() > 0:
                raise DomainError(f"branch {i} has nonpositive mean power")
        object.__setattr__(self, "branches", branches)

    @property
    def M(self) -> int:
        return len(self.branches)

    @property
    def bpr(self) -> list[float]:
        """Branch power ratios A_m / A_1."""
        a1 = self.branches[0].mean_power()
        return [b.mean_power() / a1 for b in self.branches]

    def __iter__(self):
        return iter(self.branches)

    def __len__(self):
        return len(self.branches)

    def to_json(self) -> list[dict]:
        return [b.to_json() for b in self.branches]


def _flat(x):
    if isinstance(x, (int, float)):
        return [x]
    out = []
    for v in x:
        out.extend(_flat(v))
    return out


def log_sc_outage(bs: BranchSet, P_R: float) -> LogProbability:
    total = 0.0
    for b in bs:
        lc = b.log_cdf(P_R)
        if lc == -math.inf:
            return LogProbability(-math.inf)
        total += lc
    return LogProbability(min(total, 0.0))


def sc_outage(bs: BranchSet, P_R: float) -> float:
    """Product of the branch CDFs, accumulated in logs."""
    return log_sc_outage(bs, P_R).prob


def log_mrc_offset(betas: Sequence[float]) -> float:
    betas = list(betas)
    if not betas:
        raise DomainError("need at least one slope")
    for b in betas:
        if not (b > 0 and math.isfinite(b)):
            raise DomainError(f"slopes must be positive, got {b}")
    return math.fsum(math.lgamma(1.0 + b) for b in betas) - math.lgamma(1.0 + math.fsum(betas))


def mrc_offset(betas: Sequence[float]) -> float:
    """prod Gamma(1 + b_m) / Gamma(1 + sum b_m)."""
    return math.exp(log_mrc_offset(betas))


def log_mrc_outage_powerlaw(laws: Sequence[PowerLawTail], P_R: float) -> LogProbability:
    laws = list(laws)
    if P_R < 0:
        raise DomainError(f"P_R must be >= 0, got {P_R}")
    if any(law is None for law in laws):
        raise UnsupportedModelError("every branch needs a power-law tail")
    if P_R == 0:
        return LogProbability(-math.inf)
    lv = log_mrc_offset([law.beta_slope for law in laws]) + math.fsum(law.log(P_R) for law in laws)
    return LogProbability(min(lv, 0.0))


def mrc_outage_powerlaw(laws: Sequence[PowerLawTail], P_R: float) -> float:
    return log_mrc_outage_powerlaw(laws, P_R).prob


def mrc_outage_equal_beta(laws: Sequence[PowerLawTail], P_R: float) -> float:
    """Equal-slope form written with branch power ratios against the first branch."""
    laws = list(laws)
    beta = laws[0].beta_slope
    if any(law.beta_slope != beta for law in laws):
        raise DomainError("all branches must share one slope")
    M = len(laws)
    a1 = laws[0].A
    log_v = (M * math.lgamma(1.0 + beta) - math.lgamma(1.0 + beta * M)
             + beta * M * math.log(P_R / a1)
             + math.fsum(math.log(law.alpha_offset) - beta * math.log(law.A / a1) for law in laws))
    return math.exp(log_v)


def mrc_heuristic_offset(M: int, beta: float) -> float:
    """Rough offset 1 / (M!)^beta."""
    if M < 1 or int(M) != M:
        raise DomainError(f"M must be a positive integer, got {M}")
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    return math.exp(-beta * math.lgamma(M + 1.0))


def mrc_outage_generic(bs: BranchSet, P_R: float, *, tails: bool = False) -> float:
    """Offset from the local slopes at P_R times the selection-combining product.

    With ``tails=True`` each branch enters through its tail approximation
    instead of its exact CDF.
    """
    betas = [b.local_slope(P_R) for b in bs]
    if tails:
        logs = [b.log_tail_approx(P_R) for b in bs]
        if any(v == -math.inf for v in logs):
            return 0.0
        return math.exp(log_mrc_offset(betas) + math.fsum(logs))
    log_sc = log_sc_outage(bs, P_R).log_value
    if log_sc == -math.inf:
        return 0.0
    return math.exp(log_mrc_offset(betas) + log_sc)


def mrc_outage_tail(bs: BranchSet, P_R: float) -> float:
    """Power-law MRC tail when every branch has one, else the local-slope expansion on tails."""
    laws = [b.power_law() for b in bs]
    if all(law is not None for law in laws) and all(law.valid_from == 0 for law in laws):
        return mrc_outage_powerlaw(laws, P_R)
    return mrc_outage_generic(bs, P_R, tails=True)


def mrc_phi(phis: Sequence[float], M: int | None = None) -> tuple[float, float]:
    """(exact, bernoulli) bound on the MRC relative error from the branch bounds."""
    phis = list(phis)
    if not phis:
        raise DomainError("need at least one phi")
    if any(not (p >= 0) for p in phis):
        raise DomainError(f"phi values must be >= 0, got {phis}")
    M = len(phis) if M is None else M
    top = max(phis)
    return math.expm1(M * math.log1p(top)), M * top


def mrc_phi_for(bs: BranchSet, P_R: float) -> tuple[float, float]:
    phis = []
    for i, b in enumerate(bs):
        try:
            phis.append(b.phi(P_R))
        except UnsupportedModelError as exc:
            raise PhiUnavailableError(i, b) from exc
    return mrc_phi(phis)


def outage(bs: BranchSet, scheme: DiversityScheme, P_R: float) -> float:
    if scheme is SC:
        return sc_outage(bs, P_R)
    return mrc_outage_generic(bs, P_R)


def simulate_reference(bs: BranchSet, scheme: DiversityScheme, P_R: float, *, n: int = 10**6,
                       seed: int = 0, workers: int = 1) -> float:
    """Monte Carlo estimate of the combined outage at one threshold."""
    from . import montecarlo

    tail = montecarlo.simulate_diversity(bs, scheme, n, seed, [P_R], workers=workers)
    return float(tail.eps_hat[0])
