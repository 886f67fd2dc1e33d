"""Special-function kernel for the channel catalog.

Everything here is pure and scalar-in/scalar-out unless stated. Functions whose
results can underflow in the deep lower tail have a ``log_`` twin.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

__all__ = [
    "DomainError",
    "LogProbability",
    "WBranch",
    "bessel_i",
    "log_bessel_i",
    "bessel_k",
    "log_bessel_k",
    "marcum_q",
    "marcum_p",
    "log_marcum_p",
    "reg_lower_gamma",
    "log_reg_lower_gamma",
    "kummer_1f1",
    "log_kummer_1f1",
    "elliptic_k",
    "lambert_w",
    "erfc",
    "log_erfc",
    "gen_laguerre",
]

EULER_GAMMA = 0.57721566490153286061


class DomainError(ValueError):
    """Argument outside the domain of a function or model."""


@dataclass(frozen=True)
class LogProbability:
    """Natural log of a probability in (0, 1]; ``-inf`` stands for zero."""

    log_value: float

    def __post_init__(self):
        if math.isnan(self.log_value) or self.log_value > 0.0:
            raise DomainError(f"log-probability must be <= 0, got {self.log_value}")

    @classmethod
    def from_prob(cls, p: float) -> "LogProbability":
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability outside [0, 1]: {p}")
        return cls(math.log(p) if p > 0.0 else -math.inf)

    @property
    def prob(self) -> float:
        return math.exp(self.log_value)

    def __mul__(self, other: "LogProbability") -> "LogProbability":
        return LogProbability(self.log_value + other.log_value)

    def log10(self) -> float:
        return self.log_value / math.log(10.0)


class WBranch(enum.Enum):
    PRINCIPAL = 0
    LOWER = -1


def _check_finite(**kwargs):
    for name, v in kwargs.items():
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v}")


# ---------------------------------------------------------------------------
# Bessel functions

def bessel_i(order: float, x: float) -> float:
    """Modified Bessel function of the first kind, real order >= 0."""
    _check_finite(order=order, x=x)
    if order < 0 or x < 0:
        raise DomainError(f"bessel_i needs order >= 0 and x >= 0, got ({order}, {x})")
    return float(sc.iv(order, x))


def log_bessel_i(order: float, x: float) -> float:
    """log I_order(x), usable where I overflows (exponentially scaled internally)."""
    _check_finite(order=order, x=x)
    if order < 0 or x < 0:
        raise DomainError(f"log_bessel_i needs order >= 0 and x >= 0, got ({order}, {x})")
    if x == 0.0:
        return 0.0 if order == 0 else -math.inf
    scaled = float(sc.ive(order, x))
    if scaled == 0.0:
        # tiny x with large order: leading ascending-series term
        return order * math.log(x / 2.0) - math.lgamma(order + 1.0)
    return math.log(scaled) + x


def bessel_k(order: int, x: float) -> float:
    """Modified Bessel function of the second kind for orders 0 and 1."""
    if order not in (0, 1):
        raise DomainError(f"bessel_k supports orders 0 and 1, got {order}")
    _check_finite(x=x)
    if x <= 0:
        raise DomainError(f"bessel_k diverges at x <= 0, got {x}")
    return float(sc.k0(x) if order == 0 else sc.k1(x))


def log_bessel_k(order: int, x: float) -> float:
    if order not in (0, 1):
        raise DomainError(f"bessel_k supports orders 0 and 1, got {order}")
    _check_finite(x=x)
    if x <= 0:
        raise DomainError(f"bessel_k diverges at x <= 0, got {x}")
    scaled = float(sc.k0e(x) if order == 0 else sc.k1e(x))
    return math.log(scaled) - x


# ---------------------------------------------------------------------------
# Incomplete gamma

def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a)."""
    _check_finite(a=a, x=x)
    if a <= 0 or x < 0:
        raise DomainError(f"reg_lower_gamma needs a > 0, x >= 0, got ({a}, {x})")
    return float(sc.gammainc(a, x))


def _log_lower_gamma_series(a: np.ndarray, x: float) -> np.ndarray:
    # log P(a, x) from x^a e^-x / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n))
    n_terms = int(60 + 4 * x)
    n = np.arange(1, n_terms + 1, dtype=float)
    a = np.atleast_1d(a).astype(float)
    log_ratio = math.log(x) - np.log(a[:, None] + n[None, :])
    log_terms = np.concatenate([np.zeros((a.size, 1)), np.cumsum(log_ratio, axis=1)], axis=1)
    return a * math.log(x) - x - sc.gammaln(a + 1.0) + sc.logsumexp(log_terms, axis=1)


def log_reg_lower_gamma(a, x: float):
    """log P(a, x) without underflow for tiny x; ``a`` may be an array."""
    scalar = np.isscalar(a)
    arr = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(arr <= 0) or x < 0 or not math.isfinite(x):
        raise DomainError(f"log_reg_lower_gamma needs a > 0, x >= 0, got ({a}, {x})")
    if x == 0.0:
        out = np.full(arr.shape, -np.inf)
    else:
        out = np.empty(arr.shape)
        series = arr + 1.0 >= x
        if np.any(series):
            out[series] = _log_lower_gamma_series(arr[series], x)
        if np.any(~series):
            out[~series] = np.log1p(-sc.gammaincc(arr[~series], x))
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Marcum Q

def _marcum_terms(order: float, a: float, b: float):
    lam = 0.5 * a * a
    x = 0.5 * b * b
    if lam == 0.0:
        k = np.zeros(1)
        log_w = np.zeros(1)
    else:
        spread = 12.0 * math.sqrt(lam) + 40.0
        k = np.arange(max(0.0, math.floor(lam - spread)), math.ceil(lam + spread) + 1)
        log_w = -lam + k * math.log(lam) - sc.gammaln(k + 1.0)
    return k, log_w, x, lam


def _check_marcum(order, a, b):
    _check_finite(order=order, a=a, b=b)
    if order <= 0 or a < 0 or b < 0:
        raise DomainError(f"marcum_q needs order > 0, a >= 0, b >= 0, got ({order}, {a}, {b})")


def _use_lower_series(order, lam, x):
    return x < lam + order


def marcum_p(order: float, a: float, b: float) -> float:
    """Complementary Marcum function 1 - Q_order(a, b), accurate in the lower tail.

    Evaluated as a Poisson mixture of regularized incomplete gamma functions,
    summing whichever side of the crossover is the small one.
    """
    _check_marcum(order, a, b)
    if b == 0.0:
        return 0.0
    k, log_w, x, lam = _marcum_terms(order, a, b)
    w = np.exp(log_w)
    if _use_lower_series(order, lam, x):
        return math.fsum(w * sc.gammainc(order + k, x))
    return 1.0 - math.fsum(w * sc.gammaincc(order + k, x))


def marcum_q(order: float, a: float, b: float) -> float:
    """Generalized Marcum Q function of real order."""
    _check_marcum(order, a, b)
    if b == 0.0:
        return 1.0
    k, log_w, x, lam = _marcum_terms(order, a, b)
    w = np.exp(log_w)
    if _use_lower_series(order, lam, x):
        return 1.0 - math.fsum(w * sc.gammainc(order + k, x))
    return math.fsum(w * sc.gammaincc(order + k, x))


def log_marcum_p(order: float, a: float, b: float) -> float:
    """log(1 - Q_order(a, b)); finite even where 1 - Q underflows."""
    _check_marcum(order, a, b)
    if b == 0.0:
        return -math.inf
    k, log_w, x, lam = _marcum_terms(order, a, b)
    if not _use_lower_series(order, lam, x):
        return math.log1p(-marcum_q(order, a, b))
    if x < 1e-30:
        # leading term x^s / Gamma(s + 1); b^2/2 may underflow, its log does not
        log_x = 2.0 * math.log(b) - math.log(2.0)
        s_k = order + k
        return float(sc.logsumexp(log_w + s_k * log_x - sc.gammaln(s_k + 1.0)))
    return float(sc.logsumexp(log_w + log_reg_lower_gamma(order + k, x)))


# ---------------------------------------------------------------------------
# Kummer confluent hypergeometric 1F1

def _log_1f1_positive(a: float, b: float, x: np.ndarray) -> np.ndarray:
    # all-positive series; requires a >= 0, b > 0, x >= 0
    xmax = float(np.max(x)) if x.size else 0.0
    # peak term sits where (a + n) x = (b + n)(n + 1)
    lin = b + 1.0 - xmax
    peak = max(0.0, 0.5 * (-lin + math.sqrt(lin * lin + 4.0 * max(0.0, a * xmax - b))))
    n_terms = int(80 + 2.5 * peak + 12.0 * math.sqrt(peak))
    n = np.arange(n_terms, dtype=float)
    with np.errstate(divide="ignore"):
        logx = np.log(x)
        # a = 0 gives log(0) = -inf, i.e. the series stops after one term
        log_coef = np.log(a + n) - np.log(b + n) - np.log1p(n)
    log_terms = np.cumsum(log_coef)[None, :] + (n[None, :] + 1.0) * logx[:, None]
    log_terms = np.concatenate([np.zeros((x.size, 1)), log_terms], axis=1)
    log_terms = np.where(np.isnan(log_terms), -np.inf, log_terms)
    return sc.logsumexp(log_terms, axis=1)


def log_kummer_1f1(a: float, b: float, x):
    """log 1F1(a; b; x) for a >= 0 (or b - a >= 0 when x < 0); ``x`` may be an array."""
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"kummer_1f1 undefined for nonpositive integer b={b}")
    if b <= 0:
        raise DomainError(f"log_kummer_1f1 needs b > 0, got {b}")
    scalar = np.isscalar(x)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.shape)
    pos = xs >= 0
    if np.any(pos):
        if a < 0:
            raise DomainError("log_kummer_1f1 with x >= 0 needs a >= 0 (sign may change)")
        out[pos] = _log_1f1_positive(a, b, xs[pos])
    if np.any(~pos):
        # Kummer transformation 1F1(a;b;x) = e^x 1F1(b-a;b;-x)
        if b - a < 0:
            raise DomainError("log_kummer_1f1 with x < 0 needs b - a >= 0 (sign may change)")
        out[~pos] = xs[~pos] + _log_1f1_positive(b - a, b, -xs[~pos])
    return float(out[0]) if scalar else out


def kummer_1f1(a: float, b: float, x: float) -> float:
    """Kummer's function of the first kind 1F1(a; b; x)."""
    _check_finite(a=a, b=b, x=x)
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"kummer_1f1 undefined for nonpositive integer b={b}")
    positive_series = b > 0 and ((x >= 0 and a >= 0) or (x < 0 and b - a >= 0))
    if positive_series:
        log_val = log_kummer_1f1(a, b, x)
        if log_val > 709.78:
            raise OverflowError(f"1F1({a}; {b}; {x}) overflows; use log_kummer_1f1")
        return math.exp(log_val)
    val = float(sc.hyp1f1(a, b, x))
    if math.isinf(val):
        raise OverflowError(f"1F1({a}; {b}; {x}) overflows")
    return val


# ---------------------------------------------------------------------------
# Complete elliptic integral, parameter convention K(m), m = k^2

def elliptic_k(m: float) -> float:
    """Complete elliptic integral of the first kind, K(m) = int dt / sqrt(1 - m sin^2 t)."""
    _check_finite(m=m)
    if m < 0 or m >= 1:
        raise DomainError(f"elliptic_k needs 0 <= m < 1, got {m}")
    a, g = 1.0, math.sqrt(1.0 - m)
    for _ in range(60):
        if abs(a - g) <= 1e-16 * a:
            break
        a, g = 0.5 * (a + g), math.sqrt(a * g)
    return math.pi / (2.0 * a)


def elliptic_k_array(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if np.any((m < 0) | (m >= 1)):
        raise DomainError("elliptic_k needs 0 <= m < 1")
    a = np.ones_like(m)
    g = np.sqrt(1.0 - m)
    for _ in range(60):
        if np.all(np.abs(a - g) <= 1e-16 * a):
            break
        a, g = 0.5 * (a + g), np.sqrt(a * g)
    return np.pi / (2.0 * a)


# ---------------------------------------------------------------------------
# Lambert W

_INV_E = math.exp(-1.0)


def _lambert_initial(x: float, lower: bool) -> float:
    p2 = 2.0 * (math.e * x + 1.0)
    if p2 < 0.5:
        p = math.sqrt(max(p2, 0.0))
        if lower:
            p = -p
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    if lower:
        L1 = math.log(-x)
        return L1 - math.log(-L1)
    if x < 3.0:
        return math.log1p(x) * (1.0 - math.log1p(math.log1p(x)) / (2.0 + math.log1p(x)))
    L1 = math.log(x)
    L2 = math.log(L1)
    return L1 - L2 + L2 / L1


def lambert_w(branch: WBranch, x: float) -> float:
    """Real Lambert W on the principal (w >= -1) or lower (w <= -1) branch."""
    _check_finite(x=x)
    lower = branch is WBranch.LOWER
    if x < -_INV_E - 1e-15 or (lower and x >= 0):
        raise DomainError(f"lambert_w {branch.name.lower()} branch undefined at {x}")
    x = max(x, -_INV_E)
    if x == 0.0:
        return 0.0
    if x == -_INV_E:
        return -1.0
    w = _lambert_initial(x, lower)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w_new = w - step
        if lower and w_new > -1.0:
            w_new = 0.5 * (w - 1.0)
        if not lower and w_new < -1.0:
            w_new = 0.5 * (w - 1.0)
        if abs(w_new - w) <= 4e-16 * max(1.0, abs(w_new)):
            w = w_new
            break
        w = w_new
    return w


# ---------------------------------------------------------------------------
# Error function

def erfc(x: float) -> float:
    """Complementary error function."""
    if math.isnan(x):
        raise DomainError("erfc of NaN")
    return float(sc.erfc(x))


def log_erfc(x: float) -> float:
    """log erfc(x), finite deep into the right tail."""
    if math.isnan(x):
        raise DomainError("log_erfc of NaN")
    # erfc(x) = 2 * Phi(-x sqrt 2)
    return math.log(2.0) + float(sc.log_ndtr(-x * math.sqrt(2.0)))


# ---------------------------------------------------------------------------
# Generalized Laguerre polynomials

def gen_laguerre(n: int, order: float, x: float) -> float:
    """L_n^(order)(x) by the three-term recurrence."""
    if n < 0 or int(n) != n:
        raise DomainError(f"gen_laguerre degree must be a nonnegative integer, got {n}")
    if order <= -1:
        raise DomainError(f"gen_laguerre order must exceed -1, got {order}")
    prev, cur = 1.0, 1.0 + order - x
    if n == 0:
        return prev
    for k in range(1, int(n)):
        prev, cur = cur, ((2 * k + 1 + order - x) * cur - (k + order) * prev) / (k + 1)
    return cur
