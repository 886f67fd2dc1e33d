import json
import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from fadetail import specfun
from fadetail.models import (
    ALL_MODELS,
    TWDP,
    CascadedRayleigh,
    ChannelModel,
    DomainError,
    KappaMu,
    KappaMuAlpha,
    KappaMuM,
    LogNormal,
    Nakagami,
    QuadratureError,
    Rayleigh,
    Rician,
    Suzuki,
    ThreeWave,
    TwoWave,
    UnsupportedModelError,
    Weibull,
    approx_error_phi,
    cdf,
    delta_ratio,
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
from fadetail.models._quad import quad_cdf


def rel(a, b):
    return abs(a - b) / abs(b)


CATALOG = [
    TwoWave(1, 1), TwoWave(1, 0.5), ThreeWave(1, 0.7850, 0.2109), ThreeWave(1, 0.5, 0.3),
    Rayleigh(), Rician(5), TWDP(5, 0.8), TWDP(10, 0.9), Weibull(2), Weibull(0.5), Nakagami(2), Nakagami(0.5),
    KappaMu(3.9, 2), KappaMu(1, 0.5), KappaMuM(3.9, 2, 0.25), KappaMuM(1, 0.5, 2),
    KappaMuAlpha(3.9, 2, 1.5), KappaMuAlpha(1, 0.5, 3), Suzuki(6), Suzuki(12), LogNormal.unit_mean(6),
    CascadedRayleigh(0), CascadedRayleigh(0.5), CascadedRayleigh(1),
]


# --- scalar helpers ------------------------------------------------------

def test_delta_ratio():
    assert delta_ratio(1, 1) == 1.0
    assert delta_ratio(1, 0.5) == pytest.approx(0.8, rel=1e-15)
    assert delta_ratio(1, 1e-12) < 1e-11
    assert delta_ratio(0.3, 2.0) == delta_ratio(2.0, 0.3)
    with pytest.raises(DomainError):
        delta_ratio(1, 0)


def test_outage_threshold():
    assert outage_threshold(0) == 0.0
    assert outage_threshold(1) == 1.0
    assert rel(outage_threshold(0.1), 0.07177346253629316421) <= 1e-14
    with pytest.raises(DomainError):
        outage_threshold(-1)


def test_mean_power():
    assert mean_power(TwoWave(1, 1)) == 2.0
    assert mean_power(LogNormal.unit_mean(6)) == pytest.approx(1.0, rel=1e-14)
    assert mean_power(Suzuki.unit_mean(9)) == pytest.approx(1.0, rel=1e-14)
    assert mean_power(CascadedRayleigh(0, 1.0)) == 1.0
    assert mean_power(ThreeWave(1, 0.5, 0.25)) == 1.3125


# --- construction and serialization --------------------------------------

@pytest.mark.parametrize("bad", [
    lambda: Rayleigh(0), lambda: Rician(-1), lambda: TWDP(1, 1.5), lambda: Weibull(0.3),
    lambda: Nakagami(0.4), lambda: KappaMu(1, 0), lambda: KappaMuAlpha(1, 1, 1.0),
    lambda: KappaMuAlpha(1, 1, 0.5), lambda: Suzuki(0), lambda: CascadedRayleigh(1.2),
    lambda: TwoWave(1, -1), lambda: ThreeWave(1, 1, 0),
])
def test_invalid_parameters(bad):
    with pytest.raises(DomainError):
        bad()


@pytest.mark.parametrize("model", CATALOG, ids=lambda m: repr(m))
def test_json_roundtrip(model):
    obj = json.loads(json.dumps(model.to_json()))
    assert ChannelModel.from_json(obj) == model
    assert load_model(json.dumps(obj)) == model


def test_json_errors():
    with pytest.raises(DomainError):
        ChannelModel.from_json({"model": "Nope", "params": {}})
    with pytest.raises(DomainError):
        ChannelModel.from_json({"model": "Rayleigh", "params": {"A": 1, "B": 2}})


def test_catalog_complete():
    assert len(ALL_MODELS) == 13
    assert {m.name for m in ALL_MODELS} == set(ChannelModel.registry)


def test_models_are_immutable():
    m = Rician(3)
    with pytest.raises(Exception):
        m.k1 = 4


# --- densities -----------------------------------------------------------

def _support_pieces(model):
    lo, hi = model.support()
    pts = list(model._switch_points()) if isinstance(model, ThreeWave) else []
    if math.isinf(hi):
        return [(lo, np.inf)]
    edges = [lo] + pts + [hi]
    return list(zip(edges[:-1], edges[1:]))


@pytest.mark.parametrize("model", CATALOG, ids=lambda m: repr(m))
def test_pdf_normalized(model):
    total = 0.0
    for a, b in _support_pieces(model):
        total += integrate.quad(model.pdf, a, b, limit=500)[0]
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("model", CATALOG, ids=lambda m: repr(m))
def test_pdf_matches_cdf(model):
    # d/dr F(r^2) = pdf(r) at an interior point
    lo, hi = model.support()
    A = model.mean_power()
    r = math.sqrt(0.3 * A)
    if not lo < r < hi:
        r = 0.5 * (lo + min(hi, 2 * math.sqrt(A)))
    h = 1e-5 * r
    deriv = (model.cdf((r + h) ** 2) - model.cdf((r - h) ** 2)) / (2 * h)
    assert deriv == pytest.approx(model.pdf(r), rel=1e-5)


def test_pdf_examples():
    assert pdf(Rayleigh(1), 0.0) == 0.0
    tw = TwoWave(1, 1)
    assert pdf(tw, 2.5) == 0.0
    assert pdf(tw, 2.0000001) == 0.0
    m = ThreeWave(1, 0.7850, 0.2109)
    r_min = max(2 * 1 - (1 + 0.7850 + 0.2109), 0)
    assert m.support()[0] == pytest.approx(r_min)
    assert pdf(m, 0.5 * r_min) == 0.0
    with pytest.raises(DomainError):
        pdf(Rayleigh(), -1.0)


# --- exact CDFs against independent oracles --------------------------------

def test_rayleigh_cdf_series():
    series = math.fsum((-1) ** (k + 1) * 0.01 ** k / math.factorial(k) for k in range(1, 20))
    assert rel(cdf(Rayleigh(1), 0.01), series) <= 1e-14
    assert rel(series, 0.00995016625083194643) <= 1e-15


def test_kappamu_cdf_laguerre_oracle():
    m = KappaMu(3.9, 2, 1.0)
    k, mu, p = 3.9, 2.0, 1e-3
    x = (k + 1) * mu * p
    series = math.fsum(math.exp(-k * mu) * (-1) ** n * specfun.gen_laguerre(n, mu - 1, k * mu)
                       * x ** (n + mu) / math.gamma(mu + n + 1) for n in range(50))
    assert rel(cdf(m, p), series) <= 1e-6
    assert rel(cdf(m, 1e-4), 1.97127679332580769249e-10) <= 1e-10


def test_two_wave_support():
    m = TwoWave(1, 0.5)
    A, d = m.mean_power(), m.delta
    assert cdf(m, A * (1 - d) * (1 - 1e-12)) == 0.0
    assert cdf(m, A * (1 + d) * (1 + 1e-12)) == 1.0
    assert cdf(m, A * (1 - d) * (1 + 1e-6)) > 0.0


def test_two_wave_arcsine_form():
    # textbook form 1/2 - asin(1 - q)/pi
    m = TwoWave(1, 1)
    for p in (1e-4, 0.3, 1.2):
        q = p / 1.0
        assert rel(cdf(m, 2 * p), 0.5 - math.asin(1 - q) / math.pi) <= 1e-12
    assert rel(cdf(m, 2e-4), 0.00450161909480944189) <= 1e-12


def _three_wave_phase_oracle(model, P):
    # fix the phase of the second wave; the remaining pair is a two-wave channel
    r1, r2, r3 = model.ordered
    sp = math.sqrt(P)

    def tw_cdf(c):
        lo, hi = (c - r3) ** 2, (c + r3) ** 2
        if P <= lo:
            return 0.0
        if P >= hi:
            return 1.0
        cos_t = (P - c * c - r3 * r3) / (2 * c * r3)
        return 1.0 - math.acos(max(-1.0, min(1.0, cos_t))) / math.pi

    def f(phi):
        return tw_cdf(math.sqrt(max(r1 * r1 + r2 * r2 + 2 * r1 * r2 * math.cos(phi), 0.0)))

    pts = []
    for t in (abs(r3 - sp), r3 + sp):
        c = (t * t - r1 * r1 - r2 * r2) / (2 * r1 * r2)
        if -1 < c < 1:
            pts.append(math.acos(c))
    val = integrate.quad(f, 0, math.pi, points=sorted(pts) or None, limit=500, epsabs=0, epsrel=1e-12)[0]
    return val / math.pi


@pytest.mark.parametrize("model", [ThreeWave(1, 0.7914, 0.2126), ThreeWave(1, 0.7850, 0.2109),
                                   ThreeWave(1, 0.5, 0.3), ThreeWave(0.4, 1.0, 0.7)])
def test_three_wave_phase_average(model):
    A = model.mean_power()
    for p in (1e-6, 1e-4, 1e-2, 0.3, 1.0):
        P = p * A
        oracle = _three_wave_phase_oracle(model, P)
        got = cdf(model, P)
        if oracle == 0:
            assert got == 0
        else:
            assert rel(got, oracle) <= 1e-6


def test_three_wave_tail_and_slopes():
    m = ThreeWave(1, 0.7914, 0.2126)
    assert m.delta_rho < 0
    law = power_law(m)
    assert law.beta_slope == 1.0
    # A / (4 pi Delta_r(0)) with Delta_r^2 carrying the 1/16 factor
    r1, r2, r3 = m.ordered
    d0 = math.sqrt((r1 * r1 - (r2 - r3) ** 2) * ((r2 + r3) ** 2 - r1 * r1)) / 4
    assert rel(law.alpha_offset, m.mean_power() / (4 * math.pi * d0)) <= 1e-14
    P = 1e-9 * m.mean_power()
    assert rel(tail_approx(m, P), cdf(m, P)) <= 1e-4
    assert m.slope_info(P) == (1.0, "table")
    balanced = ThreeWave(1, 0.5, 0.5)
    assert power_law(balanced) is None
    assert balanced.slope_info(1e-6) == (0.75, "asserted")
    with pytest.raises(UnsupportedModelError):
        tail_approx(balanced, 1e-6)
    gap = ThreeWave(1, 0.5, 0.3)
    assert power_law(gap) is None
    assert gap.slope_info(0.3)[1] == "numerical"


def test_twdp_against_psi_average():
    # conditional on the phase difference: Rician with K(psi) and diffuse power held fixed
    m = TWDP(5, 0.8)

    def rician(psi):
        k = 5 * (1 + 0.8 * math.cos(psi))
        return Rician(k, (1 + k) / 6)

    for p in (1e-6, 1e-3, 0.1, 1.0):
        f = lambda psi: rician(psi).cdf(p)
        oracle = integrate.quad(f, 0, math.pi, epsabs=0, epsrel=1e-12)[0] / math.pi
        assert rel(cdf(m, p), oracle) <= 1e-10


def _twdp_bound_margin(k2, d):
    # sign of E[(K - 1) e^{-K}] over the phase, K = k2 (1 + d cos psi)
    return k2 * (1 - d * special.i1(k2 * d) / special.i0(k2 * d)) - 1


@pytest.mark.parametrize("k2,d", [(5, 0.8), (10, 0.9), (2, 0.3), (2, 0)])
def test_twdp_lower_bound(k2, d):
    assert _twdp_bound_margin(k2, d) >= 0
    m = TWDP(k2, d)
    p_max = 1 / (4 * k2 * (k2 + 1))
    for p in np.geomspace(1e-8, 0.1 * p_max, 8):
        assert cdf(m, p) >= tail_approx(m, p)


@pytest.mark.parametrize("k2,d", [(1, 0.5), (3, 1.0), (0.5, 0.2)])
def test_twdp_lower_bound_fails_outside_condition(k2, d):
    assert _twdp_bound_margin(k2, d) < 0
    m = TWDP(k2, d)
    assert cdf(m, 1e-4) < tail_approx(m, 1e-4)


def test_twdp_deep_tail_log():
    m = TWDP(10, 0.9)
    P = 1e-300
    assert m.log_cdf(P) == pytest.approx(math.log(tail_approx(m, 1e-200)) - 100 * math.log(10), rel=1e-10)


def test_suzuki_against_lognormal_mixture():
    m = Suzuki(6)
    s, mu = m.sigma_l, m.mu_l
    for p in (1e-6, 1e-2, 0.5):
        f = lambda x: stats.norm.pdf(x, mu, s) * -math.expm1(-p / math.exp(2 * x))
        oracle = integrate.quad(f, mu - 40 * s, mu + 40 * s, points=[0.5 * math.log(p)], limit=400,
                                epsabs=0, epsrel=1e-12)[0]
        assert rel(cdf(m, p), oracle) <= 1e-9


@pytest.mark.parametrize("sigma_dB", [3, 6, 9, 12])
def test_suzuki_bounds(sigma_dB):
    m = Suzuki(sigma_dB)
    for p in np.geomspace(1e-8, 1e-2, 7):
        lower, upper = m.bounds(p)
        c = cdf(m, p)
        assert lower <= c <= upper


def test_suzuki_tail_example():
    m = Suzuki(6)
    # e^{4 sigma_l^2} at 6 dB from a 30-digit evaluation
    assert rel(power_law(m).alpha_offset, 6.74420299120098753602) <= 1e-12
    assert rel(tail_approx(m, 1e-6 * m.mean_power()), 6.74420299120098753602e-6) <= 1e-12


def test_kappamu_m_against_gamma_mixture():
    m = KappaMuM(3.9, 2, 0.25)
    g = stats.gamma(0.25, scale=4.0)
    for p in (1e-3, 1e-2, 0.3):
        f = lambda t: g.pdf(t) * specfun.marcum_p(2, math.sqrt(2 * 3.9 * 2 * t), math.sqrt(2 * 4.9 * 2 * p))
        oracle = (integrate.quad(f, 0, 1, points=[1e-6, 1e-3], limit=200, epsabs=0, epsrel=1e-12)[0]
                  + integrate.quad(f, 1, np.inf, limit=200, epsabs=0, epsrel=1e-12)[0])
        assert rel(cdf(m, p), oracle) <= 1e-9


def _kma_oracle(kappa, mu, alpha, p):
    g = stats.invgamma(alpha, scale=alpha - 1)
    a = math.sqrt(2 * kappa * mu)

    def f(w):
        return g.pdf(w) * specfun.marcum_p(mu, a, math.sqrt(2 * (1 + kappa) * mu * p / w))

    edges = [0, p, 1, 100, np.inf]
    return sum(integrate.quad(f, lo, hi, limit=400, epsabs=0, epsrel=1e-11)[0] for lo, hi in zip(edges, edges[1:]))


@pytest.mark.parametrize("params", [(3.9, 2, 1.5), (1, 0.5, 3), (0, 1.3, 2.2)])
def test_kappamu_alpha_against_inverse_gamma_mixture(params):
    m = KappaMuAlpha(*params)
    for p in (1e-6, 1e-3, 0.1):
        assert rel(cdf(m, p), _kma_oracle(*params, p)) <= 1e-8


def test_kappamu_alpha_heuristic():
    m = KappaMuAlpha(3.9, 2, 1.5)
    p = 1e-6
    plain = tail_approx(m, p)
    heur = tail_approx_kappamu_alpha_heuristic(m, p)
    exact = _kma_oracle(3.9, 2, 1.5, p)
    assert plain < heur < exact
    for p in np.geomspace(1e-8, 1e-2, 7):
        assert tail_approx_kappamu_alpha_heuristic(m, p) >= tail_approx(m, p)
        assert tail_approx_kappamu_alpha_heuristic(m, p) <= cdf(m, p)
    # kappa = 0: the 1F1 factor is 1
    z = KappaMuAlpha(0, 2, 1.5)
    V = z.c * p / (1 + z.c * p)
    closed = V ** 2 * (1 - V) ** 0.5 / (2 * special.beta(1.5, 2))
    assert rel(z.tail_approx_heuristic(p), closed) <= 1e-12
    # weak shadowing recovers the kappa-mu tail
    big = KappaMuAlpha(3.9, 2, 1e4)
    assert rel(big.tail_approx_heuristic(1e-6), KappaMu(3.9, 2).tail_approx(1e-6)) <= 0.01
    with pytest.raises(UnsupportedModelError):
        tail_approx_kappamu_alpha_heuristic(KappaMu(1, 1), 1e-3)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_cascaded_product_of_exponentials():
    m = CascadedRayleigh(0, 1.0)
    for p in (1e-9, 1e-5, 1e-2, 0.5):
        # P/A = E1 E2 with unit exponentials
        oracle = integrate.quad(lambda e: math.exp(-e) * -math.expm1(-p / e), 0, np.inf,
                                points=None, limit=400, epsabs=0, epsrel=1e-12)[0] if p < 1e-3 else \
            1 - 2 * math.sqrt(p) * special.k1(2 * math.sqrt(p))
        assert rel(cdf(m, p), oracle) <= 1e-8


def test_cascaded_singular_case():
    m = CascadedRayleigh(1.0, 2.0)
    link = Rayleigh(math.sqrt(m.A / 2))
    for P in (1e-8, 1e-3, 0.5, 3.0):
        assert rel(cdf(m, P), link.cdf(math.sqrt(P))) <= 1e-14
    assert local_slope(m, 1e-6) == 0.5


def test_cascaded_tail_domain():
    m = CascadedRayleigh(0.5)
    assert m.knee() == pytest.approx(0.25 * 0.25 / 1.5)
    assert m.below_knee(1e-3) and not m.below_knee(0.2)
    with pytest.raises(DomainError):
        tail_approx(m, 0.2)


def test_lognormal_cdf_erfc():
    m = LogNormal(6, -3)
    for P in (1e-8, 1e-3, 1.0):
        z = (0.5 * math.log(P) - m.mu_l) / m.sigma_l
        assert rel(cdf(m, P), stats.norm.cdf(z)) <= 1e-12


# --- power laws ----------------------------------------------------------

def test_power_law_table():
    assert (power_law(Rayleigh()).alpha_offset, power_law(Rayleigh()).beta_slope) == (1.0, 1.0)
    law = power_law(Nakagami(2))
    assert (law.alpha_offset, law.beta_slope) == pytest.approx((2.0, 2.0), rel=1e-15)
    law = power_law(Rician(5))
    assert rel(law.alpha_offset, 0.04042768199451280258) <= 1e-10 and law.beta_slope == 1
    law = power_law(KappaMu(3.9, 2))
    assert rel(law.alpha_offset, 0.01967547369060935774) <= 1e-10 and law.beta_slope == 2
    law = power_law(TwoWave(1, 1))
    assert law.alpha_offset == pytest.approx(math.sqrt(2) / math.pi) and law.beta_slope == 0.5
    assert power_law(LogNormal(6)) is None
    assert power_law(CascadedRayleigh(0.3)) is None


def test_power_law_rows_formulas():
    k2, d = 4.0, 0.7
    assert rel(power_law(TWDP(k2, d)).alpha_offset, (k2 + 1) * math.exp(-k2) * special.i0(k2 * d)) <= 1e-13
    b = 1.7
    assert rel(power_law(Weibull(b)).alpha_offset, math.gamma(1 + 1 / b) ** b) <= 1e-13
    k, mu, mm = 3.9, 2.0, 0.25
    row = (math.exp(-k) * (k + 1) * mu) ** mu / math.gamma(mu + 1)
    # kappa-mu/m offset: mu^mu (1+k)^mu / Gamma(mu+1) (m/(k mu + m))^m
    assert rel(power_law(KappaMuM(k, mu, mm)).alpha_offset,
               mu ** mu * (1 + k) ** mu / math.gamma(mu + 1) * (mm / (k * mu + mm)) ** mm) <= 1e-13
    a = 1.5
    assert rel(power_law(KappaMuAlpha(k, mu, a)).alpha_offset,
               row * math.gamma(a + mu) / ((a - 1) ** mu * math.gamma(a))) <= 1e-13
    s = Suzuki(9)
    assert rel(power_law(s).alpha_offset, math.exp(4 * s.sigma_l ** 2)) <= 1e-15


def test_tail_examples():
    m = TwoWave(1, 1)
    # relative power 1e-4 with A = 2
    assert rel(tail_approx(m, 2e-4), math.sqrt(2) / math.pi * 1e-2) <= 1e-14
    assert rel(tail_approx(m, 2e-4), 4.50158158e-3) <= 1e-8
    eps, t, phi = cdf(m, 2e-4), tail_approx(m, 2e-4), approx_error_phi(m, 2e-4)
    assert t * (1 - phi) <= eps <= t * (1 + phi)
    assert tail_approx(Rayleigh(1), 1e-5) == 1e-5


def test_unbalanced_two_wave_tail_domain():
    m = TwoWave(1, 0.5)
    with pytest.raises(DomainError):
        tail_approx(m, 0.5 * m.power_law().valid_from)


@pytest.mark.parametrize("model", [m for m in CATALOG if m.power_law() is not None and m.power_law().valid_from == 0],
                         ids=repr)
def test_asymptotic_ratio(model):
    A = model.mean_power()
    for p in (1e-8, 1e-10):
        r = cdf(model, p * A) / tail_approx(model, p * A)
        tol = 0.02 if isinstance(model, Suzuki) else 1e-3
        assert r == pytest.approx(1.0, abs=tol)


# --- error functions ------------------------------------------------------

PHI_MODELS = [TwoWave(1, 1), TwoWave(1, 0.6), Rayleigh(), Rician(0.5), Rician(5), Weibull(0.5), Weibull(2),
              Nakagami(0.5), Nakagami(3), KappaMu(0, 1.5), KappaMu(3.9, 2)]


@pytest.mark.parametrize("model", PHI_MODELS, ids=repr)
def test_phi_monotone_and_sandwich(model):
    A = model.mean_power()
    law = model.power_law()
    lo = max(1e-9 * A, law.valid_from * (1 + 1e-9))
    top = validity_bound(model, 1.0)
    grid = np.geomspace(lo, top, 25)
    phis = [approx_error_phi(model, P) for P in grid]
    assert all(b >= a for a, b in zip(phis, phis[1:]))
    for P, f in zip(grid, phis):
        e, t = cdf(model, P), tail_approx(model, P)
        assert t * (1 - f) - 1e-12 <= e <= t * (1 + f) + 1e-12


def test_phi_at_zero():
    for m in (Rayleigh(), Rician(3), Weibull(1.5), Nakagami(2), KappaMu(2, 1.5)):
        assert approx_error_phi(m, 0.0) == 0.0


def test_phi_examples():
    assert approx_error_phi(Rayleigh(1), 0.1) == pytest.approx(0.05, rel=1e-15)
    assert rel(approx_error_phi(Nakagami(2, 1), 0.05), 0.09516258196404042684) <= 1e-14
    for P in (1e-4, 0.02):
        chain = [approx_error_phi(KappaMu(0, 1), P), approx_error_phi(Rician(0), P), math.expm1(P)]
        assert chain[0] == pytest.approx(chain[2], rel=1e-14)
        assert chain[1] == pytest.approx(chain[2], rel=1e-14)


@pytest.mark.parametrize("model", [TWDP(1, 1), Suzuki(3), LogNormal(3), CascadedRayleigh(0), KappaMuM(1, 1, 1),
                                   KappaMuAlpha(1, 1, 2), ThreeWave(1, 0.5, 0.6)], ids=repr)
def test_phi_unsupported(model):
    with pytest.raises(UnsupportedModelError):
        approx_error_phi(model, 1e-3)
    with pytest.raises(UnsupportedModelError):
        validity_bound(model, 0.1)


def test_validity_bound_examples():
    assert validity_bound(Rayleigh(1), 0.1) == pytest.approx(2 * 0.1 / 1.1, rel=1e-15)
    vb = validity_bound(Rician(5, 1), 0.1)
    assert rel(vb, 0.00123909459814157406) <= 1e-10
    assert abs(approx_error_phi(Rician(5), vb) - 1 / 11) <= 1e-10 / 11


@pytest.mark.parametrize("model", PHI_MODELS, ids=repr)
def test_validity_bound_monotone_and_root(model):
    bounds = [validity_bound(model, eta) for eta in (0.001, 0.01, 0.1, 1.0)]
    assert all(b > a for a, b in zip(bounds, bounds[1:]))
    for eta, b in zip((0.001, 0.01, 0.1, 1.0), bounds):
        assert approx_error_phi(model, b) == pytest.approx(eta / (1 + eta), rel=1e-10)


# --- slopes and inversion ----------------------------------------------------

def test_local_slope_examples():
    assert local_slope(Rayleigh(), 1e-3) == 1.0
    assert local_slope(Nakagami(2.5), 0.2) == 2.5
    m = CascadedRayleigh(0, 1)
    slopes = [local_slope(m, p) for p in (1e-3, 1e-6, 1e-12, 1e-100)]
    assert all(b > a for a, b in zip(slopes, slopes[1:]))
    assert slopes[-1] == pytest.approx(1.0, abs=0.005)
    ln = LogNormal(6, 0)
    s = local_slope(ln, 10 ** (-30 / 10))
    assert rel(s, (10 / math.log(10)) * (0.223 / 6 + 30 / 36)) <= 1e-12
    assert rel(s, 3.78053346496780716) <= 1e-12
    # finite difference of the log-log tail
    P, h = 1e-3, 1e-4
    fd = (ln.log_tail_approx(P * math.exp(h)) - ln.log_tail_approx(P * math.exp(-h))) / (2 * h)
    assert abs(fd - s) <= 1e-3


def test_cascaded_slope_finite_difference():
    m = CascadedRayleigh(0.4, 1)
    P, h = 1e-5, 1e-5
    fd = (math.log(tail_approx(m, P * math.exp(h))) - math.log(tail_approx(m, P * math.exp(-h)))) / (2 * h)
    assert local_slope(m, P) == pytest.approx(fd, rel=1e-7)


def test_invert_examples():
    assert invert_tail(Rayleigh(1), 1e-9) == pytest.approx(1e-9, rel=1e-15)
    assert invert_tail(Nakagami(2, 1), 2e-8) == pytest.approx(1e-4, rel=1e-12)
    m = CascadedRayleigh(0, 1)
    P = invert_tail(m, 1e-6)
    assert rel(tail_approx(m, P), 1e-6) < 1e-9
    with pytest.raises(DomainError):
        invert_tail(m, 0.5)
    with pytest.raises(DomainError):
        invert_tail(LogNormal(6), 0.3)
    with pytest.raises(DomainError):
        invert_tail(Rayleigh(), 0.0)


def test_lognormal_inversion_branch():
    # the returned level sits below the median, on the tail side
    m = LogNormal(6, 0)
    for eps in (1e-9, 1e-3, 0.2):
        P = invert_tail(m, eps)
        assert P < math.exp(2 * m.mu_l)
        assert rel(tail_approx(m, P), eps) <= 1e-12


# --- kappa-mu series ---------------------------------------------------------

def test_kappamu_series():
    m = KappaMu(3.9, 2)
    for P in (1e-6, 1e-3):
        s1, r1 = kappamu_exact_tail_series(m, P, 1)
        assert s1 == pytest.approx(tail_approx(m, P), rel=1e-14)
        t = tail_approx(m, P)
        x = 4.9 * 2 * P
        assert r1 <= t * math.exp(3.9 * 2 / 2) * math.expm1(x) * (1 + 1e-12)
        assert abs(cdf(m, P) - s1) <= r1
    s20, r20 = kappamu_exact_tail_series(m, 1e-4, 20)
    assert rel(s20, cdf(m, 1e-4)) <= 1e-10
    assert r20 < 1e-60
    with pytest.raises(DomainError):
        kappamu_exact_tail_series(m, 1e-4, 0)


# --- collapse chain ------------------------------------------------------------

@pytest.mark.parametrize("p", [1e-9, 1e-5, 1e-2, 0.5, 2.0])
def test_collapse_chain(p):
    assert rel(cdf(Weibull(1, 2.0), 2 * p), cdf(Rayleigh(2.0), 2 * p)) <= 1e-8
    assert rel(cdf(Nakagami(1), p), cdf(Rayleigh(), p)) <= 1e-8
    assert rel(cdf(KappaMu(3.0, 1), p), cdf(Rician(3.0), p)) <= 1e-8
    assert rel(cdf(KappaMu(0, 1.7), p), cdf(Nakagami(1.7), p)) <= 1e-8
    assert rel(cdf(TWDP(3.0, 0), p), cdf(Rician(3.0), p)) <= 1e-8
    assert rel(cdf(KappaMuM(3.9, 2, 1e9), p), cdf(KappaMu(3.9, 2), p)) <= 1e-6


def test_kappamu_m_tail_limit():
    assert rel(tail_approx(KappaMuM(3.9, 2, 1e8), 1e-4), tail_approx(KappaMu(3.9, 2), 1e-4)) <= 1e-6


# --- reports and quadrature plumbing ------------------------------------------

def test_tail_report():
    r = tail_report(Rayleigh(), 1e-3, eta=0.1)
    assert r.p_rel == 1e-3 and r.within_tolerance and r.sandwich_holds()
    r = tail_report(LogNormal.unit_mean(6), 1e-3, eta=0.1)
    assert r.phi is None and r.eps_exact is not None
    far = tail_report(Rayleigh(), 0.9, eta=0.1)
    assert not far.within_tolerance


def test_precision_floor_flag():
    est = KappaMuAlpha(3.9, 2, 1.5).cdf_estimate(1e-8)
    assert est.method == "quadrature"
    assert est.at_precision_floor
    assert not Rayleigh().cdf_estimate(1e-20).at_precision_floor


def test_quadrature_error_carries_partial():
    with pytest.raises(QuadratureError) as info:
        quad_cdf(lambda x: 1.0 / x, 0.0, 1.0)
    assert info.value.abserr > 0
    assert math.isfinite(info.value.partial)
