import math

import numpy as np
import pytest

from conftest import oracle_m1, random_cases
from crie.distributions import Equilibrium, Exponential, Lomax, Uniform
from crie.errors import DegenerateWindow, InvalidWindow, OutOfWindow
from crie.quadrature import quad
from crie.shape import gfr_scan, mrl_scan, scan_values
from crie.truncation import (TruncatedView, Window, cond_expect, cond_var, cum_hazard, gfr1,
                             gfr2, m1, m2, mu, odds_ratio_g, relevation_survival,
                             trunc_abs_mean_diff, trunc_cdf, trunc_pdf, trunc_survival,
                             truncate, window_grid)

LN2, LN43 = math.log(2), math.log(4 / 3)
E1 = math.exp(-1)


# ------------------------------------------------------------ windows

def test_window_parse():
    assert Window.parse("3:10") == Window(3.0, 10.0)
    assert Window.parse(" 3:inf ") == Window(3.0, math.inf)


@pytest.mark.parametrize("text", ["3", "3:x", "10:3", "1:1", "inf:5", "1:2:3"])
def test_window_parse_rejects(text):
    with pytest.raises(InvalidWindow):
        Window.parse(text)


def test_degenerate_window():
    with pytest.raises(DegenerateWindow):
        truncate(Exponential(1.0), 50.0, 60.0)
    with pytest.raises(DegenerateWindow):
        truncate(Uniform(1.0), 2.0, 3.0)


def test_out_of_window_points():
    v = truncate(Uniform(1.0), 0.2, 0.6)
    for f in (trunc_survival, trunc_pdf, trunc_cdf, relevation_survival, cum_hazard):
        with pytest.raises(OutOfWindow):
            f(v, 0.7)


# ------------------------------------------------------------ survival and density

def test_truncated_survival_endpoints_and_hand_value():
    v = truncate(Exponential(1.0), 0.0, LN2)
    assert trunc_survival(v, 0.0) == 1.0
    assert trunc_survival(v, LN2) == pytest.approx(0.0, abs=1e-16)
    assert trunc_survival(v, LN43) == pytest.approx(0.5, abs=1e-15)
    assert quad(lambda x: trunc_pdf(v, np.clip(x, 0, LN2)), LN43, LN2) == pytest.approx(0.5)


def test_truncated_density():
    v = truncate(Uniform(1.0), 0.2, 0.6)
    np.testing.assert_allclose(trunc_pdf(v, np.array([0.2, 0.4, 0.59])), 2.5)
    assert quad(lambda x: trunc_pdf(v, np.clip(x, 0.2, 0.6)), 0.2, 0.6) == pytest.approx(1.0)
    w = truncate(Exponential(1.0), 0.0, LN2)
    assert trunc_pdf(w, 0.0) == pytest.approx(2.0, rel=1e-14)


# ------------------------------------------------------------ failure rates

@pytest.mark.parametrize("t1,t2", [(0.0, 1.0), (0.3, 0.5), (1.2, 1.9)])
def test_uniform_gfr(t1, t2):
    v = truncate(Uniform(2.0), t1, t2)
    assert gfr1(v, t1) == pytest.approx(1 / (t2 - t1), rel=1e-12)
    assert gfr2(v, t1) == pytest.approx(1 / (t2 - t1), rel=1e-12)


def test_exponential_gfr_hand_value():
    assert gfr1(truncate(Exponential(1.0), 0.0, LN2), 0.0) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("dist", [Lomax(3.0, 1.0), Exponential(0.5), Uniform(4.0)], ids=str)
def test_gfr_at_infinity_is_hazard(dist):
    t = 1.3
    hi = dist.support[1]
    v = truncate(dist, t, hi)
    assert gfr1(v, t) == pytest.approx(dist.hazard(t), rel=1e-12)


def test_gfr_is_infinite_at_tau2():
    v = truncate(Uniform(1.0), 0.2, 0.6)
    with pytest.raises(DegenerateWindow):
        gfr1(v, 0.6)


# ------------------------------------------------------------ cumulative hazard

def test_cumulative_hazard_values():
    v = truncate(Exponential(1.0), 0.0, LN2)
    assert cum_hazard(v, 0.0) == 0.0
    assert cum_hazard(v, LN43) == pytest.approx(LN2, rel=1e-14)


def test_survival_is_exp_of_minus_cumulative_hazard():
    rng = np.random.default_rng(11)
    worst = 0.0
    for dist, w in random_cases(11, 200):
        v = TruncatedView(dist, w)
        hi = w.tau2 if w.finite else float(dist.quantile(0.999))
        x = float(rng.uniform(w.tau1, w.tau1 + 0.999 * (hi - w.tau1)))
        worst = max(worst, abs(trunc_survival(v, x) - math.exp(-cum_hazard(v, x))))
    assert worst <= 1e-10


def test_cumulative_hazard_matches_gfr_integral():
    v = truncate(Lomax(3.0, 1.0), 0.5, 4.0)
    lam = quad(lambda x: gfr1(v, x), 0.5, 2.0)
    assert lam == pytest.approx(cum_hazard(v, 2.0), rel=1e-9)


# ------------------------------------------------------------ residual and past lifetimes

@pytest.mark.parametrize("t1,t2", [(0.0, 1.0), (0.2, 0.6), (1.0, 3.5)])
def test_uniform_mean_residual(t1, t2):
    v = truncate(Uniform(4.0), t1, t2)
    assert m1(v) == pytest.approx((t2 - t1) / 2, rel=1e-14)
    assert m2(v) == pytest.approx((t2 - t1) / 2, rel=1e-14)
    assert mu(v) == pytest.approx((t1 + t2) / 2, rel=1e-14)


def test_exponential_mean_residual_closed_form():
    v = truncate(Exponential(1.0), 0.0, 1.0)
    exact = (1 - 2 * E1) / (1 - E1)
    assert exact == pytest.approx(0.418023, abs=1e-6)
    assert m1(v) == pytest.approx(exact, rel=1e-13)
    assert mu(v) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("lam", [0.2, 1.0, 3.0])
@pytest.mark.parametrize("t", [0.0, 1.0, 5.0])
def test_exponential_mean_residual_at_infinity(lam, t):
    assert m1(truncate(Exponential(lam), t)) == pytest.approx(1 / lam, rel=1e-12)


def test_mean_residual_against_oracle_and_identities():
    for dist, w in random_cases(12, 40):
        v = TruncatedView(dist, w)
        ref = oracle_m1(dist, w.tau1, w.tau2)
        assert m1(v) == pytest.approx(ref, rel=1e-9, abs=1e-12)
        if w.finite:
            assert 0 < m1(v) <= w.width
            assert m1(v) + m2(v) == pytest.approx(w.width, rel=1e-12)
            assert abs((w.tau1 + m1(v)) - (w.tau2 - m2(v))) <= 1e-9
        # m1 as the integral of exp(-cumulative hazard)
        hi = w.tau2 if w.finite else math.inf
        via_hazard = quad(lambda x: np.exp(-np.asarray(cum_hazard(v, np.minimum(x, hi)))),
                          w.tau1, hi)
        assert via_hazard == pytest.approx(m1(v), rel=1e-8, abs=1e-10)


def test_gfr_from_mean_residual_slope():
    # h1 = (1 + dm1/dtau1) / m1 with a central difference
    for dist, w in random_cases(13, 40, allow_infinite=False, min_width=0.05):
        h = 1e-5 * w.width
        if w.tau1 - h < dist.support[0]:
            continue
        up = m1(TruncatedView(dist, Window(w.tau1 + h, w.tau2)))
        down = m1(TruncatedView(dist, Window(w.tau1 - h, w.tau2)))
        v = TruncatedView(dist, w)
        lhs = gfr1(v, w.tau1)
        rhs = (1 + (up - down) / (2 * h)) / m1(v)
        assert abs(lhs - rhs) <= 1e-4 * max(1.0, abs(lhs))


def test_exponential_memorylessness():
    d = Exponential(0.5)
    assert m1(truncate(d, 3, 10)) == pytest.approx(m1(truncate(d, 5, 12)), abs=1e-10)


# ------------------------------------------------------------ conditional moments

def test_conditional_expectation_examples():
    v = truncate(Exponential(1.0), 0.0, 1.0)
    ident = lambda x: np.asarray(x, dtype=float)
    one = lambda x: np.ones(np.shape(x))
    assert cond_expect(v, ident, one) == pytest.approx(mu(v), rel=1e-12)
    assert cond_expect(v, lambda x: np.full(np.shape(x), 7.0), lambda x: np.zeros(np.shape(x))) == 7.0
    exact = (2 - 5 * E1) / (1 - E1)
    assert exact == pytest.approx(0.254070, abs=1e-6)
    assert cond_expect(v, lambda x: np.asarray(x) ** 2, lambda x: 2 * np.asarray(x)) == \
        pytest.approx(exact, rel=1e-10)
    # against the direct density-weighted integral
    direct = quad(lambda x: x ** 2 * trunc_pdf(v, np.clip(x, 0, 1)), 0.0, 1.0)
    assert direct == pytest.approx(exact, rel=1e-8)


def test_conditional_variance():
    v = truncate(Uniform(2.0), 0.4, 1.3)
    assert cond_var(v) == pytest.approx(0.9 ** 2 / 12, rel=1e-10)
    tiny = truncate(Uniform(1.0), 0.5, 0.5 + 1e-6)
    assert cond_var(tiny) == pytest.approx(1e-12 / 12, rel=1e-3)
    e = truncate(Exponential(1.0), 0.0, 1.0)
    exact = (2 - 5 * E1) / (1 - E1) - ((1 - 2 * E1) / (1 - E1)) ** 2
    assert cond_var(e) == pytest.approx(exact, rel=1e-9)
    assert cond_var(e) == pytest.approx(0.079326, abs=1e-6)


def test_conditional_variance_far_from_origin():
    v = truncate(Uniform(1e6), 5e5, 5e5 + 1.0)
    assert cond_var(v) == pytest.approx(1 / 12, rel=1e-9)


# ------------------------------------------------------------ relevation

def test_relevation_survival_values():
    v = truncate(Exponential(1.0), 0.0, LN2)
    assert relevation_survival(v, 0.0) == 1.0
    assert relevation_survival(v, LN2) == pytest.approx(0.0, abs=1e-15)
    assert relevation_survival(v, LN43) == pytest.approx(0.5 * (1 + LN2), rel=1e-14)
    x = np.linspace(0.0, LN2, 200)
    assert np.all(np.diff(relevation_survival(v, x)) <= 1e-15)


# ------------------------------------------------------------ odds ratio

def test_odds_ratio_function():
    vx = truncate(Exponential(1.0), 0.0, 1.0)
    vy = truncate(Exponential(2.0), 0.0, 1.0)
    x = np.linspace(0, 0.99, 20)
    np.testing.assert_allclose(odds_ratio_g(vx, vx, x), 1.0)
    assert odds_ratio_g(vx, vy, 0.0) == 1.0
    exact = ((E1 - math.exp(-2)) / (1 - math.exp(-2))) / ((math.exp(-0.5) - E1) / (1 - E1))
    assert exact == pytest.approx(0.712351, abs=1e-6)
    assert odds_ratio_g(vx, vy, 0.5) == pytest.approx(exact, rel=1e-13)


def test_odds_ratio_needs_common_window():
    with pytest.raises(InvalidWindow):
        odds_ratio_g(truncate(Uniform(1.0), 0, 1), truncate(Uniform(1.0), 0, 0.5), 0.2)


def test_odds_ratio_monotone_under_gfr_dominance():
    # X = Exp(2) has the larger GFR, so u_Y / u_X is nondecreasing
    vx = truncate(Exponential(2.0), 0.0, 3.0)
    vy = truncate(Exponential(1.0), 0.0, 3.0)
    x = np.linspace(0.0, 3.0, 101)[:-1]
    assert scan_values(odds_ratio_g(vx, vy, x)).nondecreasing
    assert np.all(np.asarray(gfr1(vx, x)) >= np.asarray(gfr1(vy, x)))


# ------------------------------------------------------------ mean difference

def test_truncated_mean_difference():
    assert trunc_abs_mean_diff(truncate(Uniform(1.0), 0, 1)) == pytest.approx(1 / 3, rel=1e-12)
    assert trunc_abs_mean_diff(truncate(Uniform(1.0), 0.5, 0.5 + 1e-8)) <= 1e-8
    assert trunc_abs_mean_diff(truncate(Exponential(0.5), 3, 10)) <= 2 * 1.52470


# ------------------------------------------------------------ shape links

@pytest.mark.parametrize("dist,w", [(Exponential(1.0), (0.0, 3.0)), (Uniform(1.0), (0.1, 0.9)),
                                    (Lomax(3.0, 1.0), (0.0, 5.0)), (Lomax(3.0, 1.0), (0.0, math.inf)),
                                    (Exponential(1.0), (0.0, math.inf))], ids=str)
def test_increasing_gfr_forces_nonincreasing_mean_residual(dist, w):
    v = TruncatedView(dist, Window(*w))
    g, m = gfr_scan(v), mrl_scan(v)
    if g.direction == "increasing":
        assert m.nonincreasing
    if m.direction == "increasing":
        assert g.nonincreasing


def test_equilibrium_of_exponential_has_same_gfr():
    d = Exponential(1.4)
    v = truncate(d, 0.3, 2.0)
    ve = truncate(Equilibrium(d), 0.3, 2.0)
    x = np.linspace(0.3, 2.0, 50)[:-1]
    np.testing.assert_allclose(gfr1(ve, x), gfr1(v, x), atol=1e-9)


def test_window_grid_shapes():
    v = truncate(Uniform(1.0), 0.2, 0.6)
    g = window_grid(v, 5)
    assert g[0] == 0.2 and g[-1] < 0.6 and g.size == 5
    g = window_grid(v, 5, include_end=True)
    assert g[-1] == 0.6
    inf = window_grid(truncate(Lomax(3.0, 1.0), 1.0), 9)
    assert inf[0] == pytest.approx(1.0) and np.all(np.diff(inf) > 0)
