import math

import numpy as np
import pytest

from conftest import random_cases
from crie.distributions import BetaC, Exponential, Lomax, Power, Transform, Uniform
from crie.entropy import crie
from crie.errors import InvalidParameter, NonFiniteSample
from crie.shape import (certify_icrie_dcrie, check_order, classify_aging, classify_mrl,
                        closure_probe, derivative_identity, eq_criterion, expectation_label,
                        gfr_dominance, gfr_scan, mrl_scan, residual_mass_ratio, scan_monotone,
                        scan_values)
from crie.truncation import TruncatedView, Window, gfr1, m1, m1_at, truncate


# ------------------------------------------------------------ scans

def test_scan_examples():
    assert scan_monotone(lambda x: x, 0.0, 1.0).direction == "increasing"
    assert scan_monotone(lambda x: np.full(np.shape(x), 2.0), 0.0, 1.0).direction == "constant"
    assert scan_monotone(lambda x: (x - 0.5) ** 2, 0.0, 1.0).direction == "mixed"
    assert scan_monotone(lambda x: -x, 0.0, 1.0).direction == "decreasing"


def test_scan_accepts_scalar_functions():
    assert scan_monotone(lambda t: math.exp(t), 0.0, 1.0, n=11).direction == "increasing"


def test_scan_strictness_and_violation():
    v = scan_values([1.0, 2.0, 3.0])
    assert v.strict and v.max_violation == 0.0
    v = scan_values([1.0, 2.0, 2.0, 3.0])
    assert v.direction == "increasing" and not v.strict
    v = scan_values([0.0, 1.0, 0.5])
    assert v.direction == "mixed" and v.max_violation == pytest.approx(0.5)


def test_scan_margin_absorbs_rounding():
    v = np.ones(50) + np.random.default_rng(0).normal(0, 1e-13, 50)
    assert scan_values(v).direction == "constant"


def test_scan_errors():
    with pytest.raises(InvalidParameter):
        scan_monotone(lambda x: x, 0.0, 1.0, n=2)
    with pytest.raises(NonFiniteSample):
        scan_values([1.0, math.nan, 2.0])


# ------------------------------------------------------------ aging classes

@pytest.mark.parametrize("dist,label", [
    (Exponential(1.0), "constant"), (Exponential(3.0), "constant"), (Lomax(2.0, 1.0), "DFR"),
    (Uniform(1.0), "IFR"), (Power(3.0, 1.0), "IFR"), (Power(0.5, 1.0), "mixed"),
    (BetaC(0.5), "mixed"), (BetaC(2.0), "IFR"),
], ids=str)
def test_classify_aging(dist, label):
    assert classify_aging(dist) == label


def test_power_below_one_has_bathtub_hazard():
    # f / S for a x^(a-1) / (1 - x^a) with a < 1 falls then rises
    d = Power(0.5, 1.0)
    h = np.asarray(d.hazard(np.array([0.01, 0.1, 0.9])))
    assert h[0] > h[1] < h[2]


@pytest.mark.parametrize("dist,label", [
    (Exponential(1.0), "constant"), (Lomax(3.0, 1.0), "IMRL"), (Uniform(1.0), "DMRL"),
], ids=str)
def test_classify_mrl(dist, label):
    assert classify_mrl(dist) == label


@pytest.mark.parametrize("dist,label", [
    (Exponential(1.0), "both"), (Lomax(3.0, 1.0), "NWUE"), (Uniform(1.0), "NBUE"),
], ids=str)
def test_expectation_label(dist, label):
    assert expectation_label(dist) == label


# ------------------------------------------------------------ window scans

def test_gfr_and_mrl_scans():
    v = truncate(Exponential(1.0), 0.0, 1.0)
    assert gfr_scan(v).direction == "increasing"
    assert mrl_scan(v).direction == "decreasing"
    w = truncate(Lomax(3.0, 1.0), 0.0)
    assert gfr_scan(w).direction == "decreasing"
    assert mrl_scan(w).direction == "increasing"
    assert gfr_scan(truncate(Exponential(2.0), 1.0)).direction == "constant"


@pytest.mark.parametrize("dist", [Exponential(1.0), Lomax(3.0, 1.0), Uniform(2.0)], ids=str)
@pytest.mark.parametrize("y", [0.8, 1.6, math.inf])
def test_residual_mass_ratio_mirrors_gfr(dist, y):
    if math.isinf(y) and isinstance(dist, Uniform):
        y = 2.0
    # the log-slope of the ratio is h1(x) - h1(x + t), so scan h1 over both
    t = 0.1
    x = np.linspace(0.0, 0.6, 40)
    ratio = scan_values(residual_mass_ratio(dist, x, y, t))
    v = truncate(dist, 0.0, y)
    gfr = scan_values(np.asarray(gfr1(v, np.linspace(0.0, 0.6 + t, 80))))
    flip = {"increasing": "decreasing", "decreasing": "increasing", "constant": "constant"}
    if gfr.direction in flip:
        assert ratio.direction == flip[gfr.direction]


# ------------------------------------------------------------ class certification

def test_exponential_dcrie_at_finite_tau2():
    c = certify_icrie_dcrie(Exponential(1.0), 10.0, np.arange(3.0, 10.0))
    assert c.verdict == "DCRIE" and c.label == "grid-certified"
    assert c.is_class("DCRIE") and not c.is_class("ICRIE")
    assert set(c.signs) == {-1}
    assert c.identity_agrees


def test_exponential_at_infinity_is_constant():
    c = certify_icrie_dcrie(Exponential(0.5), math.inf)
    assert c.verdict == "constant"
    assert c.is_class("ICRIE") and c.is_class("DCRIE")


def test_uniform_dcrie_closed_forms():
    c = certify_icrie_dcrie(Uniform(1.0), 0.9)
    assert c.verdict == "DCRIE"
    for cell in c.cells:
        w = 0.9 - cell.tau1
        assert cell.crie == pytest.approx(w / 4, rel=1e-9)
        assert cell.m1 == pytest.approx(w / 2, rel=1e-12)


def test_betac_one_matches_uniform():
    a = certify_icrie_dcrie(Uniform(1.0), 0.8, derivative=False)
    b = certify_icrie_dcrie(BetaC(1.0), 0.8, derivative=False)
    assert a.verdict == b.verdict == "DCRIE"
    np.testing.assert_allclose([c.crie for c in a.cells], [c.crie for c in b.cells], rtol=1e-9)


def test_lomax_at_infinity_is_icrie():
    c = certify_icrie_dcrie(Lomax(3.0, 1.0), math.inf)
    assert c.verdict == "ICRIE"
    assert set(c.signs) == {1}
    assert c.identity_agrees


def test_no_strict_icrie_at_finite_tau2():
    # H vanishes as tau1 approaches tau2, so H cannot increase all the way
    for dist in (Lomax(2.2, 1.0), Lomax(3.0, 0.5)):
        c = certify_icrie_dcrie(dist, 20.0, derivative=False)
        assert c.verdict != "ICRIE"


def test_certification_serializes():
    d = certify_icrie_dcrie(Exponential(1.0), 4.0, n=5).to_dict()
    assert d["verdict"] == "DCRIE" and len(d["cells"]) == 5
    assert {"tau1", "crie", "m1", "gfr", "sign", "fd_slope", "identity_ok"} <= set(d["cells"][0])


@pytest.mark.parametrize("dist,tau2", [
    (BetaC(1.0), 0.9), (BetaC(2.0), 0.9), (BetaC(5.0), 0.9),
    (Exponential(0.2), 10.0), (Exponential(0.5), 10.0), (Exponential(1.0), 10.0),
], ids=str)
def test_mrl_and_entropy_both_decrease_in_tau1(dist, tau2):
    c = certify_icrie_dcrie(dist, tau2, derivative=False)
    assert c.scan.direction == "decreasing"
    assert c.mrl_scan.direction == "decreasing"
    assert c.verdict == "DCRIE"


def test_signals_are_concordant_on_random_slices():
    for dist, w in random_cases(41, 12):
        tau2 = w.tau2
        c = certify_icrie_dcrie(dist, tau2, n=9)
        if c.verdict in ("ICRIE", "DCRIE"):
            want = 1 if c.verdict == "ICRIE" else -1
            assert all(s in (0, want) for s in c.signs)
        if c.mrl_scan.direction == "decreasing":
            assert all(s <= 0 for s in c.signs)
        assert c.identity_agrees in (True, None)


def test_decreasing_mrl_in_tau1_gives_dcrie_sign():
    for dist, tau2 in ((Uniform(2.0), 1.5), (Power(2.0, 1.0), 0.9), (Exponential(1.0), 5.0)):
        c = certify_icrie_dcrie(dist, tau2, n=11, derivative=False)
        assert c.mrl_scan.direction == "decreasing"
        assert all(s == -1 for s in c.signs)


def test_derivative_identity_on_random_windows():
    n = 0
    for dist, w in random_cases(42, 80, allow_infinite=True, min_width=0.01):
        if w.finite and w.width < 0.01:
            continue
        fd, rhs = derivative_identity(TruncatedView(dist, w))
        assert abs(fd - rhs) <= 1e-3 * max(1.0, abs(rhs))
        n += 1
        if n == 50:
            break
    assert n == 50


def test_derivative_identity_one_sided_at_support_start():
    v = truncate(Lomax(3.0, 1.0), 0.0, 5.0)
    fd, rhs = derivative_identity(v)
    assert abs(fd - rhs) <= 1e-3 * max(1.0, abs(rhs))


# ------------------------------------------------------------ integral criterion

def test_eq_criterion_uniform_closed_form():
    # u linear: w * integral s (ln s + 1) over (0, 1) = w / 4
    for t1, t2 in ((0.0, 1.0), (0.2, 0.6)):
        assert eq_criterion(truncate(Uniform(1.0), t1, t2)) == pytest.approx((t2 - t1) / 4)


def test_eq_criterion_is_m1_minus_entropy():
    for dist, w in random_cases(43, 20):
        v = TruncatedView(dist, w)
        assert eq_criterion(v) == pytest.approx(m1(v) - crie(v), rel=1e-8, abs=1e-12)


# ------------------------------------------------------------ closure

def test_affine_closure_preserved():
    r = closure_probe(Exponential(1.0), Transform.affine(2.0, 3.0), 10.0)
    assert r.base.verdict == "DCRIE"
    assert r.preserved and r.criterion_consistent


def test_affine_closure_for_icrie():
    r = closure_probe(Lomax(3.0, 1.0), Transform.affine(0.5, 1.0), math.inf)
    assert r.base.verdict == "ICRIE" and r.preserved


@pytest.mark.xfail(strict=True, reason="x^2 of an exponential is ICRIE at tau2=inf and mixed "
                                        "at finite tau2; the convex closure claim does not hold")
def test_convex_closure_square_of_exponential():
    r = closure_probe(Exponential(1.0), Transform.power(2), 10.0)
    assert r.preserved


def test_square_of_exponential_counterexample():
    from crie.distributions import MonotoneTransform
    y = MonotoneTransform(Exponential(1.0), Transform.power(2))
    # Weibull(1/2): m(t) = 2 (sqrt t + 1), increasing
    t = np.array([0.5, 1.0, 4.0, 9.0])
    np.testing.assert_allclose(m1_at(y, t, math.inf), 2 * (np.sqrt(t) + 1), rtol=1e-8)
    assert certify_icrie_dcrie(y, math.inf, derivative=False).verdict == "ICRIE"
    assert certify_icrie_dcrie(Exponential(1.0), 10.0, derivative=False).verdict == "DCRIE"
    assert not closure_probe(Exponential(1.0), Transform.power(2), 10.0).preserved


# ------------------------------------------------------------ orders

def test_exponential_lr_order():
    for order in ("lr", "hr", "st"):
        assert check_order(Exponential(2.0), Exponential(1.0), order).certified
    assert check_order(Exponential(1.0), Exponential(2.0), "lr").status == "refuted"


@pytest.mark.parametrize("dist", [Exponential(1.0), Lomax(2.0, 1.0), Uniform(1.0), BetaC(0.5)],
                         ids=str)
def test_orders_reflexive(dist):
    for order in ("lr", "hr", "st"):
        c = check_order(dist, dist, order)
        assert c.certified
        assert abs(c.worst_margin) <= 1e-12


def test_order_implication_chain():
    rng = np.random.default_rng(44)
    pairs = [(Exponential(float(a)), Exponential(float(b))) for a, b in rng.uniform(0.2, 3, (10, 2))]
    pairs += [(Lomax(float(a), 1.0), Lomax(float(b), 1.0)) for a, b in rng.uniform(1.5, 5, (10, 2))]
    pairs += [(Uniform(1.0), BetaC(0.5)), (BetaC(0.5), Uniform(1.0)), (Power(2.0, 1.0), Uniform(1.0))]
    for x, y in pairs:
        lr, hr, st = (check_order(x, y, o).certified for o in ("lr", "hr", "st"))
        assert (not lr or hr) and (not hr or st)


def test_unknown_order():
    with pytest.raises(InvalidParameter):
        check_order(Exponential(1.0), Exponential(2.0), "icx")


def test_gfr_dominance():
    vx, vy = truncate(Exponential(1.0), 0.0, 1.0), truncate(Exponential(0.5), 0.0, 1.0)
    assert gfr_dominance(vx, vy) == "ge"
    assert gfr_dominance(vy, vx) == "le"
    assert gfr_dominance(vx, vx) == "equal"
