"""Entropy-type measures of doubly truncated variables.

The central quantity is the cumulative residual interval entropy

    H(X; tau1, tau2) = -integral over (tau1, tau2) of u(x) ln u(x) dx,

with ``u`` the truncated survival function. It can be evaluated four
ways (see :class:`CrieMethod`), which the test suite cross-checks.
"""

import enum
import math

import numpy as np

from .errors import DivergentDivergence, InfiniteResult, InvalidWindow
from .quadrature import quad, xlogx
from .truncation import (TruncatedView, Window, _cdf_part, _u, m1, m1_at,
                         truncate)


class CrieMethod(str, enum.Enum):
    """Evaluation route for :func:`crie`."""

    DEFINITION = "definition"
    VIA_MRL = "mrl"
    VIA_COVARIANCE = "covariance"
    VIA_RELEVATION = "relevation"


def _require_finite_mean(dist):
    lo, hi = dist.support
    if math.isinf(hi) and dist.tail_index <= 1:
        raise InfiniteResult(f"{dist} has a tail too heavy for a finite entropy")


def crie(v, method=CrieMethod.DEFINITION, cfg=None):
    """Cumulative residual interval entropy of a truncated view.

    Parameters
    ----------
    v : TruncatedView
    method : CrieMethod or str
        ``definition`` integrates ``-u ln u`` directly; ``mrl`` averages the
        doubly truncated mean residual life ``m1(X, tau2)``; ``covariance``
        uses ``Cov(X, -ln(S(X) - s2))``; ``relevation`` integrates the
        relevation survival and subtracts ``m1``.
    cfg : QuadratureConfig, optional

    Returns
    -------
    float
        Nonnegative up to quadrature error.
    """
    method = CrieMethod(method)
    if not v.window.finite:
        _require_finite_mean(v.dist)
    if method is CrieMethod.DEFINITION:
        return _crie_definition(v, cfg)
    if method is CrieMethod.VIA_MRL:
        return _crie_mrl(v, cfg)
    if method is CrieMethod.VIA_COVARIANCE:
        return _crie_covariance(v, cfg)
    return _crie_relevation(v, cfg)


def _crie_definition(v, cfg):
    return -quad(lambda x: xlogx(_u(v, x)), v.tau1, v.tau2, cfg)


def _crie_mrl(v, cfg):
    dist, t2, mass = v.dist, v.tau2, v.mass

    def integrand(x):
        m = np.asarray(m1_at(dist, x, t2))
        f = np.asarray(dist.pdf(x)) / mass
        # m1(x, tau2) is 0/0 at tau2 itself, where its limit is 0
        return np.where(np.isfinite(m), m, 0.0) * f

    return quad(integrand, v.tau1, t2, cfg)


def _crie_covariance(v, cfg):
    # E[ln(S(X) - s2)] = ln(s1 - s2) - 1 and
    # E[X ln(S(X) - s2)] = tau1 ln(s1 - s2) + J / (s1 - s2) - mu,
    # with J the integral of (S - s2) ln(S - s2) over the window;
    # J / (s1 - s2) is integrated directly so tolerances act on its own scale
    mass, s2 = v.mass, v.s2
    log_mass = math.log(mass)

    def scaled_j(x):
        d = np.clip(np.asarray(v.dist.survival(x)) - s2, 0.0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(d > 0, (d / mass) * np.log(np.where(d > 0, d, 1.0)), 0.0)

    j_scaled = quad(scaled_j, v.tau1, v.tau2, cfg)
    mean = v.tau1 + m1(v)
    e_log = log_mass - 1.0
    e_xlog = v.tau1 * log_mass + j_scaled - mean
    return -(e_xlog - mean * e_log)


def _crie_relevation(v, cfg):
    if v.window.finite:
        total = quad(lambda x: (lambda u: u - xlogx(u))(_u(v, x)), v.tau1, v.tau2, cfg)
        return total - m1(v)
    # residual-lifetime form: integrate over the age x of the residual variable
    t, s1 = v.tau1, v.s1

    def integrand(x):
        u = np.clip(np.asarray(v.dist.survival(t + x)) / s1, 0.0, 1.0)
        return u - xlogx(u)

    return quad(integrand, 0.0, math.inf, cfg) - m1(v)


def covariance_direct(v, cfg=None):
    """``Cov(X, -ln(S(X) - s2) | window)`` from two plain quadratures against the density.

    Slower than the closed-form route used by :func:`crie`; kept as an
    independent check.
    """
    mass, s2 = v.mass, v.s2

    def log_term(x):
        d = np.asarray(v.dist.survival(x)) - s2
        with np.errstate(divide="ignore"):
            return np.where(d > 0, np.log(np.where(d > 0, d, 1.0)), 0.0)

    dens = lambda x: np.asarray(v.dist.pdf(x)) / mass
    e_l = quad(lambda x: log_term(x) * dens(x), v.tau1, v.tau2, cfg)
    e_x = quad(lambda x: x * dens(x), v.tau1, v.tau2, cfg)
    e_xl = quad(lambda x: x * log_term(x) * dens(x), v.tau1, v.tau2, cfg)
    return -(e_xl - e_x * e_l)


def interval_shannon(v, cfg=None):
    """Differential entropy of the truncated density; may be negative."""
    mass = v.mass

    def integrand(x):
        p = np.asarray(v.dist.pdf(x)) / mass
        return -xlogx(p)

    return quad(integrand, v.tau1, v.tau2, cfg)


def _full_window(dist):
    lo, hi = dist.support
    return Window(lo, hi)


def cre(dist, cfg=None):
    """Cumulative residual entropy ``-integral S ln S`` over the support."""
    _require_finite_mean(dist)
    return crie(TruncatedView(dist, _full_window(dist)), cfg=cfg)


def dynamic_cre(dist, t, cfg=None):
    """Cumulative residual entropy of the residual lifetime at age ``t``."""
    _require_finite_mean(dist)
    return crie(TruncatedView(dist, Window(t, dist.support[1])), cfg=cfg)


def past_interval_entropy(v, cfg=None):
    """Cumulative past entropy of the truncated variable, ``-integral F_t ln F_t``."""
    return -quad(lambda x: xlogx(_cdf_part(v, x)), v.tau1, v.tau2, cfg)


def modified_crie(v, cfg=None):
    """Variant that normalizes ``S`` by the window mass without subtracting ``s2``.

    Not a proper survival function in general; the value can be negative.
    """
    mass = v.mass
    return -quad(lambda x: xlogx(np.asarray(v.dist.survival(x)) / mass),
                 v.tau1, v.tau2, cfg)


def crj(dist, cfg=None):
    """Cumulative residual extropy ``-1/2 integral S^2``."""
    lo, hi = dist.support
    if math.isinf(hi) and dist.tail_index <= 0.5:
        raise InfiniteResult(f"{dist}: squared survival is not integrable")
    return -0.5 * quad(lambda x: np.asarray(dist.survival(x)) ** 2, lo, hi, cfg)


def crikl(vx, vy, cfg=None, probe=257):
    """Survival-based Kullback-Leibler divergence of two views on one window.

    ``integral u_X ln(u_X / u_Y) - (m1_X - m1_Y)``; zero exactly when the
    truncated survivals coincide.
    """
    if vx.window != vy.window:
        raise InvalidWindow("CRIKL needs a common window")
    w = vx.window
    hi = w.tau2 if w.finite else float(vx.dist.isf(vx.s1 * 1e-9))
    grid = np.linspace(w.tau1, hi, probe)[1:-1]
    ux, uy = _u(vx, grid), _u(vy, grid)
    if np.any((uy <= 0) & (ux > 0)):
        raise DivergentDivergence("survival of Y vanishes inside the window while X's does not")

    def integrand(x):
        a, b = _u(vx, x), _u(vy, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            cross = np.where(a > 0, a * np.log(np.where(b > 0, b, 1.0)), 0.0)
        if np.any((b <= 0) & (a > 0)):
            raise DivergentDivergence("survival of Y vanishes where X's does not")
        return xlogx(a) - cross

    return quad(integrand, w.tau1, w.tau2, cfg) - (m1(vx) - m1(vy))


def transform_crie(base, transform, window, cfg=None):
    """CRIE of ``Y = phi(X)`` over a window on the ``Y`` scale.

    Evaluated by the change of variables ``y = phi(x)``:
    ``-integral phi'(x) u_X(x) ln u_X(x) dx`` over the pulled-back window.
    """
    if not isinstance(window, Window):
        window = Window(*window)
    lo, hi = base.support
    transform.check_increasing(lo, hi)
    a = float(transform.inverse(window.tau1))
    b = float(transform.inverse(window.tau2)) if window.finite else math.inf
    vx = truncate(base, a, b)
    return -quad(lambda x: np.asarray(transform.dphi(x)) * xlogx(_u(vx, x)), a, b, cfg)
