"""Doubly truncated views of a distribution and their reliability measures.

For a window ``(tau1, tau2)`` write ``s1 = S(tau1)`` and ``s2 = S(tau2)``
(``s2 = 0`` when ``tau2`` is infinite). The truncated survival function is

    u(x) = (S(x) - s2) / (s1 - s2),   tau1 <= x <= tau2,

and every measure below is built from it.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateWindow, InfiniteMean, InvalidParameter, InvalidWindow,
                     OutOfWindow)
from .quadrature import quad, xlogx

#: windows with less probability mass than this are rejected
MIN_MASS = 1e-14


@dataclass(frozen=True)
class Window:
    """A truncation window ``(tau1, tau2)``; ``tau2`` may be ``inf``."""

    tau1: float
    tau2: float = math.inf

    def __post_init__(self):
        t1, t2 = float(self.tau1), float(self.tau2)
        if math.isnan(t1) or math.isnan(t2) or math.isinf(t1):
            raise InvalidWindow(f"bad window ({t1}, {t2})")
        if not t1 < t2:
            raise InvalidWindow(f"window needs tau1 < tau2, got ({t1}, {t2})")
        object.__setattr__(self, "tau1", t1)
        object.__setattr__(self, "tau2", t2)

    @property
    def finite(self):
        return math.isfinite(self.tau2)

    @property
    def width(self):
        return self.tau2 - self.tau1

    @classmethod
    def parse(cls, text):
        """Read ``"3:10"`` or ``"3:inf"``."""
        parts = text.strip().split(":")
        if len(parts) != 2:
            raise InvalidWindow(f"window must look like 'tau1:tau2', got {text!r}")
        try:
            t1, t2 = float(parts[0]), float(parts[1])
        except ValueError:
            raise InvalidWindow(f"cannot read window {text!r}") from None
        return cls(t1, t2)

    def __str__(self):
        return f"{self.tau1:g}:{self.tau2:g}"


@dataclass(frozen=True)
class TruncatedView:
    """A distribution restricted to a window.

    Construction validates the window: ``InvalidWindow`` when it is
    malformed, ``DegenerateWindow`` when ``s1 - s2 < MIN_MASS``.
    """

    dist: object
    window: Window

    def __post_init__(self):
        w = self.window
        if not isinstance(w, Window):
            w = Window(*w)
            object.__setattr__(self, "window", w)
        s1 = float(self.dist.survival(w.tau1))
        s2 = 0.0 if not w.finite else float(self.dist.survival(w.tau2))
        if s1 - s2 < MIN_MASS:
            raise DegenerateWindow(
                f"window {w} carries mass {s1 - s2:.3g} under {self.dist}")
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)

    @property
    def tau1(self):
        return self.window.tau1

    @property
    def tau2(self):
        return self.window.tau2

    @property
    def mass(self):
        return self.s1 - self.s2

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x >= self.tau1) & (x <= self.tau2)


def truncate(dist, tau1, tau2=math.inf):
    """Shorthand for ``TruncatedView(dist, Window(tau1, tau2))``."""
    return TruncatedView(dist, Window(tau1, tau2))


def _out(x):
    return x if np.ndim(x) else float(x)


def _check(v, x):
    x = np.asarray(x, dtype=float)
    if np.any(~v.contains(x)):
        raise OutOfWindow(f"points outside window {v.window}")
    return x


def trunc_survival(v, x):
    """``u(x) = P(X > x | tau1 <= X <= tau2)``, clipped to ``[0, 1]``."""
    x = _check(v, x)
    u = (np.asarray(v.dist.survival(x)) - v.s2) / v.mass
    return _out(np.clip(u, 0.0, 1.0))


def _u(v, x):
    # unchecked truncated survival used inside integrands
    return np.clip((np.asarray(v.dist.survival(x)) - v.s2) / v.mass, 0.0, 1.0)


def _cdf_part(v, x):
    # 1 - u(x) computed without cancellation near tau1
    return np.clip((v.s1 - np.asarray(v.dist.survival(x))) / v.mass, 0.0, 1.0)


def trunc_cdf(v, x):
    x = _check(v, x)
    return _out(_cdf_part(v, x))


def trunc_pdf(v, x):
    x = _check(v, x)
    return _out(np.asarray(v.dist.pdf(x)) / v.mass)


def gfr1(v, x):
    """Generalized failure rate ``f(x) / (S(x) - s2)``."""
    x = _check(v, x)
    den = np.asarray(v.dist.survival(x)) - v.s2
    if np.any(den <= 0):
        raise DegenerateWindow("generalized failure rate is infinite at tau2")
    return _out(np.asarray(v.dist.pdf(x)) / den)


def gfr2(v, x):
    """Second generalized failure rate ``f(tau2) / (S(x) - s2)``."""
    x = _check(v, x)
    if not v.window.finite:
        return _out(np.zeros(np.shape(x)))
    den = np.asarray(v.dist.survival(x)) - v.s2
    if np.any(den <= 0):
        raise DegenerateWindow("generalized failure rate is infinite at tau2")
    return _out(float(v.dist.pdf(v.tau2)) / den)


def cum_hazard(v, x):
    """Truncated cumulative hazard ``-ln u(x)``."""
    u = np.asarray(trunc_survival(v, x))
    with np.errstate(divide="ignore"):
        return _out(-np.log(u))


def m1(v):
    """Doubly truncated mean residual life ``E[X - tau1 | window]``."""
    w = v.window
    if not w.finite and v.dist.tail_index <= 1:
        raise InfiniteMean(f"{v.dist} has no finite mean")
    whole = float(v.dist.survival_integral(w.tau1, w.tau2))
    if not w.finite:
        return whole / v.mass
    num = whole - w.width * v.s2
    if num < 1e-3 * whole:
        # the difference lost most digits, integrate u directly
        return quad(lambda x: _u(v, x), w.tau1, w.tau2)
    return num / v.mass


def m1_at(dist, x, tau2):
    """Vectorized ``m1`` of the windows ``(x, tau2)`` for an array ``x``."""
    x = np.asarray(x, dtype=float)
    s = np.asarray(dist.survival(x))
    if math.isfinite(tau2):
        s2 = float(dist.survival(tau2))
        whole = np.asarray(dist.survival_integral(x, tau2), dtype=float)
        num = np.array(whole - (tau2 - x) * s2, dtype=float, ndmin=1)
        # where the difference lost most digits, integrate S - s2 directly
        for i in np.flatnonzero(num < 1e-3 * np.atleast_1d(whole)):
            xi = float(np.atleast_1d(x)[i])
            if xi < tau2:
                num[i] = quad(lambda t: np.asarray(dist.survival(t)) - s2, xi, tau2)
        num = num.reshape(np.shape(whole))
    else:
        s2 = 0.0
        num = np.asarray(dist.survival_integral(x, tau2))
    with np.errstate(divide="ignore", invalid="ignore"):
        return _out(num / (s - s2))


def m2(v):
    """Doubly truncated mean past life ``E[tau2 - X | window]``."""
    if not v.window.finite:
        return math.inf
    return v.window.width - m1(v)


def mu(v):
    """Conditional mean ``E[X | window]``."""
    return v.tau1 + m1(v)


def cond_expect(v, phi, dphi, cfg=None):
    """``E[phi(X) | window]`` via ``phi(tau1) + integral of phi'(x) u(x)``.

    ``phi`` and ``dphi`` must accept arrays.
    """
    return float(phi(np.asarray(v.tau1))) + quad(
        lambda x: np.asarray(dphi(x)) * _u(v, x), v.tau1, v.tau2, cfg)


def cond_var(v, cfg=None):
    """Conditional variance, computed about ``tau1`` to avoid cancellation."""
    if not v.window.finite and v.dist.tail_index <= 2:
        return math.inf
    t1 = v.tau1
    second = quad(lambda x: 2.0 * (x - t1) * _u(v, x), t1, v.tau2, cfg)
    first = m1(v)
    return max(second - first * first, 0.0)


def relevation_survival(v, x):
    """Survival of the relevation of the truncated variable with itself.

    Equal to ``u(x) (1 - ln u(x))``.
    """
    u = np.asarray(trunc_survival(v, x))
    return _out(u - xlogx(u))


def odds_ratio_g(vx, vy, x):
    """Ratio of truncated survivals ``u_Y(x) / u_X(x)`` on a common window."""
    if vx.window != vy.window:
        raise InvalidWindow("both views must share the same window")
    x = _check(vx, x)
    ux = _u(vx, x)
    if np.any(ux <= 0):
        raise DegenerateWindow("truncated survival of X vanishes")
    return _out(_u(vy, x) / ux)


def trunc_abs_mean_diff(v, cfg=None):
    """``E|X - Y|`` for independent copies restricted to the window: ``2 integral u(1-u)``."""
    return 2.0 * quad(lambda x: _u(v, x) * _cdf_part(v, x), v.tau1, v.tau2, cfg)


def window_grid(v, n=257, include_end=False):
    """Scan points over the window.

    Finite windows use an even grid that stops short of ``tau2`` unless
    ``include_end``; infinite windows use truncated quantiles up to 0.999.
    """
    if n < 2:
        raise InvalidParameter("a scan grid needs at least two points")
    if v.window.finite:
        g = np.linspace(v.tau1, v.tau2, n if include_end else n + 1)
        return g if include_end else g[:-1]
    probs = np.linspace(0.0, 0.999, n)
    return np.asarray(v.dist.isf(v.s1 * (1.0 - probs)), dtype=float).clip(v.tau1)
