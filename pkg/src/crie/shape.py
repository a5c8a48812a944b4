"""Numerical shape and order diagnostics.

Everything here decides a monotonicity or ordering property from
evaluations on a finite grid. A "certified" verdict means the grid shows no
counter-evidence beyond the margin; it is not a proof.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import MonotoneTransform
from .entropy import crie
from .errors import InvalidParameter, NonFiniteSample
from .quadrature import DEFAULT_CONFIG, quad, xlogx
from .truncation import TruncatedView, Window, _u, gfr1, m1, m1_at, window_grid

#: relative margin below which successive differences count as ties
MARGIN = 1e-9
#: default number of scan points
SCAN_POINTS = 257
#: default number of tau1 values per tau2 in class certification
CLASS_POINTS = 33
#: identity check tolerance (relative) for the tau1-derivative of H
IDENTITY_RTOL = 1e-3


@dataclass(frozen=True)
class MonotoneVerdict:
    """Result of a monotonicity scan.

    ``direction`` is one of ``increasing``, ``decreasing``, ``constant``,
    ``mixed``. ``strict`` is true when every step moves beyond the margin
    in the reported direction. ``max_violation`` is the largest step
    against the reported direction (for ``mixed``, the smaller of the
    largest rise and the largest fall).
    """

    direction: str
    grid_size: int
    max_violation: float
    strict: bool = False

    @property
    def nonincreasing(self):
        return self.direction in ("decreasing", "constant")

    @property
    def nondecreasing(self):
        return self.direction in ("increasing", "constant")


def scan_values(values, margin=MARGIN):
    """Classify the trend of a sequence of values."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise InvalidParameter("a monotonicity scan needs at least two values")
    if not np.all(np.isfinite(v)):
        raise NonFiniteSample("scan met a non-finite value")
    scale = float(np.max(np.abs(v)))
    tol = margin * (scale if scale > 0 else 1.0)
    d = np.diff(v)
    rise = float(d.max()) if d.size else 0.0
    fall = float(-d.min()) if d.size else 0.0
    rises = d > tol
    falls = d < -tol
    if rises.any() and falls.any():
        return MonotoneVerdict("mixed", v.size, min(rise, fall))
    if rises.any():
        return MonotoneVerdict("increasing", v.size, max(fall, 0.0), bool(rises.all()))
    if falls.any():
        return MonotoneVerdict("decreasing", v.size, max(rise, 0.0), bool(falls.all()))
    spread = float(v.max() - v.min())
    if spread <= tol:
        return MonotoneVerdict("constant", v.size, spread)
    # every step is a tie yet they accumulate: follow the net change
    net = v[-1] - v[0]
    if net > 0:
        return MonotoneVerdict("increasing", v.size, max(fall, 0.0))
    return MonotoneVerdict("decreasing", v.size, max(rise, 0.0))


def scan_monotone(f, lo, hi, n=SCAN_POINTS):
    """Scan ``f`` on ``n`` evenly spaced points of ``[lo, hi]``.

    ``f`` may be vectorized; otherwise it is called point by point.
    """
    if n < 3:
        raise InvalidParameter("scan_monotone needs n >= 3")
    x = np.linspace(lo, hi, n)
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            raise ValueError
    except (TypeError, ValueError):
        y = np.array([float(f(t)) for t in x])
    return scan_values(y)


def _support_grid(dist, n, upper=0.99):
    # interior points of the support spaced evenly in probability
    probs = np.linspace(0.0, upper, n + 1)[1:]
    return np.asarray(dist.quantile(probs), dtype=float)


def classify_aging(dist, n=SCAN_POINTS):
    """``IFR``, ``DFR``, ``constant`` or ``mixed`` from a hazard-rate scan."""
    x = _support_grid(dist, n)
    d = scan_values(np.asarray(dist.hazard(x)))
    return {"increasing": "IFR", "decreasing": "DFR"}.get(d.direction, d.direction)


def classify_mrl(dist, n=SCAN_POINTS):
    """``IMRL``, ``DMRL``, ``constant`` or ``mixed`` from a mean residual life scan."""
    x = _support_grid(dist, n)
    d = scan_values(np.asarray(m1_at(dist, x, dist.support[1])))
    return {"increasing": "IMRL", "decreasing": "DMRL"}.get(d.direction, d.direction)


def expectation_label(dist, n=SCAN_POINTS):
    """``NBUE``, ``NWUE``, ``both`` or ``neither`` comparing ``m(t)`` with ``E X``."""
    lo, hi = dist.support
    x = _support_grid(dist, n)
    m = np.asarray(m1_at(dist, x, hi))
    m0 = dist.mean - lo
    tol = MARGIN * max(1.0, abs(m0))
    below = bool(np.all(m <= m0 + tol))
    above = bool(np.all(m >= m0 - tol))
    if below and above:
        return "both"
    return "NBUE" if below else "NWUE" if above else "neither"


def residual_mass_ratio(dist, x, y, t):
    """``(S(x+t) - S(y)) / (S(x) - S(y))``: decreasing in ``x`` iff the GFR increases."""
    x = np.asarray(x, dtype=float)
    sy = float(dist.survival(y)) if math.isfinite(y) else 0.0
    num = np.asarray(dist.survival(x + t)) - sy
    den = np.asarray(dist.survival(x)) - sy
    return num / den


def gfr_scan(v, n=SCAN_POINTS):
    """Monotonicity of ``h1(x, tau2)`` in ``x`` over the window."""
    x = window_grid(v, n)
    return scan_values(np.asarray(gfr1(v, x)))


def mrl_scan(v, n=SCAN_POINTS):
    """Monotonicity of ``m1(x, tau2)`` in ``x`` over the window."""
    x = window_grid(v, n)
    return scan_values(np.asarray(m1_at(v.dist, x, v.tau2)))


# ---------------------------------------------------------------- classes

@dataclass(frozen=True)
class CellEvidence:
    tau1: float
    crie: float
    m1: float
    gfr: float
    fd_slope: float | None
    identity_slope: float
    identity_ok: bool | None

    @property
    def sign(self):
        """``+1`` when H > m1, ``-1`` when H < m1, 0 on a tie."""
        tol = 1e-9 * max(1.0, abs(self.m1))
        d = self.crie - self.m1
        return 0 if abs(d) <= tol else (1 if d > 0 else -1)


@dataclass(frozen=True)
class ClassVerdict:
    """Grid-certified ICRIE/DCRIE verdict with per-cell evidence.

    ``verdict`` is ``ICRIE``, ``DCRIE``, ``constant`` (H flat in tau1, both
    classes at once) or ``inconclusive``.
    """

    verdict: str
    tau2: float
    scan: MonotoneVerdict
    mrl_scan: MonotoneVerdict
    cells: tuple = field(default_factory=tuple)
    label: str = "grid-certified"

    @property
    def signs(self):
        return [c.sign for c in self.cells]

    @property
    def identity_agrees(self):
        checked = [c.identity_ok for c in self.cells if c.identity_ok is not None]
        return all(checked) if checked else None

    def is_class(self, name):
        return self.verdict == name or self.verdict == "constant"

    def to_dict(self):
        return {
            "verdict": self.verdict, "label": self.label, "tau2": self.tau2,
            "crie_scan": self.scan.direction, "mrl_scan": self.mrl_scan.direction,
            "identity_agrees": self.identity_agrees,
            "cells": [{
                "tau1": c.tau1, "crie": c.crie, "m1": c.m1, "gfr": c.gfr,
                "sign": c.sign, "fd_slope": c.fd_slope,
                "identity_slope": c.identity_slope, "identity_ok": c.identity_ok,
            } for c in self.cells],
        }


def default_tau1_grid(dist, tau2, n=CLASS_POINTS):
    """Evenly spaced tau1 values between the support start and ``tau2``.

    For an infinite ``tau2`` the grid spans the central 0.95 probability.
    """
    lo = dist.support[0]
    if math.isinf(tau2):
        top = float(dist.quantile(0.95))
        return np.linspace(lo, top, n)
    span = tau2 - lo
    return np.linspace(lo + 0.01 * span, tau2 - 0.05 * span, n)


def derivative_identity(v, rel_step=1e-4, cfg=None):
    """Central-difference ``dH/dtau1`` and the closed form ``h1 (H - m1)``.

    Returns ``(fd_slope, identity_slope)``. A one-sided difference is used
    when the backward step would leave the support.
    """
    cfg = cfg or DEFAULT_CONFIG.tightened(1e-3)
    w = v.window
    width = w.width if w.finite else max(1.0, abs(w.tau1))
    h = rel_step * width
    H = crie(v, cfg=cfg)
    rhs = float(gfr1(v, v.tau1)) * (H - m1(v))
    dist = v.dist
    fwd = crie(TruncatedView(dist, Window(w.tau1 + h, w.tau2)), cfg=cfg)
    if w.tau1 - h >= dist.support[0]:
        back = crie(TruncatedView(dist, Window(w.tau1 - h, w.tau2)), cfg=cfg)
        return (fwd - back) / (2 * h), rhs
    fwd2 = crie(TruncatedView(dist, Window(w.tau1 + 2 * h, w.tau2)), cfg=cfg)
    return (-3 * H + 4 * fwd - fwd2) / (2 * h), rhs


def certify_icrie_dcrie(dist, tau2, tau1_grid=None, n=CLASS_POINTS, cfg=None,
                        derivative=True):
    """Decide ICRIE/DCRIE at a fixed ``tau2`` from a grid of ``tau1`` values.

    Three signals are collected: (a) the trend of H in tau1, (b) the sign of
    H - m1 at each cell, (c) agreement of a finite-difference slope with
    ``h1 (H - m1)``. A verdict is issued only when (a) and (b) agree at every
    cell; (c) is reported as evidence. Windows narrower than 1e-3 skip (c).
    """
    grid = np.sort(np.asarray(default_tau1_grid(dist, tau2, n) if tau1_grid is None
                              else tau1_grid, dtype=float))
    cells = []
    for t1 in grid:
        v = TruncatedView(dist, Window(float(t1), tau2))
        H = crie(v, cfg=cfg)
        m = m1(v)
        g = float(gfr1(v, v.tau1))
        fd, ok = None, None
        if derivative and (not v.window.finite or v.window.width >= 1e-3):
            fd, rhs = derivative_identity(v)
            ok = abs(fd - rhs) <= IDENTITY_RTOL * max(1.0, abs(rhs))
        cells.append(CellEvidence(float(t1), H, m, g, fd, g * (H - m), ok))
    scan = scan_values([c.crie for c in cells])
    mscan = scan_values([c.m1 for c in cells])
    signs = {c.sign for c in cells}
    verdict = "inconclusive"
    if scan.direction == "decreasing" and signs <= {-1, 0} and -1 in signs:
        verdict = "DCRIE"
    elif scan.direction == "increasing" and signs <= {1, 0} and 1 in signs:
        verdict = "ICRIE"
    elif scan.direction == "constant" and signs == {0}:
        verdict = "constant"
    return ClassVerdict(verdict, float(tau2), scan, mscan, tuple(cells))


def eq_criterion(v, cfg=None):
    """``integral u (ln u + 1)``: <= 0 on ICRIE windows, >= 0 on DCRIE windows."""
    return quad(lambda x: (lambda u: xlogx(u) + u)(_u(v, x)), v.tau1, v.tau2, cfg)


@dataclass(frozen=True)
class ClosureReport:
    base: ClassVerdict
    transformed: ClassVerdict
    criterion_before: tuple
    criterion_after: tuple

    @property
    def preserved(self):
        return self.base.verdict != "inconclusive" and \
            self.base.verdict == self.transformed.verdict

    @property
    def criterion_consistent(self):
        """Criterion signs agree with the verdicts on every cell."""
        def ok(verdict, values):
            tol = 1e-9
            if verdict == "DCRIE":
                return all(c >= -tol for c in values)
            if verdict == "ICRIE":
                return all(c <= tol for c in values)
            return True
        return ok(self.base.verdict, self.criterion_before) and \
            ok(self.transformed.verdict, self.criterion_after)


def closure_probe(dist, transform, tau2, tau1_grid=None, n=CLASS_POINTS, cfg=None):
    """Check that an ICRIE/DCRIE verdict survives ``Y = phi(X)``.

    The tau1 grid for ``Y`` is the image of the grid for ``X``.
    """
    grid = np.asarray(default_tau1_grid(dist, tau2, n) if tau1_grid is None
                      else tau1_grid, dtype=float)
    y = MonotoneTransform(dist, transform)
    ytau2 = float(transform.phi(tau2)) if math.isfinite(tau2) else math.inf
    ygrid = np.asarray(transform.phi(grid), dtype=float)
    base = certify_icrie_dcrie(dist, tau2, grid, cfg=cfg, derivative=False)
    after = certify_icrie_dcrie(y, ytau2, ygrid, cfg=cfg, derivative=False)
    before_c = tuple(eq_criterion(TruncatedView(dist, Window(t, tau2)), cfg) for t in grid)
    after_c = tuple(eq_criterion(TruncatedView(y, Window(t, ytau2)), cfg) for t in ygrid)
    return ClosureReport(base, after, before_c, after_c)


# ----------------------------------------------------------------- orders

@dataclass(frozen=True)
class OrderCertification:
    order: str
    status: str  # certified | refuted | inconclusive
    worst_point: float
    worst_margin: float
    grid_size: int

    @property
    def certified(self):
        return self.status == "certified"


def order_grid(dist_x, dist_y, n=SCAN_POINTS):
    """Common grid for order checks: the overlap of the two supports.

    Infinite tails are cut at the larger 0.999 quantile.
    """
    lo = max(dist_x.support[0], dist_y.support[0])
    hi = min(dist_x.support[1], dist_y.support[1])
    if math.isinf(hi):
        hi = max(float(dist_x.quantile(0.999)), float(dist_y.quantile(0.999)))
    return np.linspace(lo, hi, n + 1)[:-1]


def check_order(dist_x, dist_y, order, grid=None, n=SCAN_POINTS):
    """Certify ``X <= Y`` in the ``st``, ``hr`` or ``lr`` order on a grid.

    st compares survivals, hr scans ``S_Y / S_X`` and lr scans ``f_Y / f_X``
    for a nondecreasing trend. Points where the denominator vanishes or
    either function is infinite (a density singularity at a support end)
    are skipped.
    """
    order = order.lower()
    if order not in ("st", "hr", "lr"):
        raise InvalidParameter(f"unknown order {order!r}")
    x = order_grid(dist_x, dist_y, n) if grid is None else np.asarray(grid, dtype=float)
    if order == "st":
        d = np.asarray(dist_y.survival(x)) - np.asarray(dist_x.survival(x))
        if not np.all(np.isfinite(d)):
            raise NonFiniteSample("survival comparison met a non-finite value")
        i = int(np.argmin(d))
        status = "certified" if d[i] >= -MARGIN else "refuted"
        return OrderCertification("st", status, float(x[i]), float(d[i]), x.size)
    if order == "hr":
        num, den = dist_y.survival(x), dist_x.survival(x)
    else:
        num, den = dist_y.pdf(x), dist_x.pdf(x)
    num, den = np.asarray(num, dtype=float), np.asarray(den, dtype=float)
    keep = (den > 0) & np.isfinite(den) & ~np.isposinf(num)
    if keep.sum() < 3:
        return OrderCertification(order, "inconclusive", math.nan, math.nan, int(keep.sum()))
    r = num[keep] / den[keep]
    xs = x[keep]
    if not np.all(np.isfinite(r)):
        raise NonFiniteSample(f"{order} ratio is not finite on the grid")
    verdict = scan_values(r)
    d = np.diff(r)
    i = int(np.argmin(d))
    status = "certified" if verdict.nondecreasing else "refuted"
    return OrderCertification(order, status, float(xs[i]), float(d[i]), xs.size)


def gfr_dominance(vx, vy, n=SCAN_POINTS):
    """Sign of ``h1_X(x, tau2) - h1_Y(x, tau2)`` over the common window.

    Returns ``"le"`` when X's GFR never exceeds Y's, ``"ge"`` for the
    reverse, ``"equal"`` when both hold, and ``"mixed"`` otherwise.
    """
    x = window_grid(vx, n)
    hx = np.asarray(gfr1(vx, x))
    hy = np.asarray(gfr1(vy, x))
    scale = np.maximum(np.abs(hx), np.abs(hy))
    d = hx - hy
    tol = MARGIN * np.maximum(scale, 1.0)
    le = bool(np.all(d <= tol))
    ge = bool(np.all(d >= -tol))
    if le and ge:
        return "equal"
    return "le" if le else "ge" if ge else "mixed"
