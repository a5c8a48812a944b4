"""Published inequalities for the interval entropy as checkable reports.

Each ``bound_*`` function evaluates both sides of one inequality, decides
whether its hypotheses hold (numerically, via :mod:`crie.shape`), and
returns a :class:`BoundReport`. Composite statements return a parent
report whose ``parts`` are the individual inequalities.

Some published statements do not survive numerical checking. They are
still evaluated and reported, but carry ``disputed=True`` next to a
corrected statement; see the project notes for the counterexamples.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .distributions import Equilibrium, ProportionalOdds
from .entropy import crie, dynamic_cre, interval_shannon, transform_crie
from .errors import InfiniteResult, InvalidParameter, InvalidWindow
from .quadrature import quad, xlogx
from .shape import certify_icrie_dcrie, check_order, gfr_dominance, gfr_scan, mrl_scan
from .truncation import (TruncatedView, Window, _cdf_part, _u, cond_var, gfr1, m1,
                         m1_at, m2, mu, truncate, window_grid)

#: slack below which a bound counts as violated
SLACK_TOL = 1e-7


@dataclass(frozen=True)
class BoundReport:
    """One inequality ``lhs <= rhs`` (upper) or ``lhs >= rhs`` (lower).

    A report with ``parts`` is a container: its verdict summarizes the
    parts that are not disputed.
    """

    bound_id: str
    hypotheses_met: bool
    reason: str
    lhs: float
    rhs: float
    kind: str = "upper"
    disputed: bool = False
    parts: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in ("upper", "lower"):
            raise InvalidParameter(f"bound kind must be upper or lower, got {self.kind!r}")

    @property
    def slack(self):
        if self.parts:
            live = [p.slack for p in self.parts
                    if p.hypotheses_met and not p.disputed and not math.isnan(p.slack)]
            return min(live) if live else math.nan
        d = self.rhs - self.lhs if self.kind == "upper" else self.lhs - self.rhs
        return float(d) if not math.isnan(d) else math.nan

    @property
    def holds(self):
        """``None`` when not applicable, else whether the slack clears ``-SLACK_TOL``."""
        if not self.hypotheses_met:
            return None
        if self.parts:
            live = [p.holds for p in self.parts if p.hypotheses_met and not p.disputed]
            return all(live) if live else None
        return self.slack >= -SLACK_TOL

    @property
    def verdict(self):
        h = self.holds
        return "not applicable" if h is None else "holds" if h else "violated"

    def leaves(self):
        """This report's innermost inequalities, depth first."""
        if not self.parts:
            yield self
            return
        for p in self.parts:
            yield from p.leaves()

    def to_dict(self):
        d = {"bound_id": self.bound_id, "hypotheses_met": self.hypotheses_met,
             "reason": self.reason, "lhs": self.lhs, "rhs": self.rhs,
             "kind": self.kind, "slack": self.slack, "holds": self.holds,
             "verdict": self.verdict, "disputed": self.disputed}
        if self.parts:
            d["parts"] = [p.to_dict() for p in self.parts]
        return d


def _part(bound_id, met, reason, lhs, rhs, kind="upper", disputed=False):
    return BoundReport(bound_id, bool(met), reason, float(lhs), float(rhs), kind, disputed)


def _group(bound_id, met, reason, lhs, parts):
    return BoundReport(bound_id, bool(met), reason, float(lhs), math.nan, "upper",
                       False, tuple(parts))


def to_json_lines(reports):
    """Leaf reports as JSON lines, with the parent id prefixed."""
    lines = []
    for r in reports:
        for leaf in r.leaves():
            d = leaf.to_dict()
            if leaf is not r:
                d["bound_id"] = f"{r.bound_id}.{leaf.bound_id}"
            lines.append(json.dumps(d, allow_nan=True))
    return "\n".join(lines)


def to_text_table(reports):
    """Fixed-width table of leaf reports."""
    head = f"{'bound':<44} {'lhs':>14} {'rhs':>14} {'slack':>12}  verdict"
    rows = [head, "-" * len(head)]
    for r in reports:
        for leaf in r.leaves():
            name = leaf.bound_id if leaf is r else f"{r.bound_id}.{leaf.bound_id}"
            tag = " (disputed)" if leaf.disputed else ""
            rows.append(f"{name:<44} {leaf.lhs:>14.8g} {leaf.rhs:>14.8g} "
                        f"{leaf.slack:>12.4g}  {leaf.verdict}{tag}")
    return "\n".join(rows)


# ------------------------------------------------------------ always valid

def bound_var(v, cfg=None):
    """``H <= sqrt(Var(X | window))``."""
    return _part("variance", True, "always applicable", crie(v, cfg=cfg),
                 math.sqrt(cond_var(v, cfg)))


def _abs_dev_log(v, cfg):
    # E[|X - mu| ln |X - mu|] against the truncated density, split at the mean
    centre = mu(v)
    dens = lambda x: np.asarray(v.dist.pdf(x)) / v.mass
    g = lambda x: xlogx(np.abs(np.asarray(x) - centre)) * dens(x)
    return quad(g, v.tau1, centre, cfg) + quad(g, centre, v.tau2, cfg)


def bound_abslog(v, cfg=None):
    """``H <= 2 E[|X - mu| ln |X - mu|] + 4 / (e sqrt(s1 - s2))``."""
    if not v.window.finite and v.dist.tail_index <= 2:
        return _part("abs_deviation_log", False, "second moment is infinite",
                     math.nan, math.nan)
    rhs = 2.0 * _abs_dev_log(v, cfg) + 4.0 / (math.e * math.sqrt(v.mass))
    return _part("abs_deviation_log", True, "always applicable", crie(v, cfg=cfg), rhs)


def bound_logsum_upper(v, cfg=None):
    """``H <= m1 ln((tau2 - tau1) / m1)`` on finite windows."""
    if not v.window.finite:
        return _part("log_sum", False, "needs a finite window", math.nan, math.nan)
    m = m1(v)
    return _part("log_sum", True, "finite window", crie(v, cfg=cfg),
                 m * math.log(v.window.width / m))


def _u_times_cdf(v, cfg):
    return quad(lambda x: _u(v, x) * _cdf_part(v, x), v.tau1, v.tau2, cfg)


def bound_quadratic(v, cfg=None):
    """``integral u (1 - u) <= H <= m2``."""
    H = crie(v, cfg=cfg)
    return _group("quadratic", True, "always applicable", H, (
        _part("lower", True, "always applicable", H, _u_times_cdf(v, cfg), "lower"),
        _part("upper", True, "always applicable", H, m2(v)),
    ))


def weighted_mrl_rhs(v, cfg=None):
    """``E[(S(X) - s2) m1(X, tau2)] / (s1 - s2)`` by quadrature against the density."""
    dist, t2, mass = v.dist, v.tau2, v.mass

    def integrand(x):
        m = np.asarray(m1_at(dist, x, t2))
        m = np.where(np.isfinite(m), m, 0.0)
        return _u(v, x) * m * np.asarray(dist.pdf(x)) / mass

    return quad(integrand, v.tau1, t2, cfg)


def bound_weighted_mrl_lower(v, cfg=None):
    """``H >= E[(S(X) - s2) m1(X, tau2)] / (s1 - s2)``."""
    return _part("weighted_mrl_lower", True, "always applicable", crie(v, cfg=cfg),
                 weighted_mrl_rhs(v, cfg), "lower")


def shannon_constant(cfg=None):
    """``exp(integral of ln(u |ln u|) over (0, 1))``, by quadrature; equals ``exp(-1 - gamma)``."""
    with np.errstate(divide="ignore"):
        f = lambda u: np.log(np.where((u > 0) & (u < 1), u * np.abs(np.log(u)), 1.0))
        return math.exp(quad(f, 0.0, 1.0, cfg))


def bound_shannon_lower(v, cfg=None):
    """``H >= C exp(S)`` with ``S`` the differential entropy of the truncated density."""
    rhs = shannon_constant(cfg) * math.exp(interval_shannon(v, cfg))
    return _part("shannon_lower", True, "always applicable", crie(v, cfg=cfg), rhs, "lower")


def mean_abs_deviation(v, cfg=None):
    """``E[|X - E X| | window] = 2 integral over (tau1, mu) of F_t``."""
    return 2.0 * quad(lambda x: _cdf_part(v, x), v.tau1, mu(v), cfg)


def bound_meandiff(v, cfg=None):
    """``E|X - E X| <= E|X - Y| <= 2H`` for independent copies in the window."""
    gini = 2.0 * _u_times_cdf(v, cfg)
    H = crie(v, cfg=cfg)
    return _group("mean_difference", True, "always applicable", H, (
        _part("deviation", True, "always applicable", mean_abs_deviation(v, cfg), gini),
        _part("entropy", True, "always applicable", gini, 2.0 * H),
    ))


def bound_dynamic_lower(dist, t, cfg=None):
    """``E(X; t) >= m(t) - integral_t^inf S^2 / S(t)^2``."""
    v = truncate(dist, t)
    sq = quad(lambda x: _u(v, x) ** 2, t, math.inf, cfg)
    return _part("dynamic_lower", True, "always applicable", dynamic_cre(dist, t, cfg),
                 m1(v) - sq, "lower")


def bound_dynamic_second_moment(dist, t, cfg=None):
    """``E(X; t) <= E[(X - t)^2 | X > t] / (2 m(t))``.

    The form with ``m(t)^2`` in the denominator is reported as a disputed
    part; it is not scale invariant.
    """
    if dist.tail_index <= 2:
        return _part("dynamic_second_moment", False, "second moment is infinite",
                     math.nan, math.nan)
    v = truncate(dist, t)
    e2 = quad(lambda x: 2.0 * (x - t) * _u(v, x), t, math.inf, cfg)
    m = m1(v)
    H = dynamic_cre(dist, t, cfg)
    return _group("dynamic_second_moment", True, "finite second moment", H, (
        _part("half_ratio", True, "finite second moment", H, e2 / (2.0 * m)),
        _part("printed_squared", True, "finite second moment", H, e2 / (2.0 * m * m),
              disputed=True),
    ))


def lower_bound_constants(dist, cfg=None):
    """``(L_C, L_R) = (integral S^2, integral S F)`` over the support."""
    lo, hi = dist.support
    if math.isinf(hi) and dist.tail_index <= 1:
        raise InfiniteResult(f"{dist}: the integrals diverge")
    s = lambda x: np.asarray(dist.survival(x))
    lc = quad(lambda x: s(x) ** 2, lo, hi, cfg)
    lr = quad(lambda x: s(x) * (1.0 - s(x)), lo, hi, cfg)
    return lc, lr


# ----------------------------------------------------------- conditional

def bound_squared_survival_lower(v, cfg=None):
    """``H >= integral u^2`` when ``h1(x, tau2)`` is nonincreasing in ``x``."""
    scan = gfr_scan(v)
    met = scan.nonincreasing
    reason = f"h1(x, tau2) scan: {scan.direction}"
    H = crie(v, cfg=cfg)
    rhs = quad(lambda x: _u(v, x) ** 2, v.tau1, v.tau2, cfg)
    return _part("squared_survival_lower", met, reason, H, rhs, "lower")


def _window_order(vx, vy, order):
    grid = window_grid(vx, 257)
    return check_order(vx.dist, vy.dist, order, grid)


def bound_lr_comparison(vx, vy, cfg=None):
    """``H_X <= H_Y - m1_X ln(m1_X / m1_Y)`` and ``H_X <= H_Y - (m1_X - m1_Y)`` for ``X <=lr Y``."""
    if vx.window != vy.window:
        raise InvalidWindow("lr comparison needs a common window")
    cert = _window_order(vx, vy, "lr")
    met = cert.certified
    reason = f"lr order on the window: {cert.status}"
    hx, hy = crie(vx, cfg=cfg), crie(vy, cfg=cfg)
    mx, my = m1(vx), m1(vy)
    return _group("lr_comparison", met, reason, hx, (
        _part("log_ratio", met, reason, hx, hy - mx * math.log(mx / my)),
        _part("linear", met, reason, hx, hy - (mx - my)),
    ))


def bound_hr_dynamic(dist_x, dist_y, t, cfg=None):
    """``E_X(t) <= E_Y(t) - m_X(t) ln(m_X(t) / m_Y(t))`` for ``X <=hr Y``."""
    cert = check_order(dist_x, dist_y, "hr")
    reason = f"hr order: {cert.status}"
    mx, my = m1(truncate(dist_x, t)), m1(truncate(dist_y, t))
    ex, ey = dynamic_cre(dist_x, t, cfg), dynamic_cre(dist_y, t, cfg)
    return _part("hr_dynamic", cert.certified, reason, ex, ey - mx * math.log(mx / my))


def bound_gfr_comparison(vx, vy, cfg=None):
    """Entropy comparison from generalized failure rate dominance.

    ``case_i``: ``h1_X <= h1_Y`` and ``m1_X(x, tau2)`` nondecreasing give
    ``H_Y <= H_X``. ``case_ii`` as printed (``h1_Y <= h1_X`` with ``m1_X``
    nonincreasing gives ``H_X <= H_Y``) is disputed; ``case_ii_swapped``
    is ``case_i`` with the roles of X and Y exchanged.
    """
    if vx.window != vy.window:
        raise InvalidWindow("GFR comparison needs a common window")
    dom = gfr_dominance(vx, vy)
    sx, sy = mrl_scan(vx), mrl_scan(vy)
    hx, hy = crie(vx, cfg=cfg), crie(vy, cfg=cfg)
    x_below = dom in ("le", "equal")
    x_above = dom in ("ge", "equal")
    r1 = f"GFR dominance {dom}, m1_X scan {sx.direction}"
    r2 = f"GFR dominance {dom}, m1_Y scan {sy.direction}"
    parts = (
        _part("case_i", x_below and sx.nondecreasing, r1, hy, hx),
        _part("case_ii", x_above and sx.nonincreasing, r1, hx, hy, disputed=True),
        _part("case_ii_swapped", x_above and sy.nondecreasing, r2, hx, hy),
    )
    return _group("gfr_comparison", any(p.hypotheses_met for p in parts),
                  f"GFR dominance {dom}", hx, parts)


def bound_equilibrium(v, cfg=None):
    """``H(X_e) <= H(X)`` when ``h1_X(x, tau2)`` is nondecreasing. Disputed."""
    scan = gfr_scan(v)
    ve = TruncatedView(Equilibrium(v.dist), v.window)
    return _part("equilibrium_comparison", scan.nondecreasing,
                 f"h1(x, tau2) scan: {scan.direction}", crie(ve, cfg=cfg),
                 crie(v, cfg=cfg), disputed=True)


def bound_pof(v, p=0.5, cfg=None):
    """``H(X^(p)) <= H(X)`` for the proportional odds tilt when ``m1_X(x, tau2)`` is nondecreasing."""
    scan = mrl_scan(v)
    vp = TruncatedView(ProportionalOdds(v.dist, p), v.window)
    return _part("pof_comparison", scan.nondecreasing,
                 f"m1(x, tau2) scan: {scan.direction}", crie(vp, cfg=cfg), crie(v, cfg=cfg))


def second_moment_about_tau1(v, cfg=None):
    """``E[(X - tau1)^2 | window] = 2 integral (x - tau1) u``."""
    if not v.window.finite and v.dist.tail_index <= 2:
        return math.inf
    t1 = v.tau1
    return quad(lambda x: 2.0 * (x - t1) * _u(v, x), t1, v.tau2, cfg)


def bound_gfr_monotone(v, cfg=None):
    """Two-sided chain from a monotone GFR.

    ``h1(x, tau2)`` nonincreasing: ``m1 <= H <= h1 E[(X - tau1)^2] / 2``;
    nondecreasing: both inequalities reverse.
    """
    scan = gfr_scan(v)
    H = crie(v, cfg=cfg)
    m = m1(v)
    half = 0.5 * float(gfr1(v, v.tau1)) * second_moment_about_tau1(v, cfg)
    dec, inc = scan.nonincreasing, scan.nondecreasing
    reason = f"h1(x, tau2) scan: {scan.direction}"
    return _group("gfr_monotone", dec or inc, reason, H, (
        _part("decreasing_lower", dec, reason, H, m, "lower"),
        _part("decreasing_upper", dec, reason, H, half),
        _part("increasing_upper", inc, reason, H, m),
        _part("increasing_lower", inc, reason, H, half, "lower"),
    ))


def _class_cert(v, cfg):
    return certify_icrie_dcrie(v.dist, v.tau2, cfg=cfg, derivative=False)


def bound_crie_class(v, cfg=None, certification=None):
    """Bounds implied by a grid-certified ICRIE or DCRIE class.

    ``mrl``: ICRIE gives ``H >= m1``, DCRIE gives ``H <= m1``.
    ``inverse_gfr`` (as printed, disputed): ICRIE gives ``H <= 1/h1``,
    DCRIE gives ``H >= 1/h1``. ``inverse_gfr_corrected``: with ``m1`` also
    monotone in ``tau1``, DCRIE gives ``m1 <= 1/h1`` and ICRIE gives
    ``m1 >= 1/h1``, since ``dm1/dtau1 = h1 m1 - 1``.

    ``v.tau1`` need not lie on the certification grid; the class is a
    property of the whole ``tau2`` slice.
    """
    cert = certification or _class_cert(v, cfg)
    inc, dec = cert.is_class("ICRIE"), cert.is_class("DCRIE")
    H = crie(v, cfg=cfg)
    m = m1(v)
    inv = 1.0 / float(gfr1(v, v.tau1))
    reason = f"grid verdict at tau2={cert.tau2:g}: {cert.verdict}"
    m_inc = cert.mrl_scan.nondecreasing
    m_dec = cert.mrl_scan.nonincreasing
    r_m = f"{reason}, m1 scan {cert.mrl_scan.direction}"
    return _group("crie_class", inc or dec, reason, H, (
        _part("icrie_mrl", inc, reason, H, m, "lower"),
        _part("dcrie_mrl", dec, reason, H, m),
        _part("icrie_inverse_gfr", inc, reason, H, inv, disputed=True),
        _part("dcrie_inverse_gfr", dec, reason, H, inv, "lower", disputed=True),
        _part("icrie_inverse_gfr_corrected", inc and m_inc, r_m, m, inv, "lower"),
        _part("dcrie_inverse_gfr_corrected", dec and m_dec, r_m, m, inv),
    ))


def bound_transform_scaling(base, transform, window, cfg=None, n=257):
    """Compare ``H(phi(X); window)`` with ``H(X; phi^-1(window))``.

    ``phi' >= 1`` on the pulled-back window gives ``H(Y) >= H(X)``;
    ``phi' <= 1`` gives ``H(Y) <= H(X)``. The printed orientation is the
    reverse and is reported as disputed.
    """
    if not isinstance(window, Window):
        window = Window(*window)
    a = float(transform.inverse(window.tau1))
    b = float(transform.inverse(window.tau2)) if window.finite else math.inf
    vx = truncate(base, a, b)
    grid = window_grid(vx, n, include_end=vx.window.finite)
    d = np.asarray(transform.dphi(grid), dtype=float)
    steep = bool(np.all(d >= 1.0 - 1e-12))
    flat = bool(np.all(d <= 1.0 + 1e-12))
    hy = transform_crie(base, transform, window, cfg)
    hx = crie(vx, cfg=cfg)
    r = "phi' >= 1" if steep else "phi' <= 1" if flat else "phi' crosses 1"
    return _group("transform_scaling", steep or flat, r, hy, (
        _part("steep", steep, r, hy, hx, "lower"),
        _part("flat", flat, r, hy, hx),
        _part("steep_printed", steep, r, hy, hx, disputed=True),
        _part("flat_printed", flat, r, hy, hx, "lower", disputed=True),
    ))


# ------------------------------------------------------------------ audits

def audit(dist, window, cfg=None, partners=True):
    """Every single-distribution bound at one window.

    With ``partners``, the equilibrium and proportional-odds comparisons
    (and the GFR comparison against the tilted variable) are included.
    Dynamic bounds run when the window is unbounded.
    """
    if not isinstance(window, Window):
        window = Window(*window)
    v = TruncatedView(dist, window)
    reports = [bound_var(v, cfg), bound_abslog(v, cfg), bound_logsum_upper(v, cfg),
               bound_quadratic(v, cfg), bound_weighted_mrl_lower(v, cfg),
               bound_shannon_lower(v, cfg), bound_meandiff(v, cfg),
               bound_squared_survival_lower(v, cfg), bound_gfr_monotone(v, cfg), bound_crie_class(v, cfg)]
    if not window.finite:
        reports += [bound_dynamic_lower(dist, window.tau1, cfg),
                    bound_dynamic_second_moment(dist, window.tau1, cfg)]
    if partners:
        reports.append(bound_pof(v, 0.5, cfg))
        tilt = TruncatedView(ProportionalOdds(dist, 0.5), window)
        reports.append(bound_gfr_comparison(v, tilt, cfg))
        if dist.tail_index > 2 or not math.isinf(dist.support[1]):
            reports.append(bound_equilibrium(v, cfg))
    return reports


def audit_pair(dist_x, dist_y, window, cfg=None):
    """Two-distribution bounds at one common window."""
    if not isinstance(window, Window):
        window = Window(*window)
    vx, vy = TruncatedView(dist_x, window), TruncatedView(dist_y, window)
    reports = [bound_lr_comparison(vx, vy, cfg), bound_gfr_comparison(vx, vy, cfg)]
    if not window.finite:
        reports.append(bound_hr_dynamic(dist_x, dist_y, window.tau1, cfg))
    return reports


def _run_case(case):
    if len(case) == 2:
        return audit(case[0], case[1])
    return audit_pair(*case)


def audit_batch(cases, workers=None):
    """Audit many cases concurrently; results keep the input order.

    Each case is ``(dist, window)`` or ``(dist_x, dist_y, window)``.
    """
    cases = list(cases)
    if workers == 1 or len(cases) < 2:
        return [_run_case(c) for c in cases]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_case, cases))


def violations(reports, include_disputed=True):
    """Leaf reports whose hypotheses are met but whose inequality fails."""
    out = []
    for r in reports:
        for leaf in r.leaves():
            if leaf.holds is False and (include_disputed or not leaf.disputed):
                out.append(leaf if leaf is r else replace(leaf, bound_id=f"{r.bound_id}.{leaf.bound_id}"))
    return out
