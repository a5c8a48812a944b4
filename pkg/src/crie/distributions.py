"""Continuous lifetime distributions and their derived constructions.

Every distribution is immutable and vectorized: ``survival``, ``cdf``,
``pdf`` and ``quantile`` accept scalars or arrays and return floats or
arrays accordingly. Outside the support the survival function is clamped
to 1 (below) or 0 (above) and the density is 0.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import InfiniteMean, InvalidParameter, NonMonotoneTransform
from .quadrature import quad

__all__ = [
    "ContinuousDistribution", "Uniform", "Exponential", "Power", "BetaC",
    "Lomax", "Equilibrium", "ProportionalOdds", "Transform",
    "MonotoneTransform", "Empirical", "affine", "parse_distribution",
]


def _out(x):
    return x if np.ndim(x) else float(x)


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise InvalidParameter(f"{name} must be a positive finite number, got {value!r}")
    return value


class ContinuousDistribution:
    """Base class. Subclasses implement ``_sf`` and ``_pdf`` on the support.

    Generic fallbacks (root finding for quantiles, quadrature for moments)
    are provided; subclasses override them with closed forms when known.
    """

    #: exponent of a Pareto-type tail; ``inf`` for lighter tails
    tail_index = math.inf

    @property
    def support(self):
        raise NotImplementedError

    def _sf(self, x):
        raise NotImplementedError

    def _pdf(self, x):
        raise NotImplementedError

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        inside = (x >= lo) & (x < hi)
        xs = np.where(inside, x, 0.5 * (lo + min(hi, lo + 1.0)))
        out = np.where(inside, self._sf(xs), np.where(x <= lo, 1.0, 0.0))
        return _out(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        inside = (x >= lo) & (x < hi)
        xs = np.where(inside, x, 0.5 * (lo + min(hi, lo + 1.0)))
        out = np.where(inside, self._cdf(xs), np.where(x <= lo, 0.0, 1.0))
        return _out(out)

    def _cdf(self, x):
        return 1.0 - self._sf(x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        # right limit at the support start, so the hazard there is defined
        inside = (x >= lo) & (x < hi)
        xs = np.where(inside, x, 0.5 * (lo + min(hi, lo + 1.0)))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(inside, self._pdf(xs), 0.0)
        return _out(out)

    def hazard(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return _out(np.asarray(self.pdf(x)) / np.asarray(self.survival(x)))

    def quantile(self, q):
        """Left-continuous inverse of the cdf."""
        q = np.asarray(q, dtype=float)
        if np.any((q < 0) | (q > 1)):
            raise InvalidParameter("quantile levels must lie in [0, 1]")
        return _out(self._quantile(q))

    def isf(self, s):
        """Inverse survival function, ``quantile(1 - s)`` without cancellation."""
        s = np.asarray(s, dtype=float)
        if np.any((s < 0) | (s > 1)):
            raise InvalidParameter("survival levels must lie in [0, 1]")
        return _out(self._isf(s))

    def _quantile(self, q):
        return self._isf(1.0 - q)

    def _isf(self, s):
        lo, hi = self.support
        out = np.empty(s.shape)
        for i, si in np.ndenumerate(s):
            if si >= 1:
                out[i] = lo
            elif si <= 0:
                out[i] = hi
            else:
                top = hi
                if math.isinf(top):
                    top = lo + 1.0
                    while self.survival(top) > si:
                        top = lo + 2.0 * (top - lo)
                out[i] = brentq(lambda x: self.survival(x) - si, lo, top,
                                xtol=1e-14, rtol=4 * np.finfo(float).eps)
        return out

    def survival_integral(self, a, b):
        """``integral of survival(x) dx`` over ``[a, b]``; ``b`` may be ``inf``.

        Vectorized over ``a``.
        """
        a = np.asarray(a, dtype=float)
        lo, hi = self.support
        if math.isinf(b) and math.isinf(hi) and self.tail_index <= 1:
            raise InfiniteMean("survival function is not integrable")
        out = np.empty(a.shape)
        for i, ai in np.ndenumerate(a):
            start = max(ai, lo)
            end = min(b, hi)
            pre = max(0.0, min(b, lo) - ai)  # survival is 1 below the support
            out[i] = pre + (quad(self.survival, start, end) if end > start else 0.0)
        return _out(out)

    @property
    def mean(self):
        lo, hi = self.support
        return lo + float(self.survival_integral(lo, hi))

    @property
    def second_moment(self):
        lo, hi = self.support
        if math.isinf(hi) and self.tail_index <= 2:
            return math.inf
        if lo >= 0:
            return lo * lo + 2.0 * quad(lambda x: x * np.asarray(self.survival(x)), lo, hi)
        return quad(lambda x: x * x * np.asarray(self.pdf(x)), lo, hi)

    @property
    def variance(self):
        return self.second_moment - self.mean ** 2

    def sample(self, rng, n):
        """Draw ``n`` variates by inversion."""
        return np.asarray(self.isf(rng.random(n)), dtype=float)

    def __str__(self):
        return self.text()

    def text(self):
        return repr(self)


@dataclass(frozen=True, repr=False)
class Uniform(ContinuousDistribution):
    """Uniform on ``[0, b]``."""

    b: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "b", _positive("b", self.b))

    def __repr__(self):
        return f"Uniform(b={self.b:g})"

    def text(self):
        return f"uniform:{self.b:g}"

    @property
    def support(self):
        return (0.0, self.b)

    def _sf(self, x):
        return (self.b - x) / self.b

    def _cdf(self, x):
        return x / self.b

    def _pdf(self, x):
        return np.full(np.shape(x), 1.0 / self.b)

    def _isf(self, s):
        return self.b * (1.0 - s)

    def _quantile(self, q):
        return self.b * q

    def survival_integral(self, a, b):
        return Power(1.0, self.b).survival_integral(a, b)

    @property
    def mean(self):
        return self.b / 2.0

    @property
    def second_moment(self):
        return self.b ** 2 / 3.0


@dataclass(frozen=True, repr=False)
class Exponential(ContinuousDistribution):
    """Exponential with rate ``lam``: survival ``exp(-lam x)``."""

    lam: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lam", _positive("lambda", self.lam))

    def __repr__(self):
        return f"Exponential(lam={self.lam:g})"

    def text(self):
        return f"exp:{self.lam:g}"

    @property
    def support(self):
        return (0.0, math.inf)

    def _sf(self, x):
        return np.exp(-self.lam * x)

    def _cdf(self, x):
        return -np.expm1(-self.lam * x)

    def _pdf(self, x):
        return self.lam * np.exp(-self.lam * x)

    def _isf(self, s):
        with np.errstate(divide="ignore"):
            return -np.log(s) / self.lam

    def _quantile(self, q):
        with np.errstate(divide="ignore"):
            return -np.log1p(-q) / self.lam

    def survival_integral(self, a, b):
        a = np.asarray(a, dtype=float)
        pre = np.clip(np.minimum(0.0, b) - a, 0, None)
        a0 = np.maximum(a, 0.0)
        b0 = max(b, 0.0)
        tail_b = 0.0 if math.isinf(b0) else math.exp(-self.lam * b0)
        val = np.where(a0 < b0, (np.exp(-self.lam * a0) - tail_b) / self.lam, 0.0)
        return _out(pre + val)

    @property
    def mean(self):
        return 1.0 / self.lam

    @property
    def second_moment(self):
        return 2.0 / self.lam ** 2


@dataclass(frozen=True, repr=False)
class Power(ContinuousDistribution):
    """Power law on ``[0, b]``: ``F(x) = (x / b) ** a``."""

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b", _positive("b", self.b))

    def __repr__(self):
        return f"Power(a={self.a:g}, b={self.b:g})"

    def text(self):
        return f"power:{self.a:g},{self.b:g}"

    @property
    def support(self):
        return (0.0, self.b)

    def _cdf(self, x):
        return (x / self.b) ** self.a

    def _sf(self, x):
        with np.errstate(divide="ignore"):
            return -np.expm1(self.a * np.log(x / self.b))

    def _pdf(self, x):
        return self.a / self.b * (x / self.b) ** (self.a - 1.0)

    def _quantile(self, q):
        return self.b * q ** (1.0 / self.a)

    def _isf(self, s):
        return self.b * np.exp(np.log1p(-s) / self.a)

    def _anti(self, t):
        # antiderivative of 1 - (t/b)^a on [0, b]
        return t - self.b / (self.a + 1.0) * (t / self.b) ** (self.a + 1.0)

    def survival_integral(self, a, b):
        a = np.asarray(a, dtype=float)
        b = min(b, self.b)
        pre = np.clip(np.minimum(0.0, b) - a, 0, None)
        a0 = np.clip(a, 0.0, self.b)
        b0 = max(b, 0.0)
        val = np.where(a0 < b0, self._anti(b0) - self._anti(np.minimum(a0, b0)), 0.0)
        return _out(pre + val)

    @property
    def mean(self):
        return self.a * self.b / (self.a + 1.0)

    @property
    def second_moment(self):
        return self.a * self.b ** 2 / (self.a + 2.0)


@dataclass(frozen=True, repr=False)
class BetaC(ContinuousDistribution):
    """Beta(c, 1) on ``[0, 1]``: ``F(x) = x ** c``."""

    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "c", _positive("c", self.c))
        object.__setattr__(self, "_power", Power(self.c, 1.0))

    def __repr__(self):
        return f"BetaC(c={self.c:g})"

    def text(self):
        return f"betac:{self.c:g}"

    @property
    def support(self):
        return (0.0, 1.0)

    def _sf(self, x):
        return self._power._sf(x)

    def _cdf(self, x):
        return self._power._cdf(x)

    def _pdf(self, x):
        return self._power._pdf(x)

    def _quantile(self, q):
        return self._power._quantile(q)

    def _isf(self, s):
        return self._power._isf(s)

    def survival_integral(self, a, b):
        return self._power.survival_integral(a, b)

    @property
    def mean(self):
        return self._power.mean

    @property
    def second_moment(self):
        return self._power.second_moment


@dataclass(frozen=True, repr=False)
class Lomax(ContinuousDistribution):
    """Lomax (Pareto II): survival ``(lam / (lam + x)) ** alpha``."""

    alpha: float = 2.0
    lam: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))
        object.__setattr__(self, "lam", _positive("lambda", self.lam))

    def __repr__(self):
        return f"Lomax(alpha={self.alpha:g}, lam={self.lam:g})"

    def text(self):
        return f"lomax:{self.alpha:g},{self.lam:g}"

    @property
    def tail_index(self):
        return self.alpha

    @property
    def support(self):
        return (0.0, math.inf)

    def _sf(self, x):
        return np.exp(-self.alpha * np.log1p(x / self.lam))

    def _cdf(self, x):
        return -np.expm1(-self.alpha * np.log1p(x / self.lam))

    def _pdf(self, x):
        return self.alpha / self.lam * np.exp(-(self.alpha + 1.0) * np.log1p(x / self.lam))

    def _isf(self, s):
        with np.errstate(divide="ignore"):
            return self.lam * np.expm1(-np.log(s) / self.alpha)

    def _quantile(self, q):
        with np.errstate(divide="ignore"):
            return self.lam * np.expm1(-np.log1p(-q) / self.alpha)

    def survival_integral(self, a, b):
        a = np.asarray(a, dtype=float)
        if math.isinf(b) and self.alpha <= 1:
            raise InfiniteMean("Lomax with alpha <= 1 has no finite mean")
        pre = np.clip(np.minimum(0.0, b) - a, 0, None)
        a0 = np.maximum(a, 0.0)
        b0 = max(b, 0.0)
        lam, al = self.lam, self.alpha

        def anti(t):
            # minus the antiderivative, vanishing at infinity when alpha > 1
            if al == 1.0:
                return -lam * np.log1p(t / lam)
            return lam / (al - 1.0) * np.exp((1.0 - al) * np.log1p(t / lam))

        tail_b = 0.0 if math.isinf(b0) else anti(b0)
        if al == 1.0 and math.isinf(b0):
            raise InfiniteMean("Lomax with alpha <= 1 has no finite mean")
        val = np.where(a0 < b0, anti(np.minimum(a0, b0)) - tail_b, 0.0)
        return _out(pre + val)

    @property
    def mean(self):
        if self.alpha <= 1:
            raise InfiniteMean("Lomax with alpha <= 1 has no finite mean")
        return self.lam / (self.alpha - 1.0)

    @property
    def second_moment(self):
        if self.alpha <= 2:
            return math.inf
        return 2.0 * self.lam ** 2 / ((self.alpha - 1.0) * (self.alpha - 2.0))


@dataclass(frozen=True, repr=False)
class Equilibrium(ContinuousDistribution):
    """Equilibrium (stationary excess) distribution: density ``survival / mean``."""

    base: ContinuousDistribution

    def __post_init__(self):
        if self.base.support[0] < 0:
            raise InvalidParameter("equilibrium distribution needs a non-negative base")
        if self.base.tail_index <= 1:
            raise InfiniteMean("equilibrium distribution needs a finite base mean")
        object.__setattr__(self, "_mu", float(self.base.mean))

    def __repr__(self):
        return f"Equilibrium({self.base!r})"

    def text(self):
        return f"equilibrium({self.base.text()})"

    @property
    def tail_index(self):
        return self.base.tail_index - 1.0

    @property
    def support(self):
        return self.base.support

    def _sf(self, x):
        val = np.asarray(self.base.survival_integral(x, self.support[1])) / self._mu
        # the closed forms may disagree with the mean in the last ulp
        return np.where(np.asarray(x) <= self.support[0], 1.0, np.clip(val, 0.0, 1.0))

    def _pdf(self, x):
        return np.asarray(self.base.survival(x)) / self._mu

    @property
    def mean(self):
        return self.base.second_moment / (2.0 * self._mu)


@dataclass(frozen=True, repr=False)
class ProportionalOdds(ContinuousDistribution):
    """Proportional-odds tilt with parameter ``p`` in (0, 1).

    Survival ``p S(x) / (1 - (1 - p) S(x))`` where ``S`` is the base survival.
    """

    base: ContinuousDistribution
    p: float = 0.5

    def __post_init__(self):
        p = float(self.p)
        if not 0 < p < 1:
            raise InvalidParameter(f"tilt parameter must lie in (0, 1), got {p!r}")
        object.__setattr__(self, "p", p)

    def __repr__(self):
        return f"ProportionalOdds({self.base!r}, p={self.p:g})"

    def text(self):
        return f"tilt({self.base.text()};{self.p:g})"

    @property
    def tail_index(self):
        return self.base.tail_index

    @property
    def support(self):
        return self.base.support

    def _odds_den(self, x):
        # 1 - (1 - p) S written as p + (1 - p) F, exact at the support start
        return self.p + (1.0 - self.p) * np.asarray(self.base.cdf(x))

    def _sf(self, x):
        return self.p * np.asarray(self.base.survival(x)) / self._odds_den(x)

    def _cdf(self, x):
        return np.asarray(self.base.cdf(x)) / self._odds_den(x)

    def _pdf(self, x):
        d = self._odds_den(x)
        return self.p * np.asarray(self.base.pdf(x)) / (d * d)

    def _isf(self, s):
        return np.asarray(self.base.isf(s / (self.p + (1.0 - self.p) * s)))


@dataclass(frozen=True)
class Transform:
    """A strictly increasing map ``phi`` with derivative and inverse."""

    phi: Callable
    dphi: Callable
    inverse: Callable
    name: str = "transform"
    convex: bool = False
    kind: str = "custom"
    params: tuple = ()

    @classmethod
    def affine(cls, a, b=0.0):
        a = _positive("scale", a)
        b = float(b)
        if b < 0:
            raise InvalidParameter("shift must be non-negative")
        return cls(lambda x: a * np.asarray(x) + b,
                   lambda x: np.full(np.shape(x), a),
                   lambda y: (np.asarray(y) - b) / a,
                   f"{a:g},{b:g}", True, "affine", (a, b))

    @classmethod
    def power(cls, k):
        k = float(k)
        if k < 1:
            raise InvalidParameter("power map needs k >= 1 to be convex")
        return cls(lambda x: np.asarray(x) ** k,
                   lambda x: k * np.asarray(x) ** (k - 1.0),
                   lambda y: np.asarray(y) ** (1.0 / k),
                   f"x^{k:g}", True, "power", (k,))

    def check_increasing(self, lo, hi, n=257):
        """Raise :class:`NonMonotoneTransform` unless ``phi' > 0`` on a grid."""
        if math.isinf(hi):
            hi = lo + 1e3 * max(1.0, abs(lo))
        x = np.linspace(lo, hi, n)
        d = np.asarray(self.dphi(x), dtype=float)
        # the open interval matters; phi'(0) = 0 for x^k is allowed
        if np.any(d[1:-1] <= 0) or np.any(np.diff(np.asarray(self.phi(x))) <= 0):
            raise NonMonotoneTransform(f"{self.name} is not strictly increasing on [{lo}, {hi}]")


@dataclass(frozen=True, repr=False)
class MonotoneTransform(ContinuousDistribution):
    """Distribution of ``phi(X)`` for a strictly increasing ``phi``."""

    base: ContinuousDistribution
    transform: Transform

    def __post_init__(self):
        self.transform.check_increasing(*self.base.support)

    def __repr__(self):
        return f"MonotoneTransform({self.base!r}, {self.transform.name})"

    def text(self):
        if self.transform.kind == "affine":
            return f"affine({self.base.text()};{self.transform.name})"
        return repr(self)

    @property
    def tail_index(self):
        if self.transform.kind == "power":
            return self.base.tail_index / self.transform.params[0]
        return self.base.tail_index

    @property
    def support(self):
        lo, hi = self.base.support
        return (float(self.transform.phi(lo)),
                math.inf if math.isinf(hi) else float(self.transform.phi(hi)))

    def _sf(self, y):
        return np.asarray(self.base.survival(self.transform.inverse(y)))

    def _cdf(self, y):
        return np.asarray(self.base.cdf(self.transform.inverse(y)))

    def _pdf(self, y):
        x = self.transform.inverse(y)
        return np.asarray(self.base.pdf(x)) / np.asarray(self.transform.dphi(x))

    def _isf(self, s):
        return np.asarray(self.transform.phi(self.base.isf(s)), dtype=float)

    def _quantile(self, q):
        return np.asarray(self.transform.phi(self.base.quantile(q)), dtype=float)


def affine(base, a, b=0.0):
    """Distribution of ``a X + b`` with ``a > 0`` and ``b >= 0``."""
    return MonotoneTransform(base, Transform.affine(a, b))


@dataclass(frozen=True, repr=False, eq=False)
class Empirical(ContinuousDistribution):
    """Right-continuous step survival of a sample.

    There is no density; ``pdf`` raises ``TypeError``.
    """

    values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        if v.size == 0:
            raise InvalidParameter("empirical distribution needs at least one value")
        if not np.all(np.isfinite(v)):
            raise InvalidParameter("sample contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __repr__(self):
        return f"Empirical(n={self.values.size})"

    @property
    def support(self):
        return (float(self.values[0]), float(self.values[-1]))

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        n = self.values.size
        return _out((n - np.searchsorted(self.values, x, side="right")) / n)

    def left_survival(self, x):
        """Left limit ``P(X >= x)``."""
        x = np.asarray(x, dtype=float)
        n = self.values.size
        return _out((n - np.searchsorted(self.values, x, side="left")) / n)

    def cdf(self, x):
        return _out(1.0 - np.asarray(self.survival(x)))

    def pdf(self, x):
        raise TypeError("an empirical distribution has no density")

    def _quantile(self, q):
        n = self.values.size
        idx = np.clip(np.ceil(q * n).astype(int) - 1, 0, n - 1)
        return self.values[idx]

    def _isf(self, s):
        return self._quantile(1.0 - s)

    def survival_integral(self, a, b):
        a = np.asarray(a, dtype=float)
        # exact: integral of the step function between breakpoints
        out = np.empty(a.shape)
        for i, ai in np.ndenumerate(a):
            if ai >= b:
                out[i] = 0.0
                continue
            inner = self.values[(self.values > ai) & (self.values < b)]
            pts = np.concatenate([[ai], inner, [b]])
            if math.isinf(b):
                pts = pts[:-1]
                heights = np.asarray(self.survival(pts[:-1]))
                out[i] = float(np.dot(np.diff(pts), heights))
            else:
                out[i] = float(np.dot(np.diff(pts), np.asarray(self.survival(pts[:-1]))))
        return _out(out)

    @property
    def mean(self):
        return float(self.values.mean())

    @property
    def second_moment(self):
        return float(np.mean(self.values ** 2))


_FAMILIES = {
    "exp": (Exponential, 1), "exponential": (Exponential, 1),
    "uniform": (Uniform, 1),
    "power": (Power, 2),
    "betac": (BetaC, 1),
    "lomax": (Lomax, 2),
}


def _split_top(text, sep):
    """Split on ``sep`` outside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _numbers(text, what):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise InvalidParameter(f"cannot read parameters {text!r} of {what}") from None


def parse_distribution(text):
    """Build a distribution from its text form.

    Examples: ``exp:0.5``, ``uniform:1``, ``power:0.1,0.9``, ``betac:0.2``,
    ``lomax:2,1``, ``equilibrium(exp:1)``, ``tilt(exp:1;0.5)``,
    ``affine(exp:1;2,3)``.
    """
    text = text.strip().replace(" ", "")
    m = re.fullmatch(r"(\w+)\((.*)\)", text)
    if m:
        head, body = m.group(1).lower(), m.group(2)
        args = _split_top(body, ";")
        if head == "equilibrium" and len(args) == 1:
            return Equilibrium(parse_distribution(args[0]))
        if head == "tilt" and len(args) == 2:
            (p,) = _numbers(args[1], head)
            return ProportionalOdds(parse_distribution(args[0]), p)
        if head == "affine" and len(args) == 2:
            nums = _numbers(args[1], head)
            if len(nums) not in (1, 2):
                raise InvalidParameter("affine needs 'a' or 'a,b'")
            return affine(parse_distribution(args[0]), *nums)
        raise InvalidParameter(f"unknown distribution form {text!r}")
    name, _, params = text.partition(":")
    name = name.lower()
    if name not in _FAMILIES:
        raise InvalidParameter(f"unknown distribution family {name!r}")
    cls, arity = _FAMILIES[name]
    nums = _numbers(params, name) if params else []
    if len(nums) != arity:
        raise InvalidParameter(f"{name} takes {arity} parameter(s), got {len(nums)}")
    return cls(*nums)
