"""Plug-in estimation from samples and a CRIKL goodness-of-fit test.

The estimators replace the survival function by the empirical one, so the
defining integrals become finite sums over the order statistics that fall
in the window. The truncated empirical survival is

    p(x) = #{x < X_i <= tau2} / #{tau1 <= X_i <= tau2},

which uses the left limit at ``tau1`` so that a datum at ``tau1`` counts.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (DataFormatError, DivergentDivergence, InsufficientData,
                     InvalidParameter, NonFiniteSample)
from .quadrature import xlogx
from .truncation import TruncatedView, Window, m1

#: midpoints per empirical step used for the hypothesized log-survival
REFINE = 16


@dataclass(frozen=True)
class SampleData:
    """Sorted finite observations; ties allowed."""

    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        if v.size < 1:
            raise InsufficientData("a sample needs at least one value")
        if not np.all(np.isfinite(v)):
            raise NonFiniteSample("sample contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.size

    @classmethod
    def read(cls, path):
        """Read newline-delimited decimals; blank lines are skipped."""
        out = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                text = line.strip()
                if not text:
                    continue
                try:
                    x = float(text)
                except ValueError:
                    raise DataFormatError(f"{path}:{lineno}: not a number: {text!r}") from None
                if not math.isfinite(x):
                    raise DataFormatError(f"{path}:{lineno}: value is not finite: {text!r}")
                out.append(x)
        if not out:
            raise DataFormatError(f"{path}: no values")
        return cls(np.array(out))


def _window(window):
    return window if isinstance(window, Window) else Window(*window)


@dataclass(frozen=True)
class _Steps:
    left: np.ndarray
    right: np.ndarray
    p: np.ndarray  # truncated empirical survival on [left, right)


def _steps(values, window):
    # empirical truncated survival as constant pieces with p > 0
    w = _window(window)
    inside = values[(values >= w.tau1) & (values <= w.tau2)]
    strict = np.unique(inside[(inside > w.tau1) & (inside < w.tau2)])
    if strict.size < 2:
        raise InsufficientData(
            f"window {w} holds {strict.size} distinct interior observation(s); need 2")
    k = inside.size
    uniq, counts = np.unique(inside, return_counts=True)
    above = k - np.cumsum(counts)
    left = np.concatenate([[w.tau1], uniq])
    right = np.concatenate([uniq, [w.tau2]])
    p = np.concatenate([[1.0], above / k])
    keep = (p > 0) & (right > left)
    return _Steps(left[keep], right[keep], p[keep])


def _as_sample(s):
    return s if isinstance(s, SampleData) else SampleData(s)


def empirical_m1(s, window):
    """Plug-in doubly truncated mean residual life."""
    st = _steps(_as_sample(s).values, window)
    return float(np.sum((st.right - st.left) * st.p))


def empirical_crie(s, window):
    """Plug-in interval entropy, an exact finite sum."""
    st = _steps(_as_sample(s).values, window)
    return float(-np.sum((st.right - st.left) * xlogx(st.p)))


def _log_u_integrals(view, left, right, refine):
    # integral of ln u_G over each step by a midpoint rule on refine pieces
    frac = (np.arange(refine) + 0.5) / refine
    x = left[:, None] + (right - left)[:, None] * frac[None, :]
    u = (np.asarray(view.dist.survival(x)) - view.s2) / view.mass
    if np.any(u <= 0):
        raise DivergentDivergence(
            "hypothesized survival vanishes where the empirical one does not")
    return np.log(u).mean(axis=1) * (right - left)


def crikl_statistic(s, hypothesized, window, refine=REFINE):
    """CRIKL between the empirical and hypothesized truncated survivals.

    ``sum p ln p dx - sum p (integral ln u_G) - (m1_emp - m1_G)``: the
    empirical part is exact; ``ln u_G`` is integrated by midpoints.
    """
    w = _window(window)
    st = _steps(_as_sample(s).values, w)
    view = TruncatedView(hypothesized, w)
    width = st.right - st.left
    plogp = float(np.sum(width * xlogx(st.p)))
    cross = float(np.sum(st.p * _log_u_integrals(view, st.left, st.right, refine)))
    m_emp = float(np.sum(width * st.p))
    return plogp - cross - (m_emp - m1(view))


@dataclass(frozen=True)
class GofResult:
    statistic: float
    p_value: float
    replicates: int
    seed: int
    exceed: int = 0

    def reject(self, alpha=0.05):
        return self.p_value <= alpha


def replicate_rng(seed, index):
    """Generator for bootstrap replicate ``index``; independent of run order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _conditional_sample(view, k, rng):
    # k draws from the hypothesized law restricted to the window, by inversion
    s = view.s2 + rng.random(k) * view.mass
    return np.asarray(view.dist.isf(s), dtype=float)


def bootstrap_gof(s, hypothesized, window, replicates=199, seed=0, workers=1,
                  refine=REFINE):
    """Parametric bootstrap test of ``H0: F = G`` on a window.

    Each replicate draws as many window points as the data has, from ``G``
    conditioned on the window, and recomputes the statistic. The p-value is
    ``(1 + #{T* >= T}) / (replicates + 1)``.
    """
    if replicates < 99:
        raise InvalidParameter("use at least 99 bootstrap replicates")
    w = _window(window)
    data = _as_sample(s)
    observed = crikl_statistic(data, hypothesized, w, refine)
    k = int(np.count_nonzero((data.values >= w.tau1) & (data.values <= w.tau2)))
    view = TruncatedView(hypothesized, w)

    def one(index):
        x = _conditional_sample(view, k, replicate_rng(seed, index))
        return crikl_statistic(x, hypothesized, w, refine)

    if workers == 1:
        stats = [one(r) for r in range(replicates)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(one, range(replicates)))
    exceed = int(np.count_nonzero(np.asarray(stats) >= observed))
    return GofResult(observed, (1 + exceed) / (replicates + 1), replicates, int(seed), exceed)
