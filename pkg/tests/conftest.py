"""Shared oracles and randomized case generators."""

import math

import mpmath as mp
import numpy as np
import pytest

from crie.distributions import BetaC, Exponential, Lomax, Power, Uniform
from crie.truncation import Window

mp.mp.dps = 30


# ------------------------------------------------------------------ oracle

def mp_survival(dist):
    """Survival function of a parametric family in mpmath arithmetic."""
    if isinstance(dist, Uniform):
        b = mp.mpf(dist.b)
        return lambda x: 1 - x / b
    if isinstance(dist, Exponential):
        lam = mp.mpf(dist.lam)
        return lambda x: mp.exp(-lam * x)
    if isinstance(dist, Power):
        a, b = mp.mpf(dist.a), mp.mpf(dist.b)
        return lambda x: 1 - (x / b) ** a
    if isinstance(dist, BetaC):
        c = mp.mpf(dist.c)
        return lambda x: 1 - x ** c
    if isinstance(dist, Lomax):
        al, lam = mp.mpf(dist.alpha), mp.mpf(dist.lam)
        return lambda x: (lam / (lam + x)) ** al
    raise TypeError(dist)


def _bounds(dist, t1, t2):
    hi = dist.support[1]
    top = mp.inf if math.isinf(t2) else mp.mpf(t2)
    return mp.mpf(t1), top, hi


def oracle_u(dist, t1, t2):
    S = mp_survival(dist)
    a, b, _ = _bounds(dist, t1, t2)
    s1 = S(a)
    s2 = mp.mpf(0) if b == mp.inf else S(b)
    return (lambda x: (S(x) - s2) / (s1 - s2)), a, b


def oracle_crie(dist, t1, t2):
    u, a, b = oracle_u(dist, t1, t2)

    def f(x):
        v = u(x)
        return -v * mp.log(v) if v > 0 else mp.mpf(0)

    return float(mp.quad(f, [a, b]))


def oracle_m1(dist, t1, t2):
    u, a, b = oracle_u(dist, t1, t2)
    return float(mp.quad(u, [a, b]))


# ------------------------------------------------------------------ cases

def random_distribution(rng):
    k = int(rng.integers(5))
    if k == 0:
        return Exponential(float(rng.uniform(0.2, 3)))
    if k == 1:
        return Uniform(float(rng.uniform(0.5, 3)))
    if k == 2:
        return Power(float(rng.uniform(0.2, 5)), float(rng.uniform(0.5, 2)))
    if k == 3:
        return BetaC(float(rng.uniform(0.2, 5)))
    return Lomax(float(rng.uniform(2.2, 6)), float(rng.uniform(0.3, 3)))


def random_case(rng, allow_infinite=True, min_width=0.02):
    """A distribution with a window inside its support.

    ``min_width`` is a fraction of the effective support span.
    """
    d = random_distribution(rng)
    lo, hi = d.support
    top = hi if math.isfinite(hi) else float(d.quantile(0.99))
    t1 = float(rng.uniform(lo, lo + 0.7 * (top - lo)))
    if allow_infinite and math.isinf(hi) and rng.random() < 0.3:
        return d, Window(t1, math.inf)
    t2 = float(rng.uniform(t1 + min_width * (top - lo), top))
    return d, Window(t1, t2)


def random_cases(seed, n, **kw):
    rng = np.random.default_rng(seed)
    return [random_case(rng, **kw) for _ in range(n)]


@pytest.fixture(scope="session")
def audit_cases():
    """200 randomized single-distribution audit cases, fixed seed."""
    return random_cases(7, 200)


@pytest.fixture(scope="session")
def audit_results(audit_cases):
    from crie.bounds import audit_batch
    return audit_batch(audit_cases)
