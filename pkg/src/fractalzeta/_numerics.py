"""Small numerical kernels shared across modules."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import gamma

CONVERGES = "converges"
DIVERGES = "diverges"
INCONCLUSIVE = "inconclusive"

#: Growth factor per refinement step that signals divergence.
GROWTH_FACTOR = 1.5


def wynn_epsilon(seq):
    """Wynn epsilon extrapolation of a partial-sum sequence.

    Returns ``(limit, error)`` where ``error`` is the distance between the two
    most refined even-column estimates.  Exact for sums of geometric sequences
    when the table is deep enough.
    """
    s = [complex(v) for v in seq]
    n = len(s)
    if n < 3:
        return s[-1], math.inf if n < 2 else abs(s[-1] - s[-2])
    prev = [0j] * (n + 1)
    cur = list(s)
    columns = []
    for k in range(1, n):
        nxt = []
        for i in range(len(cur) - 1):
            diff = cur[i + 1] - cur[i]
            # an exact repeat means the column above has converged; keep the table finite
            nxt.append(prev[i + 1] + (1 / diff if diff != 0 else 1e300))
        prev, cur = cur, nxt
        if k % 2 == 0 and len(cur) >= 2:
            if not all(np.isfinite(v) and abs(v) < 1e200 for v in cur[-2:]):
                break
            columns.append(cur)
            if abs(cur[-1] - cur[-2]) <= 4e-16 * abs(cur[-1]):
                return cur[-1], abs(cur[-1] - cur[-2])
    if not columns:
        return s[-1], abs(s[-1] - s[-2])
    if len(columns) == 1:
        col = columns[0]
        return col[-1], abs(col[-1] - col[-2])
    # deep columns lose digits to cancellation; keep the most stable consecutive pair
    ests = [c[-1] for c in columns]
    diffs = [abs(y - x) for x, y in zip(ests[:-1], ests[1:])]
    i = int(np.argmin(diffs))
    return ests[i + 1], diffs[i]


def aitken(seq):
    """Aitken delta-squared limit of the last three terms, with a change estimate."""
    x0, x1, x2 = (complex(v) for v in seq[-3:])
    den = x2 - 2 * x1 + x0
    if den == 0:
        return x2, 0.0
    lim = x2 - (x2 - x1) ** 2 / den
    return lim, abs(lim - x2)


def refinement_verdict(values, step: int = 1, factor: float = GROWTH_FACTOR,
                       tol: float = 1e-12, needed: int = 3) -> str:
    """Classify a refinement sequence as converging, diverging or inconclusive.

    Increments are grouped ``step`` refinements at a time; ``needed``
    successive group ratios >= ``factor`` signal divergence, the same number of
    ratios <= 1/``factor`` (or increments below ``tol`` relative) signal
    convergence.
    """
    v = np.asarray(values, dtype=complex)
    picks = v[::step]
    inc = np.abs(np.diff(picks))
    scale = max(np.max(np.abs(picks)), 1e-300)
    if len(inc) >= 2 and np.all(inc[-2:] <= tol * scale):
        return CONVERGES
    grow = shrink = 0
    for a, b in zip(inc[:-1], inc[1:]):
        if a == 0:
            grow = 0
            shrink = shrink + 1 if b == 0 else 0
        else:
            r = b / a
            grow = grow + 1 if r >= factor else 0
            shrink = shrink + 1 if r <= 1 / factor else 0
        if grow >= needed:
            return DIVERGES
        if shrink >= needed:
            return CONVERGES
    return INCONCLUSIVE


def simpson_uniform(y, h):
    """Composite Simpson on uniformly spaced samples (odd count; trapezoid fix-up otherwise)."""
    y = np.asarray(y)
    n = len(y)
    if n < 3:
        return np.sum(y[:-1] + y[1:]) * h / 2 if n == 2 else 0.0
    if n % 2 == 0:
        # Simpson on the first n-1 points, trapezoid on the last panel
        return simpson_uniform(y[:-1], h) + (y[-2] + y[-1]) * h / 2
    return h / 3 * (y[0] + y[-1] + 4 * np.sum(y[1:-1:2]) + 2 * np.sum(y[2:-1:2]))


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def gl_integrate(f, a: float, b: float, n: int = 64, pieces: int = 1):
    """Gauss-Legendre rule on [a, b] split into ``pieces`` equal panels; f is vectorized."""
    x, w = gauss_legendre(n)
    edges = np.linspace(a, b, pieces + 1)
    total = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = (hi - lo) / 2
        total = total + half * np.sum(w * f(lo + half * (x + 1)))
    return total


@lru_cache(maxsize=None)
def _borwein_weights(n: int):
    # d_k = n * sum_{i=0}^{k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    d = [0.0] * (n + 1)
    acc = 0.0
    for i in range(n + 1):
        acc += math.factorial(n + i - 1) * 4 ** i / (math.factorial(n - i) * math.factorial(2 * i))
        d[i] = n * acc
    return np.array(d)


def riemann_zeta(s, n: int = 64) -> complex:
    """Riemann zeta via the accelerated alternating (eta) series, Re s > 0, s != 1.

    Negative real parts are reached through the functional equation.
    """
    s = complex(s)
    if s == 1:
        raise ZeroDivisionError("the Riemann zeta function has a pole at s = 1")
    if s.real < 0:
        # zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s) zeta(1 - s)
        return (2 ** s * math.pi ** (s - 1) * np.sin(math.pi * s / 2)
                * complex(gamma(1 - s)) * riemann_zeta(1 - s, n))
    d = _borwein_weights(n)
    k = np.arange(n)
    terms = (-1.0) ** k * (d[k] - d[n]) / np.exp(s * np.log(k + 1.0))
    eta = -np.sum(terms) / d[n]
    return complex(eta / (1 - 2 ** (1 - s)))


def richardson(hs, values):
    """Polynomial (Neville) extrapolation of values(h) to h = 0.

    Returns ``(limit, change)`` where ``change`` compares with the
    extrapolation that drops the coarsest point.
    """
    hs = [float(h) for h in hs]
    vals = [complex(v) for v in values]

    def neville(xs, ys):
        p = list(ys)
        n = len(xs)
        for k in range(1, n):
            for i in range(n - k):
                p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i])
        return p[0]

    full = neville(hs, vals)
    if len(hs) < 3:
        return full, abs(full - vals[-1])
    lesser = neville(hs[1:], vals[1:])
    return full, abs(full - lesser)
