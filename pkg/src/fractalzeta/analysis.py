"""Estimators on tube samples, contour residues, pole scanning and set classification.

The two estimators follow the scikit-learn conventions: hyperparameters go to
``__init__``, ``fit`` takes an ``(n_samples, 2)`` array of ``(t, |A_t|)`` rows
and stores results in attributes with a trailing underscore.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from ._numerics import gauss_legendre, richardson
from .core_model import (
    DimensionReport, GeneralizedCantorParams, PoleReport, RelativeFractalDrum, Sphere, TubeSamples,
)
from .exceptions import BoundaryPoleError, DomainError, NonStabilizingError

#: Contents above this are reported as infinite, below ``ZERO_CONTENT`` as zero.
INFINITE_CONTENT = 1e6
ZERO_CONTENT = 1e-6


def _as_rows(X):
    if isinstance(X, TubeSamples):
        return X.as_array(), X.ambient_dim
    return X, None


def _validated(X):
    X = check_array(X, dtype=np.float64, ensure_min_samples=3)
    if X.shape[1] != 2:
        raise DomainError("expected rows of (t, volume)")
    order = np.argsort(X[:, 0])
    X = X[order]
    if np.any(X[:, 0] <= 0) or np.any(np.diff(X[:, 0]) <= 0):
        raise DomainError("t must be positive and distinct")
    if np.any(X[:, 1] <= 0):
        raise DomainError("tube volumes must be positive for log-log analysis")
    return X


# ---------------------------------------------------------------------------
# Period search


def _autocorrelation(x: np.ndarray) -> np.ndarray:
    """score[k] = 1 - mean((x[j+k] - x[j])^2) / (2 var x) over the overlap, for all k."""
    n = len(x)
    x = x - x.mean()
    var = float(np.mean(x * x))
    if var <= 0:
        return np.zeros(n)
    size = 1 << (2 * n - 1).bit_length()
    fx = np.fft.rfft(x, size)
    cross = np.fft.irfft(fx * np.conj(fx), size)[:n]
    sq = np.concatenate([[0.0], np.cumsum(x * x)])
    k = np.arange(n)
    overlap = n - k
    # sum over j < n-k of x[j+k]^2 + x[j]^2
    sums = (sq[n] - sq[k]) + sq[n - k]
    with np.errstate(invalid="ignore", divide="ignore"):
        msd = (sums - 2 * cross) / overlap
    return 1 - msd / (2 * var)


def _interp_score(x: np.ndarray, h: float, lag: float) -> float:
    """Autocorrelation score at a fractional lag, by linear interpolation."""
    n = len(x)
    x = x - x.mean()
    var = float(np.mean(x * x))
    shift = lag / h
    k = int(math.floor(shift))
    frac = shift - k
    if k + 1 >= n:
        return -math.inf
    shifted = (1 - frac) * x[k:n - 1] + frac * x[k + 1:n]
    base = x[:n - 1 - k]
    return 1 - float(np.mean((shifted - base) ** 2)) / (2 * var)


@dataclass
class PeriodSearch:
    period: float
    score: float
    found: bool
    candidates: list


def find_period(x, h: float, lo: float = 0.2, hi: float = 5.0, threshold: float = 0.99) -> PeriodSearch:
    """Smallest lag in [lo, hi] whose autocorrelation peak reaches ``threshold``.

    Integer-sample lags are scanned by FFT; the chosen peak is polished by
    golden-section search on the interpolated score.
    """
    x = np.asarray(x, dtype=float)
    score = _autocorrelation(x)
    n = len(x)
    k_lo = max(1, int(math.ceil(lo / h)))
    k_hi = min(n - 2, int(math.floor(hi / h)))
    # at least a quarter of the samples must overlap for a lag to count
    k_hi = min(k_hi, int(0.75 * n))
    if k_hi <= k_lo + 1 or not np.any(np.isfinite(score)) or np.ptp(x) == 0:
        return PeriodSearch(math.nan, 0.0, False, [])
    ks = np.arange(k_lo, k_hi + 1)
    sc = score[ks]
    peaks = [i for i in range(1, len(ks) - 1) if sc[i] >= sc[i - 1] and sc[i] >= sc[i + 1]]
    polished = []
    for i in peaks:
        k = ks[i]
        res = minimize_scalar(lambda L: -_interp_score(x, h, L), bracket=None,
                              bounds=((k - 1) * h, (k + 1) * h), method="bounded",
                              options={"xatol": 1e-7})
        polished.append((float(res.x), float(-res.fun)))
    polished.sort(key=lambda p: -p[1])
    top = polished[:2]
    good = sorted((p for p in polished if p[1] >= threshold), key=lambda p: p[0])
    if not good:
        best = top[0] if top else (math.nan, 0.0)
        return PeriodSearch(best[0], best[1], False, [p[0] for p in top])
    # the smallest lag reaching the best score (multiples of T score equally)
    best_score = max(p[1] for p in good)
    chosen = next(p for p in good if p[1] >= best_score - 1e-3)
    return PeriodSearch(chosen[0], chosen[1], True, [p[0] for p in top])


# ---------------------------------------------------------------------------
# Dimension estimator


class MinkowskiDimensionEstimator(BaseEstimator):
    """Upper/lower Minkowski dimension and content from tube samples.

    Parameters
    ----------
    ambient_dim : int
        Dimension N of the ambient space.
    dim : float, optional
        Exponent at which contents are evaluated.  When omitted, the fitted
        dimension is used.
    window_decades : float
        Width of the sliding log-log windows.
    step_decades : float
        Offset between consecutive windows.
    span_decades : float
        The windows and the content extrema use the smallest ``span_decades``
        decades of t.

    Attributes
    ----------
    upper_dim_, lower_dim_ : float
        Largest and smallest local dimension N - slope over the windows.
    fitted_dim_ : float
        Dimension from the drift of log |A_t| over whole periods when a
        log-periodic structure is present, else from a least-squares slope.
    lower_content_, upper_content_ : float
        Extremes of |A_t| / t^(N - D) over the smallest decade (``inf`` or 0
        beyond the degenerate-content cutoffs).
    report_ : DimensionReport
    """

    def __init__(self, ambient_dim: int = 1, dim: Optional[float] = None, window_decades: float = 1.0,
                 step_decades: float = 0.125, span_decades: float = 2.0):
        self.ambient_dim = ambient_dim
        self.dim = dim
        self.window_decades = window_decades
        self.step_decades = step_decades
        self.span_decades = span_decades

    def fit(self, X, y=None):
        X = _validated(X)
        N = self.ambient_dim
        lt, lv = np.log10(X[:, 0]), np.log10(X[:, 1])
        decades = lt[-1] - lt[0]
        if decades < 1.5:
            raise DomainError(f"samples cover {decades:.2f} decades; at least 1.5 are needed")
        lo = lt[0]
        span_hi = lo + min(self.span_decades, decades)
        slopes = []
        start = lo
        while start + self.window_decades <= span_hi + 1e-9:
            sel = (lt >= start - 1e-12) & (lt <= start + self.window_decades + 1e-12)
            if sel.sum() >= 3:
                slopes.append(np.polyfit(lt[sel], lv[sel], 1)[0])
            start += self.step_decades
        if not slopes:
            raise DomainError("no complete window in the sampled range")
        slopes = np.array(slopes)
        self.window_slopes_ = slopes
        self.upper_dim_ = float(N - slopes.min())
        self.lower_dim_ = float(N - slopes.max())
        self.fitted_dim_ = self._fit_dim(X, N)
        D = self.fitted_dim_ if self.dim is None else float(self.dim)
        small = lt <= lo + 1.0 + 1e-12
        ratio = X[small, 1] / X[small, 0] ** (N - D)
        upper, lower = float(ratio.max()), float(ratio.min())
        self.upper_content_ = math.inf if upper >= INFINITE_CONTENT else (0.0 if upper <= ZERO_CONTENT else upper)
        self.lower_content_ = math.inf if lower >= INFINITE_CONTENT else (0.0 if lower <= ZERO_CONTENT else lower)
        self.report_ = DimensionReport(
            upper_dim=self.upper_dim_, lower_dim=min(self.lower_dim_, self.upper_dim_),
            lower_content=self.lower_content_, upper_content=self.upper_content_,
            fitted_dim=self.fitted_dim_,
            diagnostics={"windows": len(slopes), "decades": float(decades), "content_dim": D,
                         "period": getattr(self, "period_", math.nan)})
        return self

    def _fit_dim(self, X, N):
        u = -np.log(X[::-1, 0])
        lv = np.log(X[::-1, 1])
        h = np.diff(u)
        self.period_ = math.nan
        if np.allclose(h, h[0], rtol=1e-6, atol=0):
            h0 = float(h[0])
            local = np.diff(lv) / h0
            if np.ptp(local) > 1e-9 * max(1.0, abs(local).max()):
                search = find_period(local, h0)
                if search.found:
                    T = search.period
                    k = int(round(T / h0))
                    if abs(k * h0 - T) < 1e-3 * h0 + 1e-9:
                        # whole-period drift is exactly (N - D) T for log-periodic G
                        drift = np.mean(lv[:-k] - lv[k:]) / (k * h0)
                        self.period_ = T
                        return float(N - drift)
                    self.period_ = T
        slope = np.polyfit(np.log(X[:, 0]), np.log(X[:, 1]), 1)[0]
        return float(N - slope)


def estimate_dimensions(samples: TubeSamples, dim: Optional[float] = None, **kw) -> DimensionReport:
    """Dimension and content report for tube samples (see MinkowskiDimensionEstimator)."""
    X, N = _as_rows(samples)
    est = MinkowskiDimensionEstimator(ambient_dim=N or kw.pop("ambient_dim", 1), dim=dim, **kw).fit(X)
    return est.report_


# ---------------------------------------------------------------------------
# Log-periodic fit


@dataclass
class OscillationFit:
    """Periodic factor G of |A_t| = t^(N-D) G(log 1/t)."""

    D: float
    period_T: float
    G_samples: np.ndarray
    fourier: list
    fit_residual: float
    period_found: bool
    diagnostics: dict = field(default_factory=dict)

    def coefficient(self, k: int) -> complex:
        for kk, c in self.fourier:
            if kk == k:
                return c
        raise KeyError(k)


def _fourier_one_period(tau, G, T, ks):
    """(1/T) integral over [tau_0, tau_0 + T] of exp(-2 pi i k tau / T) G(tau), by trapezoid."""
    h = tau[1] - tau[0]
    n_full = int(math.floor(T / h + 1e-9))
    frac = T / h - n_full
    seg_t, seg_g = tau[:n_full + 1], G[:n_full + 1]
    out = []
    for k in ks:
        w = np.exp(-2j * math.pi * k * seg_t / T)
        y = w * seg_g
        total = h * (y.sum() - 0.5 * (y[0] + y[-1]))
        if frac > 1e-12:
            g_end = seg_g[-1] + frac * (G[n_full + 1] - seg_g[-1])
            t_end = seg_t[-1] + frac * h
            y_end = np.exp(-2j * math.pi * k * t_end / T) * g_end
            total += 0.5 * frac * h * (y[-1] + y_end)
        out.append((k, complex(total / T)))
    return out


class LogPeriodicEstimator(BaseEstimator):
    """Detect the multiplicative period of |A_t| t^(D-N) and its Fourier coefficients.

    Parameters
    ----------
    dim : float
        Exponent D used to remove the power law.
    ambient_dim : int
    period_range : tuple of float
        Candidate periods in tau = log(1/t).
    threshold : float
        Autocorrelation score a peak needs to be accepted as a period.
    n_coefficients : int
        Coefficients with |k| <= n_coefficients are returned.
    """

    def __init__(self, dim: float = 0.5, ambient_dim: int = 1, period_range=(0.2, 5.0),
                 threshold: float = 0.99, n_coefficients: int = 3):
        self.dim = dim
        self.ambient_dim = ambient_dim
        self.period_range = period_range
        self.threshold = threshold
        self.n_coefficients = n_coefficients

    def fit(self, X, y=None):
        X = _validated(X)
        tau = -np.log(X[::-1, 0])
        G = X[::-1, 1] * X[::-1, 0] ** (self.dim - self.ambient_dim)
        h = np.diff(tau)
        if not np.allclose(h, h[0], rtol=1e-6, atol=0):
            raise DomainError("samples must lie on a geometric grid")
        h = float(np.mean(h))
        ks = range(-self.n_coefficients, self.n_coefficients + 1)
        amplitude = float(np.ptp(G) / np.mean(G))
        search = find_period(G, h, *self.period_range, threshold=self.threshold) \
            if amplitude > 1e-12 else None
        if search is not None and search.found:
            T = search.period
            # one period at the small-t end
            start = max(0, len(tau) - 1 - int(math.ceil(T / h)) - 1)
            t_seg, g_seg = tau[start:], G[start:]
            fourier = _fourier_one_period(t_seg, g_seg, T, ks)
            phase = (tau - t_seg[0]) % T
            order = np.argsort(phase)
            n_per = int(math.floor(T / h)) + 1
            model = np.interp(phase, (t_seg[:n_per] - t_seg[0]), g_seg[:n_per], period=T)
            resid = float(np.sqrt(np.mean((G - model) ** 2)) / np.mean(G))
            self.period_found_ = True
            self.period_ = T
            self.G_samples_ = np.column_stack([t_seg[:n_per], g_seg[:n_per]])
        else:
            T = tau[-1] - tau[0]
            fourier = _fourier_one_period(tau, G, T * (1 - 1e-12), ks)
            fourier = [(k, c if k == 0 else (c if abs(c) > 1e-10 * abs(np.mean(G)) else 0j))
                       for k, c in fourier]
            resid = float(np.sqrt(np.mean((G - G.mean()) ** 2)) / np.mean(G))
            self.period_found_ = False
            self.period_ = math.nan
            self.G_samples_ = np.column_stack([tau, G])
        self.fourier_ = fourier
        self.fit_residual_ = resid
        self.amplitude_ = amplitude
        diag = {"amplitude": amplitude}
        if search is not None:
            diag.update(score=search.score, candidates=search.candidates)
        self.result_ = OscillationFit(float(self.dim), self.period_, self.G_samples_, fourier,
                                      resid, self.period_found_, diag)
        return self


def fit_log_periodic(samples: TubeSamples, D: float, **kw) -> OscillationFit:
    """Period, one period of G and its Fourier coefficients (see LogPeriodicEstimator)."""
    X, N = _as_rows(samples)
    return LogPeriodicEstimator(dim=D, ambient_dim=N or kw.pop("ambient_dim", 1), **kw).fit(X).result_


# ---------------------------------------------------------------------------
# Contour residues and pole scanning


def numeric_residue(f: Callable, pole, radius: float, tol: float = 1e-10, m0: int = 32,
                    max_nodes: int = 1 << 15) -> complex:
    """(1 / 2 pi i) times the contour integral of f around a circle, by the trapezoid rule.

    The node count doubles until two successive values agree within ``tol``
    (relative to the value, absolute below 1).
    """
    pole = complex(pole)
    M = m0
    prev = None
    while M <= max_nodes:
        th = 2 * math.pi * np.arange(M) / M
        z = radius * np.exp(1j * th)
        val = complex(np.mean(np.asarray(f(pole + z), dtype=complex) * z))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        M *= 2
    raise NonStabilizingError(f"residue at {pole} did not settle; a second pole may be close, shrink the radius")


def _edge_phase(f, a: complex, b: complex, n0: int = 64, depth: int = 14):
    """Unwrapped change of arg f along the segment a -> b with adaptive refinement."""
    s = np.linspace(0, 1, n0 + 1)
    z = a + (b - a) * s
    v = np.asarray(f(z), dtype=complex)
    for _ in range(depth):
        if not np.all(np.isfinite(v)) or np.any(v == 0):
            raise BoundaryPoleError("f is singular or zero on a contour")
        dphi = np.angle(v[1:] / v[:-1])
        bad = np.abs(dphi) > math.pi / 4
        if not bad.any():
            return float(dphi.sum())
        mids = (s[:-1][bad] + s[1:][bad]) / 2
        s = np.sort(np.concatenate([s, mids]))
        z = a + (b - a) * s
        v = np.asarray(f(z), dtype=complex)
    raise BoundaryPoleError("argument of f varies too fast along a contour")


def winding_number(f: Callable, rect) -> float:
    """(zeros - poles) of f inside ``(re_lo, re_hi, im_lo, im_hi)``, as a float close to an integer."""
    x0, x1, y0, y1 = rect
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    total = sum(_edge_phase(f, corners[i], corners[(i + 1) % 4]) for i in range(4))
    return total / (2 * math.pi)


def _rect_moments(f, rect, n: int = 64, pieces: int = 4):
    """(1/2 pi i) of the contour integrals of f and s f around a rectangle (Gauss-Legendre per edge)."""
    x0, x1, y0, y1 = rect
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    xg, wg = gauss_legendre(n)
    m0 = m1 = 0j
    scale = 0.0
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        for p in range(pieces):
            lo = a + (b - a) * p / pieces
            hi = a + (b - a) * (p + 1) / pieces
            z = (lo + hi) / 2 + (hi - lo) / 2 * xg
            v = np.asarray(f(z), dtype=complex)
            jac = (hi - lo) / 2
            m0 += np.sum(wg * v) * jac
            m1 += np.sum(wg * v * z) * jac
            scale = max(scale, float(np.max(np.abs(v))))
    return m0 / (2j * math.pi), m1 / (2j * math.pi), scale


def pole_scan(f: Callable, window, grid: int = 8, residues=None, min_cell: float = 1e-3,
              edge_tol: float = 1e-4) -> list:
    """Locate the poles of ``f`` in ``window = (re_lo, re_hi, im_lo, im_hi)``.

    The window is split into ``grid`` x ``grid`` cells.  A cell is refined when
    its winding number or its residue sum is nonzero; once a cell holds a
    single pole the location is the ratio of the first two contour moments,
    re-centred once on a small circle.  Each pole gets a numeric residue, and
    an analytic residue when ``residues`` (a callable) or ``f.residue`` exists.

    Raises
    ------
    BoundaryPoleError
        If a pole stays within ``edge_tol`` of a cell edge after one jitter.
    """
    re_lo, re_hi, im_lo, im_hi = window
    analytic = residues if residues is not None else getattr(f, "residue", None)
    try:
        return _pole_scan(f, window, grid, analytic, min_cell, edge_tol, jitter=0.0)
    except _EdgeHit:
        shift = 0.5 / (grid * 7.3)
        try:
            return _pole_scan(f, window, grid, analytic, min_cell, edge_tol, jitter=shift)
        except _EdgeHit as exc:
            raise BoundaryPoleError(f"pole near a cell edge at {exc.args[0]}") from None


class _EdgeHit(Exception):
    pass


def _pole_scan(f, window, grid, analytic, min_cell, edge_tol, jitter):
    re_lo, re_hi, im_lo, im_hi = window
    wx, wy = (re_hi - re_lo) / grid, (im_hi - im_lo) / grid
    xs = re_lo + wx * (np.arange(grid + 1) + np.r_[0, np.full(grid - 1, jitter), 0])
    ys = im_lo + wy * (np.arange(grid + 1) + np.r_[0, np.full(grid - 1, jitter), 0])
    stack = [(xs[i], xs[i + 1], ys[j], ys[j + 1]) for j in range(grid) for i in range(grid)]
    found = []
    while stack:
        rect = stack.pop()
        x0, x1, y0, y1 = rect
        try:
            w = winding_number(f, rect)
            m0, m1, scale = _rect_moments(f, rect)
        except BoundaryPoleError:
            raise _EdgeHit(complex((x0 + x1) / 2, (y0 + y1) / 2)) from None
        perim = 2 * ((x1 - x0) + (y1 - y0))
        tiny = 1e-9 * scale * perim
        W = int(round(w))
        if W == 0 and abs(m0) <= tiny:
            continue
        if W == -1 and abs(m0) > tiny:
            loc = m1 / m0
            if x0 <= loc.real <= x1 and y0 <= loc.imag <= y1:
                inner = min(loc.real - x0, x1 - loc.real, loc.imag - y0, y1 - loc.imag)
                if inner < edge_tol:
                    raise _EdgeHit(loc)
                # a circle inside the cell encloses no other pole
                better = _recenter(f, loc, 0.5 * inner)
                if better is not None and abs(better - loc) < 0.25 * inner:
                    loc = better
                found.append(loc)
                continue
        if max(x1 - x0, y1 - y0) < min_cell:
            if abs(m0) > tiny:
                raise BoundaryPoleError(f"could not isolate poles near {complex(x0, y0)}")
            continue
        xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
        stack.extend([(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)])
    found.sort(key=lambda z: (z.imag, z.real))
    reports = []
    for i, p in enumerate(found):
        others = [abs(p - q) for j, q in enumerate(found) if j != i]
        r = min([0.25] + [0.4 * d for d in others])
        num = numeric_residue(f, p, r)
        ana = None
        if analytic is not None:
            try:
                ana = complex(analytic(p))
            except Exception:
                ana = None
        reports.append(PoleReport(location=p, multiplicity=1, numeric_residue=num, analytic_residue=ana))
    return reports


def _recenter(f, guess: complex, radius: float, rounds: int = 3):
    """Refine a simple-pole location by moment ratios on circles centred at the estimate."""
    loc = guess
    for _ in range(rounds):
        M = 256
        z = radius * np.exp(2j * math.pi * np.arange(M) / M)
        v = np.asarray(f(loc + z), dtype=complex) * z
        m0 = np.mean(v)
        if m0 == 0 or not np.isfinite(m0):
            return None
        shift = np.mean(v * z) / m0
        loc = loc + shift
        if abs(shift) < 1e-13 * max(1.0, abs(loc)):
            break
        radius = min(radius, max(4 * abs(shift), radius / 4))
    return complex(loc)


# ---------------------------------------------------------------------------
# Residue-content identities


@dataclass
class ResidueContentReport:
    kind: str
    D: float
    residue_tube: complex
    residue_distance: complex
    lower_content: float
    upper_content: float
    mean_G: float = math.nan
    numerical_error: float = 0.0
    passed: bool = False
    details: dict = field(default_factory=dict)


def richardson_residue(f: Callable, D: float, hs=(1e-1, 1e-2, 1e-3)):
    """Residue at a simple real pole D by extrapolating (s - D) f(s) along s = D + h."""
    vals = [h * complex(f(D + h)) for h in hs]
    return richardson(hs, vals)


def residue_content_check(member, n_per_period: int = 2048, tol_factor: float = 10.0) -> ResidueContentReport:
    """Check residue-content identities for a circle, a generalized Cantor set or a cusp drum.

    Measurable members must satisfy res(tube zeta, D) = M and res(zeta, D) =
    (N - D) M.  Nonmeasurable Cantor sets must satisfy the strict sandwich
    M_* < res(tube zeta, D) < M^* with margins above ``tol_factor`` times the
    numerical error, and res(tube zeta, D) must equal the mean of G.
    """
    from . import closed_forms, zeta_numeric
    from .tube_geometry import geometric_grid, sample_tube

    if isinstance(member, Sphere):
        N, R = member.N, member.R
        delta = R / 2
        tube = closed_forms.sphere_tube_zeta_form(N, R, delta)
        dist = closed_forms.sphere_distance_zeta_form(N, R, delta)
        D = float(N - 1)
        res_t = numeric_residue(tube, D, 0.25)
        res_d = numeric_residue(dist, D, 0.25)
        samples = sample_tube(member, geometric_grid(delta, 10 ** (-1 / 64), 64 * 4))
        rep = estimate_dimensions(samples, dim=D)
        M = rep.upper_content
        err = 1e-9 * abs(res_t) + abs(rep.upper_content - rep.lower_content)
        ok = abs(res_t - M) <= max(err, 1e-8 * M) and abs(res_d - (N - D) * M) <= max(err, 1e-8 * M) * N
        return ResidueContentReport("measurable", D, res_t, res_d, rep.lower_content, rep.upper_content,
                                    M, err, bool(ok))
    if isinstance(member, GeneralizedCantorParams):
        D, T = member.dimension, member.period
        c = float(member.threshold)
        tube = closed_forms.cantor_tube_zeta_form(member, c)
        dist = closed_forms.cantor_distance_zeta_form(member, c)
        res_t = numeric_residue(tube, D, 0.25 * min(1.0, 2 * math.pi / T))
        res_d = numeric_residue(dist, D, 0.25 * min(1.0, 2 * math.pi / T))
        h = T / n_per_period
        grid = geometric_grid(c * math.exp(-h), math.exp(-h), 4 * n_per_period + 1)
        samples = sample_tube(member, grid)
        rep = estimate_dimensions(samples, dim=D)
        fit = fit_log_periodic(samples, D)
        # grid extrema miss the true ones by at most one step of the (Lipschitz) profile
        G = samples.volume * samples.t ** (D - 1)
        grid_err = float(np.max(np.abs(np.diff(G))))
        err = grid_err + 1e-9 * abs(res_t)
        lower, upper = rep.lower_content - grid_err, rep.upper_content + grid_err
        margin_lo, margin_hi = res_t.real - lower, upper - res_t.real
        ok = (margin_lo > tol_factor * err and margin_hi > tol_factor * err
              and abs(res_t - fit.coefficient(0)) <= 1e-4
              and abs(res_d - (1 - D) * res_t) <= 1e-8)
        return ResidueContentReport("periodic", D, res_t, res_d, rep.lower_content, rep.upper_content,
                                    float(fit.coefficient(0).real), err, bool(ok),
                                    {"margins": (margin_lo, margin_hi), "period": fit.period_T})
    if isinstance(member, RelativeFractalDrum):
        from .core_model import CuspRegion
        if not isinstance(member.region, CuspRegion) or member.region.flat:
            raise DomainError("residue-content check supports power cusp drums")
        alpha = member.region.alpha
        D = 1 - alpha
        N = member.ambient_dim
        f = lambda s: zeta_numeric.relative_distance_zeta(member, None, s).value  # noqa: E731
        res, change = richardson_residue(f, D)
        grid = geometric_grid(1e-3, 10 ** (-1 / 32), 32 * 3 + 1)
        rep = estimate_dimensions(sample_tube(member, grid), dim=D)
        M = rep.upper_content
        target = (N - D) * M
        err = change + abs(rep.upper_content - rep.lower_content) * (N - D)
        ok = abs(res - target) <= 0.01 * abs(target)
        return ResidueContentReport("measurable", D, complex(res) / (N - D), complex(res),
                                    rep.lower_content, rep.upper_content, M, err, bool(ok),
                                    {"fitted_dim": rep.fitted_dim, "target": target})
    raise DomainError(f"no residue-content route for {type(member).__name__}")


# ---------------------------------------------------------------------------
# Classification


@dataclass
class Classification:
    tag: str
    period: float = math.nan
    oscillatory_period: float = math.nan
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return str(v)
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            if isinstance(v, (np.floating,)):
                return clean(float(v))
            return v
        rec = {"tag": self.tag, "period": clean(self.period), "p": clean(self.oscillatory_period)}
        rec.update({k: clean(v) for k, v in self.diagnostics.items()})
        return json.dumps(rec, sort_keys=True)


def classify(samples: TubeSamples, fit: OscillationFit, report: Optional[DimensionReport] = None,
             amplitude_tol: float = 1e-3, residual_tol: float = 1e-3, dim_tol: float = 0.02) -> Classification:
    """Tag a set as degenerate, measurable, periodic or nonperiodic."""
    if report is None:
        report = estimate_dimensions(samples, dim=fit.D)
    diag = {"upper_dim": report.upper_dim, "lower_dim": report.lower_dim,
            "lower_content": report.lower_content, "upper_content": report.upper_content,
            "fit_residual": fit.fit_residual}
    contents = (report.lower_content, report.upper_content)
    spread = report.upper_dim - report.lower_dim
    allowed = dim_tol
    if all(0 < c < math.inf for c in contents):
        # a bounded oscillation of log G tilts one-decade window slopes by at most this much
        allowed += 2 * math.log(report.upper_content / report.lower_content) / math.log(10)
    diag["dim_spread_allowed"] = allowed
    if any(c in (0.0, math.inf) for c in contents) or spread > allowed:
        return Classification("degenerate", diagnostics=diag)
    amplitude = fit.diagnostics.get("amplitude", math.nan)
    diag["amplitude"] = amplitude
    if amplitude <= amplitude_tol:
        return Classification("measurable", diagnostics=diag)
    if fit.period_found and fit.fit_residual <= residual_tol:
        T = fit.period_T
        return Classification("periodic", T, 2 * math.pi / T, diag)
    diag["candidates"] = fit.diagnostics.get("candidates", [])
    return Classification("nonperiodic", diagnostics=diag)
