"""Tube functions |A_t| and relative tube functions |A_t ∩ Ω|.

Exact formulas are used where they exist; otherwise the volume comes from an
interval-merging computation (1-D) or from a raster distance field (2-D).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, optimize
from scipy.integrate import quad

from .core_model import (
    CantorBlock, CuspRegion, FiniteString, FractalString, GeneralizedCantorParams,
    HalfOpenComplement, IntervalUnion1D, LacunaryString, PixelRegion2D, PixelSet2D,
    PointSet1D, RelativeFractalDrum, SequenceString, Sphere, StringEndpoints, TubeSamples,
    UnionOfDescriptors, cantor_endpoints, unit_ball_volume,
)
from .exceptions import CapacityError, DomainError, UnsupportedVariantError

#: Environment variable holding the largest raster side length allowed.
RESOLUTION_CAP_ENV = "FRACTALZETA_MAX_RESOLUTION"
DEFAULT_RESOLUTION_CAP = 6561


def resolution_cap() -> int:
    return int(os.environ.get(RESOLUTION_CAP_ENV, DEFAULT_RESOLUTION_CAP))


# ---------------------------------------------------------------------------
# 1-D sets


def interval_union_tube_volume(intervals, t):
    """Measure of the t-neighborhood of a finite union of closed intervals.

    ``intervals`` is an (n, 2) array sorted by left endpoint; points are
    degenerate intervals.  Works for scalar or array ``t``.
    """
    iv = np.asarray(intervals, dtype=float).reshape(-1, 2)
    lengths = iv[:, 1] - iv[:, 0]
    gaps = iv[1:, 0] - iv[:-1, 1]
    t = np.asarray(t, dtype=float)
    # each gap of width w is covered up to min(w, 2t); the two outer collars add 2t
    covered = np.minimum(gaps[None, :], 2 * t.reshape(-1, 1)).sum(axis=1)
    out = lengths.sum() + covered + 2 * t.reshape(-1)
    return out.reshape(t.shape) if t.ndim else float(out[0])


def _cantor_G(params: GeneralizedCantorParams, tau):
    """The periodic factor G(tau) of the Cantor tube formula."""
    m, D, T = params.m, params.dimension, params.period
    c = float(params.threshold)
    x = (np.asarray(tau, dtype=float) + math.log(c)) / T
    # g(x) = 1 - x on (0, 1], extended 1-periodically
    g = np.ceil(x) - x
    ma = m * params.ratio if params.dim is None else m * math.exp(-T)
    return c ** (D - 1) * ma ** g + 2 * c ** D * float(m) ** g


def cantor_tube_volume(params: GeneralizedCantorParams, t):
    """|C^(m,a)_t| = t^(1-D) G(log 1/t) for 0 < t < c."""
    t_arr = np.asarray(t, dtype=float)
    c = float(params.threshold)
    if np.any(t_arr <= 0) or np.any(t_arr >= c):
        raise DomainError(f"the Cantor tube formula needs 0 < t < c = {c}")
    D = params.dimension
    out = t_arr ** (1 - D) * _cantor_G(params, np.log(1 / t_arr))
    return out if out.ndim else float(out)


def cantor_tube_volume_oracle(params: GeneralizedCantorParams, t: float,
                              max_intervals: int = 1 << 20) -> float:
    """Exact |C_t| by merging the t-collars of a fine enough pre-fractal.

    Once every hole of the level-n construction below the current level is
    narrower than 2t the collars of C and of the pre-fractal coincide, so the
    merge is exact rather than approximate.
    """
    c = float(params.threshold)
    n = 0
    while c * params.ratio ** n > t:
        n += 1
    if params.m ** n > max_intervals:
        raise CapacityError("t too small for the interval-merging oracle")
    iv = cantor_endpoints(params, n, exact=False).intervals
    return interval_union_tube_volume(iv, t)


def _lacunary_tube(string: LacunaryString, t: float) -> float:
    total = float(string.total_length)
    count, used = 0, 0.0
    for length, mult in string.blocks():
        length = float(length)
        if length < 2 * t:
            break
        count += mult
        used += mult * length
    return 2 * t * count + (total - used)


def string_tube_volume(string: FractalString, t: float) -> float:
    """Measure of {x in Omega_L : d(x, A_L) <= t}.

    Lengths with l_j >= 2t (ties included) contribute 2t, shorter ones their full length.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    if isinstance(string, LacunaryString):
        return _lacunary_tube(string, t)
    if isinstance(string, FiniteString):
        ls = np.array([float(v) for v in string.values])
        big = ls >= 2 * t
        return float(2 * t * big.sum() + ls[~big].sum())
    if isinstance(string, SequenceString):
        total = float(string.total_length)
        count, used, J = 0, 0.0, 0
        chunk = 4096
        while True:
            vals = string._terms(J + 1, J + 1 + chunk)
            big = vals >= 2 * t
            count += int(big.sum())
            used += float(vals[big].sum())
            J += chunk
            if not big[-1]:
                break
            chunk *= 2
        return 2 * t * count + (total - used)
    raise UnsupportedVariantError(f"no tube evaluator for {type(string).__name__}")


def sphere_tube_volume(N: int, R: float, t):
    """Volume of the two-sided t-collar of the (N-1)-sphere of radius R."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0) or np.any(t_arr >= R):
        raise DomainError("sphere tube formula needs 0 < t < R")
    out = unit_ball_volume(N) * ((R + t_arr) ** N - (R - t_arr) ** N)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# 2-D rasters


@dataclass(frozen=True, eq=False)
class DistanceField2D:
    """Euclidean distance from each pixel center to the rasterized set.

    ``convention`` is ``"center"`` (distance to the nearest set pixel center) or
    ``"square"`` (distance to that pixel's closed square).
    """

    grid: np.ndarray
    pixel_size: float
    extent: tuple
    set_mask: np.ndarray
    convention: str = "center"

    @property
    def pixel_area(self):
        return self.pixel_size ** 2


def rasterize(set_, resolution: int, extent=(0.0, 1.0, 0.0, 1.0)) -> PixelSet2D:
    """Binary raster of a 2-D set; pixels touching the set are marked."""
    if isinstance(set_, PixelSet2D):
        if set_.mask.shape[1] != resolution:
            raise DomainError("pixel sets are used at their native resolution")
        return set_
    if isinstance(set_, Sphere) and set_.N == 2:
        xmin, xmax, ymin, ymax = extent
        p = (xmax - xmin) / resolution
        rows = int(round((ymax - ymin) / p))
        cx, cy = (set_.center or (0.0, 0.0))
        xs = xmin + (np.arange(resolution) + 0.5) * p
        ys = ymin + (np.arange(rows) + 0.5) * p
        X, Y = np.meshgrid(xs, ys)
        r = np.hypot(X - cx, Y - cy)
        mask = np.abs(r - set_.R) <= p / math.sqrt(2)
        return PixelSet2D(mask, (xmin, xmax, ymin, ymax))
    raise UnsupportedVariantError(f"cannot rasterize {type(set_).__name__}")


def raster_distance_field(set_, resolution: int | None = None, extent=(0.0, 1.0, 0.0, 1.0),
                          convention: str = "center") -> DistanceField2D:
    """Exact Euclidean distance transform of the rasterized set."""
    if isinstance(set_, PixelSet2D) and resolution is None:
        resolution = set_.mask.shape[1]
    if resolution is None or resolution < 3:
        raise DomainError("resolution must be given and >= 3")
    if resolution > resolution_cap():
        raise CapacityError(f"resolution {resolution} above the cap {resolution_cap()} "
                            f"(set {RESOLUTION_CAP_ENV} to raise it)")
    pix = rasterize(set_, resolution, extent)
    p = pix.pixel_size
    if convention == "center":
        d = ndimage.distance_transform_edt(~pix.mask, sampling=p)
    elif convention == "square":
        _, (iy, ix) = ndimage.distance_transform_edt(~pix.mask, return_indices=True)
        rows, cols = np.indices(pix.mask.shape)
        dy = np.maximum(np.abs(rows - iy) - 0.5, 0.0)
        dx = np.maximum(np.abs(cols - ix) - 0.5, 0.0)
        d = np.hypot(dx, dy) * p
    else:
        raise DomainError(f"unknown convention {convention!r}")
    d.setflags(write=False)
    return DistanceField2D(d, p, pix.extent, pix.mask, convention)


def raster_tube_volume(field: DistanceField2D, t: float, region_mask=None):
    """(volume, error_bound) of {d <= t}, counted on pixels (optionally inside a region).

    Pixels whose distance is within one pixel diagonal of ``t`` may be
    misclassified; their total area is the error bound.
    """
    d = field.grid
    if region_mask is not None:
        d = d[np.asarray(region_mask, dtype=bool)]
    inside = np.count_nonzero(d <= t)
    diag = field.pixel_size * math.sqrt(2)
    boundary = np.count_nonzero(np.abs(d - t) <= diag)
    return inside * field.pixel_area, boundary * field.pixel_area


# ---------------------------------------------------------------------------
# Relative tube functions


def _cusp_crossing(region: CuspRegion, t: float) -> float:
    """Abscissa where the cusp profile meets the circle of radius t (or the cutoff)."""
    xmax = min(t, region.scale)
    f = lambda x: region.height(x) - math.sqrt(max(t * t - x * x, 0.0))  # noqa: E731
    if f(xmax) <= 0:
        return xmax
    return optimize.brentq(f, 0.0, xmax, xtol=1e-15 * max(t, 1e-300), rtol=1e-15)


def _disk_strip(t: float, x0: float, x1: float) -> float:
    """Integral of sqrt(t^2 - x^2) over [x0, x1]."""
    F = lambda x: 0.5 * (x * math.sqrt(max(t * t - x * x, 0.0)) + t * t * math.asin(min(x / t, 1.0)))  # noqa: E731
    return F(x1) - F(x0)


def cusp_tube_volume(region: CuspRegion, t: float) -> float:
    """|B_t(0) ∩ Ω| for a cusp region, as the integral of min(h(x), sqrt(t^2 - x^2))."""
    if t <= 0:
        raise DomainError("t must be positive")
    xs = _cusp_crossing(region, t)
    xmax = min(t, region.scale)
    L = region.scale
    if region.flat:
        head = quad(lambda x: float(region.height(x)), 0.0, xs, epsabs=0, epsrel=1e-12, limit=200)[0]
    else:
        head = L ** (1 - region.alpha) * xs ** (region.alpha + 1) / (region.alpha + 1)
    return head + _disk_strip(t, xs, xmax)


def log_cusp_tube_volume(region: CuspRegion, t: float) -> float:
    """log |B_t(0) ∩ Ω|, usable where the volume underflows (flat cusps).

    For the exponential cusp the profile L exp(-L/x) stays below the circle up
    to x = t (to far beyond double precision once t << L), so the volume is
    exp(-L/t) * ∫_0^t L exp(L/t - L/x) dx with a well-scaled integrand.
    """
    if not region.flat:
        return math.log(cusp_tube_volume(region, t))
    L = region.scale
    xmax = min(t, L)
    if L / t < 30:
        return math.log(cusp_tube_volume(region, t))
    integrand = lambda x: L * math.exp(L / xmax - L / x) if x > 0 else 0.0  # noqa: E731
    scaled = quad(integrand, 0.0, xmax, epsabs=0, epsrel=1e-10, limit=200)[0]
    return -L / xmax + math.log(scaled)


def relative_tube_volume(drum: RelativeFractalDrum, t: float) -> float:
    """|A_t ∩ Ω| for the supported drum variants."""
    if t <= 0:
        raise DomainError("t must be positive")
    A, R = drum.set, drum.region
    if isinstance(R, CuspRegion) and isinstance(A, PointSet1D):
        return cusp_tube_volume(R, t)
    if isinstance(R, HalfOpenComplement) and isinstance(A, StringEndpoints):
        lam = R.scale
        return lam * string_tube_volume(R.string, t / lam)
    if isinstance(R, PixelRegion2D) and isinstance(A, PixelSet2D):
        field = raster_distance_field(A, convention="square")
        return raster_tube_volume(field, t, R.mask)[0]
    raise UnsupportedVariantError(
        f"no relative tube evaluator for ({type(A).__name__}, {type(R).__name__})")


# ---------------------------------------------------------------------------
# Sampling


def geometric_grid(t_max: float, ratio: float, count: int) -> np.ndarray:
    """Decreasing grid t_k = t_max * ratio**k, k = 0..count-1."""
    if not 0 < ratio < 1:
        raise DomainError("grid ratio must lie in (0, 1)")
    return t_max * ratio ** np.arange(count)


def _union_tube(union: UnionOfDescriptors, t: np.ndarray) -> np.ndarray:
    hulls = sorted(m.hull for m in union.members)
    sep = min((b[0] - a[1] for a, b in zip(hulls, hulls[1:])), default=math.inf)
    if np.any(2 * t > sep):
        raise DomainError("collars of union members overlap at this t")
    total = np.zeros_like(t)
    for member in union.members:
        if not isinstance(member, CantorBlock):
            raise UnsupportedVariantError("unions are sampled only for Cantor blocks")
        total += member.scale * cantor_tube_volume(member.params, t / member.scale)
    return total


def tube_volume(obj, t: float) -> float:
    """|A_t| (or |A_t ∩ Ω| for drums) at a single t."""
    return float(sample_tube(obj, [t, t / 2]).volume[-1])


def sample_tube(obj, t_grid, pixel_region=None) -> TubeSamples:
    """Tube volumes of a set or drum on ``t_grid`` (strictly decreasing, positive)."""
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or np.any(t <= 0) or np.any(np.diff(t) >= 0):
        raise DomainError("t_grid must be strictly decreasing and positive")
    err = np.zeros_like(t)
    exact = np.ones_like(t, dtype=bool)
    if isinstance(obj, (GeneralizedCantorParams, CantorBlock)):
        params = obj if isinstance(obj, GeneralizedCantorParams) else obj.params
        scale = 1.0 if isinstance(obj, GeneralizedCantorParams) else obj.scale
        c = float(params.threshold) * scale
        vol = np.empty_like(t)
        small = t < c
        if small.any():
            vol[small] = scale * cantor_tube_volume(params, t[small] / scale)
        for i in np.flatnonzero(~small):
            vol[i] = scale * cantor_tube_volume_oracle(params, t[i] / scale)
        return TubeSamples(t, vol, 1, exact, err)
    if isinstance(obj, UnionOfDescriptors):
        return TubeSamples(t, _union_tube(obj, t), 1, exact, err)
    if isinstance(obj, Sphere):
        return TubeSamples(t, sphere_tube_volume(obj.N, obj.R, t), obj.N, exact, err)
    if isinstance(obj, FractalString):
        return TubeSamples(t, np.array([string_tube_volume(obj, x) for x in t]), 1, exact, err)
    if isinstance(obj, (PointSet1D, IntervalUnion1D)):
        iv = obj.intervals if isinstance(obj, IntervalUnion1D) else np.repeat(obj.points[:, None], 2, 1)
        return TubeSamples(t, interval_union_tube_volume(iv, t), 1, exact, err)
    if isinstance(obj, PixelSet2D):
        field = raster_distance_field(obj, convention="square")
        pairs = [raster_tube_volume(field, x, pixel_region) for x in t]
        vol = np.array([p[0] for p in pairs])
        err = np.array([p[1] for p in pairs])
        return TubeSamples(t, vol, 2, np.zeros_like(t, dtype=bool), err)
    if isinstance(obj, RelativeFractalDrum):
        if isinstance(obj.region, PixelRegion2D):
            return sample_tube(obj.set, t, obj.region.mask)
        vol = np.array([relative_tube_volume(obj, x) for x in t])
        return TubeSamples(t, vol, obj.ambient_dim, exact, err)
    raise UnsupportedVariantError(f"cannot sample {type(obj).__name__}")
