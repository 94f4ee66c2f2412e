"""Shared domain types and exact-arithmetic helpers.

Every descriptor is an immutable value.  Rational parameters are kept as
:class:`fractions.Fraction` and only converted to binary64 where a numeric
evaluator needs them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .exceptions import CapacityError, DomainError

Number = Union[int, float, Fraction]

#: Default cap on the number of intervals a pre-fractal construction may produce.
CONSTRUCTION_BUDGET = 1 << 21

#: Relative size of the certified tail used when summing rule-generated strings.
TAIL_TOLERANCE = 1e-12


def as_number(value) -> Number:
    """Parse ``value`` into an exact number when possible.

    Strings such as ``"1/3"`` or ``"0.25"`` become :class:`Fraction`; ints and
    Fractions pass through; floats are kept as floats.
    """
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (float, np.floating)):
        return float(value)
    raise TypeError(f"cannot interpret {value!r} as a real number")


def unit_ball_volume(N: int) -> float:
    """Lebesgue measure of the unit ball in R^N, pi^(N/2) / Gamma(N/2 + 1)."""
    return math.pi ** (N / 2) / math.gamma(N / 2 + 1)


# ---------------------------------------------------------------------------
# Generalized Cantor sets


@dataclass(frozen=True)
class GeneralizedCantorParams:
    """Parameters ``(m, a)`` of the generalized Cantor set C^(m,a).

    ``m`` equidistant closed intervals of length ``a`` are kept at each step.
    When ``dim`` is given the ratio is the irrational number ``m**(-1/dim)``
    and the dimension is stored exactly instead of being recomputed.
    """

    m: int
    a: Number
    delta: Optional[float] = None
    dim: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.a, str):
            object.__setattr__(self, "a", as_number(self.a))
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"m must be an integer >= 2, got {self.m}")
        object.__setattr__(self, "m", int(self.m))
        if not 0 < self.a or not self.m * self.a < 1:
            raise DomainError(f"need 0 < a < 1/m, got m={self.m}, a={self.a}")
        if self.delta is not None and self.delta <= 0:
            raise DomainError("delta must be positive")

    @classmethod
    def from_dimension(cls, m: int, dim: float, delta: Optional[float] = None):
        if not 0 < dim < 1:
            raise DomainError("dimension must lie in (0, 1)")
        return cls(m=m, a=float(m) ** (-1.0 / dim), delta=delta, dim=float(dim))

    @property
    def exact(self) -> bool:
        return isinstance(self.a, (int, Fraction)) and self.dim is None

    @property
    def ratio(self) -> float:
        return float(self.a)

    @property
    def period(self) -> float:
        """Multiplicative period T = log(1/a) of the tube oscillation."""
        if self.dim is not None:
            return math.log(self.m) / self.dim
        return -math.log(float(self.a))

    @property
    def dimension(self) -> float:
        """Box dimension log_{1/a} m."""
        if self.dim is not None:
            return self.dim
        return math.log(self.m) / self.period

    @property
    def oscillatory_period(self) -> float:
        return 2 * math.pi / self.period

    @property
    def gap(self):
        """Length of each first-level hole, (1 - m a) / (m - 1)."""
        return (1 - self.m * self.a) / (self.m - 1)

    @property
    def threshold(self):
        """c = (1 - m a) / (2 (m - 1)); the tube formula holds for t < c."""
        return self.gap / 2

    def log_ratio_power(self, s):
        """a**s computed as exp(-s T), keeping the dimension exact."""
        return np.exp(-np.asarray(s) * self.period)


def cantor_endpoints(params: GeneralizedCantorParams, level: int,
                     exact: Optional[bool] = None,
                     budget: int = CONSTRUCTION_BUDGET) -> "IntervalUnion1D":
    """Intervals of the ``level``-th pre-fractal of C^(m,a) inside [0, 1]."""
    if level < 0:
        raise DomainError("level must be >= 0")
    count = params.m ** level
    if count > budget:
        raise CapacityError(f"{count} intervals exceed the construction budget {budget}")
    if exact is None:
        exact = params.exact
    if exact:
        a = Fraction(params.a)
        step = (1 - a) / (params.m - 1)
        lefts = [Fraction(0)]
        length = Fraction(1)
        for _ in range(level):
            lefts = [x + i * length * step for x in lefts for i in range(params.m)]
            length *= a
        pairs = tuple((x, x + length) for x in lefts)
        return IntervalUnion1D.from_pairs(pairs)
    a = params.ratio
    step = (1 - a) / (params.m - 1)
    lefts = np.zeros(1)
    length = 1.0
    offsets = np.arange(params.m) * step
    for _ in range(level):
        lefts = (lefts[:, None] + length * offsets[None, :]).ravel()
        length *= a
    return IntervalUnion1D(np.column_stack([lefts, lefts + length]))


# ---------------------------------------------------------------------------
# Fractal strings


class FractalString:
    """A nonincreasing sequence of positive lengths with finite sum.

    Subclasses enumerate the lengths as ``(length, multiplicity)`` blocks and
    know how to bound the part of a power sum that was not enumerated.
    """

    name = "string"

    def blocks(self) -> Iterator[tuple]:
        raise NotImplementedError

    def lengths(self, count: int) -> list:
        """First ``count`` individual lengths, repeated by multiplicity."""
        out = []
        for length, mult in self.blocks():
            take = min(mult, count - len(out))
            out.extend([length] * take)
            if len(out) >= count:
                return out
        if len(out) < count:
            raise DomainError(f"string has only {len(out)} lengths, asked for {count}")
        return out

    @property
    def abscissa(self) -> float:
        """Abscissa of convergence of the geometric zeta function."""
        raise NotImplementedError

    def power_sum(self, s, rtol: float = TAIL_TOLERANCE):
        """Return ``(sum_j l_j**s, bound)`` with a certified tail bound."""
        raise NotImplementedError

    @property
    def total_length(self):
        value, _ = self.power_sum(1.0)
        return value

    @property
    def first_length(self) -> float:
        return float(next(iter(self.blocks()))[0])


@dataclass(frozen=True)
class FiniteString(FractalString):
    values: tuple

    name = "finite"

    def __post_init__(self):
        vals = tuple(as_number(v) for v in self.values)
        if not vals or any(v <= 0 for v in vals):
            raise DomainError("lengths must be positive")
        if any(vals[i] < vals[i + 1] for i in range(len(vals) - 1)):
            raise DomainError("lengths must be nonincreasing")
        object.__setattr__(self, "values", vals)

    def blocks(self):
        return ((v, 1) for v in self.values)

    @property
    def abscissa(self):
        return -math.inf

    def power_sum(self, s, rtol=TAIL_TOLERANCE):
        arr = np.array([float(v) for v in self.values])
        if isinstance(s, complex) or np.iscomplexobj(s):
            return complex(np.sum(arr.astype(complex) ** complex(s))), 0.0
        return float(np.sum(arr ** float(s))), 0.0

    @property
    def total_length(self):
        return sum(self.values)


@dataclass(frozen=True)
class LacunaryString(FractalString):
    """Lengths ``scale * ratio**n`` with multiplicity ``mult0 * base**n``, n >= 0.

    ``geometric`` (l_j = r^j) and ``cantor`` (3^-n with multiplicity 2^(n-1))
    are the two named members.
    """

    scale: Number
    ratio: Number
    base: int = 1
    mult0: int = 1
    name: str = "lacunary"

    def __post_init__(self):
        for attr in ("scale", "ratio"):
            v = getattr(self, attr)
            if isinstance(v, str):
                object.__setattr__(self, attr, as_number(v))
        if not 0 < self.ratio < 1 or self.scale <= 0:
            raise DomainError("need 0 < ratio < 1 and scale > 0")
        if self.base < 1 or self.mult0 < 1:
            raise DomainError("multiplicities must be positive integers")
        if self.base * self.ratio >= 1:
            raise DomainError("base * ratio must be < 1 for a finite total length")

    @classmethod
    def geometric(cls, r: Number = Fraction(1, 2)):
        r = as_number(r)
        return cls(scale=r, ratio=r, name="geometric")

    @classmethod
    def cantor(cls):
        return cls(scale=Fraction(1, 3), ratio=Fraction(1, 3), base=2, name="cantor")

    def blocks(self):
        n = 0
        while True:
            yield self.scale * self.ratio ** n, self.mult0 * self.base ** n
            n += 1

    @property
    def abscissa(self):
        if self.base == 1:
            return 0.0
        return math.log(self.base) / -math.log(float(self.ratio))

    @property
    def total_length(self):
        return self.mult0 * self.scale / (1 - self.base * self.ratio)

    def power_sum(self, s, rtol=TAIL_TOLERANCE, max_blocks: int = 10 ** 6):
        """Block-by-block summation with the geometric tail bound."""
        sigma = float(np.real(s))
        q = self.base * float(self.ratio) ** sigma
        if q >= 1:
            from .exceptions import DivergenceError
            raise DivergenceError(f"Re s={sigma} is not above the abscissa {self.abscissa}")
        head = self.mult0 * float(self.scale) ** sigma
        # smallest n with head q^n / (1 - q) <= rtol * head / (1 - q) * (1 - q)
        n = int(min(max_blocks, max(1, math.ceil(math.log(rtol * (1 - q)) / math.log(q)))))
        k = np.arange(n, dtype=float)
        logs = math.log(float(self.scale)) + k * math.log(float(self.ratio))
        mults = self.mult0 * np.exp(k * math.log(self.base))
        total = np.sum(mults * np.exp(complex(s) * logs))
        tail = head * q ** n / (1 - q)
        complex_s = isinstance(s, complex) or np.iscomplexobj(s)
        return (complex(total) if complex_s else float(total.real)), float(tail)

    def closed_zeta(self, s):
        """sum_n mult0 base^n (scale ratio^n)^s = mult0 scale^s / (1 - base ratio^s)."""
        s = np.asarray(s, dtype=complex)
        ls, lr = math.log(float(self.scale)), math.log(float(self.ratio))
        return self.mult0 * np.exp(s * ls) / (1 - self.base * np.exp(s * lr))

    def closed_zeta_poles(self, kmax: int):
        if self.base == 1:
            return []
        T = -math.log(float(self.ratio))
        D = math.log(self.base) / T
        return [complex(D, 2 * math.pi * k / T) for k in range(-kmax, kmax + 1)]


@dataclass(frozen=True)
class SequenceString(FractalString):
    """Lengths given by a rule ``term(j)``, j >= 1, dominated by C j^(-p).

    When ``exact_power`` is set the rule is exactly C j^(-p) and tails are
    estimated by the midpoint integral with a bracketing error; otherwise only
    the dominating integral bound is used.
    """

    term: object
    C: float
    p: float
    exact_power: bool = False
    total: Optional[Number] = None
    name: str = "sequence"

    @classmethod
    def power(cls, p: float, C: float = 1.0):
        return cls(term=lambda j: C * j ** (-p), C=C, p=p, exact_power=True,
                   name=f"power{p:g}")

    @classmethod
    def telescoping(cls):
        """l_j = 1 / (j (j + 1)); sum 1."""
        return cls(term=lambda j: 1.0 / (j * (j + 1.0)), C=1.0, p=2.0,
                   total=1, name="telescoping")

    def blocks(self):
        j = 1
        while True:
            yield self.term(j), 1
            j += 1

    @property
    def abscissa(self):
        return 1.0 / self.p

    def _terms(self, start: int, stop: int) -> np.ndarray:
        j = np.arange(start, stop, dtype=float)
        return np.asarray(self.term(j), dtype=float)

    def power_sum(self, s, rtol=TAIL_TOLERANCE, max_terms: int = 10 ** 7):
        sigma = float(np.real(s))
        ps = self.p * sigma
        if ps <= 1:
            from .exceptions import DivergenceError
            raise DivergenceError(f"Re s={sigma} is not above 1/p={1 / self.p}")
        complex_s = isinstance(s, complex) or np.iscomplexobj(s)
        s = complex(s)
        total = 0j
        J = 0
        chunk = 4096
        while True:
            vals = self._terms(J + 1, J + 1 + chunk)
            total += np.sum(vals.astype(complex) ** s)
            J += chunk
            if self.exact_power:
                # midpoint integral estimate; error ~ |ps(ps+1)| C^sigma J^(-ps-1) / 24
                est = self.C ** s * (J + 0.5) ** (1 - self.p * s) / (self.p * s - 1)
                bound = 2 * abs(self.p * s * (self.p * s + 1)) * self.C ** sigma \
                    * J ** (-ps - 1) / (24 * (ps + 1))
            else:
                est = 0.0
                bound = self.C ** sigma * J ** (1 - ps) / (ps - 1)
            if bound <= rtol * abs(total) or J >= max_terms:
                break
            chunk = min(chunk * 2, 1 << 20)
        value = total + est
        return (value if complex_s else value.real), bound

    @property
    def total_length(self):
        if self.total is not None:
            return self.total
        value, _ = self.power_sum(1.0)
        return value


def string_endpoints(string: FractalString, count: int) -> "PointSet1D":
    """Endpoints a_k = sum_{j >= k} l_j for k = 1..count (returned ascending)."""
    if count < 1:
        raise DomainError("count must be >= 1")
    ls = string.lengths(count - 1) if count > 1 else []
    total = string.total_length
    vals = [total]
    for length in ls:
        vals.append(vals[-1] - length)
    if any(v <= 0 for v in vals):
        raise DomainError("endpoints must be positive")
    return PointSet1D.from_values(sorted(vals))


# ---------------------------------------------------------------------------
# Set descriptors


@dataclass(frozen=True, eq=False)
class PointSet1D:
    points: np.ndarray
    exact: Optional[tuple] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise DomainError("need a nonempty 1-D array of points")
        if np.any(np.diff(pts) <= 0):
            raise DomainError("points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_values(cls, values: Sequence):
        vals = [as_number(v) for v in values]
        exact = tuple(vals) if all(isinstance(v, (int, Fraction)) for v in vals) else None
        return cls(np.array([float(v) for v in vals]), exact)

    @property
    def hull(self):
        return float(self.points[0]), float(self.points[-1])


@dataclass(frozen=True, eq=False)
class IntervalUnion1D:
    intervals: np.ndarray
    exact: Optional[tuple] = None

    def __post_init__(self):
        arr = np.asarray(self.intervals, dtype=float).reshape(-1, 2)
        if arr.size == 0 or np.any(arr[:, 1] < arr[:, 0]):
            raise DomainError("intervals must be nonempty with lo <= hi")
        if np.any(arr[1:, 0] <= arr[:-1, 1]):
            raise DomainError("intervals must be sorted and pairwise disjoint")
        arr.setflags(write=False)
        object.__setattr__(self, "intervals", arr)

    @classmethod
    def from_pairs(cls, pairs):
        exact = tuple(pairs) if all(isinstance(x, (int, Fraction)) for p in pairs for x in p) else None
        return cls(np.array([[float(lo), float(hi)] for lo, hi in pairs]), exact)

    @property
    def total_length(self):
        if self.exact is not None:
            return sum(hi - lo for lo, hi in self.exact)
        return float(np.sum(self.intervals[:, 1] - self.intervals[:, 0]))

    @property
    def hull(self):
        return float(self.intervals[0, 0]), float(self.intervals[-1, 1])

    def __len__(self):
        return len(self.intervals)


@dataclass(frozen=True)
class CantorBlock:
    """C^(m,a) placed affinely: ``offset + scale * C``."""

    params: GeneralizedCantorParams
    offset: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise DomainError("scale must be positive")

    @property
    def hull(self):
        return float(self.offset), float(self.offset + self.scale)

    @property
    def dimension(self):
        return self.params.dimension


@dataclass(frozen=True)
class StringEndpoints:
    """The endpoint set A_L = {a_k} of a fractal string, scaled by ``scale``."""

    string: FractalString
    scale: float = 1.0

    @property
    def hull(self):
        return 0.0, float(self.string.total_length) * self.scale


@dataclass(frozen=True)
class Sphere:
    """The (N-1)-sphere of radius R in R^N."""

    N: int
    R: float
    center: tuple = ()

    def __post_init__(self):
        if self.N < 1 or self.R <= 0:
            raise DomainError("need N >= 1 and R > 0")


@dataclass(frozen=True, eq=False)
class PixelSet2D:
    """Binary raster; ``mask[i, j]`` covers the pixel in row i (y) and column j (x).

    ``extent`` is ``(xmin, xmax, ymin, ymax)`` in physical units; pixels are square.
    """

    mask: np.ndarray
    extent: tuple = (0.0, 1.0, 0.0, 1.0)

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 2 or not mask.any():
            raise DomainError("mask must be a 2-D array with at least one set pixel")
        xmin, xmax, ymin, ymax = map(float, self.extent)
        px, py = (xmax - xmin) / mask.shape[1], (ymax - ymin) / mask.shape[0]
        if not math.isclose(px, py, rel_tol=1e-9):
            raise DomainError("pixels must be square")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "extent", (xmin, xmax, ymin, ymax))

    @property
    def pixel_size(self) -> float:
        return (self.extent[1] - self.extent[0]) / self.mask.shape[1]

    def scaled(self, lam: float) -> "PixelSet2D":
        return PixelSet2D(self.mask, tuple(lam * e for e in self.extent))


@dataclass(frozen=True)
class UnionOfDescriptors:
    """Members placed in explicit boxes with pairwise disjoint interiors.

    In 1-D a box is ``(lo, hi)``.
    """

    members: tuple
    boxes: tuple

    def __post_init__(self):
        if len(self.members) != len(self.boxes) or not self.members:
            raise DomainError("need one placement box per member")
        boxes = [tuple(map(float, b)) for b in self.boxes]
        order = sorted(range(len(boxes)), key=lambda i: boxes[i][0])
        for i, j in zip(order, order[1:]):
            if boxes[i][1] > boxes[j][0]:
                raise DomainError("placement boxes must have disjoint interiors")
        for member, box in zip(self.members, boxes):
            hull = getattr(member, "hull", None)
            if hull is not None and (hull[0] < box[0] - 1e-12 or hull[1] > box[1] + 1e-12):
                raise DomainError("member does not fit inside its placement box")
        object.__setattr__(self, "boxes", tuple(boxes))

    @property
    def hull(self):
        return min(b[0] for b in self.boxes), max(b[1] for b in self.boxes)


SetDescriptor = Union[PointSet1D, IntervalUnion1D, CantorBlock, StringEndpoints,
                      Sphere, PixelSet2D, UnionOfDescriptors]


# ---------------------------------------------------------------------------
# Regions and relative fractal drums


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    @property
    def volume(self):
        return float(np.prod(np.subtract(self.hi, self.lo)))


@dataclass(frozen=True)
class CuspRegion:
    """{0 < x < L, 0 < y < L h(x / L)} with h(u) = u^alpha or exp(-1/u).

    ``L`` is the scale; ``alpha=None`` selects the exponential (flat) cusp.
    """

    alpha: Optional[float] = 2.0
    scale: float = 1.0

    def __post_init__(self):
        if self.alpha is not None and self.alpha <= 1:
            raise DomainError("power cusps need alpha > 1")
        if self.scale <= 0:
            raise DomainError("scale must be positive")

    @property
    def flat(self) -> bool:
        return self.alpha is None

    def height(self, x):
        u = np.asarray(x, dtype=float) / self.scale
        if self.flat:
            with np.errstate(divide="ignore", over="ignore"):
                return self.scale * np.where(u > 0, np.exp(-1.0 / np.maximum(u, 1e-300)), 0.0)
        return self.scale * u ** self.alpha

    @property
    def volume(self):
        if self.flat:
            from scipy.integrate import quad
            return self.scale ** 2 * quad(lambda u: math.exp(-1 / u) if u > 0 else 0.0, 0, 1)[0]
        return self.scale ** 2 / (1 + self.alpha)


@dataclass(frozen=True)
class HalfOpenComplement:
    """Omega_L: the union of the open gaps (a_{k+1}, a_k) of a fractal string."""

    string: FractalString
    scale: float = 1.0

    @property
    def volume(self):
        return float(self.string.total_length) * self.scale


@dataclass(frozen=True, eq=False)
class PixelRegion2D:
    mask: np.ndarray
    extent: tuple = (0.0, 1.0, 0.0, 1.0)

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "extent", tuple(map(float, self.extent)))

    @property
    def pixel_size(self):
        return (self.extent[1] - self.extent[0]) / self.mask.shape[1]

    @property
    def volume(self):
        return float(self.mask.sum()) * self.pixel_size ** 2

    def scaled(self, lam):
        return PixelRegion2D(self.mask, tuple(lam * e for e in self.extent))


Region = Union[Box, CuspRegion, HalfOpenComplement, PixelRegion2D]


@dataclass(frozen=True)
class RelativeFractalDrum:
    set: object
    region: object
    ambient_dim: int = 2

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise DomainError("ambient dimension must be >= 1")

    def scaled(self, lam: float) -> "RelativeFractalDrum":
        """The drum (lam A, lam Omega)."""
        if lam <= 0:
            raise DomainError("scale factor must be positive")
        A, R = self.set, self.region
        if isinstance(R, CuspRegion) and isinstance(A, PointSet1D):
            return RelativeFractalDrum(A, CuspRegion(R.alpha, R.scale * lam), self.ambient_dim)
        if isinstance(R, HalfOpenComplement) and isinstance(A, StringEndpoints):
            return RelativeFractalDrum(StringEndpoints(A.string, A.scale * lam),
                                       HalfOpenComplement(R.string, R.scale * lam), 1)
        if isinstance(R, PixelRegion2D) and isinstance(A, PixelSet2D):
            return RelativeFractalDrum(A.scaled(lam), R.scaled(lam), 2)
        from .exceptions import UnsupportedVariantError
        raise UnsupportedVariantError(f"cannot scale drum ({type(A).__name__}, {type(R).__name__})")


def cusp_drum(alpha: Optional[float] = 2.0, scale: float = 1.0) -> RelativeFractalDrum:
    """A = {origin} relative to a power (or, with alpha=None, exponential) cusp."""
    return RelativeFractalDrum(PointSet1D.from_values([0]), CuspRegion(alpha, scale), 2)


def string_drum(string: FractalString, scale: float = 1.0) -> RelativeFractalDrum:
    """The drum (A_L, Omega_L) of a fractal string."""
    return RelativeFractalDrum(StringEndpoints(string, scale), HalfOpenComplement(string, scale), 1)


def carpet_mask(level: int) -> np.ndarray:
    """Level-``level`` Sierpinski carpet raster (True = kept square), 3^level pixels wide."""
    mask = np.ones((1, 1), dtype=bool)
    for _ in range(level):
        hole = np.zeros_like(mask)
        mask = np.block([[mask, mask, mask], [mask, hole, mask], [mask, mask, mask]])
    return mask


def carpet_drum(level: int) -> RelativeFractalDrum:
    """The relative Sierpinski carpet (A, unit square) rasterized at 3^level."""
    mask = carpet_mask(level)
    return RelativeFractalDrum(PixelSet2D(mask), PixelRegion2D(np.ones_like(mask)), 2)


# ---------------------------------------------------------------------------
# Sample and report containers


@dataclass(frozen=True, eq=False)
class TubeSamples:
    """Pairs (t, |A_t|) sorted by increasing t, with exactness flags and error bounds."""

    t: np.ndarray
    volume: np.ndarray
    ambient_dim: int
    exact: np.ndarray = None
    error_bound: np.ndarray = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.volume, dtype=float)
        if t.shape != v.shape or t.ndim != 1 or t.size < 2:
            raise DomainError("t and volume must be 1-D arrays of equal length >= 2")
        order = np.argsort(t)
        t, v = t[order], v[order]
        if np.any(np.diff(t) <= 0) or np.any(t <= 0):
            raise DomainError("t must be positive and strictly monotone")
        exact = np.ones_like(t, dtype=bool) if self.exact is None else np.asarray(self.exact, bool)[order]
        err = np.zeros_like(t) if self.error_bound is None else np.asarray(self.error_bound, float)[order]
        for arr in (t, v, exact, err):
            arr.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "volume", v)
        object.__setattr__(self, "exact", exact)
        object.__setattr__(self, "error_bound", err)

    def __len__(self):
        return len(self.t)

    def as_array(self) -> np.ndarray:
        """(n, 2) array of (t, volume), the estimator input format."""
        return np.column_stack([self.t, self.volume])


@dataclass
class PoleReport:
    location: complex
    multiplicity: int = 1
    numeric_residue: complex = complex("nan")
    analytic_residue: Optional[complex] = None

    @property
    def residue_discrepancy(self) -> float:
        if self.analytic_residue is None:
            return math.nan
        return abs(self.analytic_residue - self.numeric_residue)


@dataclass
class DimensionReport:
    upper_dim: float
    lower_dim: float
    lower_content: float
    upper_content: float
    fitted_dim: float = math.nan
    classification: str = "unclassified"
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower_dim > self.upper_dim + 1e-12:
            raise DomainError("lower dimension exceeds upper dimension")


@dataclass
class ZetaEvaluation:
    s: complex
    value: complex
    est_error: float
    method: str

    def __complex__(self):
        return complex(self.value)


def is_real_number(x) -> bool:
    return isinstance(x, Real)


# ---------------------------------------------------------------------------
# JSON schema: {"variant": <tag>, ...fields}; numbers are decimal strings.


def _num_str(x) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _string_to_json(string: FractalString) -> dict:
    if isinstance(string, LacunaryString):
        return {"variant": "LacunaryString", "scale": _num_str(string.scale),
                "ratio": _num_str(string.ratio), "base": str(string.base),
                "mult0": str(string.mult0), "name": string.name}
    if isinstance(string, FiniteString):
        return {"variant": "FiniteString", "values": [_num_str(v) for v in string.values]}
    if isinstance(string, SequenceString) and string.exact_power:
        return {"variant": "PowerString", "p": _num_str(string.p), "C": _num_str(string.C)}
    if isinstance(string, SequenceString) and string.name == "telescoping":
        return {"variant": "TelescopingString"}
    raise TypeError(f"string {string!r} has no JSON form")


def _string_from_json(d: dict) -> FractalString:
    tag = d["variant"]
    if tag == "LacunaryString":
        return LacunaryString(as_number(d["scale"]), as_number(d["ratio"]),
                              int(d.get("base", 1)), int(d.get("mult0", 1)),
                              d.get("name", "lacunary"))
    if tag == "FiniteString":
        return FiniteString(tuple(as_number(v) for v in d["values"]))
    if tag == "PowerString":
        return SequenceString.power(float(as_number(d["p"])), float(as_number(d.get("C", "1"))))
    if tag == "TelescopingString":
        return SequenceString.telescoping()
    raise ValueError(f"unknown string variant {tag!r}")


def _strict(d: dict, allowed: set):
    extra = set(d) - allowed - {"variant"}
    if extra:
        raise ValueError(f"unknown keys for {d.get('variant')}: {sorted(extra)}")


def descriptor_to_json(obj) -> dict:
    """Serialize a set, region, drum or Cantor parameter record."""
    if isinstance(obj, GeneralizedCantorParams):
        out = {"variant": "GeneralizedCantorParams", "m": str(obj.m), "a": _num_str(obj.a)}
        if obj.dim is not None:
            out = {"variant": "GeneralizedCantorParams", "m": str(obj.m), "dim": _num_str(obj.dim)}
        if obj.delta is not None:
            out["delta"] = _num_str(obj.delta)
        return out
    if isinstance(obj, PointSet1D):
        vals = obj.exact if obj.exact is not None else obj.points
        return {"variant": "PointSet1D", "points": [_num_str(v) for v in vals]}
    if isinstance(obj, IntervalUnion1D):
        pairs = obj.exact if obj.exact is not None else obj.intervals
        return {"variant": "IntervalUnion1D",
                "intervals": [[_num_str(lo), _num_str(hi)] for lo, hi in pairs]}
    if isinstance(obj, CantorBlock):
        return {"variant": "CantorBlock", "params": descriptor_to_json(obj.params),
                "offset": _num_str(obj.offset), "scale": _num_str(obj.scale)}
    if isinstance(obj, StringEndpoints):
        return {"variant": "StringEndpoints", "string": _string_to_json(obj.string),
                "scale": _num_str(obj.scale)}
    if isinstance(obj, Sphere):
        return {"variant": "Sphere", "N": str(obj.N), "R": _num_str(obj.R),
                "center": [_num_str(c) for c in obj.center]}
    if isinstance(obj, (PixelSet2D, PixelRegion2D)):
        rows = ["".join("1" if v else "0" for v in row) for row in obj.mask]
        return {"variant": type(obj).__name__, "rows": rows,
                "extent": [_num_str(e) for e in obj.extent]}
    if isinstance(obj, UnionOfDescriptors):
        return {"variant": "UnionOfDescriptors",
                "members": [descriptor_to_json(m) for m in obj.members],
                "boxes": [[_num_str(x) for x in b] for b in obj.boxes]}
    if isinstance(obj, Box):
        return {"variant": "Box", "lo": [_num_str(x) for x in obj.lo],
                "hi": [_num_str(x) for x in obj.hi]}
    if isinstance(obj, CuspRegion):
        return {"variant": "CuspRegion",
                "alpha": "exp" if obj.alpha is None else _num_str(obj.alpha),
                "scale": _num_str(obj.scale)}
    if isinstance(obj, HalfOpenComplement):
        return {"variant": "HalfOpenComplement", "string": _string_to_json(obj.string),
                "scale": _num_str(obj.scale)}
    if isinstance(obj, RelativeFractalDrum):
        return {"variant": "RelativeFractalDrum", "set": descriptor_to_json(obj.set),
                "region": descriptor_to_json(obj.region), "ambient_dim": str(obj.ambient_dim)}
    raise TypeError(f"no JSON form for {type(obj).__name__}")


def descriptor_from_json(d: dict):
    """Inverse of :func:`descriptor_to_json`; unknown keys are rejected."""
    tag = d.get("variant")
    f = lambda key, default=None: as_number(d[key]) if key in d else default  # noqa: E731
    if tag == "GeneralizedCantorParams":
        _strict(d, {"m", "a", "dim", "delta"})
        delta = float(f("delta")) if "delta" in d else None
        if "dim" in d:
            return GeneralizedCantorParams.from_dimension(int(f("m")), float(f("dim")), delta)
        return GeneralizedCantorParams(int(f("m")), f("a"), delta)
    if tag == "PointSet1D":
        _strict(d, {"points"})
        return PointSet1D.from_values(d["points"])
    if tag == "IntervalUnion1D":
        _strict(d, {"intervals"})
        return IntervalUnion1D.from_pairs([tuple(as_number(x) for x in p) for p in d["intervals"]])
    if tag == "CantorBlock":
        _strict(d, {"params", "offset", "scale"})
        return CantorBlock(descriptor_from_json(d["params"]), float(f("offset", 0)),
                           float(f("scale", 1)))
    if tag == "StringEndpoints":
        _strict(d, {"string", "scale"})
        return StringEndpoints(_string_from_json(d["string"]), float(f("scale", 1)))
    if tag == "Sphere":
        _strict(d, {"N", "R", "center"})
        return Sphere(int(f("N")), float(f("R")), tuple(float(as_number(c)) for c in d.get("center", [])))
    if tag in ("PixelSet2D", "PixelRegion2D"):
        _strict(d, {"rows", "extent"})
        mask = np.array([[ch == "1" for ch in row] for row in d["rows"]], dtype=bool)
        extent = tuple(float(as_number(e)) for e in d.get("extent", ["0", "1", "0", "1"]))
        return (PixelSet2D if tag == "PixelSet2D" else PixelRegion2D)(mask, extent)
    if tag == "UnionOfDescriptors":
        _strict(d, {"members", "boxes"})
        return UnionOfDescriptors(tuple(descriptor_from_json(m) for m in d["members"]),
                                  tuple(tuple(float(as_number(x)) for x in b) for b in d["boxes"]))
    if tag == "Box":
        _strict(d, {"lo", "hi"})
        return Box(tuple(float(as_number(x)) for x in d["lo"]), tuple(float(as_number(x)) for x in d["hi"]))
    if tag == "CuspRegion":
        _strict(d, {"alpha", "scale"})
        alpha = None if d.get("alpha", "2") == "exp" else float(as_number(d.get("alpha", "2")))
        return CuspRegion(alpha, float(f("scale", 1)))
    if tag == "HalfOpenComplement":
        _strict(d, {"string", "scale"})
        return HalfOpenComplement(_string_from_json(d["string"]), float(f("scale", 1)))
    if tag == "RelativeFractalDrum":
        _strict(d, {"set", "region", "ambient_dim"})
        return RelativeFractalDrum(descriptor_from_json(d["set"]), descriptor_from_json(d["region"]),
                                   int(f("ambient_dim", 2)))
    raise ValueError(f"unknown descriptor variant {tag!r}")
