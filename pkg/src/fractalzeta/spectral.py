"""Dirichlet Laplacian spectra of simple drums: spectral zeta functions, counting and Weyl remainders.

Eigenvalues mu_k of -Laplace with Dirichlet conditions are known in closed
form for intervals and rectangles; a fractal string drum is a disjoint union
of intervals and a spray is a union of scaled copies of a base drum.  The
spectral zeta function is ``sum_k mu_k^(-s/2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._numerics import richardson, riemann_zeta
from .closed_forms import MeromorphicForm, PoleLattice
from .core_model import FiniteString, FractalString, LacunaryString, ZetaEvaluation, unit_ball_volume
from .exceptions import DivergenceError, DomainError, UnsupportedVariantError
from .zeta_numeric import geometric_zeta

# eigenvalues within this relative distance of mu are counted as <= mu
COUNT_RTOL = 1e-12

_zeta_vec = np.vectorize(riemann_zeta, otypes=[complex])


def riemann_zeta_array(s):
    """Vectorized Riemann zeta (see ``riemann_zeta``)."""
    out = _zeta_vec(np.asarray(s, dtype=complex))
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Models


@dataclass(frozen=True)
class Interval:
    length: float

    def __post_init__(self):
        if self.length <= 0:
            raise DomainError("length must be positive")

    ambient_dim = 1

    @property
    def volume(self) -> float:
        return float(self.length)

    def spectrum_below(self, M: float):
        k = np.arange(1, int(math.floor(self.length * math.sqrt(M) / math.pi * (1 + COUNT_RTOL))) + 1)
        return (k * math.pi / self.length) ** 2, np.ones(len(k), dtype=np.int64)

    def count(self, mu: float) -> int:
        return int(math.floor(self.length * math.sqrt(mu) / math.pi * (1 + COUNT_RTOL)))

    def weyl_terms(self):
        # floor(x) = x - 1/2 + E with |E| <= 1/2
        return [(self.length / math.pi, 0.5), (-0.5, 0.0)]

    def remainder_bound(self):
        return 0.5, 0.0

    def mu_for_count(self, K: int) -> float:
        return (K * math.pi / self.length) ** 2


@dataclass(frozen=True)
class Rectangle:
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise DomainError("side lengths must be positive")

    ambient_dim = 2

    @property
    def volume(self) -> float:
        return float(self.a * self.b)

    def spectrum_below(self, M: float):
        X = M / math.pi ** 2 * (1 + COUNT_RTOL)
        vals = []
        for m in range(1, int(math.floor(self.a * math.sqrt(X))) + 1):
            rest = X - m * m / self.a ** 2
            n = np.arange(1, int(math.floor(self.b * math.sqrt(max(rest, 0.0)))) + 1)
            vals.append(math.pi ** 2 * (m * m / self.a ** 2 + n * n / self.b ** 2))
        v = np.sort(np.concatenate(vals)) if vals else np.zeros(0)
        return v, np.ones(len(v), dtype=np.int64)

    def count(self, mu: float) -> int:
        X = mu / math.pi ** 2 * (1 + COUNT_RTOL)
        total = 0
        for m in range(1, int(math.floor(self.a * math.sqrt(X))) + 1):
            rest = X - m * m / self.a ** 2
            total += int(math.floor(self.b * math.sqrt(max(rest, 0.0))))
        return total

    def weyl_terms(self):
        # lattice points of the quarter ellipse: W - (a+b) sqrt(mu)/pi <= N <= W with W = ab mu / 4 pi
        return [(self.a * self.b / (4 * math.pi), 1.0), (-(self.a + self.b) / (2 * math.pi), 0.5)]

    def remainder_bound(self):
        return (self.a + self.b) / (2 * math.pi), 0.5

    def mu_for_count(self, K: int) -> float:
        return 4 * math.pi * K / (self.a * self.b)


def _lacunary_remainder(scale: float, ratio: float, base: int, mult0: int):
    """(b0, rho) with sum_n mult0 base^n min(1, scale ratio^n x) <= b0 mu^rho, x = sqrt(mu)/pi."""
    if base < 2:
        raise UnsupportedVariantError("remainder bound needs base >= 2")
    D = math.log(base) / -math.log(ratio)
    C = mult0 * base * (1 / (base - 1) + 1 / (1 - base * ratio))
    return C * (scale / math.pi) ** D, D / 2


@dataclass(frozen=True)
class FractalStringDrum:
    """Disjoint union of intervals with lengths l_j."""

    string: FractalString

    ambient_dim = 1

    @property
    def volume(self) -> float:
        return float(self.string.total_length)

    def _blocks_above(self, min_length: float):
        for length, mult in self.string.blocks():
            if float(length) < min_length:
                break
            yield float(length), int(mult)

    def spectrum_below(self, M: float):
        vals, mults = [], []
        for length, mult in self._blocks_above(math.pi / math.sqrt(M) / (1 + COUNT_RTOL)):
            v, _ = Interval(length).spectrum_below(M)
            vals.append(v)
            mults.append(np.full(len(v), mult, dtype=np.int64))
        return _merge(vals, mults)

    def count(self, mu: float) -> int:
        return sum(mult * Interval(length).count(mu)
                   for length, mult in self._blocks_above(math.pi / math.sqrt(mu) / (1 + COUNT_RTOL)))

    def weyl_terms(self):
        return [(self.volume / math.pi, 0.5)]

    def remainder_bound(self):
        s = self.string
        if isinstance(s, LacunaryString):
            return _lacunary_remainder(float(s.scale), float(s.ratio), s.base, s.mult0)
        if isinstance(s, FiniteString):
            return float(len(s.values)), 0.0
        raise UnsupportedVariantError("no remainder bound for this string")

    def mu_for_count(self, K: int) -> float:
        return (K * math.pi / self.volume) ** 2


@dataclass(frozen=True)
class Spray:
    """Copies of ``base`` scaled by gamma^j with multiplicity b^j, j >= 1."""

    base: object
    gamma: float
    b: int

    def __post_init__(self):
        if not 0 < self.gamma < 1 or int(self.b) != self.b or self.b < 2:
            raise DomainError("need 0 < gamma < 1 and an integer b >= 2")

    @property
    def ambient_dim(self):
        return self.base.ambient_dim

    @property
    def dimension(self) -> float:
        return math.log(self.b) / -math.log(self.gamma)

    @property
    def volume(self) -> float:
        q = self.b * self.gamma ** self.ambient_dim
        if q >= 1:
            raise DivergenceError("copies have infinite total volume")
        return self.base.volume * q / (1 - q)

    def _copies(self, M: float):
        # copy j has eigenvalues mu / gamma^(2j); stop once its lowest exceeds M
        lowest = self.base.spectrum_below(self.base.mu_for_count(1) * 4)[0][0]
        j = 1
        while lowest / self.gamma ** (2 * j) <= M * (1 + COUNT_RTOL):
            yield j
            j += 1

    def spectrum_below(self, M: float):
        vals, mults = [], []
        for j in self._copies(M):
            scale = self.gamma ** (2 * j)
            v, m = self.base.spectrum_below(M * scale)
            vals.append(v / scale)
            mults.append(m * self.b ** j)
        return _merge(vals, mults)

    def count(self, mu: float) -> int:
        return sum(self.b ** j * self.base.count(mu * self.gamma ** (2 * j)) for j in self._copies(mu))

    def weyl_terms(self):
        if not isinstance(self.base, Interval):
            raise UnsupportedVariantError("spray Weyl terms need an interval base")
        return [(self.volume / math.pi, 0.5)]

    def remainder_bound(self):
        if not isinstance(self.base, Interval):
            raise UnsupportedVariantError("spray remainder bound needs an interval base")
        return _lacunary_remainder(self.gamma * self.base.length, self.gamma, self.b, self.b)

    def mu_for_count(self, K: int) -> float:
        return self.base.mu_for_count(K) / (self.b * self.gamma ** self.ambient_dim) ** (2 / self.ambient_dim)


def _merge(vals, mults):
    if not vals:
        return np.zeros(0), np.zeros(0, dtype=np.int64)
    v = np.concatenate(vals)
    m = np.concatenate(mults)
    order = np.argsort(v, kind="stable")
    return v[order], m[order]


def eigenvalues(model, K: int) -> np.ndarray:
    """The first K eigenvalues in nondecreasing order, repeated by multiplicity."""
    if K < 1:
        raise DomainError("K must be positive")
    M = model.mu_for_count(K)
    while True:
        v, m = model.spectrum_below(M)
        if m.sum() >= K:
            break
        M *= 2
    need = np.searchsorted(np.cumsum(m), K) + 1
    return np.repeat(v[:need], m[:need])[:K]


def counting_function(model, mu: float) -> int:
    """N(mu) = #{k : mu_k <= mu}, counted with multiplicity."""
    if mu <= 0:
        raise DomainError("mu must be positive")
    return int(model.count(float(mu)))


# ---------------------------------------------------------------------------
# Spectral zeta functions


def _weyl_tail(model, M: float, N_M: int, s: complex):
    """sum over mu_k > M of mu_k^(-s/2), from the Weyl terms, with the remainder bound."""
    half = s / 2
    sigma_half = s.real / 2
    tail = -N_M * M ** (-half)
    for c, e in model.weyl_terms():
        tail += half * c * M ** (e - half) / (half - e)
    b0, rho = model.remainder_bound()
    err = abs(half) * b0 * M ** (rho - sigma_half) / (sigma_half - rho)
    return tail, err


def spectral_zeta_enumerated(model, s, M: float) -> ZetaEvaluation:
    """Sum over all eigenvalues <= M plus the Weyl tail; error is the certified tail bound."""
    s_c = complex(s)
    N = model.ambient_dim
    if s_c.real <= N:
        raise DivergenceError(f"spectral zeta diverges for Re s <= {N}")
    v, m = model.spectrum_below(M)
    head = np.sum(m * np.exp(-s_c / 2 * np.log(v)))
    tail, err = _weyl_tail(model, M, int(m.sum()), s_c)
    value = complex(head + tail)
    err += 1e-15 * math.sqrt(len(v) + 1) * abs(value)
    out = value.real if np.isrealobj(s) else value
    return ZetaEvaluation(s, out, float(err), "partial+weyl")


def spectral_zeta(model, s, K: int = 100_000) -> ZetaEvaluation:
    """sum_k mu_k^(-s/2) for Re s > N.

    String drums and sprays use the exact factorizations; intervals and
    rectangles sum about K eigenvalues and add the Weyl tail.

    Examples
    --------
    >>> round(spectral_zeta(Interval(math.pi), 4).value * 90 / math.pi ** 4, 12)
    1.0
    """
    if isinstance(model, FractalStringDrum):
        ev = string_spectral_zeta(model.string, s)
        scale = np.exp(-complex(s) * math.log(math.pi))
        val = ev.value * scale
        return ZetaEvaluation(s, val.real if np.isrealobj(s) else val, ev.est_error * abs(scale), ev.method)
    if isinstance(model, Spray):
        return spray_spectral_zeta(model.base, model.gamma, model.b, s, K)
    return spectral_zeta_enumerated(model, s, model.mu_for_count(K))


def string_spectral_zeta(string: FractalString, s) -> ZetaEvaluation:
    """sum_{k, j} (k / l_j)^(-s) = zeta_R(s) zeta_L(s), for Re s > 1 and above the string's abscissa."""
    s_c = complex(s)
    if s_c == 1:
        raise DivergenceError("pole at s = 1")
    if s_c.real <= 1:
        raise DivergenceError("the double series needs Re s > 1")
    zR = riemann_zeta(s_c)
    zL = geometric_zeta(string, s)
    value = zR * complex(zL.value)
    err = abs(zR) * zL.est_error + 1e-14 * abs(value)
    return ZetaEvaluation(s, value.real if np.isrealobj(s) else value, float(err), "factorized")


def spray_spectral_zeta(base, gamma: float, b: int, s, K: int = 100_000,
                        string: Optional[FractalString] = None) -> ZetaEvaluation:
    """(b gamma^s / (1 - b gamma^s)) times the base spectral zeta function.

    With ``string`` the scaling factor is replaced by its geometric zeta
    function (copies scaled by the string's lengths).
    """
    s_c = complex(s)
    base_ev = spectral_zeta(base, s, K)
    if string is not None:
        fac = geometric_zeta(string, s)
        factor, ferr = complex(fac.value), fac.est_error
    else:
        D = math.log(b) / -math.log(gamma)
        if s_c.real <= D:
            raise DivergenceError(f"the scaling series diverges for Re s <= {D}")
        q = b * np.exp(s_c * math.log(gamma))
        factor, ferr = q / (1 - q), 1e-16 * abs(q / (1 - q))
    value = factor * complex(base_ev.value)
    err = abs(factor) * base_ev.est_error + ferr * abs(base_ev.value)
    return ZetaEvaluation(s, value.real if np.isrealobj(s) else value, float(err), "spray")


def string_spectral_form(string: LacunaryString) -> MeromorphicForm:
    """Continuation of zeta_R(s) zeta_L(s) for a lacunary string; poles at 1 and the string's lattice."""
    if not isinstance(string, LacunaryString):
        raise UnsupportedVariantError("closed form needs a lacunary string")
    T = -math.log(float(string.ratio))
    D = math.log(string.base) / T

    def f(s):
        return riemann_zeta_array(s) * string.closed_zeta(s)

    def res(p):
        if abs(p - 1) < 1e-12:
            return complex(string.closed_zeta(1.0))
        return riemann_zeta(p) * string.mult0 * np.exp(p * math.log(float(string.scale))) / T

    return MeromorphicForm(f, (1 + 0j,), (PoleLattice(D, 2 * math.pi / T),), res,
                           name=f"spectral {string.name}", info={"D": D, "T": T})


# ---------------------------------------------------------------------------
# Weyl law


@dataclass
class WeylReport:
    """Remainder R(mu) = N(mu) - (2 pi)^(-N) omega_N |Omega| mu^(N/2) on a grid.

    ``exponent`` is the least-squares slope of log|R| against log mu and
    ``frequency_exponent`` the slope against log sqrt(mu).
    """

    mu: np.ndarray
    remainder: np.ndarray
    exponent: float
    frequency_exponent: float
    sup_abs: float
    d: Optional[float] = None
    exponent_gap: float = math.nan
    diagnostics: dict = field(default_factory=dict)


def weyl_leading(model, mu):
    N = model.ambient_dim
    return (2 * math.pi) ** (-N) * unit_ball_volume(N) * model.volume * np.asarray(mu, dtype=float) ** (N / 2)


def weyl_check(model, mu_grid, d: Optional[float] = None) -> WeylReport:
    """Weyl remainder on ``mu_grid`` and its fitted power-law exponent, compared with d / 2."""
    mu = np.asarray(mu_grid, dtype=float)
    if np.any(mu <= 0):
        raise DomainError("mu must be positive")
    counts = np.array([counting_function(model, x) for x in mu], dtype=float)
    R = counts - weyl_leading(model, mu)
    nz = np.abs(R) > 0
    if nz.sum() >= 2:
        slope = float(np.polyfit(np.log(mu[nz]), np.log(np.abs(R[nz])), 1)[0])
    else:
        slope = math.nan
    gap = abs(slope - d / 2) if d is not None else math.nan
    return WeylReport(mu, R, slope, 2 * slope, float(np.max(np.abs(R))), d, gap,
                      {"points": int(len(mu)), "nonzero": int(nz.sum())})


# ---------------------------------------------------------------------------
# Residue at N


@dataclass
class SpectralResidueReport:
    estimate: float
    target: float
    extrapolation_change: float
    relative_error: float
    samples: list


def spectral_residue_check(model, K: int = 100_000, hs=(1e-1, 1e-2, 1e-3), tol: float = 1e-3) -> SpectralResidueReport:
    """Residue of the spectral zeta function at s = N by Richardson extrapolation of (s - N) zeta(s).

    The target is N omega_N |Omega| / (2 pi)^N.  A warning is issued when the
    extrapolation changes by more than ``tol`` relative.
    """
    N = model.ambient_dim
    vals = [h * complex(spectral_zeta(model, N + h, K).value) for h in hs]
    est, change = richardson(hs, vals)
    target = N * unit_ball_volume(N) * model.volume / (2 * math.pi) ** N
    est = float(np.real(est))
    if change > tol * abs(est):
        warnings.warn(f"residue extrapolation changed by {change:.3g}; convergence is slow", RuntimeWarning)
    return SpectralResidueReport(est, target, float(change), abs(est - target) / abs(target),
                                 [(h, v.real) for h, v in zip(hs, vals)])
