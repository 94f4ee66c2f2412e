"""Closed-form meromorphic continuations with explicit poles and residues.

Complex powers use the principal branch ``b**s = exp(s log b)`` with ``b > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional

import numpy as np

from .core_model import (
    FractalString, GeneralizedCantorParams, LacunaryString, unit_ball_volume,
)
from .exceptions import DomainError, UnsupportedVariantError


def _pow(base: float, s):
    return np.exp(np.asarray(s, dtype=complex) * math.log(base))


def _scalar(x):
    x = np.asarray(x)
    return complex(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class PoleLattice:
    """Simple poles at ``base + i * spacing * k`` for all integers k."""

    base: float
    spacing: float

    def in_window(self, window):
        re_lo, re_hi, im_lo, im_hi = window
        if not re_lo <= self.base <= re_hi:
            return []
        k_lo = math.ceil(im_lo / self.spacing - 1e-12)
        k_hi = math.floor(im_hi / self.spacing + 1e-12)
        return [complex(self.base, self.spacing * k) for k in range(k_lo, k_hi + 1)]


@dataclass(frozen=True, eq=False)
class MeromorphicForm:
    """A meromorphic function with a described pole set and residue rule.

    Parameters
    ----------
    evaluator : callable
        Vectorized map from complex ``s`` to the function value.
    finite_poles : tuple of complex
        Isolated simple poles outside any lattice.
    lattices : tuple of PoleLattice
        Infinite arithmetic progressions of simple poles.
    residue_rule : callable
        Residue at a pole of the set.
    removable : tuple of complex
        Points where the formula has an apparent singularity that cancels.
    """

    evaluator: Callable
    finite_poles: tuple = ()
    lattices: tuple = ()
    residue_rule: Optional[Callable] = None
    name: str = "form"
    removable: tuple = ()
    info: dict = field(default_factory=dict)

    def __call__(self, s):
        return _scalar(self.evaluator(np.asarray(s, dtype=complex)))

    def poles_in(self, window) -> list:
        """Poles inside ``(re_lo, re_hi, im_lo, im_hi)``, sorted by (imag, real), duplicates merged."""
        re_lo, re_hi, im_lo, im_hi = window
        out = [p for p in self.finite_poles if re_lo <= p.real <= re_hi and im_lo <= p.imag <= im_hi]
        for lat in self.lattices:
            out.extend(lat.in_window(window))
        uniq = []
        for p in sorted(out, key=lambda z: (z.imag, z.real)):
            if not any(abs(p - q) < 1e-12 for q in uniq):
                uniq.append(p)
        return uniq

    def is_pole(self, s, tol: float = 1e-9) -> bool:
        s = complex(s)
        if any(abs(s - p) < tol for p in self.finite_poles):
            return True
        return any(abs(s.real - lat.base) < tol
                   and abs((s.imag / lat.spacing) - round(s.imag / lat.spacing)) * lat.spacing < tol
                   for lat in self.lattices)

    def residue(self, pole) -> complex:
        if self.residue_rule is None:
            raise UnsupportedVariantError(f"{self.name} has no residue rule")
        if not self.is_pole(pole):
            raise DomainError(f"{pole} is not a pole of {self.name}")
        return complex(self.residue_rule(complex(pole)))


# ---------------------------------------------------------------------------
# Generalized Cantor sets


def cantor_distance_zeta_form(params: GeneralizedCantorParams, delta: float | None = None) -> MeromorphicForm:
    """Distance zeta function of C^(m,a) for delta >= c = (1 - m a) / (2 (m - 1)).

    The poles are the lattice D + (2 pi / T) i Z with T = log(1/a).  The
    apparent pole at 0 cancels: the gap series contributes residue -2 and the
    two outer collars +2.
    """
    m = params.m
    c = float(params.threshold)
    delta = c if delta is None else float(delta)
    if delta < c * (1 - 1e-14):
        raise DomainError(f"the closed form needs delta >= c = {c}")
    a, D, T = params.ratio, params.dimension, params.period
    one_ma = 1 - m * a

    def f(s):
        return _pow(c, s - 1) * one_ma / (s * (1 - m * _pow(a, s))) + 2 * _pow(delta, s) / s

    def res(p):
        return _pow(c, p - 1) * one_ma / (p * T)

    return MeromorphicForm(f, (), (PoleLattice(D, 2 * math.pi / T),), res,
                           name=f"cantor({m},{params.a})", removable=(0j,),
                           info={"delta": delta, "D": D, "T": T})


def cantor_delta_volume(params: GeneralizedCantorParams, delta: float) -> float:
    """|C_delta| = 1 + 2 delta for delta >= c (every gap is covered)."""
    if delta < float(params.threshold):
        raise DomainError("closed-form volume needs delta >= c")
    return 1.0 + 2.0 * delta


def cantor_tube_zeta_form(params: GeneralizedCantorParams, delta: float | None = None) -> MeromorphicForm:
    """Tube zeta function obtained from the distance form by the functional equation."""
    dist = cantor_distance_zeta_form(params, delta)
    delta = dist.info["delta"]
    vol = cantor_delta_volume(params, delta)

    def f(s):
        return (dist.evaluator(s) - _pow(delta, s - 1) * vol) / (1 - s)

    def res(p):
        return dist.residue_rule(p) / (1 - p)

    return MeromorphicForm(f, (), dist.lattices, res, name="tube " + dist.name,
                           removable=(0j, 1 + 0j), info=dict(dist.info, volume=vol))


def cantor_contents(params: GeneralizedCantorParams):
    """(lower, upper) Minkowski contents of C^(m,a)."""
    D, m, a = params.dimension, params.m, params.ratio
    lower = (1 / D) * (2 * D / (1 - D)) ** (1 - D)
    upper = float(params.threshold) ** (D - 1) * m * (1 - a) / (m - 1)
    return lower, upper


# ---------------------------------------------------------------------------
# Spheres and local balls


def sphere_tube_zeta_form(N: int, R: float, delta: float) -> MeromorphicForm:
    """Tube zeta function of the (N-1)-sphere of radius R in R^N, 0 < delta < R."""
    if not 0 < delta < R:
        raise DomainError("need 0 < delta < R")
    w = unit_ball_volume(N)
    ks = [k for k in range(N + 1) if k % 2 == 1]

    def f(s):
        return w * sum(2 * R ** (N - k) * comb(N, k) * _pow(delta, s - N + k) / (s - (N - k)) for k in ks)

    poles = tuple(complex(N - k) for k in ks)
    return MeromorphicForm(f, poles, (), lambda p: 2 * w * comb(N, round(p.real)) * R ** round(p.real),
                           name=f"sphere tube N={N}", info={"delta": delta})


def sphere_distance_zeta_form(N: int, R: float, delta: float) -> MeromorphicForm:
    """Distance zeta function of the sphere, from radial integration over the shell."""
    if not 0 < delta < R:
        raise DomainError("need 0 < delta < R")
    w = unit_ball_volume(N)
    js = [j for j in range(N) if j % 2 == 0]

    def f(s):
        return N * w * sum(2 * comb(N - 1, j) * R ** (N - 1 - j) * _pow(delta, s - N + j + 1)
                           / (s - (N - j - 1)) for j in js)

    poles = tuple(complex(N - 1 - j) for j in js)

    def res(p):
        j = N - 1 - round(p.real)
        return 2 * N * w * comb(N - 1, j) * R ** (N - 1 - j)

    return MeromorphicForm(f, poles, (), res, name=f"sphere distance N={N}", info={"delta": delta})


@dataclass(frozen=True)
class LocalBall:
    """The closed ball of radius r in R^N, whose collars are balls of radius r + t."""

    N: int
    r: float

    def volume(self, t: float) -> float:
        return unit_ball_volume(self.N) * (self.r + t) ** self.N


def local_ball_tube_zeta_form(N: int, r: float, delta: float) -> MeromorphicForm:
    """omega_N sum_k C(N,k) r^k delta^(s-k) / (s - k); poles {0, ..., N}."""
    if r <= 0 or delta <= 0:
        raise DomainError("r and delta must be positive")
    w = unit_ball_volume(N)

    def f(s):
        return w * sum(comb(N, k) * r ** k * _pow(delta, s - k) / (s - k) for k in range(N + 1))

    return MeromorphicForm(f, tuple(complex(k) for k in range(N + 1)), (),
                           lambda p: w * comb(N, round(p.real)) * r ** round(p.real),
                           name=f"local ball tube N={N}", info={"delta": delta})


def local_ball_distance_zeta_form(N: int, r: float, delta: float) -> MeromorphicForm:
    """Distance zeta function of the ball, continued from Re s > N; poles {0, ..., N-1}.

    Only the outer shell contributes, by radial integration.
    """
    if r <= 0 or delta <= 0:
        raise DomainError("r and delta must be positive")
    w = unit_ball_volume(N)

    def f(s):
        return N * w * sum(comb(N - 1, j) * r ** (N - 1 - j) * _pow(delta, s - N + j + 1)
                           / (s - (N - j - 1)) for j in range(N))

    def res(p):
        j = N - 1 - round(p.real)
        return N * w * comb(N - 1, j) * r ** (N - 1 - j)

    return MeromorphicForm(f, tuple(complex(k) for k in range(N)), (), res,
                           name=f"local ball distance N={N}", info={"delta": delta})


# ---------------------------------------------------------------------------
# Relative drums


SIERPINSKI_D = math.log(8) / math.log(3)


def sierpinski_relative_zeta_form() -> MeromorphicForm:
    """8 / (2^s s (s - 1) (3^s - 8)) for the carpet relative to the unit square."""
    p = 2 * math.pi / math.log(3)

    def f(s):
        return 8 / (_pow(2, s) * s * (s - 1) * (_pow(3, s) - 8))

    def res(z):
        if abs(z) < 1e-12:
            return 8 / 7
        if abs(z - 1) < 1e-12:
            return -4 / 5
        return _pow(2, -z) / (math.log(3) * z * (z - 1))

    return MeromorphicForm(f, (0j, 1 + 0j), (PoleLattice(SIERPINSKI_D, p),), res,
                           name="sierpinski", info={"D": SIERPINSKI_D, "p": p})


def string_relative_zeta_form(string: FractalString) -> MeromorphicForm:
    """2^(1-s) zeta_L(s) / s for the drum (A_L, Omega_L) of a lacunary string."""
    if not isinstance(string, LacunaryString):
        raise UnsupportedVariantError("closed form needs a lacunary (geometric or Cantor-type) string")
    T = -math.log(float(string.ratio))
    D = math.log(string.base) / T

    def f(s):
        return _pow(2, 1 - s) * string.closed_zeta(s) / s

    lat = PoleLattice(D, 2 * math.pi / T)

    def res(z):
        # d/ds (1 - base ratio^s) equals T on the lattice
        lattice_res = string.mult0 * _pow(float(string.scale), z) / T
        if abs(z) < 1e-12:
            if string.base == 1:
                raise UnsupportedVariantError("double pole at 0 for base 1")
            return 2 * complex(string.closed_zeta(0.0))
        return _pow(2, 1 - z) * lattice_res / z

    finite = () if string.base == 1 else (0j,)
    return MeromorphicForm(f, finite, (lat,), res, name=f"string {string.name}",
                           info={"D": D, "T": T})
