import itertools
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fractalzeta.analysis import pole_scan
from fractalzeta.core_model import LacunaryString
from fractalzeta.exceptions import DivergenceError, DomainError
from fractalzeta.spectral import (
    FractalStringDrum, Interval, Rectangle, Spray, counting_function, eigenvalues, spectral_residue_check,
    spectral_zeta, spectral_zeta_enumerated, spray_spectral_zeta, string_spectral_form, string_spectral_zeta,
    weyl_check,
)

D3 = math.log(2) / math.log(3)
P3 = 2 * math.pi / math.log(3)


def rectangle_oracle(a, b, s, L=3000):
    """Lattice sum over m, n <= L plus a bound on everything outside the square."""
    m = np.arange(1, L + 1, dtype=float)
    mu = math.pi ** 2 * ((m[:, None] / a) ** 2 + (m[None, :] / b) ** 2)
    total = float(np.sum(mu ** (-s / 2)))
    r = math.pi * L / max(a, b)
    # quarter plane outside the disk of radius r in frequency space
    tail = (math.pi / 2) * a * b / math.pi ** 2 * r ** (2 - s) / (s - 2)
    return total, tail


def lattice_count(a, b, mu):
    lim = int(math.sqrt(mu) * max(a, b) / math.pi) + 2
    k = np.arange(1, lim)
    vals = math.pi ** 2 * ((k[:, None] / a) ** 2 + (k[None, :] / b) ** 2)
    return int(np.sum(vals <= mu))


def double_sum(lengths_mults, s, K=200_000):
    """sum_j mult_j sum_k (k / l_j)^(-s) with a tail bound on the k sum."""
    k = np.arange(1, K + 1, dtype=float)
    head = complex(np.sum(k ** -s))
    tail = K ** (1 - s.real) / (s.real - 1)
    total = sum(m * l ** s for l, m in lengths_mults)
    weight = sum(m * l ** s.real for l, m in lengths_mults)
    return head * total, tail * weight


def test_interval_zeta_values():
    assert spectral_zeta(Interval(math.pi), 4).value == pytest.approx(math.pi ** 4 / 90, rel=1e-10)
    mp.mp.dps = 20
    ev = spectral_zeta(Interval(1.0), 3)
    assert ev.value == pytest.approx(float(mp.zeta(3)) / math.pi ** 3, rel=1e-10)


def test_rectangle_zeta_matches_lattice_sum():
    ev = spectral_zeta(Rectangle(1.0, 1.0), 5, K=10 ** 6)
    ref, tail = rectangle_oracle(1.0, 1.0, 5)
    assert abs(ev.value - ref) <= ev.est_error + tail
    assert abs(ev.value - ref) <= 1e-9 * ref


def test_string_spectral_values():
    assert string_spectral_zeta(LacunaryString.geometric(), 2.0).value == pytest.approx(math.pi ** 2 / 18, rel=1e-12)
    assert string_spectral_zeta(LacunaryString.cantor(), 2.0).value == pytest.approx(math.pi ** 2 / 42, rel=1e-12)
    drum = FractalStringDrum(LacunaryString.cantor())
    assert spectral_zeta(drum, 2.0).value == pytest.approx(1 / 42, rel=1e-12)


def test_string_spectral_refuses_left_of_one():
    with pytest.raises(DivergenceError):
        string_spectral_zeta(LacunaryString.cantor(), 1.0)
    with pytest.raises(DivergenceError):
        string_spectral_zeta(LacunaryString.cantor(), 0.9)


def test_spray_value():
    ev = spray_spectral_zeta(Interval(1.0), 1 / 3, 2, 4.0)
    assert ev.value == pytest.approx(2 / 79 / 90, rel=1e-10)
    assert spectral_zeta(Spray(Interval(1.0), 1 / 3, 2), 4.0).value == pytest.approx(2 / 79 / 90, rel=1e-10)


def test_spray_factorization_matches_enumeration():
    spray = Spray(Interval(1.0), 1 / 3, 2)
    full = spectral_zeta(spray, 3.0).value
    enum = spectral_zeta_enumerated(spray, 3.0, 1e9)
    assert abs(full - enum.value) <= enum.est_error + 1e-12


def test_spray_scaling_poles():
    q = lambda s: 2 * np.exp(s * math.log(1 / 3))
    poles = pole_scan(lambda s: q(s) / (1 - q(s)), (D3 - 0.2, D3 + 0.2, -8, 8))
    expected = [complex(D3, k * P3) for k in (-1, 0, 1)]
    assert len(poles) == 3
    for p, e in zip(poles, expected):
        assert abs(p.location - e) <= 1e-6


def test_spray_factor_decays():
    small = spray_spectral_zeta(Interval(1.0), 1 / 3, 2, 30.0).value
    assert 0 < small <= 1e-20


def test_counting_examples():
    assert counting_function(Interval(math.pi), 10) == 3
    assert counting_function(Rectangle(1.0, 1.0), 5 * math.pi ** 2) == lattice_count(1.0, 1.0, 5 * math.pi ** 2) == 3


@pytest.mark.parametrize("mu", [50.0, 400.0, 3000.0])
def test_rectangle_count_matches_lattice(mu):
    assert counting_function(Rectangle(1.0, 2.0), mu) == lattice_count(1.0, 2.0, mu)


def test_eigenvalues_sorted_with_multiplicity():
    ev = eigenvalues(Rectangle(1.0, 1.0), 10)
    assert np.all(np.diff(ev) >= 0)
    assert ev[1] == pytest.approx(ev[2])  # (1, 2) and (2, 1)
    assert ev[0] == pytest.approx(2 * math.pi ** 2)


@settings(max_examples=30, deadline=None)
@given(m1=st.floats(1.0, 500.0), frac=st.floats(0.0, 1.0))
def test_counting_monotone(m1, frac):
    for model in (Interval(1.3), Rectangle(1.0, 1.7), FractalStringDrum(LacunaryString.cantor())):
        assert counting_function(model, m1 * frac + 1e-9) <= counting_function(model, m1)


@settings(max_examples=20, deadline=None)
@given(k=st.integers(1, 40))
def test_counting_jump_is_multiplicity(k):
    model = Rectangle(1.0, 1.0)
    ev = eigenvalues(model, 60)
    mu = ev[k - 1]
    mult = int(np.sum(np.isclose(ev, mu, rtol=1e-12)))
    jump = counting_function(model, mu) - counting_function(model, mu * (1 - 1e-9))
    assert jump == mult


def test_factorization_matches_double_sum():
    rng = np.random.default_rng(5)
    string = LacunaryString.cantor()
    blocks = [(float(l), int(m)) for l, m in itertools.takewhile(lambda b: b[0] > 1e-40, string.blocks())]
    for x, y in zip(rng.uniform(1.5, 4, 10), rng.uniform(-3, 3, 10)):
        s = complex(x, y)
        ev = string_spectral_zeta(string, s)
        ref, tail = double_sum(blocks, s)
        assert abs(ev.value - ref) <= ev.est_error + tail + 1e-12


def test_weyl_interval():
    rep = weyl_check(Interval(1.0), np.geomspace(10, 1e6, 80))
    assert rep.sup_abs <= 1


def test_weyl_rectangle_exponent():
    rep = weyl_check(Rectangle(1.0, 1.0), np.geomspace(1e3, 1e7, 40))
    assert rep.exponent <= 0.6


def test_weyl_cantor_string_exponent():
    drum = FractalStringDrum(LacunaryString.cantor())
    rep = weyl_check(drum, np.geomspace(1e4, 1e12, 120), d=D3)
    assert abs(rep.frequency_exponent - D3) <= 0.05
    assert rep.exponent_gap <= 0.05


def test_weyl_rejects_nonpositive():
    with pytest.raises(DomainError):
        weyl_check(Interval(1.0), [0.0, 1.0])


@pytest.mark.parametrize("model,target", [(Interval(math.pi), 1.0), (Interval(1.0), 1 / math.pi)])
def test_residue_at_one(model, target):
    rep = spectral_residue_check(model)
    assert rep.target == pytest.approx(target, rel=1e-14)
    assert rep.relative_error <= 1e-3


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_rectangle_residue():
    rep = spectral_residue_check(Rectangle(1.0, 1.0), K=10 ** 6)
    assert rep.target == pytest.approx(1 / (2 * math.pi), rel=1e-14)
    assert rep.relative_error <= 0.02


def test_string_spectral_poles_are_one_and_lattice():
    form = string_spectral_form(LacunaryString.cantor())
    poles = pole_scan(form, (D3 - 0.1, 1.2, -6, 6))
    expected = sorted([1 + 0j, complex(D3, -P3), complex(D3, 0), complex(D3, P3)], key=lambda z: (z.imag, z.real))
    assert len(poles) == 4
    locs = sorted((p.location for p in poles), key=lambda z: (round(z.imag, 6), z.real))
    for p, e in zip(locs, expected):
        assert abs(p - e) <= 1e-6
    assert form.residue(1) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("s", [-1.0, 0.0, 0.3 + 2j, 2.0, -2.5 + 1j, 0.5 + 14.134725j])
def test_riemann_zeta_against_mpmath(s):
    from fractalzeta._numerics import riemann_zeta
    mp.mp.dps = 25
    ref = complex(mp.zeta(s))
    assert abs(riemann_zeta(s) - ref) <= 1e-11 * max(1.0, abs(ref))
