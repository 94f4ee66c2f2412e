import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fractalzeta.closed_forms import LocalBall, cantor_distance_zeta_form, cantor_tube_zeta_form
from fractalzeta.core_model import (
    GeneralizedCantorParams, LacunaryString, PixelSet2D, PointSet1D, SequenceString, Sphere, TubeSamples,
    cusp_drum, string_drum,
)
from fractalzeta.exceptions import DivergenceError, DomainError
from fractalzeta.tube_geometry import geometric_grid, raster_distance_field, sample_tube
from fractalzeta.zeta_numeric import (
    abscissa_verdict, constant_tail_model, distance_zeta_1d, distance_zeta_2d, functional_equation_check,
    geometric_zeta, harvey_polking_probe, perturbed_riemann_zeta, relative_distance_zeta, scaling_discrepancy,
    tube_zeta, tube_zeta_from_samples,
)

TERNARY = GeneralizedCantorParams(2, Fraction(1, 3))
D3 = math.log(2) / math.log(3)


def cantor_closed(s, delta, m=2, a=mp.mpf(1) / 3):
    mp.mp.dps = 30
    s = mp.mpc(s)
    c = (1 - m * a) / (2 * (m - 1))
    return complex(c ** (s - 1) * (1 - m * a) / (s * (1 - m * a ** s)) + 2 * mp.mpf(delta) ** s / s)


def test_single_point_s_one():
    assert distance_zeta_1d(PointSet1D.from_values([0]), 1.0, 1.0).value == pytest.approx(2.0, rel=1e-15)


def test_geometric_string_gap_part_at_two():
    ev = relative_distance_zeta(string_drum(LacunaryString.geometric()), None, 2.0)
    assert ev.value == pytest.approx(1 / 12, rel=1e-12)


@pytest.mark.parametrize("s", [0.8, 0.75 + 3j, 1.3 - 8j])
def test_cantor_level30_matches_closed_form(s):
    ev = distance_zeta_1d(TERNARY, 0.25, s, levels=30)
    ref = cantor_closed(s, 0.25)
    assert abs(ev.value - ref) <= 1e-6 * abs(ref)


def test_cantor_frozen_value():
    # closed form at s = 0.8, delta = 1/4, evaluated with 30 digits
    assert distance_zeta_1d(TERNARY, 0.25, 0.8).value == pytest.approx(4.342051867901910, rel=1e-12)


def test_divergence_below_dimension():
    with pytest.raises(DivergenceError):
        distance_zeta_1d(TERNARY, 0.25, 0.5)


def test_single_pixel_disk_area():
    n = 401
    mask = np.zeros((n, n), bool)
    mask[n // 2, n // 2] = True
    field = raster_distance_field(PixelSet2D(mask, (-2, 2, -2, 2)))
    ev = distance_zeta_2d(field, 1.0, 2.0)
    assert abs(ev.value - math.pi) <= max(ev.est_error, 0.01 * math.pi)


def test_tube_zeta_constant_volume():
    t = geometric_grid(1.0, math.exp(-0.0025), 3201)
    samples = TubeSamples(t, np.full_like(t, 0.7), 1)
    ev = tube_zeta_from_samples(samples, 1.0, 1.5, constant_tail_model(1.0, 0.7))
    assert abs(ev.value - 1.4) <= 1e-10
    assert abs(ev.value - 1.4) <= ev.est_error


@pytest.mark.parametrize("s", [1.5, 2.0 + 1j, 3.2 - 4j])
def test_tube_zeta_circle(s):
    samples = sample_tube(Sphere(2, 1.0), geometric_grid(0.5, math.exp(-0.0025), 3201))
    ev = tube_zeta_from_samples(samples, 0.5, s, constant_tail_model(1.0, 4 * math.pi))
    ref = 4 * math.pi * 0.5 ** (s - 1) / (s - 1)
    assert abs(ev.value - ref) <= 1e-8
    assert abs(ev.value - ref) <= ev.est_error


def test_cantor_tube_zeta_matches_tube_form():
    s = D3 + 0.2
    delta = 1 / 6
    ev = tube_zeta(TERNARY, delta, s)
    ref = cantor_tube_zeta_form(TERNARY, delta)(s)
    assert abs(ev.value - ref) <= 1e-6 * abs(ref)


def test_functional_equation_examples():
    assert functional_equation_check(TERNARY, 0.25, 1.0).discrepancy <= 1e-6
    assert functional_equation_check(Sphere(2, 1.0), 0.5, 1.5).discrepancy <= 1e-8
    with pytest.raises(DomainError):
        functional_equation_check(LocalBall(2, 1.0), 0.5, 2.0)


def test_geometric_zeta_examples():
    assert geometric_zeta(LacunaryString.geometric(), 1.0).value == pytest.approx(1.0, rel=1e-12)
    assert geometric_zeta(LacunaryString.cantor(), 1.0).value == pytest.approx(1.0, rel=1e-12)
    ev = geometric_zeta(SequenceString.power(2.0), 1.0)
    assert abs(ev.value - math.pi ** 2 / 6) <= max(ev.est_error, 1e-12)
    with pytest.raises(DivergenceError):
        geometric_zeta(SequenceString.power(2.0), 0.45)


def test_perturbed_zeta_unperturbed():
    ev = perturbed_riemann_zeta(0.0, lambda j: 0.0 * j, 2.0, C=0.0)
    assert abs(ev.value - math.pi ** 2 / 6) <= max(ev.est_error, 1e-13)


def test_perturbed_zeta_inverse_shift():
    mp.mp.dps = 25
    ref = float(mp.nsum(lambda j: (j + 1 / j) ** -3, [1, mp.inf]))
    ev = perturbed_riemann_zeta(-1.0, lambda j: 1.0 / j, 3.0, C=1.0)
    assert abs(ev.value - ref) <= 1e-10
    assert abs(ev.value - ref) <= ev.est_error + 1e-15


def test_perturbed_residue_probe():
    s = 1 + 1e-4
    ev = perturbed_riemann_zeta(-1.0, lambda j: 1.0 / j, s, C=1.0)
    assert abs((s - 1) * ev.value - 1) <= 1e-3
    with pytest.raises(DivergenceError):
        perturbed_riemann_zeta(-1.0, lambda j: 1.0 / j, 1.0, C=1.0)


def test_cusp_zeta_at_zero_is_catalan():
    ev = relative_distance_zeta(cusp_drum(2.0), None, 0.0)
    assert ev.value == pytest.approx(float(mp.catalan), rel=1e-10)


def test_cusp_zeta_blows_up_towards_pole():
    a = relative_distance_zeta(cusp_drum(2.0), None, -0.9).value
    b = relative_distance_zeta(cusp_drum(2.0), None, -0.99).value
    assert b >= 10 * a > 0


@pytest.mark.parametrize("dist,verdict", [(0.05, "converges"), (0.2, "converges"),
                                          (-0.05, "diverges"), (-0.2, "diverges")])
def test_cantor_abscissa(dist, verdict):
    assert abscissa_verdict(TERNARY, D3 + dist) == verdict


@pytest.mark.parametrize("alpha", [2.0, 3.0])
def test_cusp_abscissa_flips(alpha):
    drum = cusp_drum(alpha)
    assert abscissa_verdict(drum, 1 - alpha + 0.05) == "converges"
    assert abscissa_verdict(drum, 1 - alpha - 0.05) == "diverges"


def test_string_abscissa():
    assert abscissa_verdict(LacunaryString.cantor(), D3 + 0.05) == "converges"
    assert abscissa_verdict(LacunaryString.cantor(), D3 - 0.05) == "diverges"


def test_harvey_polking():
    assert harvey_polking_probe(TERNARY, 0.2) == "converges"
    assert harvey_polking_probe(TERNARY, 0.5) == "diverges"
    assert harvey_polking_probe(TERNARY, 0.0) == "converges"


@pytest.mark.parametrize("lam", [0.5, 2.0])
@pytest.mark.parametrize("drum,s", [(cusp_drum(2.0), 0.3 + 1j), (string_drum(LacunaryString.cantor()), 0.9 - 2j)])
def test_scaling_law(drum, s, lam):
    disc, bound = scaling_discrepancy(drum, lam, s)
    assert disc <= bound


@settings(max_examples=20, deadline=None)
@given(x=st.floats(0.7, 1.5), y=st.floats(-10, 10))
def test_cantor_conjugate_symmetry(x, y):
    s = complex(x, y)
    a = distance_zeta_1d(TERNARY, 0.25, s).value
    b = distance_zeta_1d(TERNARY, 0.25, s.conjugate()).value
    assert abs(a - np.conj(b)) <= 1e-12 * abs(a)


@settings(max_examples=15, deadline=None)
@given(x=st.floats(-0.5, 1.5), y=st.floats(-5, 5))
def test_cusp_conjugate_symmetry(x, y):
    s = complex(x, y)
    a = relative_distance_zeta(cusp_drum(2.0), None, s)
    b = relative_distance_zeta(cusp_drum(2.0), None, s.conjugate())
    assert abs(a.value - np.conj(b.value)) <= a.est_error + b.est_error


@settings(max_examples=15, deadline=None)
@given(x=st.floats(0.7, 1.5), y=st.floats(-5, 5))
def test_cantor_distance_matches_closed_form_everywhere(x, y):
    s = complex(x, y)
    form = cantor_distance_zeta_form(TERNARY, 0.25)
    ev = distance_zeta_1d(TERNARY, 0.25, s)
    assert abs(ev.value - form(s)) <= 1e-6 * abs(form(s))
