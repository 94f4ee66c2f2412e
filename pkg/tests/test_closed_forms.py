import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fractalzeta.analysis import numeric_residue
from fractalzeta.closed_forms import (
    SIERPINSKI_D, cantor_contents, cantor_distance_zeta_form, cantor_tube_zeta_form, local_ball_distance_zeta_form,
    local_ball_tube_zeta_form, sierpinski_relative_zeta_form, sphere_distance_zeta_form, sphere_tube_zeta_form,
    string_relative_zeta_form,
)
from fractalzeta.core_model import GeneralizedCantorParams, LacunaryString, unit_ball_volume
from fractalzeta.exceptions import DomainError
from fractalzeta.zeta_numeric import distance_zeta_1d

TERNARY = GeneralizedCantorParams(2, Fraction(1, 3))
P3 = 2 * math.pi / math.log(3)

# 30-digit contour integrals of independently coded formulas
RES_CANTOR_D = 0.93163491863796228744993605134
RES_CANTOR_D1 = complex(0.0668041409881235290290218861807, 0.077285771692045652915584861059)
RES_SIER_D = 0.14505008370361415854843033196
RES_SIER_D1 = complex(0.00660730040671546581887835087438, -0.00239834479679160461795448777529)
M_LOWER, M_UPPER = 2.49497571594624131852863312108, 2.58304046866039041309161692348


def test_ternary_dimension():
    assert TERNARY.dimension == pytest.approx(0.630929753571457437, rel=1e-15)


def test_cantor_residues():
    form = cantor_distance_zeta_form(TERNARY)
    D = TERNARY.dimension
    assert form.residue(D) == pytest.approx(RES_CANTOR_D, rel=1e-13)
    assert form.residue(complex(D, P3)) == pytest.approx(RES_CANTOR_D1, rel=1e-12)
    assert form.residue(complex(D, -P3)) == pytest.approx(RES_CANTOR_D1.conjugate(), rel=1e-12)


def test_cantor_residue_quoted_formula():
    D = TERNARY.dimension
    quoted = (1 / 3) / (D * math.log(3)) * (1 / 6) ** (D - 1)
    assert cantor_distance_zeta_form(TERNARY).residue(D) == pytest.approx(quoted, rel=1e-14)


def test_cantor_lattice_spacing():
    form = cantor_distance_zeta_form(TERNARY)
    poles = form.poles_in((0, 1, -12, 12))
    assert len(poles) == 5
    np.testing.assert_allclose(np.diff([p.imag for p in poles]), P3, rtol=1e-14)


def test_cantor_delta_below_threshold_rejected():
    with pytest.raises(DomainError):
        cantor_distance_zeta_form(TERNARY, 0.1)


def test_cantor_contents():
    lo, hi = cantor_contents(TERNARY)
    assert lo == pytest.approx(M_LOWER, rel=1e-13)
    assert hi == pytest.approx(M_UPPER, rel=1e-13)


def test_sphere_poles_and_residues():
    f2 = sphere_tube_zeta_form(2, 1.0, 0.5)
    assert f2.poles_in((-5, 5, -1, 1)) == [1 + 0j]
    assert f2.residue(1) == pytest.approx(4 * math.pi, rel=1e-15)
    f3 = sphere_tube_zeta_form(3, 1.0, 0.5)
    assert sorted(p.real for p in f3.poles_in((-5, 5, -1, 1))) == [0.0, 2.0]
    assert f3.residue(2) == pytest.approx(8 * math.pi, rel=1e-15)
    f1 = sphere_tube_zeta_form(1, 1.0, 0.5)
    assert f1.poles_in((-5, 5, -1, 1)) == [0j]
    assert f1.residue(0) == pytest.approx(4.0)


def test_sphere_tube_form_is_integral():
    mp.mp.dps = 20
    s = mp.mpc(1.7, 0.4)
    ref = mp.quad(lambda t: t ** (s - 3) * mp.pi * ((1 + t) ** 2 - (1 - t) ** 2), [0, 0.5])
    assert sphere_tube_zeta_form(2, 1.0, 0.5)(complex(s)) == pytest.approx(complex(ref), rel=1e-12)


def test_sierpinski_values():
    form = sierpinski_relative_zeta_form()
    assert SIERPINSKI_D == pytest.approx(1.89278926071437231, rel=1e-15)
    assert form.residue(SIERPINSKI_D) == pytest.approx(RES_SIER_D, rel=1e-13)
    assert form.residue(complex(SIERPINSKI_D, P3)) == pytest.approx(RES_SIER_D1, rel=1e-12)
    assert form.residue(0) == pytest.approx(8 / 7)
    assert form.residue(1) == pytest.approx(-0.8)


def test_sierpinski_residue_decay():
    form = sierpinski_relative_zeta_form()
    D = SIERPINSKI_D
    lead = 2 ** -D / (D * math.log(3))
    ratios = [abs(form.residue(complex(D, k * P3))) * k ** 2 / lead for k in (10, 20, 40)]
    # |s_k (s_k - 1)| ~ (k p)^2, so the constant is lead / p^2
    ratios = np.array(ratios) * P3 ** 2
    assert np.ptp(ratios) / ratios.mean() <= 0.05


def test_string_relative_forms():
    cantor = string_relative_zeta_form(LacunaryString.cantor())
    D = math.log(2) / math.log(3)
    assert cantor.poles_in((0.5, 0.7, -6, 6)) == pytest.approx([complex(D, -P3), complex(D, 0), complex(D, P3)])
    geo = string_relative_zeta_form(LacunaryString.geometric())
    assert geo(2.0) == pytest.approx(1 / 12, rel=1e-14)
    assert abs(cantor(1e-8)) > 1e7


def test_local_ball_forms():
    f1 = local_ball_tube_zeta_form(1, 1.0, 0.5)
    assert [p.real for p in f1.poles_in((-1, 5, -1, 1))] == [0.0, 1.0]
    assert f1.residue(1) == pytest.approx(2.0)
    f2 = local_ball_tube_zeta_form(2, 1.0, 0.5)
    assert [p.real for p in f2.poles_in((-1, 5, -1, 1))] == [0.0, 1.0, 2.0]
    d2 = local_ball_distance_zeta_form(2, 1.0, 0.5)
    assert [p.real for p in d2.poles_in((-1, 5, -1, 1))] == [0.0, 1.0]


@pytest.mark.parametrize("form,poles", [
    (cantor_distance_zeta_form(TERNARY), [complex(TERNARY.dimension, k * P3) for k in range(-6, 7)]),
    (sierpinski_relative_zeta_form(), [complex(SIERPINSKI_D, k * P3) for k in range(-6, 7)] + [0j, 1 + 0j]),
    (string_relative_zeta_form(LacunaryString.cantor()),
     [complex(TERNARY.dimension, k * P3) for k in range(-6, 7)] + [0j]),
    (sphere_tube_zeta_form(3, 1.0, 0.5), [0j, 2 + 0j]),
    (local_ball_tube_zeta_form(3, 1.0, 0.5), [0j, 1 + 0j, 2 + 0j, 3 + 0j]),
])
def test_residues_match_contours(form, poles):
    for p in poles:
        assert abs(p.imag) <= 40
        num = numeric_residue(form, p, 0.25)
        ana = form.residue(p)
        assert abs(num - ana) <= 1e-8 * max(abs(ana), 1e-300) + 1e-14


@settings(max_examples=30, deadline=None)
@given(x=st.floats(-3, 3), y=st.floats(-20, 20))
def test_conjugate_symmetry(x, y):
    s = complex(x, y)
    for form in (cantor_distance_zeta_form(TERNARY), sierpinski_relative_zeta_form(),
                 sphere_tube_zeta_form(3, 1.0, 0.5), local_ball_distance_zeta_form(2, 1.0, 0.5)):
        if any(abs(s - p) < 1e-3 for p in [*form.poles_in((-4, 4, -21, 21)), *form.removable]):
            continue
        a, b = form(s), form(s.conjugate())
        assert abs(a - np.conj(b)) <= 1e-12 * max(1.0, abs(a))


@pytest.mark.parametrize("s", [0.66, 0.9, 1.2])
def test_cantor_form_matches_level30(s):
    form = cantor_distance_zeta_form(TERNARY, 0.25)
    assert distance_zeta_1d(TERNARY, 0.25, s).value == pytest.approx(form(s).real, rel=1e-6)


def _functional_rhs(dist, tube, vol, N, delta, s):
    return dist(s) - (delta ** (s - N) * vol + (N - s) * tube(s))


def test_functional_equation_random_points():
    rng = np.random.default_rng(11)
    delta = 0.5
    for N in (1, 2, 3):
        w = unit_ball_volume(N)
        sph = (sphere_distance_zeta_form(N, 1.0, delta), sphere_tube_zeta_form(N, 1.0, delta),
               w * ((1 + delta) ** N - (1 - delta) ** N))
        ball = (local_ball_distance_zeta_form(N, 1.0, delta), local_ball_tube_zeta_form(N, 1.0, delta),
                w * (1 + delta) ** N)
        for dist, tube, vol in (sph, ball):
            for s in rng.uniform(-2, 4, 20) + 1j * rng.uniform(-5, 5, 20):
                assert abs(_functional_rhs(dist, tube, vol, N, delta, s)) <= 1e-11 * max(1.0, abs(dist(s)))


def test_cantor_tube_form_functional_equation():
    delta = 0.25
    dist = cantor_distance_zeta_form(TERNARY, delta)
    tube = cantor_tube_zeta_form(TERNARY, delta)
    vol = 1 + 2 * delta
    for s in (0.3 + 2j, 1.7 - 1j, -0.4 + 0.5j):
        assert abs(_functional_rhs(dist, tube, vol, 1, delta, s)) <= 1e-12 * max(1.0, abs(dist(s)))
