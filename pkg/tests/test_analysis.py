import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone

from fractalzeta.analysis import (
    LogPeriodicEstimator, MinkowskiDimensionEstimator, classify, estimate_dimensions, find_period,
    fit_log_periodic, numeric_residue, pole_scan, residue_content_check, winding_number,
)
from fractalzeta.closed_forms import (
    SIERPINSKI_D, cantor_contents, cantor_distance_zeta_form, cantor_tube_zeta_form, sierpinski_relative_zeta_form,
)
from fractalzeta.core_model import GeneralizedCantorParams, Sphere, TubeSamples, cusp_drum
from fractalzeta.exceptions import BoundaryPoleError, DomainError, NonStabilizingError
from fractalzeta.quasiperiodic import build_assembly
from fractalzeta.tube_geometry import geometric_grid, sample_tube

TERNARY = GeneralizedCantorParams(2, Fraction(1, 3))
D3 = math.log(2) / math.log(3)
T3 = math.log(3)
P3 = 2 * math.pi / T3
M_LOWER, M_UPPER = 2.49497571594624131852863312108, 2.58304046866039041309161692348


@pytest.fixture(scope="module")
def cantor_samples():
    h = T3 / 512
    return sample_tube(TERNARY, geometric_grid(math.exp(-h) / 6, math.exp(-h), 8 * 512 + 1))


@pytest.fixture(scope="module")
def circle_samples():
    return sample_tube(Sphere(2, 1.0), geometric_grid(0.5, 10 ** (-1 / 64), 64 * 4))


@pytest.fixture(scope="module")
def union_samples():
    asm = build_assembly(2, 0.5, [2, 3])
    h = 0.005
    return sample_tube(asm.union, geometric_grid(0.15, math.exp(-h), int(8 * math.log(10) / h)))


def test_estimator_sklearn_api():
    est = MinkowskiDimensionEstimator(ambient_dim=2, window_decades=0.5)
    assert est.get_params()["window_decades"] == 0.5
    c = clone(est).set_params(dim=1.0)
    assert c.get_params()["dim"] == 1.0 and est.get_params()["dim"] is None
    lp = LogPeriodicEstimator(dim=0.3, n_coefficients=2)
    assert clone(lp).get_params() == lp.get_params()


def test_estimator_input_validation():
    with pytest.raises(ValueError):
        MinkowskiDimensionEstimator().fit(np.array([[0.1, np.nan], [0.01, 1.0]]))
    with pytest.raises(ValueError):
        MinkowskiDimensionEstimator().fit(np.array([[0.1, -1.0], [0.01, 1.0]]))
    t = np.geomspace(1e-1, 1e-2, 10)
    with pytest.raises(DomainError):
        MinkowskiDimensionEstimator().fit(np.column_stack([t, t]))


def test_cantor_dimensions(cantor_samples):
    rep = estimate_dimensions(cantor_samples)
    assert rep.fitted_dim == pytest.approx(D3, abs=0.01)
    assert rep.lower_dim <= rep.fitted_dim + 1e-9 <= rep.upper_dim + 2e-9
    rep = estimate_dimensions(cantor_samples, dim=D3)
    assert rep.lower_content == pytest.approx(M_LOWER, rel=0.01)
    assert rep.upper_content == pytest.approx(M_UPPER, rel=0.01)


def test_circle_dimension(circle_samples):
    rep = estimate_dimensions(circle_samples)
    assert abs(rep.fitted_dim - 1) <= 1e-6
    assert rep.upper_content == pytest.approx(4 * math.pi, rel=1e-9)
    assert rep.lower_content == pytest.approx(4 * math.pi, rel=1e-9)


def test_cusp_dimension():
    samples = sample_tube(cusp_drum(2.0), geometric_grid(1e-2, 10 ** (-1 / 32), 32 * 4 + 1))
    rep = estimate_dimensions(samples)
    assert abs(rep.fitted_dim + 1) <= 0.02
    assert rep.upper_content == pytest.approx(1 / 3, abs=0.01)


def test_period_detection(cantor_samples):
    fit = fit_log_periodic(cantor_samples, D3)
    assert fit.period_found
    assert abs(fit.period_T - T3) <= 1e-4
    for k in (1, 2, 3):
        assert fit.coefficient(-k) == pytest.approx(np.conj(fit.coefficient(k)), abs=1e-14)
    G = fit.G_samples[:, 1]
    assert fit.coefficient(0).real == pytest.approx(G.mean(), rel=1e-3)


def test_fourier_matches_tube_residues(cantor_samples):
    fit = fit_log_periodic(cantor_samples, D3)
    tube = cantor_tube_zeta_form(TERNARY, 1 / 6)
    for k in (-2, -1, 0, 1, 2):
        pole = complex(D3, k * P3)
        assert abs(numeric_residue(tube, pole, 0.25) - fit.coefficient(k)) <= 1e-4


def test_riemann_lebesgue(cantor_samples):
    fit = fit_log_periodic(cantor_samples, D3)
    mean = fit.coefficient(0).real
    mags = [abs(fit.coefficient(k)) for k in (1, 2, 3)]
    assert all(m < mean for m in mags)
    assert mags[2] <= mags[0]


def test_measurable_fit_has_no_period(circle_samples):
    fit = fit_log_periodic(circle_samples, 1.0)
    assert not fit.period_found
    assert all(abs(c) <= 1e-10 for k, c in fit.fourier if k != 0)


def test_union_has_no_single_period(union_samples):
    fit = fit_log_periodic(union_samples, 0.5)
    assert not fit.period_found
    assert len(fit.diagnostics["candidates"]) >= 2


def test_find_period_on_sine():
    h = 0.01
    x = np.sin(2 * math.pi * np.arange(2000) * h / 1.7)
    res = find_period(x, h)
    assert res.found and abs(res.period - 1.7) <= 1e-4


def test_numeric_residue_simple_pole():
    assert abs(numeric_residue(lambda s: 1 / (s - 1), 1.0, 0.3) - 1) <= 1e-12


def test_numeric_residue_reports_instability():
    with pytest.raises(NonStabilizingError):
        numeric_residue(lambda s: np.exp(1 / (s - 1.2)), 1.0, 0.3, max_nodes=256)


def test_residue_at_cantor_and_sierpinski_poles():
    cf = cantor_distance_zeta_form(TERNARY)
    assert abs(numeric_residue(cf, D3, 0.25) - cf.residue(D3)) <= 1e-8
    sf = sierpinski_relative_zeta_form()
    s1 = complex(SIERPINSKI_D, P3)
    quoted = 2 ** -s1 / (math.log(3) * s1 * (s1 - 1))
    assert abs(numeric_residue(sf, s1, 0.25) - quoted) <= 1e-8


@settings(max_examples=25, deadline=None)
@given(k=st.integers(-5, 5), r=st.floats(0.1, 0.6))
def test_residue_radius_halving(k, r):
    form = cantor_distance_zeta_form(TERNARY)
    pole = complex(D3, k * P3)
    assert abs(numeric_residue(form, pole, r) - numeric_residue(form, pole, r / 2)) <= 1e-9


def test_pole_scan_cantor_window():
    form = cantor_distance_zeta_form(TERNARY)
    poles = pole_scan(form, (0.5, 0.8, -10, 10))
    assert len(poles) == 3
    expected = [complex(D3, -P3), complex(D3, 0), complex(D3, P3)]
    for p, q in zip(poles, expected):
        assert abs(p.location - q) <= 1e-6
        assert p.residue_discrepancy <= 1e-8


def test_pole_scan_sierpinski_single():
    poles = pole_scan(sierpinski_relative_zeta_form(), (1.5, 2.0, -1, 1))
    assert len(poles) == 1
    assert abs(poles[0].location - SIERPINSKI_D) <= 1e-6


@pytest.mark.parametrize("window", [(0.5, 0.8, -10, 10), (-0.5, 1.0, -20, 20), (0.6, 0.7, 2, 30)])
def test_pole_scan_counts_match_lattice(window):
    form = cantor_distance_zeta_form(TERNARY)
    assert len(pole_scan(form, window)) == len(form.poles_in(window))


def test_pole_scan_entire_function_is_empty():
    f1 = cantor_distance_zeta_form(TERNARY, 0.25)
    f2 = cantor_distance_zeta_form(TERNARY, 0.3)
    assert pole_scan(lambda s: f1(s) - f2(s), (0.5, 0.8, -10, 10)) == []


def test_winding_number_of_simple_pole():
    assert round(winding_number(lambda s: 1 / (s - 0.3j), (-1, 1, -1, 1))) == -1


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_pole_on_window_edge_raises():
    with pytest.raises(BoundaryPoleError):
        pole_scan(lambda s: 1 / (s - 1.0), (1.0, 2.0, -1, 1))


def test_residue_content_circle():
    rep = residue_content_check(Sphere(2, 1.0))
    assert rep.passed
    assert rep.residue_tube == pytest.approx(4 * math.pi, rel=1e-8)


def test_residue_content_cantor():
    rep = residue_content_check(TERNARY)
    assert rep.passed
    assert M_LOWER < rep.residue_tube.real < M_UPPER
    assert rep.residue_tube.real == pytest.approx(0.9316349186379623 / (1 - D3), rel=1e-9)
    lo, hi = cantor_contents(TERNARY)
    assert min(rep.details["margins"]) >= 10 * rep.numerical_error


def test_residue_content_cusp():
    rep = residue_content_check(cusp_drum(2.0))
    assert rep.passed
    assert abs(rep.residue_distance - 1) <= 0.01


def test_classify_circle(circle_samples):
    fit = fit_log_periodic(circle_samples, 1.0)
    assert classify(circle_samples, fit).tag == "measurable"


def test_classify_cantor(cantor_samples):
    fit = fit_log_periodic(cantor_samples, D3)
    c = classify(cantor_samples, fit)
    assert c.tag == "periodic"
    assert c.oscillatory_period == pytest.approx(P3, rel=1e-4)
    assert json.loads(c.to_json())["tag"] == "periodic"


@pytest.mark.parametrize("m,a", [(3, Fraction(1, 5)), (2, Fraction(1, 4)), (4, Fraction(1, 7))])
def test_classify_other_cantor_sets(m, a):
    p = GeneralizedCantorParams(m, a)
    h = p.period / 256
    s = sample_tube(p, geometric_grid(float(p.threshold) * math.exp(-h), math.exp(-h),
                                      int(3.2 * math.log(10) / h)))
    c = classify(s, fit_log_periodic(s, p.dimension))
    assert c.tag == "periodic"
    assert c.period == pytest.approx(p.period, rel=1e-4)


def test_classify_union(union_samples):
    fit = fit_log_periodic(union_samples, 0.5)
    assert classify(union_samples, fit).tag == "nonperiodic"


def test_classify_degenerate():
    # dimension 1/2 with a logarithmic factor: infinite upper content
    t = np.geomspace(1e-1, 1e-6, 300)
    s = TubeSamples(t, t ** 0.5 * (-np.log(t)) ** 8, 1)
    fit = fit_log_periodic(s, 0.5)
    assert classify(s, fit).tag == "degenerate"
