"""Reproduction suite: eleven numbered acceptance checks with measured values and tolerances.

Each check returns a ``CheckResult``; ``run_suite`` runs a selection and
``format_table`` renders one PASS/FAIL line per check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import analysis, closed_forms, quasiperiodic, spectral, zeta_numeric
from .core_model import GeneralizedCantorParams, LacunaryString, Sphere, cusp_drum, string_drum
from .exceptions import IndependenceError
from .tube_geometry import geometric_grid, log_cusp_tube_volume, sample_tube


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    measured: dict
    tolerance: dict
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_fmt(v)} (tol {_fmt(self.tolerance[k])})" if k in self.tolerance
                          else f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{status}] {self.number:2d}. {self.name}: {parts} [{self.elapsed:.1f}s]"


def _fmt(v):
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return f"{v:.3g}"
    return str(v)


def _ternary():
    return GeneralizedCantorParams(2, Fraction(1, 3))


def _rng():
    return np.random.default_rng(20240601)


# ---------------------------------------------------------------------------


def check_cantor_closed_form() -> CheckResult:
    p = _ternary()
    delta = float(p.threshold)
    form = closed_forms.cantor_distance_zeta_form(p, delta)
    rng = _rng()
    pts = rng.uniform(0.7, 1.5, 20) + 1j * rng.uniform(-10, 10, 20)
    errs = []
    for s in pts:
        ev = zeta_numeric.distance_zeta_1d(p, delta, s, levels=30)
        ref = form(s)
        errs.append(abs(ev.value - ref) / abs(ref))
    worst = float(max(errs))
    return CheckResult(1, "Cantor closed form", worst <= 1e-6, {"max_rel_err": worst}, {"max_rel_err": 1e-6},
                       details={"points": len(pts)})


def check_residues() -> CheckResult:
    p = _ternary()
    D, T = p.dimension, p.period
    form = closed_forms.cantor_distance_zeta_form(p)
    h = T / 2048
    samples = sample_tube(p, geometric_grid(float(p.threshold) * math.exp(-h), math.exp(-h), 4 * 2048 + 1))
    fit = analysis.fit_log_periodic(samples, D)
    formula_err = fourier_err = 0.0
    for k in (-1, 0, 1):
        pole = complex(D, 2 * math.pi * k / T)
        num = analysis.numeric_residue(form, pole, 0.25)
        formula_err = max(formula_err, abs(num - form.residue(pole)))
        # distance residue = (N - s_k) times tube residue = (1 - s_k) c_k
        fourier_err = max(fourier_err, abs(num - (1 - pole) * fit.coefficient(k)))
    report = analysis.residue_content_check(p)
    lower, upper = closed_forms.cantor_contents(p)
    content_err = max(abs(report.lower_content - lower) / lower, abs(report.upper_content - upper) / upper)
    margin = min(report.details["margins"])
    ok = (formula_err <= 1e-4 and fourier_err <= 1e-4 and report.passed
          and margin >= 10 * report.numerical_error and content_err <= 0.01)
    return CheckResult(2, "Residue identities", ok,
                       {"formula_err": formula_err, "fourier_err": fourier_err,
                        "sandwich_margin_over_err": margin / report.numerical_error, "content_rel_err": content_err},
                       {"formula_err": 1e-4, "fourier_err": 1e-4, "sandwich_margin_over_err": 10.0,
                        "content_rel_err": 0.01},
                       details={"residue_tube": report.residue_tube, "M_lower": report.lower_content,
                                "M_upper": report.upper_content})


def check_sphere() -> CheckResult:
    circle = Sphere(2, 1.0)
    delta = 0.5
    h = 0.0025
    samples = sample_tube(circle, geometric_grid(delta, math.exp(-h), 4 * 800 + 1))
    rep = analysis.estimate_dimensions(samples)
    model = zeta_numeric.constant_tail_model(rep.fitted_dim, rep.upper_content)
    form = closed_forms.sphere_tube_zeta_form(2, 1.0, delta)
    rng = _rng()
    pts = rng.uniform(1.2, 3.0, 10) + 1j * rng.uniform(-5, 5, 10)
    err = max(abs(zeta_numeric.tube_zeta_from_samples(samples, delta, s, model).value - form(s)) for s in pts)
    res = analysis.numeric_residue(form, 1.0, 0.25)
    res_err = abs(res - 4 * math.pi)
    closed_err = abs(form.residue(1 + 0j) - rep.upper_content)
    ok = err <= 1e-8 and res_err <= 1e-8 and closed_err <= 1e-8
    return CheckResult(3, "Sphere", ok, {"max_err": float(err), "residue_err": res_err, "closed_vs_content": closed_err},
                       {"max_err": 1e-8, "residue_err": 1e-8, "closed_vs_content": 1e-8})


def check_carpet() -> CheckResult:
    form = closed_forms.sierpinski_relative_zeta_form()
    rel = 0.0
    for s in (1.95, 2.2, 2.5):
        ev = zeta_numeric.carpet_relative_zeta(s)
        rel = max(rel, abs(ev.value - form(s).real) / abs(form(s)))
    D = closed_forms.SIERPINSKI_D
    poles = analysis.pole_scan(form, (1.5, 2.0, -6.0, 6.0))
    expected = form.poles_in((1.5, 2.0, -6.0, 6.0))
    loc_err = max(abs(a.location - b) for a, b in zip(poles, expected)) if len(poles) == len(expected) else math.inf
    res_err = max(p.residue_discrepancy for p in poles) if poles else math.inf
    ok = rel <= 0.02 and len(poles) == 3 and loc_err <= 1e-6 and res_err <= 1e-8
    return CheckResult(4, "Sierpinski carpet", ok,
                       {"max_rel_err": rel, "poles": len(poles), "location_err": loc_err, "residue_err": res_err},
                       {"max_rel_err": 0.02, "poles": 3, "location_err": 1e-6, "residue_err": 1e-8},
                       details={"D": D})


def check_functional_equation() -> CheckResult:
    rng = _rng()
    cases = [
        (_ternary(), float(_ternary().threshold), (0.7, 1.5)),
        (Sphere(2, 1.0), 0.5, (0.3, 3.0)),
        (closed_forms.LocalBall(3, 1.0), 0.5, (0.3, 4.0)),
    ]
    failures = 0
    worst = 0.0
    for obj, delta, (lo, hi) in cases:
        pts = rng.uniform(lo, hi, 20) + 1j * rng.uniform(-5, 5, 20)
        for s in pts:
            chk = zeta_numeric.functional_equation_check(obj, delta, s)
            failures += not chk.ok
            worst = max(worst, chk.discrepancy / max(chk.est_error, 1e-300))
    return CheckResult(5, "Functional equation", failures == 0,
                       {"failures": failures, "max_disc_over_err": worst}, {"failures": 0, "max_disc_over_err": 1.0})


def check_cusp() -> CheckResult:
    drum = cusp_drum(2.0)
    samples = sample_tube(drum, geometric_grid(1e-2, 10 ** (-1 / 32), 32 * 4 + 1))
    rep = analysis.estimate_dimensions(samples, dim=-1.0)
    content = rep.upper_content
    report = analysis.residue_content_check(drum)
    res = report.residue_distance.real
    t = 1e-3
    ratios = {}
    flat = cusp_drum(None)
    for r in (-1, -5, -20):
        log_ratio = log_cusp_tube_volume(flat.region, t) - (2 - r) * math.log(t)
        ratios[r] = log_ratio / math.log(10)
    dim_err = abs(rep.fitted_dim + 1)
    content_rel = abs(content - 1 / 3) * 3
    res_rel = abs(res - 1)
    worst_log10 = max(ratios.values())
    ok = dim_err <= 0.02 and content_rel <= 0.01 and res_rel <= 0.01 and worst_log10 < -6
    return CheckResult(6, "Relative cusp drum", ok,
                       {"dim_err": dim_err, "content_rel_err": content_rel, "residue_rel_err": res_rel,
                        "max_log10_flat_ratio": worst_log10},
                       {"dim_err": 0.02, "content_rel_err": 0.01, "residue_rel_err": 0.01, "max_log10_flat_ratio": -6.0},
                       details={"fitted_dim": rep.fitted_dim, "content": content, "residue": res})


def check_scaling() -> CheckResult:
    rng = _rng()
    drums = [(cusp_drum(2.0), (-0.5, 1.5)), (string_drum(LacunaryString.cantor()), (0.7, 1.5))]
    failures = 0
    worst = 0.0
    for drum, (lo, hi) in drums:
        pts = rng.uniform(lo, hi, 10) + 1j * rng.uniform(-3, 3, 10)
        for lam in (0.5, 2.0):
            for s in pts:
                disc, bound = zeta_numeric.scaling_discrepancy(drum, lam, s)
                failures += disc > bound
                worst = max(worst, disc / bound)
    return CheckResult(7, "Scaling law", failures == 0, {"failures": failures, "max_disc_over_bound": worst},
                       {"failures": 0, "max_disc_over_bound": 1.0})


def check_quasiperiodic() -> CheckResult:
    accepted = quasiperiodic.build_assembly(2, 0.5, [2, 3])
    rejected = []
    for ms in ([2, 4], [6, 12, 18]):
        try:
            quasiperiodic.build_assembly(len(ms), 0.5, ms)
            rejected.append(False)
        except IndependenceError as exc:
            rejected.append(exc.certificate is not None and bool(exc.certificate.dependency))
    form = quasiperiodic.assembly_form(accepted)
    num = quasiperiodic.assembly_numeric(accepted, 0.7, levels=20)
    zeta_err = abs(form(0.7) - num.value)
    window = (0.3, 0.7, -15.0, 15.0)
    poles = analysis.pole_scan(form, window, grid=8)
    expected = accepted.principal_dims(15.0)
    match = len(poles) == len(expected) and all(abs(p.location - q) < 1e-6 for p, q in zip(poles, expected))
    ok = all(rejected) and zeta_err <= 1e-5 and match
    return CheckResult(8, "Quasiperiodic gate", ok,
                       {"rejections": sum(rejected), "zeta_err": zeta_err, "poles": len(poles)},
                       {"rejections": 2, "zeta_err": 1e-5, "poles": len(expected)})


def _double_sum(string: LacunaryString, s: float, K: int, blocks: int):
    k = np.arange(1, K + 1, dtype=float)
    zr = np.sum(k ** -s)
    n = np.arange(blocks, dtype=float)
    lengths = float(string.scale) * float(string.ratio) ** n
    mults = string.mult0 * float(string.base) ** n
    zl = np.sum(mults * lengths ** s)
    # tails of the two factors: integral bound for k > K, geometric for blocks beyond
    zr_tail = K ** (1 - s) / (s - 1)
    q = string.base * float(string.ratio) ** s
    zl_tail = string.mult0 * float(string.scale) ** s * q ** blocks / (1 - q)
    total = zr * zl
    bound = zr_tail * (zl + zl_tail) + (zr + zr_tail) * zl_tail
    return total, bound


def check_spectral() -> CheckResult:
    targets = {("geometric", 2): math.pi ** 2 / 18, ("cantor", 2): math.pi ** 2 / 42}
    worst = 0.0
    target_err = 0.0
    for name, string in (("geometric", LacunaryString.geometric()), ("cantor", LacunaryString.cantor())):
        for s in (2.0, 3.0):
            ev = spectral.string_spectral_zeta(string, s)
            ds, tail = _double_sum(string, s, 10 ** 6, 60)
            worst = max(worst, abs(ev.value - ds) / (tail + ev.est_error))
            if (name, int(s)) in targets:
                target_err = max(target_err, abs(ev.value - targets[(name, int(s))]))
    spray = spectral.Spray(spectral.Interval(1.0), 1 / 3, 2)
    formula = spectral.spray_spectral_zeta(spray.base, spray.gamma, spray.b, 4.0)
    enum = spectral.spectral_zeta_enumerated(spray, 4.0, 1e8)
    spray_ratio = abs(formula.value - enum.value) / (formula.est_error + enum.est_error)
    ok = worst <= 1.0 and spray_ratio <= 1.0 and target_err <= 1e-10
    return CheckResult(9, "Spectral factorization", ok,
                       {"factor_disc_over_tails": worst, "spray_disc_over_bounds": spray_ratio,
                        "target_err": target_err},
                       {"factor_disc_over_tails": 1.0, "spray_disc_over_bounds": 1.0, "target_err": 1e-10})


def check_weyl() -> CheckResult:
    interval = spectral.weyl_check(spectral.Interval(1.0), np.linspace(1.0, 1e4, 1000))
    D = math.log(2) / math.log(3)
    cantor = spectral.weyl_check(spectral.FractalStringDrum(LacunaryString.cantor()),
                                 np.geomspace(1e2, 1e6, 400), d=D)
    rect = spectral.spectral_residue_check(spectral.Rectangle(1.0, 1.0))
    gap = abs(cantor.frequency_exponent - D)
    ok = interval.sup_abs <= 1 and gap <= 0.05 and rect.relative_error <= 0.02
    return CheckResult(10, "Weyl checks", ok,
                       {"interval_sup_R": interval.sup_abs, "cantor_exponent_gap": gap,
                        "rectangle_residue_rel_err": rect.relative_error},
                       {"interval_sup_R": 1.0, "cantor_exponent_gap": 0.05, "rectangle_residue_rel_err": 0.02},
                       details={"cantor_frequency_exponent": cantor.frequency_exponent})


def check_abscissa() -> CheckResult:
    p = _ternary()
    D = p.dimension
    cusp = cusp_drum(2.0)
    verdicts = {
        "cantor_above": zeta_numeric.abscissa_verdict(p, D + 0.05),
        "cantor_below": zeta_numeric.abscissa_verdict(p, D - 0.05),
        "cusp_above": zeta_numeric.abscissa_verdict(cusp, -1 + 0.05),
        "cusp_below": zeta_numeric.abscissa_verdict(cusp, -1 - 0.05),
        "hp_0.2": zeta_numeric.harvey_polking_probe(p, 0.2),
        "hp_0.5": zeta_numeric.harvey_polking_probe(p, 0.5),
    }
    expected = {"cantor_above": "converges", "cantor_below": "diverges", "cusp_above": "converges",
                "cusp_below": "diverges", "hp_0.2": "converges", "hp_0.5": "diverges"}
    correct = sum(verdicts[k] == expected[k] for k in expected)
    return CheckResult(11, "Abscissa verdicts", correct == len(expected), {"correct": correct},
                       {"correct": len(expected)}, details=verdicts)


CHECKS = {
    1: check_cantor_closed_form, 2: check_residues, 3: check_sphere, 4: check_carpet,
    5: check_functional_equation, 6: check_cusp, 7: check_scaling, 8: check_quasiperiodic,
    9: check_spectral, 10: check_weyl, 11: check_abscissa,
}


def run_check(number: int) -> CheckResult:
    start = time.perf_counter()
    result = CHECKS[number]()
    result.elapsed = time.perf_counter() - start
    return result


def run_suite(numbers=None) -> list:
    return [run_check(n) for n in (numbers or sorted(CHECKS))]


def format_table(results) -> str:
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines)
