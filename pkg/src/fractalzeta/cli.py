"""Command-line front end.

Exit status: 0 success, 1 failed verification or other error, 2 domain
error, 3 divergence, 4 unsupported variant.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import analysis, closed_forms, quasiperiodic, spectral, verify, zeta_numeric
from .core_model import (
    GeneralizedCantorParams, LacunaryString, Sphere, StringEndpoints, as_number, cusp_drum, string_drum,
)
from .exceptions import (
    DivergenceError, DomainError, FractalZetaError, IndependenceError, UnsupportedVariantError,
)
from .tube_geometry import geometric_grid, sample_tube

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_DIVERGENCE, EXIT_UNSUPPORTED = 0, 1, 2, 3, 4

COMMANDS = ("tube", "zeta", "form", "dim", "fit", "poles", "qp", "spectral", "verify")


# ---------------------------------------------------------------------------
# Descriptors


@dataclass(frozen=True)
class Descriptor:
    """Parsed set or drum descriptor."""

    kind: str
    obj: object
    text: str
    extra: dict = field(default_factory=dict)


_JSON_KEYS = {
    "cantor": {"type", "m", "a"},
    "string": {"type", "name", "r"},
    "sphere": {"type", "N", "R"},
    "carpet": {"type"},
    "sierpinski": {"type"},
    "cusp": {"type", "alpha"},
    "qp": {"type", "D", "m"},
}


def _descriptor_from_json(rec: dict) -> str:
    kind = rec.get("type")
    if kind not in _JSON_KEYS:
        raise DomainError(f"unknown descriptor type {kind!r}")
    unknown = set(rec) - _JSON_KEYS[kind]
    if unknown:
        raise DomainError(f"unknown descriptor keys: {sorted(unknown)}")
    if kind == "cantor":
        return f"cantor:{rec['m']},{rec['a']}"
    if kind == "string":
        return f"string:{rec['name']}" + (f",{rec['r']}" if "r" in rec else "")
    if kind == "sphere":
        return f"sphere:{rec['N']},{rec['R']}"
    if kind == "cusp":
        return f"cusp:{rec.get('alpha', 'exp')}"
    if kind == "qp":
        return f"qp:{rec['D']};" + ",".join(str(m) for m in rec["m"])
    return kind


def parse_descriptor(text: str) -> Descriptor:
    """Parse ``cantor:m,a``, ``string:geometric,r``, ``string:cantor``, ``sphere:N,R``,
    ``carpet``, ``cusp:alpha`` (``cusp:exp`` for the flat cusp) or ``qp:D;m1,m2,...``.

    Inline JSON objects and paths to JSON files are accepted as well.
    """
    text = text.strip()
    if text.startswith("{"):
        text = _descriptor_from_json(json.loads(text))
    elif text.endswith(".json") and os.path.exists(text):
        with open(text) as fh:
            text = _descriptor_from_json(json.load(fh))
    head, _, rest = text.partition(":")
    head = head.lower()
    try:
        if head == "cantor":
            m, a = rest.split(",")
            return Descriptor("cantor", GeneralizedCantorParams(int(m), as_number(a)), text)
        if head == "string":
            parts = rest.split(",")
            if parts[0] == "geometric":
                r = as_number(parts[1]) if len(parts) > 1 else Fraction(1, 2)
                return Descriptor("string", LacunaryString.geometric(r), text)
            if parts[0] == "cantor" and len(parts) == 1:
                return Descriptor("string", LacunaryString.cantor(), text)
            raise DomainError(f"unknown string {rest!r}")
        if head == "sphere":
            N, R = rest.split(",")
            return Descriptor("sphere", Sphere(int(N), float(R)), text)
        if head in ("carpet", "sierpinski") and not rest:
            return Descriptor("carpet", "carpet", text)
        if head == "cusp":
            alpha = None if rest in ("exp", "flat") else float(rest)
            return Descriptor("cusp", cusp_drum(alpha), text)
        if head == "qp":
            D, ms = rest.split(";")
            m_list = [int(x) for x in ms.split(",")]
            return Descriptor("qp", quasiperiodic.build_assembly(len(m_list), float(D), m_list), text)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, FractalZetaError):
            raise
        raise DomainError(f"cannot parse descriptor {text!r}: {exc}") from None
    raise DomainError(f"unknown descriptor {text!r}")


def parse_complex(text: str) -> complex:
    """Parse ``0.8+0i``, ``1.2-3j`` or a plain decimal."""
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise DomainError(f"cannot parse complex number {text!r}") from None


def parse_floats(text: str, count=None) -> list:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise DomainError(f"cannot parse number list {text!r}") from None
    if count is not None and len(vals) != count:
        raise DomainError(f"expected {count} numbers, got {len(vals)}")
    return vals


# ---------------------------------------------------------------------------
# Output


def fmt(x) -> str:
    """17 significant digits, '.' separator."""
    return format(float(x), ".17g")


class Output:
    def __init__(self, path):
        self.path = path
        self.buf = io.StringIO()

    def writer(self):
        return csv.writer(self.buf, lineterminator="\n")

    def line(self, text: str):
        self.buf.write(text + "\n")

    def close(self):
        data = self.buf.getvalue()
        if self.path in (None, "-"):
            sys.stdout.write(data)
        else:
            with open(self.path, "w", newline="") as fh:
                fh.write(data)


def _row_complex(z) -> list:
    z = complex(z)
    return [fmt(z.real), fmt(z.imag)]


# ---------------------------------------------------------------------------
# Commands


def _default_tmax(desc: Descriptor) -> float:
    if desc.kind == "cantor":
        return float(desc.obj.threshold)
    if desc.kind == "sphere":
        return desc.obj.R / 2
    if desc.kind == "qp":
        return 0.05
    if desc.kind == "string":
        return float(desc.obj.first_length) / 4
    return 1e-2


def _sample_object(desc: Descriptor):
    if desc.kind == "qp":
        return desc.obj.union
    if desc.kind == "string":
        return string_drum(desc.obj)
    if desc.kind == "carpet":
        from .core_model import carpet_drum
        return carpet_drum(6)
    return desc.obj


def _samples(desc: Descriptor, args):
    tmax = args.tmax if args.tmax is not None else _default_tmax(desc)
    ratio = 10 ** (-1 / args.per_decade)
    count = int(round(args.decades * args.per_decade)) + 1
    return sample_tube(_sample_object(desc), geometric_grid(tmax, ratio, count))


def cmd_tube(args, out: Output):
    desc = parse_descriptor(args.set)
    if args.t:
        t = np.unique(parse_floats(args.t))[::-1]
        # samples need two points; pad a single request and drop the extra row
        grid = t if t.size > 1 else np.array([t[0], t[0] / 2])
        samples = sample_tube(_sample_object(desc), grid)
        keep = np.isin(samples.t, t)
    else:
        samples = _samples(desc, args)
        keep = np.ones(samples.t.size, dtype=bool)
    w = out.writer()
    w.writerow(["t", "volume", "error_bound"])
    for t, v, e in zip(samples.t[keep][::-1], samples.volume[keep][::-1], samples.error_bound[keep][::-1]):
        w.writerow([fmt(t), fmt(v), fmt(e)])


def _zeta_eval(desc: Descriptor, kind: str, s: complex, delta, tol):
    obj = desc.obj
    if kind == "auto":
        kind = {"string": "geometric", "cusp": "relative", "carpet": "relative"}.get(desc.kind, "distance")
    if desc.kind in ("cantor",):
        if kind == "distance":
            return zeta_numeric.distance_zeta_1d(obj, delta, s)
        if kind == "tube":
            return zeta_numeric.tube_zeta(obj, delta if delta is not None else float(obj.threshold), s)
    if desc.kind == "qp" and kind == "distance":
        return quasiperiodic.assembly_numeric(obj, s, quasiperiodic.ASSEMBLY_DELTA if delta is None else delta)
    if desc.kind == "sphere":
        d = obj.R / 2 if delta is None else delta
        if kind == "tube":
            return zeta_numeric.tube_zeta(obj, d, s)
        if kind == "distance":
            if obj.N == 1:
                return zeta_numeric.distance_zeta_1d(obj, d, s)
            # distance zeta from the tube route through the functional equation
            tube = zeta_numeric.tube_zeta(obj, d, s)
            from .tube_geometry import tube_volume
            N = obj.N
            val = np.exp((s - N) * math.log(d)) * tube_volume(obj, d) + (N - s) * complex(tube.value)
            from .core_model import ZetaEvaluation
            return ZetaEvaluation(s, val, abs(N - s) * tube.est_error, "functional-equation")
    if desc.kind == "string":
        if kind == "geometric":
            return zeta_numeric.geometric_zeta(obj, s)
        if kind == "distance":
            return zeta_numeric.distance_zeta_1d(StringEndpoints(obj), delta, s)
        if kind == "relative":
            return zeta_numeric.relative_distance_zeta(string_drum(obj), delta, s)
        if kind == "spectral":
            return spectral.string_spectral_zeta(obj, s)
    if desc.kind == "cusp" and kind == "relative":
        return zeta_numeric.relative_distance_zeta(obj, delta, s)
    if desc.kind == "carpet" and kind == "relative":
        return zeta_numeric.carpet_relative_zeta(s)
    raise UnsupportedVariantError(f"no {kind} zeta route for {desc.kind}")


def cmd_zeta(args, out: Output):
    desc = parse_descriptor(args.set)
    s = parse_complex(args.s)
    if args.verdict:
        obj = {"string": desc.obj, "carpet": "carpet", "qp": desc.obj.union if desc.kind == "qp" else None}.get(
            desc.kind, desc.obj)
        verdict = zeta_numeric.abscissa_verdict(obj, s, delta=args.delta)
        w = out.writer()
        w.writerow(["s_re", "s_im", "verdict"])
        w.writerow(_row_complex(s) + [verdict])
        return EXIT_DIVERGENCE if verdict == "diverges" else EXIT_OK
    ev = _zeta_eval(desc, args.kind, s, args.delta, args.tol)
    w = out.writer()
    w.writerow(["s_re", "s_im", "value_re", "value_im", "est_error", "method"])
    w.writerow(_row_complex(s) + _row_complex(ev.value) + [fmt(ev.est_error), ev.method])
    return EXIT_OK


def build_form(text: str, kind: str = "auto", delta=None):
    """Closed form for a descriptor; ``sierpinski`` names the carpet form."""
    if text.strip().lower() in ("sierpinski", "carpet"):
        return closed_forms.sierpinski_relative_zeta_form()
    desc = parse_descriptor(text)
    if desc.kind == "cantor":
        if kind in ("auto", "distance"):
            return closed_forms.cantor_distance_zeta_form(desc.obj, delta)
        if kind == "tube":
            return closed_forms.cantor_tube_zeta_form(desc.obj, delta)
    if desc.kind == "sphere":
        N, R = desc.obj.N, desc.obj.R
        d = R / 2 if delta is None else delta
        if kind in ("auto", "tube"):
            return closed_forms.sphere_tube_zeta_form(N, R, d)
        if kind == "distance":
            return closed_forms.sphere_distance_zeta_form(N, R, d)
    if desc.kind == "string":
        if kind in ("auto", "relative"):
            return closed_forms.string_relative_zeta_form(desc.obj)
        if kind == "spectral":
            return spectral.string_spectral_form(desc.obj)
    if desc.kind == "qp" and kind in ("auto", "distance"):
        return quasiperiodic.assembly_form(desc.obj, quasiperiodic.ASSEMBLY_DELTA if delta is None else delta)
    raise UnsupportedVariantError(f"no {kind} closed form for {desc.kind}")


def cmd_form(args, out: Output):
    form = build_form(args.form, args.kind, args.delta)
    w = out.writer()
    if args.action == "eval":
        if not args.s:
            raise DomainError("form eval needs --s")
        w.writerow(["s_re", "s_im", "value_re", "value_im"])
        for part in args.s.split(";"):
            s = parse_complex(part)
            w.writerow(_row_complex(s) + _row_complex(form(s)))
    else:
        if not args.window:
            raise DomainError("form poles needs --window")
        w.writerow(["re", "im", "residue_re", "residue_im"])
        for p in form.poles_in(parse_floats(args.window, 4)):
            w.writerow(_row_complex(p) + _row_complex(form.residue(p)))
    return EXIT_OK


def cmd_dim(args, out: Output):
    desc = parse_descriptor(args.set)
    samples = _samples(desc, args)
    rep = analysis.estimate_dimensions(samples)
    if args.classify:
        fit = analysis.fit_log_periodic(samples, rep.fitted_dim)
        out.line(analysis.classify(samples, fit, rep).to_json())
        return EXIT_OK
    w = out.writer()
    w.writerow(["upper_dim", "lower_dim", "fitted_dim", "lower_content", "upper_content"])
    w.writerow([fmt(rep.upper_dim), fmt(rep.lower_dim), fmt(rep.fitted_dim),
                fmt(rep.lower_content), fmt(rep.upper_content)])
    return EXIT_OK


def cmd_fit(args, out: Output):
    desc = parse_descriptor(args.set)
    samples = _samples(desc, args)
    D = args.D if args.D is not None else analysis.estimate_dimensions(samples).fitted_dim
    fit = analysis.fit_log_periodic(samples, D, n_coefficients=args.k)
    w = out.writer()
    w.writerow(["k", "coef_re", "coef_im", "period_T", "period_found", "fit_residual"])
    T = fit.period_T if fit.period_found else math.nan
    for k, c in fit.fourier:
        w.writerow([k] + _row_complex(c) + [fmt(T), int(fit.period_found), fmt(fit.fit_residual)])
    return EXIT_OK


def cmd_poles(args, out: Output):
    form = build_form(args.form, args.kind, args.delta)
    window = parse_floats(args.window, 4)
    reports = analysis.pole_scan(form, window, grid=args.grid)
    w = out.writer()
    w.writerow(["re", "im", "residue_re", "residue_im", "analytic_re", "analytic_im"])
    for r in reports:
        ana = r.analytic_residue if r.analytic_residue is not None else complex(math.nan, math.nan)
        w.writerow(_row_complex(r.location) + _row_complex(r.numeric_residue) + _row_complex(ana))
    return EXIT_OK


def cmd_qp(args, out: Output):
    m_list = [int(x) for x in args.m]
    assembly = quasiperiodic.build_assembly(args.n if args.n else len(m_list), args.D, m_list)
    out.line(json.dumps(assembly.to_record(), sort_keys=True))
    if args.poles_out:
        window = parse_floats(args.window, 4) if args.window else (0.0, 1.0, -15.0, 15.0)
        form = quasiperiodic.assembly_form(assembly)
        pole_out = Output(args.poles_out)
        w = pole_out.writer()
        w.writerow(["re", "im", "residue_re", "residue_im"])
        for p in form.poles_in(window):
            w.writerow(_row_complex(p) + _row_complex(form.residue(p)))
        pole_out.close()
    return EXIT_OK


def parse_model(text: str):
    """``interval:l``, ``rectangle:a,b``, ``string:cantor`` / ``string:geometric,r``,
    ``spray:l,gamma,b`` (interval base)."""
    head, _, rest = text.strip().partition(":")
    try:
        if head == "interval":
            return spectral.Interval(float(rest))
        if head == "rectangle":
            a, b = parse_floats(rest, 2)
            return spectral.Rectangle(a, b)
        if head == "string":
            return spectral.FractalStringDrum(parse_descriptor(text).obj)
        if head == "spray":
            l, g, b = parse_floats(rest, 3)
            return spectral.Spray(spectral.Interval(l), g, int(b))
    except ValueError as exc:
        if isinstance(exc, FractalZetaError):
            raise
        raise DomainError(f"cannot parse model {text!r}: {exc}") from None
    raise DomainError(f"unknown eigenvalue model {text!r}")


def cmd_spectral(args, out: Output):
    model = parse_model(args.model)
    w = out.writer()
    if args.action == "eigen":
        w.writerow(["k", "mu"])
        for k, mu in enumerate(spectral.eigenvalues(model, args.K), start=1):
            w.writerow([k, fmt(mu)])
    elif args.action == "zeta":
        if not args.s:
            raise DomainError("spectral zeta needs --s")
        s = parse_complex(args.s)
        ev = spectral.spectral_zeta(model, s, args.K)
        w.writerow(["s_re", "s_im", "value_re", "value_im", "est_error", "method"])
        w.writerow(_row_complex(s) + _row_complex(ev.value) + [fmt(ev.est_error), ev.method])
    elif args.action == "weyl":
        grid = np.geomspace(args.mu_min, args.mu_max, args.count)
        rep = spectral.weyl_check(model, grid, args.d)
        w.writerow(["mu", "N", "remainder"])
        for mu, R in zip(rep.mu, rep.remainder):
            w.writerow([fmt(mu), spectral.counting_function(model, mu), fmt(R)])
        w.writerow(["# exponent", fmt(rep.exponent), fmt(rep.frequency_exponent)])
    else:
        rep = spectral.spectral_residue_check(model, args.K)
        w.writerow(["estimate", "target", "relative_error", "extrapolation_change"])
        w.writerow([fmt(rep.estimate), fmt(rep.target), fmt(rep.relative_error), fmt(rep.extrapolation_change)])
    return EXIT_OK


def cmd_verify(args, out: Output):
    if args.suite != "paper":
        raise DomainError(f"unknown suite {args.suite!r}")
    numbers = [int(x) for x in args.only.split(",")] if args.only else None
    results = []
    for n in numbers or sorted(verify.CHECKS):
        r = verify.run_check(n)
        results.append(r)
        print(r.line(), file=sys.stderr, flush=True)
    out.line(verify.format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fractalzeta", description="Fractal zeta functions and complex dimensions.")
    p.add_argument("--job", help="JSON job (inline or path) with keys command, input, params, output")
    sub = p.add_subparsers(dest="command")

    def common(sp, set_required=True):
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--threads", type=int, default=1, help="accepted for compatibility; work is single-threaded")
        sp.add_argument("--tol", type=float, default=None)

    def sampling(sp):
        sp.add_argument("--tmax", type=float, default=None)
        sp.add_argument("--decades", type=float, default=3.0)
        sp.add_argument("--per-decade", type=int, default=256)

    sp = sub.add_parser("tube", help="tube volumes on a grid")
    sp.add_argument("--set", required=True)
    sp.add_argument("--t", help="comma-separated t values")
    sampling(sp)
    common(sp)

    sp = sub.add_parser("zeta", help="evaluate a zeta function numerically")
    sp.add_argument("--set", "--drum", dest="set", required=True)
    sp.add_argument("--s", required=True)
    sp.add_argument("--delta", type=float, default=None)
    sp.add_argument("--kind", default="auto",
                    choices=["auto", "distance", "tube", "geometric", "relative", "spectral"])
    sp.add_argument("--verdict", action="store_true", help="report convergence verdict instead")
    common(sp)

    sp = sub.add_parser("form", help="closed-form evaluation or pole list")
    sp.add_argument("action", choices=["eval", "poles"])
    sp.add_argument("--form", required=True)
    sp.add_argument("--kind", default="auto", choices=["auto", "distance", "tube", "relative", "spectral"])
    sp.add_argument("--s", help="one or more points separated by ';'")
    sp.add_argument("--window")
    sp.add_argument("--delta", type=float, default=None)
    common(sp)

    sp = sub.add_parser("dim", help="dimension and content estimates")
    sp.add_argument("--set", "--drum", dest="set", required=True)
    sp.add_argument("--classify", action="store_true", help="emit the classification JSON record")
    sampling(sp)
    common(sp)

    sp = sub.add_parser("fit", help="log-periodic fit and Fourier coefficients")
    sp.add_argument("--set", required=True)
    sp.add_argument("--D", type=float, default=None)
    sp.add_argument("--k", type=int, default=3)
    sampling(sp)
    common(sp)

    sp = sub.add_parser("poles", help="pole scan of a closed form")
    sp.add_argument("--form", required=True)
    sp.add_argument("--window", required=True)
    sp.add_argument("--grid", type=int, default=8)
    sp.add_argument("--kind", default="auto", choices=["auto", "distance", "tube", "relative", "spectral"])
    sp.add_argument("--delta", type=float, default=None)
    common(sp)

    sp = sub.add_parser("qp", help="quasiperiodic assemblies")
    sp.add_argument("action", choices=["build"])
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--D", type=float, required=True)
    sp.add_argument("--m", nargs="+", required=True)
    sp.add_argument("--poles-out", default=None)
    sp.add_argument("--window", default=None)
    common(sp)

    sp = sub.add_parser("spectral", help="eigenvalues, spectral zeta, Weyl remainder, residue")
    sp.add_argument("action", choices=["eigen", "zeta", "weyl", "residue"])
    sp.add_argument("--model", required=True)
    sp.add_argument("--K", type=int, default=100_000)
    sp.add_argument("--s")
    sp.add_argument("--mu-min", type=float, default=1e2)
    sp.add_argument("--mu-max", type=float, default=1e6)
    sp.add_argument("--count", type=int, default=200)
    sp.add_argument("--d", type=float, default=None)
    common(sp)

    sp = sub.add_parser("verify", help="run the reproduction suite")
    sp.add_argument("--suite", default="paper")
    sp.add_argument("--only", default=None, help="comma-separated check numbers")
    common(sp)
    return p


HANDLERS = {
    "tube": cmd_tube, "zeta": cmd_zeta, "form": cmd_form, "dim": cmd_dim, "fit": cmd_fit,
    "poles": cmd_poles, "qp": cmd_qp, "spectral": cmd_spectral, "verify": cmd_verify,
}


def _job_argv(job_text: str) -> list:
    """Translate a JSON job into argv; unknown keys are rejected."""
    if os.path.exists(job_text):
        with open(job_text) as fh:
            job = json.load(fh)
    else:
        job = json.loads(job_text)
    unknown = set(job) - {"command", "input", "params", "output"}
    if unknown:
        raise DomainError(f"unknown job keys: {sorted(unknown)}")
    command = job.get("command")
    if command not in COMMANDS:
        raise DomainError(f"unknown command {command!r}")
    argv = [command]
    params = dict(job.get("params", {}))
    action = params.pop("action", None)
    if action is not None:
        argv.append(str(action))
    if "input" in job:
        flag = "--form" if command in ("form", "poles") else "--model" if command == "spectral" else "--set"
        inp = job["input"]
        argv += [flag, json.dumps(inp) if isinstance(inp, dict) else str(inp)]
    for key, value in params.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        elif isinstance(value, list):
            argv += [flag] + [str(v) for v in value]
        else:
            argv += [flag, str(value)]
    if job.get("output"):
        argv += ["--out", job["output"]]
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.job:
            args = parser.parse_args(_job_argv(args.job))
        if not args.command:
            parser.print_help(sys.stderr)
            return EXIT_DOMAIN
        out = Output(args.out)
        code = HANDLERS[args.command](args, out)
        out.close()
        return EXIT_OK if code is None else code
    except SystemExit as exc:
        return EXIT_DOMAIN if exc.code not in (0, None) else EXIT_OK
    except UnsupportedVariantError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (DomainError, IndependenceError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except FractalZetaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except json.JSONDecodeError as exc:
        print(f"domain error: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
