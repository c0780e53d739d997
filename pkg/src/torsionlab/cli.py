"""Command-line front door.

Every subcommand parses all referenced files before computing, computes with
the requested precision, and emits byte-deterministic reports: decimals are
truncated (not rounded) at precision_bits/4 significant digits, so identical
jobs produce identical bytes.
"""

from __future__ import annotations

import argparse
import os
import sys

from mpmath import mp, mpf, mpc, workprec
from mpmath.libmp import to_str

from . import __version__
from .fpgroup import parse_presentation, validate_presentation
from .representation import (
    TwistPoint,
    parse_alpha_file,
    parse_peripheral_file,
    parse_representation_file,
    validate_representation,
)
from .alexander import DeltaEvaluator, classical_alexander
from .asymptotics import (
    quadratic_fit,
    rational_corollary_residual,
    unit_circle_margin,
    root_log_sum,
    volume_sequence,
)
from .mahler import mahler_jensen, mahler_quadrature, polynomial_torus_evaluator
from .numerics import polynomial_roots
from .zeta import (
    growth_check,
    load_spectrum,
    ruelle_big_r,
    ruelle_r,
    selberg_z,
    series_bound_report,
    tail_bound,
)
from .anosov import characteristic_product, hyperbolicity_report

DEFAULT_PRECISION_ENV = "TORSIONLAB_PRECISION_BITS"


class CliError(Exception):
    pass


def _fmt_real(x, digits):
    """Truncated (round-toward-zero) significant-digit decimal string."""
    x = mpf(x)
    if x == 0:
        return "0.0"
    return to_str(x._mpf_, digits, rnd="d")


def _fmt_complex(z, digits):
    z = mpc(z)
    re = _fmt_real(z.real, digits)
    im = _fmt_real(z.imag, digits)
    sign = "" if im.startswith("-") else "+"
    return "%s%s%si" % (re, sign, im)


def parse_zeta_token(token, precision_bits):
    """Unit-circle point: '1', '-1', 'i', '-i', 'u:p/q' (e^{2 pi i p/q}),
    'rad:x' (e^{ix}) or a 're+imi' literal."""
    token = token.strip()
    with workprec(precision_bits):
        if token == "1":
            return mpc(1)
        if token == "-1":
            return mpc(-1)
        if token == "i":
            return mpc(0, 1)
        if token == "-i":
            return mpc(0, -1)
        if token.startswith("u:"):
            frac = token[2:]
            if "/" in frac:
                p, q = frac.split("/", 1)
                return mp.expjpi(2 * mpf(int(p)) / int(q))
            return mp.expjpi(2 * mpf(int(frac)))
        if token.startswith("rad:"):
            return mp.expj(mpf(token[4:]))
        from .representation import parse_complex_token
        return parse_complex_token(token)


def _read(path):
    if not os.path.exists(path):
        raise CliError("input file does not exist: %s" % path)
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


class Job:
    """Parsed and validated inputs for one subcommand run."""

    def __init__(self, args):
        self.args = args
        self.precision = getattr(args, "precision", None) or int(
            os.environ.get(DEFAULT_PRECISION_ENV, "256"))
        self.digits = max(4, self.precision // 4)
        self.presentation = None
        self.rho = None
        self.alpha = None
        self.peripheral = None
        self.spectrum = None
        if getattr(args, "pres", None):
            self.presentation = parse_presentation(_read(args.pres))
        if getattr(args, "rep", None):
            if self.presentation is None:
                raise CliError("--rep needs --pres")
            self.rho = parse_representation_file(
                _read(args.rep), self.presentation, self.precision)
        if getattr(args, "alpha", None):
            if self.presentation is None:
                raise CliError("--alpha needs --pres")
            self.alpha = parse_alpha_file(_read(args.alpha), self.presentation)
        if getattr(args, "peripheral", None):
            if self.presentation is None:
                raise CliError("--peripheral needs --pres")
            self.peripheral = parse_peripheral_file(
                _read(args.peripheral), self.presentation)
        if getattr(args, "spectrum", None):
            self.spectrum = load_spectrum(args.spectrum, self.precision)

    def zeta_points(self):
        tokens = getattr(self.args, "zeta", None) or ["1"]
        rank = self.alpha.rank if self.alpha is not None else 1
        points = []
        for token in tokens:
            coords = [parse_zeta_token(t, self.precision)
                      for t in token.split(",")]
            if len(coords) != rank:
                raise CliError(
                    "zeta %r has %d coordinates, alpha has rank %d"
                    % (token, len(coords), rank))
            points.append(TwistPoint(coords, self.precision))
        return points

    def evaluator(self):
        if self.presentation is None or self.rho is None or self.alpha is None:
            raise CliError("this command needs --pres, --rep and --alpha")
        return DeltaEvaluator(self.presentation, self.rho, self.alpha,
                              self.peripheral)


def _emit(lines, out_path):
    payload = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


# -- subcommands ---------------------------------------------------------------

def cmd_alex(job):
    args = job.args
    ev = job.evaluator()
    result = ev.polynomial(args.n)
    poly = result.polynomial
    lines = ["# torsionlab alex report"]
    lines.append("n=%d" % result.n)
    lines.append("normalization=%s" % result.normalization)
    lines.append("removed_column=%d" % result.removed_column)
    lines.append("laurentness_residual=%s" % _fmt_real(result.laurentness_residual, job.digits))
    lines.append("min_exponent=%d" % poly.min_exponent)
    lines.append("exponent,coeff_re,coeff_im")
    for i, c in enumerate(poly.coefficients):
        lines.append("%d,%s,%s" % (poly.min_exponent + i,
                                   _fmt_real(c.real, job.digits),
                                   _fmt_real(c.imag, job.digits)))
    _emit(lines, args.out)
    return 0


def cmd_eval(job):
    args = job.args
    ev = job.evaluator()
    lines = ["# torsionlab eval report", "n,zeta_index,modulus,log_modulus"]
    for zi, zeta in enumerate(job.zeta_points()):
        for n in args.n:
            v = ev.modulus_at(n, zeta)
            with workprec(job.precision):
                lines.append("%d,%d,%s,%s" % (
                    n, zi, _fmt_real(v, job.digits), _fmt_real(mp.log(v), job.digits)))
    _emit(lines, args.out)
    return 0


def cmd_volume(job):
    args = job.args
    ns = range(args.nmin, args.nmax + 1)
    lines = ["# torsionlab volume report", "n,zeta_index,log_modulus,normalized"]
    footer = []
    for zi, zeta in enumerate(job.zeta_points()):
        est = volume_sequence(job.presentation, job.rho, job.alpha, zeta, ns,
                              job.peripheral)
        for n, _, logv in est.samples:
            lines.append("%d,%d,%s,%s" % (
                n, zi, _fmt_real(logv, job.digits),
                _fmt_real(logv / mpf(n) ** 2, job.digits)))
        footer.append("volume[%d]=%s" % (zi, _fmt_real(est.volume_estimate, job.digits)))
        footer.append("fit_residual[%d]=%s" % (zi, _fmt_real(est.fit_residual, job.digits)))
        footer.append("window[%d]=%d" % (zi, est.window))
    _emit(lines + footer, args.out)
    return 0


def cmd_mahler(job):
    args = job.args
    ev = job.evaluator()
    lines = ["# torsionlab mahler report", "n,mahler,normalized"]
    rows = []
    for n in range(args.nmin, args.nmax + 1):
        poly = ev.polynomial(n).polynomial
        if args.method == "jensen":
            m_val = mahler_jensen(poly).value
        else:
            m_val = mahler_quadrature(polynomial_torus_evaluator(poly), 1,
                                      args.grid, job.precision).value
        rows.append((n, m_val))
        lines.append("%d,%s,%s" % (n, _fmt_real(m_val, job.digits),
                                   _fmt_real(m_val / mpf(n) ** 2, job.digits)))
    if len(rows) >= 8:
        window = max(4, len(rows) // 2)
        coeffs, _ = quadratic_fit(rows[-window:])
        lines.append("fitted_limit=%s" % _fmt_real(coeffs[0], job.digits))
    _emit(lines, args.out)
    return 0


def cmd_roots(job):
    args = job.args
    ev = job.evaluator()
    result = ev.polynomial(args.n)
    roots = polynomial_roots(result.polynomial)
    lines = ["# torsionlab roots report", "root_re,root_im,modulus"]
    with workprec(job.precision):
        for r in sorted(roots, key=lambda z: (abs(z), mp.arg(z))):
            lines.append("%s,%s,%s" % (_fmt_real(r.real, job.digits),
                                       _fmt_real(r.imag, job.digits),
                                       _fmt_real(abs(r), job.digits)))
        margin = unit_circle_margin(roots)
        total, normalized = root_log_sum(roots, args.n)
        lines.append("unit_circle_margin=%s" % _fmt_real(margin, job.digits))
        lines.append("root_log_sum=%s" % _fmt_real(total, job.digits))
        lines.append("root_log_sum_normalized=%s" % _fmt_real(normalized, job.digits))
    _emit(lines, args.out)
    return 0


def cmd_zeta(job):
    args = job.args
    if job.spectrum is None:
        raise CliError("zeta needs --spectrum")
    zeta = job.zeta_points()[0]
    lines = ["# torsionlab zeta report"]
    with workprec(job.precision):
        s = mpc(mpf(args.s_re), mpf(args.s_im))
        if args.n is not None:
            value = ruelle_big_r(job.spectrum, zeta, args.n, s)
            lines.append("ruelle_big_r=%s" % _fmt_complex(value, job.digits))
        if args.k is not None:
            value = ruelle_r(job.spectrum, zeta, args.k, s)
            lines.append("ruelle_r=%s" % _fmt_complex(value, job.digits))
            zv = selberg_z(job.spectrum, zeta, args.k, s, args.lmax)
            lines.append("selberg_z=%s" % _fmt_complex(zv, job.digits))
        growth = growth_check(job.spectrum)
        lines.append("growth_constant=%s pass=%s"
                     % (_fmt_real(growth.constant, job.digits), growth.passed))
        report = series_bound_report(job.spectrum, zeta)
        lines.append("series_bound=%s" % _fmt_real(report.total, job.digits))
        if args.truncation is not None:
            bound = tail_bound(args.epsilon, mpf(args.s_re), args.truncation,
                               growth.constant)
            lines.append("tail_bound=%s" % _fmt_real(bound, job.digits))
    _emit(lines, args.out)
    return 0


def cmd_xcheck(job):
    args = job.args
    if job.spectrum is None:
        raise CliError("xcheck needs --spectrum")
    zeta = job.zeta_points()[0]
    residual = rational_corollary_residual(
        job.presentation, job.rho, job.alpha, zeta, job.spectrum,
        mpf(args.volume), args.m, args.parity, job.peripheral)
    lines = ["# torsionlab xcheck report (demonstration, not a gate)"]
    lines.append("m=%d parity=%s truncation=%s" %
                 (args.m, args.parity, _fmt_real(job.spectrum.truncation_length, 8)))
    lines.append("residual=%s" % _fmt_real(residual, job.digits))
    _emit(lines, args.out)
    return 0


def cmd_anosov(job):
    args = job.args
    cp = characteristic_product(job.presentation, job.rho, job.alpha, args.n,
                                job.peripheral)
    report = hyperbolicity_report(cp)
    lines = ["# torsionlab anosov report", "root_re,root_im,modulus"]
    with workprec(job.precision):
        for r in sorted(cp.roots, key=lambda z: (abs(z), mp.arg(z))):
            lines.append("%s,%s,%s" % (_fmt_real(r.real, job.digits),
                                       _fmt_real(r.imag, job.digits),
                                       _fmt_real(abs(r), job.digits)))
    lines.append("unit_circle_margin=%s" % _fmt_real(report.margin, job.digits))
    lines.append("inversion_symmetry_distance=%s"
                 % _fmt_real(report.symmetry_distance, job.digits))
    lines.append("hyperbolic=%s" % report.hyperbolic)
    _emit(lines, args.out)
    return 0


def cmd_selftest(job):
    """Quick closed-form corpus; exits nonzero on any mismatch."""
    from .fpgroup import GroupPresentation, Word, fox_derivative, GroupRingElement
    from .numerics import ComplexMatrix, LaurentPolynomial, determinant
    from .representation import sym_power
    from .asymptotics import dehn_filling_factor

    checks = []

    trefoil = GroupPresentation(("x", "y"), ("xyxYXY",))
    d = fox_derivative(trefoil.relators[0], 0)
    expected = GroupRingElement({
        Word(): 1,
        trefoil.word("xy"): 1,
        trefoil.word("xyxYX"): -1,
    })
    checks.append(("fox trefoil d/dx", d == expected))

    alex = classical_alexander(trefoil)
    want = [1, -1, 1]
    got_ok = (alex.min_exponent == 0 and len(alex.coefficients) == 3 and
              all(abs(c - w) < mpf("1e-20") for c, w in zip(alex.coefficients, want)))
    checks.append(("classical trefoil", got_ok))

    ident5 = ComplexMatrix.identity(5)
    checks.append(("det identity", abs(determinant(ident5) - 1) < mpf("1e-60")))

    m = ComplexMatrix(2, 2, [mpc(2), mpc(0), mpc(0), mpf(1) / 2])
    s3 = sym_power(m, 3)
    checks.append(("sym diag", abs(s3[0, 0] - 4) < mpf("1e-60")
                   and abs(s3[1, 1] - 1) < mpf("1e-60")
                   and abs(s3[2, 2] - mpf(1) / 4) < mpf("1e-60")))

    lam = mpf(2)
    f = dehn_filling_factor(2, [lam], [mpc(1)])
    want_f = (mp.exp(lam / 2) - 1) * (mp.exp(-lam / 2) - 1)
    checks.append(("dehn factor n=2", abs(f.value - want_f) < mpf("1e-40")))

    p = LaurentPolynomial(0, [1, -3, 1])
    roots = polynomial_roots(p)
    checks.append(("roots t^2-3t+1", min(abs(r - (3 + mp.sqrt(5)) / 2) for r in roots) < mpf("1e-40")))

    lines = ["# torsionlab selftest"]
    ok = True
    for name, passed in checks:
        ok = ok and passed
        lines.append("%s: %s" % (name, "ok" if passed else "FAIL"))
    lines.append("selftest=%s" % ("ok" if ok else "FAIL"))
    _emit(lines, job.args.out)
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="torsionlab",
        description="Twisted Alexander polynomials, volume asymptotics and "
                    "truncated zeta identities for 3-manifold groups.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, files=("pres", "rep", "alpha", "peripheral")):
        if "pres" in files:
            p.add_argument("--pres", help="presentation file")
        if "rep" in files:
            p.add_argument("--rep", help="representation file")
        if "alpha" in files:
            p.add_argument("--alpha", help="alpha exponent file")
        if "peripheral" in files:
            p.add_argument("--peripheral", help="peripheral meridian/longitude file")
        p.add_argument("--precision", type=int, default=None,
                       help="working precision in bits (default 256 or $%s)"
                            % DEFAULT_PRECISION_ENV)
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("alex", help="full twisted polynomial (rank 1)")
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_alex)

    p = sub.add_parser("eval", help="|Delta| at twist points")
    add_common(p)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--zeta", nargs="+", default=["1"])
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("volume", help="n^2 growth fit of log|Delta|")
    add_common(p)
    p.add_argument("--nmin", type=int, default=2)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--zeta", nargs="+", default=["1"])
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("mahler", help="Mahler measure sequence")
    add_common(p)
    p.add_argument("--nmin", type=int, default=2)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--method", choices=("jensen", "quadrature"), default="jensen")
    p.add_argument("--grid", type=int, default=4096)
    p.set_defaults(func=cmd_mahler)

    p = sub.add_parser("roots", help="roots of the twisted polynomial")
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("zeta", help="truncated Ruelle/Selberg values")
    add_common(p, files=())
    p.add_argument("--spectrum", required=True)
    p.add_argument("--zeta", nargs="+", default=["1"])
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--s-re", dest="s_re", default="3")
    p.add_argument("--s-im", dest="s_im", default="0")
    p.add_argument("--lmax", type=int, default=40)
    p.add_argument("--truncation", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("xcheck", help="torsion-quotient identity vs an external spectrum (demonstration)")
    add_common(p)
    p.add_argument("--spectrum", required=True)
    p.add_argument("--zeta", nargs="+", default=["1"])
    p.add_argument("--volume", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--parity", choices=("even", "odd"), required=True)
    p.set_defaults(func=cmd_xcheck)

    p = sub.add_parser("anosov", help="pseudo-Anosov characteristic product")
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_anosov)

    p = sub.add_parser("selftest", help="run the built-in closed-form corpus")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        job = Job(args)
        return args.func(job)
    except (CliError, ValueError, OSError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
