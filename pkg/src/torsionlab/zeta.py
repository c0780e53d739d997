"""Truncated Ruelle and Selberg zeta functions over geodesic length spectra.

A spectrum entry is an oriented prime closed geodesic: real length, holonomy
angle theta of the SL2 lift (defined mod 4pi; the file format stores a
representative in (-2pi, 2pi]), the class of the geodesic under the exponent
map alpha, and a multiplicity.  gamma and gamma^-1 are separate entries; the
inverse carries the same length, negated theta and negated alpha class.

All products are accumulated in log space with a fixed pairwise order, so
long spectra neither underflow nor reorder between runs.

The inner product of the Selberg function runs over the symmetric powers of
the holonomy acting on the 2-real-dimensional negative root space, whose
complexified weights are exp(-lambda) and exp(-conj(lambda)); with that
convention the Ruelle-Selberg relation telescopes exactly at every matched
truncation.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field

from mpmath import mp, mpf, mpc, workprec

from .numerics import pairwise_sum
from .representation import TwistPoint


class SpectrumError(ValueError):
    pass


class TruncationWarning(UserWarning):
    """Value returned outside the certified convergence half-plane."""


@dataclass
class SpectrumEntry:
    length: object  # mpf > 0
    theta: object  # mpf in (-2pi, 2pi]
    alpha_class: tuple
    multiplicity: int = 1


@dataclass
class LengthSpectrum:
    rank: int
    truncation_length: object
    entries: list = field(default_factory=list)

    def __post_init__(self):
        self.entries = sorted(self.entries, key=lambda e: (e.length, e.theta))

    def __len__(self):
        return len(self.entries)

    def counting_function(self):
        """Sorted (length, cumulative count with multiplicity) pairs."""
        out = []
        acc = 0
        for e in self.entries:
            acc += e.multiplicity
            out.append((e.length, acc))
        return out


def parse_spectrum(text: str, precision_bits=256) -> LengthSpectrum:
    """Parse the spectrum CSV: header length,theta,alpha_1..alpha_r,mult."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SpectrumError("empty spectrum file (missing header)")
    header = [h.strip() for h in header]
    if len(header) < 3 or header[0] != "length" or header[1] != "theta" or header[-1] != "mult":
        raise SpectrumError(
            "header must be length,theta,alpha_1..alpha_r,mult (got %r)" % header)
    alpha_cols = header[2:-1]
    expect = ["alpha_%d" % (i + 1) for i in range(len(alpha_cols))]
    if alpha_cols != expect:
        raise SpectrumError("alpha columns must be %r (got %r)" % (expect, alpha_cols))
    rank = len(alpha_cols)
    entries = []
    with workprec(precision_bits):
        two_pi = 2 * mp.pi
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise SpectrumError("line %d: expected %d fields" % (lineno, len(header)))
            try:
                length = mpf(row[0].strip())
                theta = mpf(row[1].strip())
                alpha_class = tuple(int(c.strip()) for c in row[2:-1])
                mult = int(row[-1].strip())
            except (ValueError, TypeError):
                raise SpectrumError("line %d: malformed row %r" % (lineno, row))
            if length <= 0:
                raise SpectrumError("line %d: geodesic length must be positive" % lineno)
            if not (-two_pi < theta <= two_pi):
                raise SpectrumError("line %d: theta outside (-2pi, 2pi]" % lineno)
            if mult < 1:
                raise SpectrumError("line %d: multiplicity must be positive" % lineno)
            entries.append(SpectrumEntry(length, theta, alpha_class, mult))
    truncation = max((e.length for e in entries), default=mpf(0))
    return LengthSpectrum(rank=rank, truncation_length=truncation, entries=entries)


def load_spectrum(path, precision_bits=256) -> LengthSpectrum:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spectrum(fh.read(), precision_bits)


def write_spectrum(spectrum: LengthSpectrum, path):
    with open(path, "w", encoding="utf-8") as fh:
        cols = ["length", "theta"]
        cols += ["alpha_%d" % (i + 1) for i in range(spectrum.rank)]
        cols.append("mult")
        fh.write(",".join(cols) + "\n")
        for e in spectrum.entries:
            row = [mp.nstr(e.length, 20), mp.nstr(e.theta, 20)]
            row += [str(a) for a in e.alpha_class]
            row.append(str(e.multiplicity))
            fh.write(",".join(row) + "\n")


def _check_rank(spectrum: LengthSpectrum, zeta: TwistPoint):
    if spectrum.rank != zeta.rank:
        raise SpectrumError("spectrum rank %d does not match twist rank %d"
                            % (spectrum.rank, zeta.rank))


def _log_product(log_terms, bits):
    with workprec(bits):
        return mp.exp(pairwise_sum(log_terms, mpc(0)))


def ruelle_r(spectrum: LengthSpectrum, zeta: TwistPoint, k: int, s) -> mpc:
    """Truncated R_{chi,k}(s) = prod (1 - chi(g) e^{ik theta/2} e^{-s l}).

    Certified convergence needs Re(s) > 2; smaller Re(s) still returns the
    truncated product but emits a :class:`TruncationWarning`.
    """
    _check_rank(spectrum, zeta)
    bits = zeta.precision_bits
    s = mpc(s)
    if s.real <= 2:
        warnings.warn("Re(s) <= 2: formal truncation only", TruncationWarning,
                      stacklevel=2)
    with workprec(bits):
        logs = []
        for e in spectrum.entries:
            chi = zeta.character(e.alpha_class)
            z = chi * mp.expj(mpf(k) * e.theta / 2) * mp.exp(-s * e.length)
            logs.append(e.multiplicity * mp.log(1 - z))
        return _log_product(logs, bits)


def ruelle_big_r(spectrum: LengthSpectrum, zeta: TwistPoint, n: int, s) -> mpc:
    """Truncated twisted Ruelle function of chi (x) rho_n.

    Per entry this is det(Id - chi(g) rho_n(g) e^{-s l}) expanded through the
    eigenvalues e^{lambda (n-1-2j)/2} of rho_n, so it factors term-wise as
    prod_{j=0}^{n-1} of the R_{chi,n-1-2j} factor at s - (n-1-2j)/2.
    """
    _check_rank(spectrum, zeta)
    if n < 1:
        raise SpectrumError("n must be >= 1")
    bits = zeta.precision_bits
    s = mpc(s)
    if s.real - mpf(n - 1) / 2 <= 2:
        warnings.warn("Re(s) - (n-1)/2 <= 2: formal truncation only",
                      TruncationWarning, stacklevel=2)
    with workprec(bits):
        logs = []
        for e in spectrum.entries:
            chi = zeta.character(e.alpha_class)
            lam = mpc(e.length, e.theta)
            acc = mpc(0)
            for j in range(n):
                w = mpf(n - 1 - 2 * j) / 2
                z = chi * mp.exp(w * lam) * mp.exp(-s * e.length)
                acc += mp.log(1 - z)
            logs.append(e.multiplicity * acc)
        return _log_product(logs, bits)


def selberg_z(spectrum: LengthSpectrum, zeta: TwistPoint, k: int, s, l_max: int) -> mpc:
    """Truncated Selberg function Z_{chi,k}(s) with inner symmetric powers.

    The degree-l inner factor is the determinant of Id minus
    ``e^{ik theta/2} chi(g) e^{-(s+1)l(g)}`` times Sym^l of the normal-bundle
    holonomy, whose weights are e^{-(j lambda + m conj(lambda))}, j + m = l.
    Certified convergence needs Re(s) > 1.
    """
    _check_rank(spectrum, zeta)
    if l_max < 0:
        raise SpectrumError("l_max must be >= 0")
    bits = zeta.precision_bits
    s = mpc(s)
    if s.real <= 1:
        warnings.warn("Re(s) <= 1: formal truncation only", TruncationWarning,
                      stacklevel=2)
    with workprec(bits):
        logs = []
        for e in spectrum.entries:
            chi = zeta.character(e.alpha_class)
            lam = mpc(e.length, e.theta)
            lam_bar = mpc(e.length, -e.theta)
            u = chi * mp.expj(mpf(k) * e.theta / 2) * mp.exp(-(s + 1) * e.length)
            ql = mp.exp(-lam)
            qr = mp.exp(-lam_bar)
            acc = mpc(0)
            for l in range(l_max + 1):
                for j in range(l + 1):
                    acc += mp.log(1 - u * ql ** j * qr ** (l - j))
            logs.append(e.multiplicity * acc)
        return _log_product(logs, bits)


def selberg_inner_tail(spectrum: LengthSpectrum, zeta: TwistPoint, k: int, s,
                       l_max: int):
    """Bound on the dropped inner tail of :func:`selberg_z` (log scale).

    Uses |log|1-z|| <= 2|z| for small z and the exact tail of
    sum_{l>l_max} (l+1) x^l with x = e^{-(Re s + 1 + 1) l(g)} ... conservative
    per-entry geometric estimate; finite only when Re(s) > 1.
    """
    _check_rank(spectrum, zeta)
    bits = zeta.precision_bits
    s = mpc(s)
    with workprec(bits):
        total = mpf(0)
        for e in spectrum.entries:
            x = mp.exp(-e.length)
            u = mp.exp(-(s.real + 1) * e.length)
            if x >= 1:
                return mpf("inf")
            head = x ** (l_max + 1) * ((l_max + 2) * (1 - x) + x) / (1 - x) ** 2
            total += e.multiplicity * 2 * u * head
        return total


def tail_bound(epsilon, s, truncation_length, counting_constant):
    """Certified bound for the dropped length tail of log R at real s.

    For s > 2 + epsilon and L >= 1, geodesics of length > L contribute at
    most ``4 C / (1 - e^{-epsilon^2/2}) * e^{L (2 + epsilon - s)}`` to
    |log R|, where C is the e^{2t} counting constant of the spectrum.
    """
    epsilon = mpf(epsilon)
    s = mpf(s)
    L = mpf(truncation_length)
    C = mpf(counting_constant)
    if epsilon <= 0:
        raise SpectrumError("epsilon must be positive")
    if s <= 2 + epsilon:
        raise SpectrumError("tail bound needs s > 2 + epsilon")
    if L < 1:
        raise SpectrumError("tail bound needs truncation length >= 1")
    if C < 0:
        raise SpectrumError("counting constant must be nonnegative")
    return 4 * C / (1 - mp.exp(-epsilon ** 2 / 2)) * mp.exp(L * (2 + epsilon - s))


@dataclass
class GrowthReport:
    constant: object
    threshold: float
    passed: bool
    worst_length: object


def growth_check(spectrum: LengthSpectrum, threshold=100.0) -> GrowthReport:
    """Smallest C with count(l <= t) <= C e^{2t} for all sampled t.

    The counting function only jumps at entry lengths, so the supremum of
    count * e^{-2t} is attained at an entry; an empty spectrum passes with
    C = 0.  C above ``threshold`` is flagged.
    """
    best = mpf(0)
    worst = None
    for length, count in spectrum.counting_function():
        c = count * mp.exp(-2 * length)
        if c > best:
            best = c
            worst = length
    return GrowthReport(constant=best, threshold=threshold,
                        passed=bool(best <= threshold), worst_length=worst)


@dataclass
class SeriesBoundReport:
    partial_sum: object
    tail_estimate: object
    total: object
    k_max: int


def series_bound_report(spectrum: LengthSpectrum, zeta: TwistPoint,
                        k_start=5, k_max=60) -> SeriesBoundReport:
    """Empirical constant for sum_{k>=5} |log |R_{chi,-k}(k/2)||.

    Partial sums run to ``k_max``; the dropped k-tail is bounded per entry by
    the geometric series 4 m e^{-k l / 2} (valid once e^{-k l/2} < 1/2, true
    for k > k_max on any spectrum this report is meant for).
    """
    _check_rank(spectrum, zeta)
    bits = zeta.precision_bits
    with workprec(bits):
        partial = mpf(0)
        for k in range(k_start, k_max + 1):
            logs = []
            for e in spectrum.entries:
                chi = zeta.character(e.alpha_class)
                lam = mpc(e.length, e.theta)
                z = chi * mp.exp(-mpf(k) * lam / 2)
                logs.append(e.multiplicity * mp.log(abs(1 - z)))
            partial += abs(pairwise_sum(logs, mpf(0)))
        tail = mpf(0)
        for e in spectrum.entries:
            x = mp.exp(-e.length / 2)
            tail += e.multiplicity * 4 * x ** (k_max + 1) / (1 - x)
        return SeriesBoundReport(partial_sum=partial, tail_estimate=tail,
                                 total=partial + tail, k_max=k_max)
