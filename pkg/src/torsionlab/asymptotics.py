"""Volume extraction, root-spectrum sums, Dehn-filling factors, cross-checks.

The growth law drives everything here: log |Delta^{alpha,n}(zeta)| grows like
(vol/4pi) n^2 with bounded drift, so a least-squares quadratic over the top
window of an n range recovers the volume, and the analogous normalization of
root-log sums recovers vol/2pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mp, mpf, mpc, workprec

from .alexander import DeltaEvaluator
from .representation import TwistPoint
from .zeta import LengthSpectrum, SpectrumError, ruelle_r


class AsymptoticsError(ValueError):
    pass


def quadratic_fit(points):
    """Least squares a x^2 + b x + c through (x, y) points.

    Returns ((a, b, c), max_abs_residual); plain normal equations solved by
    Gaussian elimination at mpf precision.
    """
    pts = [(mpf(x), mpf(y)) for x, y in points]
    if len(pts) < 3:
        raise AsymptoticsError("quadratic fit needs at least three points")
    s = [[mpf(0)] * 3 for _ in range(3)]
    rhs = [mpf(0)] * 3
    for x, y in pts:
        row = (x * x, x, mpf(1))
        for i in range(3):
            for j in range(3):
                s[i][j] += row[i] * row[j]
            rhs[i] += row[i] * y
    aug = [s[i] + [rhs[i]] for i in range(3)]
    for k in range(3):
        piv = max(range(k, 3), key=lambda i: abs(aug[i][k]))
        if abs(aug[piv][k]) == 0:
            raise AsymptoticsError("singular normal equations in quadratic fit")
        aug[k], aug[piv] = aug[piv], aug[k]
        for i in range(k + 1, 3):
            lam = aug[i][k] / aug[k][k]
            for j in range(k, 4):
                aug[i][j] -= lam * aug[k][j]
    coeffs = [mpf(0)] * 3
    for i in (2, 1, 0):
        coeffs[i] = (aug[i][3] - sum(aug[i][j] * coeffs[j] for j in range(i + 1, 3))) / aug[i][i]
    a, b, c = coeffs
    resid = max(abs(y - (a * x * x + b * x + c)) for x, y in pts)
    return (a, b, c), resid


@dataclass
class VolumeEstimate:
    samples: list  # (n, zeta_index, log_modulus)
    coefficients: tuple  # (a, b, c)
    volume_estimate: object
    window: int
    fit_residual: object


def volume_sequence(presentation, rho, alpha, zeta: TwistPoint, n_range,
                    peripheral=None) -> VolumeEstimate:
    """log|Delta^{alpha,n}(zeta)| over n, with the n^2 fit and 4*pi*a.

    The fit window is the top half of the range (at least 4 points); ranges
    too short to support that window are rejected.
    """
    ns = sorted(set(int(n) for n in n_range))
    if any(n < 2 for n in ns):
        raise AsymptoticsError("n_range must lie in [2, n_max]")
    window = max(4, len(ns) // 2)
    if window > len(ns):
        raise AsymptoticsError(
            "n_range of length %d cannot support the fit window" % len(ns))
    ev = DeltaEvaluator(presentation, rho, alpha, peripheral)
    samples = []
    with workprec(rho.precision_bits):
        for n in ns:
            value = ev.modulus_at(n, zeta)
            if value <= 0:
                raise AsymptoticsError("vanishing modulus at n = %d" % n)
            samples.append((n, 0, mp.log(value)))
    tail = samples[-window:]
    coeffs, resid = quadratic_fit([(n, y) for n, _, y in tail])
    return VolumeEstimate(
        samples=samples,
        coefficients=coeffs,
        volume_estimate=4 * mp.pi * coeffs[0],
        window=window,
        fit_residual=resid,
    )


def unit_circle_margin(roots):
    """min over roots of ||root| - 1|; +inf sentinel for an empty multiset.

    A zero margin flags a root on the unit circle.
    """
    margin = mpf("inf")
    for r in roots:
        margin = min(margin, abs(abs(mpc(r)) - 1))
    return margin


def root_log_sum(roots, n, zero_threshold=mpf("1e-30")):
    """(sum of |log|root||, sum / n^2); roots at 0 are upstream errors."""
    if n < 1:
        raise AsymptoticsError("n must be positive")
    total = mpf(0)
    for r in roots:
        a = abs(mpc(r))
        if a <= zero_threshold:
            raise AsymptoticsError(
                "root at the origin: monomial factor should have been stripped")
        total += abs(mp.log(a))
    return total, total / mpf(n) ** 2


@dataclass
class DehnFillingFactor:
    n: int
    complex_lengths: list
    meridian_characters: list
    value: object  # mpc


def dehn_filling_factor(n, complex_lengths, meridian_characters,
                        triviality_flags=None) -> DehnFillingFactor:
    """The torsion correction factor of a closed Dehn filling.

    Per cusp j the factor is prod_{k=0}^{n-1}
    (e^{lambda_j (n-1-2k)/2} chi(m_j) - 1); when n is odd a chi-trivial cusp
    skips the k with 2k = n - 1 (that factor would vanish identically).
    """
    if n < 1:
        raise AsymptoticsError("n must be >= 1")
    lams = [mpc(l) for l in complex_lengths]
    chis = [mpc(c) for c in meridian_characters]
    if len(lams) != len(chis):
        raise AsymptoticsError("one meridian character per cusp required")
    if triviality_flags is None:
        triviality_flags = [abs(c - 1) == 0 for c in chis]
    if len(triviality_flags) != len(lams):
        raise AsymptoticsError("one triviality flag per cusp required")
    for lam in lams:
        if lam.real <= 0:
            raise AsymptoticsError("complex lengths need positive real part")
    value = mpc(1)
    for lam, chi, trivial in zip(lams, chis, triviality_flags):
        for k in range(n):
            if n % 2 == 1 and trivial and 2 * k == n - 1:
                continue
            value *= mp.exp(lam * (n - 1 - 2 * k) / 2) * chi - 1
    return DehnFillingFactor(n=n, complex_lengths=lams,
                             meridian_characters=chis, value=value)


def mueller_sum(spectrum: LengthSpectrum, zeta: TwistPoint, m: int, parity: str):
    """The truncated Ruelle sum in the torsion-quotient formulas.

    even: sum_{k=2}^{m-1} log|R_{chi,-2k-1}(k + 1/2)|
    odd:  sum_{k=3}^{m}   log|R_{chi,-2k}(k)|
    """
    with workprec(zeta.precision_bits):
        total = mpf(0)
        if parity == "even":
            ks = range(2, m)
            for k in ks:
                total += mp.log(abs(ruelle_r(spectrum, zeta, -(2 * k + 1),
                                             mpf(k) + mpf(1) / 2)))
        elif parity == "odd":
            for k in range(3, m + 1):
                total += mp.log(abs(ruelle_r(spectrum, zeta, -2 * k, mpf(k))))
        else:
            raise AsymptoticsError("parity must be 'even' or 'odd'")
        return total


def mueller_rhs(spectrum: LengthSpectrum, zeta: TwistPoint, volume, m: int,
                parity: str):
    """Volume term minus truncated Ruelle sum for the torsion quotient."""
    volume = mpf(volume)
    if m < 2:
        raise AsymptoticsError("m must be >= 2")
    with workprec(zeta.precision_bits):
        if parity == "even":
            vol_term = volume / mp.pi * (m - 2) * (m + 2)
        elif parity == "odd":
            vol_term = volume / mp.pi * (m - 2) * (m + 3)
        else:
            raise AsymptoticsError("parity must be 'even' or 'odd'")
        return vol_term - mueller_sum(spectrum, zeta, m, parity)


def rational_corollary_residual(presentation, rho, alpha, zeta: TwistPoint,
                                spectrum: LengthSpectrum, volume, m: int,
                                parity: str, peripheral=None,
                                lhs_log_ratio=None):
    """|LHS - RHS| for the torsion-quotient identity at a rational twist.

    LHS is log |Delta^{alpha,n}(zeta) / Delta^{alpha,base}(zeta)| with
    (n, base) = (2m, 4) in the even case and (2m+1, 5) in the odd case; RHS
    is the truncated-spectrum volume/Ruelle expression.  A precomputed LHS
    can be passed for synthetic self-consistency runs.
    """
    if spectrum.rank != alpha.rank:
        raise SpectrumError("spectrum rank mismatch with alpha")
    with workprec(zeta.precision_bits):
        if lhs_log_ratio is None:
            ev = DeltaEvaluator(presentation, rho, alpha, peripheral)
            if parity == "even":
                hi, lo = 2 * m, 4
            elif parity == "odd":
                hi, lo = 2 * m + 1, 5
            else:
                raise AsymptoticsError("parity must be 'even' or 'odd'")
            lhs_log_ratio = mp.log(ev.modulus_at(hi, zeta)) - \
                mp.log(ev.modulus_at(lo, zeta))
        rhs = mueller_rhs(spectrum, zeta, volume, m, parity)
        return abs(mpf(lhs_log_ratio) - rhs)
