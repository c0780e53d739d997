"""Arbitrary-precision complex linear algebra and Laurent polynomials.

Scalars are mpmath complex numbers (``mpc``) backed by gmpy when available;
the working precision in bits travels with the containers
(:class:`ComplexMatrix`, :class:`LaurentPolynomial`) and every operation runs
under ``mp.workprec`` of the relevant container.  Reductions use a fixed
pairwise order so results are identical run to run.

Zero thresholds follow one convention throughout: an entry counts as zero
when it is below ``2^(32 - precision_bits)`` times the max norm of its
container, which leaves 32 guard bits.
"""

from __future__ import annotations

import hashlib

from mpmath import mp, mpf, mpc, workprec

DEFAULT_PRECISION = 256


class NumericsError(ValueError):
    pass


class RootFindingError(RuntimeError):
    """Aberth iteration did not reach the residual target; carries residuals."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or []


def pairwise_sum(values, zero=None):
    """Sum with a fixed balanced pairwise tree (deterministic, stable)."""
    vals = list(values)
    if not vals:
        return mpf(0) if zero is None else zero
    while len(vals) > 1:
        nxt = []
        for i in range(0, len(vals) - 1, 2):
            nxt.append(vals[i] + vals[i + 1])
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def seeded_rotation(*tokens) -> float:
    """Deterministic pseudo-random angle in (0, 2pi) from a hash of tokens.

    Used to rotate interpolation nodes off arithmetically special points
    such as t = 1.
    """
    h = hashlib.sha256("|".join(str(t) for t in tokens).encode()).digest()
    frac = int.from_bytes(h[:8], "big") / 2.0 ** 64
    # keep away from 0 so the rotation never degenerates to the identity
    return 0.1 + 6.0 * frac


class ComplexMatrix:
    """Dense row-major matrix of mpc entries with a fixed working precision."""

    __slots__ = ("rows", "cols", "entries", "precision_bits")

    def __init__(self, rows, cols, entries, precision_bits=DEFAULT_PRECISION):
        if rows <= 0 or cols <= 0:
            raise NumericsError("matrix dimensions must be positive")
        entries = list(entries)
        if len(entries) != rows * cols:
            raise NumericsError(
                "expected %d entries, got %d" % (rows * cols, len(entries))
            )
        self.rows = rows
        self.cols = cols
        with workprec(precision_bits):
            self.entries = [mpc(e) for e in entries]
        self.precision_bits = precision_bits

    @classmethod
    def identity(cls, n, precision_bits=DEFAULT_PRECISION):
        return cls(
            n, n,
            [mpc(1) if i == j else mpc(0) for i in range(n) for j in range(n)],
            precision_bits,
        )

    @classmethod
    def from_rows(cls, rows, precision_bits=DEFAULT_PRECISION):
        rows = [list(r) for r in rows]
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise NumericsError("ragged rows")
        flat = [x for r in rows for x in r]
        return cls(len(rows), ncols, flat, precision_bits)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def __mul__(self, other):
        if self.cols != other.rows:
            raise NumericsError("dimension mismatch in matrix product")
        bits = max(self.precision_bits, other.precision_bits)
        with workprec(bits):
            a, b = self.entries, other.entries
            n, k, m = self.rows, self.cols, other.cols
            out = [mpc(0)] * (n * m)
            for i in range(n):
                arow = a[i * k:(i + 1) * k]
                orow = out
                base = i * m
                for p in range(k):
                    av = arow[p]
                    if av:
                        brow = b[p * m:(p + 1) * m]
                        for j in range(m):
                            orow[base + j] += av * brow[j]
        return ComplexMatrix(n, m, out, bits)

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise NumericsError("dimension mismatch in matrix sum")
        bits = max(self.precision_bits, other.precision_bits)
        with workprec(bits):
            out = [x + y for x, y in zip(self.entries, other.entries)]
        return ComplexMatrix(self.rows, self.cols, out, bits)

    def scale(self, s):
        with workprec(self.precision_bits):
            out = [s * x for x in self.entries]
        return ComplexMatrix(self.rows, self.cols, out, self.precision_bits)

    def max_norm(self):
        return max(abs(x) for x in self.entries)

    def trace(self):
        if self.rows != self.cols:
            raise NumericsError("trace of non-square matrix")
        with workprec(self.precision_bits):
            return pairwise_sum([self[i, i] for i in range(self.rows)], mpc(0))

    def inverse2(self):
        """Inverse of a 2x2 matrix with determinant 1 (adjugate)."""
        if (self.rows, self.cols) != (2, 2):
            raise NumericsError("inverse2 needs a 2x2 matrix")
        a, b, c, d = self.entries
        return ComplexMatrix(2, 2, [d, -b, -c, a], self.precision_bits)

    def __repr__(self):
        return "ComplexMatrix(%dx%d @ %d bits)" % (self.rows, self.cols, self.precision_bits)


def zero_threshold(precision_bits, scale):
    return mpf(2) ** (32 - precision_bits) * scale


def determinant(m: ComplexMatrix) -> mpc:
    """Determinant by LU with partial pivoting at the matrix's precision.

    Returns an exact complex zero when a pivot column falls entirely below
    the guard-bit threshold.
    """
    if m.rows != m.cols:
        raise NumericsError("determinant of non-square matrix")
    n = m.rows
    with workprec(m.precision_bits):
        a = [m.row(i) for i in range(n)]
        scale = m.max_norm()
        if scale == 0:
            return mpc(0)
        tiny = zero_threshold(m.precision_bits, scale)
        det = mpc(1)
        for k in range(n):
            piv = max(range(k, n), key=lambda i: abs(a[i][k]))
            if abs(a[piv][k]) <= tiny:
                return mpc(0)
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                det = -det
            det *= a[k][k]
            akk = a[k][k]
            arow = a[k]
            for i in range(k + 1, n):
                lam = a[i][k] / akk
                if lam:
                    row = a[i]
                    for j in range(k + 1, n):
                        row[j] -= lam * arow[j]
        return det


class LaurentPolynomial:
    """Univariate complex Laurent polynomial, dense ascending coefficients."""

    __slots__ = ("min_exponent", "coefficients", "precision_bits")

    def __init__(self, min_exponent, coefficients, precision_bits=DEFAULT_PRECISION,
                 prune=True):
        with workprec(precision_bits):
            coeffs = [mpc(c) for c in coefficients]
        self.precision_bits = precision_bits
        if prune:
            top = max((abs(c) for c in coeffs), default=mpf(0))
            if top > 0:
                tiny = zero_threshold(precision_bits, top)
                while coeffs and abs(coeffs[-1]) <= tiny:
                    coeffs.pop()
                while coeffs and abs(coeffs[0]) <= tiny:
                    coeffs.pop(0)
                    min_exponent += 1
        self.min_exponent = int(min_exponent)
        self.coefficients = coeffs

    @classmethod
    def constant(cls, value, precision_bits=DEFAULT_PRECISION):
        return cls(0, [mpc(value)], precision_bits)

    @property
    def is_zero(self):
        return not self.coefficients

    @property
    def max_exponent(self):
        return self.min_exponent + len(self.coefficients) - 1

    @property
    def span(self):
        return len(self.coefficients) - 1 if self.coefficients else 0

    def leading_coefficient(self):
        if self.is_zero:
            raise NumericsError("zero polynomial has no leading coefficient")
        return self.coefficients[-1]

    def max_norm(self):
        return max((abs(c) for c in self.coefficients), default=mpf(0))

    def __call__(self, t):
        with workprec(self.precision_bits):
            t = mpc(t)
            acc = mpc(0)
            for c in reversed(self.coefficients):
                acc = acc * t + c
            if self.min_exponent:
                acc *= t ** self.min_exponent
            return acc

    def __mul__(self, other):
        if isinstance(other, LaurentPolynomial):
            bits = max(self.precision_bits, other.precision_bits)
            if self.is_zero or other.is_zero:
                return LaurentPolynomial(0, [], bits)
            with workprec(bits):
                out = [mpc(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
                for i, a in enumerate(self.coefficients):
                    if a:
                        for j, b in enumerate(other.coefficients):
                            out[i + j] += a * b
            return LaurentPolynomial(self.min_exponent + other.min_exponent, out, bits)
        with workprec(self.precision_bits):
            return LaurentPolynomial(
                self.min_exponent,
                [mpc(other) * c for c in self.coefficients],
                self.precision_bits,
            )

    def divide_exact(self, den: "LaurentPolynomial"):
        """Coefficient-space division ``self / den``.

        Returns ``(quotient, remainder_norm)`` where ``remainder_norm`` is the
        max-norm of the leftover low-order part relative to the numerator's
        max-norm.  A numerator that is genuinely divisible gives a remainder
        at roundoff level.
        """
        if den.is_zero:
            raise NumericsError("division by zero polynomial")
        bits = max(self.precision_bits, den.precision_bits)
        if self.is_zero:
            return LaurentPolynomial(0, [], bits), mpf(0)
        with workprec(bits):
            num = list(self.coefficients)
            d = list(den.coefficients)
            dd = len(d) - 1
            scale = max(abs(c) for c in num)
            if len(num) < len(d):
                return LaurentPolynomial(0, [], bits), mpf(1)
            lead = d[dd]
            q = [mpc(0)] * (len(num) - dd)
            for k in range(len(num) - dd - 1, -1, -1):
                c = num[k + dd] / lead
                q[k] = c
                if c:
                    for i in range(dd + 1):
                        num[k + i] -= c * d[i]
            rem = max((abs(c) for c in num[:dd]), default=mpf(0))
            rel = rem / scale if scale > 0 else mpf(0)
        return (
            LaurentPolynomial(self.min_exponent - den.min_exponent, q, bits),
            rel,
        )

    def unit_normalized(self):
        """Representative with min exponent 0 and leading coefficient argument
        in (-pi/2, pi/2] (so polynomials equal up to +-t^m compare stably)."""
        if self.is_zero:
            return LaurentPolynomial(0, [], self.precision_bits)
        lead = self.coefficients[-1]
        flip = lead.real < 0 or (lead.real == 0 and lead.imag < 0)
        coeffs = [-c for c in self.coefficients] if flip else list(self.coefficients)
        return LaurentPolynomial(0, coeffs, self.precision_bits)

    def ordinary_part(self):
        """Coefficients with the monomial factor stripped (min exponent -> 0)."""
        return LaurentPolynomial(0, list(self.coefficients), self.precision_bits)

    def __repr__(self):
        return "LaurentPolynomial(min_exp=%d, span=%d @ %d bits)" % (
            self.min_exponent, self.span, self.precision_bits)


def interpolate_on_rotated_roots_of_unity(values, node_rotation, exponent_offset,
                                          precision_bits=DEFAULT_PRECISION):
    """Recover a Laurent polynomial from samples at rotated roots of unity.

    ``values[j]`` must be the sample at ``exp(i*node_rotation) * zeta_N^j``
    of a Laurent polynomial whose exponents lie in
    ``[exponent_offset, exponent_offset + N)``.  Inverse DFT at the rotated
    nodes, then shift by ``exponent_offset``.
    """
    n = len(values)
    if n == 0:
        raise NumericsError("need at least one interpolation node")
    with workprec(precision_bits):
        rot = mp.expj(mpf(node_rotation))
        tau = [mp.expjpi(2 * mpf(j) / n) for j in range(n)]  # zeta_N^j
        vals = [mpc(v) for v in values]
        if exponent_offset:
            vals = [v / (rot * tau[j]) ** exponent_offset for j, v in enumerate(vals)]
        coeffs = []
        inv_n = mpf(1) / n
        for k in range(n):
            terms = [vals[j] * tau[(-j * k) % n] for j in range(n)]
            coeffs.append(pairwise_sum(terms, mpc(0)) * inv_n / rot ** k)
    return LaurentPolynomial(exponent_offset, coeffs, precision_bits)


def _aberth_initial(coeffs, precision_bits):
    """Initial root guesses on circles with radii from coefficient bounds.

    Radii follow the upper convex hull of (i, log|c_i|): each hull segment
    contributes its slope as a cluster radius, which keeps wildly scaled
    coefficients well conditioned; angles are evenly spread with a fixed
    irrational offset.
    """
    d = len(coeffs) - 1
    with workprec(precision_bits):
        # interior zero coefficients can never lie on the upper hull
        logs = [(i, mp.log(abs(c))) for i, c in enumerate(coeffs) if abs(c) > 0]
        hull = []
        for pt in logs:
            while len(hull) >= 2:
                (x1, y1), (x2, y2) = hull[-2], hull[-1]
                if (y2 - y1) * (pt[0] - x1) <= (pt[1] - y1) * (x2 - x1):
                    hull.pop()
                else:
                    break
            hull.append(pt)
        guesses = []
        offset = mpf("0.4")
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            radius = mp.exp((y1 - y2) / (x2 - x1))
            count = x2 - x1
            for k in range(count):
                ang = 2 * mp.pi * (len(guesses) + offset) / d
                guesses.append(radius * mp.expj(ang))
        return guesses


def polynomial_roots(p: LaurentPolynomial, max_iterations=400):
    """All roots of the ordinary-polynomial part of ``p`` (monomial stripped).

    Aberth-Ehrlich simultaneous iteration; each returned root ``z`` satisfies
    ``|p(z)| <= 2^(-precision_bits/2) * max|coeff| * max(1,|z|)^deg`` (the
    natural scaling of the stated residual target for roots outside the unit
    disk).  Degree zero returns an empty list.
    """
    if p.is_zero:
        raise NumericsError("root finding needs a nonzero polynomial")
    coeffs = list(p.coefficients)
    d = len(coeffs) - 1
    if d == 0:
        return []
    bits = p.precision_bits
    with workprec(bits + 64):
        norm = max(abs(c) for c in coeffs)
        coeffs = [c / norm for c in coeffs]
        tol = mpf(2) ** (-(bits // 2))

        def horner_both(z):
            pv = coeffs[d]
            dv = mpc(0)
            for c in reversed(coeffs[:-1]):
                dv = dv * z + pv
                pv = pv * z + c
            return pv, dv

        def residual_ok(z, pv):
            return abs(pv) <= tol * max(mpf(1), abs(z)) ** d

        zs = _aberth_initial(coeffs, bits + 64)
        converged = [False] * d
        for _ in range(max_iterations):
            done = True
            pvals = []
            for k in range(d):
                pv, dv = horner_both(zs[k])
                pvals.append(pv)
                if converged[k] or residual_ok(zs[k], pv):
                    converged[k] = True
                    continue
                done = False
                if dv == 0:
                    zs[k] = zs[k] * mpc(1, mpf(2) ** (-bits // 3))
                    continue
                newton = pv / dv
                s = mpc(0)
                zk = zs[k]
                for j in range(d):
                    if j != k:
                        diff = zk - zs[j]
                        if diff:
                            s += 1 / diff
                denomin = 1 - newton * s
                if denomin == 0:
                    zs[k] = zk - newton
                else:
                    zs[k] = zk - newton / denomin
            if done:
                break
        else:
            resid = [abs(horner_both(z)[0]) for z in zs]
            raise RootFindingError(
                "Aberth iteration failed to converge within %d sweeps" % max_iterations,
                residuals=[mp.nstr(r, 8) for r in resid],
            )
        # two Newton polish steps tighten simple roots far below the contract
        for k in range(d):
            for _ in range(2):
                pv, dv = horner_both(zs[k])
                if dv == 0:
                    break
                zs[k] = zs[k] - pv / dv
        return [mpc(z) for z in zs]
