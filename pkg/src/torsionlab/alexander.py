"""Wada's determinant quotient and the normalized twisted polynomial.

For a deficiency-1 presentation the (g-1) x g block matrix of Fox
derivatives, pushed through ``abar (x) rho_n``, drops one column; the
quotient of the remaining determinant by ``det Phi(x_j - 1)`` is the Wada
invariant.  The normalized polynomial divides additionally by
``prod_i (t^{alpha(m_i)} - 1)`` when n is odd, one factor per cusp, which is
exactly the normalization that makes the odd quotient a Laurent polynomial
with nonzero value at t = 1.

Full coefficient vectors are produced only in the rank-1 case, by evaluating
the determinants on a rotated unit circle and interpolating; higher-rank
twists are evaluated pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf, mpc, workprec

from .fpgroup import GroupPresentation, fox_derivative
from .numerics import (
    ComplexMatrix,
    LaurentPolynomial,
    determinant,
    interpolate_on_rotated_roots_of_unity,
    seeded_rotation,
)
from .representation import (
    AlphaMap,
    HolonomyLift,
    PeripheralData,
    RepresentationError,
    TwistPoint,
)

GUARD_NODES = 8
PROBE_ANGLE = 0.5547001962252291  # fixed generic rotation of 1 for column choice


class AlexanderError(ValueError):
    pass


class DegenerateColumnError(AlexanderError):
    """Every column gives an (effectively) zero denominator."""


class RemovableSingularityError(AlexanderError):
    """Pointwise quotient is 0/0 at this twist and no polynomial fallback exists."""


@dataclass
class TwistedAlexResult:
    polynomial: LaurentPolynomial
    normalization: str  # "even" or "odd-divided"
    removed_column: int
    laurentness_residual: object
    n: int
    r: int


class _Pipeline:
    """Per-(presentation, lift, n, alpha) compiled Fox data.

    For every relator and generator, stores the prefix contributions
    ``(sign, alpha_vector, rho_n(prefix))`` so that assembling the big matrix
    at a node costs one scalar-matrix update per prefix.
    """

    def __init__(self, presentation: GroupPresentation, rho: HolonomyLift,
                 n: int, alpha: AlphaMap):
        if presentation.deficiency != 1:
            raise AlexanderError(
                "Wada pipeline needs deficiency 1, got %d" % presentation.deficiency
            )
        if n < 1:
            raise AlexanderError("n must be >= 1")
        self.presentation = presentation
        self.rho = rho
        self.n = n
        self.alpha = alpha
        self.bits = rho.precision_bits
        g = presentation.generator_count
        self.generator_alphas = [
            tuple(alpha.exponents[j]) for j in range(g)
        ]
        self.contribs = [[[] for _ in range(g)] for _ in presentation.relators]
        with workprec(self.bits):
            for i, rel in enumerate(presentation.relators):
                prefix_mat = ComplexMatrix.identity(n, self.bits)
                prefix_alpha = tuple([0] * alpha.rank)
                for gidx, e in rel.letters:
                    step = rho.sym_generator(gidx, n, inverse=(e == -1))
                    arow = alpha.exponents[gidx]
                    if e == 1:
                        self.contribs[i][gidx].append((1, prefix_alpha, prefix_mat))
                        prefix_mat = prefix_mat * step
                        prefix_alpha = tuple(
                            p + a for p, a in zip(prefix_alpha, arow))
                    else:
                        prefix_mat = prefix_mat * step
                        prefix_alpha = tuple(
                            p - a for p, a in zip(prefix_alpha, arow))
                        self.contribs[i][gidx].append((-1, prefix_alpha, prefix_mat))

    # -- denominators ------------------------------------------------------

    def denominator_at(self, column, char_value):
        """det(chi(x_j) * rho_n(x_j) - I) for a scalar character value."""
        n = self.n
        with workprec(self.bits):
            mat = self.rho.sym_generator(column, n)
            ent = [char_value * v for v in mat.entries]
            for i in range(n):
                ent[i * n + i] -= 1
            return determinant(ComplexMatrix(n, n, ent, self.bits))

    def denominator_scale(self, column):
        with workprec(self.bits):
            nrm = self.rho.sym_generator(column, self.n).max_norm()
            return max(mpf(1), nrm) ** self.n

    def choose_column(self, removed_column=None):
        """Column with the largest |det Phi(x_j - 1)| at the fixed probe point.

        Near-ties break toward the last generator, which keeps knot-table
        conventions in the classical examples.
        """
        g = self.presentation.generator_count
        if removed_column is not None:
            if not 0 <= removed_column < g:
                raise AlexanderError("removed column out of range")
            return removed_column
        with workprec(self.bits):
            probe = mp.expj(mpf(PROBE_ANGLE))
            eps = mpf(2) ** (-(self.bits // 2))
            best, best_val = None, None
            for j in range(g):
                chi = mpc(1)
                for comp in self.generator_alphas[j]:
                    if comp:
                        chi *= probe ** comp
                val = abs(self.denominator_at(j, chi))
                if best is None or val > best_val * (1 + eps):
                    best, best_val = j, val
                elif val > best_val * (1 - eps):
                    best = j  # tie: prefer the later column
            scale = max(self.denominator_scale(j) for j in range(g))
            if best_val <= eps * scale:
                raise DegenerateColumnError(
                    "every column has numerically zero denominator at the probe point"
                )
            return best

    # -- numerator assembly --------------------------------------------------

    def kept_columns(self, removed):
        return [j for j in range(self.presentation.generator_count) if j != removed]

    def numerator_at(self, removed, char_of):
        """Numerator determinant with ``char_of(alpha_vector) -> scalar``."""
        n = self.n
        kept = self.kept_columns(removed)
        size = n * len(kept)
        with workprec(self.bits):
            flat = [mpc(0)] * (size * size)
            for bi in range(len(self.contribs)):
                for bj, col in enumerate(kept):
                    base_r = bi * n
                    base_c = bj * n
                    for sign, avec, mat in self.contribs[bi][col]:
                        s = char_of(avec) if sign == 1 else -char_of(avec)
                        ent = mat.entries
                        for r in range(n):
                            dst = (base_r + r) * size + base_c
                            src = r * n
                            for c in range(n):
                                flat[dst + c] += s * ent[src + c]
            return determinant(ComplexMatrix(size, size, flat, self.bits))

    def scalar_char_maker(self, z):
        """Rank-1 character cache: alpha vector -> z^e."""
        powers = {}

        def char_of(avec):
            e = avec[0]
            hit = powers.get(e)
            if hit is None:
                hit = z ** e
                powers[e] = hit
            return hit
        return char_of

    # -- rank-1 exponent window ------------------------------------------------

    def numerator_window(self, removed):
        """Exponent bounds for the rank-1 numerator determinant.

        Each of the n scalar rows in block row i draws its exponent from the
        prefix exponents of row i's kept-column entries, so the determinant's
        exponents lie in n * [sum of row minima, sum of row maxima].
        """
        kept = self.kept_columns(removed)
        lo = hi = 0
        for bi in range(len(self.contribs)):
            exps = [avec[0]
                    for col in kept
                    for (_, avec, _) in self.contribs[bi][col]]
            if not exps:
                raise DegenerateColumnError(
                    "block row %d is identically zero" % bi)
            lo += min(exps)
            hi += max(exps)
        return self.n * lo, self.n * hi

    # -- full rank-1 computation ------------------------------------------------

    def wada(self, removed_column=None, division_tolerance=None):
        """Return (quotient or (num, den) for n = 1, removed, remainder)."""
        if self.alpha.rank != 1:
            raise AlexanderError("full polynomials are computed only for rank 1")
        bits = self.bits
        n = self.n
        if division_tolerance is None:
            division_tolerance = mpf(2) ** (-(bits // 4))
        removed = self.choose_column(removed_column)

        lo, hi = self.numerator_window(removed)
        count = (hi - lo) + 1 + GUARD_NODES
        rotation = seeded_rotation(
            self.presentation.generator_names,
            [r.letters for r in self.presentation.relators],
            self.alpha.exponents, n, "wada-nodes",
        )
        with workprec(bits):
            rot = mp.expj(mpf(rotation))
            nodes = [rot * mp.expjpi(2 * mpf(j) / count) for j in range(count)]
            values = [self.numerator_at(removed, self.scalar_char_maker(z))
                      for z in nodes]
        numerator = interpolate_on_rotated_roots_of_unity(values, rotation, lo, bits)

        a_j = self.generator_alphas[removed][0]
        if a_j == 0:
            with workprec(bits):
                const = self.denominator_at(removed, mpc(1))
            denominator = LaurentPolynomial(0, [const], bits)
        else:
            dcount = abs(a_j) * n + 1 + 4
            with workprec(bits):
                rot = mp.expj(mpf(rotation))
                dnodes = [rot * mp.expjpi(2 * mpf(j) / dcount) for j in range(dcount)]
                dvalues = [self.denominator_at(removed, z ** a_j) for z in dnodes]
            denominator = interpolate_on_rotated_roots_of_unity(
                dvalues, rotation, min(0, a_j * n), bits)

        if denominator.is_zero:
            raise DegenerateColumnError("denominator interpolated to zero")
        if n == 1:
            return (numerator, denominator), removed, mpf(0)
        quotient, remainder = numerator.divide_exact(denominator)
        if remainder > division_tolerance:
            raise AlexanderError(
                "Wada division remainder %s exceeds tolerance; inconsistent "
                "presentation/representation/alpha data" % mp.nstr(remainder, 6)
            )
        return quotient.unit_normalized(), removed, remainder


def _peripheral_polynomial(alpha: AlphaMap, peripheral: PeripheralData, bits):
    """prod_i (t^{alpha(m_i)} - 1) as a rank-1 Laurent polynomial."""
    poly = LaurentPolynomial.constant(1, bits)
    for m, _ in peripheral.cusps:
        a = alpha.scalar_of_word(m)
        if a == 0:
            raise RepresentationError("meridian with alpha = 0")
        if a > 0:
            factor = LaurentPolynomial(0, [-1] + [0] * (a - 1) + [1], bits)
        else:
            factor = LaurentPolynomial(a, [1] + [0] * (-a - 1) + [-1], bits)
        poly = poly * factor
    return poly


class DeltaEvaluator:
    """Reusable handle for repeated Delta computations over one input set.

    Caches the compiled Fox pipeline and the interpolated polynomial per n,
    which matters when scanning n ranges or many twist points.
    """

    def __init__(self, presentation: GroupPresentation, rho: HolonomyLift,
                 alpha: AlphaMap, peripheral: PeripheralData = None):
        self.presentation = presentation
        self.rho = rho
        self.alpha = alpha
        self.peripheral = peripheral
        if peripheral is not None:
            peripheral.validate(alpha)
        self._pipes = {}
        self._polys = {}

    def pipeline(self, n) -> _Pipeline:
        pipe = self._pipes.get(n)
        if pipe is None:
            pipe = _Pipeline(self.presentation, self.rho, n, self.alpha)
            self._pipes[n] = pipe
        return pipe

    def polynomial(self, n, removed_column=None, division_tolerance=None) -> TwistedAlexResult:
        key = (n, removed_column)
        hit = self._polys.get(key)
        if hit is not None:
            return hit
        result = self._normalized(n, removed_column, division_tolerance)
        self._polys[key] = result
        return result

    def _normalized(self, n, removed_column=None, division_tolerance=None):
        if n < 2:
            raise AlexanderError("normalized polynomial defined for n >= 2")
        pipe = self.pipeline(n)
        quotient, removed, wada_rem = pipe.wada(removed_column, division_tolerance)
        bits = pipe.bits
        if division_tolerance is None:
            division_tolerance = mpf(2) ** (-(bits // 4))
        if n % 2 == 0:
            return TwistedAlexResult(
                polynomial=quotient, normalization="even", removed_column=removed,
                laurentness_residual=wada_rem, n=n, r=self.alpha.rank)
        if self.peripheral is None:
            raise AlexanderError("odd n needs peripheral meridian data")
        divisor = _peripheral_polynomial(self.alpha, self.peripheral, bits)
        final, residual = quotient.divide_exact(divisor)
        if residual > division_tolerance:
            raise AlexanderError(
                "odd-n peripheral division remainder %s exceeds tolerance; "
                "inconsistent input" % mp.nstr(residual, 6)
            )
        return TwistedAlexResult(
            polynomial=final.unit_normalized(), normalization="odd-divided",
            removed_column=removed, laurentness_residual=residual,
            n=n, r=self.alpha.rank)

    def modulus_at(self, n, zeta: TwistPoint):
        """|Delta^{alpha,n}(zeta)| by pointwise quotient with column retries."""
        if zeta.rank != self.alpha.rank:
            raise RepresentationError("rank mismatch between alpha and zeta")
        if n < 2:
            raise AlexanderError("pointwise evaluation defined for n >= 2")
        pipe = self.pipeline(n)
        bits = pipe.bits
        with workprec(bits):
            tiny = mpf(2) ** (-(bits // 2))

            def char_of(avec):
                return zeta.character(avec)

            peripheral_factor = mpf(1)
            degenerate = False
            if n % 2 == 1:
                if self.peripheral is None:
                    raise AlexanderError("odd n needs peripheral meridian data")
                for m, _ in self.peripheral.cusps:
                    f = abs(zeta.character(self.alpha.of_word(m)) - 1)
                    if f <= tiny:
                        degenerate = True
                        break
                    peripheral_factor *= f

            if not degenerate:
                g = self.presentation.generator_count
                candidates = []
                for j in range(g):
                    chi = zeta.character(pipe.generator_alphas[j])
                    den = pipe.denominator_at(j, chi)
                    candidates.append((abs(den), j, den))
                candidates.sort(key=lambda item: (-item[0], item[1]))
                for mag, j, den in candidates:
                    if mag > tiny * pipe.denominator_scale(j):
                        num = pipe.numerator_at(j, char_of)
                        return abs(num / den) / peripheral_factor
                degenerate = True

            if self.alpha.rank != 1:
                raise RemovableSingularityError(
                    "all columns degenerate at zeta and no rank-1 polynomial fallback"
                )
            result = self.polynomial(n)
            return abs(result.polynomial(zeta.values[0]))


def wada_polynomial(presentation: GroupPresentation, rho: HolonomyLift, n: int,
                    alpha: AlphaMap, removed_column=None, division_tolerance=None):
    """Wada's twisted Alexander quotient for a rank-1 alpha.

    Returns the unit-normalized Laurent polynomial for n >= 2 and the raw
    rational pair (numerator, denominator) for n = 1, where the quotient is
    genuinely rational.
    """
    pipe = _Pipeline(presentation, rho, n, alpha)
    result, _, _ = pipe.wada(removed_column, division_tolerance)
    return result


def normalized_delta(presentation: GroupPresentation, rho: HolonomyLift, n: int,
                     alpha: AlphaMap, peripheral: PeripheralData = None,
                     removed_column=None, division_tolerance=None) -> TwistedAlexResult:
    """The normalized twisted Alexander polynomial for a rank-1 alpha.

    Even n returns the Wada quotient unchanged; odd n divides by one factor
    ``t^{alpha(m_i)} - 1`` per cusp (peripheral data required), recording the
    relative division remainder, which certifies Laurent-ness.
    """
    ev = DeltaEvaluator(presentation, rho, alpha, peripheral)
    return ev.polynomial(n, removed_column, division_tolerance)


def evaluate_delta_at(presentation: GroupPresentation, rho: HolonomyLift, n: int,
                      alpha: AlphaMap, zeta: TwistPoint,
                      peripheral: PeripheralData = None):
    """|Delta^{alpha,n}(zeta)| for a one-off twist point (see DeltaEvaluator)."""
    ev = DeltaEvaluator(presentation, rho, alpha, peripheral)
    return ev.modulus_at(n, zeta)


def classical_alexander(presentation: GroupPresentation) -> LaurentPolynomial:
    """Classical Alexander polynomial via the n = 1 pipeline, normalized.

    Uses the knot-like alpha (every generator to 1) and the trivial
    representation; the Wada quotient times (t - 1) recovers the classical
    polynomial up to units.
    """
    bits = 128
    ident = ComplexMatrix.identity(2, bits)
    rho = HolonomyLift(presentation,
                       [ident] * presentation.generator_count, bits)
    alpha = AlphaMap(presentation, [(1,)] * presentation.generator_count)
    numerator, denominator = wada_polynomial(presentation, rho, 1, alpha)
    t_minus_1 = LaurentPolynomial(0, [-1, 1], bits)
    product = numerator * t_minus_1
    quotient, remainder = product.divide_exact(denominator)
    if remainder > mpf(2) ** (-(bits // 4)):
        raise AlexanderError(
            "classical quotient is not a polynomial (remainder %s)" % mp.nstr(remainder, 6)
        )
    return quotient.unit_normalized()


def fox_matrix(presentation: GroupPresentation):
    """The (relators x generators) matrix of exact Fox derivatives."""
    return [
        [fox_derivative(r, j, presentation.generator_count)
         for j in range(presentation.generator_count)]
        for r in presentation.relators
    ]
