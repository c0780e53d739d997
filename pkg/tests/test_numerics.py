"""Determinants, interpolation and root finding against independent oracles."""

from __future__ import annotations

import itertools
import random

import pytest
from mpmath import mp, mpf, mpc, sqrt, workprec

from torsionlab import (
    ComplexMatrix,
    LaurentPolynomial,
    NumericsError,
    determinant,
    interpolate_on_rotated_roots_of_unity,
    polynomial_roots,
)
from torsionlab.numerics import pairwise_sum, seeded_rotation


def random_mpc(rng, scale=1.0):
    return mpc(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def random_matrix(rng, n, bits=256):
    return ComplexMatrix(n, n, [random_mpc(rng) for _ in range(n * n)], bits)


def leibniz_det(m: ComplexMatrix):
    """Independent oracle: full permutation expansion."""
    n = m.rows
    with workprec(m.precision_bits):
        total = mpc(0)
        for perm in itertools.permutations(range(n)):
            sign = 1
            seen = [False] * n
            for start in range(n):
                if seen[start]:
                    continue
                length = 0
                j = start
                while not seen[j]:
                    seen[j] = True
                    j = perm[j]
                    length += 1
                if length % 2 == 0:
                    sign = -sign
            term = mpc(sign)
            for i in range(n):
                term *= m[i, perm[i]]
            total += term
        return total


# -- determinant ---------------------------------------------------------------

def test_det_identity():
    assert abs(determinant(ComplexMatrix.identity(5)) - 1) == 0


def test_det_diagonal():
    m = ComplexMatrix(2, 2, [mpc(2), mpc(0), mpc(0), mpc(3)])
    assert abs(determinant(m) - 6) < mpf("1e-70")


def test_det_vs_leibniz_oracle():
    rng = random.Random(42)
    for _ in range(5):
        m = random_matrix(rng, 6, bits=256)
        lu = determinant(m)
        oracle = leibniz_det(m)
        assert abs(lu - oracle) / abs(oracle) < mpf("1e-60")


def test_det_multiplicative():
    rng = random.Random(7)
    with workprec(256):
        for _ in range(3):
            a = random_matrix(rng, 8)
            b = random_matrix(rng, 8)
            lhs = determinant(a * b)
            rhs = determinant(a) * determinant(b)
            assert abs(lhs - rhs) / abs(rhs) < mpf(2) ** (-256 // 4)


def test_det_singular_returns_exact_zero():
    # second column = first column
    m = ComplexMatrix(2, 2, [mpc(1), mpc(1), mpc(2), mpc(2)])
    assert determinant(m) == mpc(0)


def test_det_rejects_non_square():
    with pytest.raises(NumericsError):
        determinant(ComplexMatrix(1, 2, [mpc(1), mpc(2)]))


# -- interpolation ----------------------------------------------------------------

def horner_sample(coeffs, min_exp, t):
    acc = mpc(0)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc * t ** min_exp


def test_interpolate_constant():
    with workprec(256):
        nodes = [mp.expj(mpf("0.3")) * mp.expjpi(2 * mpf(j) / 4) for j in range(4)]
        p = interpolate_on_rotated_roots_of_unity([mpc(7)] * 4, 0.3, 0)
        assert p.min_exponent == 0 and len(p.coefficients) == 1
        assert abs(p.coefficients[0] - 7) < mpf("1e-70")
        assert nodes  # nodes built to document the sampling convention


def test_interpolate_cubic_monomial():
    with workprec(256):
        rot = mpf("0.45")
        nodes = [mp.expj(rot) * mp.expjpi(2 * mpf(j) / 8) for j in range(8)]
        values = [z ** 3 for z in nodes]
        p = interpolate_on_rotated_roots_of_unity(values, rot, 0)
        assert p.min_exponent == 3 and len(p.coefficients) == 1
        assert abs(p.coefficients[0] - 1) < mpf("1e-70")


def test_interpolate_round_trip_random():
    rng = random.Random(11)
    with workprec(256):
        coeffs = [random_mpc(rng) for _ in range(10)]  # degree 9
        min_exp = -4
        rot = seeded_rotation("round-trip")
        count = 16
        nodes = [mp.expj(mpf(rot)) * mp.expjpi(2 * mpf(j) / count)
                 for j in range(count)]
        values = [horner_sample(coeffs, min_exp, z) for z in nodes]
        p = interpolate_on_rotated_roots_of_unity(values, rot, min_exp)
        assert p.min_exponent == min_exp
        for got, want in zip(p.coefficients, coeffs):
            assert abs(got - want) < mpf("1e-60")


def test_interpolate_identity_on_window_span():
    # interpolation o evaluation is the identity on polynomials of span < N
    rng = random.Random(13)
    with workprec(256):
        for span in (1, 5, 12):
            coeffs = [random_mpc(rng) for _ in range(span)]
            rot = seeded_rotation("span", span)
            count = span + 3
            nodes = [mp.expj(mpf(rot)) * mp.expjpi(2 * mpf(j) / count)
                     for j in range(count)]
            values = [horner_sample(coeffs, 0, z) for z in nodes]
            p = interpolate_on_rotated_roots_of_unity(values, rot, 0)
            got = list(p.coefficients) + [mpc(0)] * (span - len(p.coefficients))
            for g, w in zip(got, coeffs):
                assert abs(g - w) < mpf("1e-50")


def test_interpolate_zero_nodes_rejected():
    with pytest.raises(NumericsError):
        interpolate_on_rotated_roots_of_unity([], 0.1, 0)


# -- root finding -------------------------------------------------------------------

def test_roots_quadratic_pm1():
    p = LaurentPolynomial(0, [-1, 0, 1])  # t^2 - 1
    with workprec(256):
        roots = sorted(polynomial_roots(p), key=lambda z: z.real)
        assert abs(roots[0] + 1) < mpf("1e-50")
        assert abs(roots[1] - 1) < mpf("1e-50")


def test_roots_golden_quadratic():
    p = LaurentPolynomial(0, [1, -3, 1])  # t^2 - 3t + 1
    with workprec(256):
        want = sorted([(3 + sqrt(5)) / 2, (3 - sqrt(5)) / 2])
        got = sorted(abs(r) for r in polynomial_roots(p))
        for g, w in zip(got, want):
            assert abs(g - w) < mpf("1e-50")


def test_roots_constructed_cubic():
    # (t-1)(t-2)(t-3) = t^3 - 6t^2 + 11t - 6
    p = LaurentPolynomial(0, [-6, 11, -6, 1])
    roots = sorted(polynomial_roots(p), key=lambda z: z.real)
    for r, w in zip(roots, (1, 2, 3)):
        assert abs(r - w) < mpf("1e-30")


def test_roots_monomial_is_empty():
    p = LaurentPolynomial(3, [mpc(2)])
    assert polynomial_roots(p) == []


def test_roots_vieta():
    rng = random.Random(23)
    with workprec(256):
        for degree in (4, 9, 17):
            coeffs = [random_mpc(rng) for _ in range(degree + 1)]
            p = LaurentPolynomial(0, coeffs)
            roots = polynomial_roots(p)
            assert len(roots) == degree
            total = pairwise_sum(roots, mpc(0))
            want_sum = -coeffs[degree - 1] / coeffs[degree]
            assert abs(total - want_sum) / abs(want_sum) < mpf("1e-25")
            prod = mpc(1)
            for r in roots:
                prod *= r
            want_prod = (-1) ** degree * coeffs[0] / coeffs[degree]
            assert abs(prod - want_prod) / abs(want_prod) < mpf("1e-25")


def test_roots_scaled_coefficients():
    # widely scaled coefficients exercise the hull-based initial circles
    with workprec(256):
        p = LaurentPolynomial(0, [mpf("1e40"), mpf(1), mpf("1e-35")])
        roots = polynomial_roots(p)
        norm = p.max_norm()
        for r in roots:
            residual = abs(p(r))
            assert residual <= mpf(2) ** (-128) * norm * max(mpf(1), abs(r)) ** 2


# -- Laurent polynomial arithmetic --------------------------------------------------

def test_divide_exact_round_trip():
    rng = random.Random(31)
    with workprec(256):
        a = LaurentPolynomial(-2, [random_mpc(rng) for _ in range(6)])
        b = LaurentPolynomial(1, [random_mpc(rng) for _ in range(4)])
        prod = a * b
        q, rem = prod.divide_exact(b)
        assert rem < mpf("1e-60")
        assert q.min_exponent == a.min_exponent
        for g, w in zip(q.coefficients, a.coefficients):
            assert abs(g - w) < mpf("1e-60")


def test_unit_normalization_sign_stable():
    p = LaurentPolynomial(3, [1, -5, 1])
    q = LaurentPolynomial(-7, [-1, 5, -1])  # same up to -t^m
    pn, qn = p.unit_normalized(), q.unit_normalized()
    assert pn.min_exponent == qn.min_exponent == 0
    for a, b in zip(pn.coefficients, qn.coefficients):
        assert abs(a - b) == 0


def test_pruning_threshold():
    with workprec(256):
        tiny = mpf(2) ** (-300)
        p = LaurentPolynomial(0, [tiny, mpc(1), tiny])
        assert p.min_exponent == 1 and len(p.coefficients) == 1


def test_evaluation_matches_horner():
    rng = random.Random(3)
    with workprec(256):
        coeffs = [random_mpc(rng) for _ in range(7)]
        p = LaurentPolynomial(-3, coeffs, prune=False)
        z = mp.expj(mpf("1.1"))
        want = horner_sample(coeffs, -3, z)
        assert abs(p(z) - want) < mpf("1e-70")
