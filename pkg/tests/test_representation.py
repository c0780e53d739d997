"""Symmetric powers, holonomy lifts, alpha maps and the combined evaluation."""

from __future__ import annotations

import random

import pytest
from mpmath import mp, mpf, mpc, sqrt, workprec

from torsionlab import (
    AlphaMap,
    ComplexMatrix,
    GroupPresentation,
    HolonomyLift,
    PeripheralData,
    RepresentationError,
    TwistPoint,
    clebsch_gordan_residual,
    evaluate_group_ring,
    sym_power,
    validate_representation,
)
from torsionlab.fpgroup import GroupRingElement, Word

from conftest import load_case


def random_sl2(rng, bits=256):
    """Random SL2 via unit-determinant normalization of a random matrix."""
    with workprec(bits):
        while True:
            ent = [mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(4)]
            det = ent[0] * ent[3] - ent[1] * ent[2]
            if abs(det) > mpf("0.05"):
                root = mp.sqrt(det)
                return ComplexMatrix(2, 2, [e / root for e in ent], bits)


def mat_dist(a: ComplexMatrix, b: ComplexMatrix):
    return max(abs(x - y) for x, y in zip(a.entries, b.entries))


# -- symmetric powers -----------------------------------------------------------

def test_sym1_is_trivial_and_sym2_is_identity_functor():
    m = ComplexMatrix(2, 2, [mpc(1), mpc(2), mpc(0), mpc(1)])
    assert sym_power(m, 1).entries == [mpc(1)]
    assert mat_dist(sym_power(m, 2), m) == 0


def test_sym_diagonal():
    with workprec(256):
        lam = mpc("1.5", "0.25")
        m = ComplexMatrix(2, 2, [lam, mpc(0), mpc(0), 1 / lam])
        s = sym_power(m, 3)
        assert abs(s[0, 0] - lam ** 2) < mpf("1e-70")
        assert abs(s[1, 1] - 1) < mpf("1e-70")
        assert abs(s[2, 2] - lam ** -2) < mpf("1e-70")
        assert max(abs(s[i, j]) for i in range(3) for j in range(3) if i != j) == 0


def test_sym_homomorphism():
    rng = random.Random(101)
    with workprec(256):
        for n in (3, 5, 6):
            a = random_sl2(rng)
            b = random_sl2(rng)
            lhs = sym_power(a * b, n)
            rhs = sym_power(a, n) * sym_power(b, n)
            assert mat_dist(lhs, rhs) < mpf("1e-65")


def test_sym_determinant_one():
    from torsionlab import determinant
    rng = random.Random(55)
    with workprec(256):
        for n in (2, 4, 7):
            s = sym_power(random_sl2(rng), n)
            assert abs(determinant(s) - 1) < mpf("1e-65")


def test_sym_trace_is_eigenvalue_sum():
    rng = random.Random(77)
    with workprec(256):
        for n in range(2, 13):
            g = random_sl2(rng)
            tr = g.entries[0] + g.entries[3]
            lam = (tr + mp.sqrt(tr * tr - 4)) / 2
            if abs(lam) < 1:
                lam = 1 / lam
            want = sum(lam ** (n - 1 - 2 * k) for k in range(n))
            got = sym_power(g, n).trace()
            assert abs(got - want) / abs(want) < mpf("1e-50")


def test_sym_center_parity():
    neg_i = ComplexMatrix(2, 2, [mpc(-1), mpc(0), mpc(0), mpc(-1)])
    for n in range(1, 9):
        s = sym_power(neg_i, n)
        sign = (-1) ** (n - 1)
        ident = ComplexMatrix.identity(n)
        assert mat_dist(s, ident.scale(mpc(sign))) < mpf("1e-70")


def test_sym_parabolic_is_regular_unipotent():
    # charpoly of Sym^(n-1)(parabolic with trace eps*2) is (t - eps^{n-1})^n
    with workprec(256):
        for eps in (1, -1):
            m = ComplexMatrix(2, 2, [mpc(eps), mpc("0.731"), mpc(0), mpc(eps)])
            for n in (2, 3, 5):
                s = sym_power(m, n)
                count = n + 2
                rot = mpf("0.377")
                from torsionlab import interpolate_on_rotated_roots_of_unity
                nodes = [mp.expj(rot) * mp.expjpi(2 * mpf(j) / count)
                         for j in range(count)]
                vals = []
                from torsionlab import determinant
                for z in nodes:
                    ent = [z * mpc(int(i == j)) - s[i, j]
                           for i in range(n) for j in range(n)]
                    vals.append(determinant(ComplexMatrix(n, n, ent)))
                charpoly = interpolate_on_rotated_roots_of_unity(vals, rot, 0)
                # compare to (t - eps^{n-1})^n
                from mpmath import binomial
                root = mpc(eps) ** (n - 1)
                want = [binomial(n, k) * (-root) ** (n - k) for k in range(n + 1)]
                got = list(charpoly.coefficients)
                assert len(got) == n + 1
                for g, w in zip(got, want):
                    assert abs(g - w) < mpf("1e-60")


def test_sym_rejects_bad_n():
    m = ComplexMatrix.identity(2)
    with pytest.raises(RepresentationError):
        sym_power(m, 0)


# -- Clebsch-Gordan ----------------------------------------------------------------

def test_clebsch_gordan_diagonal_n2():
    m = ComplexMatrix(2, 2, [mpc(2), mpc(0), mpc(0), mpf(1) / 2])
    # tr Ad(Sym^1) = 4 + 1 + 0.25 = 5.25 = tr Sym^2
    assert clebsch_gordan_residual(m, 2) < mpf("1e-70")


def test_clebsch_gordan_diagonal_n3_oracle():
    with workprec(256):
        m = ComplexMatrix(2, 2, [mpc(2), mpc(0), mpc(0), mpf(1) / 2])
        # eigenvalue oracle: tr Ad(Sym^2 m) = sum over weight differences
        # of Sym^2 eigenvalues {4, 1, 1/4} minus 1:
        eig = [mpf(4), mpf(1), mpf(1) / 4]
        tr_ad = sum(a / b for a in eig for b in eig) - 1
        # rhs oracle: tr Sym^4 + tr Sym^2 at eigenvalues 2^{+-1}
        lam = mpf(2)
        rhs = sum(lam ** (4 - 2 * k) for k in range(5)) + sum(lam ** (2 - 2 * k) for k in range(3))
        assert abs(tr_ad - rhs) < mpf("1e-70")  # identity itself
        assert clebsch_gordan_residual(m, 3) < mpf("1e-60")


def test_clebsch_gordan_random():
    rng = random.Random(9)
    for n in (2, 4, 6):
        m = random_sl2(rng)
        assert clebsch_gordan_residual(m, n) < mpf("1e-60")


# -- holonomy lift validation ---------------------------------------------------------

def newton_parabolic_fig8():
    """Independent Newton solve of the figure-eight relator equation.

    Parabolic ansatz a = [[1,1],[0,1]], b = [[1,0],[w,1]]; solving one matrix
    entry of rho(r) - I = 0 in w with mpmath's secant solver.
    """
    with workprec(300):
        def residual_entry(w):
            a = [[mpc(1), mpc(1)], [mpc(0), mpc(1)]]
            b = [[mpc(1), mpc(0)], [w, mpc(1)]]

            def mul(x, y):
                return [
                    [x[0][0] * y[0][0] + x[0][1] * y[1][0],
                     x[0][0] * y[0][1] + x[0][1] * y[1][1]],
                    [x[1][0] * y[0][0] + x[1][1] * y[1][0],
                     x[1][0] * y[0][1] + x[1][1] * y[1][1]],
                ]

            def inv(x):
                return [[x[1][1], -x[0][1]], [-x[1][0], x[0][0]]]

            m = [[mpc(1), mpc(0)], [mpc(0), mpc(1)]]
            for ch in "abAbaBAbAB":
                g = a if ch.lower() == "a" else b
                m = mul(m, g if ch.islower() else inv(g))
            return m[0][1]

        return mp.findroot(residual_entry, mpc("0.5", "0.8"))


def test_fig8_lift_matches_newton_oracle(fig8):
    pres, lift, alpha, peri = fig8
    w = newton_parabolic_fig8()
    with workprec(256):
        want = mpc(mpf(1) / 2, sqrt(3) / 2)
        assert abs(w - want) < mpf("1e-60")
        assert lift.relator_residual < mpf("1e-30")
        assert abs(lift.generators[1][1, 0] - w) < mpf("1e-60")


def test_validate_representation_accepts_fixture(fig8):
    pres, lift, alpha, peri = fig8
    report = validate_representation(lift, mpf("1e-30"), peri)
    assert report.ok
    trm, trl = report.data["peripheral_traces"][0]
    assert abs(trl + 2) < mpf("1e-60")
    assert abs(trm - 2) < mpf("1e-60")


def test_validate_representation_flags_perturbation(fig8):
    pres, lift, alpha, peri = fig8
    with workprec(256):
        bad = [ComplexMatrix(2, 2, list(g.entries), 256) for g in lift.generators]
        bad[0].entries[1] += mpf("1e-3")
        perturbed = HolonomyLift(pres, bad, 256)
        assert mpf("1e-4") < perturbed.relator_residual < mpf("1e-1")
        report = validate_representation(perturbed, mpf("1e-10"), peri)
        assert not report.ok


def test_validate_representation_flags_determinant(fig8):
    pres, lift, alpha, peri = fig8
    bad = [g.scale(mpc(2)) if i == 0 else g for i, g in enumerate(lift.generators)]
    perturbed = HolonomyLift(pres, bad, 256)
    report = validate_representation(perturbed, mpf("1e-10"))
    assert not report.ok
    assert abs(perturbed.determinant_residuals()[0] - 3) < mpf("1e-50")


def test_lift_needs_2x2():
    pres = GroupPresentation(("x", "y"), ("xyxYXY",))
    with pytest.raises(RepresentationError):
        HolonomyLift(pres, [ComplexMatrix.identity(3), ComplexMatrix.identity(3)])


# -- alpha maps --------------------------------------------------------------------

def test_alpha_rejects_nonvanishing_on_relators():
    pres = GroupPresentation(("x", "y"), ("xyxYXY",))
    with pytest.raises(RepresentationError):
        AlphaMap(pres, [(1,), (2,)])


def test_alpha_rejects_non_surjective():
    pres = GroupPresentation(("x", "y"), ("xyxYXY",))
    with pytest.raises(RepresentationError):
        AlphaMap(pres, [(2,), (2,)])


def test_alpha_accepts_knotlike(fig8):
    pres, lift, alpha, peri = fig8
    assert alpha.rank == 1
    assert alpha.of_word(pres.word("abAB")) == (0,)
    assert alpha.of_word(pres.word("ab")) == (2,)


def test_alpha_rank2_surjectivity():
    # free group on two letters, no relators beyond a commutator
    pres = GroupPresentation(("x", "y", "z"), ("xyXY",))
    alpha = AlphaMap(pres, [(1, 0), (0, 1), (2, 3)])
    assert alpha.rank == 2
    with pytest.raises(RepresentationError):
        AlphaMap(pres, [(2, 0), (0, 2), (2, 2)])


def test_peripheral_validation(fig8):
    pres, lift, alpha, peri = fig8
    peri.validate(alpha)  # must not raise
    bad = PeripheralData(cusps=[(pres.word("abAB"), pres.word("bABaaBAb"))])
    with pytest.raises(RepresentationError):
        bad.validate(alpha)


# -- twist points -------------------------------------------------------------------

def test_twist_point_modulus_check():
    TwistPoint([mpc(0, 1)])
    with pytest.raises(RepresentationError):
        TwistPoint([mpc(2)])


def test_twist_character():
    with workprec(256):
        z = TwistPoint([mp.expjpi(mpf(2) / 5)])
        val = z.character((3,))
        assert abs(val - mp.expjpi(mpf(6) / 5)) < mpf("1e-70")


# -- combined evaluation ---------------------------------------------------------------

def test_evaluate_group_ring_unit(fig8):
    pres, lift, alpha, peri = fig8
    zeta = TwistPoint([mpc(0, 1)])
    out = evaluate_group_ring(GroupRingElement.one(), lift, 3, alpha, zeta)
    assert mat_dist(out, ComplexMatrix.identity(3)) < mpf("1e-70")


def test_evaluate_group_ring_single_term(fig8):
    pres, lift, alpha, peri = fig8
    with workprec(256):
        zeta = TwistPoint([mpc(0, 1)])
        xj = pres.word("a")
        out = evaluate_group_ring(GroupRingElement.of_word(xj), lift, 2, alpha, zeta)
        want = lift.evaluate_word(xj, 2).scale(mpc(0, 1))
        assert mat_dist(out, want) < mpf("1e-70")


def test_evaluate_group_ring_linearity(fig8):
    pres, lift, alpha, peri = fig8
    with workprec(256):
        zeta = TwistPoint([mp.expjpi(mpf(2) / 7)])
        e = GroupRingElement.one() + GroupRingElement.of_word(pres.word("ab"))
        out = evaluate_group_ring(e, lift, 3, alpha, zeta)
        want = ComplexMatrix.identity(3) + \
            lift.evaluate_word(pres.word("ab"), 3).scale(zeta.character((2,)))
        assert mat_dist(out, want) < mpf("1e-65")


def test_evaluate_group_ring_rank_mismatch(fig8):
    pres, lift, alpha, peri = fig8
    zeta = TwistPoint([mpc(1), mpc(1)])
    with pytest.raises(RepresentationError):
        evaluate_group_ring(GroupRingElement.one(), lift, 2, alpha, zeta)
