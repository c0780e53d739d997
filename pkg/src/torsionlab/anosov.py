"""Mapping-torus dynamics: the characteristic polynomial of a pseudo-Anosov
action on the relative character variety as a product of odd twisted
polynomials, plus hyperbolicity and symmetry reports.

Root multisets, not raw coefficients, are the comparison currency here: the
product formula only holds up to a unit +-t^m.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf, mpc, workprec

from .alexander import AlexanderError, DeltaEvaluator
from .asymptotics import unit_circle_margin
from .numerics import polynomial_roots


@dataclass
class CharPolyProduct:
    n: int
    factors: list  # TwistedAlexResult for 2k+1, k = 1..n-1
    product: object  # LaurentPolynomial
    roots: list


@dataclass
class HyperbolicityReport:
    margin: object
    symmetry_distance: object
    hyperbolic: bool
    root_count: int


def _check_fibration_alpha(alpha):
    if alpha.rank != 1:
        raise AlexanderError("fibration map must have rank 1")
    nonzero = [row[0] for row in alpha.exponents if row[0] != 0]
    if sorted(nonzero) != [1]:
        raise AlexanderError(
            "fibration map must send fiber generators to 0 and the monodromy "
            "generator to 1"
        )


def characteristic_product(presentation, rho, alpha, n, peripheral=None) -> CharPolyProduct:
    """Product of Delta^{alpha,2k+1} for k = 1..n-1 over a mapping torus.

    The factor polynomials come from the rank-1 pipeline; the product is their
    coefficient convolution in ascending k order, and the root multiset is the
    union of the factor root multisets (identical to the product's roots, but
    better conditioned).
    """
    if n < 2:
        raise AlexanderError("characteristic product needs n >= 2")
    _check_fibration_alpha(alpha)
    ev = DeltaEvaluator(presentation, rho, alpha, peripheral)
    factors = []
    roots = []
    product = None
    for k in range(1, n):
        result = ev.polynomial(2 * k + 1)
        factors.append(result)
        product = result.polynomial if product is None else product * result.polynomial
        roots.extend(polynomial_roots(result.polynomial))
    return CharPolyProduct(n=n, factors=factors,
                           product=product.unit_normalized(), roots=roots)


def inversion_symmetry_distance(roots, precision_bits=256):
    """Hausdorff distance between a root multiset and its image under
    root -> 1/root; zero means the spectrum is closed under inversion."""
    if not roots:
        return mpf(0)
    with workprec(precision_bits):
        inverted = [1 / mpc(r) for r in roots]
        worst = mpf(0)
        for target in inverted:
            worst = max(worst, min(abs(target - mpc(r)) for r in roots))
        for r in roots:
            worst = max(worst, min(abs(mpc(r) - t) for t in inverted))
        return worst


def hyperbolicity_report(cp: CharPolyProduct) -> HyperbolicityReport:
    """Unit-circle margin and inversion-symmetry distance of the root set.

    A positive margin certifies (numerically) that the pseudo-Anosov action
    has no eigenvalue of modulus one at this symmetric power.
    """
    bits = cp.product.precision_bits if cp.product is not None else 256
    margin = unit_circle_margin(cp.roots)
    sym = inversion_symmetry_distance(cp.roots, bits)
    return HyperbolicityReport(
        margin=margin,
        symmetry_distance=sym,
        hyperbolic=bool(margin > 0),
        root_count=len(cp.roots),
    )
