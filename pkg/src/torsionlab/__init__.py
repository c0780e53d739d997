"""torsionlab: twisted Alexander polynomials of 3-manifold groups and the
numerics around their volume asymptotics, Mahler measures and truncated
Ruelle/Selberg zeta identities."""

__version__ = "0.1.0"

from .fpgroup import (
    GroupPresentation,
    GroupRingElement,
    PresentationError,
    Word,
    fox_derivative,
    parse_presentation,
    validate_presentation,
)
from .numerics import (
    ComplexMatrix,
    LaurentPolynomial,
    NumericsError,
    RootFindingError,
    determinant,
    interpolate_on_rotated_roots_of_unity,
    polynomial_roots,
)
from .representation import (
    AlphaMap,
    HolonomyLift,
    PeripheralData,
    RepresentationError,
    TwistPoint,
    clebsch_gordan_residual,
    evaluate_group_ring,
    sym_power,
    validate_representation,
)
from .alexander import (
    AlexanderError,
    DeltaEvaluator,
    TwistedAlexResult,
    classical_alexander,
    evaluate_delta_at,
    normalized_delta,
    wada_polynomial,
)
from .asymptotics import (
    DehnFillingFactor,
    VolumeEstimate,
    dehn_filling_factor,
    rational_corollary_residual,
    root_log_sum,
    unit_circle_margin,
    volume_sequence,
)
from .mahler import MahlerResult, mahler_jensen, mahler_quadrature, mahler_sequence
from .zeta import (
    LengthSpectrum,
    SpectrumEntry,
    SpectrumError,
    growth_check,
    load_spectrum,
    parse_spectrum,
    ruelle_big_r,
    ruelle_r,
    selberg_z,
    series_bound_report,
    tail_bound,
)
from .anosov import (
    CharPolyProduct,
    characteristic_product,
    hyperbolicity_report,
    inversion_symmetry_distance,
)
