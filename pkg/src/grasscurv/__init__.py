"""Holomorphic maps of the sphere into Grassmannians: Gram determinants,
curvature, Veronese curves and the search for constant-curvature solutions."""
from .curvature import (
    CurvatureField,
    CurvatureReport,
    SigmaFieldPoint,
    constant_curvature_check,
    curvature_scan,
    energy_density,
    euler_lagrange_residual,
    gauss_curvature,
)
from .errors import (
    BadDimension,
    BadExponents,
    DegenerateAtPoint,
    DegenerateMetric,
    DegreeOverflow,
    GrassCurvError,
    NotHermitian,
    PoleAtPoint,
    PowerMismatch,
    UnsupportedFrame,
    UnsupportedRank,
    ZeroPolynomial,
)
from .grassmann import (
    DegenerateFrameWarning,
    GrassmannFrame,
    MacfarlaneMap,
    PlueckerVector,
    display_order,
    duality_transpose,
    embed_pad,
    frame_to_macfarlane,
    gram_det,
    gram_schmidt,
    gram_schmidt_check,
    macfarlane_gram_det,
    pluecker_minors,
    pluecker_relations_check,
)
from .kernels import BACKEND
from .polyhermite import (
    BiPoly,
    BinomialMatch,
    HermitianPoly,
    HermitianRational,
    HoloPoly,
    binomial_match,
    partial_z,
    partial_zbar,
)
from .search import (
    ConstraintSystem,
    MonomialAnsatz,
    SolveOutcome,
    build_ansatz,
    classify,
    constraints_from_ansatz,
    enumerate_exponents,
    infeasibility_probe,
    solve_multistart,
)
from .veronese import VeroneseSpec, pplus_orbit, veronese_cp, veronese_frame, veronese_macfarlane

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    "BadDimension",
    "BadExponents",
    "binomial_match",
    "BinomialMatch",
    "BiPoly",
    "build_ansatz",
    "classify",
    "constant_curvature_check",
    "constraints_from_ansatz",
    "ConstraintSystem",
    "curvature_scan",
    "CurvatureField",
    "CurvatureReport",
    "DegenerateAtPoint",
    "DegenerateFrameWarning",
    "DegenerateMetric",
    "DegreeOverflow",
    "display_order",
    "duality_transpose",
    "embed_pad",
    "energy_density",
    "enumerate_exponents",
    "euler_lagrange_residual",
    "frame_to_macfarlane",
    "gauss_curvature",
    "gram_det",
    "gram_schmidt",
    "gram_schmidt_check",
    "GrassCurvError",
    "GrassmannFrame",
    "HermitianPoly",
    "HermitianRational",
    "HoloPoly",
    "infeasibility_probe",
    "macfarlane_gram_det",
    "MacfarlaneMap",
    "MonomialAnsatz",
    "NotHermitian",
    "partial_z",
    "partial_zbar",
    "pluecker_minors",
    "pluecker_relations_check",
    "PlueckerVector",
    "PoleAtPoint",
    "PowerMismatch",
    "pplus_orbit",
    "SigmaFieldPoint",
    "solve_multistart",
    "SolveOutcome",
    "UnsupportedFrame",
    "UnsupportedRank",
    "veronese_cp",
    "veronese_frame",
    "veronese_macfarlane",
    "VeroneseSpec",
    "ZeroPolynomial",
]
