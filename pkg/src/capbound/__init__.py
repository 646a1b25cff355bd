"""Certified upper bounds for codes in spherical caps."""

from .certify import (
    AnalyticInapplicable,
    BoundCertificate,
    Example2Bound,
    bound_example1,
    bound_example2,
    certificate_from_solution,
    equality_case_report,
    verify_certificate,
)
from .codes import Code, cap_subcode, distance_distribution, dn_roots, e8_roots, max_cosine, min_angle
from .conic import SdpSolution, SolverConfig, export_sdpa, import_sdpa, solve
from .harness import QuadratureRule, inner_product, jacobi_rule, orthogonality_report, quadrature_rule
from .polyalg import Rational, TriPoly, UniPoly, gegenbauer, gegenbauer_expand, tripoly_from_json, tripoly_to_json
from .relax import CapParams, SdpProblem, build_cap_sdp, domain_system, fix_variables, lp_formula_bound
from .zonal import DecompositionError, MatrixCoefficients, ZonalFamily, decompose, reconstruct, zonal_family

__version__ = "0.1.0"

__all__ = [
    "AnalyticInapplicable",
    "BoundCertificate",
    "CapParams",
    "Code",
    "DecompositionError",
    "Example2Bound",
    "MatrixCoefficients",
    "QuadratureRule",
    "Rational",
    "SdpProblem",
    "SdpSolution",
    "SolverConfig",
    "TriPoly",
    "UniPoly",
    "ZonalFamily",
    "bound_example1",
    "bound_example2",
    "build_cap_sdp",
    "cap_subcode",
    "certificate_from_solution",
    "decompose",
    "distance_distribution",
    "dn_roots",
    "domain_system",
    "e8_roots",
    "equality_case_report",
    "export_sdpa",
    "fix_variables",
    "gegenbauer",
    "gegenbauer_expand",
    "import_sdpa",
    "inner_product",
    "jacobi_rule",
    "lp_formula_bound",
    "max_cosine",
    "min_angle",
    "orthogonality_report",
    "quadrature_rule",
    "reconstruct",
    "solve",
    "tripoly_from_json",
    "tripoly_to_json",
    "verify_certificate",
    "zonal_family",
    "__version__",
]
