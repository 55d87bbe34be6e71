"""Backward-orbit invariants of rational maps on the Riemann sphere."""

from .compare import OrbitInvariant, Verdict, compare, invariant
from .family import FamilyParameter, f_polynomial, family_bseq, solve_cm, verify_critical_orbit
from .kms import FiniteMeasure, KmsParams, c_sequence, kms_trace, normalizer, pf_apply, recover_bseq
from .orbit import OrbitLevels, backward_levels, bseq, is_exceptional, oracle_bn
from .parse import ParseError, parse_map, parse_point
from .poly import Polynomial, RootFindingError, all_roots
from .ratmap import Fiber, MapError, NumericalError, RationalMap
from .sphere import INFINITY, SpherePoint, chordal_distance, normalize, point

__version__ = "0.1.0"

__all__ = [
    "INFINITY",
    "Fiber",
    "FamilyParameter",
    "FiniteMeasure",
    "KmsParams",
    "MapError",
    "NumericalError",
    "OrbitInvariant",
    "OrbitLevels",
    "ParseError",
    "Polynomial",
    "RationalMap",
    "RootFindingError",
    "SpherePoint",
    "Verdict",
    "all_roots",
    "backward_levels",
    "bseq",
    "c_sequence",
    "chordal_distance",
    "compare",
    "f_polynomial",
    "family_bseq",
    "invariant",
    "is_exceptional",
    "kms_trace",
    "normalize",
    "normalizer",
    "oracle_bn",
    "parse_map",
    "parse_point",
    "pf_apply",
    "point",
    "recover_bseq",
    "solve_cm",
    "verify_critical_orbit",
]
