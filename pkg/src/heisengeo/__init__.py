"""Heisenberg groups with homogeneous distances."""
from .convexity import (
    ConvexityReport,
    classify_glp_lpa,
    glp_necessary_condition,
    planar_strict_convexity,
    probe_horizontal_strict_convexity,
    probe_midpoint,
)
from .curves import (
    HorizontalCurve,
    catalog_p1_geodesic,
    catalog_pinf_geodesic,
    catalog_sine_embedding,
    length,
    lift,
    verify_geodesic,
)
from .errors import CurveError, DimensionError, HeisenbergError, InvalidNormError
from .group import HeisPoint, dilate, distance, inverse, multiply, omega
from .homs import HomSpec, check_hom, fit_affine, is_injective_hom, isometry_probe
from .isoperimetrix import IsoperimetrixModel, build_isoperimetrix, vertical_distance
from .norms import Koranyi, LeeNaor, Lpa, SubFinslerLift, eval_norm, is_valid_lpa, parse_norm
from .planar import LpPlanar, PolygonalPlanar

__version__ = "0.1.0"

__all__ = [
    "ConvexityReport",
    "CurveError",
    "DimensionError",
    "HeisPoint",
    "HeisenbergError",
    "HomSpec",
    "HorizontalCurve",
    "InvalidNormError",
    "IsoperimetrixModel",
    "Koranyi",
    "LeeNaor",
    "LpPlanar",
    "Lpa",
    "PolygonalPlanar",
    "SubFinslerLift",
    "build_isoperimetrix",
    "catalog_p1_geodesic",
    "catalog_pinf_geodesic",
    "catalog_sine_embedding",
    "check_hom",
    "classify_glp_lpa",
    "dilate",
    "distance",
    "eval_norm",
    "fit_affine",
    "glp_necessary_condition",
    "inverse",
    "is_injective_hom",
    "is_valid_lpa",
    "isometry_probe",
    "length",
    "lift",
    "multiply",
    "omega",
    "parse_norm",
    "planar_strict_convexity",
    "probe_horizontal_strict_convexity",
    "probe_midpoint",
    "vertical_distance",
]
