"""Harmonic analysis for a degenerate-elliptic operator family on the polydisc.

Core surface: parameter validation and product Poisson kernels (kernel),
boundary-data extensions and norm convergence (poisson), series expansion
through hypergeometric radial profiles (expansion), box maximal functions
and weak-type experiments (maximal), and non-tangential boundary-limit
scans (fatou).  The geometry module supplies points, grids, cones and the
radius-adapted dyadic partitions; special holds the scalar gamma /
hypergeometric engine.
"""

__version__ = "0.1.0"

from .errors import (AliasingWarning, DivergenceError, GridCoarseWarning,
                     InvalidProfileError, ParameterError, PoleError,
                     PolyharmError, RadiusError, RestrictionError,
                     SlowConvergenceError)
from .geometry import (DyadicPartition, GammaBox, PathProfile, PolyPoint,
                       StolzCone, TorusGrid, TorusPoint, approach_path,
                       build_partition, stolz_membership)
from .kernel import Params, poisson_kernel, positive_majorant, u_ab, validate
from .poisson import (AtomicMeasure, GridFunction, PoissonExtension,
                      boundary_convergence, dilate, dirichlet_solve,
                      duality_check, poisson_of_function, poisson_of_measure,
                      slice_extension)
from .expansion import (ExpansionCoeffs, PureIndex, extract_coeffs,
                        homogeneous_component, radial_profile, synthesize)
from .maximal import (MaximalReport, m_gamma, m_q, nt_maximal, radial_maximal,
                      weak11_experiment)
from .fatou import RntEstimate, SweepSummary, fatou_sweep, rnt_limit

__all__ = [
    "AliasingWarning", "AtomicMeasure", "DivergenceError", "DyadicPartition",
    "ExpansionCoeffs", "GammaBox", "GridCoarseWarning", "GridFunction",
    "InvalidProfileError", "MaximalReport", "ParameterError", "Params",
    "PathProfile", "PoissonExtension", "PoleError", "PolyPoint",
    "PolyharmError", "PureIndex", "RadiusError", "RestrictionError",
    "RntEstimate", "SlowConvergenceError", "StolzCone", "SweepSummary",
    "TorusGrid", "TorusPoint", "approach_path", "boundary_convergence",
    "build_partition", "dilate", "dirichlet_solve", "duality_check",
    "extract_coeffs", "fatou_sweep", "homogeneous_component", "m_gamma",
    "m_q", "nt_maximal", "poisson_kernel", "poisson_of_function",
    "poisson_of_measure", "positive_majorant", "radial_maximal",
    "radial_profile", "rnt_limit", "slice_extension", "stolz_membership",
    "synthesize", "u_ab", "validate", "weak11_experiment",
]
