"""Numerical thermodynamic formalism for hyperbolic rational maps.

The package builds Markov models of Julia sets from inverse branches,
computes pressures, Bowen dimensions and equilibrium measures from transfer
operators, and estimates Fourier decay, non-concentration and twisted
contraction of those measures.
"""

from importlib.metadata import PackageNotFoundError, version

from .errors import (
    BadBracket,
    BranchLost,
    EmptyBlockFamily,
    InsufficientData,
    JuliaThermoError,
    MissingArtifacts,
    NoConvergence,
    NotCertified,
    NotFullShift,
    NumericalError,
    PoleProximity,
    ResolutionExceeded,
    ValidationError,
    ZeroValue,
)
from .fourier import annulus_grid, decay_fit, exp_sum_assembly, fourier_decay, fourier_transform, zeta_set
from .maps import RationalMap, certify_hyperbolic, find_attracting_cycles, julia_sample
from .measure import GibbsMeasure, build_measure, gibbs_constant, regularity_scan, sample
from .models import circle_model, middle_thirds_cantor, quadratic_full_shift
from .nonconc import max_strip_counts, nonconc_exponent, strip_count
from .potentials import Potential, parse_potential
from .spectral import dolgopyat_diagnostics, spectral_radius_profile, twisted_apply
from .symbolic import MarkovModel, build_full_shift_model, inverse_branch, pull_back
from .thermo import (
    conformal_potential,
    ergodic_constants,
    large_deviation_profile,
    max_entropy_potential,
    normalize,
    pfr_eigendata,
    pressure,
    solve_bowen,
    transfer_apply,
)

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

__all__ = [
    "annulus_grid",
    "BadBracket",
    "BranchLost",
    "build_full_shift_model",
    "build_measure",
    "certify_hyperbolic",
    "circle_model",
    "conformal_potential",
    "decay_fit",
    "dolgopyat_diagnostics",
    "EmptyBlockFamily",
    "ergodic_constants",
    "exp_sum_assembly",
    "find_attracting_cycles",
    "fourier_decay",
    "fourier_transform",
    "gibbs_constant",
    "GibbsMeasure",
    "InsufficientData",
    "inverse_branch",
    "julia_sample",
    "JuliaThermoError",
    "large_deviation_profile",
    "MarkovModel",
    "max_entropy_potential",
    "max_strip_counts",
    "middle_thirds_cantor",
    "MissingArtifacts",
    "NoConvergence",
    "nonconc_exponent",
    "normalize",
    "NotCertified",
    "NotFullShift",
    "NumericalError",
    "parse_potential",
    "pfr_eigendata",
    "PoleProximity",
    "Potential",
    "pressure",
    "pull_back",
    "quadratic_full_shift",
    "RationalMap",
    "regularity_scan",
    "ResolutionExceeded",
    "sample",
    "solve_bowen",
    "spectral_radius_profile",
    "strip_count",
    "transfer_apply",
    "twisted_apply",
    "ValidationError",
    "ZeroValue",
    "zeta_set",
    "__version__",
]
