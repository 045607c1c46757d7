"""Law, densities and moments of the maximum of Brownian motion with
parabolic drift, from Airy-zero series, real-axis Airy integrals and an
independent Monte Carlo oracle."""

from importlib.metadata import PackageNotFoundError, version

from ._backend import NAME as BACKEND
from .airy import AiryValues, DomainError, ScaledAiryValues, ai_primitive, airy_eval, airy_eval_scaled
from .integrals import IdentityReport, airy_identity_suite, em_via_integral, laplace_airy_check, parseval_sum
from .montecarlo import McConfig, McEstimate, estimate, sample_M, sample_N
from .quadrature import QuadratureSpec
from .scorer import phi_weight, scorer_gi, scorer_hi
from .series import (
    EvalPoint,
    MomentSet,
    SeriesConfig,
    density_fM,
    density_fN,
    evaluate,
    gparseval_check,
    hitting_density,
    mean_via_tmean,
    moments,
    tail_probability_G,
)
from .zeros import ZeroRecord, airy_zero, zero_table

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AiryValues",
    "DomainError",
    "ScaledAiryValues",
    "ai_primitive",
    "airy_eval",
    "airy_eval_scaled",
    "IdentityReport",
    "airy_identity_suite",
    "em_via_integral",
    "laplace_airy_check",
    "parseval_sum",
    "McConfig",
    "McEstimate",
    "estimate",
    "sample_M",
    "sample_N",
    "QuadratureSpec",
    "phi_weight",
    "scorer_gi",
    "scorer_hi",
    "EvalPoint",
    "MomentSet",
    "SeriesConfig",
    "density_fM",
    "density_fN",
    "evaluate",
    "gparseval_check",
    "hitting_density",
    "mean_via_tmean",
    "moments",
    "tail_probability_G",
    "ZeroRecord",
    "airy_zero",
    "zero_table",
]
