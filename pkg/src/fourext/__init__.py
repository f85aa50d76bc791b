"""Fourier extension of non-periodic functions on [-1, 1].

Continuous (least-squares) and discrete (collocation) extensions at double or
arbitrary precision, their orthogonal-polynomial form, a Chebyshev baseline,
the closed-form convergence and resolution theory, and an experiment harness.
"""

from .basis import CollocationGrid, ExtensionConfig, mapped_cheb_nodes
from .chebyshev import ChebExpansion, cheb_coeffs, cheb_error, cheb_eval
from .continuous import ContinuousExtension, QuadratureError, error_norms, evaluate_extension, solve_continuous
from .discrete import DiscreteExtension, solve_discrete, verify_normal_equations
from .estimators import ChebyshevApproximation, FourierExtension
from .linsolve import LsqReport, block_svd_solve, svd_solve
from .numkit import PrecisionError, TestFunction, make_function, working_precision
from .orthopoly import OrthoExtension, expansion_coeffs, stieltjes_recurrence
from .theory import conv_rate_E, resolution_r, thresholds

__version__ = "0.1.0"

__all__ = [
    "ChebExpansion",
    "ChebyshevApproximation",
    "CollocationGrid",
    "ContinuousExtension",
    "DiscreteExtension",
    "ExtensionConfig",
    "FourierExtension",
    "LsqReport",
    "OrthoExtension",
    "PrecisionError",
    "QuadratureError",
    "TestFunction",
    "block_svd_solve",
    "cheb_coeffs",
    "cheb_error",
    "cheb_eval",
    "conv_rate_E",
    "error_norms",
    "evaluate_extension",
    "expansion_coeffs",
    "make_function",
    "mapped_cheb_nodes",
    "resolution_r",
    "solve_continuous",
    "solve_discrete",
    "stieltjes_recurrence",
    "svd_solve",
    "thresholds",
    "verify_normal_equations",
    "working_precision",
]
