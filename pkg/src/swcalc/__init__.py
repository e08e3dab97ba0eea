"""Exact and high-precision computations for the regularized Siegel-Weil formula."""

from .constants import c_mr, c_mr_all, c_r, d_mr, relations_check, transfer_const
from .errors import DerivationError, DomainError, PrecisionFailure, SwcalcError, UsageError, WindowError
from .factors import dnorm_series, factor_series, lambda_m, make_factor
from .laurent import LaurentSeries
from .precision import PrecisionContext, default_context
from .terms import verify_identity
from .xi import xi_conv, xi_series

__version__ = "0.1.0"

__all__ = ["c_mr", "c_mr_all", "c_r", "d_mr", "relations_check", "transfer_const",
           "DerivationError", "DomainError", "PrecisionFailure", "SwcalcError", "UsageError",
           "WindowError", "dnorm_series", "factor_series", "lambda_m", "make_factor",
           "LaurentSeries", "PrecisionContext", "default_context", "verify_identity",
           "xi_conv", "xi_series", "__version__"]
