"""Explicit Bergman kernels of ellipsoid intersections, with independent
series, quadrature and Monte Carlo checks."""
from .bergman import (
    DomainPoint,
    KernelParams,
    MultiIndex,
    build_L,
    deflation_residual,
    kernel_D,
    kernel_Dinv_origin,
    l_series,
    monomial_norm_D,
    monomial_norm_Dinv,
)
from .errors import ConvergenceError, DomainError, NumericalError, PoleError, SingularArgument
from .exactpoly import BiPoly, StructuredRatFun

__version__ = "0.1.0"
