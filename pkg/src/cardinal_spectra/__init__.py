"""Spectral analysis of cardinal B-spline collocation matrices in exact and multiprecision arithmetic."""

__version__ = "0.1.0"

from .scalars import DEFAULT_PRECISION, BigReal, Rational, working_precision
from .splines import SplineSymbol, symbol
from .toeplitz import BandedToeplitz, Circulant, build_toeplitz, periodize
from .spectra import (
    SpectrumReport,
    circulant_condition,
    circulant_eigenvalues,
    dense_symmetric_eigenvalues,
    extreme_eigenvalues_bisection,
    gershgorin_bounds,
)
from .theory import (
    audit_circulant,
    conjecture_audit,
    lambda_infinity_sum,
    lambda_infinity_theorem,
)

__all__ = [
    "BandedToeplitz",
    "BigReal",
    "Circulant",
    "DEFAULT_PRECISION",
    "Rational",
    "SplineSymbol",
    "SpectrumReport",
    "audit_circulant",
    "build_toeplitz",
    "circulant_condition",
    "circulant_eigenvalues",
    "conjecture_audit",
    "dense_symmetric_eigenvalues",
    "extreme_eigenvalues_bisection",
    "gershgorin_bounds",
    "lambda_infinity_sum",
    "lambda_infinity_theorem",
    "periodize",
    "symbol",
    "working_precision",
]
