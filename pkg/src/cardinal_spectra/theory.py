"""
Tangent and Euler numbers, Euler polynomials, the limiting minimal eigenvalue
lambda_inf^d of the periodized collocation matrices, and an auditor for the
conjectured location of the smallest circulant eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from gmpy2 import mpfr

from .scalars import DEFAULT_PRECISION, BigReal, working_precision
from .spectra import (
    circulant_eigenvalue_exact,
    circulant_eigenvalues,
    circulant_rounding_bound,
)
from .splines import SplineSymbol, symbol
from .toeplitz import build_toeplitz, circulant_from_symbol


# -- integer sequences ----------------------------------------------------------


def tangent_numbers(k_max: int) -> list[int]:
    """[T_1, T_3, ..., T_{2 k_max + 1}] by the Knuth--Buckholtz integer recurrence."""
    if k_max < 0:
        raise ValueError(f"k_max must be non-negative, got {k_max}")
    n = k_max + 1
    t = [0] * (n + 1)
    t[1] = 1
    for k in range(2, n + 1):
        t[k] = (k - 1) * t[k - 1]
    for k in range(2, n + 1):
        for j in range(k, n + 1):
            t[j] = (j - k) * t[j - 1] + (j - k + 2) * t[j]
    return t[1:]


def euler_numbers(k_max: int) -> list[int]:
    """[E_0, E_2, ..., E_{2 k_max}] (secant numbers, all positive)."""
    if k_max < 0:
        raise ValueError(f"k_max must be non-negative, got {k_max}")
    n = k_max
    s = [0] * (n + 1)
    s[0] = 1
    for k in range(1, n + 1):
        s[k] = k * s[k - 1]
    for k in range(1, n + 1):
        for j in range(k + 1, n + 1):
            s[j] = (j - k) * s[j - 1] + (j - k + 1) * s[j]
    return s


@lru_cache(maxsize=None)
def tangent_number(n: int) -> int:
    """T_n; zero for even n."""
    if n < 0:
        raise ValueError(f"index must be non-negative, got {n}")
    if n % 2 == 0:
        return 0
    return tangent_numbers(n // 2)[-1]


@lru_cache(maxsize=None)
def euler_number(n: int) -> int:
    """E_n in the sec t convention; zero for odd n."""
    if n < 0:
        raise ValueError(f"index must be non-negative, got {n}")
    if n % 2:
        return 0
    return euler_numbers(n // 2)[-1]


# -- Euler polynomials ------------------------------------------------------------


@dataclass(frozen=True)
class EulerPolynomial:
    """E_n(x) with exact coefficients in ascending powers of x."""

    n: int
    coefficients: tuple[Fraction, ...]

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self) -> tuple[Fraction, ...]:
        return tuple(i * c for i, c in enumerate(self.coefficients) if i > 0)

    def shifted(self, h=1) -> tuple[Fraction, ...]:
        """Coefficients of E_n(x + h)."""
        h = Fraction(h)
        out = [Fraction(0)] * len(self.coefficients)
        for i, c in enumerate(self.coefficients):
            for k in range(i + 1):
                out[k] += c * math.comb(i, k) * h ** (i - k)
        return tuple(out)


@lru_cache(maxsize=None)
def euler_polynomial(n: int) -> EulerPolynomial:
    """E_n(x) from E_n(x) = x^n - 1/2 sum_{k<n} C(n, k) E_k(x).

    The recurrence is E_n(x) + E_n(x + 1) = 2 x^n combined with the Appell
    shift E_n(x + 1) = sum_k C(n, k) E_k(x).
    """
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    for k in range(n):
        ck = euler_polynomial(k).coefficients
        w = Fraction(math.comb(n, k), 2)
        for i, c in enumerate(ck):
            coeffs[i] -= w * c
    return EulerPolynomial(n, tuple(coeffs))


def lemma_sum_A(d: int, n: int) -> Fraction:
    """sum_{l=0}^{d+1} (-1)^l C(d+1, l) E_n(l); zero for n <= d."""
    if d < 0 or n < 0:
        raise ValueError("d and n must be non-negative")
    E = euler_polynomial(n)
    return sum(
        ((-1) ** l * math.comb(d + 1, l) * E(l) for l in range(d + 2)), Fraction(0)
    )


def lemma_sum_B(d: int, n: int) -> Fraction:
    """sum_{l=0}^{d+1} (-1)^l C(d+1, l) E_n(l + 1); zero for n <= d."""
    if d < 0 or n < 0:
        raise ValueError("d and n must be non-negative")
    E = euler_polynomial(n)
    return sum(
        ((-1) ** l * math.comb(d + 1, l) * E(l + 1) for l in range(d + 2)), Fraction(0)
    )


# -- the limiting minimal eigenvalue --------------------------------------------


def lambda_infinity_sum(d: int) -> Fraction:
    """t_0 + 2 sum_j (-1)^j t_j, evaluated exactly (it cancels badly in floating point)."""
    if d < 1:
        raise ValueError(f"degree must be at least 1, got {d}")
    s = symbol(d)
    return s.values[0] + 2 * sum(
        ((-1) ** j * t for j, t in enumerate(s.values) if j > 0), Fraction(0)
    )


def lambda_infinity_theorem(d: int) -> Fraction:
    """T_d / d! for odd d, E_d / d! for even d."""
    if d < 0:
        raise ValueError(f"degree must be non-negative, got {d}")
    num = tangent_number(d) if d % 2 else euler_number(d)
    return Fraction(num, math.factorial(d))


# -- conjecture audit -----------------------------------------------------------


@dataclass(frozen=True)
class ConjectureVerdict:
    d: int
    n: int
    m: int
    min_index_set: frozenset
    predicted_indices: frozenset
    positive_definite: bool
    agrees: bool
    margin: BigReal
    lambda_min: BigReal
    exact_half_index: bool | None
    status: str

    def __post_init__(self) -> None:
        if self.agrees != (self.min_index_set == self.predicted_indices):
            raise ValueError("agrees must reflect the comparison of index sets")


def predicted_min_indices(m: int) -> frozenset:
    """{m/2} for even m, {(m-1)/2, (m+1)/2} for odd m."""
    if m % 2 == 0:
        return frozenset({m // 2})
    return frozenset({(m - 1) // 2, (m + 1) // 2})


def _near_minimum(values: Sequence, rel) -> tuple:
    low = min(values)
    cut = low + rel * abs(low)
    return low, [k for k, v in enumerate(values) if v <= cut]


def audit_circulant(d: int, m: int, precision: int = DEFAULT_PRECISION) -> ConjectureVerdict:
    """Locate the smallest eigenvalue of the order-m periodization C_m^d and compare.

    Candidates within 2^(-precision/2) (relative) of the minimum are
    re-evaluated at twice the precision. Indices whose doubled-precision values
    still agree to 2^(-precision) are tied; such a tie is only trusted when
    the values coincide exactly or form a mirror pair k, m - k, otherwise the
    verdict is "indeterminate".
    """
    s = symbol(d)
    r = s.half_bandwidth
    C = circulant_from_symbol(s, m)
    n = m + d - r
    lams = circulant_eigenvalues(C, precision)
    bound = circulant_rounding_bound(C, precision)
    with working_precision(precision):
        low, candidates = _near_minimum(lams, mpfr(2) ** (-(precision // 2)))
        rest = [v for k, v in enumerate(lams) if k not in candidates]
        next_low = min(rest) if rest else None
        positive = low > mpfr(bound)
    determinate = True
    if len(candidates) > 1:
        fine = circulant_eigenvalues(C, 2 * precision)
        with working_precision(2 * precision):
            sub = [fine[k] for k in candidates]
            low2, picks = _near_minimum(sub, mpfr(2) ** (-precision))
            chosen = [candidates[i] for i in picks]
            for k in chosen:
                if fine[k] != low2 and (m - k) not in chosen:
                    determinate = False
            others = [fine[k] for k in candidates if k not in chosen]
            if others:
                nxt = min(others)
                next_low = nxt if next_low is None else min(next_low, nxt)
        min_set = frozenset(chosen)
    else:
        min_set = frozenset(candidates)
    with working_precision(precision):
        margin = (next_low - low) / abs(low) if next_low is not None and low != 0 else mpfr(0)
    predicted = predicted_min_indices(m)
    exact_half = None
    if m % 2 == 0:
        exact_half = circulant_eigenvalue_exact(C, m // 2) == lambda_infinity_sum(d)
    agrees = min_set == predicted
    if not determinate:
        status = "indeterminate"
    elif agrees and positive and exact_half is not False:
        status = "agree"
    else:
        status = "disagree"
    return ConjectureVerdict(
        d=d,
        n=n,
        m=m,
        min_index_set=min_set,
        predicted_indices=predicted,
        positive_definite=positive,
        agrees=agrees,
        margin=margin,
        lambda_min=low,
        exact_half_index=exact_half,
        status=status,
    )


def conjecture_audit(d: int, n: int, precision: int = DEFAULT_PRECISION) -> ConjectureVerdict:
    """Audit C_m^d for the collocation matrix T_n^d, m = n - d + r."""
    T = build_toeplitz(d, n)
    return audit_circulant(d, T.order + T.half_bandwidth, precision)


def scan_cells(degrees: Iterable[int], max_order: int) -> list[tuple[int, int]]:
    """(d, n) pairs for every periodization order m = 2r+1..max_order."""
    cells = []
    for d in degrees:
        r = d // 2
        for m in range(2 * r + 1, max_order + 1):
            cells.append((d, m + d - r))
    return cells


# -- convexity of the symbol ------------------------------------------------------


def convexity_check(seq: SplineSymbol | Sequence) -> tuple[bool, int | None]:
    """Test second differences a_j - 2 a_{j+1} + a_{j+2} >= 0 of the zero-extended sequence.

    Returns (convex, first violating index or None). Beyond the support the
    differences vanish, so indices up to len + 1 suffice.
    """
    values = list(seq.values if isinstance(seq, SplineSymbol) else seq)
    ext = values + [Fraction(0)] * 4
    for j in range(len(values) + 2):
        if ext[j] - 2 * ext[j + 1] + ext[j + 2] < 0:
            return False, j
    return True, None


__all__ = [
    "ConjectureVerdict",
    "EulerPolynomial",
    "audit_circulant",
    "conjecture_audit",
    "convexity_check",
    "euler_number",
    "euler_numbers",
    "euler_polynomial",
    "lambda_infinity_sum",
    "lambda_infinity_theorem",
    "lemma_sum_A",
    "lemma_sum_B",
    "predicted_min_indices",
    "scan_cells",
    "tangent_number",
    "tangent_numbers",
]

