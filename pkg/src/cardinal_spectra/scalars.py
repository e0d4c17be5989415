"""
Numeric substrate: exact rationals, MPFR-backed reals, cos(pi p/q), primality.

``Rational`` is :class:`fractions.Fraction`; ``BigReal`` is :class:`gmpy2.mpfr`,
whose arithmetic is correctly rounded to the precision of the active gmpy2
context. Every function that produces a BigReal takes an explicit precision in
bits and does its work inside :func:`working_precision`.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Union

import gmpy2
from gmpy2 import mpfr, mpq

Rational = Fraction
BigReal = type(mpfr(0))

DEFAULT_PRECISION = 256
GUARD_BITS = 32

Number = Union[int, Fraction, "BigReal", float]


@contextmanager
def working_precision(precision: int) -> Iterator[None]:
    """Run the enclosed block with gmpy2 arithmetic rounded to ``precision`` bits."""
    if precision < 2:
        raise ValueError(f"precision must be at least 2 bits, got {precision}")
    with gmpy2.context(precision=precision):
        yield


def to_bigreal(x: Number, precision: int = DEFAULT_PRECISION) -> BigReal:
    """Round ``x`` to the nearest BigReal with ``precision`` bits (error <= 1/2 ulp)."""
    if isinstance(x, Fraction):
        return mpfr(mpq(x.numerator, x.denominator), precision)
    return mpfr(x, precision)


def to_rational(x: Number) -> Fraction:
    """Exact rational value of a finite BigReal, float, int or Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, BigReal):
        if not gmpy2.is_finite(x):
            raise ValueError(f"cannot convert non-finite value {x} to Rational")
        num, den = x.as_integer_ratio()
        return Fraction(int(num), int(den))
    return Fraction(x)


def ulp(x: BigReal, precision: int) -> Fraction:
    """Unit in the last place of ``x`` at ``precision`` bits, as an exact rational."""
    if x == 0:
        return Fraction(0)
    exp, _ = gmpy2.frexp(x)
    return Fraction(2) ** (int(exp) - precision)


def _reduce_pi_multiple(p: int, q: int) -> tuple[int, int, int]:
    """Map the angle pi*p/q to (sign, a, q) with cos(pi p/q) = sign*cos(pi a/q), 0 <= 2a <= q."""
    a = p % (2 * q)
    if a > q:
        a = 2 * q - a
    sign = 1
    if 2 * a > q:
        a = q - a
        sign = -1
    return sign, a, q


def cos_pi_multiple(p: int, q: int, precision: int = DEFAULT_PRECISION) -> BigReal:
    """cos(pi*p/q) rounded to ``precision`` bits.

    The rational multiple of pi is reduced exactly to the first quadrant before
    any floating-point work, so the result is independent of the size of ``p``
    and the quarter-period points return exact zeros. Angles above pi/4 are
    evaluated through the complementary sine to keep relative accuracy near
    the zero of cos.
    """
    if q < 1:
        raise ValueError(f"denominator must be positive, got q={q}")
    sign, a, q = _reduce_pi_multiple(p, q)
    if a == 0:
        return mpfr(sign, precision)
    if 2 * a == q:
        return mpfr(0, precision)
    if 3 * a == q:
        return mpfr(mpq(sign, 2), precision)
    with working_precision(precision + GUARD_BITS):
        pi = gmpy2.const_pi()
        if 4 * a <= q:
            value = gmpy2.cos(pi * a / q)
        else:
            value = gmpy2.sin(pi * (q - 2 * a) / (2 * q))
        if sign < 0:
            value = -value
    return mpfr(value, precision)


def exact_cos_pi_multiple(p: int, q: int) -> Fraction | None:
    """cos(pi*p/q) as a Rational when it is rational (0, +-1/2, +-1), else None."""
    if q < 1:
        raise ValueError(f"denominator must be positive, got q={q}")
    sign, a, q = _reduce_pi_multiple(p, q)
    if a == 0:
        return Fraction(sign)
    if 2 * a == q:
        return Fraction(0)
    if 3 * a == q:
        return Fraction(sign, 2)
    return None


# Deterministic Miller-Rabin: these witnesses are exact for all n < 3.3e24,
# which covers every 64-bit integer.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3_317_044_064_679_887_385_961_981


def is_prime(m: int) -> bool:
    """Deterministic primality test, exact for every m below 3.3e24."""
    if m < 1:
        raise ValueError(f"primality is defined here for positive integers, got {m}")
    if m < 2:
        return False
    for p in _MR_WITNESSES:
        if m % p == 0:
            return m == p
    if m >= _MR_LIMIT:
        raise ValueError(f"{m} exceeds the range of the deterministic witness set")
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, m)
        if x == 1 or x == m - 1:
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def agreeing_digits(a: BigReal, b: BigReal, precision: int) -> int:
    """Leading decimal digits on which ``a`` and ``b`` agree (relative measure)."""
    cap = int(precision * math.log10(2))
    if a == b:
        return cap
    if b == 0:
        return 0
    with working_precision(precision):
        rel = abs((a - b) / b)
        digits = int(gmpy2.floor(-gmpy2.log10(rel)))
    return max(0, min(cap, digits))
