"""
Cardinal B-splines in exact rational arithmetic.

N^d is the normalized cardinal B-spline of degree d with knots 0, 1, ..., d+1.
It is evaluated two independent ways (alternating truncated-power sum and the
degree recurrence); :func:`symbol` refuses to return values on which the two
routes disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

MAX_DEGREE = 40

RationalLike = Union[int, Fraction]


class SymbolMismatchError(RuntimeError):
    """The two spline evaluation routes produced different values."""


def truncated_power(x: RationalLike, i: int, d: int) -> Fraction:
    """(x - i)_+^d, with (x - i)_+^0 = 1 for x >= i."""
    if d < 0:
        raise ValueError(f"degree must be non-negative, got {d}")
    x = Fraction(x)
    if x < i:
        return Fraction(0)
    return (x - i) ** d


def spline_value_tp(d: int, x: RationalLike) -> Fraction:
    """N^d(x) from the alternating binomial sum of truncated powers."""
    if d < 0:
        raise ValueError(f"degree must be non-negative, got {d}")
    x = Fraction(x)
    total = Fraction(0)
    for i in range(d + 2):
        if x < i:
            break
        term = math.comb(d + 1, i) * truncated_power(x, i, d)
        total += -term if i % 2 else term
    return total / math.factorial(d)


def spline_value_dbc(d: int, x: RationalLike) -> Fraction:
    """N^d(x) from the de Boor--Cox degree recurrence.

    Builds the table N^k(x - s), s = 0..d-k, upward from the indicator of
    [0, 1) at k = 0.
    """
    if d < 0:
        raise ValueError(f"degree must be non-negative, got {d}")
    x = Fraction(x)
    row = [Fraction(1) if 0 <= x - s < 1 else Fraction(0) for s in range(d + 1)]
    for k in range(1, d + 1):
        row = [
            ((x - s) * row[s] + (k + 1 - (x - s)) * row[s + 1]) / k
            for s in range(d + 1 - k)
        ]
    return row[0]


@dataclass(frozen=True)
class SplineSymbol:
    """Degree d and the exact collocation values (t_0^d, ..., t_r^d), r = d // 2."""

    degree: int
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.degree // 2 + 1:
            raise ValueError(
                f"degree {self.degree} needs {self.degree // 2 + 1} values, "
                f"got {len(self.values)}"
            )

    @property
    def half_bandwidth(self) -> int:
        return self.degree // 2

    def __getitem__(self, j: int) -> Fraction:
        """t_|j|, zero beyond the band."""
        j = abs(j)
        if j < len(self.values):
            return self.values[j]
        return Fraction(0)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def knot_average(d: int, j: int = 0) -> Fraction:
    """Interpolation node j + (d+1)/2 of the basic spline N^d."""
    return j + Fraction(d + 1, 2)


@lru_cache(maxsize=None)
def symbol(d: int) -> SplineSymbol:
    """Exact collocation symbol t_j^d = N^d(j + (d+1)/2), j = 0..d//2.

    Cached per degree; the cached objects are immutable.
    """
    if not 1 <= d <= MAX_DEGREE:
        raise ValueError(f"degree must be in 1..{MAX_DEGREE}, got {d}")
    values = []
    for j in range(d // 2 + 1):
        x = knot_average(d, j)
        tp = spline_value_tp(d, x)
        dbc = spline_value_dbc(d, x)
        if tp != dbc:
            raise SymbolMismatchError(
                f"N^{d}({x}): truncated powers give {tp}, recurrence gives {dbc}"
            )
        values.append(tp)
    return SplineSymbol(d, tuple(values))


def edge_value(d: int) -> Fraction:
    """Closed form of the smallest nonzero symbol entry t_r^d."""
    if d % 2:
        return Fraction(1, math.factorial(d))
    return Fraction(1, 2**d * math.factorial(d))
