"""
Symmetric banded LDL^T kernel for shifted Toeplitz matrices T - sigma*I.

No pivoting: the number of negative pivots equals the number of eigenvalues
of T below sigma (Sylvester's law of inertia) as long as no pivot vanishes.
All arithmetic happens in the caller's gmpy2 context.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import gmpy2
from gmpy2 import mpfr


class TinyPivotError(ArithmeticError):
    """A pivot fell below the breakdown threshold; the shift must be perturbed."""

    def __init__(self, index: int, pivot) -> None:
        super().__init__(f"pivot {index} has magnitude {pivot}")
        self.index = index
        self.pivot = pivot


@dataclass
class BandedLDL:
    """T - shift*I = L D L^T with unit lower-banded L.

    ``lower[i][s]`` holds L[i, i - r + s] for s = 0..r-1 (zero where the
    column index is negative).
    """

    order: int
    half_bandwidth: int
    shift: object
    lower: list
    pivots: list

    @property
    def negative_count(self) -> int:
        return sum(1 for p in self.pivots if p < 0)

    def solve(self, rhs: Sequence) -> list:
        """Solve (T - shift*I) y = rhs."""
        n, r, lower = self.order, self.half_bandwidth, self.lower
        z = list(rhs)
        for i in range(n):
            acc = z[i]
            row = lower[i]
            for j in range(max(0, i - r), i):
                acc -= row[j - i + r] * z[j]
            z[i] = acc
        for i in range(n):
            z[i] = z[i] / self.pivots[i]
        for i in range(n - 1, -1, -1):
            acc = z[i]
            for k in range(i + 1, min(n, i + r + 1)):
                acc -= lower[k][i - k + r] * z[k]
            z[i] = acc
        return z


def factor_shifted(
    lags: Sequence, order: int, shift, tiny=None
) -> BandedLDL:
    """LDL^T of the symmetric banded Toeplitz matrix with entries ``lags[|i-j|]``, shifted.

    ``tiny`` is the breakdown threshold on |pivot|; TinyPivotError is raised
    when a pivot is at or below it.
    """
    r = len(lags) - 1
    diag = lags[0] - shift
    lower: list = []
    pivots: list = []
    zero = mpfr(0)
    for i in range(order):
        lo = max(0, i - r)
        # w[k - lo] = L[i, k] * D[k]
        w = []
        for k in range(lo, i):
            acc = lags[i - k]
            row_k = lower[k]
            for j in range(max(lo, k - r), k):
                acc -= w[j - lo] * row_k[j - k + r]
            w.append(acc)
        row = [zero] * r
        d = diag
        for k in range(lo, i):
            lik = w[k - lo] / pivots[k]
            row[k - i + r] = lik
            d -= w[k - lo] * lik
        if tiny is not None and abs(d) <= tiny:
            raise TinyPivotError(i, d)
        lower.append(row)
        pivots.append(d)
    return BandedLDL(order, r, shift, lower, pivots)


def banded_matvec(lags: Sequence, x: Sequence) -> list:
    """y = T x for the symmetric banded Toeplitz matrix given by ``lags``."""
    n = len(x)
    r = len(lags) - 1
    y = []
    a0 = lags[0]
    for i in range(n):
        acc = a0 * x[i]
        for k in range(1, r + 1):
            if i - k >= 0:
                acc += lags[k] * x[i - k]
            if i + k < n:
                acc += lags[k] * x[i + k]
        y.append(acc)
    return y


def dot(x: Sequence, y: Sequence):
    return gmpy2.fsum([a * b for a, b in zip(x, y)])
