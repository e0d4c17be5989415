"""
Structured matrices over a spline symbol: the collocation matrix T_n^d, its
circulant periodization, prime-order and doubling embeddings, and the
embedding sizes that guarantee a positive semidefinite circulant.

Nothing here is stored densely; ``to_dense`` exists for test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import gmpy2
from gmpy2 import mpfr

from . import _banded
from .scalars import DEFAULT_PRECISION, Number, is_prime, to_bigreal, working_precision
from .splines import SplineSymbol, symbol


class FactorizationError(ArithmeticError):
    """A banded factorization broke down (matrix not numerically positive definite)."""


@dataclass(frozen=True)
class BandedToeplitz:
    """Symmetric banded Toeplitz matrix of the given order over a spline symbol."""

    symbol: SplineSymbol
    order: int

    def __post_init__(self) -> None:
        if self.order < self.half_bandwidth + 1:
            raise ValueError(
                f"order {self.order} is too small for half-bandwidth {self.half_bandwidth}"
            )

    @property
    def degree(self) -> int:
        return self.symbol.degree

    @property
    def half_bandwidth(self) -> int:
        return self.symbol.half_bandwidth

    @property
    def size(self) -> int:
        """The problem size n for which this is T_n^d (order = n - d)."""
        return self.order + self.degree

    def entry(self, i: int, j: int) -> Fraction:
        if not (0 <= i < self.order and 0 <= j < self.order):
            raise IndexError(f"({i}, {j}) outside order {self.order}")
        return self.symbol[i - j]

    def lags(self, precision: int) -> list:
        """Diagonal values t_0..t_r rounded to ``precision`` bits."""
        return [to_bigreal(t, precision) for t in self.symbol.values]

    def to_dense(self) -> list[list[Fraction]]:
        return [[self.entry(i, j) for j in range(self.order)] for i in range(self.order)]


@dataclass(frozen=True)
class Circulant:
    """Real symmetric circulant given by its first row (c_0, ..., c_{m-1}), c_j = c_{m-j}."""

    row: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        m = len(self.row)
        if m < 1:
            raise ValueError("a circulant needs at least one entry")
        for j in range(1, m):
            if self.row[j] != self.row[m - j]:
                raise ValueError(f"circulant row is not symmetric at lag {j}")

    @property
    def order(self) -> int:
        return len(self.row)

    def entry(self, i: int, j: int) -> Fraction:
        return self.row[(j - i) % self.order]

    def nonzero_lags(self) -> list[tuple[int, Fraction]]:
        return [(j, c) for j, c in enumerate(self.row) if c != 0]

    def row_sum(self) -> Fraction:
        return sum(self.row, Fraction(0))

    def leading_block(self, k: int) -> list[list[Fraction]]:
        return [[self.entry(i, j) for j in range(k)] for i in range(k)]

    def to_dense(self) -> list[list[Fraction]]:
        return self.leading_block(self.order)


GUARANTEES = ("none", "nonsingular", "positive_semidefinite")
EMBEDDING_KINDS = ("periodization", "prime_periodization", "ferreira", "dms", "newsam_dietrich")


@dataclass(frozen=True)
class EmbeddingPlan:
    kind: str
    source_order: int
    target_order: int
    guarantees: str
    padded_size: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in EMBEDDING_KINDS:
            raise ValueError(f"unknown embedding kind {self.kind!r}")
        if self.guarantees not in GUARANTEES:
            raise ValueError(f"unknown guarantee {self.guarantees!r}")
        if self.target_order < self.source_order:
            raise ValueError("an embedding cannot be smaller than the embedded matrix")


def build_toeplitz(d: int, n: int) -> BandedToeplitz:
    """Collocation matrix T_n^d of order n - d."""
    s = symbol(d)
    order = n - d
    if order < s.half_bandwidth + 1:
        raise ValueError(
            f"n - d = {order} must be at least r + 1 = {s.half_bandwidth + 1} for d = {d}"
        )
    return BandedToeplitz(s, order)


def circulant_from_symbol(s: SplineSymbol, m: int) -> Circulant:
    """Circulant of order m with first row (t_0..t_r, 0..0, t_r..t_1); needs m >= 2r + 1."""
    r = s.half_bandwidth
    if m < 2 * r + 1:
        raise ValueError(f"order {m} cannot hold a symmetric band of half-width {r}")
    row = [Fraction(0)] * m
    row[0] = s.values[0]
    for j in range(1, r + 1):
        row[j] = row[m - j] = s.values[j]
    return Circulant(tuple(row))


def periodize(T: BandedToeplitz) -> Circulant:
    """Smallest circulant C_m^d, m = (n - d) + r, whose leading block of order n - d is T."""
    return circulant_from_symbol(T.symbol, T.order + T.half_bandwidth)


def periodization_plan(T: BandedToeplitz) -> EmbeddingPlan:
    m = T.order + T.half_bandwidth
    return EmbeddingPlan("periodization", T.order, m, "none", padded_size=T.size)


def prime_embedding_order(d: int, n: int) -> EmbeddingPlan:
    """Smallest p >= n with m = p - d + r prime; C_m^d is then nonsingular.

    Nonsingularity: for prime m a rational circulant is singular only when its
    row sum vanishes or all its entries coincide. The row sum is 1 and the
    entries are strictly decreasing over the band.
    """
    T = build_toeplitz(d, n)
    r = T.half_bandwidth
    p = n
    while not is_prime(p - d + r):
        p += 1
    return EmbeddingPlan("prime_periodization", T.order, p - d + r, "nonsingular", padded_size=p)


class FerreiraEmbedding(NamedTuple):
    circulant: Circulant
    condition_value: object
    guarantees: str


def ferreira_circulant(T: BandedToeplitz) -> Circulant:
    """Order-2N circulant [[T, S], [S, T]] with S carrying the wrap-around lags."""
    return circulant_from_symbol(T.symbol, 2 * T.order)


def ferreira_vectors(T: BandedToeplitz) -> tuple[list[Fraction], list[Fraction]]:
    """b = (t_0..t_{N-1}) and c = (t_{N-1}..t_1, 0) over the zero-padded symbol.

    The stated c has N - 1 entries; it is padded with a trailing zero to
    length N so that b^T T^{-1} c is defined.
    """
    N = T.order
    b = [T.symbol[j] for j in range(N)]
    c = [T.symbol[j] for j in range(N - 1, 0, -1)] + [Fraction(0)]
    return b, c


def factor_positive_definite(T: BandedToeplitz, precision: int) -> _banded.BandedLDL:
    """LDL^T of T itself, failing unless every pivot is safely positive."""
    tiny = mpfr(2) ** (-(3 * precision) // 4)
    with working_precision(precision):
        try:
            fac = _banded.factor_shifted(T.lags(precision), T.order, mpfr(0), tiny=tiny)
        except _banded.TinyPivotError as exc:
            raise FactorizationError(f"T is numerically singular: {exc}") from exc
    if fac.negative_count:
        raise FactorizationError(
            f"T has {fac.negative_count} negative pivots; it is not positive definite"
        )
    return fac


def ferreira_embed(T: BandedToeplitz, precision: int = DEFAULT_PRECISION) -> FerreiraEmbedding:
    """Doubling embedding plus the value |b^T T^{-1} c| of Ferreira's sufficient condition.

    The circulant is certified positive semidefinite only when the value is
    below 1 - 2^(-precision/4); otherwise the guarantee is "none"
    (indeterminate at this precision).
    """
    fac = factor_positive_definite(T, precision)
    b, c = ferreira_vectors(T)
    with working_precision(precision):
        cb = [to_bigreal(x, precision) for x in c]
        y = fac.solve(cb)
        value = abs(_banded.dot([to_bigreal(x, precision) for x in b], y))
        margin = 1 - mpfr(2) ** (-(precision // 4))
    guarantees = "positive_semidefinite" if value < margin else "none"
    return FerreiraEmbedding(ferreira_circulant(T), value, guarantees)


def ferreira_plan(T: BandedToeplitz, precision: int = DEFAULT_PRECISION) -> EmbeddingPlan:
    emb = ferreira_embed(T, precision)
    return EmbeddingPlan("ferreira", T.order, 2 * T.order, emb.guarantees)


def _ceil_order(value) -> int:
    return int(gmpy2.ceil(value))


def dms_order(n: int, kappa: Number, precision: int = DEFAULT_PRECISION) -> int:
    """Smallest m >= 2 (n + kappa n^2 / sqrt 6) (Dembo, Mallows and Shepp)."""
    if n < 0:
        raise ValueError(f"order must be non-negative, got {n}")
    with working_precision(precision):
        k = to_bigreal(kappa, precision)
        if k < 1:
            raise ValueError(f"a condition number is at least 1, got {kappa}")
        return _ceil_order(2 * (n + k * n * n / gmpy2.sqrt(mpfr(6))))


def newsam_dietrich_order(n: int, kappa: Number, precision: int = DEFAULT_PRECISION) -> int:
    """Smallest m >= 2 sqrt(6 n^2 + kappa 3 2^(11/2) n^(5/2) / 5^(5/2)) (Newsam and Dietrich)."""
    if n < 0:
        raise ValueError(f"order must be non-negative, got {n}")
    with working_precision(precision):
        k = to_bigreal(kappa, precision)
        if k < 1:
            raise ValueError(f"a condition number is at least 1, got {kappa}")
        coef = 3 * gmpy2.sqrt(mpfr(2) ** 11) / gmpy2.sqrt(mpfr(5) ** 5)
        nn = mpfr(n)
        return _ceil_order(2 * gmpy2.sqrt(6 * nn * nn + k * coef * nn * nn * gmpy2.sqrt(nn)))


def dms_plan(T: BandedToeplitz, kappa: Number, precision: int = DEFAULT_PRECISION) -> EmbeddingPlan:
    m = dms_order(T.order, kappa, precision)
    return EmbeddingPlan("dms", T.order, m, "positive_semidefinite")


def newsam_dietrich_plan(
    T: BandedToeplitz, kappa: Number, precision: int = DEFAULT_PRECISION
) -> EmbeddingPlan:
    m = newsam_dietrich_order(T.order, kappa, precision)
    return EmbeddingPlan("newsam_dietrich", T.order, m, "positive_semidefinite")


def next_prime(m: int) -> int:
    """Smallest prime >= m."""
    p = max(m, 2)
    while not is_prime(p):
        p += 1
    return p


__all__ = [
    "BandedToeplitz",
    "Circulant",
    "EmbeddingPlan",
    "FactorizationError",
    "FerreiraEmbedding",
    "build_toeplitz",
    "circulant_from_symbol",
    "dms_order",
    "dms_plan",
    "factor_positive_definite",
    "ferreira_circulant",
    "ferreira_embed",
    "ferreira_plan",
    "ferreira_vectors",
    "newsam_dietrich_order",
    "newsam_dietrich_plan",
    "next_prime",
    "periodization_plan",
    "periodize",
    "prime_embedding_order",
]

