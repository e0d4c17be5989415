"""
Eigenvalues and spectral condition numbers of collocation matrices and their
circulant embeddings.

* circulant spectra from cosine sums over the exact symbol,
* extreme eigenvalues of banded Toeplitz matrices by inertia bisection,
* Gershgorin bounds and the tridiagonal closed form,
* a dense symmetric eigensolver (Householder + Sturm) for small oracles,
* the Cauchy interlace check between T and its periodization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import gmpy2
from gmpy2 import mpfr

from . import _banded
from .scalars import (
    DEFAULT_PRECISION,
    BigReal,
    agreeing_digits,
    cos_pi_multiple,
    exact_cos_pi_multiple,
    to_bigreal,
    to_rational,
    working_precision,
)
from .splines import SplineSymbol
from .toeplitz import BandedToeplitz, Circulant

DENSE_ORACLE_MAX_ORDER = 64
METHODS = ("circulant_dft", "bisection", "tridiagonal_closed_form", "gershgorin")


class ConvergenceError(ArithmeticError):
    """Bisection exhausted its iteration cap; the working precision is too low."""


class SingularMatrixError(ArithmeticError):
    """The smallest singular value is indistinguishable from zero."""


@dataclass(frozen=True)
class SpectrumReport:
    lambda_min: BigReal
    lambda_max: BigReal
    condition: BigReal
    method: str
    precision: int
    certified_digits: int | None = None
    order: int | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.lambda_max < self.lambda_min:
            raise ValueError("lambda_max must not be below lambda_min")


# -- circulants ---------------------------------------------------------------


@lru_cache(maxsize=1024)
def _cos_table(m: int, precision: int) -> tuple:
    """cos(2 pi i / m) for i = 0..m-1."""
    return tuple(cos_pi_multiple(2 * i, m, precision) for i in range(m))


@lru_cache(maxsize=1024)
def _exact_cos_table(m: int) -> tuple:
    return tuple(exact_cos_pi_multiple(2 * i, m) for i in range(m))


def _circulant_weights(C: Circulant) -> list[tuple[int, Fraction]]:
    """Fold c_j and c_{m-j} together: lambda_k = sum_j w_j cos(2 pi k j / m)."""
    m = C.order
    weights = []
    for j in range(m // 2 + 1):
        w = C.row[j] if (j == 0 or 2 * j == m) else C.row[j] + C.row[m - j]
        if w != 0:
            weights.append((j, w))
    return weights


def circulant_eigenvalues(C: Circulant, precision: int = DEFAULT_PRECISION) -> list:
    """All eigenvalues lambda_k = sum_j c_j cos(2 pi k j / m), listed by DFT index k.

    Only k <= m/2 is summed; the rest follows from lambda_k = lambda_{m-k},
    which holds exactly because both indices hit the same reduced cosines.
    """
    m = C.order
    table = _cos_table(m, precision)
    rational_cos = _exact_cos_table(m)
    weights = _circulant_weights(C)
    half = m // 2
    values = [None] * m
    with working_precision(precision):
        big = [(j, w, to_bigreal(w, precision)) for j, w in weights]
        for k in range(half + 1):
            # terms with a rational cosine are summed exactly, so lambda_0
            # and lambda_{m/2} come out as correctly rounded rationals
            exact = Fraction(0)
            acc = mpfr(0)
            for j, w, wb in big:
                i = (k * j) % m
                c = rational_cos[i]
                if c is None:
                    acc += wb * table[i]
                else:
                    exact += w * c
            values[k] = acc + to_bigreal(exact, precision) if acc else to_bigreal(exact, precision)
    for k in range(half + 1, m):
        values[k] = values[m - k]
    return values


def circulant_eigenvalue_exact(C: Circulant, k: int) -> Fraction | None:
    """lambda_k as an exact Rational when every cosine involved is rational, else None."""
    m = C.order
    total = Fraction(0)
    for j, w in _circulant_weights(C):
        c = exact_cos_pi_multiple(2 * k * j, m)
        if c is None:
            return None
        total += w * c
    return total


def circulant_rounding_bound(C: Circulant, precision: int) -> Fraction:
    """A bound on the absolute error of each computed circulant eigenvalue."""
    weights = _circulant_weights(C)
    mass = sum(abs(w) for _, w in weights)
    return 8 * (len(weights) + 1) * mass * Fraction(1, 2**precision)


def circulant_condition(
    C: Circulant, precision: int = DEFAULT_PRECISION, certify: bool = True
) -> SpectrumReport:
    """kappa_2(C) = max|lambda_k| / min|lambda_k| for a real symmetric circulant."""
    lams = circulant_eigenvalues(C, precision)
    with working_precision(precision):
        smax = max(abs(x) for x in lams)
        smin = min(abs(x) for x in lams)
        if smin < mpfr(2) ** (-(precision // 2)) * max(smax, mpfr(1)):
            raise SingularMatrixError(
                f"circulant of order {C.order} has min |lambda| = {smin} at {precision} bits"
            )
        cond = smax / smin
    digits = None
    if certify:
        check = circulant_condition(C, 2 * precision, certify=False)
        digits = agreeing_digits(cond, check.condition, precision)
    return SpectrumReport(
        lambda_min=min(lams),
        lambda_max=max(lams),
        condition=cond,
        method="circulant_dft",
        precision=precision,
        certified_digits=digits,
        order=C.order,
    )


# -- Gershgorin and the tridiagonal closed form ------------------------------


class GershgorinBounds(NamedTuple):
    lower: Fraction
    upper: Fraction
    dominant: bool

    @property
    def condition_bound(self) -> Fraction | None:
        """GB(d) = upper / lower when T is strictly diagonally dominant."""
        if not self.dominant:
            return None
        return self.upper / self.lower


def gershgorin_bounds(s: SplineSymbol) -> GershgorinBounds:
    """Eigenvalue interval [2 t_0 - 1, 1] valid for every order of T_n^d."""
    off = 2 * sum(s.values[1:], Fraction(0))
    upper = s.values[0] + off
    lower = s.values[0] - off
    return GershgorinBounds(lower, upper, lower > 0)


def gershgorin_report(s: SplineSymbol, precision: int = DEFAULT_PRECISION) -> SpectrumReport:
    gb = gershgorin_bounds(s)
    if not gb.dominant:
        raise ValueError(f"degree {s.degree} symbol is not strictly diagonally dominant")
    return SpectrumReport(
        lambda_min=to_bigreal(gb.lower, precision),
        lambda_max=to_bigreal(gb.upper, precision),
        condition=to_bigreal(gb.condition_bound, precision),
        method="gershgorin",
        precision=precision,
    )


def tridiagonal_eigenvalues(T: BandedToeplitz, precision: int = DEFAULT_PRECISION) -> list:
    """lambda_k = t_0 + 2 t_1 cos(pi k / (N + 1)), k = 1..N, for half-bandwidth 1."""
    if T.half_bandwidth != 1:
        raise ValueError(
            f"closed form needs half-bandwidth 1, got {T.half_bandwidth} (degree {T.degree})"
        )
    N = T.order
    t0, t1 = T.symbol.values
    with working_precision(precision):
        a = to_bigreal(t0, precision)
        b = to_bigreal(2 * t1, precision)
        return [a + b * cos_pi_multiple(k, N + 1, precision) for k in range(1, N + 1)]


def tridiagonal_report(T: BandedToeplitz, precision: int = DEFAULT_PRECISION) -> SpectrumReport:
    lams = tridiagonal_eigenvalues(T, precision)
    with working_precision(precision):
        lo, hi = min(lams), max(lams)
        cond = hi / lo
    return SpectrumReport(lo, hi, cond, "tridiagonal_closed_form", precision, order=T.order)


# -- inertia bisection for banded Toeplitz matrices ---------------------------


class _Bracket:
    """Certified interval [lo, hi) for the index-th smallest eigenvalue of T (1-based)."""

    def __init__(self, lags, order, index, precision):
        self.lags = lags
        self.order = order
        self.index = index
        self.precision = precision
        self.tiny = mpfr(2) ** (-(3 * precision) // 4)
        radius = 2 * gmpy2.fsum([abs(a) for a in lags[1:]])
        pad = (abs(lags[0]) + radius) * mpfr(2) ** (8 - precision) + self.tiny
        self.lo = lags[0] - radius - pad
        self.hi = lags[0] + radius + pad
        self.factorizations = 0

    def probe(self, sigma) -> _banded.BandedLDL:
        """Factor T - sigma I and tighten the bracket from its inertia."""
        nudge = self.tiny * max(abs(sigma), mpfr(1))
        for _ in range(64):
            try:
                self.factorizations += 1
                fac = _banded.factor_shifted(self.lags, self.order, sigma, tiny=self.tiny)
                break
            except _banded.TinyPivotError:
                sigma = sigma + nudge
                nudge *= 2
        else:
            raise ConvergenceError(f"no usable shift near {sigma}")
        if fac.negative_count < self.index:
            if sigma > self.lo:
                self.lo = sigma
        elif sigma < self.hi:
            self.hi = sigma
        return fac

    @property
    def width(self):
        return self.hi - self.lo

    def converged(self, tol) -> bool:
        if (self.lo > 0) != (self.hi > 0) or self.lo == 0:
            return False
        return self.width <= tol * min(abs(self.lo), abs(self.hi))

    def inside(self, x) -> bool:
        return self.lo < x < self.hi


def _start_vector(order: int, alternating: bool) -> list:
    out = []
    for j in range(order):
        v = math.sin(math.pi * (j + 1) / (order + 1))
        if alternating and j % 2:
            v = -v
        out.append(mpfr(v))
    return out


def _rayleigh(lags, x):
    y = _banded.banded_matvec(lags, x)
    return _banded.dot(x, y) / _banded.dot(x, x)


def _normalize(x):
    scale = max(abs(v) for v in x)
    return [v / scale for v in x]


def banded_eigenvalue(
    T: BandedToeplitz,
    index: int,
    precision: int = DEFAULT_PRECISION,
    accelerate: bool = True,
):
    """The index-th smallest eigenvalue of T (1-based) to relative error 2^(-precision/2).

    Every bracket update comes from a Sylvester inertia count. With
    ``accelerate`` the shifts are Rayleigh quotients of an inverse-iteration
    vector, and a proposal is only kept once the counts at rho -+ delta confirm
    it; a bisection step is forced whenever an iteration fails to halve the
    bracket, so the iteration count never exceeds that of plain bisection.
    """
    N = T.order
    if not 1 <= index <= N:
        raise ValueError(f"eigenvalue index {index} outside 1..{N}")
    cap = precision + 64
    with working_precision(precision):
        lags = T.lags(precision)
        tol = mpfr(2) ** (-(precision // 2))
        br = _Bracket(lags, N, index, precision)
        x = None
        if accelerate and index in (1, N):
            x = _start_vector(N, alternating=(index == 1))
            rho = _rayleigh(lags, x)
        settle = mpfr(2) ** (-(precision // 4))
        for _ in range(cap):
            if br.converged(tol):
                return (br.lo + br.hi) / 2
            width = br.width
            if x is None:
                br.probe((br.lo + br.hi) / 2)
                continue
            # The Rayleigh quotient bounds the extreme eigenvalue from the
            # inside, so clamping it to the bracket keeps a good shift.
            shift = min(max(rho, br.lo), br.hi)
            fac = br.probe(shift)
            if br.converged(tol):
                continue
            x = _normalize(fac.solve(x))
            rho = _rayleigh(lags, x)
            if br.inside(rho) and abs(rho - shift) <= settle * abs(rho):
                delta = tol * abs(rho) / 4
                for s in (rho - delta, rho + delta):
                    if br.inside(s):
                        br.probe(s)
            if br.width > width / 2:
                br.probe((br.lo + br.hi) / 2)
        raise ConvergenceError(
            f"eigenvalue {index} of order-{N} matrix not isolated after {cap} iterations "
            f"at {precision} bits"
        )


def eigenvalue_count_below(T: BandedToeplitz, sigma, precision: int = DEFAULT_PRECISION) -> int:
    """Number of eigenvalues of T strictly below ``sigma`` (inertia of T - sigma I)."""
    with working_precision(precision):
        fac = _banded.factor_shifted(T.lags(precision), T.order, to_bigreal(sigma, precision))
    return fac.negative_count


def extreme_eigenvalues_bisection(
    T: BandedToeplitz,
    precision: int = DEFAULT_PRECISION,
    certify: bool = True,
    accelerate: bool = True,
) -> SpectrumReport:
    """lambda_min, lambda_max and kappa_2 of T by inertia bisection.

    With ``certify`` the computation is repeated at twice the precision and
    the number of agreeing leading digits of kappa_2 is recorded.
    """
    lam_min = banded_eigenvalue(T, 1, precision, accelerate)
    lam_max = banded_eigenvalue(T, T.order, precision, accelerate)
    with working_precision(precision):
        cond = lam_max / lam_min
    digits = None
    if certify:
        check = extreme_eigenvalues_bisection(T, 2 * precision, certify=False, accelerate=accelerate)
        digits = agreeing_digits(cond, check.condition, precision)
    return SpectrumReport(lam_min, lam_max, cond, "bisection", precision, digits, T.order)


# -- dense symmetric oracle ---------------------------------------------------


def _householder_tridiagonal(rows: Sequence[Sequence], precision: int):
    """Orthogonal similarity reduction of a dense symmetric matrix to tridiagonal form."""
    n = len(rows)
    a = [[to_bigreal(v, precision) for v in row] for row in rows]
    zero = mpfr(0)
    for k in range(n - 2):
        x = [a[i][k] for i in range(k + 1, n)]
        norm = gmpy2.sqrt(gmpy2.fsum([v * v for v in x]))
        if norm == 0:
            continue
        alpha = -norm if x[0] > 0 else norm
        v = list(x)
        v[0] -= alpha
        vv = gmpy2.fsum([e * e for e in v])
        if vv == 0:
            continue
        m = len(v)
        off = k + 1
        # p = 2 A v / (v^T v), q = p - (v^T p / v^T v) v, A <- A - v q^T - q v^T
        p = []
        for i in range(m):
            row = a[off + i]
            p.append(2 * gmpy2.fsum([row[off + j] * v[j] for j in range(m)]) / vv)
        K = gmpy2.fsum([v[i] * p[i] for i in range(m)]) / vv
        q = [p[i] - K * v[i] for i in range(m)]
        for i in range(m):
            row = a[off + i]
            vi, qi = v[i], q[i]
            for j in range(i, m):
                val = row[off + j] - vi * q[j] - qi * v[j]
                row[off + j] = val
                a[off + j][off + i] = val
        a[off][k] = a[k][off] = alpha
        for i in range(off + 1, n):
            a[i][k] = a[k][i] = zero
    diag = [a[i][i] for i in range(n)]
    off2 = [a[i + 1][i] * a[i + 1][i] for i in range(n - 1)]
    return diag, off2


def _sturm(diag, off2, sigma, tiny, derivative=False):
    """Count eigenvalues below sigma; optionally d/dsigma log det(T - sigma I)."""
    count = 0
    q = dq = None
    logdet_slope = mpfr(0)
    for i in range(len(diag)):
        if i == 0:
            qn = diag[0] - sigma
            dqn = mpfr(-1)
        else:
            qn = diag[i] - sigma - off2[i - 1] / q
            if derivative:
                dqn = -1 + off2[i - 1] * dq / (q * q)
        if abs(qn) < tiny:
            qn = -tiny if qn < 0 else tiny
        if qn < 0:
            count += 1
        if derivative:
            logdet_slope += dqn / qn
            dq = dqn
        q = qn
    return count, logdet_slope


def dense_symmetric_eigenvalues(rows: Sequence[Sequence], precision: int = DEFAULT_PRECISION) -> list:
    """All eigenvalues (ascending) of a small dense symmetric matrix.

    Independent of the banded kernel: Householder tridiagonalization, Sturm
    counts for isolation, then Newton steps on the characteristic polynomial
    that are kept only inside the certified bracket.
    """
    n = len(rows)
    if n > DENSE_ORACLE_MAX_ORDER:
        raise ValueError(f"dense oracle is limited to order {DENSE_ORACLE_MAX_ORDER}, got {n}")
    if n == 0:
        return []
    with working_precision(precision):
        diag, off2 = _householder_tridiagonal(rows, precision)
        tol = mpfr(2) ** (-(precision // 2) - 8)
        tiny = mpfr(2) ** (-precision)
        radius = [mpfr(0)] * n
        for i in range(n - 1):
            b = gmpy2.sqrt(off2[i])
            radius[i] += b
            radius[i + 1] += b
        lo = min(diag[i] - radius[i] for i in range(n))
        hi = max(diag[i] + radius[i] for i in range(n))
        pad = (abs(lo) + abs(hi) + 1) * mpfr(2) ** (8 - precision)
        lo, hi = lo - pad, hi + pad
        scale = max(abs(lo), abs(hi))

        def count(s):
            return _sturm(diag, off2, s, tiny)[0]

        found = []
        stack = [(lo, hi, 0, n)]
        while stack:
            a, b, ca, cb = stack.pop()
            if cb == ca:
                continue
            if cb - ca == 1:
                found.append(_newton_refine(diag, off2, a, b, ca, tol, tiny, scale, precision))
                continue
            if b - a <= tol * scale:
                found.extend([(a + b) / 2] * (cb - ca))
                continue
            mid = (a + b) / 2
            cm = count(mid)
            stack.append((a, mid, ca, cm))
            stack.append((mid, b, cm, cb))
        return sorted(found)


def _newton_refine(diag, off2, a, b, ca, tol, tiny, scale, precision):
    """Refine the single eigenvalue in (a, b); ca eigenvalues lie below a."""
    floor = tiny * scale
    settle = mpfr(2) ** (-(precision // 4))

    def probe(s):
        nonlocal a, b
        if _sturm(diag, off2, s, tiny)[0] <= ca:
            a = s
        else:
            b = s

    x = (a + b) / 2
    for _ in range(precision + 64):
        if b - a <= tol * max(min(abs(a), abs(b)), floor):
            break
        width = b - a
        c, slope = _sturm(diag, off2, x, tiny, derivative=True)
        if c <= ca:
            a = x
        else:
            b = x
        nxt = x - 1 / slope if slope != 0 else None
        if nxt is None or not a < nxt < b:
            nxt = (a + b) / 2
        elif abs(nxt - x) <= settle * max(abs(nxt), floor):
            delta = tol * max(abs(nxt), floor) / 4
            for s in (nxt - delta, nxt + delta):
                if a < s < b:
                    probe(s)
        if b - a > width / 2:
            probe((a + b) / 2)
        x = nxt if a < nxt < b else (a + b) / 2
    return (a + b) / 2


# -- interlacing ----------------------------------------------------------------


class InterlaceResult(NamedTuple):
    passed: bool
    worst_margin: BigReal
    deleted: int
    condition_ordered: bool
    toeplitz_singular_values: list
    circulant_singular_values: list


def interlace_check(
    T: BandedToeplitz,
    C: Circulant,
    precision: int = DEFAULT_PRECISION,
    toeplitz_eigenvalues: Sequence | None = None,
) -> InterlaceResult:
    """Check sigma_k(C) >= sigma_k(T) >= sigma_{k+l}(C), l = order(C) - order(T).

    T must be the leading block of C. Singular values of T come from the
    dense oracle, those of C from its cosine-sum eigenvalues. Margins down to
    -2^(-precision/2) count as satisfied (exact ties occur when C has double
    eigenvalues). A spectrum of T computed earlier at the same precision may
    be passed in to skip the dense computation.
    """
    N, m = T.order, C.order
    if m < N:
        raise ValueError("the circulant must be at least as large as T")
    for i in range(N):
        for j in range(max(0, i - T.half_bandwidth - 1), min(N, i + T.half_bandwidth + 2)):
            if C.entry(i, j) != T.entry(i, j):
                raise ValueError("T is not the leading block of C")
    ell = m - N
    if toeplitz_eigenvalues is None:
        t_eigs = dense_symmetric_eigenvalues(T.to_dense(), precision)
    else:
        if len(toeplitz_eigenvalues) != N:
            raise ValueError(f"expected {N} eigenvalues of T, got {len(toeplitz_eigenvalues)}")
        t_eigs = list(toeplitz_eigenvalues)
    c_eigs = circulant_eigenvalues(C, precision)
    with working_precision(precision):
        t_sv = sorted((abs(v) for v in t_eigs), reverse=True)
        c_sv = sorted((abs(v) for v in c_eigs), reverse=True)
        zero = mpfr(0)
        worst = None
        for k in range(N):
            upper = c_sv[k] - t_sv[k]
            lower = t_sv[k] - (c_sv[k + ell] if k + ell < m else zero)
            step = min(upper, lower)
            worst = step if worst is None else min(worst, step)
        slack = mpfr(2) ** (-(precision // 2))
        passed = worst >= -slack
        kappa_t = t_sv[0] / t_sv[-1]
        kappa_c = c_sv[0] / c_sv[-1] if c_sv[-1] != 0 else mpfr("inf")
        ordered = kappa_t <= kappa_c * (1 + slack)
    return InterlaceResult(passed, worst, ell, ordered, t_sv, c_sv)


# -- formatting -----------------------------------------------------------------


def _to_decimal(x) -> Decimal:
    q = to_rational(x) if not isinstance(x, Fraction) else x
    with localcontext() as ctx:
        ctx.prec = 120
        return Decimal(q.numerator) / Decimal(q.denominator)


def round_significant(x, digits: int = 7) -> str:
    """Round half-even to ``digits`` significant digits, fixed-point notation."""
    dec = _to_decimal(x)
    if dec == 0:
        return "0"
    exp = dec.adjusted() - (digits - 1)
    with localcontext() as ctx:
        ctx.prec = 200
        out = dec.quantize(Decimal(1).scaleb(exp), rounding=ROUND_HALF_EVEN)
    return format(out, "f")


def round_places(x, places: int) -> str:
    """Round half-even to ``places`` digits after the decimal point."""
    dec = _to_decimal(x)
    with localcontext() as ctx:
        ctx.prec = 200
        out = dec.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)
    return format(out, "f")
