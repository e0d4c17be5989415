import math
from fractions import Fraction

import pytest
import sympy

from cardinal_spectra.splines import symbol
from cardinal_spectra.theory import (
    ConjectureVerdict,
    audit_circulant,
    conjecture_audit,
    convexity_check,
    euler_number,
    euler_numbers,
    euler_polynomial,
    lambda_infinity_sum,
    lambda_infinity_theorem,
    lemma_sum_A,
    lemma_sum_B,
    predicted_min_indices,
    scan_cells,
    tangent_number,
    tangent_numbers,
)
from cardinal_spectra.spectra import extreme_eigenvalues_bisection
from cardinal_spectra.toeplitz import build_toeplitz

ORDER = 40


def _taylor_sec_tan(order):
    """Exact Taylor coefficients of sec t and tan t up to t^order."""
    cos = [Fraction((-1) ** (k // 2), math.factorial(k)) if k % 2 == 0 else Fraction(0) for k in range(order + 1)]
    sin = [Fraction((-1) ** (k // 2), math.factorial(k)) if k % 2 else Fraction(0) for k in range(order + 1)]
    sec = [Fraction(0)] * (order + 1)
    for n in range(order + 1):
        acc = Fraction(1 if n == 0 else 0)
        for k in range(1, n + 1):
            acc -= cos[k] * sec[n - k]
        sec[n] = acc
    tan = [sum((sin[k] * sec[n - k] for k in range(n + 1)), Fraction(0)) for n in range(order + 1)]
    return sec, tan


SEC, TAN = _taylor_sec_tan(ORDER)


def test_tangent_numbers_small():
    assert tangent_numbers(4) == [1, 2, 16, 272, 7936]


def test_euler_numbers_small():
    assert euler_numbers(3) == [1, 1, 5, 61]


def test_sequences_match_taylor_oracle():
    for n in range(ORDER + 1):
        assert tangent_number(n) == TAN[n] * math.factorial(n)
        assert euler_number(n) == SEC[n] * math.factorial(n)


def test_sequences_match_sympy():
    for k in range(16):
        assert euler_number(2 * k) == abs(sympy.euler(2 * k))


def test_parity_zeros_and_errors():
    assert tangent_number(10) == 0 and euler_number(9) == 0
    with pytest.raises(ValueError):
        tangent_numbers(-1)
    with pytest.raises(ValueError):
        euler_number(-2)


@pytest.mark.parametrize("n", range(0, 13))
def test_euler_polynomials_match_sympy(n):
    x = sympy.Symbol("x")
    ref = sympy.Poly(sympy.euler(n, x), x).all_coeffs()[::-1]
    ours = euler_polynomial(n).coefficients
    assert [Fraction(str(c)) for c in ref] == list(ours)


def test_euler_polynomial_low_degrees():
    assert euler_polynomial(0).coefficients == (1,)
    assert euler_polynomial(1).coefficients == (Fraction(-1, 2), 1)


@pytest.mark.parametrize("n", range(0, 15))
def test_euler_polynomial_functional_identities(n):
    E = euler_polynomial(n)
    for x in (Fraction(0), Fraction(1, 3), Fraction(-2), Fraction(7, 2)):
        assert E(x) + E(x + 1) == 2 * x**n
        assert E(1 - x) == (-1) ** n * E(x)
    if n:
        prev = euler_polynomial(n - 1).coefficients
        assert E.derivative() == tuple(n * c for c in prev)


def test_shifted_coefficients():
    E = euler_polynomial(6)
    shifted = E.shifted(1)
    for x in (Fraction(0), Fraction(2, 5)):
        val = sum(c * x**i for i, c in enumerate(shifted))
        assert val == E(x + 1)


def test_tangent_from_euler_polynomials():
    for k in range(15):
        assert tangent_number(2 * k + 1) == (-1) ** k * 2 ** (2 * k + 1) * euler_polynomial(2 * k + 1)(1)


def test_euler_numbers_from_euler_polynomials():
    for k in range(16):
        assert euler_number(2 * k) == (-1) ** k * 2 ** (2 * k) * euler_polynomial(2 * k)(Fraction(1, 2))


def test_lemma_sums_vanish():
    for d in range(0, 21):
        for n in range(0, d + 1):
            assert lemma_sum_A(d, n) == 0
            assert lemma_sum_B(d, n) == 0


def test_lemma_sums_outside_range():
    assert lemma_sum_A(5, 3) == 0
    assert lemma_sum_A(0, 0) == lemma_sum_B(0, 0) == 0
    assert lemma_sum_A(2, 3) != 0
    # the (d+1)-th difference of x^(d+1) is (-1)^(d+1) (d+1)!
    assert lemma_sum_A(3, 4) == math.factorial(4)
    with pytest.raises(ValueError):
        lemma_sum_B(-1, 2)


@pytest.mark.parametrize("d,expected", [(2, Fraction(1, 2)), (5, Fraction(2, 15)), (9, Fraction(62, 2835)),
                                        (6, Fraction(61, 720))])
def test_lambda_infinity_values(d, expected):
    assert lambda_infinity_sum(d) == expected
    assert lambda_infinity_theorem(d) == expected


def test_lambda_infinity_theorem_d0():
    assert lambda_infinity_theorem(0) == 1
    with pytest.raises(ValueError):
        lambda_infinity_sum(0)


def test_theorem_all_degrees():
    for d in range(1, 31):
        assert lambda_infinity_sum(d) == lambda_infinity_theorem(d)


def test_predicted_indices():
    assert predicted_min_indices(20) == {10}
    assert predicted_min_indices(19) == {9, 10}


def test_audit_fig_cells():
    v = conjecture_audit(7, 24)
    assert v.m == 20 and v.min_index_set == {10} and v.status == "agree"
    assert v.exact_half_index is True and v.positive_definite
    w = conjecture_audit(7, 23)
    assert w.m == 19 and w.min_index_set == {9, 10} and w.agrees
    assert w.exact_half_index is None


def test_audit_even_lambda_is_limit():
    v = audit_circulant(5, 40)
    assert v.lambda_min == pytest.approx(float(Fraction(2, 15)), rel=1e-15)


def test_audit_small_grid():
    for d in (2, 3, 7, 12):
        for m in range(2 * (d // 2) + 1, 60):
            assert audit_circulant(d, m, 128).status == "agree"


def test_verdict_consistency_enforced():
    with pytest.raises(ValueError):
        ConjectureVerdict(7, 24, 20, frozenset({9}), frozenset({10}), True, True, 0, 0, None, "agree")


def test_scan_cells_layout():
    cells = scan_cells([4], 8)
    assert cells == [(4, m + 2) for m in range(5, 9)]


def test_convexity():
    assert convexity_check(symbol(2)) == (True, None)
    assert convexity_check([1, 0, 0]) == (True, None)
    assert convexity_check([1, 1, 0]) == (False, 0)
    assert convexity_check(symbol(9))[0] is False


def test_convexity_by_degree():
    # exact second differences of the zero-extended symbol: convex up to d=8
    for d in range(1, 9):
        assert convexity_check(symbol(d)) == (True, None)
    for d in range(9, 31):
        assert convexity_check(symbol(d)) == (False, 0)


def test_convexity_manual_d7():
    t = symbol(7).values
    ext = list(t) + [0, 0, 0, 0]
    diffs = [ext[j] - 2 * ext[j + 1] + ext[j + 2] for j in range(len(t) + 2)]
    assert all(v >= 0 for v in diffs)
    assert diffs[0] == Fraction(151, 315) - Fraction(397, 840) + Fraction(1, 42)


@pytest.mark.xfail(strict=True, reason="exact second differences of the d=7 symbol are all nonnegative")
def test_convexity_claim_d7():
    assert convexity_check(symbol(7))[0] is False


def test_lambda_min_decreases_toward_limit():
    # regression data, not a theorem: lambda_min(T_n^d) falls monotonically onto lambda_inf
    for d in (4, 9):
        lim = lambda_infinity_sum(d)
        prev = None
        for n in (40, 80, 160, 320):
            lo = extreme_eigenvalues_bisection(build_toeplitz(d, n), 128, certify=False).lambda_min
            assert lo > lim
            if prev is not None:
                assert lo < prev
            prev = lo
