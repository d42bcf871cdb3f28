from fractions import Fraction
from math import comb

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reciprocal_traces.numerics import (PrecisionContext, QExpansion, gamma_eval, rational_reconstruction,
                                        richardson_derivative, series_invert, tail_sum_bound)

small_ints = st.integers(min_value=-20, max_value=20)
int_series = st.lists(small_ints, min_size=1, max_size=8).map(lambda cs: QExpansion.from_list(cs))
unit_series = st.tuples(st.sampled_from([1, -1]), st.lists(small_ints, min_size=0, max_size=7)).map(
    lambda t: QExpansion.from_list([t[0], *t[1]]))


def test_context_defaults_and_validation():
    ctx = PrecisionContext(60)
    assert ctx.series_order > 0
    assert ctx.tail_tolerance < 10.0 ** -30
    assert ctx.mp.dps == 60
    with pytest.raises(ValueError):
        PrecisionContext(10)
    with pytest.raises(ValueError):
        PrecisionContext(60, tail_tolerance=1e-5)


def test_contexts_are_isolated():
    a, b = PrecisionContext(40), PrecisionContext(80)
    assert a.mp.dps == 40 and b.mp.dps == 80
    assert mpmath.mp.dps == 15


def test_geometric_series_inverse():
    inv = series_invert(QExpansion.from_list([1, -1], truncation=10))
    assert [inv[k] for k in range(10)] == [1] * 10


def test_inverse_of_delta_over_q():
    # prod_{m<6} (1 - q^m)^24 expanded with the binomial theorem, then inverted
    n = 6
    coeffs = [1] + [0] * (n - 1)
    for m in range(1, n):
        factor = [0] * n
        for k in range(25):
            if m * k < n:
                factor[m * k] = comb(24, k) * (-1) ** k
        coeffs = [sum(coeffs[i] * factor[j - i] for i in range(j + 1)) for j in range(n)]
    inv = series_invert(QExpansion.from_list(coeffs))
    assert [inv[k] for k in range(n)] == [1, 24, 324, 3200, 25650, 176256]


@given(int_series, int_series, int_series)
def test_multiplication_is_associative(f, g, h):
    assert ((f * g) * h).as_dict() == (f * (g * h)).as_dict()


@given(unit_series)
def test_inverse_times_series_is_one(f):
    prod = f * series_invert(f)
    assert prod.as_dict() == {Fraction(0): 1}


@given(int_series, int_series)
def test_theta_derivative_leibniz(f, g):
    lhs = (f * g).theta_derivative()
    rhs = f.theta_derivative() * g + f * g.theta_derivative()
    assert lhs.truncate(rhs.truncation).as_dict() == rhs.truncate(lhs.truncation).as_dict()


def test_exponents_must_ascend():
    with pytest.raises(ValueError):
        QExpansion(((Fraction(1), 1), (Fraction(0), 1)), Fraction(3))


def _stirling_gamma(x: Fraction, digits: int):
    """Gamma via upward shift and the Stirling series with Bernoulli numbers."""
    with mpmath.workdps(digits + 20):
        bern = [Fraction(1)]
        for m in range(1, 61):
            bern.append(-sum(comb(m + 1, k) * bern[k] for k in range(m)) / Fraction(m + 1))
        shift = 60
        xs = mpmath.mpf(x.numerator) / x.denominator
        big = xs + shift
        log_g = (big - mpmath.mpf(1) / 2) * mpmath.log(big) - big + mpmath.log(2 * mpmath.pi) / 2
        for k in range(1, 30):
            b = bern[2 * k]
            log_g += mpmath.mpf(b.numerator) / b.denominator / (2 * k * (2 * k - 1) * big ** (2 * k - 1))
        value = mpmath.exp(log_g)
        for j in range(shift):
            value /= xs + j
        return mpmath.nstr(value, digits + 10)


@pytest.mark.parametrize("x", [Fraction(1, 3), Fraction(2, 3), Fraction(1, 2), Fraction(5, 2), Fraction(7, 4)])
def test_gamma_against_stirling(x, ctx):
    ref = _stirling_gamma(x, 60)
    ref = ctx.mp.mpf(ref)
    assert abs(gamma_eval(x, ctx) - ref) < ctx.mp.mpf(10) ** -45 * abs(ref)


def test_gamma_rejects_nonpositive(ctx):
    with pytest.raises(ValueError):
        gamma_eval(0, ctx)


def test_richardson_derivative_of_exp(ctx):
    mp = ctx.mp
    d, err = richardson_derivative(mp.exp, mp.mpf(1), 0.1, ctx, levels=6)
    assert abs(d - mp.e) < mp.mpf(10) ** -12
    assert err < 1e-10


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 6))
def test_rational_reconstruction_roundtrip(num, den):
    ctx = PrecisionContext(50)
    target = Fraction(num, den)
    value = ctx.mpf(target)
    assert rational_reconstruction(value, 10 ** 15) == target


def test_tail_bound_dominates_gaussian_tail():
    import math
    term = lambda n: n * n * math.exp(-0.5 * n * n)
    bound = tail_sum_bound(term, 4)
    exact = sum(term(n) for n in range(4, 60))
    assert exact <= bound <= 1.5 * exact
