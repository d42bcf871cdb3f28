from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from reciprocal_traces.numerics import richardson_derivative
from reciprocal_traces.quadforms import (Form, class_representatives, cm_point, hurwitz_class_number, q_of, q_z,
                                         reduce, stabilizer_order)

coeff = st.integers(min_value=-40, max_value=40)


@st.composite
def definite_forms(draw):
    a = draw(st.integers(1, 40))
    b = draw(coeff)
    c = draw(st.integers(1, 200))
    assume(b * b - 4 * a * c < 0)
    return Form(a, b, c)


@given(definite_forms())
def test_reduction_is_an_equivalence(Q):
    R, M = reduce(Q)
    (al, be), (ga, de) = M
    assert al * de - be * ga == 1
    assert Q.transform(M) == R
    assert R.discriminant == Q.discriminant
    assert R.is_reduced()


def test_reduction_example():
    assert reduce(Form(3, 2, 1))[0] == Form(1, 0, 2)


def test_class_representatives_examples():
    assert class_representatives(-23) == [Form(1, 1, 6), Form(2, -1, 3), Form(2, 1, 3)]
    assert class_representatives(-4) == [Form(1, 0, 1)]
    assert class_representatives(-5) == []
    with pytest.raises(ValueError):
        class_representatives(5)


def test_stabilizers():
    assert stabilizer_order(Form(1, 1, 1)) == 3
    assert stabilizer_order(Form(2, 2, 2)) == 3
    assert stabilizer_order(Form(1, 0, 1)) == 2
    assert stabilizer_order(Form(1, 1, 6)) == 1
    assert hurwitz_class_number(-12) == Fraction(4, 3)


def _hurwitz(n: int) -> Fraction:
    return Fraction(-1, 12) if n == 0 else hurwitz_class_number(-n)


@pytest.mark.parametrize("n", range(1, 61))
def test_kronecker_hurwitz_relation(n):
    # sum_{t^2 <= 4n} H(4n - t^2) = 2 sigma(n) - sum_{d | n} min(d, n/d)
    r = isqrt(4 * n)
    lhs = sum(_hurwitz(4 * n - t * t) for t in range(-r, r + 1))
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    rhs = 2 * sum(divisors) - sum(min(d, n // d) for d in divisors)
    assert lhs == rhs


@given(definite_forms())
def test_cm_point_is_a_root(Q):
    from reciprocal_traces import PrecisionContext
    ctx = PrecisionContext(40)
    z = cm_point(Q, ctx).value
    assert z.imag > 0
    scale = abs(Q.a) + abs(Q.b) + abs(Q.c)
    assert abs(q_of(Q, z)) < ctx.mp.mpf(10) ** -35 * scale * (1 + abs(z)) ** 2
    # Q_z^2 = -D at the CM point
    assert abs(q_z(Q, z) ** 2 + Q.discriminant) < ctx.mp.mpf(10) ** -33 * scale ** 2


@given(coeff, coeff, coeff, st.floats(-2, 2), st.floats(0.2, 3))
def test_norm_identity(a, b, c, x, y):
    from reciprocal_traces import PrecisionContext
    ctx = PrecisionContext(40)
    mp = ctx.mp
    Q = Form(a, b, c)
    z = mp.mpc(x, y)
    lhs = q_z(Q, z) ** 2
    rhs = abs(q_of(Q, z)) ** 2 / z.imag ** 2 - Q.discriminant
    scale = 1 + (abs(a) + abs(b) + abs(c)) ** 2 * (1 + abs(z) ** 4) / y ** 2
    assert abs(lhs - rhs) <= mp.mpf(10) ** (-40 + 5) * scale


@given(coeff, coeff, coeff, st.floats(-1, 1), st.floats(0.3, 2))
def test_dbar_of_qz(a, b, c, x, y):
    from reciprocal_traces import PrecisionContext
    ctx = PrecisionContext(40)
    mp = ctx.mp
    Q = Form(a, b, c)
    x, y = mp.mpf(x), mp.mpf(y)
    dx, _ = richardson_derivative(lambda t: q_z(Q, mp.mpc(t, y)), x, 0.05, ctx, levels=6)
    dy, _ = richardson_derivative(lambda t: q_z(Q, mp.mpc(x, t)), y, 0.05, ctx, levels=6)
    dbar = (dx + 1j * dy) / 2
    expected = -1j / (2 * y * y) * q_of(Q, mp.mpc(x, y))
    assert abs(dbar - expected) <= mp.mpf(10) ** -15 * (1 + abs(expected))


@given(definite_forms(), st.floats(-1, 1), st.floats(0.3, 2))
def test_factorisation_through_cm_point(Q, x, y):
    from reciprocal_traces import PrecisionContext
    ctx = PrecisionContext(40)
    mp = ctx.mp
    z = mp.mpc(x, y)
    zq = cm_point(Q, ctx).value
    rhs = mp.sqrt(-Q.discriminant) / (2 * zq.imag) * (z - zq) * (z - mp.conj(zq))
    assert abs(q_of(Q, z) - rhs) <= mp.mpf(10) ** -35 * (1 + abs(rhs)) * (abs(Q.a) + abs(Q.b) + abs(Q.c))
