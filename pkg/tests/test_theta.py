import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reciprocal_traces.modfuncs import PoleError, rho
from reciprocal_traces.numerics import PrecisionContext, richardson_derivative
from reciprocal_traces.quadforms import Form, cm_point, q_of, q_z
from reciprocal_traces.theta import (completion, completion_coefficient, example_2_1_decomposition, form_to_lattice,
                                     kernel, lowered_singular_part, lowering_and_xi_checks, raised_kernel,
                                     shadow_combination, singular_theta_coeff, splitting_sides, star_theta_coeff,
                                     theta_binary_4, theta_unary)
from reciprocal_traces.traces import trace

CTX = PrecisionContext(40)
taus = st.tuples(st.floats(-0.5, 0.5), st.floats(0.4, 2.0)).map(lambda t: complex(*t))

# direct summation with mpmath.nsum at 50 digits
THETA_AT_I = {
    "3/2": "0.12268477967887191974560731923335324",
    "7/2": "5.3064641734321226988201757158975338",
    "4": "-0.0055191766947318360678269089441466208",
    "shadow": "-0.058574626794872014930051256724674088",
}
# brute-force sum over [A, B, C] with R_4 R_2 eta differentiated symbolically
SINGULAR_R2 = {
    (-3, 1): "-4.09899715229935280098140948671e-25",
    (-4, 1): "-0.000770263051750286800478318795746",
    (5, 0.5): "9.34700426754842398102914830736e-14",
}


def _close(a, b, rel):
    return abs(a - b) <= rel * max(abs(a), abs(b))


@pytest.mark.parametrize("weight", [Fraction(3, 2), Fraction(7, 2)])
def test_unary_theta_symmetries(weight, ctx):
    for tau in (1j, 0.3 + 0.7j):
        t0 = theta_unary(weight, 0, tau, ctx)
        t1 = theta_unary(weight, 1, tau, ctx)
        t2 = theta_unary(weight, 2, tau, ctx)
        assert abs(t0.value) <= t0.tail_bound
        assert abs(t1.value + t2.value) <= 2 * t1.tail_bound + ctx.mp.mpf(10) ** -55
        assert t1.tail_bound < ctx.tail_tolerance


def test_binary_theta_symmetries(ctx):
    for tau in (1j, -0.2 + 0.9j):
        assert abs(theta_binary_4(0, tau, ctx).value) < ctx.mp.mpf(10) ** -50
        s = theta_binary_4(1, tau, ctx).value + theta_binary_4(2, tau, ctx).value
        assert abs(s) < ctx.mp.mpf(10) ** -50


def test_theta_values_at_i(ctx):
    mp = ctx.mp
    assert _close(theta_unary(Fraction(3, 2), 1, 1j, ctx).value, mp.mpf(THETA_AT_I["3/2"]), 1e-33)
    assert _close(theta_unary(Fraction(7, 2), 1, 1j, ctx).value, mp.mpf(THETA_AT_I["7/2"]), 1e-33)
    assert _close(theta_binary_4(1, 1j, ctx).value, mp.mpf(THETA_AT_I["4"]), 1e-33)
    assert _close(shadow_combination(1j, ctx), mp.mpf(THETA_AT_I["shadow"]), 1e-33)


@given(taus)
def test_shadow_combination_reduces_to_one_residue(tau):
    mp = CTX.mp
    v = mp.mpf(tau.imag)
    single = 2 * v ** mp.mpf(3.5) * mp.conj(theta_unary(Fraction(7, 2), 1, tau, CTX).value) * \
        theta_binary_4(1, tau, CTX).value
    assert abs(shadow_combination(tau, CTX) - single) <= mp.mpf(10) ** -28 * (1 + abs(single))


@given(taus, st.integers(1, 2))
def test_cutoff_doubling_within_tail(tau, h):
    for weight in (Fraction(3, 2), Fraction(7, 2)):
        coarse = theta_unary(weight, h, tau, CTX, cutoff=3)
        fine = theta_unary(weight, h, tau, CTX, cutoff=6)
        assert abs(coarse.value - fine.value) <= coarse.tail_bound
    coarse = theta_binary_4(h, tau, CTX, cutoff=3)
    fine = theta_binary_4(h, tau, CTX, cutoff=6)
    assert abs(coarse.value - fine.value) <= coarse.tail_bound


@pytest.mark.parametrize("D, m", [(-3, 2), (-4, 1), (-7, 2), (0, 2), (5, 0)])
def test_singular_coefficient_cutoff_doubling(D, m, ctx40):
    coarse = singular_theta_coeff(D, m, 0.7, ctx40, cutoff=5)
    fine = singular_theta_coeff(D, m, 0.7, ctx40, cutoff=10)
    assert abs(coarse.value - fine.value) <= coarse.tail_bound


# --- kernels -------------------------------------------------------------------

definite = st.tuples(st.integers(1, 6), st.integers(-6, 6), st.integers(1, 12)).filter(
    lambda t: t[1] ** 2 - 4 * t[0] * t[2] < 0).map(lambda t: Form(*t))
any_form = st.tuples(*[st.integers(-4, 4)] * 3).filter(lambda t: any(t)).map(lambda t: Form(*t))


@given(definite, st.floats(0.2, 3))
def test_kernels_at_cm_point(Q, v):
    mp = CTX.mp
    z = cm_point(Q, CTX).value
    D = Q.discriminant
    expected = 4 * mp.mpf(v) * abs(D) - 1 / (2 * mp.pi)
    assert abs(kernel("phi_KM", Q, z, v, CTX) - expected) < mp.mpf(10) ** -25 * (1 + abs(expected))
    assert abs(kernel("phi_star_KM", Q, z, v, CTX)) < mp.mpf(10) ** -25
    with pytest.raises(PoleError):
        kernel("eta_KM", Q, z, v, CTX)


@given(any_form, st.floats(-1, 1), st.floats(0.4, 2), st.floats(0.2, 2))
def test_eta_even_in_q(Q, x, y, v):
    z = CTX.mp.mpc(x, y)
    if abs(q_of(Q, z)) < 1e-6:
        return
    a, b = kernel("eta_KM", Q, z, v, CTX), kernel("eta_KM", -Q, z, v, CTX)
    assert abs(a - b) <= CTX.mp.mpf(10) ** -30 * (1 + abs(a))


def _random_samples(n, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        Q = Form(rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3))
        if Q == Form(0, 0, 0):
            continue
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.6))
        if abs(complex(q_of(Q, z))) < 0.05:
            continue
        out.append((Q, z, rng.uniform(0.3, 1.5)))
    return out


def _partials(f, z, ctx, h=1e-3):
    mp = ctx.mp
    dx, _ = richardson_derivative(lambda t: f(mp.mpc(t, z.imag)), z.real, h, ctx)
    dy, _ = richardson_derivative(lambda t: f(mp.mpc(z.real, t)), z.imag, h, ctx)
    return dx, dy


@pytest.mark.parametrize("Q, z, v", _random_samples(50, 1))
def test_lowering_eta_in_z_gives_phi(Q, z, v, ctx40):
    mp = ctx40.mp
    z = mp.mpc(z)
    dx, dy = _partials(lambda t: kernel("eta_KM", Q, t, v, ctx40), z, ctx40)
    lowered = -2j * z.imag ** 2 * (dx + 1j * dy) / 2
    phi = kernel("phi_KM", Q, z, v, ctx40)
    assert abs(lowered - phi) <= 1e-7 * abs(phi) + mp.mpf(10) ** -30


@pytest.mark.parametrize("Q, z, v", _random_samples(50, 2))
def test_lowering_eta_in_tau_gives_four_phi_star(Q, z, v, ctx40):
    # single mode c(v) e^{-2 pi i D tau}: the lowering operator acts as v^2 d/dv on c
    mp = ctx40.mp
    z = mp.mpc(z)
    d, _ = richardson_derivative(lambda t: kernel("eta_KM", Q, z, t, ctx40), mp.mpf(v), v / 20, ctx40)
    star = kernel("phi_star_KM", Q, z, v, ctx40)
    assert abs(v * v * d - 4 * star) <= 1e-7 * abs(star) + mp.mpf(10) ** -30


@pytest.mark.parametrize("Q, z, v", _random_samples(20, 3))
@pytest.mark.parametrize("kind", ["eta_KM", "phi_star_KM"])
def test_raised_closed_forms_match_finite_differences(kind, Q, z, v, ctx40):
    mp = ctx40.mp
    z = mp.mpc(z)
    for m, k in ((1, 2), (2, 4)):
        f = lambda t: raised_kernel(kind, Q, t, v, m - 1, ctx40)
        dx, dy = _partials(f, z, ctx40)
        fd = 2j * (dx - 1j * dy) / 2 + k * f(z) / z.imag
        closed = raised_kernel(kind, Q, z, v, m, ctx40)
        assert abs(fd - closed) <= 1e-7 * abs(closed) + mp.mpf(10) ** -30


@pytest.mark.parametrize("Q", [Form(1, 0, 1), Form(1, 1, 1), Form(2, 1, 3), Form(1, -1, 2)])
def test_eta_regular_part_decays_linearly(Q, ctx40):
    mp = ctx40.mp
    zq = cm_point(Q, ctx40).value
    D = Q.discriminant
    for k in range(8):
        direction = mp.expjpi(mp.mpf(k) / 4)
        errs = []
        for t in (mp.mpf("1e-3"), mp.mpf("5e-4"), mp.mpf("2.5e-4")):
            z = zq + t * direction
            sign = 1 if q_z(Q, z) > 0 else -1
            diff = kernel("eta_KM", Q, z, 1, ctx40) - sign * mp.sqrt(-D) / (2 * mp.pi * q_of(Q, z))
            errs.append(abs(diff))
        assert errs[2] < errs[1] < errs[0]
        assert 1.8 < errs[0] / errs[1] < 2.2 and 1.8 < errs[1] / errs[2] < 2.2


# --- singular coefficients and the completion ----------------------------------------

@pytest.mark.parametrize("D, v", sorted(SINGULAR_R2))
def test_singular_coefficient_values(D, v, ctx):
    got = singular_theta_coeff(D, 2, v, ctx).value
    assert _close(got, ctx.mp.mpf(SINGULAR_R2[(D, v)]), 1e-28)
    assert abs(got.imag) <= ctx.tail_tolerance


def test_singular_coefficient_edge_cases(ctx40):
    for D in (-2, -1, 2, 3, 6, 7):
        assert singular_theta_coeff(D, 2, 1, ctx40).value == 0
        assert completion_coefficient(D, 1, ctx40) == 0
    with pytest.raises(ValueError):
        singular_theta_coeff(-3, 3, 1, ctx40)


def test_exclusion_is_by_point_not_by_class(ctx40):
    # D = -3: only +-[1,-1,1] have z_Q = rho; [1,1,1] is in the same class but stays in the sum
    r = rho(ctx40)
    assert abs(cm_point(Form(1, -1, 1), ctx40).value - r) < ctx40.mp.mpf(10) ** -35
    assert abs(cm_point(Form(1, 1, 1), ctx40).value - r) > 0.5
    assert abs(singular_theta_coeff(-3, 2, 0.5, ctx40).value) > 1e-12


@pytest.mark.parametrize("D", [-3, -4, -7, 0, 5])
@pytest.mark.parametrize("coeff", [singular_theta_coeff, star_theta_coeff])
def test_rotation_at_rho_kills_low_raisings(D, coeff, ctx40):
    # z -> -1/(z+1) fixes rho and multiplies the m-th coefficient by a nontrivial cube root of unity
    # unless 2m + 2 is divisible by 6
    tiny = ctx40.mp.mpf(10) ** -35
    assert abs(coeff(D, 0, 0.5, ctx40).value) < tiny
    assert abs(coeff(D, 1, 0.5, ctx40).value) < tiny
    assert abs(coeff(D, 2, 0.5, ctx40).value) > 1e-15


@pytest.mark.parametrize("D", [-3, -4, -7, -12])
def test_completion_tends_to_twice_the_trace(D, ctx):
    c = completion(D, ctx)
    target = 2 * trace(D, ctx).value
    gaps = [abs(c(v) - target) for v in (1, 5, 10)]
    assert gaps[2] < gaps[1] < gaps[0] or gaps[2] < ctx.tail_tolerance
    assert gaps[1] < 1e-20
    assert len(c.v_samples) == 3


def test_lowered_completion_zero_for_impossible_discriminants(ctx40):
    report = lowering_and_xi_checks([-1, 2], [1.0], ctx40)
    for row in report.rows:
        assert row["finite_difference"] == 0 and row["closed_form"] == 0


def test_lowering_report_single_point(ctx):
    report = lowering_and_xi_checks([-3], [1.0], ctx)
    assert report.max_relative_error < 1e-6
    assert abs(report.rows[0]["closed_form"]) > 0


@pytest.mark.parametrize("D, v", [(-4, 1.0), (0, 0.7), (5, 0.5)])
def test_lowered_singular_part_against_finite_difference(D, v, ctx):
    mp = ctx.mp
    d, _ = richardson_derivative(lambda t: completion_coefficient(D, t, ctx), mp.mpf(v), v / 16, ctx)
    closed = lowered_singular_part(D, v, ctx)
    assert abs(v * v * d - closed) <= 1e-8 * abs(closed)


# --- splitting --------------------------------------------------------------------

def _lattice_to_form_by_hand(a, b, c):
    A = (a - b) // 3
    B = c - A
    return Form(A, B, (b + A - B) // 2)


def test_substitution_is_a_bijection_onto_the_congruence_lattice():
    R = 20
    image = set()
    for A in range(-R, R + 1):
        for B in range(-R, R + 1):
            for C in range(-R, R + 1):
                a, b, c = form_to_lattice(Form(A, B, C))
                assert (a - b) % 3 == 0 and (b - c) % 2 == 0
                assert _lattice_to_form_by_hand(a, b, c) == Form(A, B, C)
                image.add((a, b, c))
    assert len(image) == (2 * R + 1) ** 3
    for a in range(-R, R + 1):
        for b in range(-R, R + 1):
            for c in range(-R, R + 1):
                if (a - b) % 3 == 0 and (b - c) % 2 == 0:
                    assert form_to_lattice(_lattice_to_form_by_hand(a, b, c)) == (a, b, c)


@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30))
def test_values_at_rho_in_lattice_coordinates(A, B, C):
    mp = CTX.mp
    Q = Form(A, B, C)
    a, b, c = form_to_lattice(Q)
    r = rho(CTX)
    s3 = mp.sqrt(3)
    assert abs(q_z(Q, r) - a / s3) < mp.mpf(10) ** -35
    assert abs(mp.conj(q_of(Q, r)) - (mp.mpf(b) / 2 - 1j * s3 / 2 * c)) < mp.mpf(10) ** -35


@pytest.mark.parametrize("tau", [0.5j, 1j, 1 / 3 + 2j / 3])
def test_splitting_identity(tau, ctx40):
    res = splitting_sides(tau, ctx40)
    assert res.difference < 1e-10
    assert res.tail_bound < 1e-12


# --- theta_{7/2} decomposition ------------------------------------------------------

def test_decomposition_trivial_residue(ctx40):
    rep = example_2_1_decomposition(0, 1j, ctx40)
    assert abs(rep.theta) < ctx40.mp.mpf(10) ** -35 and abs(rep.decomposition) < ctx40.mp.mpf(10) ** -35


@pytest.mark.parametrize("tau", [1j, 0.25 + 0.5j])
def test_decomposition_and_xi_image(tau, ctx40):
    rep = example_2_1_decomposition(1, tau, ctx40)
    assert rep.decomposition_error < 10 * ctx40.tail_tolerance
    assert _close(rep.xi_ratio, rep.predicted_ratio, 1e-8)
