"""Theta functions and Kudla-Millson kernels around the elliptic point rho.

Lattice sums are truncated at a Euclidean radius ``cutoff`` in the natural
summation coordinates and carry an explicit bound on the omitted tail:

* unary thetas sum over integers ``a`` with ``|a| <= cutoff``;
* the binary theta and the singular coefficients run over pairs ``(b, c)``
  with ``b^2 + 3 c^2 <= cutoff^2``.  At rho these are the coordinates in which
  ``conj Q(rho, 1) = (b - i sqrt(3) c) / 2``.

Kernel conventions: ``w = Q_z``, ``P = Q(z, 1)``, ``y = Im z`` and
``E = exp(-4 pi v |P|^2 / y^2)``.  Note ``|P|^2 / y^2 = w^2 + D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Callable, Iterable

import numpy as np

from .modfuncs import PoleError, rho
from .numerics import PrecisionContext, richardson_derivative, tail_sum_bound
from .quadforms import Form, q_of, q_z
from .traces import PoleData, elliptic_pairing, reciprocal_j, trace, trace_zero

KERNELS = ("phi_KM", "phi_star_KM", "eta_KM")
_SQRT3 = math.sqrt(3.0)
_Y_RHO = _SQRT3 / 2


@dataclass(frozen=True)
class ThetaValue:
    value: object
    cutoff: float
    tail_bound: float


def _residue(h: int) -> int:
    return h % 3


def _mp_tau(tau, ctx: PrecisionContext):
    tau = ctx.mp.mpc(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    return tau


def _pick_radius(term_bound: Callable[[int], float], tol: float, start: int = 0) -> int:
    """Smallest ``N >= start`` with ``sum_{n > N} term_bound(n) < tol``."""
    n = max(start, 0)
    while tail_sum_bound(term_bound, n + 1) >= tol:
        n += 1
    return n


def _cutoff_override(cutoff, ctx: PrecisionContext):
    return cutoff if cutoff is not None else ctx.lattice_cutoff


# --- unary and binary thetas ------------------------------------------------

def _unary_term_bound(weight: Fraction, v: float) -> Callable[[int], float]:
    if weight == Fraction(3, 2):
        return lambda a: 2 * a * math.exp(-2 * math.pi * v * a * a / 3)
    k = 2 * math.sqrt(math.pi * v / 3)

    def bound(a):
        x = k * a
        return 2 * v ** -1.5 * (8 * x ** 3 + 12 * x) * math.exp(-2 * math.pi * v * a * a / 3)
    return bound


def theta_unary(weight, h: int, tau, ctx: PrecisionContext, cutoff: float | None = None) -> ThetaValue:
    """``theta_{3/2,h}`` or ``theta_{7/2,h}``: sums over ``a = h (mod 3)``."""
    weight = Fraction(weight)
    if weight not in (Fraction(3, 2), Fraction(7, 2)):
        raise ValueError("weight must be 3/2 or 7/2")
    mp = ctx.mp
    tau = _mp_tau(tau, ctx)
    v = tau.imag
    term_bound = _unary_term_bound(weight, float(v))
    cutoff = _cutoff_override(cutoff, ctx)
    A = _pick_radius(term_bound, ctx.tail_tolerance) if cutoff is None else int(math.floor(cutoff))
    tail = tail_sum_bound(term_bound, A + 1)
    r = _residue(h)
    total = mp.mpc(0)
    if weight == Fraction(3, 2):
        coeff = lambda a: a
    else:
        k = 2 * mp.sqrt(mp.pi * v / 3)
        scale = v ** mp.mpf(-1.5)
        coeff = lambda a: scale * ((8 * (k * a) ** 3) - 12 * (k * a))
    for a in range(-A, A + 1):
        if a % 3 != r:
            continue
        total += coeff(a) * mp.exp(2j * mp.pi * tau * a * a / 3)
    return ThetaValue(total, float(A), tail)


def _binary_term_bound(v: float) -> Callable[[int], float]:
    def bound(n):
        shell = 2 * (2 * math.sqrt(n / 3) + 1)
        return shell * n ** 1.5 * math.exp(-2 * math.pi * v * n / 3)
    return bound


def _ellipse_points(n_max: int) -> Iterable[tuple[int, int]]:
    """Integer pairs with ``b^2 + 3 c^2 <= n_max`` in a fixed order."""
    c_max = isqrt(n_max // 3)
    for c in range(-c_max, c_max + 1):
        b_max = isqrt(n_max - 3 * c * c)
        for b in range(-b_max, b_max + 1):
            yield b, c


def theta_binary_4(h: int, tau, ctx: PrecisionContext, cutoff: float | None = None) -> ThetaValue:
    """``theta_{4,h} = sum (b - i sqrt3 c)^3 q^{b^2/3 + c^2}`` over ``b = h (3)``, ``b = c (2)``."""
    mp = ctx.mp
    tau = _mp_tau(tau, ctx)
    term_bound = _binary_term_bound(float(tau.imag))
    cutoff = _cutoff_override(cutoff, ctx)
    N = _pick_radius(term_bound, ctx.tail_tolerance) if cutoff is None else int(math.floor(cutoff ** 2))
    tail = tail_sum_bound(term_bound, N + 1)
    r = _residue(h)
    s3 = mp.sqrt(3)
    total = mp.mpc(0)
    for b, c in _ellipse_points(N):
        if b % 3 != r or (b - c) % 2:
            continue
        total += mp.mpc(b, -s3 * c) ** 3 * mp.exp(2j * mp.pi * tau * (mp.mpf(b * b) / 3 + c * c))
    return ThetaValue(total, math.sqrt(N), tail)


def shadow_combination(tau, ctx: PrecisionContext):
    """``sum_h v^{7/2} conj(theta_{7/2,h}) theta_{4,h}``."""
    tau = _mp_tau(tau, ctx)
    v = tau.imag
    total = ctx.mp.mpc(0)
    for h in range(3):
        t7 = theta_unary(Fraction(7, 2), h, tau, ctx).value
        t4 = theta_binary_4(h, tau, ctx).value
        total += ctx.mp.conj(t7) * t4
    return v ** ctx.mp.mpf(3.5) * total


# --- kernels ----------------------------------------------------------------

def _kernel_parts(Q: Form, z, v, ctx: PrecisionContext):
    mp = ctx.mp
    z = mp.mpc(z)
    v = mp.mpf(v)
    if z.imag <= 0 or v <= 0:
        raise ValueError("need Im z > 0 and v > 0")
    w = q_z(Q, z)
    P = q_of(Q, z)
    y = z.imag
    E = mp.exp(-4 * mp.pi * v * abs(P) ** 2 / y ** 2)
    return mp, w, P, y, v, E


def _check_pole(P, Q: Form, z, ctx: PrecisionContext):
    scale = abs(Q.a) * abs(z) ** 2 + abs(Q.b) * abs(z) + abs(Q.c)
    if abs(P) <= scale * ctx.eps * 100:
        raise PoleError(f"eta_KM has a pole at the CM point of {Q}")


def kernel(kind: str, Q: Form, z, v, ctx: PrecisionContext):
    """``phi_KM``, ``phi_star_KM`` or ``eta_KM`` at ``(Q, z, v)``, Gaussian factor included."""
    return raised_kernel(kind, Q, z, v, 0, ctx)


def raised_kernel(kind: str, Q: Form, z, v, m: int, ctx: PrecisionContext):
    """``R_2^m`` (weight 2 then 4) of ``eta_KM`` or ``phi_star_KM`` in ``z``; ``m <= 2``.

    ``phi_KM`` is only available unraised.
    """
    if kind not in KERNELS:
        raise ValueError(f"unknown kernel {kind!r}")
    if not 0 <= m <= 2 or (kind == "phi_KM" and m):
        raise ValueError(f"R^{m} of {kind} is not supported")
    mp, w, P, y, v, E = _kernel_parts(Q, z, v, ctx)
    pi = mp.pi
    Pb = mp.conj(P)
    if kind == "phi_KM":
        return (4 * v * w * w - 1 / (2 * pi)) * E
    if kind == "phi_star_KM":
        if m == 0:
            return -v * v / (2 * y * y) * Pb * w * E
        if m == 1:
            return -Pb ** 2 * v * v * (8 * pi * v * w * w - 1) / (2 * y ** 4) * E
        return Pb ** 3 / y ** 6 * (12 * pi * v ** 3 * w - 32 * pi ** 2 * v ** 4 * w ** 3) * E
    _check_pole(P, Q, z, ctx)
    if m == 0:
        return w / (2 * pi * P) * E
    if m == 1:
        return E * (8 * pi * v * P * Pb * w * w - P * Pb + 2 * w * w * y * y) / (2 * pi * P * P * y * y)
    y2, y4 = y * y, y ** 4
    return E * ((32 * pi * Pb ** 2 * v * v * w ** 3 / y4 - 12 * Pb ** 2 * v * w / y4) / P
                + (16 * Pb * v * w ** 3 / y2 - 3 * Pb * w / (pi * y2)) / P ** 2
                + 4 * w ** 3 / (pi * P ** 3))


# --- singular theta coefficients at rho ----------------------------------------

def _lattice_to_form(a: int, b: int, c: int) -> Form | None:
    """Invert ``(A, B, C) -> (2A+B+2C, -A+B+2C, A+B)``; ``None`` off the image."""
    if (a - b) % 3:
        return None
    A = (a - b) // 3
    B = c - A
    if (b + A - B) % 2:
        return None
    return Form(A, B, (b + A - B) // 2)


def form_to_lattice(Q: Form) -> tuple[int, int, int]:
    A, B, C = Q
    return 2 * A + B + 2 * C, -A + B + 2 * C, A + B


def _forms_at_rho(D: int, n_max: int) -> Iterable[tuple[int, Form]]:
    """Forms of discriminant ``D`` with ``0 < |Q(rho,1)|^2 / Im(rho)^2 <= n_max / 3``.

    Yields ``(n, Q)`` where ``n = b^2 + 3 c^2``; the pair ``b = c = 0`` is the
    excluded one (``Q = 0`` or ``z_Q = rho``).
    """
    for b, c in _ellipse_points(n_max):
        n = b * b + 3 * c * c
        if n == 0:
            continue
        a2 = n - 3 * D
        if a2 < 0:
            continue
        a = isqrt(a2)
        if a * a != a2:
            continue
        for sa in ((a, -a) if a else (0,)):
            Q = _lattice_to_form(sa, b, c)
            if Q is not None:
                yield n, Q


def _singular_term_bound(D: int, m: int, v: float, star: bool) -> Callable[[int], float]:
    y = _Y_RHO

    def bound(n):
        if n == 0:
            return 0.0
        s = math.sqrt(n / 3)  # |P| / y
        W = math.sqrt(max(n - 3 * D, 0) / 3)
        E = math.exp(-4 * math.pi * v * s * s)
        count = 4 * (2 * math.sqrt(n / 3) + 1)
        if star:
            term = (s * y) ** 3 / y ** 6 * (12 * math.pi * v ** 3 * W + 32 * math.pi ** 2 * v ** 4 * W ** 3)
        elif m == 0:
            term = W / (2 * math.pi * s * y)
        elif m == 1:
            term = (8 * math.pi * v * W * W * s * s + s * s + 2 * W * W) / (2 * math.pi * s * s * y * y)
        else:
            term = ((32 * math.pi * v * v * W ** 3 + 12 * v * W) * s / y ** 3
                    + (16 * v * W ** 3 + 3 * W / math.pi) / (s * y ** 3)
                    + 4 * W ** 3 / (math.pi * s ** 3 * y ** 3))
        return count * term * E
    return bound


def _rho_lattice_sum(D: int, m: int, v, ctx: PrecisionContext, kind: str, cutoff: float | None) -> ThetaValue:
    if m < 0 or m > 2:
        raise ValueError("only m <= 2 is supported")
    mp = ctx.mp
    if D % 4 in (2, 3):
        return ThetaValue(mp.mpc(0), 0.0, 0.0)
    v = mp.mpf(v)
    if v <= 0:
        raise ValueError("v must be positive")
    term_bound = _singular_term_bound(D, m, float(v), kind == "phi_star_KM")
    cutoff = _cutoff_override(cutoff, ctx)
    if cutoff is None:
        N = _pick_radius(term_bound, ctx.tail_tolerance, start=max(3 * D, 1))
    else:
        N = int(math.floor(cutoff ** 2))
    tail = tail_sum_bound(term_bound, N + 1)
    r = rho(ctx)
    total = mp.mpc(0)
    for _, Q in _forms_at_rho(D, N):
        total += raised_kernel(kind, Q, r, v, m, ctx)
    return ThetaValue(total, math.sqrt(N), tail)


def singular_theta_coeff(D: int, m: int, v, ctx: PrecisionContext, cutoff: float | None = None) -> ThetaValue:
    """``sum_{Q in Q_D, z_Q != rho} R_2^m eta_KM(Q, z, v)`` at ``z = rho``."""
    return _rho_lattice_sum(D, m, v, ctx, "eta_KM", cutoff)


def star_theta_coeff(D: int, m: int, v, ctx: PrecisionContext, cutoff: float | None = None) -> ThetaValue:
    """``D``-th coefficient of ``R_2^m Theta*_KM`` at ``rho`` (as a function of ``v``)."""
    return _rho_lattice_sum(D, m, v, ctx, "phi_star_KM", cutoff)


# --- completion coefficients --------------------------------------------------

def _trace_part(D: int, ctx: PrecisionContext):
    if D > 0 or D % 4 in (2, 3):
        return ctx.mp.mpf(0)
    if D == 0:
        return trace_zero(ctx).value
    return trace(D, ctx).value


def _singular_part(D: int, v, ctx: PrecisionContext, pole: PoleData, coeff: Callable = singular_theta_coeff):
    exp = pole.expansion
    raised = {}
    for n in range(1, pole.pole_order + 1):
        if abs(exp[-n]) > exp.error:
            raised[n] = coeff(D, n - 1, v, ctx).value
    return elliptic_pairing(exp, raised) / pole.stabilizer


@dataclass
class CompletionCoefficient:
    """``c(D, v) = 2 tr(D) + singular_part(v)`` for ``f = 1/j``."""

    D: int
    trace_part: object
    singular_part: Callable
    v_samples: list = field(default_factory=list)

    def __call__(self, v):
        value = 2 * self.trace_part + self.singular_part(v)
        self.v_samples.append((v, value))
        return value


def completion(D: int, ctx: PrecisionContext) -> CompletionCoefficient:
    pole = reciprocal_j(ctx)
    return CompletionCoefficient(D, _trace_part(D, ctx), lambda v: _singular_part(D, v, ctx, pole))


def completion_coefficient(D: int, v, ctx: PrecisionContext):
    """The ``q^{-D}`` coefficient ``c(D, v)`` of the completed lift of ``1/j``."""
    return completion(D, ctx)(v)


def lowered_singular_part(D: int, v, ctx: PrecisionContext):
    """Closed-form ``v^2 d/dv`` of ``c(D, v)``: four times the ``Theta*`` side."""
    return 4 * _singular_part(D, v, ctx, reciprocal_j(ctx), star_theta_coeff)


# --- splitting identity ---------------------------------------------------------

def _splitting_term_bound(v: float) -> Callable[[int], float]:
    y = _Y_RHO

    def bound(k):
        # shell a^2 + b^2 + 3c^2 = k, i.e. w^2 + |P|^2/y^2 = k/3
        M = k / 3
        count = 2 * (2 * math.sqrt(k) + 1) * (2 * math.sqrt(k / 3) + 1)
        term = M ** 1.5 / y ** 3 * (12 * math.pi * v ** 3 * math.sqrt(M) + 32 * math.pi ** 2 * v ** 4 * M ** 1.5)
        return count * term * math.exp(-2 * math.pi * v * M)
    return bound


@lru_cache(maxsize=1)
def _majorant_extent() -> np.ndarray:
    """Box half-widths per unit majorant for ``Q_rho^2 + |Q(rho,1)|^2 / Im(rho)^2``."""
    r = complex(-0.5, _Y_RHO)

    def M(vec):
        Q = Form(*vec)
        return q_z(Q, r) ** 2 + abs(q_of(Q, r)) ** 2 / r.imag ** 2

    basis = np.eye(3, dtype=int)
    G = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            G[i, j] = (M(basis[i] + basis[j]) - M(basis[i]) - M(basis[j])) / 2
    return np.sqrt(np.diag(np.linalg.inv(G)))


@dataclass(frozen=True)
class SplittingResult:
    lhs: object
    rhs: object
    tail_bound: float
    shell: int

    @property
    def difference(self):
        return abs(self.lhs - self.rhs)


def splitting_sides(tau, ctx: PrecisionContext, tol: float = 1e-14) -> SplittingResult:
    """Both sides of the factorisation of ``R_2^2 Theta*_KM(rho, tau)``.

    The left side sums the closed kernel over integral forms ``[A, B, C]``; the
    right side is the product expression over the congruence lattice
    ``a = b (mod 3)``, ``b = c (mod 2)``.  Both keep the same shells
    ``a^2 + b^2 + 3 c^2 <= shell``.
    """
    mp = ctx.mp
    tau = _mp_tau(tau, ctx)
    v = tau.imag
    pi = mp.pi
    term_bound = _splitting_term_bound(float(v))
    K = _pick_radius(term_bound, tol)
    tail = tail_sum_bound(term_bound, K + 1)

    r = rho(ctx)
    y = r.imag
    Mmax = K / 3
    widths = np.ceil(_majorant_extent() * math.sqrt(Mmax)).astype(int) + 1
    lhs = mp.mpc(0)
    for A in range(-widths[0], widths[0] + 1):
        for B in range(-widths[1], widths[1] + 1):
            for C in range(-widths[2], widths[2] + 1):
                Q = Form(A, B, C)
                w = q_z(Q, r)
                P = q_of(Q, r)
                M = w * w + abs(P) ** 2 / y ** 2
                if 3 * M > K + 0.5:
                    continue
                D = Q.discriminant
                gauss = mp.exp(-4 * pi * v * abs(P) ** 2 / y ** 2)
                lhs += (mp.conj(P) ** 3 / y ** 6 * (12 * pi * v ** 3 * w - 32 * pi ** 2 * v ** 4 * w ** 3)
                        * gauss * mp.exp(-2j * pi * D * tau))

    s3 = mp.sqrt(3)
    rhs = mp.mpc(0)
    a_max = isqrt(K)
    for a in range(-a_max, a_max + 1):
        rest = K - a * a
        e_a = mp.exp(2j * pi * a * a * tau / 3)
        poly = 36 * pi * v ** 3 * a - 32 * pi ** 2 * v ** 4 * a ** 3
        for b, c in _ellipse_points(rest):
            if (a - b) % 3 or (b - c) % 2:
                continue
            rhs += (poly * mp.mpc(b, -s3 * c) ** 3 * e_a
                    * mp.exp(-2j * pi * (mp.mpf(b * b) / 3 + c * c) * mp.conj(tau)))
    rhs *= 8 / (81 * s3)
    return SplittingResult(lhs, rhs, 2 * tail, K)


# --- lowering and xi checks -------------------------------------------------------

def _leading_shell(D: int) -> int:
    """Smallest ``b^2 + 3c^2`` among forms of discriminant ``D`` with ``Q(rho, 1) != 0``."""
    n = max(3 * D, 1)
    while next(_forms_at_rho(D, n), None) is None:
        n += 1
    return n


def _fd_step(D: int, v: float) -> float:
    # the singular part decays like exp(-4 pi v n0 / 3); keep h well inside that scale
    if D % 4 in (2, 3):
        return v / 16
    rate = 4 * math.pi * _leading_shell(D) / 3
    return min(v / 16, 0.5 / rate)


def lowered_completion_fd(D: int, v, ctx: PrecisionContext, step: float | None = None):
    """``v^2 d/dv c(D, v)`` by central differences with Richardson extrapolation."""
    mp = ctx.mp
    v = mp.mpf(v)
    pole = reciprocal_j(ctx)
    h = step if step is not None else _fd_step(D, float(v))
    deriv, err = richardson_derivative(lambda t: _singular_part(D, t, ctx, pole), v, h, ctx, levels=5)
    return v * v * deriv, v * v * err


def shadow_constant_prediction(ctx: PrecisionContext):
    """``xi_{3/2}`` of the completed lift over ``shadow_combination``, from the closed forms.

    Uses ``R^2 Theta*(rho, tau) = -(4 sqrt(pi)/27) v^4 sum_h theta_{7/2,h} conj(theta_{4,h})``.
    """
    mp = ctx.mp
    pole = reciprocal_j(ctx)
    y = pole.center.imag
    pref = -4 * mp.pi / pole.stabilizer * y ** 3 / 2 * pole.expansion[-3]
    return (-16 * mp.sqrt(mp.pi) / 27 * pref).real


def _assembly_range(v: float, tol: float) -> int:
    # each mode is bounded by a polynomial times exp(-2 pi v |D|)
    d = 1
    while (d + 1) ** 6 * math.exp(-2 * math.pi * v * d) > tol:
        d += 1
    return d


def xi_completed_lift(tau, ctx: PrecisionContext, tol: float = 1e-12):
    """``xi_{3/2}`` of the completed lift, mode by mode from finite-difference lowering."""
    mp = ctx.mp
    tau = _mp_tau(tau, ctx)
    v = tau.imag
    d_max = _assembly_range(float(v), tol)
    total = mp.mpc(0)
    for D in range(-d_max, d_max + 1):
        if D % 4 in (2, 3):
            continue
        lowered, _ = lowered_completion_fd(D, v, ctx)
        total += lowered * mp.exp(-2j * mp.pi * D * tau)
    return v ** mp.mpf(-0.5) * mp.conj(total)


@dataclass
class LoweringReport:
    rows: list = field(default_factory=list)
    xi_rows: list = field(default_factory=list)
    fitted_constant: object = None
    constant_spread: float = math.nan
    predicted_constant: object = None

    @property
    def max_relative_error(self) -> float:
        return max((r["relative_error"] for r in self.rows), default=0.0)


def _relative(a, b) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else float(abs(a - b) / scale)


def lowering_and_xi_checks(D_set, v_set, ctx: PrecisionContext, taus=()) -> LoweringReport:
    """Compare finite-difference lowering of ``c(D, v)`` with the ``Theta*`` side.

    If ``taus`` is given, ``xi_{3/2}`` of the completed lift is also assembled
    at each point and divided by :func:`shadow_combination`.
    """
    report = LoweringReport(predicted_constant=shadow_constant_prediction(ctx))
    for D in D_set:
        for v in v_set:
            fd, err = lowered_completion_fd(D, v, ctx)
            closed = lowered_singular_part(D, v, ctx)
            report.rows.append({"D": D, "v": v, "finite_difference": fd, "closed_form": closed,
                                "fd_error": float(err), "relative_error": _relative(fd, closed)})
    ratios = []
    for tau in taus:
        xi = xi_completed_lift(tau, ctx)
        shadow = shadow_combination(tau, ctx)
        ratio = xi / shadow
        ratios.append(ratio)
        report.xi_rows.append({"tau": tau, "xi": xi, "shadow": shadow, "ratio": ratio})
    if ratios:
        mean = sum(ratios) / len(ratios)
        report.fitted_constant = mean
        report.constant_spread = max(float(abs(r - mean) / abs(mean)) for r in ratios)
    return report


# --- theta_{7/2} decomposition ------------------------------------------------------

@dataclass(frozen=True)
class DecompositionReport:
    h: int
    theta: object
    decomposition: object
    xi_theta: object
    xi_ratio: object
    predicted_ratio: object

    @property
    def decomposition_error(self):
        return abs(self.theta - self.decomposition)


def _moment_sum(h: int, power: int, tau, ctx: PrecisionContext, A: int):
    mp = ctx.mp
    total = mp.mpc(0)
    for a in range(-A, A + 1):
        if a % 3 == _residue(h):
            total += mp.mpf(a) ** power * mp.exp(2j * mp.pi * tau * a * a / 3)
    return total


def xi_operator_fd(f: Callable, weight, tau, ctx: PrecisionContext):
    """``xi_k f = 2 i v^k conj(d f / d tau-bar)`` with finite differences in ``u`` and ``v``."""
    mp = ctx.mp
    tau = _mp_tau(tau, ctx)
    h = float(tau.imag) / 16
    du, _ = richardson_derivative(lambda u: f(mp.mpc(u, tau.imag)), tau.real, h, ctx)
    dv, _ = richardson_derivative(lambda t: f(mp.mpc(tau.real, t)), tau.imag, h, ctx)
    dbar = (du + 1j * dv) / 2
    return 2j * tau.imag ** ctx.mpf(Fraction(weight)) * mp.conj(dbar)


def example_2_1_decomposition(h: int, tau, ctx: PrecisionContext) -> DecompositionReport:
    """Split ``theta_{7/2,h}`` into its ``a^3`` and ``a`` parts and test its ``xi`` image."""
    mp = ctx.mp
    tau = _mp_tau(tau, ctx)
    v = tau.imag
    t7 = theta_unary(Fraction(7, 2), h, tau, ctx)
    A = int(t7.cutoff)
    sqpi = mp.sqrt(mp.pi)
    s3 = mp.sqrt(3)
    decomposition = (64 * mp.pi * sqpi / (3 * s3) * _moment_sum(h, 3, tau, ctx, A)
                     - 24 * sqpi / (s3 * v) * _moment_sum(h, 1, tau, ctx, A))
    xi = xi_operator_fd(lambda t: theta_unary(Fraction(7, 2), h, t, ctx, cutoff=A).value,
                        Fraction(7, 2), tau, ctx)
    base = v ** mp.mpf(1.5) * mp.conj(theta_unary(Fraction(3, 2), h, tau, ctx).value)
    ratio = xi / base if abs(base) > 0 else mp.mpc(0)
    return DecompositionReport(h, t7.value, decomposition, xi, ratio, 8 * mp.sqrt(3 * mp.pi))


__all__ = [
    "CompletionCoefficient", "DecompositionReport", "KERNELS", "LoweringReport", "SplittingResult",
    "ThetaValue", "completion", "completion_coefficient", "example_2_1_decomposition", "form_to_lattice",
    "kernel", "lowered_completion_fd", "lowered_singular_part", "lowering_and_xi_checks",
    "raised_kernel", "shadow_combination", "shadow_constant_prediction", "singular_theta_coeff",
    "splitting_sides", "star_theta_coeff", "theta_binary_4", "theta_unary", "xi_completed_lift",
    "xi_operator_fd",
]
