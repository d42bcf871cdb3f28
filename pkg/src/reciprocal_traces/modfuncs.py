"""Level-one modular forms: q-expansions, evaluation, raising operators and
Laurent expansions in the disc coordinate X_rho around rho = exp(pi i / 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from mpmath.ctx_mp import MPContext

from .numerics import (PrecisionContext, QExpansion, gamma_eval, series_invert, series_multiply,
                       tail_sum_bound)
from .quadforms import Matrix, matmul, IDENTITY

GUARD_DIGITS = 20
WEIGHTS = {"E2*": 2, "E4": 4, "E6": 6, "Delta": 12, "j": 0, "1/j": 0}


class PoleError(ArithmeticError):
    pass


def rho(ctx: PrecisionContext):
    mp = ctx.mp
    return mp.mpc(mp.mpf(1) / 2, mp.sqrt(3) / 2)


def x_rho(z, center):
    """Disc coordinate ``(z - center) / (z - conj(center))``."""
    return (z - center) / (z - center.conjugate())


def z_from_x(X, center):
    return (center - center.conjugate() * X) / (1 - X)


@lru_cache(maxsize=None)
def divisor_sums(k: int, n_max: int) -> tuple[int, ...]:
    """``sigma_k(n)`` for ``0 <= n < n_max`` (entry 0 is 0)."""
    s = [0] * n_max
    for d in range(1, n_max):
        dk = d ** k
        for m in range(d, n_max, d):
            s[m] += dk
    return tuple(s)


@lru_cache(maxsize=None)
def _eisenstein_coeffs(weight: int, n_max: int) -> tuple[int, ...]:
    factor = {2: -24, 4: 240, 6: -504}[weight]
    sig = divisor_sums(weight - 1, n_max)
    return (1,) + tuple(factor * sig[n] for n in range(1, n_max))


@lru_cache(maxsize=None)
def _delta_coeffs(n_max: int) -> tuple[int, ...]:
    e4 = QExpansion.from_list(_eisenstein_coeffs(4, n_max))
    e6 = QExpansion.from_list(_eisenstein_coeffs(6, n_max))
    d = (e4 ** 3 - e6 * e6) / 1728
    out = [0] * n_max
    for e, c in d.terms:
        assert c.denominator == 1
        out[int(e)] = int(c)
    return tuple(out)


@dataclass(frozen=True)
class AlmostHolomorphicForm:
    """``(-4 pi)^prefactor_power * sum_m parts[m](q) * t^m`` with ``t = 1/(4 pi y)``.

    Coefficients of every part stay exact; the transcendental factor is
    tracked in ``prefactor_power``.
    """

    weight: int
    parts: tuple[QExpansion, ...]
    prefactor_power: int = 0

    def evaluate(self, z, ctx: PrecisionContext):
        return _eval_almost_holomorphic(self, z, ctx)


def build_series(name: str, ctx: PrecisionContext, order: int | None = None):
    """q-expansion of ``E2*`` (almost holomorphic), ``E4``, ``E6``, ``Delta`` or ``j``."""
    n = order or ctx.series_order
    if name == "E2*":
        e2 = QExpansion.from_list(_eisenstein_coeffs(2, n))
        return AlmostHolomorphicForm(2, (e2, QExpansion.from_list([-12], truncation=n)))
    if name in ("E4", "E6"):
        return QExpansion.from_list(_eisenstein_coeffs(int(name[1]), n))
    if name == "Delta":
        return QExpansion.from_list(_delta_coeffs(n))
    if name == "j":
        e4 = QExpansion.from_list(_eisenstein_coeffs(4, n))
        delta = QExpansion.from_list(_delta_coeffs(n))
        return series_multiply(e4 ** 3, series_invert(delta))
    raise ValueError(f"unknown series {name!r}")


def holomorphic_form(name: str, ctx: PrecisionContext, order: int | None = None) -> AlmostHolomorphicForm:
    """Wrap ``E4``, ``E6``, ``Delta`` or ``j`` for use with :func:`raise_form`."""
    return AlmostHolomorphicForm(WEIGHTS[name], (build_series(name, ctx, order),))


def raise_form(form: AlmostHolomorphicForm, times: int) -> AlmostHolomorphicForm:
    """Apply ``R_k = 2i d/dz + k/y`` repeatedly.

    On ``f(q) t^m`` this is ``-4 pi [ (q d/dq f) t^m + (m - k) f t^(m+1) ]``.
    """
    if times < 0:
        raise ValueError("times must be non-negative")
    for _ in range(times):
        k = form.weight
        trunc = min(p.truncation for p in form.parts)
        new = [QExpansion.zero(trunc) for _ in range(len(form.parts) + 1)]
        for m, f in enumerate(form.parts):
            new[m] = new[m] + f.theta_derivative()
            if m != k:
                new[m + 1] = new[m + 1] + f.scale(m - k)
        form = AlmostHolomorphicForm(k + 2, tuple(new), form.prefactor_power + 1)
    return form


def reduce_to_fundamental_domain(z, max_steps: int = 10_000) -> tuple[object, Matrix]:
    """Return ``(w, gamma)`` with ``w = gamma z`` in the standard fundamental domain."""
    if not z.imag > 0:
        raise ValueError("point must lie in the upper half-plane")
    g = IDENTITY
    for _ in range(max_steps):
        k = -math.floor(float(z.real) + 0.5)
        if k:
            z = z + k
            g = matmul(((1, k), (0, 1)), g)
        if abs(z) < 1:
            z = -1 / z
            g = matmul(((0, -1), (1, 0)), g)
        else:
            return z, g
    raise ArithmeticError("fundamental-domain reduction did not terminate")


class _Evaluator:
    """Series evaluation at a fixed working precision with cached coefficients."""

    def __init__(self, digits: int):
        self.mp = MPContext()
        self.mp.dps = digits
        # |q| <= exp(-pi sqrt 3) on the fundamental domain; n^5 sigma growth covers raised parts
        qmax = math.exp(-math.pi * math.sqrt(3))
        tol = 10.0 ** -(digits + 5)
        n = 8
        while 1e4 * n ** 8 * qmax ** n > tol:
            n += 1
        self.n_terms = n
        self.e2 = _eisenstein_coeffs(2, n)
        self.e4 = _eisenstein_coeffs(4, n)
        self.e6 = _eisenstein_coeffs(6, n)
        self.delta = _delta_coeffs(n)

    def powers(self, q):
        out = [self.mp.mpf(1)]
        for _ in range(1, self.n_terms):
            out.append(out[-1] * q)
        return out

    def holomorphic(self, qp):
        mp = self.mp
        e2 = mp.fsum(c * p for c, p in zip(self.e2, qp))
        e4 = mp.fsum(c * p for c, p in zip(self.e4, qp))
        e6 = mp.fsum(c * p for c, p in zip(self.e6, qp))
        delta = mp.fsum(c * p for c, p in zip(self.delta, qp))
        return e2, e4, e6, delta


@lru_cache(maxsize=16)
def _evaluator(digits: int) -> _Evaluator:
    return _Evaluator(digits)


def _reduced_values(z, digits: int):
    ev = _evaluator(digits)
    mp = ev.mp
    z = mp.mpc(z)
    w, g = reduce_to_fundamental_domain(z)
    q = mp.exp(2 * mp.pi * mp.mpc(0, 1) * w)
    return ev, w, g, ev.holomorphic(ev.powers(q))


def near_rho_orbit(w, digits: int) -> bool:
    """Whether a reduced point ``w`` lies within ``10^(-digits/2)`` of rho or rho - 1."""
    mp = w.context
    r = mp.mpc(mp.mpf(1) / 2, mp.sqrt(3) / 2)
    tol = mp.mpf(10) ** (-mp.mpf(digits) / 2)
    return abs(w - r) < tol or abs(w - r + 1) < tol


def eval_modular(name: str, z, ctx: PrecisionContext):
    """Value of ``E2*``, ``E4``, ``E6``, ``Delta``, ``j`` or ``1/j`` at ``z``."""
    if name not in WEIGHTS:
        raise ValueError(f"unknown modular function {name!r}")
    digits = ctx.precision_digits + GUARD_DIGITS
    ev, w, g, (e2, e4, e6, delta) = _reduced_values(z, digits)
    if name in ("j", "1/j"):
        if near_rho_orbit(w, ctx.precision_digits):
            if name == "1/j":
                raise PoleError("1/j has a pole at this point (Gamma-equivalent to rho)")
            return ctx.mp.mpc(0)
        # E4 has a simple zero at rho: j ~ E4^3 loses three digits per digit of |E4|
        lost = max(0, -int(ev.mp.log10(abs(e4))))
        if 3 * lost > GUARD_DIGITS // 2:
            digits += 3 * lost
            ev, w, g, (e2, e4, e6, delta) = _reduced_values(z, digits)
    mp = ev.mp
    if name == "E2*":
        value = e2 - 3 / (mp.pi * w.imag)
    elif name == "j":
        value = e4 ** 3 / delta
    elif name == "1/j":
        value = delta / e4 ** 3
    else:
        value = {"E4": e4, "E6": e6, "Delta": delta}[name]
    k = WEIGHTS[name]
    if k:
        (_, _), (c, d) = g
        value = value / (c * mp.mpc(z) + d) ** k
    return ctx.mp.mpc(value)


def _eval_almost_holomorphic(form: AlmostHolomorphicForm, z, ctx: PrecisionContext):
    digits = ctx.precision_digits + GUARD_DIGITS
    ev = _evaluator(digits)
    mp = ev.mp
    z = mp.mpc(z)
    w, g = reduce_to_fundamental_domain(z)
    q = mp.exp(2 * mp.pi * mp.mpc(0, 1) * w)
    t = 1 / (4 * mp.pi * w.imag)
    total = mp.mpc(0)
    for m, part in enumerate(form.parts):
        if not part.terms:
            continue
        s = part.evaluate(lambda e: q ** int(e))
        total += s * t ** m
    total *= (-4 * mp.pi) ** form.prefactor_power
    (_, _), (c, d) = g
    total = total / (c * z + d) ** form.weight
    return ctx.mp.mpc(total)


@dataclass(frozen=True)
class EllipticExpansion:
    """``f(z) = sum_n c(n) X_center(z)^n`` for ``n_min <= n <= n_max``.

    ``vanishing_below`` records the order below which coefficients are zero
    exactly (not merely unstored).
    """

    center: object
    coefficients: dict = field(hash=False)
    n_min: int
    n_max: int
    error: float = 0.0
    vanishing_below: int | None = None

    def __getitem__(self, n: int):
        if self.n_min <= n <= self.n_max:
            return self.coefficients[n]
        if self.vanishing_below is not None and n < self.vanishing_below:
            return 0
        raise KeyError(f"coefficient {n} outside the stored range [{self.n_min}, {self.n_max}]")

    def evaluate(self, z):
        X = x_rho(z, self.center)
        return sum(c * X ** n for n, c in self.coefficients.items())


def _contour_samples(n_points: int) -> int:
    return 8 * math.ceil(n_points / 8)


def elliptic_coefficients(name: str, n_max: int, ctx: PrecisionContext,
                          radius=Fraction(1, 4)) -> EllipticExpansion:
    """Elliptic expansion of ``j`` or ``1/j`` at rho.

    ``j`` is sampled on ``|X| = radius`` and its Taylor coefficients are
    extracted with the trapezoid rule; ``1/j`` is obtained by Laurent
    inversion of the order-3 zero of ``j``.
    """
    radius = Fraction(radius)
    if not 0 < radius <= Fraction(1, 2):
        raise ValueError("contour radius must lie in (0, 1/2]")
    if name not in ("j", "1/j"):
        raise ValueError(f"no elliptic expansion available for {name!r}")
    n_j = n_max if name == "j" else n_max + 6
    digits = ctx.precision_digits + GUARD_DIGITS + math.ceil(n_j * math.log10(1 / float(radius)))
    sub = PrecisionContext(digits)
    mp = sub.mp
    r = sub.mpf(radius)
    # aliasing c(n + N) r^N is bounded through |c(m)| <= M s^-m on the larger circle |X| = s
    s_out = (1 + float(radius)) / 2
    n_points = _contour_samples((digits + 12 + n_j * math.log10(1 / s_out)) / math.log10(s_out / float(radius)))
    centre = rho(sub)
    samples = []
    for k in range(n_points):
        w = r * mp.expjpi(mp.mpf(2 * k) / n_points)
        samples.append((w, eval_modular("j", z_from_x(w, centre), sub)))
    coeffs = {}
    for n in range(0, n_j + 1):
        acc = mp.fsum(val * w ** (-n) for w, val in samples)
        coeffs[n] = acc / n_points
    tol = float(mp.mpf(10) ** (-ctx.precision_digits + 5)) * max(1.0, float(abs(coeffs[3])))
    if name == "j":
        out = {n: ctx.mp.mpc(c) for n, c in coeffs.items()}
        return EllipticExpansion(rho(ctx), out, 0, n_max, error=tol, vanishing_below=0)
    for n in range(3):
        if abs(coeffs[n]) > tol:
            raise ArithmeticError("j does not vanish to order 3 at rho numerically")
    local = QExpansion.from_mapping({n - 3: coeffs[n] for n in range(3, n_j + 1)}, n_j - 2)
    inv = series_invert(local).shift(-3)
    out = {n: ctx.mp.mpc(inv[n]) for n in range(-3, n_max + 1)}
    return EllipticExpansion(rho(ctx), out, -3, n_max, error=tol, vanishing_below=-3)


def taylor_raised_values(expansion: EllipticExpansion, ns, ctx: PrecisionContext) -> dict:
    """``R_0^n f(center) = c(n) n! / Im(center)^n`` from a holomorphic elliptic expansion."""
    y = expansion.center.imag
    return {n: expansion[n] * ctx.mp.factorial(n) / y ** n for n in ns}


def chowla_selberg(ctx: PrecisionContext):
    """Chowla-Selberg period of Q(sqrt(-3))."""
    mp = ctx.mp
    ratio = gamma_eval(Fraction(1, 3), ctx) / gamma_eval(Fraction(2, 3), ctx)
    return ratio ** mp.mpf(1.5) / mp.sqrt(6 * mp.pi)
