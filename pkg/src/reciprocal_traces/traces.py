"""Traces of CM values of 1/j and the regularised average value tr(0)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .modfuncs import (EllipticExpansion, PoleError, build_series, elliptic_coefficients, eval_modular,
                       near_rho_orbit, raise_form, reduce_to_fundamental_domain, rho)
from .numerics import PrecisionContext, rational_reconstruction
from .quadforms import class_representatives, cm_point, stabilizer_order


@dataclass(frozen=True)
class PoleData:
    """Where a meromorphic modular function has its poles, and how to evaluate it.

    Only one pole class is supported; that is all 1/j needs.
    """

    name: str
    stabilizer: int
    expansion: EllipticExpansion

    @property
    def center(self):
        return self.expansion.center

    @property
    def pole_order(self) -> int:
        return -self.expansion.n_min


@lru_cache(maxsize=8)
def reciprocal_j(ctx: PrecisionContext) -> PoleData:
    return PoleData("1/j", 3, elliptic_coefficients("1/j", 6, ctx))


@dataclass(frozen=True)
class TraceEntry:
    D: int
    value: object
    rational_guess: Fraction | None = None
    class_count: int = 0


def cm_value(Q, ctx: PrecisionContext, pole: PoleData | None = None):
    """Constant elliptic coefficient of ``f`` at ``z_Q``: the CM value, or ``c(0)`` at a pole."""
    pole = pole or reciprocal_j(ctx)
    z = cm_point(Q, ctx).value
    w, _ = reduce_to_fundamental_domain(z)
    if near_rho_orbit(w, ctx.precision_digits):
        return pole.expansion[0]
    return eval_modular(pole.name, z, ctx)


def _trace_value(D: int, ctx: PrecisionContext, pole: PoleData | None):
    reps = class_representatives(D)
    total = ctx.mp.mpf(0)
    for Q in reps:
        total += cm_value(Q, ctx, pole) / stabilizer_order(Q)
    return total.real if hasattr(total, "real") else total, len(reps)


def _stable_guess(value, D, ctx, compute) -> Fraction | None:
    bound = 10 ** (ctx.precision_digits // 3)
    guess = rational_reconstruction(ctx.mp.mpf(value), bound)
    fine = ctx.with_digits(2 * ctx.precision_digits)
    if compute(fine) is None:
        return None
    fine_guess = rational_reconstruction(fine.mp.mpf(compute(fine)), bound)
    if guess != fine_guess:
        return None
    if abs(value - ctx.mpf(guess)) >= ctx.mp.mpf(10) ** (-ctx.precision_digits / 2):
        return None
    return guess


def trace(D: int, ctx: PrecisionContext, pole: PoleData | None = None,
          reconstruct: bool = False) -> TraceEntry:
    """``tr(D) = sum_{Q in Q_D^+ / Gamma} c_{f, z_Q}(0) / |Gamma_Q|`` for ``D < 0``."""
    if D >= 0:
        raise ValueError("trace requires D < 0; use trace_zero for D = 0")
    value, count = _trace_value(D, ctx, pole)
    guess = None
    if reconstruct and count:
        guess = _stable_guess(value, D, ctx,
                              lambda c: _trace_value(D, c, None if pole is None else _rebuild(pole, c))[0])
    elif count == 0:
        guess = Fraction(0)
    return TraceEntry(D, value, guess, count)


def _rebuild(pole: PoleData, ctx: PrecisionContext) -> PoleData:
    if pole.name != "1/j":
        raise NotImplementedError("precision doubling is only wired up for 1/j")
    return reciprocal_j(ctx)


def elliptic_pairing(coeffs: EllipticExpansion, raised_values: dict):
    """``-4 pi sum_{n>=1} Im(center)^n / (n-1)! c(-n) raised_values[n]``.

    ``raised_values[n]`` is ``R_2^(n-1) g(center)``; principal-part
    coefficients below the expansion's error budget count as zero.
    """
    center = coeffs.center
    mp = center.context
    y = center.imag
    total = mp.mpc(0)
    for n in range(1, -coeffs.n_min + 1):
        c = coeffs[-n]
        if n not in raised_values:
            if abs(c) > coeffs.error:
                raise KeyError(f"missing raised value R^{n - 1} g at the centre for c(-{n}) != 0")
            continue
        total += y ** n / mp.factorial(n - 1) * c * raised_values[n]
    return -4 * mp.pi * total


@lru_cache(maxsize=8)
def raised_eisenstein_at_rho(ctx: PrecisionContext, max_times: int = 2) -> dict:
    """``{n: R_2^(n-1) E2*(rho)}`` for ``1 <= n <= max_times + 1``."""
    e2 = build_series("E2*", ctx)
    r = rho(ctx)
    return {t + 1: raise_form(e2, t).evaluate(r, ctx) for t in range(max_times + 1)}


def _trace_zero_value(ctx: PrecisionContext, pole: PoleData | None):
    pole = pole or reciprocal_j(ctx)
    raised = raised_eisenstein_at_rho(ctx, pole.pole_order - 1)
    # pi/3 = -4 pi * (-1/12)
    return (-elliptic_pairing(pole.expansion, raised) / 12 / pole.stabilizer).real


def trace_zero(ctx: PrecisionContext, pole: PoleData | None = None,
               reconstruct: bool = False) -> TraceEntry:
    """Regularised average value via the special values of raised ``E2*`` at the pole."""
    value = _trace_zero_value(ctx, pole)
    guess = None
    if reconstruct:
        guess = _stable_guess(value, 0, ctx, lambda c: _trace_zero_value(c, None if pole is None else _rebuild(pole, c)))
    return TraceEntry(0, value, guess, 0)


def generating_series(D_min: int, ctx: PrecisionContext, reconstruct: bool = False) -> list[TraceEntry]:
    """Traces for ``D_min <= D <= 0`` in descending order of ``D``."""
    if D_min >= 0:
        raise ValueError("D_min must be negative")
    rows = [trace_zero(ctx, reconstruct=reconstruct)]
    for D in range(-1, D_min - 1, -1):
        rows.append(trace(D, ctx, reconstruct=reconstruct))
    return rows


def reciprocal_singular_modulus(Q, ctx: PrecisionContext):
    """``1/j(z_Q)``; raises :class:`PoleError` at rho-equivalent points."""
    return eval_modular("1/j", cm_point(Q, ctx).value, ctx)


__all__ = ["PoleData", "PoleError", "TraceEntry", "cm_value", "elliptic_pairing", "generating_series",
           "raised_eisenstein_at_rho", "reciprocal_j", "reciprocal_singular_modulus", "trace", "trace_zero"]
