"""Named numerical checks with targets and tolerances, as run by ``verify``."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

from .lift_oracle import QuadratureSpec, fourier_side, regularized_lift
from .modfuncs import build_series, chowla_selberg, elliptic_coefficients, raise_form, rho, taylor_raised_values
from .numerics import PrecisionContext
from .theta import example_2_1_decomposition, lowering_and_xi_checks, splitting_sides
from .traces import trace, trace_zero

GENERATING_SERIES_TARGETS = {
    0: Fraction(-1, 165888),
    -3: Fraction(23, 331776),
    -4: Fraction(1, 3456),
    -7: Fraction(-1, 3375),
    -8: Fraction(1, 8000),
}
OMEGA_DIGITS = "0.6409273802"
SHADOW_TAUS = (1j, 0.25 + 0.8j, -0.3 + 1.3j, 0.1 + 0.6j, 0.5 + 2j)


@dataclass(frozen=True)
class Check:
    check: str
    target: str
    computed: str
    tolerance: float
    passed: bool
    provenance: str = "computed"

    def as_row(self) -> dict:
        row = asdict(self)
        row["pass"] = row.pop("passed")
        return row


def _rel(a, b) -> float:
    return float(abs(a - b) / abs(b))


def paper_values(ctx: PrecisionContext) -> list[Check]:
    """Published generating-series coefficients, the CM period and values at rho."""
    mp = ctx.mp
    out = []
    for D, target in GENERATING_SERIES_TARGETS.items():
        entry = trace_zero(ctx, reconstruct=True) if D == 0 else trace(D, ctx, reconstruct=True)
        residual = float(abs(entry.value - ctx.mpf(target)))
        ok = entry.rational_guess == target and residual < 1e-20
        out.append(Check(f"tr({D})", str(target), str(entry.rational_guess), 1e-20, ok, "paper_target"))
    omega = chowla_selberg(ctx)
    digits = mp.nstr(omega, 20, strip_zeros=False)[:len(OMEGA_DIGITS)]
    out.append(Check("Omega", OMEGA_DIGITS, mp.nstr(omega, 20), 1e-10, digits == OMEGA_DIGITS, "paper_target"))
    exp = elliptic_coefficients("1/j", 3, ctx)
    c3 = -1 / (mp.pi ** 3 * omega ** 6 * 2 ** 12 * 27)
    c0 = ctx.mpf(Fraction(23, 2 ** 12 * 27))
    out.append(Check("c_1/j(-3)", mp.nstr(c3, 25), mp.nstr(exp[-3], 25), 1e-25, _rel(exp[-3], c3) < 1e-25,
                     "paper_target"))
    out.append(Check("c_1/j(0)", mp.nstr(c0, 25), mp.nstr(exp[0], 25), 1e-25, _rel(exp[0], c0) < 1e-25,
                     "paper_target"))
    e2 = build_series("E2*", ctx)
    r2 = raise_form(e2, 2).evaluate(rho(ctx), ctx)
    target = 32 / mp.sqrt(3) * mp.pi ** 2 * omega ** 6
    out.append(Check("R^2 E2*(rho)", mp.nstr(target, 25), mp.nstr(r2.real, 25), 1e-25,
                     _rel(r2, target) < 1e-25, "paper_target"))
    return out


def taylor_values(ctx: PrecisionContext) -> list[Check]:
    """``R_0^n j(rho)`` for ``3 <= n <= 6`` against their closed forms."""
    mp = ctx.mp
    omega = chowla_selberg(ctx)
    raised = taylor_raised_values(elliptic_coefficients("j", 6, ctx), range(3, 7), ctx)
    closed = {3: -2 ** 16 * 9 * mp.sqrt(3) * mp.pi ** 3 * omega ** 6, 4: 0, 5: 0,
              6: -(2 ** 22) * 9 * 5 * 23 * mp.pi ** 6 * omega ** 12}
    scale = abs(closed[3])
    out = []
    for n, target in closed.items():
        err = _rel(raised[n], target) if target else float(abs(raised[n]) / scale)
        out.append(Check(f"R_0^{n} j(rho)", mp.nstr(target, 20), mp.nstr(raised[n], 20), 1e-25, err < 1e-25,
                         "paper_target"))
    return out


def splitting(ctx: PrecisionContext, taus=(0.5j, 1j, 1 / 3 + 2j / 3)) -> list[Check]:
    out = []
    for tau in taus:
        res = splitting_sides(tau, ctx)
        out.append(Check(f"splitting tau={tau}", ctx.mp.nstr(res.lhs, 20), ctx.mp.nstr(res.rhs, 20), 1e-10,
                         res.difference < 1e-10))
    return out


def lowering(ctx: PrecisionContext, D_set=(-3, -4, 0, 5, 8), v_set=(0.5, 1, 2)) -> list[Check]:
    # at 120 digits every sampled coefficient (down to ~1e-101) is above the lattice tail tolerance
    if ctx.precision_digits < 120:
        ctx = ctx.with_digits(120)
    report = lowering_and_xi_checks(D_set, v_set, ctx)
    return [Check(f"lowering D={r['D']} v={r['v']}", ctx.mp.nstr(r["closed_form"], 20),
                  ctx.mp.nstr(r["finite_difference"], 20), 1e-6, r["relative_error"] < 1e-6)
            for r in report.rows]


def shadow(ctx: PrecisionContext, taus=SHADOW_TAUS) -> list[Check]:
    report = lowering_and_xi_checks((), (), ctx, taus)
    mp = ctx.mp
    out = [Check(f"xi/shadow tau={r['tau']}", mp.nstr(report.fitted_constant, 15), mp.nstr(r["ratio"], 15),
                 1e-5, float(abs(r["ratio"] - report.fitted_constant) / abs(report.fitted_constant)) < 1e-5)
           for r in report.xi_rows]
    out.append(Check("shadow constant nonzero", "!= 0", mp.nstr(report.fitted_constant, 15), 0.0,
                     abs(report.fitted_constant) > 0))
    return out


def integral(ctx: PrecisionContext, tau=1j, spec: QuadratureSpec | None = None) -> list[Check]:
    spec = spec or QuadratureSpec()
    lift = regularized_lift(tau, spec)
    series = complex(fourier_side(tau, ctx, spec.D_max))
    return [Check(f"lift tau={tau}", repr(series), repr(lift.value), 1e-3, abs(lift.value - series) < 1e-3)]


def example_2_1(ctx: PrecisionContext, taus=(1j, 0.25 + 0.5j)) -> list[Check]:
    mp = ctx.mp
    out = []
    ratios = []
    for tau in taus:
        rep = example_2_1_decomposition(1, tau, ctx)
        out.append(Check(f"theta_7/2 split tau={tau}", mp.nstr(rep.theta, 20), mp.nstr(rep.decomposition, 20),
                         ctx.tail_tolerance, rep.decomposition_error < 10 * ctx.tail_tolerance))
        ratios.append(rep.xi_ratio)
    spread = max(float(abs(r - ratios[0]) / abs(ratios[0])) for r in ratios)
    out.append(Check("xi theta_7/2 ratio stable", mp.nstr(ratios[0], 15), mp.nstr(ratios[-1], 15), 1e-8,
                     spread < 1e-8))
    predicted = 8 * mp.sqrt(3 * mp.pi)
    out.append(Check("xi theta_7/2 ratio = 8 sqrt(3 pi)", mp.nstr(predicted, 15), mp.nstr(ratios[0], 15), 1e-8,
                     _rel(ratios[0], predicted) < 1e-8))
    return out


TARGETS = {
    "paper-values": lambda ctx, tau: paper_values(ctx),
    "splitting": lambda ctx, tau: splitting(ctx, (tau,) if tau is not None else (0.5j, 1j, 1 / 3 + 2j / 3)),
    "lowering": lambda ctx, tau: lowering(ctx),
    "shadow": lambda ctx, tau: shadow(ctx),
    "integral": lambda ctx, tau: integral(ctx, tau if tau is not None else 1j),
    "example-2-1": lambda ctx, tau: example_2_1(ctx, (tau,) if tau is not None else (1j, 0.25 + 0.5j)),
}
