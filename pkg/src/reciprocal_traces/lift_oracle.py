"""Brute-force quadrature of the regularised lift of 1/j.

Everything here runs in double precision with numpy and shares no code with
the series and lattice machinery used elsewhere, so that it can serve as an
independent check of the Fourier expansion.

The domain is ``F* = {0 <= x <= 1, |z| >= 1, |z - 1| >= 1, y <= y_max}``.  It
is the standard fundamental domain with its left half moved over by one, so
both corners meet at ``rho = exp(i pi / 3)``.  Near ``rho`` the integral runs
over a sector ``eps <= |X| <= r0`` of the disk model, where
``X = (z - rho) / (z - conj(rho))``; the rest of ``F*`` is a union of
curvilinear strips in ``(x, y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from .numerics import PrecisionContext

RHO = complex(0.5, math.sqrt(3) / 2)


@dataclass(frozen=True)
class QuadratureSpec:
    epsilon: float = 0.05
    y_max: float = 6.0
    D_max: int = 40
    radius: float = 0.25  # r0: outer radius of the corner sector in |X|
    n_theta: int = 48
    n_radial: int = 24
    n_x: int = 40
    n_y: int = 24
    theta_tolerance: float = 1e-17

    def __post_init__(self):
        if not 0 < self.epsilon < 0.2:
            raise ValueError("epsilon must lie in (0, 0.2)")
        if self.y_max < 5:
            raise ValueError("y_max must be at least 5")
        if not self.epsilon < self.radius < 2 - math.sqrt(3):
            raise ValueError("radius must lie in (epsilon, 2 - sqrt(3))")

    def halved(self) -> "QuadratureSpec":
        return QuadratureSpec(self.epsilon / 2, self.y_max, self.D_max, self.radius, self.n_theta,
                              self.n_radial, self.n_x, self.n_y, self.theta_tolerance)


# --- 1/j in double precision ------------------------------------------------------

_N_Q = 14


@lru_cache(maxsize=1)
def _sigma3() -> np.ndarray:
    n = np.arange(1, _N_Q + 1)
    return np.array([sum(d ** 3 for d in range(1, k + 1) if k % d == 0) for k in n], dtype=float)


def reciprocal_j(z: np.ndarray) -> np.ndarray:
    """``1/j = Delta / E4^3`` from truncated q-products; valid for ``Im z >= 0.8``."""
    q = np.exp(2j * np.pi * np.asarray(z, dtype=complex))
    e4 = np.zeros_like(q)
    for s in _sigma3()[::-1]:
        e4 = (e4 + 240 * s) * q
    e4 += 1
    delta = q.copy()
    qn = np.ones_like(q)
    for _ in range(_N_Q + 10):
        qn = qn * q
        delta *= (1 - qn) ** 24
    return delta / e4 ** 3


# --- the Kudla-Millson theta function ------------------------------------------------

def _majorant_bound(v: float, tol: float) -> float:
    """``M`` with ``sum`` over forms beyond majorant ``M`` below ``tol``."""
    M = 1.0
    while (M + 1) ** 3 * (4 * v * M + 1) * math.exp(-2 * math.pi * v * M) > tol:
        M += 0.5
    return M


def _form_box(v: float, y_min: float, y_max: float, x_abs: float, tol: float) -> np.ndarray:
    """All ``[A, B, C]`` that can reach majorant ``<= M`` for ``y_min <= y <= y_max``, ``|x| <= x_abs``.

    Uses ``2Ay = Q_z - Re Q(z,1)/y``, ``Im Q(z,1)/y = 2Ax + B`` and
    ``Q_z y + Re Q(z,1) = 2(A x^2 + B x + C)``.
    """
    M = _majorant_bound(v, tol)
    r = math.sqrt(2 * M)
    a_max = int(r / (2 * y_min))
    b_max = int(math.sqrt(M) + 2 * a_max * x_abs)
    c_max = int(y_max * r / 2 + a_max * x_abs ** 2 + b_max * x_abs) + 1
    A, B, C = np.meshgrid(np.arange(-a_max, a_max + 1), np.arange(-b_max, b_max + 1),
                          np.arange(-c_max, c_max + 1), indexing="ij")
    return np.stack([A.ravel(), B.ravel(), C.ravel()], axis=1)


class _ThetaEvaluator:
    def __init__(self, tau: complex, spec: QuadratureSpec, y_min: float, y_max: float, x_abs: float):
        self.tau = complex(tau)
        self.v = self.tau.imag
        forms = _form_box(self.v, y_min, y_max, x_abs, spec.theta_tolerance)
        D = forms[:, 1] ** 2 - 4 * forms[:, 0] * forms[:, 2]
        keep = np.abs(D) <= spec.D_max
        self.A, self.B, self.C = (forms[keep, i].astype(float) for i in range(3))
        D = D[keep]
        self.mode = np.exp(-2j * np.pi * D * self.tau)

    def __call__(self, z: np.ndarray, chunk: int = 256) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape, dtype=complex)
        flat, res = z.ravel(), out.ravel()
        v = self.v
        for start in range(0, flat.size, chunk):
            zz = flat[start:start + chunk, None]
            x, y = zz.real, zz.imag
            qz = (self.A * (x * x + y * y) + self.B * x + self.C) / y
            P = (self.A * zz + self.B) * zz + self.C
            gauss = np.exp(-4 * np.pi * v * np.abs(P) ** 2 / y ** 2)
            phi = (4 * v * qz * qz - 1 / (2 * np.pi)) * gauss
            res[start:start + chunk] = phi @ self.mode
        return out


def km_theta_full(z, tau, spec: QuadratureSpec, ctx: PrecisionContext | None = None):
    """``Theta_KM(z, tau)`` summed over forms with ``|D| <= D_max`` (``Q = 0`` included)."""
    z = complex(z)
    ev = _ThetaEvaluator(tau, spec, y_min=z.imag, y_max=z.imag, x_abs=abs(z.real))
    return complex(ev(np.array([z]))[0])


# --- quadrature -------------------------------------------------------------------

def _disk(r0: float) -> tuple[float, float]:
    """Euclidean centre height and radius of ``{|X| < r0}`` (centre has x = 1/2)."""
    s = math.sqrt(3) / 2
    return s * (1 + r0 * r0) / (1 - r0 * r0), s * 2 * r0 / (1 - r0 * r0)


def _arc(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.where(x <= 0.5, np.sqrt(1 - x * x), np.sqrt(1 - (x - 1) ** 2))


def _strip_breaks(r0: float) -> tuple[float, float]:
    yc, R = _disk(r0)
    top = lambda x: yc + math.sqrt(max(R * R - (x - 0.5) ** 2, 0.0))
    x_e = brentq(lambda x: float(_arc(x)) - top(x), 0.5, 0.5 + R)
    return 1 - x_e, x_e


def _gauss(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = leggauss(n)
    return 0.5 * (b - a) * t + 0.5 * (b + a), 0.5 * (b - a) * w


def _corner_nodes(spec: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and hyperbolic weights on the sector ``eps <= |X| <= r0``, ``|arg X| <= pi/3``."""
    r, wr = _gauss(spec.epsilon, spec.radius, spec.n_radial)
    period = 2 * math.pi / 3
    theta = -math.pi / 3 + (np.arange(spec.n_theta) + 0.5) * period / spec.n_theta
    R, T = np.meshgrid(r, theta, indexing="ij")
    X = R * np.exp(1j * T)
    z = (RHO - RHO.conjugate() * X) / (1 - X)
    weight = (wr[:, None] * (period / spec.n_theta)) * 4 * R / (1 - R * R) ** 2
    return z.ravel(), weight.ravel()


def _strip_nodes(spec: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and ``dx dy / y^2`` weights on ``F*`` outside the corner disk."""
    yc, R = _disk(spec.radius)
    x_l, x_e = _strip_breaks(spec.radius)
    zs, ws = [], []
    for a, b, on_disk in ((0.0, x_l, False), (x_l, x_e, True), (x_e, 1.0, False)):
        xs, wx = _gauss(a, b, spec.n_x)
        for x, w in zip(xs, wx):
            low = yc + math.sqrt(R * R - (x - 0.5) ** 2) if on_disk else float(_arc(x))
            for lo, hi in ((low, low + 1.0), (low + 1.0, low + 2.5), (low + 2.5, spec.y_max)):
                ys, wy = _gauss(lo, hi, spec.n_y)
                zs.append(x + 1j * ys)
                ws.append(w * wy / ys ** 2)
    return np.concatenate(zs), np.concatenate(ws)


@dataclass(frozen=True)
class LiftResult:
    value: complex
    convergence: float
    at_epsilon: complex
    at_half_epsilon: complex


def _integrate(integrand, spec: QuadratureSpec) -> LiftResult:
    zs, ws = _strip_nodes(spec)
    strip = np.sum(integrand(zs) * ws)
    values = []
    for s in (spec, spec.halved()):
        zc, wc = _corner_nodes(s)
        values.append(strip + np.sum(integrand(zc) * wc))
    v1, v2 = values
    # excision error is O(eps^2): the sector integrand is smooth in |X|^2 after angular averaging
    extrapolated = (4 * v2 - v1) / 3
    return LiftResult(complex(extrapolated), float(abs(extrapolated - v2)), complex(v1), complex(v2))


def regularized_lift(tau, spec: QuadratureSpec | None = None, ctx: PrecisionContext | None = None) -> LiftResult:
    """``lim_eps int_{F* - B_eps(rho)} (1/j)(z) Theta_KM(z, tau) dx dy / y^2``."""
    spec = spec or QuadratureSpec()
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    theta = _ThetaEvaluator(tau, spec, y_min=math.sqrt(3) / 2 * 0.999, y_max=spec.y_max, x_abs=1.0)
    return _integrate(lambda z: reciprocal_j(z) * theta(z), spec)


def average_value_integral(spec: QuadratureSpec | None = None) -> LiftResult:
    """``-(1/4 pi)`` times the regularised integral of ``1/j``: the average value ``tr(0)``."""
    spec = spec or QuadratureSpec()
    res = _integrate(reciprocal_j, spec)
    s = -1 / (4 * math.pi)
    return LiftResult(res.value * s, res.convergence * abs(s), res.at_epsilon * s, res.at_half_epsilon * s)


def fourier_side(tau, ctx: PrecisionContext, D_max: int = 40):
    """``sum_{|D| <= D_max} c(D, v) e^{-2 pi i D tau}`` from the trace and singular-theta formulas."""
    from .theta import completion_coefficient

    mp = ctx.mp
    tau = mp.mpc(tau)
    total = mp.mpc(0)
    for D in range(-D_max, D_max + 1):
        if D % 4 in (2, 3):
            continue
        total += completion_coefficient(D, tau.imag, ctx) * mp.exp(-2j * mp.pi * D * tau)
    return total


__all__ = ["LiftResult", "QuadratureSpec", "average_value_integral", "fourier_side", "km_theta_full",
           "reciprocal_j", "regularized_lift"]
