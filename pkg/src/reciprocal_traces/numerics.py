"""Precision management, truncated q-series and small numerical helpers.

All high-precision arithmetic goes through an ``mpmath`` context owned by a
:class:`PrecisionContext`; the global ``mpmath.mp`` is never modified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any, Callable, Iterable, Mapping

from mpmath.ctx_mp import MPContext

DENOMINATOR_BOUND = 12

# |q| at the lowest point of the standard fundamental domain is exp(-pi*sqrt(3)).
_LOG10_Q_MIN = math.pi * math.sqrt(3) / math.log(10)


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision and truncation parameters for every numeric routine.

    ``series_order`` and ``tail_tolerance`` are derived from
    ``precision_digits`` when left as ``None``.
    """

    precision_digits: int = 60
    series_order: int | None = None
    lattice_cutoff: float | None = None
    tail_tolerance: float | None = None
    mp: MPContext = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.precision_digits < 30:
            raise ValueError("precision_digits must be at least 30")
        if self.series_order is None:
            n = math.ceil((self.precision_digits + 15) / _LOG10_Q_MIN) + 10
            object.__setattr__(self, "series_order", n)
        elif self.series_order <= 0:
            raise ValueError("series_order must be positive")
        if self.tail_tolerance is None:
            object.__setattr__(self, "tail_tolerance", 10.0 ** -(self.precision_digits - 10))
        if not 0 < self.tail_tolerance < 10.0 ** (-self.precision_digits / 2):
            raise ValueError("tail_tolerance must lie in (0, 10^(-precision_digits/2))")
        if self.lattice_cutoff is not None and self.lattice_cutoff <= 0:
            raise ValueError("lattice_cutoff must be positive")
        mp = MPContext()
        mp.dps = self.precision_digits
        object.__setattr__(self, "mp", mp)

    @property
    def eps(self):
        return self.mp.mpf(10) ** (-self.precision_digits)

    def with_digits(self, digits: int) -> "PrecisionContext":
        """Same configuration at a different working precision."""
        tol = None if self.tail_tolerance == 10.0 ** -(self.precision_digits - 10) else self.tail_tolerance
        if tol is not None and tol >= 10.0 ** (-digits / 2):
            tol = None
        return PrecisionContext(digits, None, self.lattice_cutoff, tol)

    def mpf(self, x):
        if isinstance(x, Fraction):
            return self.mp.mpf(x.numerator) / x.denominator
        return self.mp.mpf(x)

    def mpc(self, x, y=0):
        if isinstance(x, Fraction):
            x = self.mpf(x)
        if isinstance(y, Fraction):
            y = self.mpf(y)
        return self.mp.mpc(x, y)


def _as_fraction(e) -> Fraction:
    f = Fraction(e)
    if DENOMINATOR_BOUND % f.denominator:
        raise ValueError(f"exponent {f} has denominator beyond the bound {DENOMINATOR_BOUND}")
    return f


def _is_exact(x) -> bool:
    return isinstance(x, (int, Rational))


def _reciprocal(x):
    return Fraction(1) / x if _is_exact(x) else 1 / x


def _magnitude(x) -> float:
    try:
        return float(abs(x))
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class QExpansion:
    """Truncated series ``sum c_e q^e`` with rational exponents ``e < truncation``.

    Coefficients may be exact rationals or mpmath numbers.  ``error`` is a
    scalar bound on the absolute error of any retained coefficient.
    """

    terms: tuple[tuple[Fraction, Any], ...]
    truncation: Fraction
    error: float = 0.0

    def __post_init__(self):
        trunc = _as_fraction(self.truncation)
        object.__setattr__(self, "truncation", trunc)
        cleaned = []
        prev = None
        for e, c in self.terms:
            e = _as_fraction(e)
            if prev is not None and e <= prev:
                raise ValueError("exponents must be strictly ascending")
            if e >= trunc:
                raise ValueError(f"exponent {e} not below truncation {trunc}")
            prev = e
            cleaned.append((e, c))
        object.__setattr__(self, "terms", tuple(cleaned))

    @classmethod
    def from_mapping(cls, coeffs: Mapping, truncation, error: float = 0.0) -> "QExpansion":
        trunc = _as_fraction(truncation)
        items = sorted((_as_fraction(e), c) for e, c in coeffs.items())
        return cls(tuple((e, c) for e, c in items if e < trunc and c != 0), trunc, error)

    @classmethod
    def from_list(cls, coeffs: Iterable, start=0, truncation=None) -> "QExpansion":
        """Integer-spaced series ``sum_k coeffs[k] q^(start+k)``."""
        coeffs = list(coeffs)
        start = _as_fraction(start)
        if truncation is None:
            truncation = start + len(coeffs)
        return cls.from_mapping({start + k: c for k, c in enumerate(coeffs)}, truncation)

    @classmethod
    def zero(cls, truncation) -> "QExpansion":
        return cls((), truncation)

    @property
    def exponents(self) -> list[Fraction]:
        return [e for e, _ in self.terms]

    @property
    def order(self) -> Fraction:
        if not self.terms:
            return self.truncation
        return self.terms[0][0]

    def __getitem__(self, e):
        e = Fraction(e)
        if e >= self.truncation:
            raise KeyError(f"exponent {e} lies beyond the truncation {self.truncation}")
        for ee, c in self.terms:
            if ee == e:
                return c
        return 0

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other):
        return series_add(self, _coerce(other, self.truncation))

    __radd__ = __add__

    def __neg__(self):
        return QExpansion(tuple((e, -c) for e, c in self.terms), self.truncation, self.error)

    def __sub__(self, other):
        return self + (-_coerce(other, self.truncation))

    def __rsub__(self, other):
        return _coerce(other, self.truncation) - self

    def __mul__(self, other):
        if isinstance(other, QExpansion):
            return series_multiply(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QExpansion):
            return series_multiply(self, series_invert(other))
        return self.scale(_reciprocal(other))

    def __pow__(self, n: int):
        if n < 0:
            return series_invert(self) ** (-n)
        if n == 0:
            return _coerce(1, self.truncation - self.order)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, s) -> "QExpansion":
        return QExpansion(tuple((e, s * c) for e, c in self.terms if s * c != 0),
                          self.truncation, self.error * _magnitude(s))

    def shift(self, k) -> "QExpansion":
        """Multiply by ``q^k``."""
        k = _as_fraction(k)
        return QExpansion(tuple((e + k, c) for e, c in self.terms), self.truncation + k, self.error)

    def theta_derivative(self) -> "QExpansion":
        """``q d/dq``, which sends ``q^e`` to ``e q^e``."""
        return QExpansion(tuple((e, e * c) for e, c in self.terms if e != 0), self.truncation,
                          self.error * float(max((abs(e) for e, _ in self.terms), default=0)))

    def truncate(self, truncation) -> "QExpansion":
        t = min(_as_fraction(truncation), self.truncation)
        return QExpansion(tuple((e, c) for e, c in self.terms if e < t), t, self.error)

    def evaluate(self, q_power: Callable[[Fraction], Any]):
        """Sum the retained terms given a map ``e -> q^e``."""
        total = 0
        for e, c in self.terms:
            total += c * q_power(e)
        return total

    def evaluate_at(self, tau, ctx: PrecisionContext):
        mp = ctx.mp
        two_pi_i_tau = 2 * mp.pi * mp.mpc(0, 1) * mp.mpc(tau)
        return self.evaluate(lambda e: mp.exp(two_pi_i_tau * ctx.mpf(e)))


def _coerce(x, truncation) -> QExpansion:
    if isinstance(x, QExpansion):
        return x
    return QExpansion.from_mapping({0: x}, truncation)


def _l1(f: QExpansion) -> float:
    return sum(_magnitude(c) for _, c in f.terms)


def series_add(f: QExpansion, g: QExpansion) -> QExpansion:
    """Coefficientwise sum truncated at the smaller truncation."""
    trunc = min(f.truncation, g.truncation)
    out: dict[Fraction, Any] = {}
    for e, c in f.terms + g.terms:
        if e < trunc:
            out[e] = out.get(e, 0) + c
    return QExpansion.from_mapping(out, trunc, f.error + g.error)


def series_multiply(f: QExpansion, g: QExpansion) -> QExpansion:
    """Cauchy product, valid up to ``min(ord f + trunc g, ord g + trunc f)``."""
    trunc = min(f.order + g.truncation, g.order + f.truncation)
    out: dict[Fraction, Any] = {}
    for e1, c1 in f.terms:
        if e1 + g.order >= trunc:
            break
        for e2, c2 in g.terms:
            e = e1 + e2
            if e >= trunc:
                break
            out[e] = out.get(e, 0) + c1 * c2
    err = f.error * _l1(g) + g.error * _l1(f) + f.error * g.error
    return QExpansion.from_mapping(out, trunc, err)


def series_invert(f: QExpansion) -> QExpansion:
    """Multiplicative inverse ``g`` with ``f g = 1 + O(q^(trunc f - ord f))``."""
    if not f.terms or f.terms[0][1] == 0:
        raise ZeroDivisionError("leading coefficient of the series is zero")
    order = f.order
    rel = [(e - order, c) for e, c in f.terms]
    span = f.truncation - order
    step_den = 1
    for e, _ in rel:
        step_den = math.lcm(step_den, e.denominator)
    step_den = math.lcm(step_den, span.denominator)
    n_terms = math.ceil(span * step_den)
    a = {int(e * step_den): c for e, c in rel}
    inv_lead = _reciprocal(a[0])
    g = [inv_lead]
    for k in range(1, n_terms):
        s = 0
        for j, c in a.items():
            if 0 < j <= k:
                s += c * g[k - j]
        g.append(-inv_lead * s)
    coeffs = {Fraction(k, step_den) - order: c for k, c in enumerate(g)}
    err = f.error * _magnitude(inv_lead) ** 2 * max(1.0, sum(_magnitude(c) for c in g))
    return QExpansion.from_mapping(coeffs, span - order, err)


def gamma_eval(x, ctx: PrecisionContext):
    """Gamma function at a positive rational, self-checked by reflection when ``x < 1``."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("gamma_eval requires a positive argument")
    mp = ctx.mp
    xm = ctx.mpf(x)
    value = mp.gamma(xm)
    if x < 1:
        check = value * mp.gamma(1 - xm) * mp.sin(mp.pi * xm) / mp.pi
        if abs(check - 1) > mp.mpf(10) ** (-ctx.precision_digits + 2):
            raise ArithmeticError(f"reflection self-check failed for Gamma({x})")
    return value


def richardson_derivative(f: Callable, x0, h, ctx: PrecisionContext, levels: int = 5):
    """Central-difference derivative of ``f`` at ``x0`` with Richardson extrapolation.

    Returns ``(value, error_estimate)``.
    """
    mp = ctx.mp
    h = ctx.mpf(h)
    table = []
    for i in range(levels):
        hi = h / 2 ** i
        row = [(f(x0 + hi) - f(x0 - hi)) / (2 * hi)]
        for k in range(1, i + 1):
            prev = table[i - 1][k - 1]
            row.append(row[k - 1] + (row[k - 1] - prev) / (4 ** k - 1))
        table.append(row)
    best = table[-1][-1]
    err = abs(best - table[-2][-2]) if levels > 1 else mp.inf
    return best, err


def tail_sum_bound(term_bound: Callable[[int], float], start: int, ratio_cap: float = 0.5,
                   max_terms: int = 100_000) -> float:
    """Bound ``sum_{n >= start} term_bound(n)``.

    ``term_bound`` must have eventually decreasing ratios (Gaussian times a
    polynomial); once a ratio drops below ``ratio_cap`` the remainder is
    closed with a geometric series.
    """
    total = 0.0
    prev = term_bound(start)
    total += prev
    for n in range(start + 1, start + max_terms):
        t = term_bound(n)
        total += t
        if prev == 0.0 or (t / prev <= ratio_cap and t <= prev):
            ratio = 0.0 if prev == 0.0 else t / prev
            return total + t * ratio / (1 - ratio)
        prev = t
    raise ArithmeticError("tail bound did not converge")


def safe_exp(x: float) -> float:
    return math.exp(x) if x > -745 else 0.0


def rational_reconstruction(value, denominator_bound: int) -> Fraction:
    """Best rational approximation with bounded denominator (continued fractions)."""
    mp = value.context if hasattr(value, "context") else None
    text = mp.nstr(value, mp.dps, min_fixed=-mp.inf, max_fixed=mp.inf) if mp else repr(value)
    return Fraction(text).limit_denominator(denominator_bound)
