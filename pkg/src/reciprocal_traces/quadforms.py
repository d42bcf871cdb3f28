"""Integral binary quadratic forms [a, b, c] = a x^2 + b x y + c y^2."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .numerics import PrecisionContext

Matrix = tuple[tuple[int, int], tuple[int, int]]

IDENTITY: Matrix = ((1, 0), (0, 1))


def matmul(m: Matrix, n: Matrix) -> Matrix:
    (a, b), (c, d) = m
    (e, f), (g, h) = n
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


@dataclass(frozen=True)
class BinaryQuadraticForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def positive_definite(self) -> bool:
        return self.discriminant < 0 and self.a > 0

    def __neg__(self):
        return BinaryQuadraticForm(-self.a, -self.b, -self.c)

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __str__(self):
        return f"[{self.a},{self.b},{self.c}]"

    def transform(self, m: Matrix) -> "BinaryQuadraticForm":
        """The form ``(x, y) -> Q(alpha x + beta y, gamma x + delta y)``."""
        (al, be), (ga, de) = m
        a, b, c = self.a, self.b, self.c
        return BinaryQuadraticForm(
            a * al * al + b * al * ga + c * ga * ga,
            2 * a * al * be + b * (al * de + be * ga) + 2 * c * ga * de,
            a * be * be + b * be * de + c * de * de,
        )

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True


Form = BinaryQuadraticForm


def q_of(Q: Form, z):
    """``Q(z, 1) = a z^2 + b z + c``."""
    return (Q.a * z + Q.b) * z + Q.c


def q_z(Q: Form, z):
    """``Q_z = (a |z|^2 + b x + c) / y``."""
    x, y = z.real, z.imag
    return (Q.a * (x * x + y * y) + Q.b * x + Q.c) / y


def _require_definite(Q: Form):
    if not Q.positive_definite:
        raise ValueError(f"{Q} is not positive definite")


def reduce(Q: Form) -> tuple[Form, Matrix]:
    """Gauss reduction; returns ``(R, M)`` with ``Q.transform(M) == R`` reduced."""
    _require_definite(Q)
    m = IDENTITY
    cur = Q
    while True:
        a, b, c = cur
        if not (-a < b <= a):
            k = (a - b) // (2 * a)  # brings b into (-a, a]
            t = ((1, k), (0, 1))
            cur = cur.transform(t)
            m = matmul(m, t)
            continue
        if a > c or (a == c and b < 0):
            s = ((0, -1), (1, 0))
            cur = cur.transform(s)
            m = matmul(m, s)
            continue
        break
    assert Q.transform(m) == cur and cur.is_reduced()
    return cur, m


def class_representatives(D: int) -> list[Form]:
    """One reduced form per SL2(Z)-class of positive definite forms of discriminant ``D``."""
    if D >= 0:
        raise ValueError("class_representatives requires D < 0")
    if D % 4 not in (0, 1):
        return []
    reps = []
    a_max = isqrt(-D // 3)
    for a in range(1, a_max + 1):
        for b in range(-a + 1, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            Q = Form(a, b, c)
            if Q.is_reduced():
                reps.append(Q)
    return reps


def stabilizer_order(Q: Form) -> int:
    """Order of the stabiliser of ``Q`` in PSL2(Z), for reduced ``Q``."""
    _require_definite(Q)
    if not Q.is_reduced():
        raise ValueError(f"{Q} is not reduced")
    a, b, c = Q
    if a == b == c:
        return 3
    if b == 0 and a == c:
        return 2
    return 1


def hurwitz_class_number(D: int) -> Fraction:
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"invalid discriminant {D}")
    return sum((Fraction(1, stabilizer_order(Q)) for Q in class_representatives(D)), Fraction(0))


@dataclass(frozen=True)
class CMPoint:
    value: object
    source_form: Form


def cm_point(Q: Form, ctx: PrecisionContext) -> CMPoint:
    _require_definite(Q)
    mp = ctx.mp
    z = mp.mpc(-Q.b, mp.sqrt(-Q.discriminant)) / (2 * Q.a)
    return CMPoint(z, Q)
