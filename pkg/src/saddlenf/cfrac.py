"""Simple continued fractions of rationals and quadratic surds, and their convergents."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import ConfigurationError, DomainError, NotIrrational

# quotients of a float beyond this count are dominated by representation error
FLOAT_TERM_GUARD = 12


@dataclass(frozen=True)
class Surd:
    """The quadratic irrational ``(a + b*sqrt(d)) / c``."""

    a: int
    b: int
    d: int
    c: int

    def __post_init__(self):
        if self.c == 0:
            raise DomainError("surd denominator is zero")
        if self.d <= 0:
            raise DomainError(f"radicand must be positive, got {self.d}")
        if math.isqrt(self.d) ** 2 == self.d or self.b == 0:
            raise NotIrrational(f"({self.a} + {self.b}*sqrt({self.d}))/{self.c} is rational")

    def __float__(self):
        return (self.a + self.b * math.sqrt(self.d)) / self.c

    def compare(self, x) -> int:
        """Exact sign of ``self - x`` for a rational ``x``."""
        x = Fraction(x)
        # sign of (a*den - num*c + b*den*sqrt(d)) / (c*den)
        A = self.a * x.denominator - x.numerator * self.c
        B = self.b * x.denominator
        s = _sign_surd(A, B, self.d)
        return s if self.c > 0 else -s


def _sign_surd(A: int, B: int, d: int) -> int:
    """Sign of ``A + B*sqrt(d)`` for non-square ``d``."""
    if A >= 0 and B >= 0:
        return 1 if (A or B) else 0
    if A <= 0 and B <= 0:
        return -1
    # opposite signs: compare squares
    lhs, rhs = A * A, B * B * d
    if A > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


class Expansion(NamedTuple):
    quotients: tuple
    rational: bool


def _rational_quotients(x: Fraction, count: int) -> list[int]:
    out = []
    num, den = x.numerator, x.denominator
    while den and len(out) < count:
        a, r = divmod(num, den)
        out.append(a)
        num, den = den, r
    return out


def _surd_quotients(s: Surd, count: int) -> list[int]:
    a, b, d, c = s.a, s.b, s.d, s.c
    if b < 0:
        a, b, c = -a, -b, -c
    # (a + sqrt(b*b*d)) / c, rescaled so that Q divides D - P**2
    P, D, Q = a * abs(c), b * b * d * c * c, c * abs(c)
    root = math.isqrt(D)
    out = []
    while len(out) < count:
        if Q > 0:
            q_ = (P + root) // Q
        else:
            q_ = -((P + root) // -Q) - 1
        out.append(q_)
        P = q_ * Q - P
        Q = (D - P * P) // Q
    return out


def cf_quotients(spec, count: int) -> Expansion:
    """First ``count`` partial quotients of a positive real.

    ``spec`` is a :class:`Surd`, a rational (``Fraction``, ``mpq``, int or
    ``"a/b"`` string), an explicit sequence of quotients, or a float.  Floats
    are allowed for at most ``FLOAT_TERM_GUARD`` quotients and always warn.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if isinstance(spec, Surd):
        if spec.compare(0) <= 0:
            raise DomainError("continued fractions are taken of positive values only")
        return Expansion(tuple(_surd_quotients(spec, count)), False)
    if isinstance(spec, float):
        if not math.isfinite(spec) or spec <= 0:
            raise DomainError(f"need a positive finite value, got {spec}")
        if count > FLOAT_TERM_GUARD:
            raise ConfigurationError(
                f"at most {FLOAT_TERM_GUARD} quotients may be requested from a float"
            )
        warnings.warn("continued fraction of a float: late quotients may be unreliable", stacklevel=2)
        return Expansion(tuple(_rational_quotients(Fraction(spec), count)), False)
    if isinstance(spec, (list, tuple)):
        quotients = tuple(int(a) for a in spec)
        _check_quotients(quotients)
        return Expansion(quotients[:count], False)
    try:
        x = Fraction(str(spec)) if not isinstance(spec, int) else Fraction(spec)
    except (ValueError, TypeError):
        raise ConfigurationError(f"cannot interpret {spec!r} as a continued-fraction input") from None
    if x <= 0:
        raise DomainError(f"need a positive value, got {x}")
    return Expansion(tuple(_rational_quotients(x, count)), True)


def _check_quotients(quotients: Sequence[int]):
    if not quotients:
        raise ConfigurationError("need at least one partial quotient")
    if quotients[0] < 0 or any(a < 1 for a in quotients[1:]):
        raise DomainError("partial quotients must be positive (the first may be 0)")


def cf_convergents(quotients: Sequence[int]) -> list[tuple[int, int]]:
    """Convergents ``(q_n, p_n)`` with ``q_1/p_1 = a_1``."""
    _check_quotients(quotients)
    out = []
    q_prev, q_cur = 0, 1
    p_prev, p_cur = 1, 0
    for a in quotients:
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        out.append((q_cur, p_cur))
    return out


def spec_value(spec) -> float:
    """Float approximation of a continued-fraction input."""
    if isinstance(spec, (list, tuple)):
        x = Fraction(0)
        for a in reversed(spec[1:]):
            x = 1 / (a + x)
        return float(spec[0] + x)
    if isinstance(spec, (Surd, float)):
        return float(spec)
    return float(Fraction(str(spec)))


def fibonacci(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a
