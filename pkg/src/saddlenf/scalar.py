"""Coefficient rings.

Four rings are supported and a computation never mixes them:

* ``RATIONAL``  exact rationals (``gmpy2.mpq`` values)
* ``GAUSSIAN``  exact Gaussian rationals (:class:`GaussianRational`)
* ``COMPLEX``   double precision complex numbers (builtin ``complex``)
* ``JetRing(base, order)``  truncated Taylor expansions in one parameter
  (:class:`ParamJet`), used to follow analytic parameter dependence.

Values are plain Python objects with arithmetic operators, so series code is
ring agnostic; the ring object supplies the pieces operators cannot express
(units, zero tests, moduli, literals).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from gmpy2 import mpq

from .errors import ConfigurationError, DomainError, NonInvertible, RingMismatch

MPQ = type(mpq(0))

_RATIONAL_LITERAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def rational(value) -> MPQ:
    """Build an exact rational from an int, mpq, Fraction or ``"a/b"`` string."""
    if isinstance(value, MPQ):
        return value
    if isinstance(value, bool):
        raise ConfigurationError(f"not a rational literal: {value!r}")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, str):
        if not _RATIONAL_LITERAL.match(value):
            raise ConfigurationError(f"not a rational literal: {value!r}")
        num, _, den = value.replace(" ", "").partition("/")
        if den and int(den) == 0:
            raise ConfigurationError(f"zero denominator in {value!r}")
        return mpq(int(num), int(den) if den else 1)
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return mpq(int(value.numerator), int(value.denominator))
    raise ConfigurationError(f"not a rational literal: {value!r}")


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = rational(re)
        self.im = rational(im)

    @classmethod
    def _raw(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @staticmethod
    def _lift(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, MPQ)) and not isinstance(other, bool):
            return GaussianRational._raw(mpq(other), mpq(0))
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pow__(self, n: int):
        return _power(self, n, GaussianRational._raw(mpq(1), mpq(0)))

    def conjugate(self):
        return GaussianRational._raw(self.re, -self.im)

    def norm(self) -> MPQ:
        return self.re * self.re + self.im * self.im

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise NonInvertible(self)
        return GaussianRational._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        return f"({self.re})+({self.im})i"


class ParamJet:
    """Truncated Taylor expansion ``c0 + c1*t + ... + cJ*t**J`` with ``t = lambda - lambda0``.

    Coefficients live in ``base`` (one of the three non-jet rings).  Products
    drop every power of ``t`` above the order.
    """

    __slots__ = ("coeffs", "base")

    def __init__(self, coeffs, base):
        coeffs = tuple(base.coerce(c) for c in coeffs)
        if not coeffs:
            raise ConfigurationError("a jet needs at least one coefficient")
        self.coeffs = coeffs
        self.base = base

    @classmethod
    def _raw(cls, coeffs, base):
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        obj.base = base
        return obj

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def _lift(self, other):
        if isinstance(other, ParamJet):
            if other.base != self.base or len(other.coeffs) != len(self.coeffs):
                raise RingMismatch(f"jet rings differ: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return ParamJet._raw((self.base.coerce(other),) + (self.base.zero,) * self.order, self.base)
        return None

    @property
    def ring(self):
        return JetRing(self.base, self.order)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ParamJet._raw(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)), self.base)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ParamJet._raw(tuple(a - b for a, b in zip(self.coeffs, o.coeffs)), self.base)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        out = []
        for n in range(len(a)):
            acc = a[0] * b[n]
            for j in range(1, n + 1):
                acc = acc + a[j] * b[n - j]
            out.append(acc)
        return ParamJet._raw(tuple(out), self.base)

    __rmul__ = __mul__

    def __neg__(self):
        return ParamJet._raw(tuple(-c for c in self.coeffs), self.base)

    def __pow__(self, n: int):
        return _power(self, n, self.ring.one)

    def inverse(self):
        a = self.coeffs
        if self.base.is_zero(a[0]):
            raise NonInvertible(self, f"jet with zero constant term is not a unit: {self!r}")
        inv0 = self.base.inv(a[0])
        out = [inv0]
        for n in range(1, len(a)):
            acc = a[1] * out[n - 1]
            for j in range(2, n + 1):
                acc = acc + a[j] * out[n - j]
            out.append(-(inv0 * acc))
        return ParamJet._raw(tuple(out), self.base)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def evaluate(self, t=0):
        """Value of the truncated expansion at ``t`` (``t = 0`` gives the base point)."""
        if t == 0:
            return self.coeffs[0]
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * t + c
        return acc

    def __eq__(self, other):
        if isinstance(other, ParamJet):
            return self.base == other.base and self.coeffs == other.coeffs
        if isinstance(other, int) and not isinstance(other, bool):
            return self.coeffs[0] == other and all(self.base.is_zero(c) for c in self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return any(not self.base.is_zero(c) for c in self.coeffs)

    def __repr__(self):
        return f"ParamJet({[str(c) for c in self.coeffs]}, {self.base.name})"


def _power(x, n, one):
    if n < 0:
        raise ValueError("negative exponent")
    result = one
    while n:
        if n & 1:
            result = result * x
        n >>= 1
        if n:
            x = x * x
    return result


# ---------------------------------------------------------------- rings


class Ring:
    """Interface shared by the coefficient rings."""

    name: str
    exact: bool

    def contains(self, a) -> bool:
        raise NotImplementedError

    def coerce(self, a):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == 0

    def inv(self, a):
        raise NotImplementedError

    def mag2(self, a):
        raise NotImplementedError

    def magnitude(self, a) -> float:
        """Float modulus, used only for diagnostics and tolerances."""
        return math.sqrt(float(self.mag2(a)))

    def size(self, a) -> float:
        """Float size of a value; for jets the largest coefficient modulus."""
        return self.magnitude(a)

    def to_complex(self, a) -> complex:
        raise NotImplementedError

    def parse(self, literal):
        raise NotImplementedError

    def dump(self, a):
        raise NotImplementedError

    def power(self, a, n: int):
        return _power(a, n, self.one)

    def check(self, a):
        if not self.contains(a):
            raise RingMismatch(f"{a!r} is not an element of the {self.name} ring")
        return a


@dataclass(frozen=True)
class RationalField(Ring):
    name: str = "rational"
    exact: bool = True

    @property
    def zero(self):
        return mpq(0)

    @property
    def one(self):
        return mpq(1)

    def contains(self, a):
        return isinstance(a, MPQ)

    def coerce(self, a):
        return rational(a)

    def inv(self, a):
        if a == 0:
            raise NonInvertible(a, "zero is not invertible in the rationals")
        return 1 / a

    def mag2(self, a):
        return a * a

    def magnitude(self, a):
        return abs(float(a))

    def to_complex(self, a):
        return complex(float(a))

    def parse(self, literal):
        if not isinstance(literal, (str, int)) or isinstance(literal, bool):
            raise ConfigurationError(f"rational literals are strings 'a/b', got {literal!r}")
        return rational(literal)

    def dump(self, a):
        return str(a)


@dataclass(frozen=True)
class GaussianField(Ring):
    name: str = "gaussian"
    exact: bool = True

    @property
    def zero(self):
        return GaussianRational._raw(mpq(0), mpq(0))

    @property
    def one(self):
        return GaussianRational._raw(mpq(1), mpq(0))

    def contains(self, a):
        return isinstance(a, GaussianRational)

    def coerce(self, a):
        if isinstance(a, GaussianRational):
            return a
        return GaussianRational(rational(a), 0)

    def inv(self, a):
        return a.inverse()

    def mag2(self, a):
        return a.norm()

    def to_complex(self, a):
        return complex(a)

    def parse(self, literal):
        if isinstance(literal, dict):
            extra = set(literal) - {"re", "im"}
            if extra:
                raise ConfigurationError(f"unknown Gaussian literal fields {sorted(extra)}")
            return GaussianRational(rational(literal.get("re", "0")), rational(literal.get("im", "0")))
        return GaussianRational(rational(literal), 0)

    def dump(self, a):
        return {"re": str(a.re), "im": str(a.im)}


@dataclass(frozen=True)
class ComplexField(Ring):
    name: str = "complex"
    exact: bool = False

    @property
    def zero(self):
        return 0j

    @property
    def one(self):
        return 1 + 0j

    def contains(self, a):
        return isinstance(a, complex)

    def coerce(self, a):
        if isinstance(a, (GaussianRational, MPQ)):
            a = complex(a) if isinstance(a, GaussianRational) else complex(float(a))
        a = complex(a)
        return self.check(a)

    def check(self, a):
        if not isinstance(a, complex):
            raise RingMismatch(f"{a!r} is not an element of the complex ring")
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise DomainError(f"non-finite complex value {a!r}")
        return a

    def inv(self, a):
        if a == 0:
            raise NonInvertible(a, "zero is not invertible")
        return self.check(1 / a)

    def mag2(self, a):
        return a.real * a.real + a.imag * a.imag

    def magnitude(self, a):
        return abs(a)

    def to_complex(self, a):
        return a

    def parse(self, literal):
        if isinstance(literal, (list, tuple)) and len(literal) == 2:
            re_, im_ = literal
            if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re_, im_)):
                return self.check(complex(float(re_), float(im_)))
        raise ConfigurationError(f"complex literals are [re, im] number pairs, got {literal!r}")

    def dump(self, a):
        return [a.real, a.imag]


@dataclass(frozen=True)
class JetRing(Ring):
    base: Ring = RationalField()
    order: int = 1
    exact: bool = True

    def __post_init__(self):
        if isinstance(self.base, JetRing):
            raise ConfigurationError("jets over jets are not supported")
        if self.order < 0:
            raise ConfigurationError("jet order must be nonnegative")
        object.__setattr__(self, "exact", self.base.exact)

    @property
    def name(self):
        return f"jet[{self.base.name},{self.order}]"

    @property
    def zero(self):
        return ParamJet._raw((self.base.zero,) * (self.order + 1), self.base)

    @property
    def one(self):
        return ParamJet._raw((self.base.one,) + (self.base.zero,) * self.order, self.base)

    def contains(self, a):
        return isinstance(a, ParamJet) and a.base == self.base and a.order == self.order

    def coerce(self, a):
        if isinstance(a, ParamJet):
            return self.check(a)
        return ParamJet._raw((self.base.coerce(a),) + (self.base.zero,) * self.order, self.base)

    def constant(self, c):
        return self.coerce(c)

    def is_zero(self, a):
        return all(self.base.is_zero(c) for c in a.coeffs)

    def inv(self, a):
        return a.inverse()

    def mag2(self, a):
        return self.base.mag2(a.coeffs[0])

    def size(self, a):
        return max(self.base.magnitude(c) for c in a.coeffs)

    def to_complex(self, a):
        return self.base.to_complex(a.coeffs[0])

    def evaluate(self, a, t=0):
        return a.evaluate(t)

    def parse(self, literal):
        if not isinstance(literal, list) or len(literal) != self.order + 1:
            raise ConfigurationError(
                f"jet literals are arrays of {self.order + 1} base literals, got {literal!r}"
            )
        return ParamJet._raw(tuple(self.base.parse(c) for c in literal), self.base)

    def dump(self, a):
        return [self.base.dump(c) for c in a.coeffs]


RATIONAL = RationalField()
GAUSSIAN = GaussianField()
COMPLEX = ComplexField()


def ring_of(a) -> Ring:
    """The ring a value belongs to."""
    if isinstance(a, MPQ):
        return RATIONAL
    if isinstance(a, GaussianRational):
        return GAUSSIAN
    if isinstance(a, complex):
        return COMPLEX
    if isinstance(a, ParamJet):
        return a.ring
    raise ConfigurationError(f"{a!r} does not belong to a supported ring")


def ring_from_tag(tag: str, base: str | None = None, order: int | None = None) -> Ring:
    simple = {"rational": RATIONAL, "gaussian": GAUSSIAN, "complex": COMPLEX}
    if tag in simple:
        return simple[tag]
    if tag == "jet":
        if base not in simple or order is None:
            raise ConfigurationError("jet ring needs a base ring tag and an order")
        return JetRing(simple[base], int(order))
    raise ConfigurationError(f"unknown ring tag {tag!r}")


# ---------------------------------------------------------------- operations


def ring_arith(a, b, op: str):
    """``a op b`` for ``op`` in add/sub/mul, refusing to mix rings."""
    ra, rb = ring_of(a), ring_of(b)
    if ra != rb:
        raise RingMismatch(f"cannot combine {ra.name} with {rb.name}")
    if op == "add":
        out = a + b
    elif op == "sub":
        out = a - b
    elif op == "mul":
        out = a * b
    else:
        raise ConfigurationError(f"unknown ring operation {op!r}")
    return ra.check(out)


def invert_scalar(a):
    return ring_of(a).inv(a)


def magnitude_squared(a):
    """``|a|**2``: exact rational in exact rings, float for complex; jets use the constant term."""
    return ring_of(a).mag2(a)


__all__ = [
    "COMPLEX",
    "GAUSSIAN",
    "RATIONAL",
    "ComplexField",
    "GaussianField",
    "GaussianRational",
    "JetRing",
    "MPQ",
    "ParamJet",
    "RationalField",
    "Ring",
    "invert_scalar",
    "magnitude_squared",
    "rational",
    "ring_arith",
    "ring_from_tag",
    "ring_of",
]
