"""Integer-lattice geometry of the resonant and near-resonant cones.

A multiplier exponent ``m = (m1, m2)`` is classified by its coordinates in a
unimodular basis ``(alpha, (p, q))``.  Every predicate below reduces to
integer arithmetic; slopes are compared by cross multiplication.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .cfrac import Surd, cf_convergents, cf_quotients, spec_value
from .errors import ConfigurationError, NotCoprime, NotIrrational


class MultiIndex(NamedTuple):
    m1: int
    m2: int

    @property
    def degree(self) -> int:
        return self.m1 + self.m2


def multi_index(m) -> MultiIndex:
    m1, m2 = (int(v) for v in m)
    if m1 < 0 or m2 < 0:
        raise ValueError(f"multi-index must be nonnegative, got {(m1, m2)}")
    return MultiIndex(m1, m2)


@dataclass(frozen=True)
class ResonanceFrame:
    """Arithmetic data of a ``q:-p`` modulus resonance.

    ``alpha0 = (r0, s0)`` solves ``q*r - p*s = 1`` inside the box
    ``[0, p] x [0, q]`` and ``alpha1 = (p, q) - alpha0``.
    """

    p: int
    q: int
    r0: int
    s0: int
    r1: int
    s1: int
    N: int

    def __post_init__(self):
        p, q = self.p, self.q
        problems = []
        if p < 1 or q < 1 or math.gcd(p, q) != 1:
            problems.append("p, q must be coprime positive integers")
        if q * self.r0 - p * self.s0 != 1:
            problems.append("q*r0 - p*s0 != 1")
        if q * self.r1 - p * self.s1 != -1:
            problems.append("q*r1 - p*s1 != -1")
        if not (0 <= self.r0 <= p and 0 <= self.s0 <= q and 0 <= self.r1 <= p and 0 <= self.s1 <= q):
            problems.append("Bezout pair outside the box")
        if (self.r0 + self.r1, self.s0 + self.s1) != (p, q):
            problems.append("alpha0 + alpha1 != (p, q)")
        if self.N < 0:
            problems.append("N must be nonnegative")
        if problems:
            raise ConfigurationError("invalid resonance frame: " + "; ".join(problems))

    @property
    def alpha0(self) -> MultiIndex:
        return MultiIndex(self.r0, self.s0)

    @property
    def alpha1(self) -> MultiIndex:
        return MultiIndex(self.r1, self.s1)

    @property
    def resonant(self) -> MultiIndex:
        return MultiIndex(self.p, self.q)

    @property
    def lower_ray(self) -> MultiIndex:
        """``alpha0 + (N+1)(p, q)``: the edge shared by G0 and the tilde-B cone."""
        return MultiIndex(self.r0 + (self.N + 1) * self.p, self.s0 + (self.N + 1) * self.q)

    @property
    def upper_ray(self) -> MultiIndex:
        """``alpha1 + (N+1)(p, q)``: the edge shared by G1 and the hat-B cone."""
        return MultiIndex(self.r1 + (self.N + 1) * self.p, self.s1 + (self.N + 1) * self.q)

    def swapped(self) -> "ResonanceFrame":
        """Frame describing the same resonance after exchanging ``x1`` and ``x2``."""
        return resonance_frame(self.q, self.p, self.N)


@dataclass(frozen=True)
class ConvergentFrame:
    """Consecutive convergents ``q/p`` (index 2k+1) and ``qt/pt`` (index 2k+2).

    ``u = x1**p x2**q`` and ``ut = x1**pt x2**qt``.  ``quotients`` is empty for
    frames derived by :meth:`swapped`.
    """

    quotients: tuple
    k: int
    p: int
    q: int
    pt: int
    qt: int

    def __post_init__(self):
        if min(self.p, self.q, self.pt, self.qt) < 1:
            raise ConfigurationError("convergent frame entries must be positive")
        if abs(self.q * self.pt - self.qt * self.p) != 1:
            raise ConfigurationError("consecutive convergents must form a unimodular pair")
        if not self.q * self.pt < self.qt * self.p:
            raise ConfigurationError("need q/p < qt/pt")
        if self.quotients:
            conv = cf_convergents(self.quotients)
            if len(conv) < 2 * self.k + 2:
                raise ConfigurationError("not enough quotients for the requested k")
            if conv[2 * self.k] != (self.q, self.p) or conv[2 * self.k + 1] != (self.qt, self.pt):
                raise ConfigurationError("frame does not match convergents 2k+1, 2k+2")

    @property
    def det(self) -> int:
        """``p*qt - q*pt`` (always +1 for these frames, kept general)."""
        return self.p * self.qt - self.q * self.pt

    @property
    def u(self) -> MultiIndex:
        return MultiIndex(self.p, self.q)

    @property
    def ut(self) -> MultiIndex:
        return MultiIndex(self.pt, self.qt)

    def coordinates(self, m) -> tuple[int, int]:
        """``(j, l)`` with ``m = j*(p, q) + l*(pt, qt)``."""
        m1, m2 = m
        d = self.det
        return (self.qt * m1 - self.pt * m2) * d, (self.p * m2 - self.q * m1) * d

    def swapped(self) -> "ConvergentFrame":
        # after x1 <-> x2 the lower ray is (qt, pt) and the upper ray (q, p)
        return ConvergentFrame((), self.k, self.qt, self.pt, self.q, self.p)


class ConeTag(enum.Enum):
    G0 = "G0"
    B0 = "B0"
    B1 = "B1"
    B2 = "B2"
    TildeB = "TildeB"
    G1 = "G1"
    HatB = "HatB"
    IrrStage1 = "IrrStage1"
    IrrStage2 = "IrrStage2"
    IrrFinal = "IrrFinal"

    @property
    def irrational(self) -> bool:
        return self.name.startswith("Irr")


RESONANT_TAGS = (ConeTag.G0, ConeTag.B0, ConeTag.B1, ConeTag.B2, ConeTag.TildeB, ConeTag.G1, ConeTag.HatB)
IRRATIONAL_TAGS = (ConeTag.IrrStage1, ConeTag.IrrStage2, ConeTag.IrrFinal)


# ---------------------------------------------------------------- Bezout data


def bezout_box(p: int, q: int) -> tuple[int, int]:
    """The unique ``(r0, s0)`` with ``q*r0 - p*s0 = 1``, ``0 <= r0 <= p``, ``0 <= s0 <= q``."""
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise NotCoprime(f"p={p} and q={q} must be coprime positive integers")
    if p == 1:
        return 1, q - 1
    r0 = pow(q, -1, p)
    s0 = (q * r0 - 1) // p
    return r0, s0


def resonance_frame(p: int, q: int, N: int) -> ResonanceFrame:
    r0, s0 = bezout_box(p, q)
    if N < 0:
        raise ConfigurationError("N must be nonnegative")
    return ResonanceFrame(p, q, r0, s0, p - r0, q - s0, N)


def basis_decompose(m, frame: ResonanceFrame, branch: int) -> tuple[int, int]:
    """Integer coordinates ``(k1, k2)`` of ``m`` in the basis ``(alpha_branch, (p, q))``."""
    m1, m2 = m
    p, q = frame.p, frame.q
    if branch == 0:
        # det [[r0, p], [s0, q]] = 1
        return q * m1 - p * m2, frame.r0 * m2 - frame.s0 * m1
    if branch == 1:
        # det [[r1, p], [s1, q]] = -1
        return p * m2 - q * m1, frame.s1 * m1 - frame.r1 * m2
    raise ValueError("branch must be 0 or 1")


# ---------------------------------------------------------------- cones


def _check_frame(tag: ConeTag, frame):
    want = ConvergentFrame if tag.irrational else ResonanceFrame
    if not isinstance(frame, want):
        raise ConfigurationError(f"cone {tag.value} needs a {want.__name__}, got {type(frame).__name__}")


def cone_member(m, tag: ConeTag, frame) -> bool:
    """Membership of ``m`` in the cone named by ``tag``."""
    _check_frame(tag, frame)
    m1, m2 = m
    if tag.irrational:
        p, q, pt, qt = frame.p, frame.q, frame.pt, frame.qt
        if tag is ConeTag.IrrStage1:
            return p * m2 < q * m1
        if tag is ConeTag.IrrStage2:
            return pt * m2 > qt * m1
        j, l = frame.coordinates((m1, m2))
        return j >= 0 and l >= 0 and j + l >= 1

    N = frame.N
    if tag in (ConeTag.G0, ConeTag.B0, ConeTag.B1, ConeTag.B2):
        k1, k2 = basis_decompose((m1, m2), frame, 0)
        in_g0 = k1 >= 1 and k2 <= (N + 1) * k1
        if tag is ConeTag.G0:
            return in_g0
        if tag is ConeTag.B0:
            return not in_g0
        if tag is ConeTag.B2:
            return k1 <= 0
        return k1 >= 1 and k2 >= (N + 1) * k1 + 1
    if tag is ConeTag.G1:
        k1, k2 = basis_decompose((m1, m2), frame, 1)
        return k1 >= 1 and k2 <= (N + 1) * k1
    lo = frame.lower_ray
    above_lower = m2 * lo.m1 >= m1 * lo.m2
    if tag is ConeTag.TildeB:
        return above_lower
    hi = frame.upper_ray
    return above_lower and m2 * hi.m1 <= m1 * hi.m2


def enumerate_cone(tag: ConeTag, frame, maxdeg: int, include_origin: bool = False) -> list[MultiIndex]:
    """Members with ``m1 + m2 <= maxdeg`` in lexicographic order.

    The origin is a formal member of several cones but carries no monomial, so
    it is listed only on request.
    """
    if maxdeg < 0:
        raise ValueError("maxdeg must be nonnegative")
    out = []
    for m1 in range(maxdeg + 1):
        for m2 in range(maxdeg + 1 - m1):
            if m1 == 0 and m2 == 0 and not include_origin:
                continue
            if cone_member((m1, m2), tag, frame):
                out.append(MultiIndex(m1, m2))
    return out


def lattice_csv(frame, maxdeg: int, tags=None) -> str:
    """CSV table ``m1,m2,set`` with one row per (member, cone) pair."""
    if tags is None:
        tags = IRRATIONAL_TAGS if isinstance(frame, ConvergentFrame) else RESONANT_TAGS
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m1", "m2", "set"])
    rows = []
    for tag in tags:
        rows.extend((m.m1, m.m2, tag.value) for m in enumerate_cone(tag, frame, maxdeg))
    rows.sort(key=lambda r: (r[0], r[1]))
    writer.writerows(rows)
    return buf.getvalue()


def theorem2_frame(spec, k: int) -> ConvergentFrame:
    """Frame built from convergents ``2k+1`` and ``2k+2`` of an irrational ratio."""
    if k < 0:
        raise ConfigurationError("k must be nonnegative")
    need = 2 * k + 2
    expansion = cf_quotients(spec, need)
    if expansion.rational:
        raise NotIrrational(f"{spec} is rational; use the resonant pipeline (mode 'theorem1')")
    if len(expansion.quotients) < need:
        raise ConfigurationError(f"{need} partial quotients are required, got {len(expansion.quotients)}")
    conv = cf_convergents(expansion.quotients)
    (q, p), (qt, pt) = conv[2 * k], conv[2 * k + 1]
    frame = ConvergentFrame(tuple(expansion.quotients), k, p, q, pt, qt)
    if isinstance(spec, Surd):
        if not (spec.compare(Fraction(q, p)) > 0 and spec.compare(Fraction(qt, pt)) < 0):
            raise ConfigurationError(f"convergents {q}/{p}, {qt}/{pt} do not bracket the surd")
    elif not isinstance(spec, (list, tuple)):
        R = spec_value(spec)
        if not q / p < R < qt / pt:
            raise ConfigurationError(f"convergents {q}/{p}, {qt}/{pt} do not bracket {R}")
    return frame
