"""Truncated bivariate power series and planar maps with diagonal linear part.

Storage is sparse (exponent tuple -> coefficient); iteration is by total
degree.  Exact rings never store zero coefficients.  Approximate rings keep
every computed value, so nothing small is silently pruned.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import RingMismatch, StructureError
from .scalar import Ring


class Series2:
    """``sum c_m x1**m1 x2**m2`` over ``m1 + m2 <= degree``."""

    __slots__ = ("ring", "degree", "_terms")

    def __init__(self, ring: Ring, degree: int, terms: Mapping | Iterable = ()):
        if degree < 0:
            raise ValueError("degree bound must be nonnegative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        for k, v in items:
            m1, m2 = int(k[0]), int(k[1])
            if m1 < 0 or m2 < 0:
                raise ValueError(f"negative exponent {k}")
            if m1 + m2 > degree:
                raise ValueError(f"exponent {k} exceeds degree bound {degree}")
            v = ring.check(v)
            if (m1, m2) in clean:
                v = clean[(m1, m2)] + v
            clean[(m1, m2)] = v
        self.ring = ring
        self.degree = degree
        self._terms = _prune(ring, clean)

    @classmethod
    def _raw(cls, ring, degree, terms):
        obj = object.__new__(cls)
        obj.ring = ring
        obj.degree = degree
        obj._terms = _prune(ring, terms)
        return obj

    @classmethod
    def zero(cls, ring, degree):
        return cls._raw(ring, degree, {})

    @classmethod
    def monomial(cls, ring, degree, m, c=None):
        c = ring.one if c is None else ring.coerce(c)
        if m[0] + m[1] > degree:
            return cls.zero(ring, degree)
        return cls._raw(ring, degree, {(m[0], m[1]): c})

    # -- access

    def __getitem__(self, m):
        return self._terms.get((m[0], m[1]), self.ring.zero)

    def __contains__(self, m):
        return (m[0], m[1]) in self._terms

    def __iter__(self):
        return iter(sorted(self._terms))

    def __len__(self):
        return len(self._terms)

    def items(self):
        """Terms sorted by (total degree, m1 descending)."""
        return sorted(self._terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][0]))

    def terms(self) -> dict:
        return dict(self._terms)

    def homogeneous(self, n: int) -> "Series2":
        return Series2._raw(self.ring, self.degree, {k: v for k, v in self._terms.items() if k[0] + k[1] == n})

    def truncate(self, degree: int) -> "Series2":
        return Series2._raw(self.ring, degree, {k: v for k, v in self._terms.items() if k[0] + k[1] <= degree})

    def min_degree(self):
        return min((k[0] + k[1] for k in self._terms), default=None)

    def map_coefficients(self, fn, ring: Ring) -> "Series2":
        return Series2._raw(ring, self.degree, {k: fn(v) for k, v in self._terms.items()})

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(v) for v in self._terms.values())

    def __eq__(self, other):
        if not isinstance(other, Series2):
            return NotImplemented
        if self.ring != other.ring or self.degree != other.degree:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({v})*x^{k}" for k, v in self.items()) or "0"
        return f"Series2[{self.ring.name}, D={self.degree}]({body})"

    # -- arithmetic

    def _same(self, other):
        if not isinstance(other, Series2):
            raise TypeError(f"expected Series2, got {type(other).__name__}")
        if other.ring != self.ring:
            raise RingMismatch(f"series rings differ: {self.ring.name} vs {other.ring.name}")

    def __add__(self, other):
        self._same(other)
        D = min(self.degree, other.degree)
        out = {k: v for k, v in self._terms.items() if k[0] + k[1] <= D}
        for k, v in other._terms.items():
            if k[0] + k[1] <= D:
                out[k] = out[k] + v if k in out else v
        return Series2._raw(self.ring, D, out)

    def __neg__(self):
        return Series2._raw(self.ring, self.degree, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        self._same(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Series2):
            c = self.ring.check(other)
            return Series2._raw(self.ring, self.degree, {k: v * c for k, v in self._terms.items()})
        self._same(other)
        D = min(self.degree, other.degree)
        return Series2._raw(self.ring, D, _mul_terms(self._terms, other._terms, D))

    def scale(self, c) -> "Series2":
        return self * self.ring.check(c)

    def evaluate(self, x1, x2):
        """Value at a point whose coordinates lie in the series ring."""
        by_m1 = defaultdict(list)
        for (m1, m2), v in self._terms.items():
            by_m1[m1].append((m2, v))
        pow2 = [None, x2]
        for _ in range(2, self.degree + 1):
            pow2.append(pow2[-1] * x2)
        result = self.ring.zero
        pow1 = None
        for m1 in range(self.degree + 1):
            if m1:
                pow1 = x1 if m1 == 1 else pow1 * x1
            for m2, v in by_m1.get(m1, ()):
                t = v if m1 == 0 else v * pow1
                if m2:
                    t = t * pow2[m2]
                result = result + t
        return result


def _prune(ring, terms):
    if ring.exact:
        return {k: v for k, v in terms.items() if not ring.is_zero(v)}
    return terms


def _by_degree(terms):
    groups = defaultdict(list)
    for k, v in terms.items():
        groups[k[0] + k[1]].append((k, v))
    return groups


def _mul_terms(a: dict, b: dict, D: int) -> dict:
    """Cauchy product truncated at total degree ``D``."""
    if len(a) > len(b):
        a, b = b, a
    groups = sorted(_by_degree(b).items())
    out = {}
    for (a1, a2), va in a.items():
        room = D - a1 - a2
        for deg, group in groups:
            if deg > room:
                break
            for (b1, b2), vb in group:
                key = (a1 + b1, a2 + b2)
                t = va * vb
                out[key] = out[key] + t if key in out else t
    return out


# ---------------------------------------------------------------- planar maps


@dataclass(frozen=True, eq=False)
class PlanarMap:
    """``(mu1*x1 + n1(x), mu2*x2 + n2(x))`` with ``n1, n2`` of order >= 2."""

    mu1: object
    mu2: object
    n1: Series2
    n2: Series2

    def __post_init__(self):
        ring = self.n1.ring
        if self.n2.ring != ring:
            raise RingMismatch("components live in different rings")
        if self.n1.degree != self.n2.degree:
            raise ValueError("components have different degree bounds")
        ring.check(self.mu1)
        ring.check(self.mu2)
        for i, s in ((1, self.n1), (2, self.n2)):
            low = [k for k in s._terms if k[0] + k[1] < 2]
            if low:
                raise StructureError(
                    f"component {i} has constant or linear terms in the nonlinear part",
                    [(i, k, "degree < 2") for k in low],
                )

    @property
    def ring(self) -> Ring:
        return self.n1.ring

    @property
    def degree(self) -> int:
        return self.n1.degree

    @property
    def mu(self):
        return (self.mu1, self.mu2)

    def nonlinear(self, i: int) -> Series2:
        return self.n1 if i == 1 else self.n2

    def component(self, i: int) -> Series2:
        """Full component ``i`` including its linear term."""
        s = self.nonlinear(i)
        terms = dict(s._terms)
        e = (1, 0) if i == 1 else (0, 1)
        if self.degree >= 1:
            terms[e] = self.mu1 if i == 1 else self.mu2
        return Series2._raw(self.ring, self.degree, terms)

    @classmethod
    def from_components(cls, c1: Series2, c2: Series2) -> "PlanarMap":
        """Split full components into diagonal linear part and nonlinear part."""
        ring = c1.ring
        bad = []
        for i, s in ((1, c1), (2, c2)):
            for k in s._terms:
                if k == (0, 0):
                    bad.append((i, k, "constant term"))
                elif k[0] + k[1] == 1 and k != ((1, 0) if i == 1 else (0, 1)):
                    bad.append((i, k, "off-diagonal linear term"))
        if bad and any(not ring.is_zero((c1 if i == 1 else c2)[k]) for i, k, _ in bad):
            raise StructureError("map does not fix 0 with a diagonal linear part", bad)
        mu1, mu2 = c1[(1, 0)], c2[(0, 1)]
        n1 = Series2._raw(ring, c1.degree, {k: v for k, v in c1._terms.items() if k[0] + k[1] >= 2})
        n2 = Series2._raw(ring, c2.degree, {k: v for k, v in c2._terms.items() if k[0] + k[1] >= 2})
        return cls(mu1, mu2, n1, n2)

    @classmethod
    def linear(cls, ring, degree, mu1, mu2) -> "PlanarMap":
        z = Series2.zero(ring, degree)
        return cls(ring.coerce(mu1), ring.coerce(mu2), z, z)

    @classmethod
    def identity(cls, ring, degree) -> "PlanarMap":
        return cls.linear(ring, degree, ring.one, ring.one)

    @classmethod
    def from_terms(cls, ring, degree, mu1, mu2, terms) -> "PlanarMap":
        """Build from ``(component, (k1, k2), coeff)`` records of degree >= 2."""
        parts = {1: [], 2: []}
        for i, k, c in terms:
            if i not in parts:
                raise ValueError(f"component must be 1 or 2, got {i}")
            parts[i].append(((k[0], k[1]), ring.coerce(c)))
        return cls(
            ring.coerce(mu1), ring.coerce(mu2), Series2(ring, degree, parts[1]), Series2(ring, degree, parts[2])
        )

    def term_records(self):
        """``(component, exponent, coeff)`` for the nonlinear terms, deterministic order."""
        out = []
        for i in (1, 2):
            for k, v in self.nonlinear(i).items():
                out.append((i, k, v))
        return out

    def map_coefficients(self, fn, ring) -> "PlanarMap":
        return PlanarMap(fn(self.mu1), fn(self.mu2), self.n1.map_coefficients(fn, ring), self.n2.map_coefficients(fn, ring))

    def truncate(self, degree) -> "PlanarMap":
        return PlanarMap(self.mu1, self.mu2, self.n1.truncate(degree), self.n2.truncate(degree))

    def swapped(self) -> "PlanarMap":
        """Conjugate by the coordinate exchange ``(x1, x2) -> (x2, x1)``."""

        def flip(s):
            return Series2._raw(s.ring, s.degree, {(k[1], k[0]): v for k, v in s._terms.items()})

        return PlanarMap(self.mu2, self.mu1, flip(self.n2), flip(self.n1))

    def __eq__(self, other):
        if not isinstance(other, PlanarMap):
            return NotImplemented
        ring = self.ring
        return (
            ring == other.ring
            and ring.is_zero(self.mu1 - other.mu1)
            and ring.is_zero(self.mu2 - other.mu2)
            and self.n1 == other.n1
            and self.n2 == other.n2
        )

    __hash__ = None

    def __sub__(self, other) -> "PlanarMap":
        return PlanarMap(self.mu1 - other.mu1, self.mu2 - other.mu2, self.n1 - other.n1, self.n2 - other.n2)

    def max_abs(self) -> float:
        ring = self.ring
        vals = [ring.size(self.mu1), ring.size(self.mu2)]
        vals += [ring.size(v) for s in (self.n1, self.n2) for v in s._terms.values()]
        return max(vals)

    def __repr__(self):
        return f"PlanarMap(mu1={self.mu1!r}, mu2={self.mu2!r}, n1={self.n1!r}, n2={self.n2!r})"


def _check_pair(F: PlanarMap, G: PlanarMap):
    if F.ring != G.ring:
        raise RingMismatch(f"maps live in different rings: {F.ring.name} vs {G.ring.name}")


def _compose_component(f: dict, g1: dict, g2: dict, D: int, cache: dict) -> dict:
    """Terms of ``f(g1, g2)`` up to degree ``D``; ``g1, g2`` have no constant term."""
    if not f:
        return {}
    max1 = max(k[0] for k in f)
    max2 = max(k[1] for k in f)
    p1 = cache.setdefault("p1", [None])
    p2 = cache.setdefault("p2", [None])
    while len(p1) <= max1:
        p1.append(g1 if len(p1) == 1 else _mul_terms(p1[-1], g1, D))
    while len(p2) <= max2:
        p2.append(g2 if len(p2) == 1 else _mul_terms(p2[-1], g2, D))
    rows = defaultdict(list)
    for (a, b), c in f.items():
        rows[a].append((b, c))
    out = {}
    for a, row in rows.items():
        room = D - a
        inner = {}
        for b, c in row:
            if b == 0:
                inner[(0, 0)] = inner[(0, 0)] + c if (0, 0) in inner else c
                continue
            for k, v in p2[b].items():
                if k[0] + k[1] <= room:
                    t = c * v
                    inner[k] = inner[k] + t if k in inner else t
        if a:
            inner = _mul_terms(p1[a], inner, D)
        for k, v in inner.items():
            out[k] = out[k] + v if k in out else v
    return out


def map_compose(F: PlanarMap, G: PlanarMap, degree: int | None = None) -> PlanarMap:
    """Taylor expansion of ``F o G`` truncated at ``degree`` (default: common bound)."""
    _check_pair(F, G)
    D = min(F.degree, G.degree) if degree is None else degree
    g1 = {k: v for k, v in G.component(1)._terms.items() if k[0] + k[1] <= D}
    g2 = {k: v for k, v in G.component(2)._terms.items() if k[0] + k[1] <= D}
    cache = {}
    c1 = _compose_component(F.component(1)._terms, g1, g2, D, cache)
    c2 = _compose_component(F.component(2)._terms, g1, g2, D, cache)
    ring = F.ring
    return PlanarMap.from_components(Series2._raw(ring, D, c1), Series2._raw(ring, D, c2))


def map_inverse(F: PlanarMap) -> PlanarMap:
    """Formal inverse, built degree by degree from ``G = L^-1 (y - N(G))``."""
    ring = F.ring
    D = F.degree
    inv1, inv2 = ring.inv(F.mu1), ring.inv(F.mu2)
    N = PlanarMap(ring.zero, ring.zero, F.n1, F.n2)
    gain = min((d for d in (F.n1.min_degree(), F.n2.min_degree()) if d is not None), default=None)
    G = PlanarMap.linear(ring, D, inv1, inv2)
    if gain is None:
        return G
    exact = 1
    while exact < D:
        exact = min(D, exact + gain - 1)
        NG = map_compose(N, G, degree=exact)
        G = PlanarMap(
            inv1,
            inv2,
            Series2._raw(ring, D, {k: -v * inv1 for k, v in NG.n1._terms.items()}),
            Series2._raw(ring, D, {k: -v * inv2 for k, v in NG.n2._terms.items()}),
        )
    return G


def map_eval(F: PlanarMap, point):
    x1, x2 = point
    return F.component(1).evaluate(x1, x2), F.component(2).evaluate(x1, x2)


# ---------------------------------------------------------------- multiplier view


@dataclass(frozen=True)
class MultiplierView:
    """Component ``i`` written as ``x_i * (mu_i + sum c[m] x**m)``."""

    ring: Ring
    degree: int
    mu1: object
    mu2: object
    c1: dict
    c2: dict

    def coefficients(self, i: int) -> dict:
        return self.c1 if i == 1 else self.c2

    def mu(self, i: int):
        return self.mu1 if i == 1 else self.mu2

    def exponents(self):
        """All ``(i, m)`` pairs carrying a stored coefficient."""
        return [(i, m) for i in (1, 2) for m in sorted(self.coefficients(i))]


def to_multiplier_view(F: PlanarMap) -> MultiplierView:
    bad = []
    views = {}
    for i in (1, 2):
        c = {}
        for k, v in F.nonlinear(i)._terms.items():
            if k[i - 1] == 0:
                bad.append((i, k, "not divisible by x%d" % i))
                continue
            c[(k[0] - 1, k[1]) if i == 1 else (k[0], k[1] - 1)] = v
        views[i] = c
    if bad:
        raise StructureError("map is not axis preserving", bad)
    return MultiplierView(F.ring, F.degree, F.mu1, F.mu2, views[1], views[2])


def from_view(view: MultiplierView) -> PlanarMap:
    parts = {}
    for i in (1, 2):
        parts[i] = {
            ((m[0] + 1, m[1]) if i == 1 else (m[0], m[1] + 1)): v for m, v in view.coefficients(i).items()
        }
    ring = view.ring
    return PlanarMap(view.mu1, view.mu2, Series2(ring, view.degree, parts[1]), Series2(ring, view.degree, parts[2]))


def axis_preserving(F: PlanarMap) -> bool:
    return all(k[i - 1] > 0 for i in (1, 2) for k in F.nonlinear(i)._terms)
