"""Two-stage normal form reduction of a planar saddle.

Stage 1 removes, degree by degree, every monomial whose multiplier exponent
lies in a cone where the linear part contracts geometrically (plus the terms
that break axis invariance).  The resulting map is inverted, which swaps the
roles of the coordinates, and stage 2 removes a second cone.  Inverting once
more gives the normal form ``g`` with ``f o h = h o g``.

The resonant case is driven by a :class:`ResonanceFrame`, the irrational case
by a :class:`ConvergentFrame`.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import PreconditionError, SmallDivisorError, StructureError
from .lattice import ConeTag, ConvergentFrame, ResonanceFrame, basis_decompose, cone_member
from .scalar import JetRing
from .series import MultiplierView, PlanarMap, Series2, map_compose, map_inverse, to_multiplier_view

log = logging.getLogger(__name__)

APPROX_DIVISOR_TOL = 1e-8
RATIO_TOL = 1e-9


# ---------------------------------------------------------------- preconditions


@dataclass(frozen=True)
class PreconditionReport:
    mode: str
    swapped: bool
    mod1_squared: object
    mod2_squared: object
    checks: dict = field(default_factory=dict)


def _log_modulus(ring, mu) -> float:
    return 0.5 * math.log(float(ring.mag2(mu)))


def check_preconditions(mu1, mu2, frame=None, R: float | None = None, ring=None) -> PreconditionReport:
    """Saddle and (modulus) resonance hypotheses, exact wherever the ring allows.

    Raises :class:`PreconditionError` naming the violated relation.
    """
    from .scalar import ring_of

    ring = ring or ring_of(mu1)
    a2, b2 = ring.mag2(mu1), ring.mag2(mu2)
    if a2 < 1 < b2:
        swapped = False
    elif b2 < 1 < a2:
        swapped = True
    else:
        raise PreconditionError(f"not a hyperbolic saddle: need |mu1| < 1 < |mu2| (or reversed), got |mu1|^2={a2}, |mu2|^2={b2}")
    checks = {"saddle": True}
    mode = "none"
    if isinstance(frame, ResonanceFrame):
        mode = "theorem1"
        p, q = frame.p, frame.q
        if ring.exact:
            value = a2**p * b2**q
            if value != 1:
                raise PreconditionError(f"modulus resonance fails: |mu1|^(2p) |mu2|^(2q) = {value} != 1")
        else:
            la, lb = _log_modulus(ring, mu1), _log_modulus(ring, mu2)
            if abs(p * la + q * lb) > RATIO_TOL * (p * abs(la) + q * abs(lb)):
                raise PreconditionError(f"modulus resonance fails: p*log|mu1| + q*log|mu2| = {p * la + q * lb}")
        checks["modulus_resonance"] = True
    elif isinstance(frame, ConvergentFrame):
        mode = "theorem2"
        ratio = -_log_modulus(ring, mu1) / _log_modulus(ring, mu2)
        if not frame.q / frame.p < ratio < frame.qt / frame.pt:
            raise PreconditionError(
                f"ratio -log|mu1|/log|mu2| = {ratio} is not bracketed by {frame.q}/{frame.p} and {frame.qt}/{frame.pt}"
            )
        if R is not None and abs(ratio - R) > RATIO_TOL * R:
            raise PreconditionError(f"declared ratio R={R} disagrees with eigenvalues ({ratio})")
        checks["ratio_bracketed"] = True
    return PreconditionReport(mode, swapped, a2, b2, checks)


# ---------------------------------------------------------------- elimination


@dataclass(frozen=True)
class EliminationPlan:
    """Which monomials a stage removes.

    Component ``i``, exponent ``k`` is targeted iff ``k_i = 0`` (when
    ``include_axis_terms``) or the multiplier exponent ``k - e_i`` is a
    nonzero member of ``tag``.
    """

    tag: ConeTag
    frame: object
    include_axis_terms: bool = False

    def targets(self, i: int, k) -> bool:
        if k[i - 1] == 0:
            return self.include_axis_terms
        m = (k[0] - 1, k[1]) if i == 1 else (k[0], k[1] - 1)
        if m == (0, 0):
            return False
        return cone_member(m, self.tag, self.frame)


@dataclass
class StageDiagnostics:
    name: str
    eliminated: int = 0
    min_divisor: float = math.inf
    residual: float = 0.0

    def as_dict(self):
        return {
            "stage": self.name,
            "eliminated": self.eliminated,
            "min_divisor": None if math.isinf(self.min_divisor) else self.min_divisor,
            "residual": self.residual,
        }


def _monomial_value(ring, mu1, mu2, k, cache):
    key = tuple(k)
    if key not in cache:
        cache[key] = ring.power(mu1, k[0]) * ring.power(mu2, k[1])
    return cache[key]


def _divisor(ring, F: PlanarMap, i, k, cache):
    mu_i = F.mu1 if i == 1 else F.mu2
    div = _monomial_value(ring, F.mu1, F.mu2, k, cache) - mu_i
    if ring.exact:
        bad = ring.is_zero(div) if not isinstance(ring, JetRing) else ring.base.is_zero(div.coeffs[0])
    else:
        scale = ring.magnitude(mu_i)
        bad = not ring.magnitude(div) >= APPROX_DIVISOR_TOL * scale
    if bad:
        raise SmallDivisorError(i, k, div)
    return div


def check_divisors(F: PlanarMap, plan: EliminationPlan, degree: int) -> float:
    """Verify every targeted divisor up to ``degree`` is a unit; return the smallest modulus."""
    ring = F.ring
    cache = {}
    smallest = math.inf
    for n in range(2, degree + 1):
        for k1 in range(n + 1):
            k = (k1, n - k1)
            for i in (1, 2):
                if plan.targets(i, k):
                    div = _divisor(ring, F, i, k, cache)
                    smallest = min(smallest, ring.magnitude(div))
    return smallest


def homological_degree_step(F: PlanarMap, n: int, plan: EliminationPlan, _cache=None):
    """Remove the targeted degree-``n`` terms of ``F``.

    Returns ``(F', h_n)`` with ``h_n = id + phi_n`` homogeneous of degree ``n``
    and ``F' = h_n^-1 o F o h_n``; degrees below ``n`` are unchanged.
    """
    ring = F.ring
    cache = {} if _cache is None else _cache
    phi = {1: {}, 2: {}}
    for i in (1, 2):
        for k, a in F.nonlinear(i).terms().items():
            if k[0] + k[1] != n or not plan.targets(i, k):
                continue
            div = _divisor(ring, F, i, k, cache)
            if ring.exact and ring.is_zero(a):
                continue
            phi[i][k] = a * ring.inv(div)
    if not phi[1] and not phi[2]:
        return F, PlanarMap.identity(ring, F.degree)
    h = PlanarMap(ring.one, ring.one, Series2._raw(ring, F.degree, phi[1]), Series2._raw(ring, F.degree, phi[2]))
    G = map_compose(map_inverse(h), map_compose(F, h))
    parts = {}
    for i in (1, 2):
        terms = G.nonlinear(i).terms()
        for k in phi[i]:
            v = terms.pop(k, None)
            if ring.exact and v is not None and not ring.is_zero(v):
                raise ArithmeticError(f"targeted term {k} in component {i} survived elimination: {v!r}")
        parts[i] = Series2._raw(ring, G.degree, terms)
    return PlanarMap(G.mu1, G.mu2, parts[1], parts[2]), h


class StageResult(NamedTuple):
    g: PlanarMap
    h: PlanarMap
    diagnostics: StageDiagnostics


def run_stage(F: PlanarMap, plan: EliminationPlan, D: int | None = None, name: str = "stage") -> StageResult:
    D = F.degree if D is None else D
    F = F.truncate(D)
    ring = F.ring
    diag = StageDiagnostics(name)
    diag.min_divisor = check_divisors(F, plan, D)
    cache = {}
    h_total = PlanarMap.identity(ring, D)
    original = F
    for n in range(2, D + 1):
        F, h_n = homological_degree_step(F, n, plan, cache)
        count = len(h_n.n1) + len(h_n.n2)
        if count:
            diag.eliminated += count
            h_total = map_compose(h_total, h_n)
        log.debug("%s: degree %d, %d terms removed", name, n, count)
    leftovers = [
        (i, k, "targeted term survived")
        for i in (1, 2)
        for k in F.nonlinear(i).terms()
        if plan.targets(i, k)
    ]
    if leftovers:
        raise StructureError(f"{name}: targeted terms survived", leftovers)
    diag.residual = conjugacy_residual(original, F, h_total)
    return StageResult(F, h_total, diag)


def eliminate_plan(F: PlanarMap, plan: EliminationPlan, D: int | None = None):
    """Loop :func:`homological_degree_step` over degrees ``2..D``; returns ``(F_clean, h)``."""
    result = run_stage(F, plan, D)
    return result.g, result.h


# ---------------------------------------------------------------- residuals


def conjugacy_difference(f: PlanarMap, g: PlanarMap, h: PlanarMap) -> PlanarMap:
    """``f o h - h o g`` truncated at the common degree."""
    return map_compose(f, h) - map_compose(h, g)


def conjugacy_residual(f: PlanarMap, g: PlanarMap, h: PlanarMap) -> float:
    """Largest coefficient size of ``f o h - h o g`` (0.0 exactly when it vanishes)."""
    diff = conjugacy_difference(f, g, h)
    ring = diff.ring
    values = [diff.mu1, diff.mu2] + [v for s in (diff.n1, diff.n2) for v in s.terms().values()]
    return max((ring.size(v) for v in values if not ring.is_zero(v)), default=0.0)


# ---------------------------------------------------------------- structure


def _view_exponents(view: MultiplierView, D: int):
    for i in (1, 2):
        for m, v in view.coefficients(i).items():
            if m[0] + m[1] <= D - 1:
                yield i, m, v


@dataclass
class StructuralFormT1:
    """Coefficients of ``x_i [mu_i + b0_i(u) + u sum_k u^(Nk) (x^(k alpha0) b0k_i + x^(k alpha1) b1k_i)]``.

    ``b0[i][j]`` is the coefficient of ``u**j`` (``j >= 1``); ``b0k[i][k][j]``
    multiplies ``x**(k*alpha0) * u**(N*k + 1 + j)`` and ``b1k`` likewise with
    ``alpha1``.
    """

    frame: ResonanceFrame
    b0: dict
    b0k: dict
    b1k: dict

    def reassemble(self) -> dict:
        f = self.frame
        out = {1: {}, 2: {}}
        for i in (1, 2):
            for j, c in self.b0[i].items():
                out[i][(j * f.p, j * f.q)] = c
            for table, alpha in ((self.b0k[i], f.alpha0), (self.b1k[i], f.alpha1)):
                for k, row in table.items():
                    for j, c in row.items():
                        e = f.N * k + 1 + j
                        out[i][(k * alpha[0] + e * f.p, k * alpha[1] + e * f.q)] = c
        return out

    def is_empty(self) -> bool:
        return not any(self.b0[i] or self.b0k[i] or self.b1k[i] for i in (1, 2))


def extract_structure_t1(g: PlanarMap, frame: ResonanceFrame, N: int | None = None) -> StructuralFormT1:
    N = frame.N if N is None else N
    view = to_multiplier_view(g)
    b0 = {1: {}, 2: {}}
    b0k = {1: {}, 2: {}}
    b1k = {1: {}, 2: {}}
    bad = []
    for i, m, v in _view_exponents(view, g.degree + 1):
        k1, k2 = basis_decompose(m, frame, 0)
        if k1 == 0:
            if k2 >= 1:
                b0[i][k2] = v
            else:
                bad.append((i, m, "multiple of (p,q) with nonpositive power"))
        elif k1 >= 1:
            if k2 >= N * k1 + 1:
                b0k[i].setdefault(k1, {})[k2 - N * k1 - 1] = v
            else:
                bad.append((i, m, f"alpha0 branch ({k1},{k2}) needs k2 >= {N * k1 + 1}"))
        else:
            c1, c2 = basis_decompose(m, frame, 1)
            if c1 >= 1 and c2 >= N * c1 + 1:
                b1k[i].setdefault(c1, {})[c2 - N * c1 - 1] = v
            else:
                bad.append((i, m, f"alpha1 branch ({c1},{c2}) needs k1 >= 1 and k2 >= {N * c1 + 1}"))
    if bad:
        raise StructureError("normal form does not have the resonant flat-remainder shape", bad)
    return StructuralFormT1(frame, b0, b0k, b1k)


@dataclass
class StructuralFormT2:
    """``x_i [mu_i + u b1_i(u, ut) + ut b2_i(u, ut)]``.

    ``b1[i][(a, b)]`` multiplies ``u * u**a * ut**b``; ``b2[i][(a, b)]``
    multiplies ``ut * u**a * ut**b``.  Mixed monomials go to ``b1``.
    """

    frame: ConvergentFrame
    b1: dict
    b2: dict

    def reassemble(self) -> dict:
        f = self.frame
        out = {1: {}, 2: {}}
        for i in (1, 2):
            for (a, b), c in self.b1[i].items():
                j, l = a + 1, b
                out[i][(j * f.p + l * f.pt, j * f.q + l * f.qt)] = c
            for (a, b), c in self.b2[i].items():
                j, l = a, b + 1
                out[i][(j * f.p + l * f.pt, j * f.q + l * f.qt)] = c
        return out

    def is_empty(self) -> bool:
        return not any(self.b1[i] or self.b2[i] for i in (1, 2))


def extract_structure_t2(g: PlanarMap, frame: ConvergentFrame) -> StructuralFormT2:
    view = to_multiplier_view(g)
    b1 = {1: {}, 2: {}}
    b2 = {1: {}, 2: {}}
    bad = []
    for i, m, v in _view_exponents(view, g.degree + 1):
        j, l = frame.coordinates(m)
        if j < 0 or l < 0 or j + l < 1:
            bad.append((i, m, f"coordinates (j,l)=({j},{l}) leave the cone of u and ut"))
        elif j >= 1:
            b1[i][(j - 1, l)] = v
        else:
            b2[i][(0, l - 1)] = v
    if bad:
        raise StructureError("normal form does not have the near-resonant shape", bad)
    return StructuralFormT2(frame, b1, b2)


# ---------------------------------------------------------------- decay constants


class DecayConstants(NamedTuple):
    d0: float
    d1: float
    # D0 with N in place of N+1 in the exponent, reported for comparison
    d0_literal: float | None = None


def decay_constants(frame, mu1, mu2, R: float | None = None, ring=None) -> DecayConstants:
    """Geometric decay rates of ``|mu^m|`` on the stage-1 and stage-2 cones.

    Expects the normalized orientation ``|mu1| < 1 < |mu2|``.
    """
    from .scalar import ring_of

    ring = ring or ring_of(mu1)
    a, b = ring.magnitude(mu1), ring.magnitude(mu2)
    if not a < 1 < b:
        raise PreconditionError("decay constants need |mu1| < 1 < |mu2|")
    if isinstance(frame, ResonanceFrame):
        p, q, N = frame.p, frame.q, frame.N
        d0 = a ** (1.0 / (q * (frame.r0 + frame.s0 + (N + 1) * (p + q))))
        d1 = b ** (-1.0 / (p * (frame.r1 + frame.s1 + (N + 1) * (p + q))))
        d0_lit = a ** (1.0 / (q * (frame.r0 + frame.s0 + N * (p + q))))
        return DecayConstants(d0, d1, d0_lit)
    if R is None:
        R = -math.log(a) / math.log(b)
    p, q, pt, qt = frame.p, frame.q, frame.pt, frame.qt
    d0 = a ** ((R * p - q) / (R * (p + q)))
    d1 = (1.0 / b) ** ((qt - R * pt) / (pt + qt))
    return DecayConstants(d0, d1, None)


# ---------------------------------------------------------------- pipelines


@dataclass
class NormalFormOutcome:
    f: PlanarMap
    g: PlanarMap
    h: PlanarMap
    h_inv: PlanarMap
    frame: object
    structure: object
    diagnostics: dict

    @property
    def mode(self):
        return "theorem1" if isinstance(self.frame, ResonanceFrame) else "theorem2"


def _multiplier_exponents(F: PlanarMap):
    view = to_multiplier_view(F)
    return [(i, m) for i, m, _ in _view_exponents(view, F.degree)]


def _require_cone(F: PlanarMap, tag: ConeTag, frame, what: str, negate=False):
    bad = []
    for i, m in _multiplier_exponents(F):
        inside = cone_member(m, tag, frame)
        if inside == negate:
            bad.append((i, m, f"{'in' if negate else 'outside'} {tag.value}"))
    if bad:
        raise StructureError(f"{what}: exponents violate {tag.value}", bad)


def _run_two_stages(f, frame, D, stage1, stage2, after1, final, R, report):
    """Shared driver; cone checks run in the normalized orientation."""
    work, wframe = (f.swapped(), frame.swapped()) if report.swapped else (f, frame)
    work = work.truncate(D)
    s1 = run_stage(work, EliminationPlan(stage1, wframe, True), D, "stage1")
    g1_inv = map_inverse(s1.g)
    after1(g1_inv, wframe)
    s2 = run_stage(g1_inv, EliminationPlan(stage2, wframe, False), D, "stage2")
    g = map_inverse(s2.g)
    h = map_compose(s1.h, s2.h)
    h_inv = map_inverse(h)
    _require_cone(g, final, wframe, "normal form")
    decay_R = None if R is None else (1.0 / R if report.swapped else R)
    decay = decay_constants(wframe, work.mu1, work.mu2, decay_R)
    if report.swapped:
        g, h, h_inv = g.swapped(), h.swapped(), h_inv.swapped()
    f = f.truncate(D)
    diagnostics = {
        "orientation_swapped": report.swapped,
        "stages": [s1.diagnostics.as_dict(), s2.diagnostics.as_dict()],
        "decay": decay._asdict(),
        "residual": conjugacy_residual(f, g, h),
        "scale": map_compose(f, h).max_abs(),
    }
    return f, g, h, h_inv, diagnostics


def pipeline_theorem1(f: PlanarMap, frame: ResonanceFrame, D: int | None = None) -> NormalFormOutcome:
    """Normal form under a ``q:-p`` modulus resonance."""
    D = f.degree if D is None else D
    report = check_preconditions(f.mu1, f.mu2, frame, ring=f.ring)

    def after1(g1_inv, wframe):
        _require_cone(g1_inv, ConeTag.TildeB, wframe, "inverse after stage 1")

    f, g, h, h_inv, diag = _run_two_stages(
        f, frame, D, ConeTag.G0, ConeTag.G1, after1, ConeTag.HatB, None, report
    )
    structure = extract_structure_t1(g, frame)
    return NormalFormOutcome(f, g, h, h_inv, frame, structure, diag)


def pipeline_theorem2(
    f: PlanarMap, frame: ConvergentFrame, D: int | None = None, R: float | None = None
) -> NormalFormOutcome:
    """Normal form when the modulus ratio is irrational, via two convergents."""
    D = f.degree if D is None else D
    report = check_preconditions(f.mu1, f.mu2, frame, R, ring=f.ring)

    def after1(g1_inv, wframe):
        _require_cone(g1_inv, ConeTag.IrrStage1, wframe, "inverse after stage 1", negate=True)

    f, g, h, h_inv, diag = _run_two_stages(
        f, frame, D, ConeTag.IrrStage1, ConeTag.IrrStage2, after1, ConeTag.IrrFinal, R, report
    )
    scale = diag["scale"] or 1.0
    diag["relative_residual"] = diag["residual"] / scale
    structure = extract_structure_t2(g, frame)
    return NormalFormOutcome(f, g, h, h_inv, frame, structure, diag)


def evaluate_jets(F: PlanarMap, t=0) -> PlanarMap:
    """Specialize a jet-ring map at ``lambda - lambda0 = t``."""
    ring = F.ring
    if not isinstance(ring, JetRing):
        raise TypeError("map is not over a jet ring")
    return F.map_coefficients(lambda c: c.evaluate(t), ring.base)
