"""Independent oracles, generators and outcome audits.

Nothing here reuses the closed-form cone predicates or the series kernel it is
meant to check: cone membership is decided by searching integer witnesses,
and composition/inversion are recomputed by plain symbolic substitution.
"""
from __future__ import annotations

import functools
import math
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import StructureError
from .lattice import (
    IRRATIONAL_TAGS,
    RESONANT_TAGS,
    ConeTag,
    ConvergentFrame,
    ResonanceFrame,
    basis_decompose,
    cone_member,
    enumerate_cone,
    resonance_frame,
)
from .normalform import (
    NormalFormOutcome,
    conjugacy_residual,
    decay_constants,
    extract_structure_t1,
    extract_structure_t2,
    pipeline_theorem1,
)
from .scalar import COMPLEX, GAUSSIAN, RATIONAL, GaussianRational, JetRing, ParamJet, Ring, rational
from .series import PlanarMap, map_compose, map_eval, to_multiplier_view

EPS = sys.float_info.epsilon

# ---------------------------------------------------------------- cone oracle


def _slope_at_least(m, num, den) -> bool:
    """``m2/m1 >= num/den`` with a vertical exponent counted as infinite slope."""
    m1, m2 = m
    if m1 == 0:
        return True
    return Fraction(m2, m1) >= Fraction(num, den)


def _slope_at_most(m, num, den) -> bool:
    m1, m2 = m
    if m1 == 0:
        return m2 == 0
    return Fraction(m2, m1) <= Fraction(num, den)


@functools.lru_cache(maxsize=64)
def _witness_set(tag: ConeTag, frame, bound: int) -> frozenset:
    """All ``m`` in N^2 reachable by a parameter pair in ``[-B, B]^2`` satisfying the cone's definition."""
    ks = np.arange(-bound, bound + 1, dtype=np.int64)
    K1, K2 = np.meshgrid(ks, ks, indexing="ij")
    if tag is ConeTag.IrrFinal:
        p, q, pt, qt = frame.p, frame.q, frame.pt, frame.qt
        ok = (K1 >= 0) & (K2 >= 0) & (K1 + K2 >= 1)
        M1, M2 = K1 * p + K2 * pt, K1 * q + K2 * qt
    else:
        f = frame
        N = f.N
        a = f.alpha1 if tag is ConeTag.G1 else f.alpha0
        M1, M2 = K1 * a[0] + K2 * f.p, K1 * a[1] + K2 * f.q
        if tag in (ConeTag.G0, ConeTag.G1):
            ok = (K1 >= 1) & (K2 <= (N + 1) * K1)
        elif tag is ConeTag.B1:
            ok = (K1 >= 1) & (K2 >= (N + 1) * K1 + 1)
        elif tag is ConeTag.B2:
            ok = K1 <= 0
        else:
            raise ValueError(tag)
    ok &= (M1 >= 0) & (M2 >= 0)
    return frozenset(zip(M1[ok].tolist(), M2[ok].tolist()))


def brute_cone_member(m, tag: ConeTag, frame, bound: int = 200) -> bool:
    """Cone membership decided from the set definitions by exhaustive witness search."""
    m = (int(m[0]), int(m[1]))
    if tag in (ConeTag.G0, ConeTag.G1, ConeTag.B1, ConeTag.B2, ConeTag.IrrFinal):
        return m in _witness_set(tag, frame, bound)
    if tag is ConeTag.B0:
        return m not in _witness_set(ConeTag.G0, frame, bound)
    if tag in (ConeTag.TildeB, ConeTag.HatB):
        f = frame
        lo = _slope_at_least(m, f.s0 + (f.N + 1) * f.q, f.r0 + (f.N + 1) * f.p)
        if tag is ConeTag.TildeB:
            return lo
        return lo and _slope_at_most(m, f.s1 + (f.N + 1) * f.q, f.r1 + (f.N + 1) * f.p)
    if m == (0, 0):
        return False
    if tag is ConeTag.IrrStage1:
        return m[0] > 0 and Fraction(m[1], m[0]) < Fraction(frame.q, frame.p)
    if tag is ConeTag.IrrStage2:
        return m[0] == 0 or Fraction(m[1], m[0]) > Fraction(frame.qt, frame.pt)
    raise ValueError(tag)


# ---------------------------------------------------------------- generators


@dataclass(frozen=True)
class GeneratorSpec:
    """Deterministic recipe for a random saddle family.

    ``eigen`` is the rational ``c > 1`` of the resonant construction
    ``mu1 = c**-q, mu2 = c**p`` or the float ``t > 0`` of
    ``mu1 = exp(-t), mu2 = exp(t/R)``.
    """

    seed: int
    ring: Ring
    frame: object
    degree: int
    density: float = 1.0
    numerators: tuple = (-2, 2)
    denominators: tuple = (1, 3)
    eigen: object = 2
    R: float | None = None
    rotation: tuple | None = None


def _random_base_value(rng: random.Random, ring: Ring, spec: GeneratorSpec):
    lo, hi = spec.numerators
    dlo, dhi = spec.denominators
    if ring is RATIONAL:
        return rational(Fraction(rng.randint(lo, hi), rng.randint(dlo, dhi)))
    if ring is GAUSSIAN:
        return GaussianRational(
            Fraction(rng.randint(lo, hi), rng.randint(dlo, dhi)), Fraction(rng.randint(lo, hi), rng.randint(dlo, dhi))
        )
    return complex(rng.randint(lo, hi) / rng.randint(dlo, dhi), rng.randint(lo, hi) / rng.randint(dlo, dhi))


def _random_value(rng, jet_rng, spec):
    ring = spec.ring
    if isinstance(ring, JetRing):
        # constant terms follow the base-ring stream so a jet family specializes
        # to the base family generated from the same seed
        c0 = _random_base_value(rng, ring.base, spec)
        rest = [_random_base_value(jet_rng, ring.base, spec) for _ in range(ring.order)]
        return ParamJet([c0, *rest], ring.base)
    return _random_base_value(rng, ring, spec)


def _eigenvalues(spec: GeneratorSpec):
    ring = spec.ring
    base = ring.base if isinstance(ring, JetRing) else ring
    frame = spec.frame
    if isinstance(frame, ResonanceFrame):
        if base is COMPLEX:
            c = float(spec.eigen)
            mu1, mu2 = complex(c ** (-frame.q)), complex(c ** frame.p)
        else:
            c = rational(Fraction(spec.eigen) if not isinstance(spec.eigen, str) else spec.eigen)
            if not c > 1:
                raise ValueError("the resonant generator needs c > 1")
            mu1, mu2 = base.coerce(1 / c**frame.q), base.coerce(c**frame.p)
    else:
        if base is not COMPLEX:
            raise ValueError("irrational-ratio families are generated in the complex ring")
        R = spec.R if spec.R is not None else (frame.q / frame.p + frame.qt / frame.pt) / 2
        t = float(spec.eigen)
        mu1, mu2 = complex(math.exp(-t)), complex(math.exp(t / R))
    if spec.rotation is not None:
        w1, w2 = (base.coerce(w) for w in spec.rotation)
        for w in (w1, w2):
            if base.mag2(w) != 1 and not (base is COMPLEX and abs(base.mag2(w) - 1) < 1e-15):
                raise ValueError("rotation factors must have modulus one")
        mu1, mu2 = mu1 * w1, mu2 * w2
    if isinstance(ring, JetRing):
        # mu1 moves with the parameter: mu1(lambda) = mu1 + (lambda - lambda0)
        drift = (base.one,) if ring.order else ()
        mu1 = ParamJet((mu1, *drift) + (base.zero,) * (ring.order - len(drift)), base)
        mu2 = ring.coerce(mu2)
    return mu1, mu2


def random_resonant_saddle(spec: GeneratorSpec) -> PlanarMap:
    """A dense random map whose linear part satisfies the frame's hypotheses."""
    rng = random.Random(spec.seed)
    jet_rng = random.Random(spec.seed ^ 0x5EED)
    mu1, mu2 = _eigenvalues(spec)
    terms = []
    for n in range(2, spec.degree + 1):
        for k1 in range(n, -1, -1):
            for i in (1, 2):
                if rng.random() < spec.density:
                    terms.append((i, (k1, n - k1), _random_value(rng, jet_rng, spec)))
    return PlanarMap.from_terms(spec.ring, spec.degree, mu1, mu2, terms)


# ---------------------------------------------------------------- numeric conjugacy check


@dataclass
class OracleReport:
    deviation: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.bound


def _to_complex_map(F: PlanarMap) -> PlanarMap:
    return F.map_coefficients(F.ring.to_complex, COMPLEX)


def _abs_sum(F: PlanarMap, r: float) -> float:
    total = abs(F.mu1) * r + abs(F.mu2) * r
    for s in (F.n1, F.n2):
        for k, v in s.terms().items():
            total += abs(v) * r ** (k[0] + k[1])
    return total


def conjugacy_oracle(f: PlanarMap, outcome: NormalFormOutcome, samples: int = 16, radius: float = 1e-3, seed: int = 0):
    """Max over sample points of ``|f(h(z)) - h(g(z))|`` evaluated in doubles.

    The bound is the truncation tail ``C * r**(D+1)`` plus a rounding allowance
    proportional to the evaluated magnitudes.
    """
    fc, gc, hc = (_to_complex_map(M) for M in (f, outcome.g, outcome.h))
    D = min(fc.degree, gc.degree, hc.degree)
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        z = tuple(radius * complex(math.cos(a), math.sin(a)) for a in (rng.uniform(0, 2 * math.pi) for _ in range(2)))
        lhs = map_eval(fc, map_eval(hc, z))
        rhs = map_eval(hc, map_eval(gc, z))
        worst = max(worst, max(abs(a - b) for a, b in zip(lhs, rhs)))
    C = sum(_abs_sum(M, 1.0) for M in (fc, gc, hc))
    # rounding: every evaluated term is at most C*r and there are O(D^2) of them
    rounding = 64 * EPS * (D + 1) ** 2 * sum(_abs_sum(M, 2 * radius) for M in (fc, gc, hc))
    return OracleReport(worst, C * radius ** (D + 1) + rounding)


# ---------------------------------------------------------------- substitution oracle


def _sympy_value(sp, c):
    if isinstance(c, GaussianRational):
        return sp.Rational(int(c.re.numerator), int(c.re.denominator)) + sp.I * sp.Rational(
            int(c.im.numerator), int(c.im.denominator)
        )
    return sp.Rational(int(c.numerator), int(c.denominator))


def _sympy_maps(F: PlanarMap):
    """Both components as sparse sympy polynomials over QQ or QQ<I>."""
    import sympy as sp
    from sympy.polys.rings import ring

    domain = sp.QQ_I if F.ring is GAUSSIAN else sp.QQ
    R, x1, x2 = ring("x1,x2", domain)
    comps = []
    for i in (1, 2):
        poly = R.from_dict({(1, 0) if i == 1 else (0, 1): domain.from_sympy(_sympy_value(sp, F.mu1 if i == 1 else F.mu2))})
        for k, v in F.nonlinear(i).terms().items():
            poly += R.from_dict({k: domain.from_sympy(_sympy_value(sp, v))})
        comps.append(poly)
    return sp, (x1, x2), comps


def _truncate_poly(poly, D):
    return poly.ring.from_dict({m: c for m, c in poly.items() if sum(m) <= D})


def _substitute(poly, G, D):
    """``poly(G1, G2)`` truncated at degree ``D``; every product is cut back to ``D``."""
    R = poly.ring
    powers = [[R.one], [R.one]]
    out = R.zero
    for (a, b), c in poly.items():
        for j, e in ((0, a), (1, b)):
            while len(powers[j]) <= e:
                powers[j].append(_truncate_poly(powers[j][-1] * G[j], D))
        out += _truncate_poly(powers[0][a] * powers[1][b], D) * c
    return out


def _coefficient_table(comps):
    return {
        (i, tuple(m)): poly.ring.domain.to_sympy(c)
        for i, poly in enumerate(comps, start=1)
        for m, c in poly.items()
        if c
    }


def naive_compose(F: PlanarMap, G: PlanarMap) -> dict:
    """Coefficients of ``F o G`` by substitution in sympy polynomial arithmetic (exact rings)."""
    _, _, fc = _sympy_maps(F)
    _, _, gc = _sympy_maps(G)
    D = min(F.degree, G.degree)
    return _coefficient_table([_substitute(c, gc, D) for c in fc])


def naive_inverse(F: PlanarMap) -> dict:
    """Coefficients of ``F^-1`` by repeated substitution ``G <- L^-1 (y - N(G))``."""
    _, xs, fc = _sympy_maps(F)
    D = F.degree
    inv = [1 / fc[0].coeff(xs[0]), 1 / fc[1].coeff(xs[1])]
    nonlin = [fc[j] - fc[j].coeff(xs[j]) * xs[j] for j in range(2)]
    G = [xs[j] * inv[j] for j in range(2)]
    for _ in range(D):
        G = [(xs[j] - _substitute(nonlin[j], G, D)) * inv[j] for j in range(2)]
    return _coefficient_table(G)


def kernel_table(F: PlanarMap) -> dict:
    """Coefficient table of a map in the oracle's format."""
    import sympy as sp

    out = {}
    for i in (1, 2):
        for k, v in F.component(i).terms().items():
            val = _sympy_value(sp, v)
            if val != 0:
                out[(i, k)] = val
    return out


# ---------------------------------------------------------------- decay estimates


def decay_violations(frame, mu1, mu2, maxdeg: int = 30, literal: bool = False, R: float | None = None):
    """Members of the stage cones breaking ``|mu^m| <= D0^|m|`` (stage 1) or ``|mu^-m| <= D1^|m|`` (stage 2).

    Evaluated in doubles with slack ``1 + 1e-12``.  ``literal`` uses D0 with
    ``N`` rather than ``N + 1`` in its exponent.
    """
    from .scalar import ring_of

    ring = ring_of(mu1)
    consts = decay_constants(frame, mu1, mu2, R, ring=ring)
    d0 = consts.d0_literal if literal else consts.d0
    la, lb = math.log(ring.magnitude(mu1)), math.log(ring.magnitude(mu2))
    slack = math.log1p(1e-12)
    if isinstance(frame, ResonanceFrame):
        tags = (ConeTag.G0, ConeTag.G1)
    else:
        tags = (ConeTag.IrrStage1, ConeTag.IrrStage2)
    bad = []
    for m in enumerate_cone(tags[0], frame, maxdeg):
        if m[0] * la + m[1] * lb > (m[0] + m[1]) * math.log(d0) + slack:
            bad.append((tags[0].value, m))
    for m in enumerate_cone(tags[1], frame, maxdeg):
        if -(m[0] * la + m[1] * lb) > (m[0] + m[1]) * math.log(consts.d1) + slack:
            bad.append((tags[1].value, m))
    return bad


# ---------------------------------------------------------------- outcome audit


@dataclass
class AuditReport:
    checks: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values()) and not self.findings

    def record(self, name, ok, witnesses=()):
        self.checks[name] = bool(ok)
        for w in witnesses:
            self.findings.append({"check": name, "witness": w})


def audit_outcome(outcome: NormalFormOutcome, tolerance: float = 1e-9) -> AuditReport:
    """Re-check an outcome from scratch; nothing is taken from its diagnostics."""
    rep = AuditReport()
    f, g, h = outcome.f, outcome.g, outcome.h
    ring = f.ring
    residual = conjugacy_residual(f, g, h)
    if ring.exact:
        rep.record("conjugacy_residual_zero", residual == 0.0)
    else:
        scale = map_compose(f, h).max_abs() or 1.0
        rep.record("conjugacy_residual_relative", residual / scale <= tolerance)
    rep.record(
        "h_tangent_to_identity",
        ring.is_zero(h.mu1 - ring.one) and ring.is_zero(h.mu2 - ring.one),
    )
    axis_bad = [
        {"component": i, "exponent": list(k)}
        for i in (1, 2)
        for k in g.nonlinear(i).terms()
        if k[i - 1] == 0
    ]
    rep.record("axes_invariant", not axis_bad, axis_bad)
    if axis_bad:
        return rep
    view = to_multiplier_view(g)
    frame = outcome.frame
    final = ConeTag.HatB if isinstance(frame, ResonanceFrame) else ConeTag.IrrFinal
    cone_bad = [
        {"component": i, "exponent": list(m), "cone": final.value}
        for i, m in view.exponents()
        if m[0] + m[1] <= g.degree - 1 and not cone_member(m, final, frame)
    ]
    rep.record("survivors_in_final_cone", not cone_bad, cone_bad)
    try:
        if isinstance(frame, ResonanceFrame):
            structure = extract_structure_t1(g, frame)
        else:
            structure = extract_structure_t2(g, frame)
    except StructureError as exc:
        rep.record(
            "structure_extraction",
            False,
            [{"component": i, "exponent": list(m), "detail": d} for i, m, d in exc.witnesses],
        )
        return rep
    rep.record("structure_extraction", True)
    again = structure.reassemble()
    same = all(
        set(again[i]) == set(view.coefficients(i))
        and all(ring.is_zero(again[i][m] - view.coefficients(i)[m]) for m in again[i])
        for i in (1, 2)
    )
    rep.record("structure_reassembly", same)
    return rep


# ---------------------------------------------------------------- property suite

DEFAULT_MATRIX = ({"p": 3, "q": 2, "N": 1}, {"p": 2, "q": 1, "N": 0}, {"p": 5, "q": 3, "N": 2}, {"p": 1, "q": 1, "N": 0})


def lattice_properties(frame: ResonanceFrame, maxdeg: int = 50, oracle_deg: int = 30) -> dict:
    """Set-algebra sweep for one resonance frame; returns check name -> passed."""
    out = {}
    box = [(a, n - a) for n in range(maxdeg + 1) for a in range(n + 1)]
    mem = {tag: {m: cone_member(m, tag, frame) for m in box} for tag in RESONANT_TAGS}
    out["G0_B0_partition"] = all(mem[ConeTag.G0][m] != mem[ConeTag.B0][m] for m in box)
    out["B0_is_B1_xor_B2"] = all(
        mem[ConeTag.B0][m] == (mem[ConeTag.B1][m] != mem[ConeTag.B2][m])
        and not (mem[ConeTag.B1][m] and mem[ConeTag.B2][m])
        for m in box
    )
    out["B0_in_TildeB"] = all(mem[ConeTag.TildeB][m] for m in box if mem[ConeTag.B0][m])
    out["HatB_in_TildeB"] = all(mem[ConeTag.TildeB][m] for m in box if mem[ConeTag.HatB][m])
    out["unimodular_reconstruction"] = all(
        _reconstructs(m, frame, branch) for m in box for branch in (0, 1)
    )
    out["oracle_agreement"] = all(
        mem[tag][m] == brute_cone_member(m, tag, frame)
        for tag in RESONANT_TAGS
        for m in box
        if m[0] + m[1] <= oracle_deg
    )
    return out


def _reconstructs(m, frame, branch):
    k1, k2 = basis_decompose(m, frame, branch)
    a = frame.alpha0 if branch == 0 else frame.alpha1
    return (k1 * a[0] + k2 * frame.p, k1 * a[1] + k2 * frame.q) == tuple(m)


def irrational_properties(frame: ConvergentFrame, maxdeg: int = 50, oracle_deg: int = 30) -> dict:
    box = [(a, n - a) for n in range(maxdeg + 1) for a in range(n + 1)]
    out = {}
    out["IrrFinal_characterization"] = all(
        cone_member(m, ConeTag.IrrFinal, frame)
        == (not cone_member(m, ConeTag.IrrStage1, frame) and not cone_member(m, ConeTag.IrrStage2, frame) and m != (0, 0))
        for m in box
    )
    out["oracle_agreement"] = all(
        cone_member(m, tag, frame) == brute_cone_member(m, tag, frame)
        for tag in IRRATIONAL_TAGS
        for m in box
        if m[0] + m[1] <= oracle_deg
    )
    return out


def verify_suite(matrix=DEFAULT_MATRIX, degree: int = 8, seed: int = 0) -> dict:
    """Lattice sweeps, decay estimates and a small pipeline audit per frame."""
    results = {}
    for entry in matrix:
        frame = resonance_frame(int(entry["p"]), int(entry["q"]), int(entry.get("N", 0)))
        tag = f"({frame.p},{frame.q},{frame.N})"
        for name, ok in lattice_properties(frame).items():
            results[f"{tag} {name}"] = ok
        spec = GeneratorSpec(seed=seed, ring=RATIONAL, frame=frame, degree=degree)
        f = random_resonant_saddle(spec)
        results[f"{tag} decay_estimates"] = not decay_violations(frame, f.mu1, f.mu2)
        try:
            outcome = pipeline_theorem1(f, frame)
        except StructureError:
            results[f"{tag} pipeline"] = False
            continue
        results[f"{tag} pipeline"] = audit_outcome(outcome).passed
    return results
