import dataclasses

import pytest

from saddlenf.lattice import ConeTag, resonance_frame
from saddlenf.normalform import NormalFormOutcome, extract_structure_t1, pipeline_theorem1
from saddlenf.scalar import RATIONAL, rational
from saddlenf.series import PlanarMap, Series2
from saddlenf.verify import (
    GeneratorSpec,
    audit_outcome,
    brute_cone_member,
    conjugacy_oracle,
    decay_violations,
    random_resonant_saddle,
    verify_suite,
)

Q = rational


def test_brute_force_witnesses(frame321):
    assert brute_cone_member((2, 1), ConeTag.G0, frame321)
    assert not brute_cone_member((3, 2), ConeTag.G0, frame321)


@pytest.mark.parametrize("c,pq,mus", [(2, (3, 2), ("1/4", "8")), (3, (2, 1), ("1/3", "9"))])
def test_generator_eigenvalues(c, pq, mus):
    frame = resonance_frame(pq[0], pq[1], 0)
    f = random_resonant_saddle(GeneratorSpec(seed=0, ring=RATIONAL, frame=frame, degree=4, eigen=c))
    assert (f.mu1, f.mu2) == (Q(mus[0]), Q(mus[1]))


def test_generator_is_deterministic(frame321):
    spec = GeneratorSpec(seed=42, ring=RATIONAL, frame=frame321, degree=9)
    assert random_resonant_saddle(spec) == random_resonant_saddle(spec)
    short = random_resonant_saddle(dataclasses.replace(spec, degree=6))
    assert random_resonant_saddle(spec).truncate(6) == short


def _outcome(frame321, seed=1, degree=10):
    f = random_resonant_saddle(GeneratorSpec(seed=seed, ring=RATIONAL, frame=frame321, degree=degree))
    return f, pipeline_theorem1(f, frame321)


def test_oracle_on_identity_outcome(frame321):
    f = PlanarMap.linear(RATIONAL, 6, Q("1/4"), Q(8))
    ident = PlanarMap.identity(RATIONAL, 6)
    out = NormalFormOutcome(f, f, ident, ident, frame321, extract_structure_t1(f, frame321), {})
    assert conjugacy_oracle(f, out).deviation == 0


def test_oracle_accepts_pipeline_and_flags_perturbation(frame321):
    f, out = _outcome(frame321)
    rep = conjugacy_oracle(f, out)
    assert rep.passed and rep.deviation <= rep.bound
    h = out.h
    bumped = PlanarMap(h.mu1, h.mu2, h.n1 + Series2.monomial(RATIONAL, h.degree, (1, 1)), h.n2)
    bad = conjugacy_oracle(f, dataclasses.replace(out, h=bumped))
    assert not bad.passed and bad.deviation > bad.bound


def test_decay_corrected_vs_literal(frame321):
    assert decay_violations(frame321, Q("1/4"), Q(8)) == []
    literal = decay_violations(frame321, Q("1/4"), Q(8), literal=True)
    assert ("G0", (8, 5)) in [(t, tuple(m)) for t, m in literal]


def test_decay_irrational(golden1):
    import math

    phi = (1 + math.sqrt(5)) / 2
    assert decay_violations(golden1, complex(math.exp(-1)), complex(math.exp(1 / phi)), R=phi) == []


def test_audit_passes_and_catches_injection(frame321):
    _, out = _outcome(frame321, degree=12)
    assert audit_outcome(out).passed
    g = out.g
    # multiplier (5,4) is in G1, outside the final cone
    g_bad = PlanarMap(g.mu1, g.mu2, g.n1 + Series2.monomial(RATIONAL, g.degree, (6, 4), Q(1)), g.n2)
    rep = audit_outcome(dataclasses.replace(out, g=g_bad))
    assert not rep.passed
    assert not rep.checks["survivors_in_final_cone"]
    assert {"component": 1, "exponent": [5, 4], "cone": "HatB"} in [f["witness"] for f in rep.findings]


def test_default_suite_passes():
    results = verify_suite()
    assert results and all(results.values()), [k for k, v in results.items() if not v]
