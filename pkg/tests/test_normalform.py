import math

import pytest
from hypothesis import given, settings, strategies as st

from saddlenf.errors import PreconditionError, SmallDivisorError, StructureError
from saddlenf.lattice import ConeTag, cone_member, resonance_frame
from saddlenf.normalform import (
    EliminationPlan,
    check_preconditions,
    conjugacy_residual,
    decay_constants,
    extract_structure_t1,
    extract_structure_t2,
    homological_degree_step,
    pipeline_theorem1,
    pipeline_theorem2,
    run_stage,
)
from saddlenf.scalar import COMPLEX, GAUSSIAN, RATIONAL, GaussianRational, rational
from saddlenf.series import PlanarMap, map_compose, to_multiplier_view
from saddlenf.verify import GeneratorSpec, audit_outcome, random_resonant_saddle

Q = rational
MU1, MU2 = Q("1/4"), Q(8)
PHI = (1 + math.sqrt(5)) / 2


def t1_map(D, terms):
    return PlanarMap.from_terms(RATIONAL, D, MU1, MU2, terms)


def test_preconditions():
    rep = check_preconditions(MU1, MU2, resonance_frame(3, 2, 1))
    assert rep.checks == {"saddle": True, "modulus_resonance": True} and not rep.swapped
    with pytest.raises(PreconditionError, match="resonance"):
        check_preconditions(Q("1/2"), Q(2), resonance_frame(3, 2, 0))
    with pytest.raises(PreconditionError, match="saddle"):
        check_preconditions(Q(2), Q(8))
    assert check_preconditions(Q(8), Q("1/4"), resonance_frame(2, 3, 0)).swapped


def test_homological_step_axis_term():
    F = t1_map(4, [(1, (0, 2), Q(1))])
    plan = EliminationPlan(ConeTag.G0, resonance_frame(3, 2, 1), include_axis_terms=True)
    F2, h = homological_degree_step(F, 2, plan)
    assert F2.nonlinear(1).terms().get((0, 2)) is None
    assert h.term_records() == [(1, (0, 2), Q("4/255"))]


def test_homological_step_divisor_at_alpha0():
    # multiplier exponent (2,1): divisor mu^(3,1) - mu1 = 1/8 - 1/4
    F = t1_map(4, [(1, (3, 1), Q(1))])
    plan = EliminationPlan(ConeTag.G0, resonance_frame(3, 2, 1))
    F2, h = homological_degree_step(F, 4, plan)
    assert h.term_records() == [(1, (3, 1), Q(-8))]
    assert not F2.nonlinear(1).terms()


def test_homological_step_without_targets_is_identity():
    F = t1_map(6, [(1, (4, 2), Q(3))])  # multiplier (3,2) is resonant
    plan = EliminationPlan(ConeTag.G0, resonance_frame(3, 2, 1), True)
    F2, h = homological_degree_step(F, 6, plan)
    assert F2 == F and h == PlanarMap.identity(RATIONAL, 6)


@pytest.mark.parametrize("ring", [RATIONAL, COMPLEX])
def test_resonant_divisor_is_refused(ring):
    F = PlanarMap.from_terms(ring, 6, ring.coerce(MU1), ring.coerce(MU2), [(1, (4, 2), ring.coerce(Q(1)))])
    with pytest.raises(SmallDivisorError) as exc:
        run_stage(F, EliminationPlan(ConeTag.B2, resonance_frame(3, 2, 1)), 6)
    i, k = exc.value.component, exc.value.exponent
    m = (k[0] - 1, k[1]) if i == 1 else (k[0], k[1] - 1)
    assert m[0] * 2 == m[1] * 3  # a (p,q) multiple: mu^m = 1


def test_stage_one_output_lies_in_b0(frame321):
    f = random_resonant_saddle(GeneratorSpec(seed=3, ring=RATIONAL, frame=frame321, degree=10))
    res = run_stage(f, EliminationPlan(ConeTag.G0, frame321, True), 10, "stage1")
    view = to_multiplier_view(res.g)
    ms = [m for i, m in view.exponents() if sum(m) <= 9]
    assert ms and all(cone_member(m, ConeTag.B0, frame321) for m in ms)
    assert conjugacy_residual(f, res.g, res.h) == 0


def test_linear_map_is_its_own_normal_form(frame321):
    f = PlanarMap.linear(RATIONAL, 8, MU1, MU2)
    out = pipeline_theorem1(f, frame321)
    assert out.g == f and out.h == PlanarMap.identity(RATIONAL, 8)
    assert out.structure.is_empty() and out.diagnostics["residual"] == 0


def test_resonant_monomial_survives_with_unit_coefficient(frame321):
    f = t1_map(11, [(1, (4, 2), Q(1))])
    out = pipeline_theorem1(f, frame321)
    assert out.structure.b0[1] == {1: 1}
    assert out.diagnostics["residual"] == 0


def test_structure_t1_examples(frame321):
    g = t1_map(20, [(1, (4, 2), Q(2)), (2, (11, 8), Q(5))])
    s = extract_structure_t1(g, frame321)
    assert s.b0[1] == {1: 2}
    assert s.b0k[2] == {1: {1: 5}}
    assert s.reassemble() == {1: {(3, 2): 2}, 2: {(11, 7): 5}}
    # (5,4) lies in G1 so its survival would be a pipeline bug
    assert cone_member((5, 4), ConeTag.G1, frame321)
    with pytest.raises(StructureError) as exc:
        extract_structure_t1(t1_map(12, [(1, (6, 4), Q(1))]), frame321)
    assert exc.value.witnesses[0][:2] == (1, (5, 4))


def test_structure_t2_examples(golden0):
    mu1, mu2 = complex(math.exp(-1)), complex(math.exp(1 / PHI))
    g = PlanarMap.from_terms(
        COMPLEX, 8, mu1, mu2, [(1, (2, 1), 1j), (1, (2, 2), 2.0), (2, (2, 4), 3.0)]
    )
    s = extract_structure_t2(g, golden0)
    assert s.b1[1] == {(0, 0): 1j}
    assert s.b2[1] == {(0, 0): 2.0}
    assert s.b1[2] == {(0, 1): 3.0}


def test_theorem2_removes_stage_two_term(golden0):
    mu1, mu2 = complex(math.exp(-1)), complex(math.exp(1 / PHI))
    f = PlanarMap.from_terms(COMPLEX, 6, mu1, mu2, [(1, (1, 1), 1.0)])
    out = pipeline_theorem2(f, golden0, R=PHI)
    assert out.structure.is_empty()
    assert out.diagnostics["relative_residual"] < 1e-12


def test_decay_values(frame321, golden0):
    d = decay_constants(frame321, MU1, MU2)
    assert d.d0 == pytest.approx(0.25 ** (1 / 26), rel=1e-14) and round(d.d0, 4) == 0.9481
    assert d.d1 == pytest.approx(8 ** (-1 / 36), rel=1e-14) and round(d.d1, 4) == 0.9439
    g = decay_constants(golden0, complex(math.exp(-1)), complex(math.exp(1 / PHI)), R=PHI)
    assert g.d0 == pytest.approx(math.exp(-(PHI - 1) / (2 * PHI)), rel=1e-12) and round(g.d0, 4) == 0.8261


def test_residual_of_perturbed_normal_form(frame321):
    f = t1_map(6, [(1, (2, 1), Q(1))])
    ident = PlanarMap.identity(RATIONAL, 6)
    assert conjugacy_residual(f, f, ident) == 0
    g = t1_map(6, [(1, (2, 1), Q(2))])
    assert conjugacy_residual(f, g, ident) == 1


def test_swapped_orientation():
    frame = resonance_frame(2, 3, 1)
    spec = GeneratorSpec(seed=5, ring=RATIONAL, frame=resonance_frame(3, 2, 1), degree=8)
    f = random_resonant_saddle(spec).swapped()
    out = pipeline_theorem1(f, frame)
    assert out.diagnostics["orientation_swapped"]
    assert out.diagnostics["residual"] == 0
    assert audit_outcome(out).passed


def test_gaussian_rotated_eigenvalues(frame321):
    rot = GaussianRational(Q("3/5"), Q("4/5"))
    spec = GeneratorSpec(seed=2, ring=GAUSSIAN, frame=frame321, degree=8, rotation=(rot, rot.conjugate()))
    out = pipeline_theorem1(random_resonant_saddle(spec), frame321)
    assert out.diagnostics["residual"] == 0 and audit_outcome(out).passed


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.sampled_from([(3, 2, 0), (3, 2, 1), (2, 1, 0), (5, 3, 1), (1, 1, 0)]))
def test_pipeline_conjugates_exactly(seed, pqN):
    frame = resonance_frame(*pqN)
    f = random_resonant_saddle(GeneratorSpec(seed=seed, ring=RATIONAL, frame=frame, degree=7))
    out = pipeline_theorem1(f, frame)
    assert map_compose(f, out.h) == map_compose(out.h, out.g)
    rep = audit_outcome(out)
    assert rep.passed, rep.findings
