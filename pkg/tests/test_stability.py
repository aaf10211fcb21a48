import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bodies import UnitBall, VPolytope, Zonotope, project_body
from conftest import box, direction_segment, segment, unit_cube_zonotope
from errors import ApplicabilityError, ContractError, DegenerateBodyError
from linalg import orthonormalize, sample_grassmannian
from stability import (LEMMA_4_6, PROP_4_5, THM_1_5, THM_5_1, RadiusEstimate, ball_intrinsic_ratio,
                       best_projection_subspace, check_stability, cm_intrinsic_check, inradius,
                       max_inscribed_ellipsoid, min_offset_containment, projection_volume, projstab_check,
                       r_m_estimate, recover_subspaces, zonotope_containment_excess)

TRIANGLE = VPolytope([[0, 0], [1, 0], [0, 1]])
XY_PLANE = orthonormalize([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


@pytest.mark.parametrize("P, expected", [
    (box([1, 1, 1]), 0.5),
    (TRIANGLE, (2.0 - math.sqrt(2.0)) / 2.0),
    (box([2, 1]), 0.5),
])
def test_inradius(P, expected):
    assert inradius(P) == pytest.approx(expected, abs=1e-7)


def test_inradius_needs_full_dimension():
    with pytest.raises(DegenerateBodyError):
        inradius(VPolytope([[0, 0], [1, 1]]))


@pytest.mark.slow
def test_inscribed_ellipsoid_of_a_square_is_the_disc():
    E = max_inscribed_ellipsoid(VPolytope([[-1, -1], [1, -1], [-1, 1], [1, 1]]))
    assert E.lengths == pytest.approx([1.0, 1.0], abs=1e-4)
    assert E.center == pytest.approx([0.0, 0.0], abs=1e-5)


@pytest.mark.slow
def test_inscribed_ellipsoid_of_a_box_is_axis_aligned():
    E = max_inscribed_ellipsoid(VPolytope([[-2, -1], [2, -1], [-2, 1], [2, 1]]))
    assert E.lengths == pytest.approx([2.0, 1.0], abs=1e-4)
    assert abs(E.directions[0, 0]) == pytest.approx(1.0, abs=1e-4)


@pytest.mark.slow
def test_inscribed_ellipse_of_a_triangle_has_steiner_area():
    E = max_inscribed_ellipsoid(TRIANGLE)
    area = math.pi * float(np.prod(E.lengths))
    # the largest ellipse in a triangle covers pi / (3 sqrt 3) of its area
    assert area == pytest.approx(math.pi / (3.0 * math.sqrt(3.0)) * 0.5, rel=0.02)
    assert np.all(E.gauge(TRIANGLE.vertices) <= 2.0 + 1e-6)


def test_inscribed_ellipsoid_needs_full_dimension():
    with pytest.raises(DegenerateBodyError):
        max_inscribed_ellipsoid(VPolytope([[0, 0, 0], [1, 0, 0], [0, 1, 0]]))


def _rotation(a, b):
    ca, sa, cb, sb = math.cos(a), math.sin(a), math.cos(b), math.sin(b)
    about_z = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    about_x = np.array([[1.0, 0.0, 0.0], [0.0, cb, -sb], [0.0, sb, cb]])
    return about_x @ about_z


def test_radii_of_a_box_at_the_ends():
    P = box([2, 1, 1])
    r1, r3 = r_m_estimate(P, 1), r_m_estimate(P, 3)
    assert r1.lower == r1.upper == pytest.approx(math.sqrt(6.0) / 2.0, abs=1e-9)
    assert r3.method == "exact_box"
    assert r3.lower == r3.upper == pytest.approx(0.5, abs=1e-7)


@pytest.mark.slow
def test_middle_radius_of_a_box_covers_tilted_discs():
    # a disc of radius sqrt(2)/2 fits in the plane spanned by e1 and (0, 1, 1)
    estimate = r_m_estimate(box([2, 1, 1]), 2)
    assert estimate.method == "mvie"
    assert estimate.lower <= 0.5 + 1e-4
    assert estimate.upper >= math.sqrt(2.0) / 2.0
    assert estimate.upper <= 3 * 0.5 + 1e-4
    assert estimate.upper == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-3)


@pytest.mark.parametrize("P, expected", [
    (VPolytope(box([2, 1, 1]).vertices @ _rotation(0.5, 0.3).T), 0.5),
    (VPolytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]), 1.0 / (3.0 + math.sqrt(3.0))),
])
def test_full_radius_from_the_inradius_program(P, expected):
    estimate = r_m_estimate(P, 3)
    assert estimate.method == "inradius_lp"
    assert estimate.lower == estimate.upper == pytest.approx(expected, abs=1e-7)


def test_radius_of_a_segment_and_above_its_dimension():
    assert r_m_estimate(segment(2, 0), 1).lower == pytest.approx(0.5)
    estimate = r_m_estimate(segment(2, 0), 2)
    assert estimate.lower == estimate.upper == 0.0
    assert estimate.method == "dimension"


@pytest.mark.slow
def test_radius_of_the_symmetric_cube():
    estimate = r_m_estimate(VPolytope(np.array(np.meshgrid([-1, 1], [-1, 1], [-1, 1])).reshape(3, -1).T), 2)
    assert estimate.lower == pytest.approx(1.0, abs=1e-4)
    assert estimate.upper >= math.sqrt(6.0) / 2.0


@pytest.mark.slow
def test_radius_interval_from_the_ellipsoid():
    octahedron = VPolytope(np.vstack([np.eye(3), -np.eye(3)]))
    estimate = r_m_estimate(octahedron, 2)
    assert estimate.method == "mvie"
    assert estimate.lower == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-4)
    # vertices sit at gauge sqrt(3) of the inscribed ball
    assert estimate.upper == pytest.approx(math.sqrt(3.0) * estimate.lower, rel=1e-3)
    assert estimate.upper >= math.sqrt(2.0) / 2.0
    assert r_m_estimate(octahedron, 3).lower <= estimate.upper


def test_radius_estimate_rejects_empty_interval():
    with pytest.raises(ContractError):
        RadiusEstimate(1, 2.0, 1.0, "diameter")


def test_recovered_subspaces_of_coordinate_segments():
    recovered = recover_subspaces([(segment(3, k), 1) for k in range(3)])
    for k, L in enumerate(recovered):
        assert abs(L.basis[k, 0]) == pytest.approx(1.0)


def test_recovered_subspaces_of_square_and_segment():
    square = Zonotope([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0]])
    plane, line = recover_subspaces([(square, 2), (segment(3, 2), 1)])
    assert np.allclose(plane.projector(), XY_PLANE.projector())
    assert abs(line.basis[2, 0]) == pytest.approx(1.0)


def test_recovered_line_of_a_tilted_segment():
    (L,) = recover_subspaces([(direction_segment(60), 1)])
    assert abs(L.basis[:, 0] @ [0.5, math.sqrt(3.0) / 2.0]) == pytest.approx(1.0)


def test_recovery_needs_enough_rank():
    with pytest.raises(ContractError):
        recover_subspaces([(segment(3, 0), 2)])


def test_best_projection_of_the_cube():
    L, area = best_projection_subspace(box([1, 1, 1]), 2, samples=400)
    assert area <= math.sqrt(3.0) + 1e-9
    assert area == pytest.approx(math.sqrt(3.0), rel=0.02)
    assert projection_volume(box([1, 1, 1]), L) == area


def test_min_offset_containment():
    _, rho = min_offset_containment(np.array([[0, 0, 1.0], [0, 0, -1.0]]), XY_PLANE)
    assert rho == pytest.approx(1.0, abs=1e-6)
    _, rho = min_offset_containment(np.array([[1.0, 0, 0], [0, 1.0, 0]]), orthonormalize([[0, 0, 1.0]]))
    assert rho == pytest.approx(math.sqrt(0.5), abs=1e-6)
    _, rho = min_offset_containment(np.array([[1.0, 2.0, 0], [3.0, 0, 0]]), XY_PLANE)
    assert rho == 0.0


def test_containment_excess_of_a_zonotope():
    Z = Zonotope([[0.5, 0.0, 0.0], [0.0, 0.0, 0.25]])
    directions = np.eye(3)
    assert zonotope_containment_excess(Z, orthonormalize([[1.0, 0.0, 0.0]]), directions) == pytest.approx(0.25)
    assert zonotope_containment_excess(Z, XY_PLANE, directions) == pytest.approx(0.25)


def test_thm15_orthogonal_segments():
    cert = check_stability(THM_1_5, [(segment(2, 0), 1), (segment(2, 1), 1)])
    assert cert.applicable and cert.holds
    assert cert.epsilon == pytest.approx(0.0, abs=1e-12)
    assert cert.bracket_value == pytest.approx(1.0)
    assert cert.bracket_bound == pytest.approx(1.0)
    assert all(s <= 1e-9 for s in cert.containment_slacks)


@pytest.mark.parametrize("degrees", [89, 60])
def test_thm15_tilted_segments_hold_trivially(degrees):
    cert = check_stability(THM_1_5, [(segment(2, 0), 1), (direction_segment(degrees), 1)])
    theta = math.radians(degrees)
    assert cert.epsilon == pytest.approx(1.0 / math.sin(theta) - 1.0, rel=1e-6)
    assert cert.bracket_value == pytest.approx(math.sin(theta))
    assert cert.trivial_bound and cert.holds


def test_thm15_needs_zonotopes():
    with pytest.raises(ApplicabilityError):
        check_stability(THM_1_5, [(TRIANGLE, 2)])


def test_thm15_with_vanishing_mixed_volume_is_not_applicable():
    cert = check_stability(THM_1_5, [(segment(2, 0), 1), (Zonotope([[1.0, 0.0]]), 1)])
    assert not cert.applicable and not cert.holds
    assert cert.bracket_value is None
    json.dumps(cert.to_json(), default=str, allow_nan=False)


@pytest.mark.slow
@pytest.mark.parametrize("theorem_id", [THM_5_1, PROP_4_5])
def test_general_body_with_orthogonal_segment(theorem_id):
    square = VPolytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])
    cert = check_stability(theorem_id, [(square, 2), (segment(3, 2), 1)], samples=200)
    assert cert.applicable
    assert cert.epsilon == pytest.approx(0.0, abs=1e-9)
    assert cert.bracket_value == pytest.approx(1.0)
    assert cert.holds


def test_general_body_needs_zonotopes_after_it():
    with pytest.raises(ApplicabilityError):
        check_stability(THM_5_1, [(segment(3, 0), 1), (UnitBall(3), 1), (segment(3, 2), 1)])


@pytest.mark.slow
def test_lemma46_orthogonal_segments():
    cert = check_stability(LEMMA_4_6, [(segment(2, 0), 1), (segment(2, 1), 1)])
    assert cert.applicable and cert.holds
    assert cert.bracket_value == pytest.approx(1.0)


def test_unknown_theorem():
    with pytest.raises(ContractError):
        check_stability("THM_9_9", [(segment(2, 0), 1), (segment(2, 1), 1)])


def test_projstab_segment_is_an_equality_case():
    result = projstab_check(VPolytope([[0, 0], [1, 0]]), 1)
    assert result.diagnostics["factor"] == 1.0
    assert result.lhs == pytest.approx(1.0)
    assert result.rhs == pytest.approx(1.0)
    assert result.holds


@pytest.mark.slow
def test_projstab_triangle():
    result = projstab_check(TRIANGLE, 1, samples=2000, seed=4)
    assert result.diagnostics["max_projection"] == pytest.approx(math.sqrt(2.0), rel=1e-6)
    assert result.lhs == pytest.approx((2.0 + math.sqrt(2.0)) / 2.0, rel=0.05)
    assert result.holds


@pytest.mark.slow
def test_projstab_cube():
    result = projstab_check(unit_cube_zonotope(3), 2)
    assert result.lhs == pytest.approx(3.0)
    assert result.diagnostics["max_projection"] == pytest.approx(math.sqrt(3.0), rel=0.02)
    assert result.holds


def test_projstab_needs_enough_dimension():
    with pytest.raises(ContractError):
        projstab_check(VPolytope([[0, 0], [1, 0]]), 2)


@pytest.mark.parametrize("n, j, expected", [(2, 1, math.pi / 2.0), (3, 1, 2.0), (5, 5, 1.0)])
def test_ball_intrinsic_ratio(n, j, expected):
    ratio, bound, holds = ball_intrinsic_ratio(n, j)
    assert ratio == pytest.approx(expected)
    assert bound == pytest.approx(2.0 ** (n / 2.0))
    assert holds


def test_ball_intrinsic_ratio_holds_up_to_dimension_fifty():
    assert all(ball_intrinsic_ratio(50, j)[2] for j in range(1, 51))


def test_flat_body_gives_factor_one():
    square = Zonotope([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0]])
    result = cm_intrinsic_check(square, XY_PLANE, 2)
    assert result.applicable and result.holds
    assert result.diagnostics["eta"] == pytest.approx(0.0, abs=1e-12)
    assert result.lhs == pytest.approx(result.rhs)


def test_thin_box_close_to_its_base():
    thin = Zonotope([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.005]], offset=[0.5, 0.5, 0.005])
    result = cm_intrinsic_check(thin, XY_PLANE, 2)
    assert result.applicable
    assert result.lhs == pytest.approx(1.02)
    assert result.rhs == pytest.approx(1.0 + 3 * 2 ** 4 * 0.02, rel=1e-4)
    assert result.holds


def test_tilted_square():
    theta = math.radians(5.0)
    tilted = Zonotope([[0.5, 0.0, 0.0], [0.0, 0.5 * math.cos(theta), 0.5 * math.sin(theta)]])
    result = cm_intrinsic_check(tilted, XY_PLANE, 2)
    assert result.applicable and result.holds
    assert result.lhs == pytest.approx(1.0)


def test_far_body_is_not_applicable():
    cube = unit_cube_zonotope(3)
    result = cm_intrinsic_check(cube, XY_PLANE, 2)
    assert not result.applicable and not result.holds
    assert "eta" in result.diagnostics["reason"]


def test_flat_of_the_wrong_dimension_is_not_applicable():
    square = Zonotope([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0]])
    result = cm_intrinsic_check(square, XY_PLANE, 1)
    assert not result.applicable and not result.holds
    assert result.lhs is None and result.rhs is None
    assert "dim A = 2" in result.diagnostics["reason"]
    with pytest.raises(ContractError):
        cm_intrinsic_check(square, XY_PLANE, 4)


@pytest.mark.slow
@given(st.integers(min_value=0, max_value=10 ** 6), st.sampled_from([2, 3]))
@settings(max_examples=20, deadline=None)
def test_projstab_holds_for_random_polytopes(seed, n):
    rng = np.random.default_rng(seed)
    K = VPolytope(rng.uniform(-1, 1, size=(n + 4, n)))
    beta = int(rng.integers(1, n))
    result = projstab_check(K, beta, samples=2000, seed=seed)
    assert result.holds
    assert result.lhs >= result.rhs - 3.0 * result.diagnostics["lhs_stderr"] - 1e-9 * max(1.0, result.rhs)


@pytest.mark.slow
@given(st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=10, deadline=None)
def test_radius_intervals_decrease_with_m(seed):
    K = VPolytope(np.random.default_rng(seed).uniform(-1, 1, size=(8, 3)))
    estimates = [r_m_estimate(K, m) for m in (1, 2, 3)]
    for larger, smaller in zip(estimates, estimates[1:]):
        assert smaller.lower <= larger.upper + 1e-9


@pytest.mark.slow
@given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=1, max_value=2))
@settings(max_examples=10, deadline=None)
def test_projection_radius_stays_within_n_times_the_body_radius(seed, m):
    n = 3
    K = VPolytope(np.random.default_rng(seed).uniform(-1, 1, size=(8, n)))
    L = sample_grassmannian(n, 2, seed + 1)
    projected = r_m_estimate(project_body(K, L, coordinates=True), m)
    assert projected.lower <= n * r_m_estimate(K, m).upper + 1e-9
