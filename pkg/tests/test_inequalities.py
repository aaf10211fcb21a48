import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import special_ortho_group

from analysis import random_configuration, with_ball
from bodies import UnitBall, VPolytope, Zonotope
from conftest import direction_segment, segment
from errors import ApplicabilityError, ContractError
from inequalities import (AF_LOWER, CONJ_1_1, THM_1_3, THM_1_4, ZONOLATE, check, check_af_lower,
                          check_reverse_af, equality_diagnostics)
from util import make_rng, multinomial

ORTHOGONAL = [(segment(2, 0), 1), (segment(2, 1), 1)]
SIXTY = [(segment(2, 0), 1), (direction_segment(60), 1)]
K_SEGMENT = VPolytope([[-0.5, 0.0, 0.0], [0.5, 0.0, 0.0]])


def test_orthogonal_segments_are_an_equality_case():
    report = check_reverse_af(ORTHOGONAL, CONJ_1_1)
    assert report.lhs == pytest.approx(1.0)
    assert report.rhs == pytest.approx(1.0)
    assert report.holds and report.equality_within
    assert report.proven and not report.degenerate


def test_segments_at_sixty_degrees():
    report = check_reverse_af(SIXTY, CONJ_1_1)
    assert report.epsilon == pytest.approx(2.0 / math.sqrt(3.0) - 1.0, rel=1e-9)
    assert report.holds and not report.equality_within


def test_thm13_segment_ball_segment_equality():
    entries = [(K_SEGMENT, 1), (UnitBall(3), 1), (segment(3, 2), 1)]
    report = check_reverse_af(entries, THM_1_3, gamma=1, beta=2)
    assert report.lhs == pytest.approx(2.0)
    assert report.rhs == pytest.approx(2.0)
    assert report.equality_within
    assert report.diagnostics["gamma"] == 1 and report.diagnostics["beta"] == 2


def test_thm13_checks_gamma_and_beta():
    entries = [(K_SEGMENT, 1), (UnitBall(3), 1), (segment(3, 2), 1)]
    with pytest.raises(ApplicabilityError):
        check_reverse_af(entries, THM_1_3, gamma=2)
    with pytest.raises(ApplicabilityError):
        check_reverse_af(entries, THM_1_3, beta=3)


def test_thm13_allows_one_general_body():
    square = VPolytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])
    triangle = VPolytope([[0, 0, 0], [1, 0, 0], [0, 0, 1]])
    with pytest.raises(ApplicabilityError):
        check_reverse_af([(square, 1), (triangle, 1), (segment(3, 2), 1)], THM_1_3)


def test_thm13_with_a_designated_zonotope():
    square = Zonotope([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0]])
    report = check_reverse_af([(square, 2), (segment(3, 2), 1)], THM_1_3, gamma=2)
    assert report.lhs == pytest.approx(1.0)
    assert report.rhs == pytest.approx(1.0)


def test_zonolate_equality_with_orthogonal_segments():
    entries = [(segment(3, 0), 1), (segment(3, 1), 1), (UnitBall(3), 1)]
    report = check_reverse_af(entries, ZONOLATE)
    assert report.lhs == pytest.approx(2.0)
    assert report.rhs == pytest.approx(2.0)
    assert report.holds


def test_zonolate_rejects_general_polytopes():
    with pytest.raises(ApplicabilityError):
        check_reverse_af([(K_SEGMENT, 1), (UnitBall(3), 1), (segment(3, 2), 1)], ZONOLATE)


def test_thm14_hypotheses():
    square = Zonotope([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0]])
    with pytest.raises(ApplicabilityError):
        check_reverse_af([(square, 2), (segment(3, 2), 1)], THM_1_4)
    report = check_reverse_af([(segment(3, 2), 1), (square, 2)], THM_1_4)
    assert report.holds and report.proven


def test_unknown_inequality_and_bad_multiplicities():
    with pytest.raises(ContractError):
        check_reverse_af(ORTHOGONAL, "NOPE")
    with pytest.raises(ContractError):
        check_reverse_af([(segment(2, 0), 1)], CONJ_1_1)


def test_af_lower_examples():
    square = VPolytope([[0, 0], [1, 0], [0, 1], [1, 1]])
    r = math.sqrt(0.5)
    rotated = VPolytope([[r, 0], [0, r], [-r, 0], [0, -r]])
    equal = check_af_lower([(square, 1), (square, 1)])
    assert equal.lhs == pytest.approx(1.0) and equal.rhs == pytest.approx(1.0)
    assert equal.holds and equal.equality_within
    rotated_report = check_af_lower([(square, 1), (rotated, 1)])
    assert rotated_report.rhs == pytest.approx(math.sqrt(2.0))
    assert rotated_report.holds


def test_af_lower_with_vanishing_volumes_is_degenerate():
    report = check(ORTHOGONAL, AF_LOWER)
    assert report.lhs == 0.0
    assert report.degenerate and report.epsilon is None
    assert report.holds


def test_equality_diagnostics_examples():
    diagnostics = equality_diagnostics(ORTHOGONAL)
    assert diagnostics["dims"] == [1, 1]
    assert diagnostics["dims_match_multiplicities"]
    assert diagnostics["pairwise_brackets"][0][0] is None
    assert diagnostics["pairwise_brackets"][0][1] == pytest.approx(1.0)
    tilted = equality_diagnostics(SIXTY)
    assert tilted["bracket"] == pytest.approx(math.sqrt(3.0) / 2.0)
    square = Zonotope([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0]])
    flat = equality_diagnostics([(square, 2), (segment(3, 0), 1)])
    assert flat["bracket"] == 0.0


def test_outside_equality_hypotheses_is_flagged():
    square = Zonotope([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0]])
    diagnostics = equality_diagnostics([(segment(3, 2), 2), (square, 1)])
    assert diagnostics["outside_equality_hypotheses"]


def test_report_json_is_strict():
    report = check(SIXTY, CONJ_1_1)
    text = json.dumps(report.to_json(), allow_nan=False)
    assert list(json.loads(text)) == ["inequality_id", "lhs", "rhs", "epsilon", "holds", "equality_within",
                                      "diagnostics"]


@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 3, 4])
@given(st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=200, deadline=None)
def test_reverse_inequalities_hold_for_random_zonotopes(n, seed):
    entries = random_configuration(n, 4, make_rng(seed))
    assert check(entries, CONJ_1_1).holds
    assert check(with_ball(entries), ZONOLATE).holds


def _moved(entries, rotation, factor):
    return [(Zonotope(factor * Z.generators @ rotation.T, factor * rotation @ Z.offset), a)
            if isinstance(Z, Zonotope) else (Z, a) for Z, a in entries]


def _same_report(moved, report, scale):
    assert moved.lhs == pytest.approx(scale * report.lhs, rel=1e-9, abs=1e-12)
    assert moved.rhs == pytest.approx(scale * report.rhs, rel=1e-9, abs=1e-12)
    if report.epsilon is None:
        assert moved.epsilon is None
    else:
        assert moved.epsilon == pytest.approx(report.epsilon, rel=1e-9, abs=1e-9)


@given(st.integers(min_value=0, max_value=10 ** 6), st.sampled_from([2, 3]),
       st.floats(min_value=0.25, max_value=4.0))
@settings(max_examples=30, deadline=None)
def test_epsilon_is_invariant_under_rotation_and_scaling(seed, n, factor):
    entries = random_configuration(n, 3, make_rng(seed))
    rotation = special_ortho_group.rvs(n, random_state=seed)
    report = check_reverse_af(entries, CONJ_1_1)
    _same_report(check_reverse_af(_moved(entries, rotation, 1.0), CONJ_1_1), report, 1.0)
    _same_report(check_reverse_af(_moved(entries, np.eye(n), factor), CONJ_1_1), report, factor ** n)
    balls = with_ball(entries)
    zonolate = check_reverse_af(balls, ZONOLATE)
    _same_report(check_reverse_af(_moved(balls, rotation, 1.0), ZONOLATE), zonolate, 1.0)


@given(st.integers(min_value=0, max_value=10 ** 6), st.sampled_from([2, 3]))
@settings(max_examples=30, deadline=None)
def test_mixed_volume_sits_between_both_bounds(seed, n):
    entries = random_configuration(n, 3, make_rng(seed))
    lower = check(entries, AF_LOWER)
    upper = check(entries, CONJ_1_1)
    mv = lower.rhs
    slack = 1e-9 * max(1.0, mv)
    assert lower.lhs <= mv + slack
    assert mv <= upper.rhs / multinomial([a for _, a in entries]) + slack



@given(st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=20, deadline=None)
def test_af_lower_holds_for_random_zonotopes(seed):
    rng = np.random.default_rng(seed)
    entries = [(Zonotope(rng.uniform(-1, 1, size=(3, 3))), 1), (Zonotope(rng.uniform(-1, 1, size=(4, 3))), 2)]
    assert check(entries, AF_LOWER).holds
