import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from util import (KappaTable, binom, chunked, kahan_sum, kappa, log_binom, log_kappa, make_rng, multinomial,
                  rng_label, spawn_rngs)


@pytest.mark.parametrize("j, expected", [(0, 1.0), (1, 2.0), (2, math.pi), (3, 4.0 * math.pi / 3.0),
                                         (4, math.pi ** 2 / 2.0)])
def test_kappa_small_dimensions(j, expected):
    assert kappa(j) == pytest.approx(expected, rel=1e-14)


def test_log_kappa_stays_finite_in_high_dimension():
    assert math.isfinite(log_kappa(5000))
    assert log_kappa(5000) < 0.0


def test_kappa_rejects_negative_dimension():
    with pytest.raises(ValueError):
        kappa(-1)


def test_kappa_table_matches_kappa():
    table = KappaTable(6)
    assert [table[j] for j in range(7)] == [kappa(j) for j in range(7)]
    assert table[9] == kappa(9)


def test_binom_and_log_binom():
    assert binom(5, 2) == 10.0
    assert binom(3, 5) == 0.0
    assert math.exp(log_binom(50, 25)) == pytest.approx(math.comb(50, 25), rel=1e-10)


@pytest.mark.parametrize("parts, expected", [([1, 1], 2.0), ([2, 1], 3.0), ([0, 3], 1.0), ([1, 1, 1], 6.0),
                                             ([2, 2, 1], 30.0)])
def test_multinomial(parts, expected):
    assert multinomial(parts) == expected


def test_multinomial_rejects_negative_parts():
    with pytest.raises(ValueError):
        multinomial([2, -1])


def test_kahan_sum_is_closer_to_exact_than_naive():
    values = [0.1] * 10 + [1e8, -1e8] + [1e-3] * 1000
    exact = math.fsum(values)
    assert abs(kahan_sum(values) - exact) <= abs(sum(values) - exact)


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), max_size=50))
def test_kahan_sum_matches_fsum(values):
    assert kahan_sum(values) == pytest.approx(math.fsum(values), rel=1e-12, abs=1e-6)


def test_chunked_keeps_order():
    assert list(chunked(range(5), 2)) == [[0, 1], [2, 3], [4]]
    assert list(chunked([], 3)) == []


def test_make_rng_is_reproducible():
    assert np.array_equal(make_rng(7).standard_normal(4), make_rng(7).standard_normal(4))
    rng = make_rng(1)
    assert make_rng(rng) is rng


def test_spawned_streams_are_reproducible_and_distinct():
    first = [r.random() for r in spawn_rngs(3, 4)]
    second = [r.random() for r in spawn_rngs(3, 4)]
    assert first == second
    assert len(set(first)) == 4


def test_rng_label_names_the_generator():
    assert rng_label(5) == {"seed": 5, "algorithm": "PCG64"}
