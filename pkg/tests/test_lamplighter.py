import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ribelab.exceptions import InvalidParameter
from ribelab.lamplighter import IDENTITY, LampConfig, lamplighter_distance, lamplighter_drift, word_ball


def test_trivial_distances():
    a = LampConfig({0: 1}, 0)
    assert lamplighter_distance(a, a) == 0
    assert lamplighter_distance(IDENTITY, a) == 1
    assert lamplighter_distance(IDENTITY, LampConfig({}, -3)) == 3


def test_zero_lamps_are_dropped():
    assert LampConfig({2: 0, 1: 1}, 0) == LampConfig({1: 1}, 0)


def test_tour_goes_to_nearer_end_first():
    # lamps at -1 and +3, end at +3: best tour visits -1 first
    b = LampConfig({-1: 1, 3: 2}, 3)
    assert lamplighter_distance(IDENTITY, b) == 3 + (1 + 4)


@pytest.fixture(scope="module")
def ball6():
    return word_ball(6)


def test_formula_equals_bfs_on_radius_six_ball(ball6):
    assert len(ball6) > 1000
    for g, d in ball6.items():
        assert lamplighter_distance(IDENTITY, g) == d


def test_metric_axioms_on_radius_four_ball():
    ball = list(word_ball(4))
    for a, b in itertools.combinations(ball, 2):
        assert lamplighter_distance(a, b) == lamplighter_distance(b, a) > 0
    rng = np.random.default_rng(0)
    idx = rng.integers(0, len(ball), size=(20000, 3))
    for i, j, k in idx:
        a, b, c = ball[i], ball[j], ball[k]
        assert lamplighter_distance(a, c) <= lamplighter_distance(a, b) + lamplighter_distance(b, c)


@given(st.dictionaries(st.integers(-5, 5), st.integers(-3, 3), max_size=4), st.integers(-5, 5),
       st.dictionaries(st.integers(-5, 5), st.integers(-3, 3), max_size=4), st.integers(-5, 5))
def test_left_invariance_by_translation(fa, pa, fb, pb):
    """Shifting both configurations along the line preserves the distance."""
    a, b = LampConfig(fa, pa), LampConfig(fb, pb)
    shift = lambda c, s: LampConfig({z + s: v for z, v in c.lamps.items()}, c.position + s)  # noqa: E731
    assert lamplighter_distance(a, b) == lamplighter_distance(shift(a, 7), shift(b, 7))


def test_drift_first_steps():
    est = lamplighter_drift(3, 50, seed=1, times=[0, 1, 2, 3])
    assert est.mean[0] == 0 and est.mean[1] == 1
    assert np.all(est.stderr >= 0)


def test_drift_matches_scalar_distance():
    est = lamplighter_drift(40, 5, seed=3, times=[40])
    total = 0
    for i in range(5):
        steps = np.random.default_rng(3 + i).integers(0, 4, size=40, dtype=np.int8)
        g = IDENTITY
        for s in steps:
            g = g.apply("LR+-"[s])
        total += lamplighter_distance(IDENTITY, g)
    assert est.mean[0] == pytest.approx(total / 5)


def test_drift_deterministic_and_trial_prefix_stable():
    a = lamplighter_drift(200, 20, seed=9)
    b = lamplighter_drift(200, 20, seed=9)
    assert np.array_equal(a.mean, b.mean)
    pair = lamplighter_drift(200, 2, seed=9).mean
    single = (lamplighter_drift(200, 1, seed=9).mean + lamplighter_drift(200, 1, seed=10).mean) / 2
    assert np.allclose(pair, single)
    with pytest.raises(InvalidParameter):
        lamplighter_drift(10, 0)
