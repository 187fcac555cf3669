import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ribelab.exceptions import NotRegular, PreconditionViolated
from ribelab.metric import Graph, cycle_graph, gen_named, gen_random_regular, gen_tree, girth, petersen_graph
from ribelab.spectral import (
    IntPolynomial,
    distance_m_graph,
    geronimus,
    lambda_min_floor,
    root_interval,
    self_mixing_check,
    self_mixing_exhaustive,
    trig_form,
    verify_geronimus_identity,
)


def test_geronimus_examples():
    assert geronimus(5, 1) == IntPolynomial((0, 1))
    assert geronimus(3, 3) == IntPolynomial((0, -5, 0, 1))
    assert geronimus(3, 8).coefficients == (24, 0, -104, 0, 70, 0, -15, 0, 1)
    assert str(geronimus(3, 8)) == "x^8 - 15x^6 + 70x^4 - 104x^2 + 24"
    assert str(geronimus(3, 3)) == "x^3 - 5x"
    assert str(geronimus(4, 0)) == "1"


@pytest.mark.parametrize("k", range(3, 7))
def test_monic_and_parity(k):
    for m in range(21):
        P = geronimus(k, m)
        assert P.degree == m and P.leading == 1
        assert all(c == 0 for i, c in enumerate(P.coefficients) if (i - m) % 2)


@pytest.mark.parametrize("k", range(3, 6))
@pytest.mark.parametrize("m", range(1, 13))
def test_roots_in_interval(k, m):
    roots = geronimus(k, m).roots()
    assert np.max(np.abs(roots.imag)) < 1e-6
    assert np.all(np.abs(roots.real) <= root_interval(k) + 1e-7)


@given(st.integers(3, 6), st.integers(1, 15), st.floats(0.05, math.pi - 0.05))
def test_trigonometric_form(k, m, theta):
    P = geronimus(k, m)
    x = 2 * math.sqrt(k - 1) * math.cos(theta)
    assert P(x) == pytest.approx(float(trig_form(k, m, theta)), rel=1e-8, abs=1e-8 * (k - 1) ** (m / 2))


def test_distance_m_graph_examples():
    g = petersen_graph()
    assert np.array_equal(distance_m_graph(g, 1).adjacency(), g.adjacency())
    assert distance_m_graph(cycle_graph(6), 3).m == 3
    A = g.adjacency()
    assert np.array_equal(A @ A - 3 * np.eye(10, dtype=np.int64), distance_m_graph(g, 2).adjacency())


@pytest.mark.parametrize("name,k", [("petersen", 3), ("heawood", 3), ("tutte_coxeter", 3), ("cycle(11)", 2)])
def test_identity_on_cages(name, k):
    g = gen_named(name)
    if k == 2:
        pytest.raises(Exception, geronimus, 2, 1)
        return
    for m in range(0, (int(girth(g)) + 1) // 2):
        res = verify_geronimus_identity(g, k, m)
        assert res.holds and res.max_deviation == 0


def test_identity_zero_on_any_graph():
    assert verify_geronimus_identity(gen_tree(3, 2), 3, 0).holds


def test_identity_preconditions():
    with pytest.raises(PreconditionViolated):
        verify_geronimus_identity(petersen_graph(), 3, 3)
    res = verify_geronimus_identity(petersen_graph(), 3, 3, check_girth=False)
    assert not res.holds and res.max_deviation > 0
    with pytest.raises(NotRegular):
        verify_geronimus_identity(gen_tree(3, 2), 3, 2)


@given(st.integers(0, 10 ** 6))
def test_distance_graph_degree(seed):
    g = gen_random_regular(24, 3, girth_min=5, seed=seed)
    assert distance_m_graph(g, 2).regular_degree() == 3 * 2
    assert verify_geronimus_identity(g, 3, 2).holds


def test_matrix_evaluation_falls_back_to_exact_integers():
    A = np.full((3, 3), 10 ** 6, dtype=np.int64)
    P = IntPolynomial((0, 0, 0, 0, 1))
    exact = P.evaluate_matrix(A)
    assert exact.dtype == object
    assert exact[0, 0] == 27 * 10 ** 24


@pytest.mark.parametrize("name", ["heawood", "tutte_coxeter"])
def test_eigenvalue_floor(name):
    res = lambda_min_floor(gen_named(name), 3, 2)
    assert res.floor == -9 and res.holds
    assert res.lambda_min >= -9 - 1e-8


def test_floor_preconditions():
    with pytest.raises(PreconditionViolated):
        lambda_min_floor(gen_named("heawood"), 3, 1)
    with pytest.raises(PreconditionViolated):
        lambda_min_floor(petersen_graph(), 3, 4)


def test_self_mixing_examples():
    assert tuple(self_mixing_check(petersen_graph(), []))[::2] == (0, True)
    e, bound, ok = self_mixing_check(cycle_graph(4), [0, 2])
    assert e == 0 and bound == pytest.approx(-1) and ok
    with pytest.raises(NotRegular):
        self_mixing_check(gen_tree(3, 2), [0])


def test_self_mixing_exhaustive_petersen():
    g = petersen_graph()
    assert self_mixing_exhaustive(g) == 0
    lam = -2.0
    for S in itertools.islice(itertools.chain.from_iterable(itertools.combinations(range(10), r) for r in range(11)), 300):
        assert self_mixing_check(g, S, lambda_min=lam).holds


@given(st.integers(0, 10 ** 6))
def test_self_mixing_random(seed):
    rng = np.random.default_rng(seed)
    g = gen_random_regular(int(rng.integers(3, 8)) * 2, 3, seed=seed)
    S = np.flatnonzero(rng.random(g.n) < 0.5)
    assert self_mixing_check(g, S).holds
