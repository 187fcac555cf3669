import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ribelab.cube import (
    CubeFunction,
    CubeMap,
    TorusFunction,
    cube_distortion_lower,
    heat_semigroup,
    heat_semigroup_kernel,
    inverse_walsh,
    laplacian,
    metric_cotype_constant,
    metric_type_constant,
    partial_derivative,
    partial_derivative_fourier,
    pisier_factor,
    pisier_factor_sweep,
    pisier_ratio,
    popcount,
    two_point_cotype,
    walsh_character,
    walsh_naive,
    walsh_transform,
)
from ribelab.exceptions import DimensionTooLarge, IndexOutOfRange, InvalidParameter, NegativeTime
from ribelab.metric import FiniteMetric, cycle_graph, gen_hypercube, metric_from_graph

dims = st.integers(0, 7)
TIMES = (0.1, 1.0, 10.0)


@given(dims, st.integers(1, 3), st.integers(0, 10 ** 6))
def test_walsh_matches_naive_and_inverts(n, d, seed):
    f = CubeFunction.random(n, d, seed=seed)
    c = walsh_transform(f)
    assert np.allclose(c, walsh_naive(f))
    assert np.allclose(inverse_walsh(c).values, f.values)


def test_walsh_of_constants_and_characters():
    n = 5
    c = walsh_transform(CubeFunction(np.full(1 << n, 3.0)))
    assert c[0, 0] == pytest.approx(3.0) and np.allclose(c[1:], 0)
    for A in (0, 1, 6, 31):
        c = walsh_transform(CubeFunction.character(n, A))[:, 0]
        expect = np.zeros(1 << n)
        expect[A] = 1
        assert np.allclose(c, expect)


def test_character_values():
    # bit b set means epsilon_{b+1} = -1
    assert walsh_character(2, 0b01).tolist() == [1, -1, 1, -1]
    assert walsh_character(2, 0b11).tolist() == [1, -1, -1, 1]
    assert popcount(np.array([0, 7, 8])).tolist() == [0, 3, 1]


@given(st.integers(1, 7), st.integers(0, 10 ** 6), st.data())
def test_partial_derivative_routes_agree(n, seed, data):
    f = CubeFunction.random(n, 2, seed=seed)
    j = data.draw(st.integers(1, n))
    assert np.allclose(partial_derivative(f, j).values, partial_derivative_fourier(f, j).values)


def test_partial_derivative_examples():
    f = CubeFunction.linear([[1.0], [10.0]])
    assert np.allclose(partial_derivative(f, 2).values[:, 0], [10, 10, -10, -10])
    assert np.allclose(laplacian(f).values, f.values)
    with pytest.raises(IndexOutOfRange):
        partial_derivative(f, 0)
    with pytest.raises(IndexOutOfRange):
        partial_derivative(f, 3)


def test_laplacian_eigenvalues_are_set_sizes():
    n = 4
    for A in range(1 << n):
        chi = CubeFunction.character(n, A)
        assert np.allclose(laplacian(chi).values[:, 0], popcount(np.array(A)) * chi.values[:, 0])


@pytest.mark.parametrize("t", TIMES)
def test_heat_on_characters(t):
    n = 6
    for A in (0, 5, 63):
        chi = CubeFunction.character(n, A)
        expect = math.exp(-t * bin(A).count("1")) * chi.values
        assert np.allclose(heat_semigroup(chi, t).values, expect)
    assert np.allclose(heat_semigroup(chi, 0).values, chi.values)


@given(st.integers(0, 8), st.sampled_from(TIMES), st.integers(0, 10 ** 6))
def test_kernel_equals_multiplier(n, t, seed):
    f = CubeFunction.random(n, 2, seed=seed)
    assert np.allclose(heat_semigroup_kernel(f, t).values, heat_semigroup(f, t).values, atol=1e-10)


@given(st.integers(1, 10), st.sampled_from(TIMES), st.sampled_from(TIMES), st.integers(0, 10 ** 6))
def test_semigroup_law_and_contraction(n, s, t, seed):
    f = CubeFunction.random(n, 3, seed=seed, norm=1.0)
    both = heat_semigroup(heat_semigroup(f, s), t)
    assert np.allclose(both.values, heat_semigroup(f, s + t).values)
    ft = heat_semigroup(f, t)
    assert ft.mean_norm() <= f.mean_norm() + 1e-10
    # e^{t Delta} = prod_i (I + (e^t - 1) d_i) has mean-norm at most e^{nt}
    assert ft.mean_norm() >= math.exp(-n * t) * f.mean_norm() * (1 - 1e-12)
    assert np.allclose(ft.mean(), f.mean())
    # fully mixed limit: distance to the mean shrinks at least like e^{-t}
    dev = CubeFunction(ft.values - f.mean(), norm=2.0).norms()
    base = CubeFunction(f.values - f.mean(), norm=2.0).norms()
    assert np.sqrt(np.mean(dev ** 2)) <= math.exp(-t) * np.sqrt(np.mean(base ** 2)) + 1e-10


def test_heat_errors():
    f = CubeFunction.random(3)
    with pytest.raises(NegativeTime):
        heat_semigroup(f, -1)
    with pytest.raises(NegativeTime):
        heat_semigroup_kernel(f, -0.5)
    with pytest.raises(DimensionTooLarge):
        CubeFunction(np.zeros(1 << 17))
    with pytest.raises(InvalidParameter):
        CubeFunction(np.zeros(6))


def _pisier_brute(f, q):
    n, size = f.n, 1 << f.n
    lhs = np.mean(f.like(f.values - f.mean()).norms() ** q) ** (1 / q)
    parts = [partial_derivative(f, j).values for j in range(1, n + 1)]
    acc = 0.0
    for delta in itertools.product((1, -1), repeat=n):
        combo = sum(dl * p for dl, p in zip(delta, parts))
        acc += np.sum(f.like(combo).norms() ** q)
    return lhs, (acc / size / size) ** (1 / q)


@pytest.mark.parametrize("q", [1.0, 2.0, 3.0])
def test_pisier_against_brute_force(q):
    f = CubeFunction.random(4, 2, seed=3, norm=1.0)
    lhs, rhs, _ = pisier_ratio(f, q)
    blhs, brhs = _pisier_brute(f, q)
    assert lhs == pytest.approx(blhs) and rhs == pytest.approx(brhs)


def test_pisier_examples():
    lhs, rhs, ratio = pisier_ratio(CubeFunction(np.ones(8)))
    assert (lhs, rhs, ratio) == (0.0, 0.0, 0.0)
    # a linear scalar function: both sides are E|sum eps_i x_i|
    f = CubeFunction.linear([[1.0], [2.0], [3.0]])
    assert pisier_ratio(f).ratio == pytest.approx(1.0)
    # every partial of W_{123} is W_{123} itself, so rhs = (E (sum delta_i)^2)^(1/2) = sqrt(3)
    assert pisier_ratio(CubeFunction.character(3, 0b111), q=2).ratio == pytest.approx(1 / math.sqrt(3))


@given(st.integers(1, 8), st.integers(0, 10 ** 6))
def test_scalar_pisier_ratio_is_small(n, seed):
    assert pisier_ratio(CubeFunction.random(n, seed=seed), q=1).ratio <= 10


def test_pisier_factor_sweep_tracks_log_n():
    prev = 0.0
    for n in (2, 8, 32, 128, 1024):
        sweep = pisier_factor_sweep(n)
        assert sweep.factor <= pisier_factor(n, 1.0 / n) + 1e-9
        assert sweep.factor > prev
        assert sweep.factor <= math.e * (math.log(n) + 1)
        prev = sweep.factor


def test_type_constants():
    f = CubeFunction.linear(np.eye(4))
    assert metric_type_constant(f, 2, "enflo") == pytest.approx(1.0)
    for n in (2, 4, 6):
        ident = CubeMap(gen_hypercube(n), np.arange(1 << n))
        assert metric_type_constant(ident, 2, "enflo") == pytest.approx(math.sqrt(n))
        assert metric_type_constant(ident, 1, "plain") == pytest.approx(1.0)
    with pytest.raises(InvalidParameter):
        metric_type_constant(f, 2, "other")
    assert metric_type_constant(CubeFunction(np.zeros(8)), 2) == 0.0


@given(st.integers(1, 6), st.integers(0, 10 ** 6))
def test_plain_type_one_is_triangle_inequality(n, seed):
    f = CubeFunction.random(n, 3, seed=seed)
    assert metric_type_constant(f, 1, "plain") <= 1 + 1e-9


def test_bmw_matches_enflo_at_two():
    f = CubeFunction.random(5, 2, seed=1)
    assert metric_type_constant(f, 2, "bmw") == pytest.approx(metric_type_constant(f, 2, "enflo"))


def _cotype_brute(f: TorusFunction, q):
    m, n = f.m, f.n
    pts = list(itertools.product(range(m), repeat=n))
    index = {x: i for i, x in enumerate(pts)}

    def d(x, y):
        return float(np.atleast_1d(f.distances(f.values[index[x]], f.values[index[y]]))[0])

    def add(x, e):
        return tuple((a + b) % m for a, b in zip(x, e))

    lhs = sum(d(add(x, tuple(m // 2 * (i == j) for i in range(n))), x) ** q for j in range(n) for x in pts)
    rhs = sum(d(add(x, eps), x) ** q for eps in itertools.product((-1, 0, 1), repeat=n) for x in pts)
    return (lhs * 3 ** n / (m ** q * rhs)) ** (1 / q)


def test_cotype_cycle_example():
    f = TorusFunction(np.arange(4), 4, 1, metric=metric_from_graph(cycle_graph(4)))
    assert metric_cotype_constant(f, 2).constant == pytest.approx(math.sqrt(3 / 8))
    assert _cotype_brute(f, 2) == pytest.approx(math.sqrt(3 / 8))


@given(st.sampled_from([2, 4, 6]), st.integers(1, 2), st.sampled_from([1.0, 2.0]), st.integers(0, 10 ** 6))
def test_cotype_against_brute_force(m, n, q, seed):
    f = TorusFunction(np.random.default_rng(seed).normal(size=(m ** n, 2)), m, n)
    assert metric_cotype_constant(f, q).constant == pytest.approx(_cotype_brute(f, q))


def test_cotype_edge_cases():
    assert metric_cotype_constant(TorusFunction(np.ones(16), 4, 2), 2).constant == 0.0
    with pytest.raises(InvalidParameter):
        TorusFunction(np.ones(27), 3, 3)
    with pytest.raises(DimensionTooLarge):
        TorusFunction(np.ones(2 ** 4), 2, 4)


def test_two_point_cotype_grows_as_m_shrinks():
    small = two_point_cotype(2, 2, seeds=range(30))
    large = two_point_cotype(2, 8, seeds=range(30))
    assert small > 2 * large
    assert large == pytest.approx(math.sqrt(2) / 8, rel=0.5)


def test_cube_distortion_lower():
    assert cube_distortion_lower(16, 2, 1) == pytest.approx(4.0)
    assert cube_distortion_lower(9, 2, 3) == pytest.approx(1.0)
    assert cube_distortion_lower(5, 1, 1) == pytest.approx(1.0)
    with pytest.raises(InvalidParameter):
        cube_distortion_lower(4, 2, 0)


@given(st.integers(0, 8), st.sampled_from(TIMES), st.integers(0, 10 ** 6))
def test_heat_identity(n, t, seed):
    f = CubeFunction.random(n, 2, seed=seed)
    top = walsh_character(n, (1 << n) - 1)
    inner = heat_semigroup(f, t).values * top[:, None]
    lhs = heat_semigroup(f.like(inner), t).values
    assert np.allclose(lhs, math.exp(-t * n) * top[:, None] * f.values, atol=1e-12, rtol=0)
