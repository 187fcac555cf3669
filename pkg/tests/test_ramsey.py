import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import line_metric, mixed_metric
from ribelab.exceptions import InvalidParameter, PreconditionViolated
from ribelab.metric import FiniteMetric, random_point_metric
from ribelab.ramsey import (
    certified_distortion,
    extend_ultrametric,
    extract_skeleton,
    star_ultrametric,
)
from ribelab.ultrametric import check_ultrametric


def test_single_point():
    res = extract_skeleton(FiniteMetric([[0.0]]), 0.5)
    assert res.subset.tolist() == [0] and res.tree.n_points == 1


def test_two_points_both_padded():
    m = FiniteMetric([[0, 3], [3, 0]])
    res = extract_skeleton(m, 0.3, seed=4)
    assert res.subset.tolist() == [0, 1]
    assert res.tree.to_metric().dist[0, 1] == 3
    assert res.measured_distortion(m) == 1


def test_epsilon_range():
    with pytest.raises(InvalidParameter):
        extract_skeleton(FiniteMetric([[0, 1], [1, 0]]), 1.0)


@given(st.integers(2, 90), st.integers(0, 10 ** 6), st.sampled_from([0.1, 0.25, 0.5, 0.9]))
def test_domination_and_certified_bound(n, seed, eps):
    m = mixed_metric(n, seed)
    res = extract_skeleton(m, eps, seed)
    rho = res.tree.to_metric().dist
    assert np.all(rho >= m.dist * (1 - 1e-12))
    S = res.subset
    assert np.all(rho[S] <= certified_distortion(eps) * m.dist[S] * (1 + 1e-12))


@given(st.integers(2, 60), st.integers(0, 10 ** 6))
def test_cluster_labels_bound_true_diameters(n, seed):
    m = line_metric(n, seed)
    t = extract_skeleton(m, 0.5, seed).tree
    lo, hi = t.leaf_ranges()
    from ribelab.ultrametric import linear_order

    order = linear_order(t)
    for v in range(t.n_nodes):
        pts = order[lo[v]: hi[v]]
        assert m.dist[np.ix_(pts, pts)].max() <= t.diameter[v] * (1 + 1e-12)


def test_deterministic_per_seed():
    m = random_point_metric(80, 3, seed=1)
    a, b = extract_skeleton(m, 0.5, 9), extract_skeleton(m, 0.5, 9)
    assert np.array_equal(a.subset, b.subset)
    assert np.array_equal(a.tree.to_metric().dist, b.tree.to_metric().dist)


def test_mean_skeleton_size_on_4d_cloud():
    m = random_point_metric(256, 4, seed=0)
    sizes = [extract_skeleton(m, 0.5, s).size for s in range(50)]
    assert np.mean(sizes) >= 256 ** 0.5 / 4


# extension lemma -----------------------------------------------------------

def lemma_properties(m, S, rho0, rho, D):
    S = np.asarray(S)
    r = rho.dist
    agree = np.array_equal(r[np.ix_(S, S)], rho0)
    ultra = check_ultrametric(r) is None
    lower = np.all(3 * r >= m.dist * (1 - 1e-9))
    upper = np.all(r[:, S] <= 2 * D * m.dist[:, S] * (1 + 1e-9) + 1e-12)
    return agree, ultra, lower, upper


def test_extension_with_full_subset_is_identity():
    m = line_metric(20, 3)
    res = extract_skeleton(m, 0.5, 0)
    rho0 = res.tree.to_metric().dist
    D = float(np.max(rho0[m.dist > 0] / m.dist[m.dist > 0]))
    out = extend_ultrametric(m, range(20), rho0, D)
    assert np.array_equal(out.dist, rho0)


def test_extension_hand_example():
    m = FiniteMetric([[0, 2, 1], [2, 0, 1], [1, 1, 0]])
    out = extend_ultrametric(m, [0, 1], np.array([[0, 2], [2, 0.0]]), 1.0).dist
    assert out[2, 0] == 2 and out[2, 1] == 2
    assert all(lemma_properties(m, [0, 1], np.array([[0, 2], [2, 0.0]]), FiniteMetric(out, validate=False), 1.0))


def test_extension_rejects_bad_rho0():
    m = FiniteMetric.from_points(np.arange(3.0)[:, None])
    not_ultra = np.array([[0, 1, 3], [1, 0, 1], [3, 1, 0.0]])
    with pytest.raises(PreconditionViolated):
        extend_ultrametric(m, [0, 1, 2], not_ultra, 10)
    too_small = np.array([[0, 0.5], [0.5, 0.0]])
    with pytest.raises(PreconditionViolated) as err:
        extend_ultrametric(m, [0, 1], too_small, 10)
    assert err.value.witness == (0, 1)
    big = np.array([[0, 50], [50, 0.0]])
    with pytest.raises(PreconditionViolated):
        extend_ultrametric(m, [0, 1], big, 10)
    assert extend_ultrametric(m, [0, 1], big, 10, strict=False).n == 3


def random_instance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 129))
    m = mixed_metric(n, seed)
    k = int(rng.integers(1, n + 1))
    S = np.sort(rng.choice(n, size=k, replace=False))
    sub = m.submetric(S)
    if seed % 2:
        rho0 = extract_skeleton(sub, 0.5, seed).tree.to_metric().dist
    else:
        rho0 = star_ultrametric(sub, int(rng.integers(k))).to_metric().dist
    mask = sub.dist > 0
    D = max(1.0, float(np.max(rho0[mask] / sub.dist[mask]))) if k > 1 else 1.0
    return m, S, rho0, D


@pytest.mark.parametrize("seed", range(25))
def test_extension_lemma_random(seed):
    m, S, rho0, D = random_instance(seed)
    rho = extend_ultrametric(m, S, rho0, D)
    assert all(lemma_properties(m, S, rho0, rho, D))


def test_star_ultrametric_properties():
    m = random_point_metric(30, 2, seed=5)
    rho = star_ultrametric(m, 4).to_metric().dist
    assert check_ultrametric(rho) is None
    assert np.all(rho >= m.dist)
    assert np.all(rho[4] <= 2 * m.dist[4] + 1e-12)
