import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ribelab.exceptions import (
    DisconnectedGraph,
    GenerationTimeout,
    InvalidMetric,
    InvalidParameter,
    NonInjective,
    UnknownName,
)
from ribelab.metric import (
    Embedding,
    FiniteMetric,
    Graph,
    check_triangle,
    cycle_graph,
    distortion_of_map,
    gen_hypercube,
    gen_laakso,
    gen_named,
    gen_random_regular,
    gen_tree,
    girth,
    graph_distances,
    hypercube_points,
    metric_from_graph,
    petersen_graph,
    tree_depths,
)


def brute_girth(g):
    """Shortest cycle by removing each edge and measuring the detour."""
    best = math.inf
    for idx, (u, v, _) in enumerate(g.edges):
        rest = Graph(g.n, g.edges[:idx] + g.edges[idx + 1:])
        d = graph_distances_or_inf(rest)[u, v]
        best = min(best, d + 1)
    return best


def graph_distances_or_inf(g):
    nb = g.neighbors()
    out = np.full((g.n, g.n), math.inf)
    for s in range(g.n):
        out[s, s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for v in nb[u]:
                    if out[s, v] == math.inf:
                        out[s, v] = out[s, u] + 1
                        nxt.append(v)
            frontier = nxt
    return out


def test_cycle_and_edge_distances():
    assert metric_from_graph(cycle_graph(4)).dist[0, 2] == 2
    assert metric_from_graph(Graph(2, ((0, 1),))).dist[0, 1] == 1


def test_petersen_diameter_and_girth():
    g = petersen_graph()
    assert metric_from_graph(g).diameter() == 2
    assert (g.n, g.m, girth(g)) == (10, 15, 5)


def test_disconnected_graph_rejected():
    with pytest.raises(DisconnectedGraph):
        metric_from_graph(Graph(3, ((0, 1),)))


def test_integer_graph_distances_are_exact():
    d = graph_distances(gen_laakso(3))
    assert d.dtype.kind == "i"


@pytest.mark.parametrize("k,n,size", [(3, 1, 4), (3, 2, 10), (4, 2, 17)])
def test_tree_sizes(k, n, size):
    g = gen_tree(k, n)
    assert g.n == size and g.m == size - 1


def test_tree_root_degree_and_internal_degrees():
    g = gen_tree(3, 4)
    deg = g.degrees()
    depth = tree_depths(3, 4)
    assert deg[0] == 3
    assert np.all(deg[(depth > 0) & (depth < 4)] == 3)
    assert np.all(deg[depth == 4] == 1)


def test_tree_rejects_small_k():
    with pytest.raises(InvalidParameter):
        gen_tree(2, 3)


@pytest.mark.parametrize("k,n", [(3, 2), (3, 3), (3, 5), (4, 2), (4, 4)])
def test_tree_leaf_distances_via_lca_depth(k, n):
    g = gen_tree(k, n)
    d = metric_from_graph(g).dist
    parent = {v: u for u, v, _ in g.edges}
    depth = tree_depths(k, n)

    def ancestors(v):
        out = [v]
        while v in parent:
            v = parent[v]
            out.append(v)
        return out

    leaves = np.flatnonzero(depth == n)[:20]
    for a, b in itertools.combinations(leaves, 2):
        common = set(ancestors(a)) & set(ancestors(b))
        lca_depth = max(depth[c] for c in common)
        assert d[a, b] == 2 * n - 2 * lca_depth


def test_laakso_counts_and_endpoints():
    assert (gen_laakso(0).n, gen_laakso(0).m) == (2, 1)
    g1 = gen_laakso(1)
    assert (g1.n, g1.m) == (6, 6)
    assert metric_from_graph(g1).diameter() == 4
    assert gen_laakso(2).m == 36
    for k in range(4):
        assert graph_distances(gen_laakso(k))[0, 1] == 4 ** k


def test_hypercube_metric():
    assert gen_hypercube(1).dist[0, 1] == 2
    assert gen_hypercube(3).dist[0, 7] == 6
    d2 = gen_hypercube(2).dist
    assert d2[0, 3] == 4 and d2[0, 1] == 2
    with pytest.raises(InvalidParameter):
        gen_hypercube(17)


def test_named_graphs():
    assert (gen_named("heawood").n, girth(gen_named("heawood"))) == (14, 6)
    assert girth(gen_named("tutte_coxeter")) == 8
    assert girth(gen_named("cycle(5)")) == 5
    assert gen_named("torus(3,4)").n == 12
    with pytest.raises(UnknownName):
        gen_named("dodecahedron")


def test_girth_sentinel_and_cycles():
    assert girth(gen_tree(3, 2)) == math.inf
    assert girth(cycle_graph(7)) == 7


@pytest.mark.parametrize("name", ["petersen", "heawood", "cycle(9)", "torus(4,5)"])
def test_girth_matches_brute_force(name):
    g = gen_named(name)
    assert girth(g) == brute_girth(g)


def test_random_regular_properties():
    g = gen_random_regular(10, 3, girth_min=5, seed=1)
    assert g.regular_degree() == 3 and girth(g) >= 5
    assert gen_random_regular(10, 3, girth_min=5, seed=1) == g


def test_random_regular_small_cases():
    k4 = gen_random_regular(4, 3, seed=0)
    assert k4.m == 6
    k33 = gen_random_regular(6, 3, girth_min=4, seed=3)
    assert girth(k33) == 4 and metric_from_graph(k33).diameter() == 2


def test_random_regular_impossible_girth_times_out():
    with pytest.raises(GenerationTimeout):
        gen_random_regular(6, 3, girth_min=6, seed=0, max_attempts=200)


def test_finite_metric_validation():
    with pytest.raises(InvalidMetric):
        FiniteMetric([[0, 1], [2, 0]])
    with pytest.raises(InvalidMetric):
        FiniteMetric([[0, 0], [0, 0]])
    with pytest.raises(InvalidMetric):
        FiniteMetric([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert check_triangle(np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0.0]])) is None


def test_distortion_of_identity_is_one():
    m = metric_from_graph(petersen_graph())
    assert distortion_of_map(m, m).distortion == 1


@pytest.mark.parametrize("n,expected", [(2, math.sqrt(2)), (4, 2.0)])
def test_cube_into_euclidean_distortion(n, expected):
    rep = distortion_of_map(gen_hypercube(n), Embedding(hypercube_points(n).astype(float)))
    assert rep.distortion == pytest.approx(expected, rel=1e-12)


def test_non_injective_map_rejected():
    m = metric_from_graph(cycle_graph(4))
    with pytest.raises(NonInjective):
        distortion_of_map(m, m, [0, 0, 1, 2])


@given(st.integers(3, 40), st.integers(0, 10 ** 6))
def test_distortion_is_scale_free(n, seed):
    pts = np.random.default_rng(seed).normal(size=(n, 3))
    src = FiniteMetric.from_points(pts)
    dst = FiniteMetric.from_points(pts, p=1)
    a = distortion_of_map(src, dst).distortion
    b = distortion_of_map(src.scaled(7.5), dst).distortion
    assert a == pytest.approx(b, rel=1e-12)
    assert 1.0 - 1e-12 <= a <= math.sqrt(3) + 1e-12
