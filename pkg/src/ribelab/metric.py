"""Finite metric spaces, graphs, example-space generators and map distortion."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial.distance import pdist, squareform

from .exceptions import (
    DisconnectedGraph,
    GenerationTimeout,
    InvalidMetric,
    InvalidParameter,
    NonInjective,
    UnknownName,
)

TRIANGLE_RTOL = 1e-9
INF_GIRTH = math.inf


def check_triangle(dist: np.ndarray, rtol: float = TRIANGLE_RTOL):
    """Return a violating triple ``(i, j, k)`` or None.

    Checks d(i,k) <= d(i,j) + d(j,k) + rtol * max(d) by a min-plus sweep over
    the middle point, O(n^3) work in O(n^2) memory.
    """
    n = dist.shape[0]
    if n < 3:
        return None
    tol = rtol * float(dist.max())
    for j in range(n):
        via = dist[:, j, None] + dist[None, j, :]
        bad = dist > via + tol
        if bad.any():
            i, k = np.argwhere(bad)[0]
            return int(i), j, int(k)
    return None


class FiniteMetric:
    """Distance matrix over points ``0..n-1``.

    The full symmetric ``n x n`` array is stored; :meth:`condensed` gives the
    upper-triangular row-major vector used by the metric file format.
    """

    __slots__ = ("dist", "n")

    def __init__(self, dist, validate: bool = True, check_triangle_inequality: bool = True):
        d = np.array(dist, dtype=np.float64)
        if d.ndim == 1:
            d = squareform(d, checks=False)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InvalidMetric(f"distance matrix must be square, got shape {d.shape}")
        if validate:
            _validate_metric(d, check_triangle_inequality)
        d.setflags(write=False)
        self.dist = d
        self.n = d.shape[0]

    @classmethod
    def from_points(cls, points, p: float = 2.0) -> "FiniteMetric":
        """lp metric on the rows of ``points``."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[0] == 1:
            return cls(np.zeros((1, 1)), validate=False)
        metric = "cityblock" if p == 1 else ("chebyshev" if np.isinf(p) else "minkowski")
        kw = {"p": p} if metric == "minkowski" else {}
        d = squareform(pdist(pts, metric=metric, **kw))
        m = cls(d, validate=False)
        _validate_metric(m.dist, check_triangle_inequality=False)
        return m

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"FiniteMetric(n={self.n}, diameter={self.diameter():.6g})"

    def __eq__(self, other):
        return isinstance(other, FiniteMetric) and np.array_equal(self.dist, other.dist)

    def __hash__(self):
        return hash(self.dist.tobytes())

    def condensed(self) -> np.ndarray:
        return squareform(self.dist, checks=False)

    def diameter(self) -> float:
        return float(self.dist.max()) if self.n > 1 else 0.0

    def min_distance(self) -> float:
        if self.n < 2:
            return 0.0
        return float(self.condensed().min())

    def submetric(self, points) -> "FiniteMetric":
        idx = np.asarray(points, dtype=np.intp)
        return FiniteMetric(self.dist[np.ix_(idx, idx)], validate=False)

    def scaled(self, factor: float) -> "FiniteMetric":
        return FiniteMetric(self.dist * factor, validate=False)


def _validate_metric(d: np.ndarray, check_triangle_inequality: bool = True):
    if not np.all(np.isfinite(d)):
        raise InvalidMetric("distances must be finite")
    if np.any(np.diag(d) != 0):
        raise InvalidMetric("diagonal entries must be zero")
    if not np.array_equal(d, d.T):
        i, j = np.argwhere(d != d.T)[0]
        raise InvalidMetric(f"asymmetric distances at ({i}, {j})")
    off = ~np.eye(d.shape[0], dtype=bool)
    if np.any(d[off] <= 0):
        i, j = np.argwhere((d <= 0) & off)[0]
        raise InvalidMetric(f"non-positive distance between distinct points {i} and {j}")
    if check_triangle_inequality:
        bad = check_triangle(d)
        if bad is not None:
            i, j, k = bad
            raise InvalidMetric(
                f"triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})"
            )


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices ``0..n-1`` with positive edge weights."""

    n: int
    edges: tuple = field(default=())

    def __post_init__(self):
        norm = []
        seen = set()
        for e in self.edges:
            if len(e) == 2:
                u, v = e
                w = 1
            else:
                u, v, w = e
            u, v = int(u), int(v)
            if u == v:
                raise InvalidParameter(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidParameter(f"edge ({u}, {v}) out of range for n={self.n}")
            if w <= 0:
                raise InvalidParameter(f"edge ({u}, {v}) has non-positive weight {w}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidParameter(f"duplicate edge {key}")
            seen.add(key)
            norm.append((u, v, w))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def weighted(self) -> bool:
        return any(w != 1 for _, _, w in self.edges)

    def adjacency(self, weighted: bool = False) -> np.ndarray:
        """Dense adjacency matrix (int64 0/1 unless ``weighted``)."""
        if weighted:
            a = np.zeros((self.n, self.n), dtype=np.float64)
        else:
            a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v, w in self.edges:
            val = w if weighted else 1
            a[u, v] = val
            a[v, u] = val
        return a

    def sparse_adjacency(self, weighted: bool = True) -> csr_matrix:
        if not self.edges:
            return csr_matrix((self.n, self.n))
        u, v, w = (np.array(x) for x in zip(*self.edges))
        w = w.astype(np.float64) if weighted else np.ones(len(u))
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        return csr_matrix((np.concatenate([w, w]), (rows, cols)), shape=(self.n, self.n))

    def neighbors(self) -> list[list[int]]:
        nb = [[] for _ in range(self.n)]
        for u, v, _ in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return nb

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def regular_degree(self):
        """Common degree if the graph is regular, else None."""
        deg = self.degrees()
        if self.n == 0 or np.any(deg != deg[0]):
            return None
        return int(deg[0])

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        return len(_bfs_distances(self.neighbors(), 0)) == self.n


def _bfs_distances(nb, source):
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in nb[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def graph_distances(g: Graph) -> np.ndarray:
    """All-pairs shortest path lengths; integer dtype for unit-weight graphs."""
    if g.n == 1:
        return np.zeros((1, 1), dtype=np.int64)
    weighted = g.weighted
    sp = shortest_path(g.sparse_adjacency(weighted=weighted), directed=False, unweighted=not weighted)
    if np.isinf(sp).any():
        i, j = np.argwhere(np.isinf(sp))[0]
        raise DisconnectedGraph(f"vertices {i} and {j} are not connected")
    integral = all(float(w).is_integer() for _, _, w in g.edges)
    if integral:
        return np.rint(sp).astype(np.int64)
    return sp


def metric_from_graph(g: Graph) -> FiniteMetric:
    """Shortest-path metric of a connected graph."""
    return FiniteMetric(graph_distances(g).astype(np.float64), validate=False)


# -- generators ---------------------------------------------------------------


def gen_tree(k: int, n: int) -> Graph:
    """Complete k-regular tree of depth n.

    Vertex 0 is the root with k children; every other internal vertex has
    k - 1 children. Vertices are numbered in breadth-first order.
    """
    if k < 3:
        raise InvalidParameter(f"branching k must be >= 3, got {k}")
    if n < 1:
        raise InvalidParameter(f"depth n must be >= 1, got {n}")
    edges = []
    frontier = [0]
    nxt = 1
    for depth in range(n):
        new_frontier = []
        for u in frontier:
            for _ in range(k if depth == 0 else k - 1):
                edges.append((u, nxt))
                new_frontier.append(nxt)
                nxt += 1
        frontier = new_frontier
    return Graph(nxt, tuple(edges))


def tree_depths(k: int, n: int) -> np.ndarray:
    """Depth of each vertex of :func:`gen_tree` ``(k, n)``."""
    sizes = [1] + [k * (k - 1) ** (d - 1) for d in range(1, n + 1)]
    return np.repeat(np.arange(n + 1), sizes)


def gen_laakso(k: int) -> Graph:
    """Laakso graph G_k; vertex 0 is the left end and vertex 1 the right end.

    Each edge u-v of G_{k-1} becomes u-a, a-b1, a-b2, b1-c, b2-c, c-v with the
    four new vertices numbered a, b1, b2, c in construction order.
    """
    if k < 0:
        raise InvalidParameter(f"iteration count must be >= 0, got {k}")
    n = 2
    edges = [(0, 1)]
    for _ in range(k):
        new_edges = []
        for u, v in edges:
            a, b1, b2, c = n, n + 1, n + 2, n + 3
            n += 4
            new_edges += [(u, a), (a, b1), (a, b2), (b1, c), (b2, c), (c, v)]
        edges = new_edges
    return Graph(n, tuple(edges))


MAX_CUBE_DIM = 16


def hypercube_points(n: int) -> np.ndarray:
    """Rows are the sign vectors of {-1,1}^n; bit b of the row index is set iff coordinate b is -1."""
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> np.arange(n)[None, :]) & 1
    return 1 - 2 * bits


def gen_hypercube(n: int) -> FiniteMetric:
    """l1 metric on {-1,1}^n, i.e. twice the Hamming distance."""
    if not 1 <= n <= MAX_CUBE_DIM:
        raise InvalidParameter(f"cube dimension must be in [1, {MAX_CUBE_DIM}], got {n}")
    idx = np.arange(1 << n, dtype=np.int64)
    x = idx[:, None] ^ idx[None, :]
    ham = np.zeros_like(x)
    for b in range(n):
        ham += (x >> b) & 1
    return FiniteMetric(2.0 * ham, validate=False)


def hypercube_graph(n: int) -> Graph:
    edges = [(i, i ^ (1 << b)) for i in range(1 << n) for b in range(n) if i < i ^ (1 << b)]
    return Graph(1 << n, tuple(edges))


def cycle_graph(m: int) -> Graph:
    if m < 3:
        raise InvalidParameter(f"cycle length must be >= 3, got {m}")
    return Graph(m, tuple((i, (i + 1) % m) for i in range(m)))


def torus_graph(m: int, n: int) -> Graph:
    """Cartesian product C_m x C_n."""
    if m < 3 or n < 3:
        raise InvalidParameter("torus side lengths must be >= 3")
    vid = lambda i, j: i * n + j  # noqa: E731
    edges = []
    for i in range(m):
        for j in range(n):
            edges.append((vid(i, j), vid((i + 1) % m, j)))
            edges.append((vid(i, j), vid(i, (j + 1) % n)))
    return Graph(m * n, tuple(edges))


def lcf_graph(n: int, shifts: Sequence[int], repeats: int) -> Graph:
    """Hamiltonian graph from LCF notation ``shifts^repeats``."""
    edges = {(min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)}
    pattern = list(shifts) * repeats
    for i, s in enumerate(pattern):
        j = (i + s) % n
        edges.add((min(i, j), max(i, j)))
    return Graph(n, tuple(sorted(edges)))


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, tuple(outer + spokes + inner))


def gen_named(name: str, *args) -> Graph:
    """Named fixture graphs.

    Accepts ``"petersen"``, ``"heawood"``, ``"tutte_coxeter"``, and the
    parametrized families ``"cycle(m)"`` / ``"torus(m,n)"`` (either as one
    string or as ``gen_named("cycle", 7)``).
    """
    key = name.strip().lower()
    if "(" in key:
        if not key.endswith(")"):
            raise UnknownName(name)
        key, rest = key[:-1].split("(", 1)
        try:
            args = tuple(int(a) for a in rest.split(",") if a.strip())
        except ValueError:
            raise UnknownName(name) from None
    if key == "petersen" and not args:
        return petersen_graph()
    if key == "heawood" and not args:
        return lcf_graph(14, [5, -5], 7)
    if key in ("tutte_coxeter", "tutte-coxeter") and not args:
        return lcf_graph(30, [-13, -9, 7, -7, 9, 13], 5)
    if key == "cycle" and len(args) == 1:
        return cycle_graph(int(args[0]))
    if key == "torus" and len(args) == 2:
        return torus_graph(int(args[0]), int(args[1]))
    raise UnknownName(name)


def girth(g: Graph) -> float:
    """Length of the shortest cycle, or ``math.inf`` for a forest.

    One BFS per root; a non-tree edge (u, w) closes a walk of length
    dist(u) + dist(w) + 1, and the minimum over all roots is the girth.
    """
    nb = g.neighbors()
    best = INF_GIRTH
    for root in range(g.n):
        dist = [-1] * g.n
        parent = [-1] * g.n
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best:
                break
            for w in nb[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def gen_random_regular(
    n: int,
    k: int,
    girth_min: int = 3,
    seed: int = 0,
    max_attempts: int = 100_000,
) -> Graph:
    """Seeded configuration-model sample of a simple k-regular graph with girth >= girth_min.

    Pairings with a loop or multi-edge are rejected as soon as the defect
    appears, which leaves the accepted distribution equal to full rejection.
    """
    if k < 3:
        raise InvalidParameter(f"degree must be >= 3, got {k}")
    if (n * k) % 2 or n <= k:
        raise InvalidParameter(f"no simple {k}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), k)
    for _ in range(max_attempts):
        perm = stubs[rng.permutation(stubs.size)]
        pairs = perm.reshape(-1, 2)
        ok = True
        seen = set()
        for u, v in pairs:
            u, v = int(u), int(v)
            key = (u, v) if u < v else (v, u)
            if u == v or key in seen:
                ok = False
                break
            seen.add(key)
        if not ok:
            continue
        g = Graph(n, tuple(sorted(seen)))
        if girth_min <= 3 or girth(g) >= girth_min:
            return g
    raise GenerationTimeout(
        f"no simple {k}-regular graph on {n} vertices with girth >= {girth_min} "
        f"after {max_attempts} attempts"
    )


def random_point_metric(n: int, dim: int, seed: int = 0) -> FiniteMetric:
    """Euclidean metric of n uniform points in [0,1]^dim."""
    rng = np.random.default_rng(seed)
    return FiniteMetric.from_points(rng.random((n, dim)))


def random_graph_metric(n: int, p: float = None, seed: int = 0, max_weight: int = 10) -> FiniteMetric:
    """Shortest-path metric of a connected Erdos-Renyi graph with integer weights.

    A random spanning path guarantees connectivity.
    """
    rng = np.random.default_rng(seed)
    if p is None:
        p = min(1.0, 4.0 * math.log(max(n, 2)) / max(n, 2))
    order = rng.permutation(n)
    edges = {}
    for a, b in zip(order[:-1], order[1:]):
        edges[(min(a, b), max(a, b))] = int(rng.integers(1, max_weight + 1))
    iu, ju = np.triu_indices(n, 1)
    mask = rng.random(iu.size) < p
    for a, b in zip(iu[mask], ju[mask]):
        edges.setdefault((int(a), int(b)), int(rng.integers(1, max_weight + 1)))
    g = Graph(n, tuple((a, b, w) for (a, b), w in sorted(edges.items())))
    return metric_from_graph(g)


# -- embeddings and distortion -------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    """One image vector per domain point, compared in the lp norm."""

    images: np.ndarray
    p: float = 2.0

    def __post_init__(self):
        imgs = np.asarray(self.images, dtype=np.float64)
        if imgs.ndim == 1:
            imgs = imgs[:, None]
        object.__setattr__(self, "images", imgs)

    @property
    def n(self) -> int:
        return self.images.shape[0]

    @property
    def dim(self) -> int:
        return self.images.shape[1]

    def distances(self) -> np.ndarray:
        if self.n == 1:
            return np.zeros((1, 1))
        if self.p == 2:
            return squareform(pdist(self.images))
        return squareform(pdist(self.images, metric="minkowski", p=self.p))


@dataclass(frozen=True)
class DistortionReport:
    expansion: float
    contraction: float
    distortion: float

    def __iter__(self):
        return iter((self.expansion, self.contraction, self.distortion))


def distortion_of_map(src: FiniteMetric, dst, f: Iterable[int] | None = None) -> DistortionReport:
    """Expansion, contraction and distortion of a map between finite metrics.

    ``dst`` is a :class:`FiniteMetric` (with ``f`` the point map, identity by
    default) or an :class:`Embedding` / array of image vectors, one per source
    point.
    """
    if isinstance(dst, FiniteMetric):
        fmap = np.arange(src.n) if f is None else np.asarray(list(f), dtype=np.intp)
        if fmap.shape != (src.n,):
            raise InvalidParameter("point map must have one image per source point")
        image_d = dst.dist[np.ix_(fmap, fmap)]
    else:
        emb = dst if isinstance(dst, Embedding) else Embedding(np.asarray(dst))
        if emb.n != src.n:
            raise InvalidParameter("embedding must have one image per source point")
        image_d = emb.distances()
    if src.n < 2:
        return DistortionReport(1.0, 1.0, 1.0)
    iu = np.triu_indices(src.n, 1)
    ds = src.dist[iu]
    dd = image_d[iu]
    if np.any(dd <= 0):
        k = int(np.argmax(dd <= 0))
        raise NonInjective(f"points {iu[0][k]} and {iu[1][k]} share an image")
    expansion = float(np.max(dd / ds))
    contraction = float(np.max(ds / dd))
    return DistortionReport(expansion, contraction, expansion * contraction)
