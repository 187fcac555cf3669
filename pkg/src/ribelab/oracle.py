"""Constant-time approximate distance oracle and approximate ranking.

Skeletons are peeled off repeatedly: level k holds the padded set S_k of the
remaining points R_k together with an HST over R_k. A query (i, j) looks at
level min(level_of[i], level_of[j]), where both points are still present and
one of them is padded, and returns the label of their least common ancestor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import IndexOutOfRange, UnknownPoint
from .metric import FiniteMetric
from .ramsey import certified_distortion, extend_ultrametric, extract_skeleton, star_ultrametric
from .ultrametric import HstTree

RESEED_OFFSET = 0x9E3779B9


class LcaIndex:
    """Euler tour plus sparse-table range minimum over node depths.

    ``lca(u, v)`` reads eight array cells regardless of tree size. Set
    ``instrument = True`` to accumulate the read count in ``probes``.
    """

    def __init__(self, tree: HstTree):
        euler, first = [], [0] * tree.n_nodes
        depth = tree.depth
        stack = [(tree.root, 0)]
        while stack:
            v, i = stack.pop()
            if i == 0:
                first[v] = len(euler)
            euler.append(v)
            kids = tree.children[v]
            if i < len(kids):
                stack.append((v, i + 1))
                stack.append((kids[i], 0))
        euler = np.asarray(euler, dtype=np.int64)
        tour_depth = depth[euler]
        size = euler.size
        levels = [np.arange(size, dtype=np.int64)]
        span = 1
        while 2 * span <= size:
            prev = levels[-1]
            left = prev[: size - 2 * span + 1]
            right = prev[span: span + left.size]
            levels.append(np.where(tour_depth[left] <= tour_depth[right], left, right))
            span *= 2
        log = np.zeros(size + 1, dtype=np.int64)
        log[2:] = np.floor(np.log2(np.arange(2, size + 1))).astype(np.int64)

        self.euler = euler
        self.first = np.asarray(first, dtype=np.int64)
        self.tour_depth = tour_depth
        self.table = levels
        self.log = log
        # plain lists make scalar queries cheap
        self._euler = euler.tolist()
        self._first = first
        self._depth = tour_depth.tolist()
        self._table = [lv.tolist() for lv in levels]
        self._log = log.tolist()
        self.instrument = False
        self.probes = 0

    @property
    def size(self) -> int:
        """Stored integers."""
        return int(self.euler.size * 2 + self.first.size + self.log.size + sum(t.size for t in self.table))

    def lca(self, u: int, v: int) -> int:
        first = self._first
        lo = first[u]
        hi = first[v]
        if lo > hi:
            lo, hi = hi, lo
        j = self._log[hi - lo + 1]
        row = self._table[j]
        a = row[lo]
        b = row[hi - (1 << j) + 1]
        depth = self._depth
        if depth[a] <= depth[b]:
            node = self._euler[a]
        else:
            node = self._euler[b]
        if self.instrument:
            self.probes += 8
        return node

    def lca_many(self, u, v) -> np.ndarray:
        """Vectorised :meth:`lca` over arrays of node ids."""
        a = self.first[np.asarray(u)]
        b = self.first[np.asarray(v)]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        j = self.log[hi - lo + 1]
        out = np.empty(lo.shape, dtype=np.int64)
        for level in np.unique(j):
            sel = j == level
            row = self.table[level]
            x = row[lo[sel]]
            y = row[hi[sel] - (1 << level) + 1]
            out[sel] = np.where(self.tour_depth[x] <= self.tour_depth[y], self.euler[x], self.euler[y])
        return out


def build_lca(tree: HstTree) -> LcaIndex:
    return LcaIndex(tree)


@dataclass
class OracleLevel:
    subset: np.ndarray  # S_k, global ids
    points: np.ndarray  # R_k, global ids, sorted; tree point p is points[p]
    tree: HstTree
    lca: LcaIndex
    seed: int


class OracleStructure:
    """Array of per-level HSTs with LCA tables; see :func:`build_oracle`."""

    def __init__(self, n, levels, epsilon, seed):
        self.n = n
        self.levels = levels
        self.epsilon = epsilon
        self.seed = seed
        self.certified_distortion = certified_distortion(epsilon)
        level_of = np.full(n, -1, dtype=np.int64)
        leaf = np.full((len(levels), n), -1, dtype=np.int64)
        for k, lv in enumerate(levels):
            level_of[lv.subset] = k
            leaf[k, lv.points] = lv.tree.leaf_of
        self.level_of = level_of
        self.leaf_node = leaf
        self._level_of = level_of.tolist()
        self._leaf = [row.tolist() for row in leaf]
        self._diam = [lv.tree.diameter.tolist() for lv in levels]

    @property
    def m(self) -> int:
        return len(self.levels)

    def size(self) -> int:
        """Stored scalars across all levels (trees, LCA tables, level map)."""
        total = self.n
        for lv in self.levels:
            total += lv.lca.size + 3 * lv.tree.n_nodes + lv.points.size
        return total

    def query(self, i: int, j: int) -> float:
        return query_distance(self, i, j)

    def query_many(self, i, j) -> np.ndarray:
        """Vectorised :meth:`query`; entries with i == j are 0."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        if i.size and (min(i.min(), j.min()) < 0 or max(i.max(), j.max()) >= self.n):
            raise UnknownPoint("query point out of range")
        k = np.minimum(self.level_of[i], self.level_of[j])
        out = np.zeros(i.shape, dtype=np.float64)
        for level in np.unique(k):
            sel = (k == level) & (i != j)
            if not sel.any():
                continue
            lv = self.levels[level]
            u = self.leaf_node[level, i[sel]]
            v = self.leaf_node[level, j[sel]]
            out[sel] = lv.tree.diameter[lv.lca.lca_many(u, v)]
        return out

    def distance_matrix(self) -> np.ndarray:
        ii, jj = np.meshgrid(np.arange(self.n), np.arange(self.n), indexing="ij")
        return self.query_many(ii.ravel(), jj.ravel()).reshape(self.n, self.n)


def build_oracle(m: FiniteMetric, epsilon: float, seed: int = 0) -> OracleStructure:
    """Peel skeletons off ``m`` until every point has a level."""
    remaining = np.arange(m.n)
    levels = []
    k = 0
    while remaining.size:
        sub = m.submetric(remaining)
        level_seed = seed + k
        res = extract_skeleton(sub, epsilon, level_seed)
        if res.size == 0:
            level_seed = seed + k + RESEED_OFFSET
            res = extract_skeleton(sub, epsilon, level_seed)
        if res.size == 0:
            subset_local = np.array([0])
            tree = star_ultrametric(sub, 0)
        else:
            subset_local = res.subset
            tree = res.tree
        levels.append(OracleLevel(remaining[subset_local], remaining, tree, LcaIndex(tree), level_seed))
        keep = np.ones(remaining.size, dtype=bool)
        keep[subset_local] = False
        remaining = remaining[keep]
        k += 1
    return OracleStructure(m.n, levels, epsilon, seed)


def query_distance(o: OracleStructure, i: int, j: int) -> float:
    """Approximate distance E(i, j) with d <= E <= (128/epsilon) d."""
    n = o.n
    if not (0 <= i < n and 0 <= j < n):
        raise UnknownPoint(f"query ({i}, {j}) outside 0..{n - 1}")
    if i == j:
        return 0.0
    level_of = o._level_of
    a = level_of[i]
    b = level_of[j]
    k = a if a < b else b
    leaf = o._leaf[k]
    node = o.levels[k].lca.lca(leaf[i], leaf[j])
    return o._diam[k][node]


QUERY_PROBES = 13  # level_of x2, leaf x2, lca 8, label 1


class RankingStructure:
    """Per-point orderings of all points by an extended ultrametric."""

    def __init__(self, order, certified_factor):
        order = np.asarray(order, dtype=np.int64)
        n = order.shape[0]
        inverse = np.empty_like(order)
        rows = np.arange(n)[:, None]
        inverse[rows, order] = np.arange(n)[None, :]
        self.order = order
        self.inverse = inverse
        self.certified_factor = certified_factor
        self.n = n

    def rank(self, x: int, i: int) -> int:
        return rank_query(self, x, i)

    def position(self, x: int, u: int) -> int:
        return rank_inverse(self, x, u)


def build_ranking(o: OracleStructure, m: FiniteMetric) -> RankingStructure:
    """Order every point's view of the space by the extended level ultrametric.

    For x in S_k the level-k ultrametric is extended from R_k to all points;
    on pairs containing x it satisfies d/3 <= rho <= 2*D*d, so the ordering is
    monotone in d up to the factor 6*D.
    """
    D = o.certified_distortion
    n = m.n
    order = np.empty((n, n), dtype=np.int64)
    ids = np.arange(n)
    for lv in o.levels:
        rho_local = lv.tree.to_metric()
        rho = extend_ultrametric(m, lv.points, rho_local, D, strict=False).dist
        for x in lv.subset:
            order[x] = np.lexsort((ids, rho[x]))
    return RankingStructure(order, 6.0 * D)


def rank_query(r: RankingStructure, x: int, i: int) -> int:
    """The point at 1-based position i in x's ordering."""
    if not 0 <= x < r.n:
        raise UnknownPoint(f"point {x} outside 0..{r.n - 1}")
    if not 1 <= i <= r.n:
        raise IndexOutOfRange(f"rank {i} outside 1..{r.n}")
    return int(r.order[x, i - 1])


def rank_inverse(r: RankingStructure, x: int, u: int) -> int:
    """1-based position of point u in x's ordering."""
    if not (0 <= x < r.n and 0 <= u < r.n):
        raise UnknownPoint(f"point ({x}, {u}) outside 0..{r.n - 1}")
    return int(r.inverse[x, u]) + 1
