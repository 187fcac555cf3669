"""Diameter-labelled trees (HSTs) and what can be read off them.

An :class:`HstTree` stores an ultrametric as a rooted tree whose leaves are
the points; the distance between two points is the label of their least
common ancestor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidMeasure, InvalidParameter, NotUltrametric, UnknownPoint
from .metric import Embedding, FiniteMetric

ULTRA_RTOL = 1e-9


class HstTree:
    """Rooted tree with strictly decreasing diameter labels.

    Nodes are numbered in depth-first preorder with children visited in
    increasing order of their smallest point, so node 0 is the root and the
    leaves appear in :func:`linear_order`.

    Attributes
    ----------
    parent : int array, ``-1`` at the root
    diameter : float array, 0 at leaves
    children : list of int lists
    point_of : point id of each leaf node, ``-1`` for internal nodes
    leaf_of : leaf node of each point
    depth : edge depth of each node
    """

    def __init__(self, parent, diameter, point_of, validate=True):
        parent = np.asarray(parent, dtype=np.int64)
        diameter = np.asarray(diameter, dtype=np.float64)
        point_of = np.asarray(point_of, dtype=np.int64)
        n_nodes = parent.size
        roots = np.flatnonzero(parent < 0)
        if roots.size != 1:
            raise InvalidParameter(f"expected exactly one root, found {roots.size}")
        children = [[] for _ in range(n_nodes)]
        for v in range(n_nodes):
            if parent[v] >= 0:
                children[parent[v]].append(v)
        leaf_nodes = np.flatnonzero(point_of >= 0)
        n_points = leaf_nodes.size
        leaf_of = np.full(n_points, -1, dtype=np.int64)
        for v in leaf_nodes:
            p = point_of[v]
            if p >= n_points or leaf_of[p] >= 0:
                raise InvalidParameter("leaf points must be a permutation of 0..n-1")
            leaf_of[p] = v
        if validate:
            for v in range(n_nodes):
                if point_of[v] >= 0:
                    if children[v]:
                        raise InvalidParameter(f"leaf node {v} has children")
                    if diameter[v] != 0:
                        raise InvalidParameter(f"leaf node {v} has nonzero diameter")
                else:
                    if len(children[v]) < 2:
                        raise InvalidParameter(f"internal node {v} has fewer than two children")
                if parent[v] >= 0 and not diameter[v] < diameter[parent[v]]:
                    raise InvalidParameter(
                        f"diameter does not decrease from node {parent[v]} to node {v}"
                    )
        self.root = int(roots[0])
        self.parent = parent
        self.diameter = diameter
        self.point_of = point_of
        self.children = children
        self.leaf_of = leaf_of
        self.depth = self._depths()
        self._leaf_order = None

    def _depths(self):
        depth = np.zeros(self.parent.size, dtype=np.int64)
        stack = [self.root]
        while stack:
            v = stack.pop()
            for c in self.children[v]:
                depth[c] = depth[v] + 1
                stack.append(c)
        return depth

    @property
    def n_points(self) -> int:
        return self.leaf_of.size

    @property
    def n_nodes(self) -> int:
        return self.parent.size

    def __repr__(self):
        return f"HstTree(points={self.n_points}, nodes={self.n_nodes}, root_diameter={self.diameter[self.root]:.6g})"

    @classmethod
    def canonical(cls, parent, diameter, point_of) -> "HstTree":
        """Renumber an arbitrary labelled tree into canonical preorder.

        Single-child chains are collapsed onto the deepest node of the chain,
        which keeps the induced distances unchanged.
        """
        parent = np.asarray(parent, dtype=np.int64)
        diameter = np.asarray(diameter, dtype=np.float64)
        point_of = np.asarray(point_of, dtype=np.int64)
        n_nodes = parent.size
        children = [[] for _ in range(n_nodes)]
        root = None
        for v in range(n_nodes):
            if parent[v] < 0:
                root = v
            else:
                children[parent[v]].append(v)
        # collapse chains: a node with one child is replaced by that child
        def resolve(v):
            while point_of[v] < 0 and len(children[v]) == 1:
                v = children[v][0]
            return v

        minpt = np.full(n_nodes, np.iinfo(np.int64).max, dtype=np.int64)
        order = []
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(children[v])
        for v in reversed(order):
            if point_of[v] >= 0:
                minpt[v] = point_of[v]
            for c in children[v]:
                minpt[v] = min(minpt[v], minpt[c])

        new_parent, new_diam, new_point = [], [], []
        stack = [(resolve(root), -1)]
        while stack:
            v, p = stack.pop()
            idx = len(new_parent)
            new_parent.append(p)
            new_diam.append(diameter[v] if point_of[v] < 0 else 0.0)
            new_point.append(point_of[v])
            kids = sorted((resolve(c) for c in children[v]), key=lambda c: minpt[c])
            for c in reversed(kids):
                stack.append((c, idx))
        return cls(new_parent, new_diam, new_point)

    def lca_naive(self, u: int, v: int) -> int:
        """Least common ancestor of two nodes by walking parent pointers."""
        du, dv = self.depth[u], self.depth[v]
        while du > dv:
            u = self.parent[u]
            du -= 1
        while dv > du:
            v = self.parent[v]
            dv -= 1
        while u != v:
            u = self.parent[u]
            v = self.parent[v]
        return int(u)

    def leaf_ranges(self):
        """``(lo, hi)`` half-open range of each node's leaves in DFS leaf order."""
        order = self.leaf_order_nodes()
        pos = np.empty(self.n_nodes, dtype=np.int64)
        pos[order] = np.arange(order.size)
        lo = np.zeros(self.n_nodes, dtype=np.int64)
        hi = np.zeros(self.n_nodes, dtype=np.int64)
        for v in np.argsort(-self.depth, kind="stable"):
            if self.point_of[v] >= 0:
                lo[v] = pos[v]
                hi[v] = pos[v] + 1
            else:
                kids = self.children[v]
                lo[v] = min(lo[c] for c in kids)
                hi[v] = max(hi[c] for c in kids)
        return lo, hi

    def leaf_order_nodes(self) -> np.ndarray:
        if self._leaf_order is None:
            out = []
            stack = [self.root]
            while stack:
                v = stack.pop()
                if self.point_of[v] >= 0:
                    out.append(v)
                stack.extend(reversed(self.children[v]))
            self._leaf_order = np.array(out, dtype=np.int64)
        return self._leaf_order

    def to_metric(self) -> FiniteMetric:
        """The induced ultrametric as a distance matrix."""
        n = self.n_points
        order = self.leaf_order_nodes()
        pts = self.point_of[order]
        lo, hi = self.leaf_ranges()
        d = np.zeros((n, n))
        # shallow nodes first so deeper labels overwrite their blocks
        for v in np.argsort(self.depth, kind="stable"):
            if self.point_of[v] < 0:
                d[lo[v]:hi[v], lo[v]:hi[v]] = self.diameter[v]
        np.fill_diagonal(d, 0.0)
        out = np.empty_like(d)
        out[np.ix_(pts, pts)] = d
        return FiniteMetric(out, validate=False)


def check_ultrametric(dist: np.ndarray, rtol: float = ULTRA_RTOL):
    """Return a triple ``(x, y, z)`` with d(x,y) > max(d(x,z), d(z,y)) + tol, or None."""
    n = dist.shape[0]
    if n < 3:
        return None
    tol = rtol * float(dist.max())
    for z in range(n):
        bound = np.maximum(dist[:, z, None], dist[None, z, :])
        bad = dist > bound + tol
        if bad.any():
            x, y = np.argwhere(bad)[0]
            return int(x), int(y), z
    return None


def hst_from_ultrametric(m: FiniteMetric) -> HstTree:
    """Build the equivalence-class tree of an ultrametric.

    A set A of diameter delta splits into the classes of the relation
    d(x, y) < delta; recursing on every class yields the tree.
    """
    d = m.dist
    bad = check_ultrametric(d)
    if bad is not None:
        x, y, z = bad
        raise NotUltrametric(
            f"d({x},{y}) = {d[x, y]:.6g} exceeds max(d({x},{z}), d({z},{y})) = "
            f"{max(d[x, z], d[z, y]):.6g}",
            triple=bad,
        )
    n = m.n
    tol = ULTRA_RTOL * (float(d.max()) if n > 1 else 0.0)
    parent, diam, point_of = [], [], []
    stack = [(np.arange(n), -1)]
    while stack:
        members, par = stack.pop()
        idx = len(parent)
        parent.append(par)
        if members.size == 1:
            diam.append(0.0)
            point_of.append(int(members[0]))
            continue
        sub = d[np.ix_(members, members)]
        delta = float(sub.max())
        diam.append(delta)
        point_of.append(-1)
        unassigned = np.ones(members.size, dtype=bool)
        classes = []
        while unassigned.any():
            first = int(np.argmax(unassigned))
            cls = unassigned & (sub[first] < delta - tol)
            cls[first] = True
            unassigned &= ~cls
            classes.append(members[cls])
        for c in reversed(classes):
            stack.append((c, idx))
    return HstTree(parent, diam, point_of)


def ultra_distance(t: HstTree, x: int, y: int) -> float:
    """Label of the least common ancestor of points x and y."""
    n = t.n_points
    for p in (x, y):
        if not 0 <= p < n:
            raise UnknownPoint(f"point {p} not in tree with {n} points")
    if x == y:
        return 0.0
    return float(t.diameter[t.lca_naive(t.leaf_of[x], t.leaf_of[y])])


def hilbert_embed(t: HstTree) -> Embedding:
    """Isometric embedding of the tree's ultrametric into a Euclidean sphere.

    Every non-root node v owns one coordinate carrying
    sqrt((diam(parent)^2 - diam(v)^2) / 2); a point's image sums the
    coordinates along its root path. All images have norm diam(root)/sqrt(2).
    """
    n_nodes = t.n_nodes
    dim = max(n_nodes - 1, 1)
    weight = np.zeros(n_nodes)
    nonroot = t.parent >= 0
    weight[nonroot] = np.sqrt(
        (t.diameter[t.parent[nonroot]] ** 2 - t.diameter[nonroot] ** 2) / 2.0
    )
    coord = np.cumsum(nonroot) - 1  # node -> coordinate index
    images = np.zeros((t.n_points, dim))
    for x in range(t.n_points):
        v = t.leaf_of[x]
        while t.parent[v] >= 0:
            images[x, coord[v]] = weight[v]
            v = t.parent[v]
    return Embedding(images)


def linear_order(t: HstTree) -> np.ndarray:
    """Points in DFS leaf order.

    For x before y, the largest distance inside the order interval [x, y]
    equals d(x, y).
    """
    return t.point_of[t.leaf_order_nodes()].copy()


def hilbert_curve(s, order: int = 16) -> np.ndarray:
    """Points of the order-``order`` Hilbert curve on the unit square.

    The parameter range [0, 1] is cut into 4**order cells; cell vertices are
    scaled so the curve starts at (0, 0) and ends at (1, 0).
    """
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    side = 1 << order
    cells = side * side
    d = np.minimum(np.floor(s * cells).astype(np.int64), cells - 1)
    d = np.maximum(d, 0)
    x = np.zeros_like(d)
    y = np.zeros_like(d)
    t = d.copy()
    step = 1
    while step < side:
        rx = 1 & (t // 2)
        ry = 1 & (t ^ rx)
        # rotate quadrant
        flip = (ry == 0) & (rx == 1)
        x = np.where(flip, step - 1 - x, x)
        y = np.where(flip, step - 1 - y, y)
        swap = ry == 0
        x, y = np.where(swap, y, x), np.where(swap, x, y)
        x = x + step * rx
        y = y + step * ry
        t //= 4
        step *= 2
    return np.stack([x, y], axis=1) / (side - 1)


@dataclass(frozen=True)
class HolderSurjection:
    """Result of :func:`holder_surjection`."""

    order: np.ndarray  # points in linear order
    phi: np.ndarray  # cumulative measure per point
    images: np.ndarray  # per-point image in [0,1]^2
    constant: float  # K with mu(A) <= K diam(A)^2 over internal nodes


def holder_surjection(t: HstTree, mu, target_dim: int = 2, curve_order: int = 16) -> HolderSurjection:
    """Compose the cumulative-measure map along :func:`linear_order` with a Hilbert curve.

    ``phi(x)`` is the mass strictly before x. Since every order interval sits
    inside the subtree of its endpoints' ancestor, |phi(x) - phi(y)| is at most
    K * d(x, y)^2 with K the largest mass-to-squared-diameter ratio of an
    internal node.
    """
    if target_dim != 2:
        raise InvalidParameter("only the planar Hilbert curve is provided (target_dim=2)")
    mu = np.asarray(mu, dtype=np.float64)
    if mu.shape != (t.n_points,) or np.any(mu < 0) or abs(mu.sum() - 1.0) > 1e-12:
        raise InvalidMeasure("mu must be a probability vector with one weight per point")
    order = linear_order(t)
    cum = np.concatenate([[0.0], np.cumsum(mu[order])[:-1]])
    phi = np.empty(t.n_points)
    phi[order] = cum
    lo, hi = t.leaf_ranges()
    mass_prefix = np.concatenate([[0.0], np.cumsum(mu[order])])
    K = 0.0
    for v in range(t.n_nodes):
        if t.point_of[v] < 0:
            mass = mass_prefix[hi[v]] - mass_prefix[lo[v]]
            K = max(K, mass / t.diameter[v] ** 2)
    return HolderSurjection(order, phi, hilbert_curve(phi, curve_order), K)


def random_hst(n: int, seed: int = 0, max_children: int = 4) -> HstTree:
    """Random HST over n points, for tests and benchmarks.

    Points are split recursively into 2..max_children random groups; labels
    shrink by a random factor in [0.2, 0.9] per level.
    """
    rng = np.random.default_rng(seed)
    parent, diam, point_of = [], [], []
    stack = [(rng.permutation(n), -1, 1.0)]
    while stack:
        members, par, label = stack.pop()
        idx = len(parent)
        parent.append(par)
        if members.size == 1:
            diam.append(0.0)
            point_of.append(int(members[0]))
            continue
        diam.append(label)
        point_of.append(-1)
        k = int(rng.integers(2, min(max_children, members.size) + 1))
        cuts = np.sort(rng.choice(np.arange(1, members.size), size=k - 1, replace=False))
        for part in np.split(members, cuts):
            stack.append((part, idx, label * rng.uniform(0.2, 0.9)))
    return HstTree.canonical(parent, diam, point_of)
