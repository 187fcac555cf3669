"""Ultrametric skeletons of finite metrics and the approximate-ultrametric extension.

:func:`extract_skeleton` runs a hierarchical random partition at scales
``diam * 8**-l``. Every cluster at scale l has diameter at most that scale,
so the tree of clusters dominates the metric. A point whose ball of radius
``(epsilon/16) * scale`` stays inside its own cluster at every scale is
*padded*; for a padded x and any y first separated at scale l we get
d(x, y) > (epsilon/16) * Delta_l while rho(x, y) = Delta_{l-1} = 8 * Delta_l,
hence rho <= (128/epsilon) * d on every pair touching the padded set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidParameter, PreconditionViolated
from .metric import FiniteMetric
from .ultrametric import HstTree, check_ultrametric

SCALE_RATIO = 8.0
PAD_DIVISOR = 16.0
TOL = 1e-9


def certified_distortion(epsilon: float) -> float:
    return SCALE_RATIO * PAD_DIVISOR / epsilon


@dataclass(frozen=True)
class SkeletonResult:
    subset: np.ndarray
    tree: HstTree
    certified_distortion: float
    epsilon: float
    seed: int
    scales: tuple = field(default=())

    @property
    def size(self) -> int:
        return int(self.subset.size)

    def measured_distortion(self, m: FiniteMetric) -> float:
        """Largest rho/d over pairs with at least one endpoint in the subset."""
        if self.subset.size == 0 or m.n < 2:
            return 1.0
        rho = self.tree.to_metric().dist[self.subset]
        d = m.dist[self.subset]
        mask = d > 0
        return float(np.max(rho[mask] / d[mask]))


def _partition_levels(d: np.ndarray, epsilon: float, rng: np.random.Generator):
    """Cluster labels per scale plus the padded mask.

    Labels at each level are the ids of cluster centres, so equal labels mean
    same cluster.
    """
    n = d.shape[0]
    diam = float(d.max())
    labels = np.zeros(n, dtype=np.int64)
    levels = [labels]
    scales = [diam]
    padded = np.ones(n, dtype=bool)
    ell = 0
    while np.unique(labels).size < n:
        ell += 1
        delta = diam * SCALE_RATIO ** -ell
        rank = rng.permutation(n)
        radius = rng.uniform(delta / 4.0, delta / 2.0)
        same_parent = labels[:, None] == labels[None, :]
        eligible = same_parent & (d <= radius)
        # each point joins the eligible centre that comes first in the permutation
        keyed = np.where(eligible, rank[None, :], n)
        labels = np.argmin(keyed, axis=1)
        ball = d <= (epsilon / PAD_DIVISOR) * delta
        split = ball & (labels[:, None] != labels[None, :])
        padded &= ~split.any(axis=1)
        levels.append(labels)
        scales.append(delta)
    return levels, scales, padded


def _tree_from_levels(levels, scales) -> HstTree:
    n = levels[0].size
    parent, diam, point_of = [], [], []
    if n == 1:
        return HstTree([-1], [0.0], [0])
    parent.append(-1)
    diam.append(scales[0])
    point_of.append(-1)
    # node of each point's cluster at the current level (internal nodes only)
    node_of = np.zeros(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    for ell in range(1, len(levels)):
        lab = levels[ell]
        groups = {}
        for x in np.flatnonzero(active):
            groups.setdefault((node_of[x], lab[x]), []).append(x)
        for (par, _), members in groups.items():
            idx = len(parent)
            parent.append(par)
            if len(members) == 1:
                diam.append(0.0)
                point_of.append(members[0])
                active[members[0]] = False
            else:
                diam.append(scales[ell])
                point_of.append(-1)
                node_of[members] = idx
    return HstTree.canonical(parent, diam, point_of)


def extract_skeleton(m: FiniteMetric, epsilon: float, seed: int = 0) -> SkeletonResult:
    """Random ultrametric skeleton of ``m``.

    Returns the padded subset and a dominating HST over all points; pairs with
    an endpoint in the subset are distorted by at most 128/epsilon.
    """
    if not 0 < epsilon < 1:
        raise InvalidParameter(f"epsilon must lie in (0, 1), got {epsilon}")
    n = m.n
    if n == 1:
        return SkeletonResult(np.array([0]), HstTree([-1], [0.0], [0]), certified_distortion(epsilon), epsilon, seed, (0.0,))
    rng = np.random.default_rng(seed)
    levels, scales, padded = _partition_levels(m.dist, epsilon, rng)
    tree = _tree_from_levels(levels, scales)
    return SkeletonResult(
        np.flatnonzero(padded), tree, certified_distortion(epsilon), epsilon, seed, tuple(scales)
    )


def star_ultrametric(m: FiniteMetric, center: int) -> HstTree:
    """Dominating ultrametric that is 2-distorted on pairs containing ``center``.

    rho(y, z) = 2 * max(d(c, y), d(c, z)) for y != z, which satisfies the
    ultra-triangle inequality and dominates d through c.
    """
    from .ultrametric import hst_from_ultrametric

    a = m.dist[center]
    rho = 2.0 * np.maximum(a[:, None], a[None, :])
    np.fill_diagonal(rho, 0.0)
    return hst_from_ultrametric(FiniteMetric(rho, validate=False))


def extend_ultrametric(m: FiniteMetric, subset, rho0, D: float, strict: bool = True) -> FiniteMetric:
    """Extend an ultrametric on ``subset`` to all points.

    With pi(x) the nearest subset point (ties to the smallest id) and
    a(x) = 2*D*d(x, pi(x)), the extension is
    rho(x, y) = max(rho0(pi x, pi y), a(x), a(y)) for x != y.

    ``rho0`` is indexed like ``subset`` (sorted ascending). The precondition
    d <= rho0 <= D*d on subset pairs is checked; with ``strict=False`` only
    the lower half is required, which still yields an ultrametric with
    rho >= d/3 everywhere.
    """
    subset = np.asarray(sorted(int(s) for s in subset), dtype=np.int64)
    r0 = rho0.dist if isinstance(rho0, FiniteMetric) else np.asarray(rho0, dtype=np.float64)
    k = subset.size
    if k == 0:
        raise InvalidParameter("subset must be nonempty")
    if r0.shape != (k, k):
        raise InvalidParameter(f"rho0 must be {k}x{k}, got {r0.shape}")
    if D < 1:
        raise InvalidParameter(f"D must be >= 1, got {D}")
    bad = check_ultrametric(r0)
    if bad is not None:
        x, y, z = (int(subset[i]) for i in bad)
        raise PreconditionViolated(f"rho0 violates the ultra-triangle inequality on ({x}, {y}) via {z}", witness=(x, y))
    ds = m.dist[np.ix_(subset, subset)]
    scale = float(ds.max()) if k > 1 else 0.0
    low = r0 < ds - TOL * scale
    if low.any():
        i, j = np.argwhere(low)[0]
        raise PreconditionViolated(f"rho0 < d on pair ({subset[i]}, {subset[j]})", witness=(int(subset[i]), int(subset[j])))
    if strict:
        high = r0 > D * ds + TOL * D * scale
        if high.any():
            i, j = np.argwhere(high)[0]
            raise PreconditionViolated(f"rho0 > D*d on pair ({subset[i]}, {subset[j]})", witness=(int(subset[i]), int(subset[j])))
    to_sub = m.dist[:, subset]
    # argmin returns the first minimum, i.e. the smallest subset id
    nearest = np.argmin(to_sub, axis=1)
    a = 2.0 * D * to_sub[np.arange(m.n), nearest]
    a[subset] = 0.0
    nearest[subset] = np.arange(k)
    rho = np.maximum(r0[np.ix_(nearest, nearest)], np.maximum(a[:, None], a[None, :]))
    np.fill_diagonal(rho, 0.0)
    return FiniteMetric(rho, validate=False)
