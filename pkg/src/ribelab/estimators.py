"""scikit-learn style wrappers around the skeleton, oracle and embedding builders.

All estimators accept either a :class:`~ribelab.metric.FiniteMetric`, a
square distance matrix (``metric="precomputed"``), or a point cloud together
with a scipy distance name.
"""

from __future__ import annotations

import numbers

import numpy as np
from scipy.spatial.distance import pdist, squareform
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_array, check_is_fitted

from .metric import Embedding, FiniteMetric
from .oracle import build_oracle, build_ranking, rank_inverse, rank_query
from .ramsey import extract_skeleton
from .ultrametric import hilbert_embed, hst_from_ultrametric


def as_finite_metric(X, metric: str = "precomputed", validate: bool = True) -> FiniteMetric:
    """Coerce estimator input to a :class:`FiniteMetric`."""
    if isinstance(X, FiniteMetric):
        return X
    X = check_array(X, dtype=np.float64, ensure_min_samples=1)
    if metric == "precomputed":
        if X.shape[0] != X.shape[1]:
            raise ValueError(f"precomputed distances must be square, got {X.shape}")
        return FiniteMetric(X, validate=validate)
    if X.shape[0] == 1:
        return FiniteMetric(np.zeros((1, 1)), validate=False)
    return FiniteMetric(squareform(pdist(X, metric=metric)), validate=validate, check_triangle_inequality=False)


def _as_seed(random_state) -> int:
    if random_state is None:
        return 0
    if isinstance(random_state, numbers.Integral):
        return int(random_state)
    return int(check_random_state(random_state).randint(np.iinfo(np.int32).max))


class UltrametricSkeleton(TransformerMixin, BaseEstimator):
    """Padded subset plus a dominating ultrametric over all points.

    Parameters
    ----------
    epsilon : float in (0, 1)
        Trade-off between skeleton size and distortion; pairs touching the
        skeleton are distorted by at most ``128 / epsilon``.
    metric : str
        ``"precomputed"`` or any :func:`scipy.spatial.distance.pdist` metric.
    random_state : int, RandomState or None

    Attributes
    ----------
    subset_ : ndarray of point ids
    tree_ : HstTree over all points
    certified_distortion_ : float
    measured_distortion_ : float
    """

    def __init__(self, epsilon=0.5, metric="precomputed", random_state=None):
        self.epsilon = epsilon
        self.metric = metric
        self.random_state = random_state

    def fit(self, X, y=None):
        m = as_finite_metric(X, self.metric)
        res = extract_skeleton(m, self.epsilon, _as_seed(self.random_state))
        self.skeleton_ = res
        self.subset_ = res.subset
        self.tree_ = res.tree
        self.certified_distortion_ = res.certified_distortion
        self.measured_distortion_ = res.measured_distortion(m)
        self.n_points_ = m.n
        return self

    def transform(self, X=None):
        """Ultrametric distance matrix of the fitted points (``X`` is ignored)."""
        check_is_fitted(self, "tree_")
        return self.tree_.to_metric().dist.copy()


class DistanceOracle(BaseEstimator):
    """Approximate distance oracle with optional approximate ranking.

    ``predict`` takes an ``(k, 2)`` array of point-id pairs and returns the
    estimates E with d <= E <= (128/epsilon) d.
    """

    def __init__(self, epsilon=0.5, metric="precomputed", random_state=None, ranking=False):
        self.epsilon = epsilon
        self.metric = metric
        self.random_state = random_state
        self.ranking = ranking

    def fit(self, X, y=None):
        m = as_finite_metric(X, self.metric)
        self.oracle_ = build_oracle(m, self.epsilon, _as_seed(self.random_state))
        self.certified_distortion_ = self.oracle_.certified_distortion
        self.n_levels_ = self.oracle_.m
        self.n_points_ = m.n
        if self.ranking:
            self.ranking_ = build_ranking(self.oracle_, m)
        return self

    def predict(self, pairs):
        check_is_fitted(self, "oracle_")
        pairs = check_array(pairs, dtype=np.int64)
        if pairs.shape[1] != 2:
            raise ValueError("pairs must have shape (k, 2)")
        return self.oracle_.query_many(pairs[:, 0], pairs[:, 1])

    def query(self, i, j):
        check_is_fitted(self, "oracle_")
        return self.oracle_.query(i, j)

    def rank(self, x, i):
        check_is_fitted(self, "ranking_")
        return rank_query(self.ranking_, x, i)

    def rank_inverse(self, x, u):
        check_is_fitted(self, "ranking_")
        return rank_inverse(self.ranking_, x, u)


class UltrametricHilbertEmbedding(TransformerMixin, BaseEstimator):
    """Isometric Euclidean embedding of an ultrametric given as distances."""

    def __init__(self, metric="precomputed"):
        self.metric = metric

    def fit(self, X, y=None):
        m = as_finite_metric(X, self.metric, validate=False)
        self.tree_ = hst_from_ultrametric(m)
        self.embedding_ = hilbert_embed(self.tree_)
        self.radius_ = float(self.tree_.diameter[self.tree_.root]) / np.sqrt(2.0)
        return self

    def transform(self, X=None) -> np.ndarray:
        """Images of the fitted points (``X`` is ignored)."""
        check_is_fitted(self, "embedding_")
        return self.embedding_.images.copy()

    def to_embedding(self) -> Embedding:
        check_is_fitted(self, "embedding_")
        return self.embedding_
