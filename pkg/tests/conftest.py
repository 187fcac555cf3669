import numpy as np
import pytest
from hypothesis import settings

from ribelab.metric import FiniteMetric, random_graph_metric, random_point_metric

settings.register_profile("ribelab", deadline=None, max_examples=40)
settings.load_profile("ribelab")


def line_metric(n, seed=0):
    """Uniform points on a line; gives multi-level oracles, unlike higher-dimensional clouds."""
    x = np.sort(np.random.default_rng(seed).random(n))
    return FiniteMetric.from_points(x[:, None])


def mixed_metric(n, seed):
    kind = seed % 4
    if kind == 0:
        return line_metric(n, seed)
    if kind == 1:
        return random_point_metric(n, 2, seed)
    if kind == 2:
        return random_point_metric(n, 4, seed)
    return random_graph_metric(n, seed=seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
