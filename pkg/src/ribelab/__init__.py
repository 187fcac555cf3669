"""Laboratory for finite metric spaces: ultrametric skeletons, distance
oracles, random-walk and spectral distortion bounds, and hypercube analysis."""

from .exceptions import *  # noqa: F401,F403
from .metric import (
    DistortionReport,
    Embedding,
    FiniteMetric,
    Graph,
    distortion_of_map,
    gen_hypercube,
    gen_laakso,
    gen_named,
    gen_random_regular,
    gen_tree,
    girth,
    graph_distances,
    hypercube_graph,
    metric_from_graph,
    random_graph_metric,
    random_point_metric,
)
from .ultrametric import (
    HstTree,
    check_ultrametric,
    hilbert_embed,
    hilbert_curve,
    holder_surjection,
    hst_from_ultrametric,
    linear_order,
    random_hst,
    ultra_distance,
)
from .ramsey import SkeletonResult, extend_ultrametric, extract_skeleton
from .oracle import (
    OracleStructure,
    RankingStructure,
    build_lca,
    build_oracle,
    build_ranking,
    query_distance,
    rank_inverse,
    rank_query,
)
from .walks import (
    MarkovChain,
    distortion_lower_bound,
    drift_profile,
    laakso_chain,
    markov_convexity_functional,
    markov_type_ratio,
    outward_tree_chain,
    stationary_walk,
    subset_walk,
    tree_convexity_functional,
)
from .lamplighter import LampConfig, lamplighter_distance, lamplighter_drift
from .spectral import (
    IntPolynomial,
    distance_m_graph,
    geronimus,
    lambda_min_floor,
    self_mixing_check,
    verify_geronimus_identity,
)
from .cube import (
    CubeFunction,
    TorusFunction,
    cube_distortion_lower,
    heat_semigroup,
    metric_cotype_constant,
    metric_type_constant,
    partial_derivative,
    pisier_ratio,
    walsh_transform,
)
from .estimators import DistanceOracle, UltrametricHilbertEmbedding, UltrametricSkeleton

__version__ = "0.1.0"
