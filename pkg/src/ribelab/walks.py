"""Exact Markov-chain functionals on finite metric spaces.

Every expectation here is computed from matrix powers of the transition
matrix, never by sampling. Chains may be dense arrays or scipy sparse
matrices; sparse chains are propagated row-block by row-block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .exceptions import (
    DegenerateChain,
    DisconnectedGraph,
    EmptyInducedGraph,
    InvalidParameter,
)
from .metric import Embedding, FiniteMetric, Graph, gen_laakso, gen_tree, graph_distances

ROW_TOL = 1e-12
STATIONARY_TOL = 1e-10


class MarkovChain:
    """Row-stochastic transition matrix with optional stationary and start laws.

    ``pi`` is the stationary distribution (None for chains such as absorbing
    walks where no particular one is meant). ``start`` is the law of Z_0 and
    defaults to ``pi``.
    """

    def __init__(self, A, pi=None, start=None, reversible=False, validate=True):
        if sparse.issparse(A):
            A = sparse.csr_matrix(A, dtype=np.float64)
        else:
            A = np.asarray(A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InvalidParameter(f"transition matrix must be square, got {A.shape}")
        self.A = A
        self.pi = None if pi is None else np.asarray(pi, dtype=np.float64)
        self.start = None if start is None else np.asarray(start, dtype=np.float64)
        self.reversible = reversible
        if validate:
            self._validate()

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def initial(self) -> np.ndarray:
        law = self.start if self.start is not None else self.pi
        if law is None:
            raise InvalidParameter("chain has neither a start law nor a stationary law")
        return law

    def __repr__(self):
        return f"MarkovChain(m={self.m}, reversible={self.reversible})"

    def _validate(self):
        A = self.A
        if (A.data if sparse.issparse(A) else A).min(initial=0.0) < 0:
            raise InvalidParameter("transition probabilities must be nonnegative")
        rows = np.asarray(A.sum(axis=1)).ravel()
        if np.max(np.abs(rows - 1.0)) > ROW_TOL * max(1, self.m):
            raise InvalidParameter("rows of the transition matrix must sum to 1")
        for name, law in (("pi", self.pi), ("start", self.start)):
            if law is None:
                continue
            if law.shape != (self.m,) or law.min() < 0 or abs(law.sum() - 1.0) > 1e-12:
                raise InvalidParameter(f"{name} must be a probability vector of length {self.m}")
        if self.pi is not None:
            drift = np.asarray(self.A.T @ self.pi).ravel() - self.pi
            if np.max(np.abs(drift)) > STATIONARY_TOL:
                raise InvalidParameter("pi is not stationary for A")
            if self.reversible:
                flow = sparse.diags(self.pi) @ self.A if sparse.issparse(self.A) else self.pi[:, None] * self.A
                asym = flow - flow.T
                worst = abs(asym).max() if sparse.issparse(asym) else np.max(np.abs(asym))
                if worst > STATIONARY_TOL:
                    raise InvalidParameter("chain flagged reversible but detailed balance fails")

    def dense(self) -> np.ndarray:
        return self.A.toarray() if sparse.issparse(self.A) else self.A

    def step(self, P):
        """Right-multiply a block of row distributions by the transition matrix."""
        if sparse.issparse(self.A):
            return np.asarray((self.A.T @ P.T).T)
        return P @ self.A

    def laws(self, t_max: int, init=None):
        """Distributions of Z_0..Z_t_max from ``init`` (default the start law)."""
        mu = self.initial if init is None else np.asarray(init, dtype=np.float64)
        out = [mu]
        for _ in range(t_max):
            mu = self.step(mu[None, :])[0]
            out.append(mu)
        return np.array(out)


def _reversible_from_weights(W, dense_limit=1024):
    """Walk proportional to a symmetric nonnegative weight matrix."""
    deg = np.asarray(W.sum(axis=1)).ravel()
    if np.any(deg == 0):
        raise InvalidParameter("every state needs positive weight")
    pi = deg / deg.sum()
    if sparse.issparse(W):
        A = sparse.diags(1.0 / deg) @ W
        if W.shape[0] <= dense_limit:
            A = A.toarray()
    else:
        A = W / deg[:, None]
    return MarkovChain(A, pi=pi, reversible=True)


def stationary_walk(g: Graph, dense_limit: int = 1024) -> MarkovChain:
    """Simple random walk with stationary law deg(x) / 2|E|."""
    if g.m == 0:
        raise InvalidParameter("graph needs at least one edge")
    if not g.is_connected():
        raise DisconnectedGraph("random walk needs a connected graph")
    W = g.sparse_adjacency(weighted=False)
    return _reversible_from_weights(W, dense_limit)


def random_reversible_chain(m: int, seed: int = 0, density: float = 0.6) -> MarkovChain:
    """Reversible chain from a random symmetric weight matrix (with possible holding)."""
    rng = np.random.default_rng(seed)
    W = rng.random((m, m)) * (rng.random((m, m)) < density)
    W = np.triu(W) + np.triu(W, 1).T
    W += np.diag(rng.random(m) * 0.1)
    # keep every state connected to the next so the chain is irreducible
    for i in range(m - 1):
        if W[i, i + 1] == 0:
            W[i, i + 1] = W[i + 1, i] = rng.random() + 0.01
    return _reversible_from_weights(W)


def subset_walk(g: Graph, S, m: int) -> MarkovChain:
    """Walk on S jumping between points at graph distance exactly m.

    States are the sorted points of S; the stationary law is proportional to
    the degree in the distance-m graph induced on S. Isolated states get zero
    mass and a holding self-loop so rows stay stochastic.
    """
    S = np.asarray(sorted(set(int(s) for s in S)), dtype=np.int64)
    if m < 1:
        raise InvalidParameter("jump length m must be >= 1")
    dist = graph_distances(g)
    adj = (dist[np.ix_(S, S)] == m).astype(np.float64)
    deg = adj.sum(axis=1)
    if deg.sum() == 0:
        raise EmptyInducedGraph(f"no pair of S is at distance {m}")
    A = np.zeros_like(adj)
    live = deg > 0
    A[live] = adj[live] / deg[live, None]
    A[~live, ~live] = 1.0
    return MarkovChain(A, pi=deg / deg.sum(), reversible=True)


@dataclass(frozen=True)
class JumpChoice:
    m: int
    density_ok: bool  # |S|/n >= (2m+2)/(k-1)^(m/2)
    increment_ok: bool  # |S|/n >= 16/(k (k-1)^(m/3))
    girth_ok: bool  # 0 < m < girth/2
    feasible: bool


def admissible_jump(k: int, n: int, s_size: int, girth=None, m_max: int = 600) -> JumpChoice:
    """Smallest multiple of 6 meeting both density conditions on |S|/n.

    With both conditions the subset walk gains m/6 expected distance per step
    while tm < girth/4. ``feasible`` also requires m < girth/2, which fails at
    any graph small enough to enumerate.
    """
    if k < 3:
        raise InvalidParameter("k must be >= 3")
    ratio = s_size / n
    for m in range(6, m_max + 1, 6):
        dens = ratio >= (2 * m + 2) / (k - 1) ** (m / 2)
        inc = ratio >= 16.0 / (k * (k - 1) ** (m / 3))
        if dens and inc:
            gok = girth is not None and 0 < m < girth / 2
            return JumpChoice(m, True, True, gok, gok)
    return JumpChoice(m_max, False, False, False, False)


def _image_distances(images, m_states: int, f=None) -> np.ndarray:
    """Distance matrix between the images of the chain's states."""
    if isinstance(images, FiniteMetric):
        d = images.dist
        if f is not None:
            idx = np.asarray(f, dtype=np.intp)
            d = d[np.ix_(idx, idx)]
    else:
        emb = images if isinstance(images, Embedding) else Embedding(np.asarray(images, dtype=np.float64))
        if f is not None:
            emb = Embedding(emb.images[np.asarray(f, dtype=np.intp)], emb.p)
        d = emb.distances()
    if d.shape != (m_states, m_states):
        raise InvalidParameter(f"need one image per state ({m_states}), got {d.shape[0]}")
    return d


def _moments(chain: MarkovChain, dp: np.ndarray, t_max: int, init=None) -> np.ndarray:
    """E[dp(Z_t, Z_0)] for t = 0..t_max, Z_0 ~ init."""
    law = chain.initial if init is None else init
    support = np.flatnonzero(law > 0)
    P = np.zeros((support.size, chain.m))
    P[np.arange(support.size), support] = 1.0
    w = law[support]
    drows = dp[support]
    out = np.zeros(t_max + 1)
    for t in range(1, t_max + 1):
        P = chain.step(P)
        out[t] = w @ np.einsum("ij,ij->i", P, drows)
    return out


def markov_type_ratio(chain: MarkovChain, images, p: float, t: int, f=None) -> float:
    """E d(f Z_t, f Z_0)^p / (t E d(f Z_1, f Z_0)^p) for the stationary chain.

    A value above M^p certifies that the image space lacks Markov type p with
    constant M; ``ratio ** (1/p)`` lower-bounds M.
    """
    if t < 1:
        raise InvalidParameter("t must be >= 1")
    if chain.pi is None:
        raise InvalidParameter("Markov type needs a stationary chain")
    dp = _image_distances(images, chain.m, f) ** p
    mom = _moments(chain, dp, t, init=chain.pi)
    if mom[1] <= 0:
        raise DegenerateChain("one-step moment is zero")
    return float(mom[t] / (t * mom[1]))


def distortion_lower_bound(chain: MarkovChain, m: FiniteMetric, p: float = 2.0, M: float = 1.0, t_max: int = 1) -> float:
    """Lower bound on the distortion of ``m`` into any space with Markov type p constant M.

    max over t <= t_max of (E d^p(Z_t, Z_0) / (M^p t E d^p(Z_1, Z_0)))^(1/p).
    """
    if m.n < 2:
        return 0.0
    if chain.pi is None:
        raise InvalidParameter("Markov type needs a stationary chain")
    mom = _moments(chain, m.dist ** p, t_max, init=chain.pi)
    if mom[1] <= 0:
        raise DegenerateChain("one-step moment is zero")
    t = np.arange(1, t_max + 1)
    return float(np.max((mom[1:] / (M ** p * t * mom[1])) ** (1.0 / p)))


def drift_profile(chain: MarkovChain, m: FiniteMetric, t_max: int, init=None) -> np.ndarray:
    """E d(Z_t, Z_0) for t = 0..t_max, Z_0 distributed by the chain's start law."""
    if t_max < 1:
        raise InvalidParameter("t_max must be >= 1")
    return _moments(chain, _image_distances(m, chain.m), t_max, init=init)


@dataclass(frozen=True)
class ConvexityResult:
    lhs: float
    rhs: float
    pi_lower: float

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.pi_lower))


def _matrix_power_dense(A: np.ndarray, e: int) -> np.ndarray:
    return np.linalg.matrix_power(A, e)


def markov_convexity_functional(chain: MarkovChain, images, p: float, T: int, f=None) -> ConvexityResult:
    """Both sides of the Markov p-convexity inequality over times 0..T.

    lhs = sum_s sum_t E d(f Z_t, f Z~_t(t - 2^s))^p / 2^(sp) over 2^s <= t <= T,
    with the fork term evaluated exactly as
    sum_w P(Z_{t-2^s} = w) sum_{u,v} (A^{2^s})_{wu} (A^{2^s})_{wv} d(u,v)^p.
    rhs = sum_{t=1}^T E d(f Z_t, f Z_{t-1})^p; the chain is taken constant
    before time 0, so truncating to t >= 0 only drops nonnegative terms.
    """
    if T < 1:
        raise InvalidParameter("horizon T must be >= 1")
    dp = _image_distances(images, chain.m, f) ** p
    A = chain.dense()
    laws = chain.laws(T)
    step_cost = np.einsum("ij,ij->i", A, dp)
    rhs = float(sum(laws[t - 1] @ step_cost for t in range(1, T + 1)))
    lhs = 0.0
    s = 0
    R = A.copy()
    while (1 << s) <= T:
        span = 1 << s
        fork = np.einsum("ij,ij->i", R @ dp, R)
        total = sum(laws[t - span] @ fork for t in range(span, T + 1))
        lhs += float(total) / 2.0 ** (s * p)
        s += 1
        if (1 << s) <= T:
            R = R @ R
    if rhs <= 0:
        raise DegenerateChain("the one-step side vanishes")
    return ConvexityResult(lhs, rhs, (lhs / rhs) ** (1.0 / p))


def tree_convexity_functional(k: int, n: int, p: float = 2.0, T=None) -> ConvexityResult:
    """:func:`markov_convexity_functional` for the outward walk on T_n^k, by symmetry.

    Z_t sits at depth min(t, n). Two copies forked at depth r share their
    first j steps with probability prod 1/b, b the number of children along
    the way, and then stay apart, ending at tree distance 2(h - j) after h
    live steps. This gives the exact sums without the |T_n^k|^2 matrices.
    """
    if k < 3 or n < 1:
        raise InvalidParameter("need k >= 3 and n >= 1")
    T = n if T is None else T
    branching = lambda depth: k if depth == 0 else k - 1  # noqa: E731
    lhs = 0.0
    s = 0
    while (1 << s) <= T:
        span = 1 << s
        for t in range(span, T + 1):
            r = min(t - span, n)
            h = min(t, n) - r
            stay = 1.0
            term = 0.0
            for j in range(h):
                q = 1.0 / branching(r + j)
                term += stay * (1.0 - q) * (2.0 * (h - j)) ** p
                stay *= q
            lhs += term / 2.0 ** (s * p)
        s += 1
    rhs = float(min(T, n))
    return ConvexityResult(lhs, rhs, (lhs / rhs) ** (1.0 / p))


def outward_tree_chain(k: int, n: int) -> MarkovChain:
    """Outward walk on T_n^k from the root, absorbed at the leaves."""
    g = gen_tree(k, n)
    size = g.n
    A = np.zeros((size, size))
    kids = [[] for _ in range(size)]
    for u, v, _ in g.edges:  # edges run parent -> child in gen_tree
        kids[u].append(v)
    for u in range(size):
        if kids[u]:
            A[u, kids[u]] = 1.0 / len(kids[u])
        else:
            A[u, u] = 1.0
    start = np.zeros(size)
    start[0] = 1.0
    return MarkovChain(A, start=start)


def laakso_chain(k: int) -> MarkovChain:
    """Left-to-right walk on the Laakso graph G_k, absorbed at the right end.

    From each vertex the walk moves uniformly to a neighbour one step
    further from the left end (vertex 0).
    """
    if k < 1:
        raise InvalidParameter("k must be >= 1")
    g = gen_laakso(k)
    from_left = graph_distances(g)[0]
    nb = g.neighbors()
    A = np.zeros((g.n, g.n))
    for u in range(g.n):
        right = [v for v in nb[u] if from_left[v] == from_left[u] + 1]
        if right:
            A[u, right] = 1.0 / len(right)
        else:
            A[u, u] = 1.0
    start = np.zeros(g.n)
    start[0] = 1.0
    return MarkovChain(A, start=start)


def hypercube_drift_closed_form(n: int, t) -> np.ndarray:
    """E ||Z_t - Z_0||_1 for the coordinate-flip walk on {-1,1}^n."""
    t = np.asarray(t, dtype=np.float64)
    return 2.0 * (n / 2.0) * (1.0 - (1.0 - 2.0 / n) ** t)


def nonregular_girth_bound(g: Graph) -> float:
    """(1 - 2/avg_degree) * sqrt(girth); the Euclidean distortion lower bound up to a constant."""
    from .metric import girth as _girth

    gi = _girth(g)
    avg = 2.0 * g.m / g.n
    if math.isinf(gi):
        return math.inf
    return (1.0 - 2.0 / avg) * math.sqrt(gi)
