"""Geronimus polynomials and spectral facts about high-girth regular graphs.

Below half the girth, the distance-m graph of a k-regular graph is a fixed
integer polynomial of the adjacency matrix. Everything that is an identity
is checked in exact integer arithmetic; spectral inequalities get 1e-8 slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import InvalidParameter, NotRegular, PreconditionViolated
from .metric import Graph, girth, graph_distances

SPECTRAL_SLACK = 1e-8
_INT64_SAFE = float(2 ** 62)


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial with coefficients in ascending degree order."""

    coefficients: tuple

    def __post_init__(self):
        c = [int(a) for a in self.coefficients]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(c) if c else (0,))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1 if self.coefficients != (0,) else -1

    @property
    def leading(self) -> int:
        return self.coefficients[-1]

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coefficients):
            acc = acc * x + a
        return acc

    def __eq__(self, other):
        if isinstance(other, IntPolynomial):
            return self.coefficients == other.coefficients
        return NotImplemented

    def __hash__(self):
        return hash(self.coefficients)

    def shift(self) -> "IntPolynomial":
        """Multiply by x."""
        return IntPolynomial((0,) + self.coefficients)

    def __sub__(self, other):
        a, b = self.coefficients, other.coefficients
        size = max(len(a), len(b))
        return IntPolynomial(tuple((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(size)))

    def scale(self, c: int) -> "IntPolynomial":
        return IntPolynomial(tuple(c * a for a in self.coefficients))

    def roots(self) -> np.ndarray:
        return np.roots([float(a) for a in reversed(self.coefficients)])

    def __str__(self):
        terms = []
        for power in range(len(self.coefficients) - 1, -1, -1):
            a = self.coefficients[power]
            if a == 0:
                continue
            mag = abs(a)
            if power == 0:
                body = str(mag)
            else:
                body = ("" if mag == 1 else str(mag)) + ("x" if power == 1 else f"x^{power}")
            if not terms:
                terms.append(("-" if a < 0 else "") + body)
            else:
                terms.append(("- " if a < 0 else "+ ") + body)
        return " ".join(terms) if terms else "0"

    def __repr__(self):
        return f"IntPolynomial({str(self)!r})"

    def evaluate_matrix(self, A) -> np.ndarray:
        """Exact P(A) for an integer matrix A.

        Horner's rule in int64 with a float shadow of the magnitudes; if the
        shadow says an entry could leave the safe int64 range the evaluation
        is redone with Python integers.
        """
        A = np.asarray(A)
        if not np.issubdtype(A.dtype, np.integer):
            raise InvalidParameter("matrix must have an integer dtype")
        n = A.shape[0]
        eye = np.eye(n, dtype=np.int64)
        absA = np.abs(A).astype(np.float64)
        acc = eye * self.coefficients[-1]
        bound = np.abs(acc).astype(np.float64)
        for a in reversed(self.coefficients[:-1]):
            bound = absA @ bound + abs(a) * np.eye(n)
            if bound.max(initial=0.0) >= _INT64_SAFE:
                return self._evaluate_exact(A)
            acc = A.astype(np.int64) @ acc + a * eye
        return acc

    def _evaluate_exact(self, A) -> np.ndarray:
        Ao = A.astype(object)
        n = A.shape[0]
        eye = np.eye(n, dtype=np.int64).astype(object)
        acc = eye * self.coefficients[-1]
        for a in reversed(self.coefficients[:-1]):
            acc = Ao.dot(acc) + eye * a
        return acc


@lru_cache(maxsize=None)
def geronimus(k: int, m: int) -> IntPolynomial:
    """P_m^k: P_0 = 1, P_1 = x, P_2 = x^2 - k, P_m = x P_{m-1} - (k-1) P_{m-2}."""
    if k < 3:
        raise InvalidParameter(f"k must be >= 3, got {k}")
    if m < 0:
        raise InvalidParameter(f"m must be >= 0, got {m}")
    if m == 0:
        return IntPolynomial((1,))
    if m == 1:
        return IntPolynomial((0, 1))
    if m == 2:
        return IntPolynomial((-k, 0, 1))
    return geronimus(k, m - 1).shift() - geronimus(k, m - 2).scale(k - 1)


def distance_m_graph(g: Graph, m: int) -> Graph:
    """Graph on the same vertices joining pairs at shortest-path distance exactly m."""
    if m < 1:
        raise InvalidParameter("m must be >= 1")
    d = graph_distances(g)
    u, v = np.nonzero(np.triu(d == m, 1))
    return Graph(g.n, tuple(zip(u.tolist(), v.tolist())))


def _adjacency_int(g: Graph) -> np.ndarray:
    return g.adjacency(weighted=False).astype(np.int64)


def _require_regular(g: Graph, k: int):
    deg = g.regular_degree()
    if deg is None:
        raise NotRegular("graph is not regular", witness=None)
    if deg != k:
        raise NotRegular(f"graph is {deg}-regular, expected k = {k}", witness=None)


@dataclass(frozen=True)
class IdentityCheck:
    holds: bool
    max_deviation: int

    def __bool__(self):
        return self.holds

    def __iter__(self):
        return iter((self.holds, self.max_deviation))


def verify_geronimus_identity(g: Graph, k: int, m: int, check_girth: bool = True) -> IdentityCheck:
    """Compare P_m^k(A_G) with A_{G^(m)} entrywise in exact integers.

    With ``check_girth=False`` the comparison is reported even when
    girth <= 2m, where the identity may legitimately fail.
    """
    if m < 0:
        raise InvalidParameter("m must be >= 0")
    if m == 0:
        target = np.eye(g.n, dtype=np.int64)
    else:
        if m >= 2:
            _require_regular(g, k)
        if check_girth and not 2 * m < girth(g):
            raise PreconditionViolated(f"girth {girth(g)} is not above 2m = {2 * m}", witness=None)
        target = _adjacency_int(distance_m_graph(g, m))
    value = geronimus(k, m).evaluate_matrix(_adjacency_int(g))
    dev = int(np.max(np.abs(value - target))) if g.n else 0
    return IdentityCheck(dev == 0, dev)


def lambda_floor(k: int, m: int) -> float:
    """-(k-1)^(m/2 - 1) * k * (m + 1)."""
    return -((k - 1) ** (m / 2 - 1)) * k * (m + 1)


@dataclass(frozen=True)
class FloorCheck:
    lambda_min: float
    floor: float
    holds: bool

    def __iter__(self):
        return iter((self.lambda_min, self.floor, self.holds))


def lambda_min_floor(g: Graph, k: int, m: int) -> FloorCheck:
    """Smallest eigenvalue of A_{G^(m)} against the floor for even m below half the girth."""
    if m <= 0 or m % 2:
        raise PreconditionViolated(f"m must be even and positive, got {m}", witness=None)
    _require_regular(g, k)
    if not 2 * m < girth(g):
        raise PreconditionViolated(f"girth {girth(g)} is not above 2m = {2 * m}", witness=None)
    A = distance_m_graph(g, m).adjacency(weighted=False)
    lam = float(np.linalg.eigvalsh(A)[0])
    floor = lambda_floor(k, m)
    return FloorCheck(lam, floor, lam >= floor - SPECTRAL_SLACK)


@dataclass(frozen=True)
class MixingCheck:
    edges_in_s: int
    bound: float
    holds: bool

    def __iter__(self):
        return iter((self.edges_in_s, self.bound, self.holds))


def smallest_eigenvalue(h: Graph) -> float:
    return float(np.linalg.eigvalsh(h.adjacency(weighted=False))[0])


def self_mixing_check(h: Graph, S, lambda_min: float | None = None) -> MixingCheck:
    """E_H(S) >= (d|S|^2/n + lambda_n |S|) / 2 for a d-regular loop-free H.

    Pass ``lambda_min`` to reuse one eigensolve across many subsets.
    """
    d = h.regular_degree()
    if d is None:
        raise NotRegular("self-mixing needs a regular graph", witness=None)
    if any(u == v for u, v, _ in h.edges):
        raise PreconditionViolated("graph has a loop", witness=None)
    members = np.zeros(h.n, dtype=bool)
    members[np.asarray(list(S), dtype=np.int64)] = True
    size = int(members.sum())
    inside = sum(1 for u, v, _ in h.edges if members[u] and members[v])
    lam = smallest_eigenvalue(h) if lambda_min is None else lambda_min
    bound = (d * size * size / h.n + lam * size) / 2.0
    return MixingCheck(inside, bound, inside >= bound - SPECTRAL_SLACK)


def self_mixing_exhaustive(h: Graph) -> int:
    """Number of subsets of V(H) violating the self-mixing inequality (all 2^n of them)."""
    n = h.n
    if n > 22:
        raise InvalidParameter("exhaustive check limited to n <= 22")
    d = h.regular_degree()
    if d is None:
        raise NotRegular("self-mixing needs a regular graph", witness=None)
    lam = smallest_eigenvalue(h)
    masks = np.arange(1 << n, dtype=np.int64)
    size = np.zeros(masks.size, dtype=np.int64)
    for v in range(n):
        size += (masks >> v) & 1
    inside = np.zeros(masks.size, dtype=np.int64)
    for u, v, _ in h.edges:
        inside += ((masks >> u) & (masks >> v)) & 1
    bound = (d * size * size / n + lam * size) / 2.0
    return int(np.count_nonzero(inside < bound - SPECTRAL_SLACK))


def trig_form(k: int, m: int, theta) -> np.ndarray:
    """P_m^k(2 sqrt(k-1) cos theta) via the closed trigonometric form (theta not a multiple of pi)."""
    theta = np.asarray(theta, dtype=np.float64)
    q = k - 1
    return q ** (m / 2 - 1) * (q * np.sin((m + 1) * theta) - np.sin((m - 1) * theta)) / np.sin(theta)


def root_interval(k: int) -> float:
    return 2.0 * math.sqrt(k - 1)
