"""Vector-valued analysis on the discrete cube {-1,1}^n and the torus Z_m^n.

Sign patterns are bit-encoded: bit b of the index is 1 exactly when
epsilon_{b+1} = -1. Subsets A of {1..n} use the same encoding, so
W_A(epsilon) = (-1)^popcount(A & index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import DimensionTooLarge, IndexOutOfRange, InvalidParameter, NegativeTime
from .metric import FiniteMetric

MAX_CUBE_DIM = 16
MAX_PISIER_DIM = 12
MAX_KERNEL_DIM = 12


def popcount(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64)
    return np.bitwise_count(x).astype(np.int64) if hasattr(np, "bitwise_count") else np.array(
        [bin(int(v)).count("1") for v in x.ravel()], dtype=np.int64
    ).reshape(x.shape)


def sign_matrix(n: int) -> np.ndarray:
    """(2^n, n) array of epsilon_i in {-1, +1} for every index."""
    idx = np.arange(1 << n)[:, None]
    return 1 - 2 * ((idx >> np.arange(n)[None, :]) & 1)


def walsh_character(n: int, A: int) -> np.ndarray:
    """W_A over all 2^n sign patterns."""
    return 1.0 - 2.0 * (popcount(np.arange(1 << n) & A) & 1)


def _norm(values: np.ndarray, norm) -> np.ndarray:
    if callable(norm):
        return np.asarray(norm(values), dtype=np.float64)
    if norm == np.inf:
        return np.abs(values).max(axis=-1)
    return np.linalg.norm(values, ord=norm, axis=-1) if values.shape[-1] > 1 else np.abs(values[..., 0])


class CubeFunction:
    """f: {-1,1}^n -> R^d with a norm on R^d (an l_p exponent or a callable)."""

    def __init__(self, values, norm=2.0):
        v = np.asarray(values, dtype=np.float64)
        if v.ndim == 1:
            v = v[:, None]
        size = v.shape[0]
        n = size.bit_length() - 1
        if size < 1 or (1 << n) != size:
            raise InvalidParameter(f"need 2^n values, got {size}")
        if n > MAX_CUBE_DIM:
            raise DimensionTooLarge(f"n = {n} exceeds {MAX_CUBE_DIM}")
        self.values = v
        self.n = n
        self.d = v.shape[1]
        self.norm = norm

    def __repr__(self):
        return f"CubeFunction(n={self.n}, d={self.d}, norm={self.norm!r})"

    def like(self, values) -> "CubeFunction":
        return CubeFunction(values, self.norm)

    def norms(self) -> np.ndarray:
        return _norm(self.values, self.norm)

    def mean_norm(self) -> float:
        return float(self.norms().mean())

    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)

    @classmethod
    def character(cls, n: int, A: int) -> "CubeFunction":
        return cls(walsh_character(n, A))

    @classmethod
    def linear(cls, x) -> "CubeFunction":
        """f(epsilon) = sum_i epsilon_i x_i for the rows x_i of ``x``."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return cls(sign_matrix(x.shape[0]) @ x)

    @classmethod
    def random(cls, n: int, d: int = 1, seed: int = 0, norm=2.0) -> "CubeFunction":
        return cls(np.random.default_rng(seed).normal(size=(1 << n, d)), norm)


def _butterfly(v: np.ndarray, n: int) -> np.ndarray:
    """Unnormalised Walsh-Hadamard butterflies along axis 0."""
    out = v.copy()
    d = out.shape[1]
    for b in range(n):
        view = out.reshape(-1, 2, 1 << b, d)
        lo = view[:, 0].copy()
        hi = view[:, 1]
        view[:, 0] = lo + hi
        view[:, 1] = lo - hi
    return out


def walsh_transform(f: CubeFunction) -> np.ndarray:
    """Coefficients f_hat(A) = E[f W_A], one row per subset A."""
    return _butterfly(f.values, f.n) / (1 << f.n)


def inverse_walsh(coeffs, norm=2.0) -> CubeFunction:
    """f = sum_A f_hat(A) W_A."""
    c = np.asarray(coeffs, dtype=np.float64)
    if c.ndim == 1:
        c = c[:, None]
    n = c.shape[0].bit_length() - 1
    return CubeFunction(_butterfly(c, n), norm)


def walsh_naive(f: CubeFunction) -> np.ndarray:
    """Direct O(4^n) transform; test oracle for :func:`walsh_transform`."""
    n = f.n
    idx = np.arange(1 << n)
    W = 1.0 - 2.0 * (popcount(idx[:, None] & idx[None, :]) & 1)
    return W @ f.values / (1 << n)


def _check_coordinate(f: CubeFunction, j: int):
    if not 1 <= j <= f.n:
        raise IndexOutOfRange(f"coordinate {j} outside 1..{f.n}")


def partial_derivative(f: CubeFunction, j: int) -> CubeFunction:
    """(f(epsilon) - f(epsilon with coordinate j flipped)) / 2, j 1-based."""
    _check_coordinate(f, j)
    flipped = np.arange(1 << f.n) ^ (1 << (j - 1))
    return f.like((f.values - f.values[flipped]) / 2.0)


def partial_derivative_fourier(f: CubeFunction, j: int) -> CubeFunction:
    """Projection of f onto the characters W_A with j in A."""
    _check_coordinate(f, j)
    c = walsh_transform(f)
    keep = (np.arange(1 << f.n) >> (j - 1)) & 1
    return inverse_walsh(c * keep[:, None], f.norm)


def laplacian(f: CubeFunction) -> CubeFunction:
    total = np.zeros_like(f.values)
    for j in range(1, f.n + 1):
        total += partial_derivative(f, j).values
    return f.like(total)


def heat_semigroup(f: CubeFunction, t: float) -> CubeFunction:
    """e^{-t Delta} f through the Fourier multiplier e^{-t|A|}."""
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    c = walsh_transform(f)
    size = popcount(np.arange(1 << f.n))
    return inverse_walsh(c * np.exp(-t * size)[:, None], f.norm)


def riesz_kernel(n: int, t: float) -> np.ndarray:
    """R_t(delta) = prod_i (1 + e^{-t} delta_i) over all sign patterns."""
    minus = popcount(np.arange(1 << n))
    r = math.exp(-t)
    return (1.0 + r) ** (n - minus) * (1.0 - r) ** minus


def heat_semigroup_kernel(f: CubeFunction, t: float) -> CubeFunction:
    """e^{-t Delta} f(epsilon) = E_delta[R_t(delta) f(epsilon delta)], summed directly."""
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    n = f.n
    if n > MAX_KERNEL_DIM:
        raise DimensionTooLarge(f"direct kernel sum limited to n <= {MAX_KERNEL_DIM}")
    R = riesz_kernel(n, t)
    size = 1 << n
    out = np.empty_like(f.values)
    idx = np.arange(size)
    step = max(1, (1 << 20) // size)
    for lo in range(0, size, step):
        rows = idx[lo: lo + step]
        out[rows] = np.einsum("j,rjd->rd", R, f.values[rows[:, None] ^ idx[None, :]]) / size
    return f.like(out)


def pointwise_product(g: np.ndarray, f: CubeFunction) -> CubeFunction:
    return f.like(np.asarray(g)[:, None] * f.values)


@dataclass(frozen=True)
class PisierResult:
    lhs: float
    rhs: float
    ratio: float

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.ratio))


def pisier_ratio(f: CubeFunction, q: float = 1.0) -> PisierResult:
    """Both sides of Pisier's inequality, summed exactly over all (epsilon, delta).

    lhs = (E ||f - E f||^q)^(1/q), rhs = (E_eps E_delta ||sum_i delta_i d_i f(eps)||^q)^(1/q).
    """
    if q < 1:
        raise InvalidParameter("q must be >= 1")
    n = f.n
    if n > MAX_PISIER_DIM:
        raise DimensionTooLarge(f"exact Pisier sums limited to n <= {MAX_PISIER_DIM}")
    size = 1 << n
    lhs = float(np.mean(_norm(f.values - f.mean(), f.norm) ** q)) ** (1.0 / q)
    if n == 0:
        return PisierResult(lhs, 0.0, 0.0 if lhs == 0 else math.inf)
    partials = np.stack([partial_derivative(f, j).values for j in range(1, n + 1)])  # (n, 2^n, d)
    flat = partials.reshape(n, -1)
    signs = sign_matrix(n).astype(np.float64)
    total = 0.0
    block = max(1, (1 << 22) // flat.shape[1])
    for lo in range(0, size, block):
        combos = (signs[lo: lo + block] @ flat).reshape(-1, size, f.d)
        total += float(np.sum(_norm(combos, f.norm) ** q))
    rhs = (total / (size * size)) ** (1.0 / q)
    if rhs == 0:
        return PisierResult(lhs, rhs, 0.0 if lhs == 0 else math.inf)
    return PisierResult(lhs, rhs, lhs / rhs)


def pisier_factor(n: int, s: float) -> float:
    """e^{ns} log(e^s / (e^s - 1)), the factor in the heat-semigroup proof for fixed s > 0."""
    return math.exp(n * s) * math.log(math.exp(s) / math.expm1(s))


@dataclass(frozen=True)
class FactorSweep:
    s: float
    factor: float
    log_n: float


def pisier_factor_sweep(n: int) -> FactorSweep:
    """Minimise :func:`pisier_factor` over s > 0 (searched in log s)."""
    if n < 1:
        raise InvalidParameter("n must be >= 1")
    res = minimize_scalar(lambda u: pisier_factor(n, math.exp(u)), bounds=(-30.0, 5.0), method="bounded",
                          options={"xatol": 1e-10})
    return FactorSweep(math.exp(res.x), float(res.fun), math.log(n))


class CubeMap:
    """A map from {-1,1}^n into the points of a :class:`FiniteMetric`."""

    def __init__(self, metric: FiniteMetric, points):
        pts = np.asarray(points, dtype=np.int64)
        n = pts.size.bit_length() - 1
        if (1 << n) != pts.size:
            raise InvalidParameter(f"need 2^n points, got {pts.size}")
        if pts.min() < 0 or pts.max() >= metric.n:
            raise InvalidParameter("point ids outside the metric")
        self.metric = metric
        self.points = pts
        self.n = n


def _pair_distances(f, i, j) -> np.ndarray:
    if isinstance(f, CubeMap):
        return f.metric.dist[f.points[i], f.points[j]]
    return _norm(f.values[i] - f.values[j], f.norm)


def _diagonal_and_edges(f, p: float):
    """E d(f eps, f(-eps))^p and sum_i E d(f eps, f eps^i)^p."""
    n = f.n
    idx = np.arange(1 << n)
    diag = _pair_distances(f, idx, idx ^ ((1 << n) - 1))
    edges = sum(float(np.mean(_pair_distances(f, idx, idx ^ (1 << b)) ** p)) for b in range(n))
    return diag, edges


def metric_type_constant(f, p: float, variant: str = "plain") -> float:
    """Smallest T for which this f satisfies the chosen type-p inequality.

    plain:  E d(diag)     <= T (sum_i E d(edge_i)^p)^(1/p)
    enflo:  E d(diag)^p   <= T^p sum_i E d(edge_i)^p
    bmw:    E d(diag)^2   <= T^2 n^(2/p - 1) sum_i E d(edge_i)^2

    Diagonals are pairs (eps, -eps); edges flip one coordinate. Returns 0 when
    both sides vanish.
    """
    if p < 1:
        raise InvalidParameter("p must be >= 1")
    n = f.n
    if variant == "plain":
        diag, edges = _diagonal_and_edges(f, p)
        num, den = float(diag.mean()), edges ** (1.0 / p)
    elif variant == "enflo":
        diag, edges = _diagonal_and_edges(f, p)
        num, den = float(np.mean(diag ** p)) ** (1.0 / p), edges ** (1.0 / p)
    elif variant == "bmw":
        diag, edges = _diagonal_and_edges(f, 2.0)
        num, den = float(np.mean(diag ** 2)) ** 0.5, (n ** (2.0 / p - 1.0) * edges) ** 0.5
    else:
        raise InvalidParameter(f"unknown variant {variant!r}")
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return num / den


class TorusFunction:
    """f: Z_m^n -> target, values in row-major order over (x_1, ..., x_n).

    The target is either R^d with a norm (``values`` of shape (m^n, d)) or a
    :class:`FiniteMetric` (``values`` are point ids and ``metric`` is set).
    """

    def __init__(self, values, m: int, n: int, norm=2.0, metric: FiniteMetric | None = None):
        if m < 2 or m % 2:
            raise InvalidParameter(f"m must be even and >= 2, got {m}")
        if n > 3 or m > 16:
            raise DimensionTooLarge("torus sums limited to n <= 3, m <= 16")
        v = np.asarray(values)
        if v.shape[0] != m ** n:
            raise InvalidParameter(f"need m^n = {m ** n} values, got {v.shape[0]}")
        if metric is None:
            v = v.astype(np.float64)
            if v.ndim == 1:
                v = v[:, None]
        else:
            v = v.astype(np.int64)
        self.values = v
        self.m = m
        self.n = n
        self.norm = norm
        self.metric = metric

    def grid(self) -> np.ndarray:
        shape = (self.m,) * self.n
        return self.values.reshape(shape + self.values.shape[1:])

    def distances(self, a, b) -> np.ndarray:
        if self.metric is not None:
            return self.metric.dist[a, b]
        return _norm(a - b, self.norm)


def _shift(grid, n: int, offsets):
    """grid at x + offsets (so the value at x is f(x + offsets))."""
    out = grid
    for axis, o in enumerate(offsets):
        if o:
            out = np.roll(out, -o, axis=axis)
    return out


@dataclass(frozen=True)
class CotypeResult:
    constant: float
    lhs: float
    rhs: float

    def __iter__(self):
        return iter((self.constant, self.lhs, self.rhs))


def metric_cotype_constant(f: TorusFunction, q: float) -> CotypeResult:
    """Smallest C with sum_j sum_x d(f(x + m/2 e_j), f(x))^q <= (Cm)^q 3^-n sum_eps sum_x d(f(x+eps), f(x))^q."""
    if q < 1:
        raise InvalidParameter("q must be >= 1")
    grid = f.grid()
    n, m = f.n, f.m
    lhs = 0.0
    for j in range(n):
        off = [0] * n
        off[j] = m // 2
        lhs += float(np.sum(f.distances(_shift(grid, n, off), grid) ** q))
    rhs = 0.0
    for eps in np.ndindex(*(3,) * n):
        off = [e - 1 for e in eps]
        if any(off):
            rhs += float(np.sum(f.distances(_shift(grid, n, off), grid) ** q))
    if rhs == 0:
        return CotypeResult(0.0 if lhs == 0 else math.inf, lhs, rhs)
    return CotypeResult((lhs * 3 ** n / (m ** q * rhs)) ** (1.0 / q), lhs, rhs)


TWO_POINTS = FiniteMetric(np.array([[0.0, 1.0], [1.0, 0.0]]))


def two_point_cotype(n: int, m: int, q: float = 2.0, seeds=range(100)) -> float:
    """Mean cotype constant of uniformly random f: Z_m^n -> {x0, y0} with d(x0, y0) = 1.

    For such f, C is close to n^(1/q) / m, so small m forces large C.
    """
    vals = [
        metric_cotype_constant(
            TorusFunction(np.random.default_rng(s).integers(0, 2, size=m ** n), m, n, metric=TWO_POINTS), q
        ).constant
        for s in seeds
    ]
    return float(np.mean(vals))


def cube_distortion_lower(n: int, p: float, T: float) -> float:
    """n^(1 - 1/p) / T: distortion lower bound for ({-1,1}^n, l_1) into a space of metric type p with constant T."""
    if T <= 0:
        raise InvalidParameter("T must be positive")
    return n ** (1.0 - 1.0 / p) / T
