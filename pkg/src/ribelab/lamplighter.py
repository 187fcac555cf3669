"""Word metric of the lamplighter group Z wr Z and its random-walk drift.

Generators: move the lamplighter one site left or right, or add +1 / -1 to
the lamp at the current site.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidParameter

GENERATORS = ("L", "R", "+", "-")


@dataclass(frozen=True)
class LampConfig:
    lamps: dict = field(default_factory=dict)
    position: int = 0

    def __post_init__(self):
        clean = {int(z): int(v) for z, v in self.lamps.items() if v != 0}
        object.__setattr__(self, "lamps", clean)

    def key(self):
        return (tuple(sorted(self.lamps.items())), self.position)

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        return isinstance(other, LampConfig) and self.key() == other.key()

    def apply(self, gen: str) -> "LampConfig":
        if gen == "L":
            return LampConfig(self.lamps, self.position - 1)
        if gen == "R":
            return LampConfig(self.lamps, self.position + 1)
        delta = 1 if gen == "+" else -1
        lamps = dict(self.lamps)
        lamps[self.position] = lamps.get(self.position, 0) + delta
        return LampConfig(lamps, self.position)


IDENTITY = LampConfig()


def _travel(start: int, end: int, lo: int, hi: int) -> int:
    return min(abs(start - lo) + (hi - lo) + abs(hi - end), abs(start - hi) + (hi - lo) + abs(lo - end))


def lamplighter_distance(a: LampConfig, b: LampConfig) -> int:
    """Lamp adjustments plus the shortest tour from a's position over the differing sites to b's."""
    sites = set(a.lamps) | set(b.lamps)
    diff = {z: a.lamps.get(z, 0) - b.lamps.get(z, 0) for z in sites}
    diff = {z: v for z, v in diff.items() if v}
    marks = list(diff) + [a.position, b.position]
    lo, hi = min(marks), max(marks)
    return sum(abs(v) for v in diff.values()) + _travel(a.position, b.position, lo, hi)


def word_ball(radius: int) -> dict:
    """BFS distances from the identity for every element within ``radius``."""
    dist = {IDENTITY: 0}
    queue = deque([IDENTITY])
    while queue:
        g = queue.popleft()
        d = dist[g]
        if d == radius:
            continue
        for gen in GENERATORS:
            h = g.apply(gen)
            if h not in dist:
                dist[h] = d + 1
                queue.append(h)
    return dist


def _distance_to_identity(lamps: np.ndarray, pos: np.ndarray, offset: int) -> np.ndarray:
    """Vectorised lamplighter_distance(., identity) over trials (rows of ``lamps``)."""
    on = lamps != 0
    width = lamps.shape[1]
    sites = np.arange(width) - offset
    big = np.iinfo(np.int64).max
    lo = np.where(on, sites, big).min(axis=1)
    hi = np.where(on, sites, -big).max(axis=1)
    lo = np.minimum(np.minimum(lo, 0), pos)
    hi = np.maximum(np.maximum(hi, 0), pos)
    travel = np.minimum(np.abs(pos - lo) + (hi - lo) + hi, np.abs(pos - hi) + (hi - lo) + np.abs(lo))
    return np.abs(lamps).sum(axis=1, dtype=np.int64) + travel


@dataclass(frozen=True)
class DriftEstimate:
    times: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray

    def slope(self, t_min: float = 1e2, t_max: float = 1e4) -> float:
        """Least-squares slope of log mean against log t over [t_min, t_max]."""
        sel = (self.times >= t_min) & (self.times <= t_max) & (self.times > 0)
        return float(np.polyfit(np.log(self.times[sel]), np.log(self.mean[sel]), 1)[0])


def lamplighter_drift(t_max: int, trials: int, seed: int = 0, times=None) -> DriftEstimate:
    """Monte Carlo mean of d(W_t, e) for the uniform 4-generator walk.

    Trial i draws its steps from ``default_rng(seed + i)``, so results do not
    depend on how trials are batched. ``times`` defaults to about forty
    log-spaced checkpoints in [1, t_max] plus t = 0.
    """
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    if t_max < 0:
        raise InvalidParameter("t_max must be >= 0")
    if times is None:
        times = np.unique(np.concatenate(([0], np.geomspace(1, max(t_max, 1), 40).round().astype(np.int64))))
        times = times[times <= t_max]
    times = np.asarray(times, dtype=np.int64)
    steps = np.stack([np.random.default_rng(seed + i).integers(0, 4, size=t_max, dtype=np.int8) for i in range(trials)])
    offset = t_max + 1
    lamps = np.zeros((trials, 2 * offset + 1), dtype=np.int32)
    pos = np.zeros(trials, dtype=np.int64)
    rows = np.arange(trials)
    mean = np.zeros(times.size)
    err = np.zeros(times.size)
    checkpoints = {int(t): i for i, t in enumerate(times)}
    for t in range(t_max + 1):
        if t in checkpoints:
            d = _distance_to_identity(lamps, pos, offset).astype(np.float64)
            i = checkpoints[t]
            mean[i] = d.mean()
            err[i] = d.std(ddof=1) / np.sqrt(trials) if trials > 1 else 0.0
        if t == t_max:
            break
        s = steps[:, t]
        pos += (s == 1).astype(np.int64) - (s == 0)
        bump = (s == 2).astype(np.int32) - (s == 3)
        lamps[rows, pos + offset] += bump
    return DriftEstimate(times, mean, err)
