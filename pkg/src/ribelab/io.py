"""Plain-text interchange formats.

Every writer starts its file with a ``# ribelab <kind> v1`` comment line;
readers skip blank lines and lines starting with ``#``. Floats are written
with ``repr`` so a write/read cycle is lossless.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .cube import CubeFunction
from .exceptions import InvalidMetric, ParseError, RibeError
from .metric import FiniteMetric, Graph
from .oracle import LcaIndex, OracleLevel, OracleStructure, RankingStructure
from .ramsey import SkeletonResult, certified_distortion
from .ultrametric import HstTree
from .walks import MarkovChain

ORACLE_MAGIC = "RIBE-ORACLE"
FORMAT_VERSION = "v1"


def _header(kind: str) -> str:
    return f"# ribelab {kind} {FORMAT_VERSION}\n"


def fmt_float(x) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 2 ** 53:
        return str(int(x))
    return repr(x)


class _Lines:
    """Meaningful lines of a text source, with 1-based line numbers for errors."""

    def __init__(self, text: str, path):
        self.path = str(path)
        self.items = [
            (no, line.split())
            for no, line in enumerate(text.splitlines(), start=1)
            if line.strip() and not line.lstrip().startswith("#")
        ]
        self.pos = 0

    @classmethod
    def open(cls, path):
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read file: {exc.strerror or exc}", path) from exc
        except UnicodeDecodeError as exc:
            raise ParseError("file is not text", path) from exc
        return cls(text, path)

    def error(self, message, line=None):
        if line is None:
            line = self.items[self.pos - 1][0] if 0 < self.pos <= len(self.items) else (
                self.items[-1][0] if self.items else 1)
        return ParseError(message, self.path, line)

    def next(self, what: str):
        if self.pos >= len(self.items):
            last = self.items[-1][0] if self.items else 1
            raise ParseError(f"unexpected end of file, expected {what}", self.path, last)
        item = self.items[self.pos]
        self.pos += 1
        return item

    def done(self):
        if self.pos < len(self.items):
            no, _ = self.items[self.pos]
            raise ParseError("unexpected trailing content", self.path, no)

    def tokens(self, count: int, what: str):
        """Next ``count`` tokens across lines, each with its line number."""
        out = []
        while len(out) < count:
            no, toks = self.next(what)
            out.extend((no, t) for t in toks)
        if len(out) > count:
            raise ParseError(f"too many values for {what}", self.path, out[count][0])
        return out


def _int(tok: str, lines: _Lines, no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", lines.path, no) from None


def _float(tok: str, lines: _Lines, no: int, what: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"expected number {what}, got {tok!r}", lines.path, no) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite {what}", lines.path, no)
    return v


def _fields(lines: _Lines, what: str, lo: int, hi: int | None = None):
    no, toks = lines.next(what)
    hi = lo if hi is None else hi
    if not lo <= len(toks) <= hi:
        want = str(lo) if lo == hi else f"{lo}-{hi}"
        raise ParseError(f"{what}: expected {want} fields, got {len(toks)}", lines.path, no)
    return no, toks


# graphs ---------------------------------------------------------------------

def format_graph(g: Graph) -> str:
    out = [_header("graph"), f"{g.n} {g.m}\n"]
    for u, v, w in g.edges:
        out.append(f"{u} {v}\n" if not g.weighted else f"{u} {v} {fmt_float(w)}\n")
    return "".join(out)


def write_graph(g: Graph, path):
    Path(path).write_text(format_graph(g))


def read_graph(path) -> Graph:
    lines = _Lines.open(path)
    no, toks = _fields(lines, "graph header 'n m'", 2)
    n = _int(toks[0], lines, no, "vertex count")
    m = _int(toks[1], lines, no, "edge count")
    if n < 0 or m < 0:
        raise ParseError("counts must be nonnegative", lines.path, no)
    edges = []
    for _ in range(m):
        no, toks = _fields(lines, "edge 'u v [w]'", 2, 3)
        u = _int(toks[0], lines, no, "endpoint")
        v = _int(toks[1], lines, no, "endpoint")
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"endpoint outside 0..{n - 1}", lines.path, no)
        if len(toks) == 3:
            w = _float(toks[2], lines, no, "weight")
            if w <= 0:
                raise ParseError("weights must be positive", lines.path, no)
            edges.append((u, v, w))
        else:
            edges.append((u, v))
    lines.done()
    try:
        return Graph(n, tuple(edges))
    except RibeError as exc:
        raise ParseError(str(exc), lines.path) from exc


# metrics --------------------------------------------------------------------

def format_metric(m: FiniteMetric) -> str:
    out = [_header("metric"), f"{m.n}\n"]
    d = m.dist
    for i in range(m.n - 1):
        out.append(" ".join(fmt_float(x) for x in d[i, i + 1:]) + "\n")
    return "".join(out)


def write_metric(m: FiniteMetric, path):
    Path(path).write_text(format_metric(m))


def read_metric(path, check_triangle_inequality: bool = True) -> FiniteMetric:
    lines = _Lines.open(path)
    no, toks = _fields(lines, "metric header 'n'", 1)
    n = _int(toks[0], lines, no, "point count")
    if n < 1:
        raise ParseError("metric needs at least one point", lines.path, no)
    count = n * (n - 1) // 2
    vals = np.empty(count)
    for idx, (no, tok) in enumerate(lines.tokens(count, "upper-triangular distances") if count else []):
        vals[idx] = _float(tok, lines, no, "distance")
        if vals[idx] <= 0:
            raise ParseError("distances between distinct points must be positive", lines.path, no)
    lines.done()
    if n == 1:
        return FiniteMetric(np.zeros((1, 1)), validate=False)
    try:
        return FiniteMetric(vals, check_triangle_inequality=check_triangle_inequality)
    except InvalidMetric as exc:
        raise ParseError(str(exc), lines.path) from exc


# HSTs and skeletons ---------------------------------------------------------

def _hst_rows(t: HstTree, labels=None) -> list:
    """HST body; ``labels`` maps tree-local point ids to the ids written out."""
    rows = [f"{t.n_nodes} {t.n_points}\n"]
    for v in range(t.n_nodes):
        p = int(t.point_of[v])
        if p >= 0 and labels is not None:
            p = int(labels[p])
        rows.append(f"{v} {int(t.parent[v])} {fmt_float(t.diameter[v])} {p}\n")
    return rows


def _parse_hst(lines: _Lines):
    """Returns (tree, leaf labels) where tree points are ranks of the written labels."""
    no, toks = _fields(lines, "HST header 'nodes leaves'", 2)
    nodes = _int(toks[0], lines, no, "node count")
    leaves = _int(toks[1], lines, no, "leaf count")
    if nodes < 1 or leaves < 1:
        raise ParseError("HST needs at least one node and one leaf", lines.path, no)
    parent = np.empty(nodes, dtype=np.int64)
    diam = np.empty(nodes)
    label = np.empty(nodes, dtype=np.int64)
    first_no = None
    for v in range(nodes):
        no, toks = _fields(lines, "HST node 'id parent diameter leaf_point'", 4)
        first_no = first_no or no
        if _int(toks[0], lines, no, "node id") != v:
            raise ParseError(f"node ids must be 0..{nodes - 1} in order", lines.path, no)
        parent[v] = _int(toks[1], lines, no, "parent")
        if not -1 <= parent[v] < nodes:
            raise ParseError("parent outside the node range", lines.path, no)
        diam[v] = _float(toks[2], lines, no, "diameter")
        label[v] = _int(toks[3], lines, no, "leaf point")
    written = np.sort(label[label >= 0])
    if written.size != leaves or np.unique(written).size != leaves:
        raise ParseError(f"expected {leaves} distinct leaf points", lines.path, first_no)
    point_of = np.where(label >= 0, np.searchsorted(written, label), -1)
    try:
        tree = HstTree(parent, diam, point_of)
    except RibeError as exc:
        raise ParseError(f"invalid HST: {exc}", lines.path, first_no) from exc
    return tree, written


def format_hst(t: HstTree) -> str:
    return "".join([_header("hst")] + _hst_rows(t))


def write_hst(t: HstTree, path):
    Path(path).write_text(format_hst(t))


def read_hst(path) -> HstTree:
    lines = _Lines.open(path)
    tree, labels = _parse_hst(lines)
    lines.done()
    if not np.array_equal(labels, np.arange(labels.size)):
        raise lines.error("leaf points must be 0..leaves-1")
    return tree


def _skeleton_rows(epsilon, seed, D, subset, tree, labels=None) -> list:
    rows = [f"{fmt_float(epsilon)} {seed} {fmt_float(D)}\n"]
    rows += _hst_rows(tree, labels)
    rows.append("S: " + " ".join(str(int(s)) for s in subset) + "\n")
    return rows


def _parse_subset(lines: _Lines):
    no, toks = lines.next("'S:' line")
    if not toks or toks[0] != "S:":
        raise ParseError("expected a line starting with 'S:'", lines.path, no)
    return np.array([_int(t, lines, no, "subset id") for t in toks[1:]], dtype=np.int64)


def format_skeleton(res: SkeletonResult) -> str:
    return "".join([_header("skeleton")] + _skeleton_rows(
        res.epsilon, res.seed, res.certified_distortion, res.subset, res.tree))


def write_skeleton(res: SkeletonResult, path):
    Path(path).write_text(format_skeleton(res))


def read_skeleton(path) -> SkeletonResult:
    lines = _Lines.open(path)
    no, toks = _fields(lines, "skeleton header 'epsilon seed certified_distortion'", 3)
    eps = _float(toks[0], lines, no, "epsilon")
    seed = _int(toks[1], lines, no, "seed")
    D = _float(toks[2], lines, no, "certified distortion")
    tree, _ = _parse_hst(lines)
    subset = _parse_subset(lines)
    lines.done()
    return SkeletonResult(subset, tree, D, eps, seed)


# oracle dumps ---------------------------------------------------------------

def format_oracle(o: OracleStructure, ranking: RankingStructure | None = None) -> str:
    out = [f"{ORACLE_MAGIC} {FORMAT_VERSION} {o.n} {fmt_float(o.epsilon)} {o.seed} "
           f"{fmt_float(o.certified_distortion)}\n",
           f"levels {o.m}\n"]
    for lv in o.levels:
        out += _skeleton_rows(o.epsilon, lv.seed, o.certified_distortion, lv.subset, lv.tree, lv.points)
    if ranking is not None:
        out.append(f"ranking {fmt_float(ranking.certified_factor)}\n")
        out += [" ".join(map(str, row)) + "\n" for row in ranking.order.tolist()]
    return "".join(out)


def write_oracle(o: OracleStructure, path, ranking: RankingStructure | None = None):
    Path(path).write_text(format_oracle(o, ranking))


def read_oracle(path):
    """Returns ``(oracle, ranking or None)``."""
    lines = _Lines.open(path)
    no, toks = lines.next("oracle header")
    if len(toks) != 6 or toks[0] != ORACLE_MAGIC:
        raise ParseError(f"expected '{ORACLE_MAGIC} v1 n epsilon seed D'", lines.path, no)
    if toks[1] != FORMAT_VERSION:
        raise ParseError(f"unsupported oracle version {toks[1]!r}", lines.path, no)
    n = _int(toks[2], lines, no, "n")
    eps = _float(toks[3], lines, no, "epsilon")
    seed = _int(toks[4], lines, no, "seed")
    header_d = _float(toks[5], lines, no, "certified distortion")
    if header_d != certified_distortion(eps):
        raise ParseError(f"header D = {toks[5]} does not match epsilon", lines.path, no)
    no, toks = _fields(lines, "'levels k'", 2)
    if toks[0] != "levels":
        raise ParseError("expected 'levels k'", lines.path, no)
    k = _int(toks[1], lines, no, "level count")
    levels = []
    for _ in range(k):
        no, toks = _fields(lines, "level header 'epsilon seed certified_distortion'", 3)
        lseed = _int(toks[1], lines, no, "level seed")
        tree, points = _parse_hst(lines)
        subset = _parse_subset(lines)
        if points.size and (points[0] < 0 or points[-1] >= n):
            raise ParseError("leaf point outside 0..n-1", lines.path, no)
        levels.append(OracleLevel(subset, points, tree, LcaIndex(tree), lseed))
    covered = np.concatenate([lv.subset for lv in levels]) if levels else np.array([], dtype=np.int64)
    if np.sort(covered).tolist() != list(range(n)):
        raise lines.error("level subsets must partition 0..n-1")
    oracle = OracleStructure(n, levels, eps, seed)
    ranking = None
    if lines.pos < len(lines.items):
        no, toks = _fields(lines, "'ranking factor'", 2)
        if toks[0] != "ranking":
            raise ParseError("expected 'ranking factor'", lines.path, no)
        factor = _float(toks[1], lines, no, "ranking factor")
        order = np.empty((n, n), dtype=np.int64)
        for x in range(n):
            no, toks = _fields(lines, "ranking row", n)
            order[x] = [_int(t, lines, no, "point id") for t in toks]
            if sorted(order[x].tolist()) != list(range(n)):
                raise ParseError("ranking row is not a permutation", lines.path, no)
        ranking = RankingStructure(order, factor)
    lines.done()
    return oracle, ranking


# Markov chains --------------------------------------------------------------

def format_chain(c: MarkovChain) -> str:
    A = c.dense()
    out = [_header("chain"), f"{c.m}\n"]
    out += [" ".join(fmt_float(x) for x in row) + "\n" for row in A]
    law = c.pi if c.pi is not None else c.initial
    out.append(" ".join(fmt_float(x) for x in law) + "\n")
    return "".join(out)


def write_chain(c: MarkovChain, path):
    Path(path).write_text(format_chain(c))


def read_chain(path) -> MarkovChain:
    lines = _Lines.open(path)
    no, toks = _fields(lines, "chain header 'm'", 1)
    m = _int(toks[0], lines, no, "state count")
    if m < 1:
        raise ParseError("chain needs at least one state", lines.path, no)
    rows = []
    for _ in range(m + 1):
        no, toks = _fields(lines, "chain row", m)
        rows.append([_float(t, lines, no, "probability") for t in toks])
    lines.done()
    try:
        return MarkovChain(np.array(rows[:m]), pi=np.array(rows[m]))
    except RibeError as exc:
        raise ParseError(f"invalid chain: {exc}", lines.path) from exc


# cube functions -------------------------------------------------------------

def format_cube_function(f: CubeFunction) -> str:
    out = [_header("cube-function"), f"{f.n} {f.d}\n"]
    out += [" ".join(fmt_float(x) for x in row) + "\n" for row in f.values]
    return "".join(out)


def write_cube_function(f: CubeFunction, path):
    Path(path).write_text(format_cube_function(f))


def read_cube_function(path, norm=2.0) -> CubeFunction:
    lines = _Lines.open(path)
    no, toks = _fields(lines, "cube function header 'n d'", 2)
    n = _int(toks[0], lines, no, "dimension n")
    d = _int(toks[1], lines, no, "codomain dimension d")
    if not 0 <= n <= 16 or d < 1:
        raise ParseError("need 0 <= n <= 16 and d >= 1", lines.path, no)
    vals = np.empty((1 << n, d))
    for i in range(1 << n):
        no, toks = _fields(lines, "cube function row", d)
        vals[i] = [_float(t, lines, no, "value") for t in toks]
    lines.done()
    return CubeFunction(vals, norm)
