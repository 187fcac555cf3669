"""Command-line entry point: ``ribelab <subcommand> ...``.

Exit status is 0 when every check in the report passes, 1 when a check
fails and 2 on bad input (unreadable or malformed files, invalid options).
"""

from __future__ import annotations

import argparse
import math
import os
import shlex
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import cube, io, lamplighter, metric, oracle, ramsey, spectral, walks
from .exceptions import ParseError, RibeError

SEED_ENV = "RIBE_SEED"


@dataclass
class Report:
    """Ordered key/value report plus named pass/fail checks.

    Values are kept as strings so a report written as TSV reads back equal.
    """

    command: str
    values: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    def add(self, key, value):
        self.values.append((str(key), _fmt(value)))

    def check(self, name, ok, detail=""):
        self.checks.append((str(name), bool(ok), str(detail)))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def to_text(self) -> str:
        lines = [f"# {self.command}"]
        width = max((len(k) for k, _ in self.values), default=0)
        lines += [f"{k.ljust(width)}  {v}" for k, v in self.values]
        lines += [f"{'PASS' if ok else 'FAIL'} {name}" + (f"  ({d})" if d else "") for name, ok, d in self.checks]
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        lines = [f"command\t{self.command}"]
        lines += [f"value\t{k}\t{v}" for k, v in self.values]
        lines += [f"check\t{name}\t{'pass' if ok else 'fail'}\t{d}" for name, ok, d in self.checks]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, text: str) -> "Report":
        rep = None
        for no, line in enumerate(text.splitlines(), start=1):
            if not line:
                continue
            parts = line.split("\t")
            kind = parts[0]
            if kind == "command" and len(parts) == 2:
                rep = cls(parts[1])
            elif rep is None:
                raise ParseError("report must start with a command row", None, no)
            elif kind == "value" and len(parts) == 3:
                rep.values.append((parts[1], parts[2]))
            elif kind == "check" and len(parts) == 4 and parts[2] in ("pass", "fail"):
                rep.checks.append((parts[1], parts[2] == "pass", parts[3]))
            else:
                raise ParseError(f"malformed report row {line!r}", None, no)
        if rep is None:
            raise ParseError("empty report")
        return rep


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        return " ".join(_fmt(x) for x in v)
    return str(v).replace("\t", " ").replace("\n", " ")


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {SEED_ENV} must be an integer, got {raw!r}") from None


# subcommands ----------------------------------------------------------------

def cmd_gen(args, rep: Report):
    if args.named:
        obj = metric.gen_named(args.named)
    elif args.tree:
        obj = metric.gen_tree(*args.tree)
    elif args.laakso is not None:
        obj = metric.gen_laakso(args.laakso)
    elif args.hypercube is not None:
        obj = metric.hypercube_graph(args.hypercube)
    elif args.random_regular:
        n, k = args.random_regular
        obj = metric.gen_random_regular(n, k, girth_min=args.girth_min, seed=args.seed)
    elif args.points:
        n, dim = args.points
        obj = metric.random_point_metric(n, dim, seed=args.seed)
    elif args.random_graph is not None:
        obj = metric.random_graph_metric(args.random_graph, seed=args.seed)
    else:
        from .ultrametric import random_hst

        obj = random_hst(args.random_ultrametric, seed=args.seed).to_metric()
    if isinstance(obj, metric.Graph):
        text = io.format_graph(obj)
        rep.add("kind", "graph")
        rep.add("n", obj.n)
        rep.add("m", obj.m)
    else:
        text = io.format_metric(obj)
        rep.add("kind", "metric")
        rep.add("n", obj.n)
    rep.add("seed", args.seed)
    _emit(text, args.out, rep)


def _emit(text: str, out, rep: Report):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        rep.add("out", out)
    else:
        sys.stdout.write(text)


def _load_metric(args) -> metric.FiniteMetric:
    if getattr(args, "metric", None):
        return io.read_metric(args.metric, check_triangle_inequality=not args.skip_triangle_check)
    if getattr(args, "graph", None):
        return metric.metric_from_graph(io.read_graph(args.graph))
    raise RibeError("need --metric or --graph")


def cmd_metric(args, rep: Report):
    g = io.read_graph(args.graph)
    m = metric.metric_from_graph(g)
    rep.add("n", m.n)
    rep.add("diameter", m.diameter())
    rep.add("min_distance", m.min_distance())
    rep.add("girth", metric.girth(g))
    _emit(io.format_metric(m), args.out, rep)


def cmd_skeleton(args, rep: Report):
    m = _load_metric(args)
    res = ramsey.extract_skeleton(m, args.epsilon, args.seed)
    rep.add("n", m.n)
    rep.add("epsilon", args.epsilon)
    rep.add("seed", args.seed)
    rep.add("skeleton_size", res.size)
    rep.add("levels", len(res.scales))
    rep.add("certified_distortion", res.certified_distortion)
    measured = res.measured_distortion(m)
    rep.add("measured_distortion", measured)
    dom = res.tree.to_metric().dist >= m.dist * (1 - 1e-12)
    rep.check("dominating", bool(dom.all()))
    rep.check("skeleton_distortion", measured <= res.certified_distortion * (1 + 1e-12),
              f"{measured:.6g} <= {res.certified_distortion:.6g}")
    if args.out:
        io.write_skeleton(res, args.out)
        rep.add("out", args.out)


def cmd_build_oracle(args, rep: Report):
    m = _load_metric(args)
    o = oracle.build_oracle(m, args.epsilon, args.seed)
    ranking = None if args.no_ranking else oracle.build_ranking(o, m)
    rep.add("n", m.n)
    rep.add("epsilon", args.epsilon)
    rep.add("seed", args.seed)
    rep.add("levels", o.m)
    rep.add("level_sizes", [lv.subset.size for lv in o.levels])
    rep.add("size_scalars", o.size())
    rep.add("certified_distortion", o.certified_distortion)
    io.write_oracle(o, args.out, ranking)
    rep.add("out", args.out)


def cmd_query(args, rep: Report):
    o, _ = io.read_oracle(args.oracle)
    rep.add("i", args.i)
    rep.add("j", args.j)
    rep.add("estimate", o.query(args.i, args.j))


def cmd_rank(args, rep: Report):
    _, ranking = io.read_oracle(args.oracle)
    if ranking is None:
        raise RibeError(f"{args.oracle} has no ranking section (built with --no-ranking)")
    rep.add("x", args.x)
    if args.i is not None:
        rep.add("i", args.i)
        rep.add("point", oracle.rank_query(ranking, args.x, args.i))
    if args.u is not None:
        rep.add("u", args.u)
        rep.add("position", oracle.rank_inverse(ranking, args.x, args.u))


def _sandwich(o, m):
    E = o.distance_matrix()
    d = m.dist
    off = ~np.eye(m.n, dtype=bool)
    ratio = np.ones_like(d)
    ratio[off] = E[off] / d[off]
    low = bool(np.all(E[off] >= d[off]))
    high = bool(np.all(E[off] <= o.certified_distortion * d[off]))
    return ratio[off], low, high


def cmd_verify(args, rep: Report):
    o, ranking = io.read_oracle(args.oracle)
    m = _load_metric(args)
    if m.n != o.n:
        raise RibeError(f"oracle has {o.n} points, metric has {m.n}")
    ratio, low, high = _sandwich(o, m)
    rep.add("n", o.n)
    rep.add("pairs", o.n * (o.n - 1) // 2)
    rep.add("max_distortion", float(ratio.max()) if ratio.size else 1.0)
    rep.check("lower_bound", low, "d <= E")
    rep.check("upper_bound", high, f"E <= {o.certified_distortion:g} d")
    if ranking is not None:
        rep.check("ranking_factor", _ranking_ok(ranking, m), f"factor {ranking.certified_factor:g}")


def _ranking_ok(r, m) -> bool:
    """d(x, pi(i)) <= F d(x, pi(j)) for all i < j, via running maxima of the ordered rows."""
    d = np.take_along_axis(m.dist, r.order, axis=1)
    prefix_max = np.maximum.accumulate(d, axis=1)
    return bool(np.all(prefix_max[:, :-1] <= r.certified_factor * d[:, 1:] * (1 + 1e-12)))


def cmd_bench(args, rep: Report):
    m = _load_metric(args)
    if args.oracle:
        o, _ = io.read_oracle(args.oracle)
    else:
        o = oracle.build_oracle(m, args.epsilon, args.seed)
    rng = np.random.default_rng(args.seed)
    i = rng.integers(0, o.n, size=args.queries).tolist()
    j = rng.integers(0, o.n, size=args.queries).tolist()
    lat = np.empty(args.queries, dtype=np.int64)
    q = o.query
    clock = time.perf_counter_ns
    for k in range(args.queries):
        a, b = i[k], j[k]
        t0 = clock()
        q(a, b)
        lat[k] = clock() - t0
    ratio, low, high = _sandwich(o, m)
    rep.add("n", o.n)
    rep.add("epsilon", o.epsilon)
    rep.add("seed", o.seed)
    rep.add("queries", args.queries)
    rep.add("latency_median_ns", float(np.median(lat)) if lat.size else 0.0)
    rep.add("latency_p99_ns", float(np.percentile(lat, 99)) if lat.size else 0.0)
    rep.add("size_scalars", o.size())
    rep.add("max_distortion", float(ratio.max()) if ratio.size else 1.0)
    if ratio.size:
        bins = np.floor(np.log2(ratio)).astype(np.int64)
        for b, c in zip(*np.unique(bins, return_counts=True)):
            rep.add(f"hist_log2_{int(b)}", int(c))
    rep.check("sandwich", low and high, f"d <= E <= {o.certified_distortion:g} d")


def _chain_and_metric(args):
    g = io.read_graph(args.graph)
    m = metric.metric_from_graph(g)
    if args.chain:
        c = io.read_chain(args.chain)
    else:
        c = walks.stationary_walk(g)
    if c.m != m.n:
        raise RibeError(f"chain has {c.m} states, graph has {m.n} vertices")
    return c, m


def cmd_walk_drift(args, rep: Report):
    c, m = _chain_and_metric(args)
    init = None
    if args.start is not None:
        init = np.zeros(c.m)
        init[args.start] = 1.0
    prof = walks.drift_profile(c, m, args.tmax, init=init)
    rep.add("tmax", args.tmax)
    rep.add("start", "stationary" if args.start is None else args.start)
    for t, v in enumerate(prof):
        rep.add(f"drift_{t}", float(v))


def cmd_walk_type(args, rep: Report):
    c, m = _chain_and_metric(args)
    rep.add("p", args.p)
    rep.add("M", args.M)
    for t in range(1, args.tmax + 1):
        rep.add(f"type_ratio_{t}", walks.markov_type_ratio(c, m, args.p, t))
    rep.add("distortion_lower_bound", walks.distortion_lower_bound(c, m, args.p, args.M, args.tmax))


def cmd_walk_convexity(args, rep: Report):
    if args.tree:
        k, n = args.tree
        T = args.tmax if args.tmax is not None else n
        res = walks.tree_convexity_functional(k, n, args.p, T)
        rep.add("chain", f"outward tree k={k} n={n}")
    else:
        if args.laakso is not None:
            c = walks.laakso_chain(args.laakso)
            m = metric.metric_from_graph(metric.gen_laakso(args.laakso))
            rep.add("chain", f"laakso k={args.laakso}")
        else:
            g = io.read_graph(args.graph)
            m = metric.metric_from_graph(g)
            c = io.read_chain(args.chain) if args.chain else walks.stationary_walk(g)
            if args.start is not None:
                c.start = np.eye(c.m)[args.start]
            rep.add("chain", args.graph)
        T = args.tmax if args.tmax is not None else 4 ** (args.laakso or 1)
        res = walks.markov_convexity_functional(c, m, args.p, T)
    rep.add("p", args.p)
    rep.add("T", T)
    rep.add("lhs", res.lhs)
    rep.add("rhs", res.rhs)
    rep.add("pi_lower", res.pi_lower)


def cmd_walk_lamplighter(args, rep: Report):
    est = lamplighter.lamplighter_drift(args.tmax, args.trials, args.seed)
    rep.add("tmax", args.tmax)
    rep.add("trials", args.trials)
    rep.add("seed", args.seed)
    for t, mean, err in zip(est.times, est.mean, est.stderr):
        rep.add(f"drift_{int(t)}", f"{float(mean)!r} +- {float(err)!r}")
    if args.tmax >= 100:
        rep.add("loglog_slope", est.slope(100, args.tmax))


def cmd_spectral(args, rep: Report):
    sub = args.spectral_cmd
    rep.add("k", args.k)
    if sub == "geronimus":
        rep.add("m", args.m)
        rep.add("polynomial", str(spectral.geronimus(args.k, args.m)))
        return
    g = io.read_graph(args.graph)
    if sub == "identity":
        res = spectral.verify_geronimus_identity(g, args.k, args.m)
        rep.add("m", args.m)
        rep.add("max_deviation", res.max_deviation)
        rep.check("geronimus_identity", res.holds)
    elif sub == "floor":
        res = spectral.lambda_min_floor(g, args.k, args.m)
        rep.add("m", args.m)
        rep.add("lambda_min", res.lambda_min)
        rep.add("floor", res.floor)
        rep.check("eigenvalue_floor", res.holds, f"{res.lambda_min:.10g} >= {res.floor:g}")
    else:
        if args.subset is not None:
            res = spectral.self_mixing_check(g, args.subset)
            rep.add("edges_in_s", res.edges_in_s)
            rep.add("bound", res.bound)
            rep.check("self_mixing", res.holds)
        else:
            bad = spectral.self_mixing_exhaustive(g)
            rep.add("subsets", 1 << g.n)
            rep.add("violations", bad)
            rep.check("self_mixing", bad == 0)


def _cube_function(args):
    if args.function:
        return io.read_cube_function(args.function, norm=args.norm)
    return cube.CubeFunction.random(args.n, args.d, seed=args.seed, norm=args.norm)


def cmd_cube(args, rep: Report):
    sub = args.cube_cmd
    if sub == "cotype":
        rep.add("n", args.n)
        rep.add("q", args.q)
        rep.add("trials", args.trials)
        seeds = range(args.seed, args.seed + args.trials)
        for mm in args.m:
            rep.add(f"mean_C_m{mm}", cube.two_point_cotype(args.n, mm, args.q, seeds))
            rep.add(f"reference_m{mm}", args.n ** (1.0 / args.q) / mm)
        return
    f = _cube_function(args)
    rep.add("n", f.n)
    rep.add("d", f.d)
    rep.add("norm", args.norm)
    rep.add("source", args.function or f"random seed={args.seed}")
    if sub == "transform":
        coeffs = cube.walsh_transform(f)
        back = cube.inverse_walsh(coeffs, f.norm).values
        rep.check("round_trip", np.max(np.abs(back - f.values)) <= 1e-10)
        if args.out:
            io.write_cube_function(cube.CubeFunction(coeffs, f.norm), args.out)
            rep.add("out", args.out)
    elif sub == "heat":
        h = cube.heat_semigroup(f, args.t)
        rep.add("t", args.t)
        rep.add("mean_norm_before", f.mean_norm())
        rep.add("mean_norm_after", h.mean_norm())
        rep.check("contraction", h.mean_norm() <= f.mean_norm() * (1 + 1e-12))
        rep.check("lower_heat_bound", h.mean_norm() >= math.exp(-f.n * args.t) * f.mean_norm() * (1 - 1e-12))
        if args.out:
            io.write_cube_function(h, args.out)
            rep.add("out", args.out)
    elif sub == "pisier":
        res = cube.pisier_ratio(f, args.q)
        sweep = cube.pisier_factor_sweep(max(f.n, 1))
        rep.add("q", args.q)
        rep.add("lhs", res.lhs)
        rep.add("rhs", res.rhs)
        rep.add("ratio", res.ratio)
        rep.add("best_s", sweep.s)
        rep.add("best_factor", sweep.factor)
        if args.q == 1:
            rep.check("heat_factor_bound", res.lhs <= sweep.factor * res.rhs * (1 + 1e-12))
    else:
        rep.add("p", args.p)
        rep.add("variant", args.variant)
        rep.add("T", cube.metric_type_constant(f, args.p, args.variant))


# parser ---------------------------------------------------------------------

def _positive_int(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {raw!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    seed = default_seed()
    p = argparse.ArgumentParser(prog="ribelab", description="Finite metric space laboratory.")
    p.add_argument("--format", choices=("text", "tsv"), default="text", help="report format")
    p.add_argument("--report", help="write the report here instead of stderr/stdout")
    p.add_argument("--threads", type=_positive_int, default=1,
                   help="worker threads; every computation is single-threaded, so results never depend on it")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, with_seed=True):
        if with_seed:
            sp.add_argument("--seed", type=int, default=seed, help=f"RNG seed (default ${SEED_ENV} or 0)")
        return sp

    g = common(sub.add_parser("gen", help="generate a graph or metric file"))
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--named", help="petersen, heawood, tutte_coxeter, cycle(m), torus(m,n)")
    src.add_argument("--tree", nargs=2, type=int, metavar=("K", "N"))
    src.add_argument("--laakso", type=int, metavar="K")
    src.add_argument("--hypercube", type=int, metavar="N")
    src.add_argument("--random-regular", nargs=2, type=int, metavar=("N", "K"))
    src.add_argument("--points", nargs=2, type=int, metavar=("N", "DIM"))
    src.add_argument("--random-graph", type=int, metavar="N")
    src.add_argument("--random-ultrametric", type=int, metavar="N")
    g.add_argument("--girth-min", type=int, default=3)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    mt = sub.add_parser("metric", help="shortest-path metric of a graph file")
    mt.add_argument("--graph", required=True)
    mt.add_argument("--out")
    mt.set_defaults(func=cmd_metric)

    def metric_input(sp):
        grp = sp.add_mutually_exclusive_group(required=True)
        grp.add_argument("--metric")
        grp.add_argument("--graph")
        sp.add_argument("--skip-triangle-check", action="store_true")

    sk = common(sub.add_parser("skeleton", help="extract an ultrametric skeleton"))
    metric_input(sk)
    sk.add_argument("--epsilon", type=float, default=0.5)
    sk.add_argument("--out")
    sk.set_defaults(func=cmd_skeleton)

    bo = common(sub.add_parser("build-oracle", help="build and dump a distance oracle"))
    metric_input(bo)
    bo.add_argument("--epsilon", type=float, default=0.5)
    bo.add_argument("--out", required=True)
    bo.add_argument("--no-ranking", action="store_true", help="omit the ranking section")
    bo.set_defaults(func=cmd_build_oracle)

    qu = sub.add_parser("query", help="approximate distance from an oracle dump")
    qu.add_argument("--oracle", required=True)
    qu.add_argument("--i", type=int, required=True)
    qu.add_argument("--j", type=int, required=True)
    qu.set_defaults(func=cmd_query)

    rk = sub.add_parser("rank", help="approximate ranking queries")
    rk.add_argument("--oracle", required=True)
    rk.add_argument("--x", type=int, required=True)
    rk.add_argument("--i", type=int, help="1-based rank to look up")
    rk.add_argument("--u", type=int, help="point whose rank to report")
    rk.set_defaults(func=cmd_rank)

    ve = sub.add_parser("verify", help="check an oracle dump against its metric")
    ve.add_argument("--oracle", required=True)
    metric_input(ve)
    ve.set_defaults(func=cmd_verify)

    be = common(sub.add_parser("bench", help="query latency, size and distortion histogram"))
    metric_input(be)
    be.add_argument("--oracle")
    be.add_argument("--epsilon", type=float, default=0.5)
    be.add_argument("--queries", type=int, default=10 ** 6)
    be.set_defaults(func=cmd_bench)

    wk = sub.add_parser("walk", help="exact random-walk functionals")
    wsub = wk.add_subparsers(dest="walk_cmd", required=True)
    for name, fn in (("drift", cmd_walk_drift), ("type", cmd_walk_type)):
        sp = wsub.add_parser(name)
        sp.add_argument("--graph", required=True)
        sp.add_argument("--chain")
        sp.add_argument("--tmax", type=int, default=8)
        sp.add_argument("--p", type=float, default=2.0)
        sp.set_defaults(func=fn)
        if name == "drift":
            sp.add_argument("--start", type=int)
        else:
            sp.add_argument("--M", type=float, default=1.0)
    cv = wsub.add_parser("convexity")
    grp = cv.add_mutually_exclusive_group(required=True)
    grp.add_argument("--tree", nargs=2, type=int, metavar=("K", "N"))
    grp.add_argument("--laakso", type=int, metavar="K")
    grp.add_argument("--graph")
    cv.add_argument("--chain")
    cv.add_argument("--start", type=int)
    cv.add_argument("--p", type=float, default=2.0)
    cv.add_argument("--tmax", type=int)
    cv.set_defaults(func=cmd_walk_convexity)
    ll = common(wsub.add_parser("lamplighter", help="Monte Carlo drift on Z wr Z"))
    ll.add_argument("--tmax", type=int, default=10 ** 4)
    ll.add_argument("--trials", type=int, default=1000)
    ll.set_defaults(func=cmd_walk_lamplighter)

    sc = sub.add_parser("spectral", help="Geronimus polynomials and eigenvalue checks")
    ssub = sc.add_subparsers(dest="spectral_cmd", required=True)
    for name in ("geronimus", "identity", "floor", "mixing"):
        sp = ssub.add_parser(name)
        sp.add_argument("--k", type=int, default=3)
        if name != "mixing":
            sp.add_argument("--m", type=int, required=True)
        if name != "geronimus":
            sp.add_argument("--graph", required=True)
        if name == "mixing":
            sp.add_argument("--subset", type=int, nargs="*", help="vertex ids; omit for all subsets")
        sp.set_defaults(func=cmd_spectral)

    cu = sub.add_parser("cube", help="hypercube Fourier analysis")
    csub = cu.add_subparsers(dest="cube_cmd", required=True)
    for name in ("transform", "heat", "pisier", "type"):
        sp = common(csub.add_parser(name))
        sp.add_argument("--function", help="cube function file; default a random function")
        sp.add_argument("--n", type=int, default=6)
        sp.add_argument("--d", type=int, default=1)
        sp.add_argument("--norm", type=float, default=2.0)
        if name in ("transform", "heat"):
            sp.add_argument("--out")
        if name == "heat":
            sp.add_argument("--t", type=float, required=True)
        if name == "pisier":
            sp.add_argument("--q", type=float, default=1.0)
        if name == "type":
            sp.add_argument("--p", type=float, default=2.0)
            sp.add_argument("--variant", choices=("plain", "enflo", "bmw"), default="enflo")
        sp.set_defaults(func=cmd_cube)
    co = common(csub.add_parser("cotype", help="random two-point cotype experiment"))
    co.add_argument("--n", type=int, default=2)
    co.add_argument("--m", type=int, nargs="+", default=[2, 4, 8])
    co.add_argument("--q", type=float, default=2.0)
    co.add_argument("--trials", type=int, default=100)
    co.set_defaults(func=cmd_cube)
    return p


def run(argv=None, stdout=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    command = shlex.join(["ribelab"] + argv)
    if hasattr(args, "seed") and "--seed" not in argv:
        command += f" --seed {args.seed}"
    rep = Report(command)
    try:
        args.func(args, rep)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RibeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = rep.to_tsv() if args.format == "tsv" else rep.to_text()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    else:
        # generated files without --out go to stdout, so the report moves to stderr
        writes_data = getattr(args, "out", "unset") is None and args.cmd in ("gen", "metric")
        (sys.stderr if writes_data else stdout).write(text)
    return 0 if rep.passed else 1


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
