"""Command-line front end: ``stpetersburg <subcommand> [flags]``.

Every subcommand exits 0 iff its embedded checks pass; a failing check is
named on stderr.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance, fracdim, game, ifs, io, steinhaus, svg

log = logging.getLogger("stpetersburg")


@dataclass
class RunConfig:
    subcommand: str
    out: Path
    format: str = "csv"
    seed: int | None = None
    m: int = 16
    replicas: int = 4
    n: int = 10**6
    p: float = 0.5
    depth: int = 14
    j_min: int = 4
    j_max: int = 10
    extra: dict = field(default_factory=dict)

    @property
    def want_csv(self) -> bool:
        return self.format in ("csv", "both")

    @property
    def want_svg(self) -> bool:
        return self.format in ("svg", "both")


class Checks:
    def __init__(self):
        self.failed: list[str] = []

    def expect(self, name: str, ok: bool, detail: str = ""):
        status = "ok" if ok else "FAILED"
        print(f"check {name}: {status} {detail}".rstrip())
        if not ok:
            self.failed.append(name)

    def exit_code(self) -> int:
        for name in self.failed:
            print(f"failing check: {name}", file=sys.stderr)
        return 1 if self.failed else 0


def _num(x) -> str:
    return format(float(x), ".17g")


def run_simulate(cfg: RunConfig) -> int:
    params = game.CoinParams(cfg.p)
    checks = Checks()
    _, hi, _ = game._block(params, cfg.m)
    for i in range(cfg.replicas):
        gp = game.simulate_partial_sums(hi, params, cfg.seed, replica=i)
        yp = game.y_path_approx(gp, cfg.m)
        xp = game.x_path_approx(gp, cfg.m)
        if cfg.want_csv:
            io.write_sampled_path(cfg.out / f"y_path_{i}.csv", yp)
            io.write_sampled_path(cfg.out / f"x_path_{i}.csv", xp)
        if cfg.want_svg:
            svg.jump_path_figure(yp.t, yp.v, title=f"Y approximation, replica {i}").save(
                cfg.out / f"y_path_{i}.svg")
        print(f"replica {i}: {len(yp)} points, t in [{_num(yp.t[0])}, {_num(yp.t[-1])}], "
              f"Y in [{_num(yp.v.min())}, {_num(yp.v.max())}]")
        checks.expect(f"increasing_sums_{i}", bool(np.all(np.diff(gp.sums) > 0)))
        checks.expect(f"domain_{i}", yp.t[0] > params.q and yp.t[-1] <= 1.0)
    return checks.exit_code()


def run_steinhaus(cfg: RunConfig) -> int:
    if not 1 <= cfg.depth <= 24:
        raise SystemExit("error: --depth must lie in [1, 24]")
    checks = Checks()
    gamma, xi, left = steinhaus.xi_on_grid(cfg.depth)
    fg, fv = steinhaus.f_on_grid(cfg.depth)
    if cfg.want_csv:
        io.write_xi(cfg.out / "xi.csv", gamma, xi, left)
        io.write_csv(cfg.out / "f.csv", ["gamma", "f"], zip(fg, fv))
    if cfg.want_svg:
        svg.jump_path_figure(gamma[:-1], xi[:-1], left[:-1], title="xi on [1/2, 1)").save(cfg.out / "xi.svg")
        fl = np.concatenate([[np.nan], steinhaus.f_left_on_grid(cfg.depth)[1][:-1]])
        svg.jump_path_figure(fg, fv, fl, title="T^-1 image of the graph of xi").save(cfg.out / "f_image.svg")
    n_max = int(cfg.extra.get("n_max", 2**16))
    worst = max(steinhaus.steinhaus_identity_residual(n) for n in range(1, n_max + 1))
    print(f"grid points: {len(gamma)}")
    print(f"max identity residual for n <= {n_max}: {_num(worst)}")
    checks.expect("identity_residual", worst <= 1e-9, _num(worst))
    checks.expect("endpoints", steinhaus.xi(Fraction(1, 2)) == 2.0 == steinhaus.xi(1)
                  and abs(steinhaus.xi_left_limit(1)) <= 1e-12)
    return checks.exit_code()


def run_ifs(cfg: RunConfig) -> int:
    checks = Checks()
    R = int(cfg.extra.get("R", 60))
    da = ifs.affinity_dimension(R)
    dl = ifs.hausdorff_lower_bound_dim(R)
    cloud = ifs.chaos_game(cfg.n, cfg.seed)
    inv = ifs.invariance_residual(cloud)
    if cfg.want_csv:
        io.write_cloud(cfg.out / "cloud.csv", cloud.points)
        io.write_series_audit(cfg.out / "series_affinity.csv", ifs.series_audit(1.0, R))
        io.write_series_audit(cfg.out / "series_lower.csv", ifs.series_audit(1.0, R, inverse=True))
    if cfg.want_svg:
        for r in (1, 2):
            svg.parallelogram_figure(ifs.attractor_rectangles(r), title=f"depth {r}").save(
                cfg.out / f"rectangles_{r}.svg")
        svg.cloud_figure(cloud.points, title="chaos game").save(cfg.out / "cloud.svg")
    print(f"affinity dimension: {da:.3f} ({_num(da)})")
    print(f"lower bound dimension: {dl:.3f} ({_num(dl)})")
    print(f"invariance residual: {_num(inv.residual)}, separation: {_num(inv.separation)}")
    checks.expect("affinity_dimension", abs(da - 1.0) <= 0.01)
    checks.expect("lower_bound_dimension", abs(dl - 1.0) <= 0.01)
    checks.expect("disjoint_images", inv.separation > 0)
    return checks.exit_code()


BOXDIM_WINDOWS = {
    "attractor": (0.90, 1.10),
    "y-graph": (0.80, 1.20),
    "y-range": (0.80, 1.15),
}


def run_boxdim(cfg: RunConfig) -> int:
    checks = Checks()
    target = cfg.extra.get("target", "attractor")
    if target == "attractor":
        pts = ifs.chaos_game(cfg.n, cfg.seed).points
    else:
        path = game.y_path_approx(game.simulate_partial_sums(1 << cfg.m, game.FAIR, cfg.seed), cfg.m)
        pts = fracdim.graph_points(path) if target == "y-graph" else fracdim.range_points(path)
    rep = fracdim.box_dimension_estimate(pts, cfg.j_min, cfg.j_max)
    if cfg.want_csv:
        io.write_box_report(cfg.out / f"boxdim_{target}.csv", rep)
    for j, c in zip(rep.j, rep.counts):
        print(f"j={j} count={c}")
    print(f"slope: {_num(rep.slope)}  r_squared: {_num(rep.r_squared)}  "
          f"log-corrected slope: {_num(fracdim.log_corrected_slope(rep))}")
    lo, hi = BOXDIM_WINDOWS[target]
    checks.expect("slope_window", lo <= rep.slope <= hi, f"[{lo}, {hi}]")
    if target == "attractor":
        checks.expect("r_squared", rep.r_squared >= 0.99)
    return checks.exit_code()


def run_sojourn(cfg: RunConfig) -> int:
    checks = Checks()
    grid = [2.0**-i for i in range(1, 7)]
    est = fracdim.sojourn_bound_experiment(cfg.m, cfg.replicas, grid, cfg.seed)
    if cfg.want_csv:
        io.write_sojourn(cfg.out / "sojourn.csv", est)
    for e in est:
        print(f"a={_num(e.a)} mean_time={_num(e.mean_time)} ratio={_num(e.ratio)} se={_num(e.std_error)}")
    ratios = [e.ratio for e in est]
    print(f"min ratio: {_num(min(ratios))}")
    checks.expect("positive_ratio", min(ratios) > 0)
    checks.expect("horizon_bound", all(0 <= e.mean_time <= 1 for e in est))
    return checks.exit_code()


def run_check(cfg: RunConfig) -> int:
    results = acceptance.run_all(cfg.out)
    failed = [r.key for r in results if not r.passed]
    for key in failed:
        print(f"failing check: {key}", file=sys.stderr)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stpetersburg",
                                     description="St. Petersburg limit paths, the Steinhaus function "
                                                 "xi and its self-affine IFS.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress and warnings")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, seed_required):
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--format", choices=["csv", "svg", "both"], default="csv")
        p.add_argument("--seed", type=int, required=seed_required,
                       help="64-bit RNG seed" + (" (required)" if seed_required else ""))

    p = sub.add_parser("simulate", help="simulate block paths of X and Y")
    common(p, True)
    p.add_argument("--m", type=int, default=16, help="level: paths use 2^m games")
    p.add_argument("--replicas", type=int, default=4)
    p.add_argument("--p", type=float, default=0.5, help="probability of heads")

    p = sub.add_parser("steinhaus", help="xi and f over a dyadic grid, identity residuals")
    common(p, False)
    p.add_argument("--depth", type=int, default=14)
    p.add_argument("--n-max", type=int, default=2**16, help="largest n in the residual sweep")

    p = sub.add_parser("ifs", help="IFS attractor, singular values and series audits")
    common(p, True)
    p.add_argument("--n", type=int, default=10**6, help="chaos-game points")
    p.add_argument("--R", type=int, default=60, help="series truncation")

    p = sub.add_parser("boxdim", help="box-counting dimension estimate")
    common(p, True)
    p.add_argument("--target", choices=sorted(BOXDIM_WINDOWS), default="attractor")
    p.add_argument("--n", type=int, default=10**6, help="chaos-game points")
    p.add_argument("--m", type=int, default=20, help="level of the Y path")
    p.add_argument("--j-min", type=int, default=4)
    p.add_argument("--j-max", type=int, default=10)

    p = sub.add_parser("sojourn", help="Monte-Carlo sojourn times of (t, X(t))")
    common(p, True)
    p.add_argument("--m", type=int, default=14)
    p.add_argument("--replicas", type=int, default=500)

    p = sub.add_parser("check", help="run the full acceptance suite")
    p.add_argument("--out", type=Path, default=Path("out/check"), help="output directory")
    return parser


HANDLERS = {
    "simulate": run_simulate,
    "steinhaus": run_steinhaus,
    "ifs": run_ifs,
    "boxdim": run_boxdim,
    "sojourn": run_sojourn,
    "check": run_check,
}

_DIRECT = {"out", "format", "seed", "m", "replicas", "n", "p", "depth", "j_min", "j_max"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    args = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "verbose")}
    direct = {k: v for k, v in args.items() if k in _DIRECT}
    extra = {k: v for k, v in args.items() if k not in _DIRECT}
    return RunConfig(subcommand=ns.subcommand, extra=extra, **direct)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = config_from_args(ns)
    if cfg.seed is not None and not 0 <= cfg.seed < 2**64:
        raise SystemExit("error: --seed must be a 64-bit unsigned integer")
    try:
        cfg.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory {cfg.out}: {exc}", file=sys.stderr)
        return 2
    try:
        return HANDLERS[cfg.subcommand](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
