"""Exit criteria of the package, runnable from the CLI (``check``) and from pytest.

Each criterion returns a :class:`CheckResult` carrying its measurements so
that callers can re-assert them.  ``out_dir`` receives the CSV artifacts
whose bytes the determinism criterion compares between runs.
"""

from __future__ import annotations

import filecmp
import math
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import fracdim, game, ifs, io, steinhaus

SEEDS = {
    "self_affinity": 20240101,
    "chaos": 314159,
    "paths": tuple(range(1000, 1008)),
    "sojourn": 271828,
    "ks": 161803,
}


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    elapsed: float = 0.0
    limit: float = math.inf

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        vals = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        return f"[{status}] {self.key} {self.title}: {vals} ({self.elapsed:.2f}s, limit {self.limit:g}s)"


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


_CHAOS_CACHE: dict[int, ifs.PointCloud2D] = {}


def _chaos_cloud(seed: int) -> ifs.PointCloud2D:
    if seed not in _CHAOS_CACHE:
        _CHAOS_CACHE.clear()
        _CHAOS_CACHE[seed] = ifs.chaos_game(10**6, seed)
    return _CHAOS_CACHE[seed]


def c01_steinhaus_identity(out_dir=None) -> dict:
    worst, worst_n = 0.0, 1
    for n in range(1, 2**16 + 1):
        r = steinhaus.steinhaus_identity_residual(n)
        if r > worst:
            worst, worst_n = r, n
    return {"ok": worst <= 1e-9, "max_residual": worst, "argmax_n": worst_n}


def c02_endpoints(out_dir=None) -> dict:
    lo = steinhaus.xi(Fraction(1, 2))
    hi = steinhaus.xi(Fraction(1))
    left = steinhaus.xi_left_limit(Fraction(1))
    ok = lo == 2.0 and hi == 2.0 and abs(left) <= 1e-12
    return {"ok": ok, "xi_half": lo, "xi_one": hi, "xi_one_left": left}


def _self_affinity_gap(g: Fraction) -> float:
    target = (1 - g + steinhaus.f_exact(g)) / 2
    a = steinhaus.f_exact(g / 2 + Fraction(1, 2))
    b = steinhaus.f_exact(g / 2 + Fraction(1, 4))
    return float(max(abs(a - target), abs(b - target)))


def c03_self_affinity(out_dir=None) -> dict:
    rng = game.replica_rng(SEEDS["self_affinity"])
    randoms = [Fraction(float(x)) for x in rng.uniform(0.5, 1.0, 10**4)]
    dyadics = [Fraction(j, 1 << 12) for j in range(1 << 11, 1 << 12)]
    gap_r = max(_self_affinity_gap(g) for g in randoms)
    gap_d = max(_self_affinity_gap(g) for g in dyadics)
    return {"ok": max(gap_r, gap_d) <= 1e-12, "max_gap_random": gap_r,
            "max_gap_dyadic": gap_d, "n_dyadic": len(dyadics)}


def c04_singular_values(out_dir=None) -> dict:
    worst_rel, worst_prod = 0.0, 0.0
    for r in range(1, 31):
        cf = ifs.singular_values_closed_form(r)
        s1, s2 = ifs.singular_values(ifs.l_power(r))
        worst_rel = max(worst_rel, abs(cf.alpha1 - s1) / s1, abs(cf.alpha2 - s2) / s2)
        worst_prod = max(worst_prod, abs(cf.alpha1 * cf.alpha2 * 4.0**r - 1.0))
    return {"ok": worst_rel <= 1e-12 and worst_prod <= 1e-13,
            "max_rel_diff": worst_rel, "max_product_rel_err": worst_prod}


def c05_series_dimensions(out_dir=None) -> dict:
    da = ifs.affinity_dimension(R=60, tol=1e-4)
    dl = ifs.hausdorff_lower_bound_dim(R=60, tol=1e-4)
    if out_dir is not None:
        io.write_series_audit(Path(out_dir) / "series_affinity.csv", ifs.series_audit(1.0, 60))
        io.write_series_audit(Path(out_dir) / "series_lower.csv", ifs.series_audit(1.0, 60, inverse=True))
    return {"ok": abs(da - 1.0) <= 0.01 and abs(dl - 1.0) <= 0.01,
            "affinity_dim": da, "lower_bound_dim": dl}


def c06_attractor_box_dim(out_dir=None) -> dict:
    cloud = _chaos_cloud(SEEDS["chaos"])
    rep = fracdim.box_dimension_estimate(cloud.points, 4, 10)
    if out_dir is not None:
        io.write_box_report(Path(out_dir) / "boxdim_attractor.csv", rep)
    ok = 0.90 <= rep.slope <= 1.10 and rep.r_squared >= 0.99
    return {"ok": ok, "slope": rep.slope, "r_squared": rep.r_squared,
            "log_corrected_slope": fracdim.log_corrected_slope(rep)}


def c07_attractor_consistency(out_dir=None) -> dict:
    cloud = _chaos_cloud(SEEDS["chaos"])
    analytic = ifs.analytic_cloud(16)
    dist = ifs.hausdorff_distance(cloud.points, analytic.points)
    inv = ifs.invariance_residual(cloud)
    return {"ok": dist <= 2.0**-10 and inv.separation > 0, "hausdorff": dist,
            "separation": inv.separation, "invariance_residual": inv.residual}


def _path_slopes(kind: str, out_dir) -> list[float]:
    reps = fracdim.path_dimension_slopes(20, SEEDS["paths"], kind)
    if out_dir is not None:
        for seed, rep in zip(SEEDS["paths"], reps):
            io.write_box_report(Path(out_dir) / f"boxdim_y_{kind}_{seed}.csv", rep)
    return [r.slope for r in reps]


def c08_graph_dim(out_dir=None) -> dict:
    slopes = _path_slopes("graph", out_dir)
    med = float(np.median(slopes))
    return {"ok": 0.80 <= med <= 1.20, "median_slope": med,
            "min_slope": min(slopes), "max_slope": max(slopes)}


def c09_range_dim(out_dir=None) -> dict:
    slopes = _path_slopes("range", out_dir)
    med = float(np.median(slopes))
    return {"ok": 0.80 <= med <= 1.15, "median_slope": med,
            "min_slope": min(slopes), "max_slope": max(slopes)}


SOJOURN_GRID = tuple(2.0**-i for i in range(1, 7))


def c10_sojourn(out_dir=None) -> dict:
    est = fracdim.sojourn_bound_experiment(14, 500, SOJOURN_GRID, SEEDS["sojourn"])
    if out_dir is not None:
        io.write_sojourn(Path(out_dir) / "sojourn.csv", est)
    ratios = [e.ratio for e in est]
    spread = max(ratios) / min(ratios)
    return {"ok": min(ratios) > 0.05 and spread < 10.0, "min_ratio": min(ratios),
            "max_ratio": max(ratios), "spread": spread}


def c11_semi_selfsimilarity(out_dir=None) -> dict:
    res = game.semi_selfsimilarity_check(14, 2000, SEEDS["ks"])
    control = game.ks_statistic(res.a, res.b + 1.0)
    if out_dir is not None:
        io.write_csv(Path(out_dir) / "ks_samples.csv", ["a", "b"], zip(res.a, res.b))
    return {"ok": res.statistic < res.threshold and control > res.threshold,
            "statistic": res.statistic, "threshold": res.threshold, "control": control}


CRITERIA: list[tuple[str, str, Callable, float]] = [
    ("C01", "Steinhaus identity, n <= 2^16", c01_steinhaus_identity, 5.0),
    ("C02", "xi endpoint values and xi(1-)", c02_endpoints, 1.0),
    ("C03", "self-affinity of f", c03_self_affinity, 2.0),
    ("C04", "closed-form singular values", c04_singular_values, 1.0),
    ("C05", "affinity and lower-bound dimensions", c05_series_dimensions, 1.0),
    ("C06", "attractor box dimension", c06_attractor_box_dim, 30.0),
    ("C07", "attractor vs analytic cloud", c07_attractor_consistency, 60.0),
    ("C08", "Y-graph box dimension", c08_graph_dim, 60.0),
    ("C09", "Y-range box dimension", c09_range_dim, 60.0),
    ("C10", "sojourn lower bound", c10_sojourn, 120.0),
    ("C11", "semi-selfsimilarity KS check", c11_semi_selfsimilarity, 60.0),
]


def run_criterion(key: str, out_dir=None) -> CheckResult:
    for k, title, fn, limit in CRITERIA:
        if k == key:
            start = time.perf_counter()
            measured = fn(out_dir)
            elapsed = time.perf_counter() - start
            ok = bool(measured.pop("ok"))
            return CheckResult(k, title, ok and elapsed < limit, measured, elapsed, limit)
    raise KeyError(key)


def run_all(out_dir, echo=print) -> list[CheckResult]:
    """Run C01..C11 into ``out_dir`` and then C12 (byte-identical rerun)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    for key, *_ in CRITERIA:
        res = run_criterion(key, out_dir)
        results.append(res)
        echo(res.line())
    results.append(determinism_check(out_dir, echo=echo))
    echo(results[-1].line())
    return results


def determinism_check(reference_dir, echo=None) -> CheckResult:
    """C12: rerun every CSV-producing criterion and compare bytes."""
    start = time.perf_counter()
    reference_dir = Path(reference_dir)
    with tempfile.TemporaryDirectory() as tmp:
        _CHAOS_CACHE.clear()
        for key, *_ in CRITERIA:
            run_criterion(key, tmp)
        names = sorted(p.name for p in reference_dir.glob("*.csv"))
        fresh = sorted(p.name for p in Path(tmp).glob("*.csv"))
        match, mismatch, errors = filecmp.cmpfiles(reference_dir, tmp, names, shallow=False)
        ok = names == fresh and not mismatch and not errors and len(names) > 0
    elapsed = time.perf_counter() - start
    return CheckResult("C12", "byte-identical rerun", ok,
                       {"files": len(names), "mismatched": len(mismatch) + len(errors)},
                       elapsed, 360.0)
