"""CSV emission.  Reals are written with 17 significant digits, locale-free."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".17g")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    return path


def write_sampled_path(path, sp) -> Path:
    return write_csv(path, ["t", "v"], zip(sp.t, sp.v))


def write_gain_path(path, gp) -> Path:
    sums = gp.exact if gp.exact is not None else gp.sums
    return write_csv(path, ["k", "S_k"],
                     ((k, int(s) if gp.exact is not None else s) for k, s in enumerate(sums, start=1)))


def write_xi(path, gamma, xi, xi_left) -> Path:
    return write_csv(path, ["gamma", "xi", "xi_left"], zip(gamma, xi, xi_left))


def write_cloud(path, points) -> Path:
    return write_csv(path, ["x", "y"], ((p[0], p[1]) for p in points))


def write_series_audit(path, audit) -> Path:
    return write_csv(path, ["r", "alpha1", "alpha2", "term"],
                     ((int(r), a1, a2, t) for r, a1, a2, t
                      in zip(audit.r, audit.alpha1, audit.alpha2, audit.terms)))


def write_box_report(path, report) -> Path:
    rows = [(int(j), d, int(c)) for j, d, c in zip(report.j, report.scales, report.counts)]
    rows.append(("fit", report.slope, report.r_squared))
    return write_csv(path, ["j", "delta", "count"], rows)


def write_sojourn(path, estimates) -> Path:
    return write_csv(path, ["a", "mean_time", "ratio", "std_error"],
                     ((e.a, e.mean_time, e.ratio, e.std_error) for e in estimates))


def read_csv(path) -> list[dict[str, str]]:
    with Path(path).open(newline="", encoding="ascii") as fh:
        return list(csv.DictReader(fh))
