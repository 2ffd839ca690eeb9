"""Minimal hand-written SVG figures (diagnostic quality, no renderer needed)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

WIDTH, HEIGHT, PAD = 640, 400, 40


class Canvas:
    def __init__(self, xlim, ylim, width=WIDTH, height=HEIGHT, title=""):
        self.x0, self.x1 = map(float, xlim)
        self.y0, self.y1 = map(float, ylim)
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 == self.y0:
            self.y1 = self.y0 + 1.0
        self.w, self.h = width, height
        self.items: list[str] = []
        self.title = title

    def sx(self, x):
        return PAD + (np.asarray(x) - self.x0) / (self.x1 - self.x0) * (self.w - 2 * PAD)

    def sy(self, y):
        return self.h - PAD - (np.asarray(y) - self.y0) / (self.y1 - self.y0) * (self.h - 2 * PAD)

    def path(self, xs, ys, stroke="black", width=0.6):
        px, py = self.sx(xs), self.sy(ys)
        d = "M" + " L".join(f"{a:.2f} {b:.2f}" for a, b in zip(px, py))
        self.items.append(f'<path d="{d}" fill="none" stroke="{stroke}" stroke-width="{width}"/>')

    def polygon(self, pts, fill="none", stroke="black"):
        pts = np.asarray(pts)
        coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(self.sx(pts[:, 0]), self.sy(pts[:, 1])))
        self.items.append(f'<polygon points="{coords}" fill="{fill}" stroke="{stroke}" stroke-width="0.6"/>')

    def dots(self, xs, ys, size=1.0, fill="black"):
        for a, b in zip(self.sx(xs), self.sy(ys)):
            self.items.append(f'<rect x="{a:.2f}" y="{b:.2f}" width="{size}" height="{size}" fill="{fill}"/>')

    def render(self) -> str:
        axes = (f'<rect x="{PAD}" y="{PAD}" width="{self.w - 2 * PAD}" height="{self.h - 2 * PAD}" '
                f'fill="none" stroke="#888" stroke-width="0.5"/>')
        labels = (f'<text x="{PAD}" y="{self.h - PAD / 3:.0f}" font-size="10">{self.x0:.6g}</text>'
                  f'<text x="{self.w - PAD}" y="{self.h - PAD / 3:.0f}" font-size="10" text-anchor="end">{self.x1:.6g}</text>'
                  f'<text x="2" y="{self.h - PAD:.0f}" font-size="10">{self.y0:.6g}</text>'
                  f'<text x="2" y="{PAD:.0f}" font-size="10">{self.y1:.6g}</text>'
                  f'<text x="{self.w / 2:.0f}" y="{PAD / 2:.0f}" font-size="12" text-anchor="middle">{self.title}</text>')
        body = "\n".join(self.items)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w}" height="{self.h}" '
                f'viewBox="0 0 {self.w} {self.h}">\n{axes}\n{labels}\n{body}\n</svg>\n')

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(), encoding="ascii")
        return path


def _limits(values, margin=0.03):
    lo, hi = float(np.nanmin(values)), float(np.nanmax(values))
    pad = (hi - lo) * margin
    return lo - pad, hi + pad


def jump_path_figure(t, v, left=None, title="") -> Canvas:
    """Step drawing of a cadlag path; each jump is a vertical segment.

    Between samples the path runs from ``(t_i, v_i)`` to ``(t_{i+1}, left_{i+1})``
    (``left`` defaults to ``v_i``) and then jumps to ``v_{i+1}``.
    """
    t = np.asarray(t, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    pre = v[:-1] if left is None else np.asarray(left, dtype=np.float64)[1:]
    pre = np.where(np.isnan(pre), v[:-1], pre)
    xs = np.empty(2 * len(t) - 1)
    ys = np.empty_like(xs)
    xs[0::2], ys[0::2] = t, v
    xs[1::2], ys[1::2] = t[1:], pre
    c = Canvas(_limits(t, 0.0), _limits(np.concatenate([v, pre])), title=title)
    c.path(xs, ys)
    return c


def parallelogram_figure(quads, title="") -> Canvas:
    c = Canvas((0.45, 1.05), (-0.05, 0.55), width=480, height=480, title=title)
    for q in quads:
        c.polygon(q, fill="#ccd")
    return c


def cloud_figure(points, max_points=20000, title="") -> Canvas:
    pts = np.asarray(points)[:max_points]
    c = Canvas(_limits(pts[:, 0]), _limits(pts[:, 1]), width=480, height=480, title=title)
    c.dots(pts[:, 0], pts[:, 1], size=0.8)
    return c
