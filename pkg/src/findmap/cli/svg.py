"""SVG figures of attack loci (diagnostics only)."""
from __future__ import annotations

import re
from typing import Optional, Sequence

import numpy as np

from ..errors import FindMapError, InvalidParams
from ..geometry import (
    ApollonianCircle,
    Point2D,
    apollonius_locus,
    distance,
    enlargement_branch,
)

SIZE = 800
PAD = 40


class Viewport:
    """Uniform world -> screen map with the y axis flipped."""

    def __init__(self, x0: float, y0: float, x1: float, y1: float):
        self.bounds = (x0, y0, x1, y1)
        span = max(x1 - x0, y1 - y0) or 1.0
        self.scale = (SIZE - 2 * PAD) / span
        self.x0, self.y0 = x0, y0

    def to_screen(self, p: Point2D) -> tuple[float, float]:
        return PAD + (p.x - self.x0) * self.scale, SIZE - PAD - (p.y - self.y0) * self.scale

    def to_world(self, sx: float, sy: float) -> Point2D:
        return Point2D(self.x0 + (sx - PAD) / self.scale, self.y0 + (SIZE - PAD - sy) / self.scale)

    def contains(self, p: Point2D) -> bool:
        x0, y0, x1, y1 = self.bounds
        span = max(x1 - x0, y1 - y0)
        return x0 <= p.x <= x0 + span and y0 <= p.y <= y0 + span


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _dot(vp, p, color, label):
    x, y = vp.to_screen(p)
    return (f'<circle class="point" cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="{color}"/>'
            f'<text x="{_fmt(x + 6)}" y="{_fmt(y - 6)}" font-size="12">{label}</text>')


def _square_bounds(points: Sequence[Point2D], margin: float = 0.1) -> Viewport:
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    cx, cy = 0.5 * (min(xs) + max(xs)), 0.5 * (min(ys) + max(ys))
    half = 0.5 * max(max(xs) - min(xs), max(ys) - min(ys), 1e-9) * (1 + 2 * margin)
    return Viewport(cx - half, cy - half, cx + half, cy + half)


def _document(vp: Viewport, body: list[str], legend: list[tuple[str, str]]) -> str:
    x0, y0, x1, y1 = vp.bounds
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
            f'viewBox="0 0 {SIZE} {SIZE}" data-world="{x0!r} {y0!r} {x1!r} {y1!r}">')
    leg = [f'<text x="10" y="{20 + 16 * i}" font-size="13" fill="{c}">{t}</text>' for i, (t, c) in enumerate(legend)]
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, *leg, "</svg>"]) + "\n"


def apollonius_svg(p1: Point2D, p2: Point2D, delta: float, sensors: Sequence[Point2D] = ()) -> str:
    try:
        locus = apollonius_locus(p1, p2, delta)
    except (FindMapError, ValueError) as exc:
        raise InvalidParams(str(exc)) from exc
    pts = [p1, p2, *sensors]
    if isinstance(locus, ApollonianCircle):
        c, r = locus.circle.center, locus.circle.radius
        pts += [Point2D(c.x - r, c.y - r), Point2D(c.x + r, c.y + r)]
        vp = _square_bounds(pts)
        sx, sy = vp.to_screen(c)
        curve = (f'<circle class="locus" cx="{_fmt(sx)}" cy="{_fmt(sy)}" r="{_fmt(r * vp.scale)}" '
                 f'fill="none" stroke="blue"/>')
    else:
        reach = 2.0 * distance(p1, p2)
        a = locus.point + locus.direction.scale(-reach)
        b = locus.point + locus.direction.scale(reach)
        vp = _square_bounds(pts + [a, b])
        (ax, ay), (bx, by) = vp.to_screen(a), vp.to_screen(b)
        curve = (f'<line class="locus" x1="{_fmt(ax)}" y1="{_fmt(ay)}" x2="{_fmt(bx)}" y2="{_fmt(by)}" '
                 f'stroke="blue"/>')
    body = [curve, _dot(vp, p1, "red", "P1"), _dot(vp, p2, "darkred", "P2")]
    body += [_dot(vp, s, "black", f"S{i}") for i, s in enumerate(sensors)]
    return _document(vp, body, [(f"ratio {delta:g} locus", "blue"), ("foci", "red")])


def hyperbola_svg(f: Point2D, f_fake: Point2D, b: float, sensors: Sequence[Point2D] = ()) -> str:
    c = distance(f, f_fake)
    if not (c > abs(b) > 0):
        raise InvalidParams("hyperbola needs |f - f_fake| > |b| > 0")
    reach = 3.0 * c
    mid = Point2D(0.5 * (f.x + f_fake.x), 0.5 * (f.y + f_fake.y))
    frame = [Point2D(mid.x - reach, mid.y - reach), Point2D(mid.x + reach, mid.y + reach)]
    vp = _square_bounds([f, f_fake, *sensors, *frame], margin=0.0)
    branch = enlargement_branch(f, f_fake, b, np.linspace(-6.0, 6.0, 801))
    inside = [p for p in branch if vp.contains(p)]
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (vp.to_screen(p) for p in inside))
    body = [f'<polyline class="locus" points="{coords}" fill="none" stroke="blue"/>',
            _dot(vp, f, "red", "F"), _dot(vp, f_fake, "orange", "F'")]
    body += [_dot(vp, s, "black", f"S{i}") for i, s in enumerate(sensors)]
    return _document(vp, body, [(f"blind branch, b = {b:g}", "blue"), ("true position F", "red"),
                                ("claimed position F'", "orange")])


def emit_locus_svg(kind: str, params: dict, out: Optional[str] = None) -> str:
    sensors = [Point2D(*s) for s in params.get("sensors", ())]
    if kind == "apollonius":
        text = apollonius_svg(Point2D(*params["p1"]), Point2D(*params["p2"]), float(params["delta"]), sensors)
    elif kind == "hyperbola":
        text = hyperbola_svg(Point2D(*params["f"]), Point2D(*params["f_fake"]), float(params["b"]), sensors)
    else:
        raise InvalidParams(f"unknown locus kind {kind!r}")
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def viewport_from_svg(text: str) -> Viewport:
    m = re.search(r'data-world="([^"]+)"', text)
    if m is None:
        raise InvalidParams("not a findmap locus figure")
    return Viewport(*map(float, m.group(1).split()))


__all__ = ["emit_locus_svg", "apollonius_svg", "hyperbola_svg", "Viewport", "viewport_from_svg"]
