"""Planar geometry for attack loci.

Everything here works on 64-bit floats with explicit tolerances. The loci
are the sets of verifiers that cannot see through an attack: Apollonius
circles for power scaling, hyperbola branches for time shifting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    CoincidentFoci,
    CollinearInput,
    DegenerateConfiguration,
    DegenerateRatio,
)


@dataclass(frozen=True, slots=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self):
        if type(self.x) is not float or type(self.y) is not float:
            object.__setattr__(self, "x", float(self.x))
            object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def __add__(self, other: Point2D) -> Point2D:
        return Point2D(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Point2D) -> Point2D:
        return Point2D(self.x - other.x, self.y - other.y)

    def scale(self, k: float) -> Point2D:
        return Point2D(k * self.x, k * self.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def as_point(p) -> Point2D:
    return p if isinstance(p, Point2D) else Point2D(float(p[0]), float(p[1]))


def points_array(points: Iterable[Point2D]) -> np.ndarray:
    return np.array([(p.x, p.y) for p in points], dtype=np.float64).reshape(-1, 2)


@dataclass(frozen=True)
class Tolerances:
    eps_collinear: float = 1e-9
    eps_distance: float = 1e-9
    eps_conic: float = 1e-9

    def __post_init__(self):
        for name in ("eps_collinear", "eps_distance", "eps_conic"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Circle:
    center: Point2D
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius >= 0):
            raise ValueError(f"invalid radius {self.radius}")

    def contains(self, p: Point2D, tol: Tolerances = DEFAULT_TOL) -> bool:
        return abs(distance(p, self.center) - self.radius) <= tol.eps_distance * max(1.0, self.radius)

    def sample(self, k: int) -> list[Point2D]:
        t = np.linspace(0.0, 2 * math.pi, k, endpoint=False)
        cx, cy, r = self.center.x, self.center.y, self.radius
        return [Point2D(cx + r * math.cos(a), cy + r * math.sin(a)) for a in t]


@dataclass(frozen=True)
class ApollonianCircle:
    """Points P with |P - near| = ratio * |P - far|, ratio != 1.

    ``near`` is the numerator focus; the circle itself is kept for drawing
    and sampling, membership is tested on the defining distance relation.
    """

    circle: Circle
    numerator: Point2D
    denominator: Point2D
    ratio: float

    def residual(self, p: Point2D) -> float:
        return distance(p, self.numerator) - self.ratio * distance(p, self.denominator)

    def contains(self, p: Point2D, tol: Tolerances = DEFAULT_TOL) -> bool:
        return abs(self.residual(p)) <= tol.eps_distance

    def sample(self, k: int) -> list[Point2D]:
        return self.circle.sample(k)


@dataclass(frozen=True)
class PerpendicularBisector:
    point: Point2D
    direction: Point2D
    numerator: Point2D
    denominator: Point2D
    ratio: float = 1.0

    def __post_init__(self):
        if abs(self.direction.norm() - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")

    def residual(self, p: Point2D) -> float:
        return distance(p, self.numerator) - distance(p, self.denominator)

    def contains(self, p: Point2D, tol: Tolerances = DEFAULT_TOL) -> bool:
        return abs(self.residual(p)) <= tol.eps_distance

    def sample(self, k: int, half_length: float | None = None) -> list[Point2D]:
        if half_length is None:
            half_length = 2.0 * distance(self.numerator, self.denominator)
        return [self.point + self.direction.scale(s) for s in np.linspace(-half_length, half_length, k)]


LocusRSS = Union[ApollonianCircle, PerpendicularBisector]


@dataclass(frozen=True)
class Conic:
    """Ax^2 + Bxy + Cy^2 + Dx + Ey + F = 0, largest coefficient scaled to +1."""

    A: float
    B: float
    C: float
    D: float
    E: float
    F: float

    @classmethod
    def from_coefficients(cls, coeffs) -> Conic:
        c = np.asarray(coeffs, dtype=np.float64)
        if not np.any(c):
            raise DegenerateConfiguration("all conic coefficients are zero")
        c = c / c[np.argmax(np.abs(c))]
        return cls(*(float(v) for v in c))

    @property
    def coefficients(self) -> tuple[float, ...]:
        return (self.A, self.B, self.C, self.D, self.E, self.F)

    def residual(self, p: Point2D) -> float:
        x, y = p.x, p.y
        return self.A * x * x + self.B * x * y + self.C * y * y + self.D * x + self.E * y + self.F

    @property
    def discriminant(self) -> float:
        return self.B * self.B - 4.0 * self.A * self.C

    def kind(self) -> str:
        disc = self.discriminant
        scale = max(abs(self.A), abs(self.B), abs(self.C))
        if abs(disc) <= 1e-12 * max(scale * scale, 1e-300):
            return "parabola"
        return "hyperbola" if disc > 0 else "ellipse"


def distance(a: Point2D, b: Point2D) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def cross(o: Point2D, a: Point2D, b: Point2D) -> float:
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def collinear(a: Point2D, b: Point2D, c: Point2D, tol: Tolerances = DEFAULT_TOL) -> bool:
    scale = max(1.0, distance(a, b) * distance(a, c))
    return abs(cross(a, b, c)) <= tol.eps_collinear * scale


def reflect(p: Point2D, origin: Point2D, direction: Point2D) -> Point2D:
    """Mirror image of ``p`` across the line through ``origin`` along unit ``direction``."""
    v = p - origin
    along = v.x * direction.x + v.y * direction.y
    foot = origin + direction.scale(along)
    return foot.scale(2.0) - p


def circle_through_three(a: Point2D, b: Point2D, c: Point2D, tol: Tolerances = DEFAULT_TOL) -> Circle:
    if collinear(a, b, c, tol):
        raise CollinearInput(f"points {a}, {b}, {c} are collinear")
    # Work relative to a to keep the linear solve well scaled.
    bx, by = b.x - a.x, b.y - a.y
    cx, cy = c.x - a.x, c.y - a.y
    det = 2.0 * (bx * cy - by * cx)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / det
    uy = (bx * c2 - cx * b2) / det
    return Circle(Point2D(a.x + ux, a.y + uy), math.hypot(ux, uy))


def concyclic_four(a: Point2D, b: Point2D, c: Point2D, d: Point2D, tol: Tolerances = DEFAULT_TOL) -> bool:
    if collinear(a, b, c, tol):
        return collinear(a, b, d, tol) and collinear(a, c, d, tol)
    circ = circle_through_three(a, b, c, tol)
    return abs(distance(d, circ.center) - circ.radius) <= tol.eps_distance


def apollonius_locus(p1: Point2D, p2: Point2D, delta: float) -> LocusRSS:
    """Locus of P with |P - p1| / |P - p2| = delta."""
    if not delta > 0:
        raise ValueError("ratio must be positive")
    sep = distance(p1, p2)
    if sep == 0.0:
        raise CoincidentFoci(f"foci coincide at {p1}")
    if delta == 1.0:
        mid = Point2D(0.5 * (p1.x + p2.x), 0.5 * (p1.y + p2.y))
        direction = Point2D(-(p2.y - p1.y) / sep, (p2.x - p1.x) / sep)
        return PerpendicularBisector(mid, direction, p1, p2)
    d2 = delta * delta
    k = 1.0 - d2
    center = Point2D((p1.x - d2 * p2.x) / k, (p1.y - d2 * p2.y) / k)
    radius = delta * sep / abs(k)
    return ApollonianCircle(Circle(center, radius), p1, p2, delta)


def consistent_verifier_circle(f: Point2D, f_fake: Point2D, lam: float) -> LocusRSS:
    """Verifiers that see a power-scaled faker at ``f`` as sitting at ``f_fake``."""
    return apollonius_locus(f_fake, f, lam)


def third_blind_sensor(f: Point2D, f_fake: Point2D, lam: float) -> Point2D:
    if lam == 1.0:
        raise DegenerateRatio("ratio 1 has no collinear blind point")
    if not lam > 0:
        raise ValueError("ratio must be positive")
    k = 1.0 - lam
    return Point2D((f_fake.x - lam * f.x) / k, (f_fake.y - lam * f.y) / k)


def enlargement_residual(p: Point2D, f: Point2D, f_fake: Point2D, b: float) -> float:
    return distance(p, f_fake) - distance(p, f) - b


def on_enlargement_locus(p: Point2D, f: Point2D, f_fake: Point2D, b: float,
                         tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff |p - f_fake| = |p - f| + b.

    Positive ``b`` is the enlargement case; a negative ``b`` (shrinking)
    selects the opposite branch and is accepted as well.
    """
    return abs(enlargement_residual(p, f, f_fake, b)) <= tol.eps_distance


def enlargement_branch(f: Point2D, f_fake: Point2D, b: float, ts) -> list[Point2D]:
    """Points on the branch |P - f_fake| - |P - f| = b, parameterized by ``ts``.

    Requires |f - f_fake| > |b| > 0.
    """
    c = distance(f, f_fake)
    if not (c > abs(b) > 0):
        raise DegenerateConfiguration("branch needs |f - f_fake| > |b| > 0")
    a = 0.5 * abs(b)
    h = math.sqrt(0.25 * c * c - a * a)
    # e points from the centre towards the focus whose branch we trace
    sign = 1.0 if b > 0 else -1.0
    ex, ey = sign * (f.x - f_fake.x) / c, sign * (f.y - f_fake.y) / c
    nx, ny = -ey, ex
    ox, oy = 0.5 * (f.x + f_fake.x), 0.5 * (f.y + f_fake.y)
    out = []
    for t in np.asarray(ts, dtype=np.float64):
        ch, sh = math.cosh(t), math.sinh(t)
        out.append(Point2D(ox + a * ch * ex + h * sh * nx, oy + a * ch * ey + h * sh * ny))
    return out


def _normalizing_transform(xy: np.ndarray) -> tuple[float, float, float]:
    mx, my = xy.mean(axis=0)
    s = float(np.max(np.abs(xy - (mx, my))))
    return float(mx), float(my), (s if s > 0 else 1.0)


def _design_rows(xy: np.ndarray) -> np.ndarray:
    x, y = xy[:, 0], xy[:, 1]
    return np.column_stack([x * x, x * y, y * y, x, y, np.ones_like(x)])


def conic_through_five(points: Sequence[Point2D], tol: Tolerances = DEFAULT_TOL) -> Conic:
    if len(points) != 5:
        raise ValueError("need exactly five points")
    xy = points_array(points)
    mx, my, s = _normalizing_transform(xy)
    m = _design_rows((xy - (mx, my)) / s)
    _, sv, vt = np.linalg.svd(m)
    if sv[4] <= 1e-9 * sv[0]:
        raise DegenerateConfiguration("five points do not determine a unique conic")
    a, b, c, d, e, f0 = vt[-1]
    # undo x -> (x - mx) / s after multiplying through by s^2
    A, B, C = a, b, c
    D = -2 * a * mx - b * my + d * s
    E = -b * mx - 2 * c * my + e * s
    F = a * mx * mx + b * mx * my + c * my * my - d * s * mx - e * s * my + f0 * s * s
    conic = Conic.from_coefficients([A, B, C, D, E, F])
    worst = max(abs(conic.residual(p)) for p in points)
    if worst > tol.eps_conic * max(1.0, s * s):
        raise DegenerateConfiguration(f"fitted conic residual {worst:.3g} exceeds tolerance")
    return conic


def conic_determinant(points: Sequence[Point2D]) -> float:
    """6x6 determinant of normalized (x^2, xy, y^2, x, y, 1) rows.

    Coordinates are first centred and scaled into [-1, 1] (conic incidence
    is affine invariant), then each row is scaled to unit max entry.
    """
    if len(points) != 6:
        raise ValueError("need exactly six points")
    xy = points_array(points)
    mx, my, s = _normalizing_transform(xy)
    m = _design_rows((xy - (mx, my)) / s)
    m = m / np.max(np.abs(m), axis=1, keepdims=True)
    return float(np.linalg.det(m))


def six_on_common_conic(points: Sequence[Point2D], tol: Tolerances = DEFAULT_TOL) -> bool:
    return abs(conic_determinant(points)) <= tol.eps_conic


def hyperbola_foci(conic: Conic) -> tuple[Point2D, Point2D, float]:
    """Foci and semi-major length ``a`` of a non-degenerate hyperbola."""
    A, B, C, D, E, F = conic.coefficients
    m = np.array([[A, B / 2], [B / 2, C]])
    if conic.discriminant <= 0:
        raise DegenerateConfiguration("conic is not a hyperbola")
    cx, cy = np.linalg.solve(m, [-D / 2, -E / 2])
    k = A * cx * cx + B * cx * cy + C * cy * cy + D * cx + E * cy + F
    if k == 0:
        raise DegenerateConfiguration("degenerate hyperbola (line pair)")
    evals, evecs = np.linalg.eigh(m)
    # lam_t * u^2 + lam_o * v^2 = -k, transverse axis has lam * (-k) > 0
    t = 0 if evals[0] * -k > 0 else 1
    o = 1 - t
    a2 = -k / evals[t]
    b2 = k / evals[o]
    c_f = math.sqrt(a2 + b2)
    ax = evecs[:, t]
    f1 = Point2D(cx + c_f * ax[0], cy + c_f * ax[1])
    f2 = Point2D(cx - c_f * ax[0], cy - c_f * ax[1])
    return f1, f2, math.sqrt(a2)
