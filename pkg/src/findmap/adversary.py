"""Attack constructions against FindMap.

Each constructor returns an :class:`AttackPlan` carrying the faked claim,
the ranging corruption, and the set of correct sensors predicted to stay
blind. The prediction comes from the geometric loci only; the harness
checks it against direct simulation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    CollinearInput,
    DegenerateConfiguration,
    InvalidCounts,
    NoIntersection,
    SamePosition,
    WrongCorruptionKind,
)
from .geometry import (
    DEFAULT_TOL,
    LocusRSS,
    Point2D,
    Tolerances,
    circle_through_three,
    consistent_verifier_circle,
    distance,
    on_enlargement_locus,
    reflect,
)
from .ranging import NO_CORRUPTION, Corruption, PowerScale, RadioParams, TimeShift


class Role(str, Enum):
    CORRECT = "correct"
    FAKING = "faking"


class PolicyKind(str, Enum):
    ACCUSE_ALL_CORRECT = "accuse_all_correct"
    ACCUSE_NONE = "accuse_none"
    MIMIC = "mimic"
    CUSTOM = "custom"


@dataclass(frozen=True)
class AccusationPolicy:
    """How a faker fills its round-2 accusation array.

    MIMIC and CUSTOM both carry an explicit array; MIMIC marks that the
    array was copied from an honest sensor's row.
    """

    kind: PolicyKind = PolicyKind.ACCUSE_ALL_CORRECT
    accusations: Optional[tuple[bool, ...]] = None

    def __post_init__(self):
        if self.kind in (PolicyKind.MIMIC, PolicyKind.CUSTOM) and self.accusations is None:
            raise ValueError(f"{self.kind.value} policy needs an accusation array")


WORST_CASE = AccusationPolicy()


@dataclass(frozen=True)
class AttackPlan:
    faker_true: Point2D
    claimed: Point2D
    corruption: Corruption = NO_CORRUPTION
    predicted_blind: frozenset = frozenset()
    policy: AccusationPolicy = WORST_CASE
    kind: str = "naive"
    # ToF plan with |claimed - faker| <= |b|: blind set has at most one sensor
    degenerate: bool = False
    silent: bool = False


@dataclass(frozen=True)
class MirrorConstruction:
    axis_point: Point2D
    axis_direction: Point2D
    on_axis: tuple[Point2D, Point2D]
    correct_set: tuple[Point2D, ...]
    faking_set: tuple[Point2D, ...]
    virtual_set: tuple[Point2D, ...]
    silent_faker: Optional[Point2D]
    n: int
    f: int

    @property
    def k(self) -> int:
        return len(self.correct_set)

    def reflect(self, p: Point2D) -> Point2D:
        return reflect(p, self.axis_point, self.axis_direction)


def _blind(correct: Iterable[Point2D], test) -> frozenset:
    return frozenset(p for p in correct if test(p))


def naive_fake(faker: Point2D, claimed: Point2D, correct: Sequence[Point2D] = (),
               tol: Tolerances = DEFAULT_TOL, policy: AccusationPolicy = WORST_CASE) -> AttackPlan:
    """Claim a false position without touching the ranging."""
    if distance(faker, claimed) <= tol.eps_distance:
        raise SamePosition("claimed position equals true position")
    blind = _blind(correct, lambda p: abs(distance(p, claimed) - distance(p, faker)) <= tol.eps_distance)
    return AttackPlan(faker, claimed, NO_CORRUPTION, blind, policy, "naive")


def naive_reflection(faker: Point2D, p1: Point2D, p2: Point2D, correct: Sequence[Point2D] = (),
                     tol: Tolerances = DEFAULT_TOL, policy: AccusationPolicy = WORST_CASE) -> AttackPlan:
    """Mirror the true position across line p1p2, fooling both p1 and p2."""
    sep = distance(p1, p2)
    if sep == 0:
        raise SamePosition("anchors coincide")
    direction = (p2 - p1).scale(1.0 / sep)
    return naive_fake(faker, reflect(faker, p1, direction), correct, tol, policy)


def _circle_intersections(c1: Point2D, r1: float, c2: Point2D, r2: float, tol: Tolerances):
    d = distance(c1, c2)
    if d == 0:
        raise NoIntersection("concentric circles")
    a = (r1 * r1 - r2 * r2 + d * d) / (2 * d)
    h2 = r1 * r1 - a * a
    if h2 < -tol.eps_distance * max(1.0, r1):
        raise NoIntersection(f"circles about {c1} and {c2} do not meet")
    h = math.sqrt(max(h2, 0.0))
    ux, uy = (c2.x - c1.x) / d, (c2.y - c1.y) / d
    bx, by = c1.x + a * ux, c1.y + a * uy
    return Point2D(bx - h * uy, by + h * ux), Point2D(bx + h * uy, by - h * ux)


def rss_fake_from_two(faker: Point2D, p1: Point2D, p2: Point2D, lam: float,
                      correct: Sequence[Point2D] = (), params: RadioParams = RadioParams(),
                      tol: Tolerances = DEFAULT_TOL, policy: AccusationPolicy = WORST_CASE) -> AttackPlan:
    """Scale transmit power so that p1 and p2 both measure ``lam`` times the truth."""
    if len({faker, p1, p2}) < 3:
        raise SamePosition("faker and anchors must be pairwise distinct")
    if not lam > 0 or lam == 1.0:
        raise ValueError("power ratio must be positive and different from 1")
    cands = _circle_intersections(p1, lam * distance(p1, faker), p2, lam * distance(p2, faker), tol)
    claimed = max(cands, key=lambda q: (distance(q, faker), q.y, q.x))
    return rss_fake(faker, lam, claimed, correct, params, tol, policy)


def rss_fake_from_three(faker: Point2D, p1: Point2D, p2: Point2D, p3: Point2D,
                        correct: Sequence[Point2D] = (), params: RadioParams = RadioParams(),
                        tol: Tolerances = DEFAULT_TOL, policy: AccusationPolicy = WORST_CASE) -> AttackPlan:
    """Power-scaling fake that three given sensors cannot detect.

    The blind circle must pass through p1, p2, p3; faker and fake position are
    inverse points with respect to it, which fixes both the claim and the ratio.
    """
    circ = circle_through_three(p1, p2, p3, tol)
    off = faker - circ.center
    r_off = off.norm()
    if r_off <= tol.eps_distance or abs(r_off - circ.radius) <= tol.eps_distance:
        raise DegenerateConfiguration("faker sits on the anchor circle or at its centre")
    k = circ.radius * circ.radius / (r_off * r_off)
    claimed = circ.center + off.scale(k)
    return rss_fake(faker, circ.radius / r_off, claimed, correct, params, tol, policy)


def rss_fake(faker: Point2D, lam: float, claimed: Point2D, correct: Sequence[Point2D] = (),
             params: RadioParams = RadioParams(), tol: Tolerances = DEFAULT_TOL,
             policy: AccusationPolicy = WORST_CASE) -> AttackPlan:
    """Power-scaling fake with an explicit claim and distance ratio ``lam``."""
    if distance(faker, claimed) <= tol.eps_distance:
        raise SamePosition("claimed position equals true position")
    if not lam > 0:
        raise ValueError("power ratio must be positive")
    locus = consistent_verifier_circle(faker, claimed, lam)
    return AttackPlan(faker, claimed, PowerScale.for_ratio(lam, params),
                      _blind(correct, lambda p: locus.contains(p, tol)), policy, "rss")


def rss_blind_circle(plan: AttackPlan, params: RadioParams = RadioParams()) -> LocusRSS:
    if not isinstance(plan.corruption, PowerScale):
        raise WrongCorruptionKind("plan does not scale transmit power")
    return consistent_verifier_circle(plan.faker_true, plan.claimed, plan.corruption.ratio(params))


def tof_fake(faker: Point2D, b: float, claimed: Point2D, correct: Sequence[Point2D] = (),
             tol: Tolerances = DEFAULT_TOL, policy: AccusationPolicy = WORST_CASE) -> AttackPlan:
    """Shift timing so every receiver measures the true distance plus ``b``.

    When |claimed - faker| <= |b| the plan is flagged degenerate: by the
    triangle inequality only a sensor collinear with both points can stay blind.
    """
    if distance(faker, claimed) <= tol.eps_distance:
        raise SamePosition("claimed position equals true position")
    if b == 0:
        raise ValueError("a zero shift is a naive fake")
    blind = _blind(correct, lambda p: on_enlargement_locus(p, faker, claimed, b, tol))
    degenerate = distance(faker, claimed) <= abs(b)
    return AttackPlan(faker, claimed, TimeShift(b), blind, policy, "tof", degenerate=degenerate)


def tof_fake_from_three(faker: Point2D, p1: Point2D, p2: Point2D, p3: Point2D,
                        correct: Sequence[Point2D] = (), tol: Tolerances = DEFAULT_TOL,
                        policy: AccusationPolicy = WORST_CASE) -> AttackPlan:
    """Time-shifting fake that three given sensors cannot detect.

    Solves |P_i - F'| = |P_i - F| + b for the claim F' and shift b. Pairwise
    differences make F' - F linear in b; the remaining equation has the
    trivial root b = 0 and one other.
    """
    q = [p - faker for p in (p1, p2, p3)]
    r = [v.norm() for v in q]
    m = np.array([[q[1].x - q[0].x, q[1].y - q[0].y], [q[2].x - q[0].x, q[2].y - q[0].y]])
    if abs(np.linalg.det(m)) <= tol.eps_collinear * max(1.0, float(np.abs(m).max()) ** 2):
        raise CollinearInput("anchors are collinear")
    u = -np.linalg.solve(m, [r[1] - r[0], r[2] - r[0]])
    uu = float(u @ u)
    if abs(uu - 1.0) < 1e-12:
        raise DegenerateConfiguration("no non-trivial shift exists for these anchors")
    b = 2.0 * (q[0].x * u[0] + q[0].y * u[1] + r[0]) / (uu - 1.0)
    if abs(b) * math.sqrt(uu) <= tol.eps_distance:
        raise DegenerateConfiguration("only the trivial shift fits these anchors")
    claimed = Point2D(faker.x + b * u[0], faker.y + b * u[1])
    for p in (p1, p2, p3):
        if not on_enlargement_locus(p, faker, claimed, b, tol):
            raise DegenerateConfiguration("squared solution does not satisfy the unsquared ranges")
    return tof_fake(faker, b, claimed, correct, tol, policy)


def _in_general_position(pts: Sequence[Point2D], min_area: float) -> bool:
    xy = np.array([(p.x, p.y) for p in pts])
    for i in range(len(xy)):
        for j in range(i + 1, len(xy)):
            a = xy[j] - xy[i]
            for k in range(j + 1, len(xy)):
                c = xy[k] - xy[i]
                if 0.5 * abs(a[0] * c[1] - a[1] * c[0]) < min_area:
                    return False
    return True


def mirror_construction(n: int, f: int, axis: tuple[Point2D, Point2D] | None = None,
                        seed: int = 0, extent: float = 1000.0) -> MirrorConstruction:
    """Two reflection-symmetric executions that on-axis observers cannot tell apart.

    ``axis`` is (point, direction); the default is the horizontal line
    through (extent / 2, extent / 2). Sensors are sampled within
    ``extent / 2`` of the axis point, on the right-hand side of the
    direction vector.
    """
    if n < 4 or f < 1 or n - f - 2 > f:
        raise InvalidCounts(f"mirror construction needs n >= 4, f >= 1 and n - f - 2 <= f (n={n}, f={f})")
    if f > n - 2:
        raise InvalidCounts("at least the two on-axis observers must be correct")
    if axis is None:
        axis = (Point2D(extent / 2, extent / 2), Point2D(1.0, 0.0))
    origin, direction = axis
    norm = direction.norm()
    direction = direction.scale(1.0 / norm)
    normal = Point2D(direction.y, -direction.x)
    k = (n - 2) // 2
    odd = n % 2 == 1
    rng = np.random.default_rng(seed)
    min_area = 1e-3 * extent * extent
    half = extent / 2

    def place(t, h):
        return origin + direction.scale(t) + normal.scale(h)

    for _ in range(10_000):
        v, u = (place(t, 0.0) for t in rng.uniform(-half, half, size=2))
        off = [place(rng.uniform(-half, half), rng.uniform(0.05 * extent, half))
               for _ in range(2 * k + int(odd))]
        cs, gs = off[:k], off[k:2 * k]
        silent = off[2 * k] if odd else None
        mirrored = [reflect(p, origin, direction) for p in cs + gs]
        everything = [v, u] + off + mirrored
        if _in_general_position(everything, min_area):
            return MirrorConstruction(origin, direction, (v, u), tuple(cs), tuple(gs),
                                      tuple(mirrored[k:]), silent, n, f)
    raise InvalidCounts("could not place a general-position mirror configuration")


def faker_accusations(policy: AccusationPolicy, faker: int, roles: Sequence[Role]) -> np.ndarray:
    n = len(roles)
    if policy.kind is PolicyKind.ACCUSE_ALL_CORRECT:
        out = np.array([r is Role.CORRECT for r in roles], dtype=bool)
    elif policy.kind is PolicyKind.ACCUSE_NONE:
        out = np.zeros(n, dtype=bool)
    else:
        out = np.array(policy.accusations, dtype=bool)
        if out.shape != (n,):
            raise ValueError(f"accusation array has length {out.size}, expected {n}")
        out = out.copy()
    out[faker] = False
    return out
