"""Trusted-station placement checks.

A placement is certified safe by the sufficient condition (some four
stations non-concyclic for RSS, some six off every common conic for ToF,
no three collinear in either). Otherwise we try to build a concrete attack
that every station misses. The grid scan is a bounded sanity search, not a
proof.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .. import kernels
from ..adversary import Role, naive_reflection, rss_fake_from_three, tof_fake
from ..errors import FindMapError, TooFewStations
from ..geometry import (
    DEFAULT_TOL,
    Point2D,
    Tolerances,
    circle_through_three,
    collinear,
    concyclic_four,
    conic_through_five,
    distance,
    hyperbola_foci,
    points_array,
    six_on_common_conic,
)
from ..harness import Scenario, Sensor
from ..protocol import ProtocolModel, round1
from ..ranging import RadioParams

SUBSET_SIZE = {ProtocolModel.RSS: 4, ProtocolModel.TOF: 6}


class Placement(str, Enum):
    SAFE = "safe"
    UNSAFE = "unsafe"
    # sufficient condition fails but no attack could be constructed
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PlacementWitness:
    faker: Point2D
    claimed: Point2D
    parameter: float  # distance ratio (rss) or additive bias b (tof)
    blind: tuple[int, ...]
    kind: str
    simulated_accusers: int


@dataclass(frozen=True)
class PlacementResult:
    verdict: Placement
    witness: Optional[PlacementWitness] = None
    certificate: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.verdict is Placement.UNSAFE and self.witness is None:
            raise ValueError("unsafe placement needs a witness")

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict.value}
        if self.certificate is not None:
            out["certificate"] = list(self.certificate)
        if self.witness is not None:
            w = self.witness
            out["witness"] = {"kind": w.kind, "faker": [w.faker.x, w.faker.y],
                              "claimed": [w.claimed.x, w.claimed.y], "parameter": w.parameter,
                              "blind": list(w.blind), "simulated_accusers": w.simulated_accusers}
        return out


def _no_three_collinear(pts, tol) -> bool:
    return not any(collinear(a, b, c, tol) for a, b, c in combinations(pts, 3))


def _certificate(stations, model, tol) -> Optional[tuple[int, ...]]:
    size = SUBSET_SIZE[model]
    for idx in combinations(range(len(stations)), size):
        pts = [stations[i] for i in idx]
        if not _no_three_collinear(pts, tol):
            continue
        if model is ProtocolModel.RSS:
            if not concyclic_four(*pts, tol):
                return idx
        elif not six_on_common_conic(pts, tol):
            return idx
    return None


def _all_collinear(stations, tol) -> bool:
    a, b = stations[0], stations[1]
    return all(collinear(a, b, c, tol) for c in stations[2:])


def _simulate(stations, plan, model) -> int:
    """Number of stations accusing the attack in a protocol run."""
    sensors = [Sensor(p) for p in stations] + [Sensor(plan.faker_true, Role.FAKING, plan)]
    scen = Scenario(tuple(sensors), model)
    m = round1(scen).matrix
    return int(m[:len(stations), -1].sum())


def _span(stations) -> float:
    xy = points_array(stations)
    return float(np.hypot(*(xy.max(axis=0) - xy.min(axis=0)))) or 1.0


def _rss_witness(stations, tol):
    if _all_collinear(stations, tol):
        a, b = stations[0], stations[1]
        d = (b - a).scale(1.0 / distance(a, b))
        faker = a + Point2D(-d.y, d.x).scale(0.5 * _span(stations))
        return naive_reflection(faker, a, b, stations, tol), 1.0
    tri = next(t for t in combinations(stations, 3) if not collinear(*t, tol))
    circ = circle_through_three(*tri, tol)
    if not all(circ.contains(p, tol) for p in stations):
        return None, None
    faker = circ.center + Point2D(0.5 * circ.radius, 0.0)
    plan = rss_fake_from_three(faker, *tri, correct=stations, tol=tol)
    return plan, plan.corruption.ratio(RadioParams())


def _tof_witness(stations, tol):
    if _all_collinear(stations, tol):
        a, b = stations[0], stations[1]
        d = (b - a).scale(1.0 / distance(a, b))
        ts = [(p - a).x * d.x + (p - a).y * d.y for p in stations]
        gap = 0.25 * _span(stations)
        faker = a + d.scale(min(ts) - gap)
        claimed = faker - d.scale(gap)
        return tof_fake(faker, gap, claimed, stations, tol), gap
    five = next((c for c in combinations(stations, 5) if _no_three_collinear(c, tol)), None)
    if five is None:
        return None, None
    try:
        conic = conic_through_five(list(five), tol)
        if conic.kind() != "hyperbola":
            return None, None
        f1, f2, a = hyperbola_foci(conic)
    except FindMapError:
        return None, None
    for faker, claimed in ((f1, f2), (f2, f1)):
        plan = tof_fake(faker, 2 * a, claimed, stations, tol)
        if len(plan.predicted_blind) == len(stations):
            return plan, 2 * a
    return None, None


def check_placement(stations: Sequence[Point2D], model, tol: Tolerances = DEFAULT_TOL) -> PlacementResult:
    model = ProtocolModel(model)
    if model not in SUBSET_SIZE:
        raise ValueError("placement checks apply to the rss and tof models")
    stations = list(stations)
    if len(stations) < SUBSET_SIZE[model]:
        raise TooFewStations(f"{model.value} needs at least {SUBSET_SIZE[model]} stations, got {len(stations)}")
    cert = _certificate(stations, model, tol)
    if cert is not None:
        return PlacementResult(Placement.SAFE, certificate=cert)
    plan, param = (_rss_witness if model is ProtocolModel.RSS else _tof_witness)(stations, tol)
    if plan is None:
        return PlacementResult(Placement.INCONCLUSIVE)
    blind = tuple(i for i, p in enumerate(stations) if p in plan.predicted_blind)
    accusers = _simulate(stations, plan, model)
    witness = PlacementWitness(plan.faker_true, plan.claimed, float(param), blind, plan.kind, accusers)
    return PlacementResult(Placement.UNSAFE, witness)


@dataclass(frozen=True)
class GridResult:
    candidates: int
    blind: int
    worst_margin: float


def grid_parameters(model: ProtocolModel, stations: Sequence[Point2D], count: int = 32) -> np.ndarray:
    if ProtocolModel(model) is ProtocolModel.RSS:
        # log-symmetric ratios around 1, never exactly 1
        return np.geomspace(0.25, 4.0, count)
    span = _span(stations)
    half = count // 2
    pos = np.linspace(0.01, 0.5, count - half) * span
    return np.concatenate([-pos[:half][::-1], pos])


def grid_refutation(stations: Sequence[Point2D], model, grid: int = 200, n_params: int = 32,
                    tol: Tolerances = DEFAULT_TOL, extra: Optional[tuple[Point2D, float]] = None) -> GridResult:
    """Try grid x params candidate attacks; count those no station notices.

    Each candidate is a fake position and a ratio/bias; the attacker's true
    position is the least-squares point consistent with what every station
    would have to measure. ``extra`` appends one explicit candidate.
    """
    model = ProtocolModel(model)
    xy = points_array(stations)
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    pad = 0.5 * max(hi - lo)
    gx = np.linspace(lo[0] - pad, hi[0] + pad, grid)
    gy = np.linspace(lo[1] - pad, hi[1] + pad, grid)
    cand = np.array(np.meshgrid(gx, gy, indexing="ij")).reshape(2, -1).T.copy()
    params = grid_parameters(model, stations, n_params)
    pinv = np.linalg.pinv(xy[1:] - xy[0])
    mode = 0 if model is ProtocolModel.RSS else 1
    blind, worst = kernels.grid_scan(xy, pinv, cand, params, mode, tol.eps_distance)
    total = cand.shape[0] * params.shape[0]
    if extra is not None:
        e_cand = np.array([[extra[0].x, extra[0].y]])
        b2, w2 = kernels.grid_scan(xy, pinv, e_cand, np.array([float(extra[1])]), mode, tol.eps_distance)
        blind += b2
        worst = min(worst, w2)
        total += 1
    return GridResult(total, int(blind), float(worst))
