"""Scenario generation, serialization, brute-force oracles and sweeps."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .adversary import (
    WORST_CASE,
    AccusationPolicy,
    AttackPlan,
    MirrorConstruction,
    PolicyKind,
    Role,
    mirror_construction,
    naive_fake,
    naive_reflection,
    rss_fake,
    rss_fake_from_three,
    rss_fake_from_two,
    tof_fake,
    tof_fake_from_three,
)
from .errors import FindMapError, InvalidScenario, NegativeDelay, SamplingExhausted
from .geometry import DEFAULT_TOL, Point2D, Tolerances, collinear, distance
from .protocol import (
    MIN_SENSORS,
    ProtocolModel,
    Report,
    max_tolerable_fakers,
    round1,
    run_findmap,
)
from .ranging import (
    NO_CORRUPTION,
    PowerScale,
    RadioParams,
    RangingModel,
    Technique,
    TimeShift,
    Transmission,
    observe,
)

FORMAT_VERSION = 1
DEFAULT_REGION = (0.0, 0.0, 1000.0, 1000.0)
MAX_REJECTIONS = 10_000
RESTART_AFTER = 500

# general-position margins, relative to the region diagonal
AREA_MARGIN = 1e-3
CIRCLE_MARGIN = 1e-3
CONIC_MARGIN = 1e-6


@dataclass(frozen=True)
class Sensor:
    true_pos: Point2D
    role: Role = Role.CORRECT
    plan: Optional[AttackPlan] = None

    @property
    def claimed(self) -> Point2D:
        return self.plan.claimed if self.plan is not None else self.true_pos

    @property
    def silent(self) -> bool:
        return self.plan is not None and self.plan.silent


def default_technique(model: ProtocolModel) -> Technique:
    return Technique.RSS if ProtocolModel(model) is ProtocolModel.RSS else Technique.STOF


@dataclass(frozen=True)
class Scenario:
    sensors: tuple[Sensor, ...]
    model: ProtocolModel = ProtocolModel.BASIC
    technique: Optional[Technique] = None
    radio_params: RadioParams = RadioParams()
    tolerances: Tolerances = DEFAULT_TOL
    seed: int = 0
    region: tuple[float, float, float, float] = DEFAULT_REGION

    def __post_init__(self):
        object.__setattr__(self, "model", ProtocolModel(self.model))
        tech = default_technique(self.model) if self.technique is None else Technique(self.technique)
        object.__setattr__(self, "technique", tech)
        object.__setattr__(self, "sensors", tuple(self.sensors))
        if (self.model is ProtocolModel.RSS) != (tech is Technique.RSS):
            raise InvalidScenario(f"{self.model.value} model cannot use {tech.value} ranging")
        for i, s in enumerate(self.sensors):
            if s.plan is not None and s.role is not Role.FAKING:
                raise InvalidScenario(f"sensor {i} is correct but carries an attack")
            c = s.plan.corruption if s.plan is not None else NO_CORRUPTION
            if isinstance(c, PowerScale) and self.model is not ProtocolModel.RSS:
                raise InvalidScenario(f"sensor {i}: power scaling needs the rss model")
            if isinstance(c, TimeShift) and self.model is not ProtocolModel.TOF:
                raise InvalidScenario(f"sensor {i}: time shifting needs the tof model")

    @property
    def n(self) -> int:
        return len(self.sensors)

    @property
    def f(self) -> int:
        return sum(s.role is Role.FAKING for s in self.sensors)

    @property
    def roles(self) -> list[Role]:
        return [s.role for s in self.sensors]

    def correct_indices(self) -> list[int]:
        return [i for i, s in enumerate(self.sensors) if s.role is Role.CORRECT]

    def faker_indices(self) -> list[int]:
        return [i for i, s in enumerate(self.sensors) if s.role is Role.FAKING]

    def correct_positions(self) -> list[Point2D]:
        return [s.true_pos for s in self.sensors if s.role is Role.CORRECT]

    def ranging_model(self) -> RangingModel:
        return RangingModel(self.technique, self.radio_params)

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        p = self.radio_params
        t = self.tolerances
        return {
            "version": FORMAT_VERSION,
            "n": self.n,
            "f": self.f,
            "model": self.model.value,
            "technique": self.technique.value,
            "radio_params": {"s_common": p.s_common, "wavelength": p.wavelength, "s_r": p.s_r, "s_u": p.s_u},
            "region": list(self.region),
            "seed": self.seed,
            "tolerances": {"eps_collinear": t.eps_collinear, "eps_distance": t.eps_distance,
                           "eps_conic": t.eps_conic},
            "sensors": [_sensor_to_dict(s, self.radio_params) for s in self.sensors],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> Scenario:
        try:
            if d.get("version", FORMAT_VERSION) != FORMAT_VERSION:
                raise InvalidScenario(f"unsupported scenario version {d['version']}")
            params = RadioParams(**d.get("radio_params", {}))
            tol = Tolerances(**d.get("tolerances", {}))
            model = ProtocolModel(d["model"])
            raw = d["sensors"]
            positions = [Point2D(float(s["x"]), float(s["y"])) for s in raw]
            roles = [Role(s.get("role", "correct")) for s in raw]
            correct = [p for p, r in zip(positions, roles) if r is Role.CORRECT]
            sensors = []
            for pos, role, s in zip(positions, roles, raw):
                plan = None
                if s.get("attack") is not None:
                    plan = _plan_from_dict(pos, s["attack"], correct, params, tol)
                sensors.append(Sensor(pos, role, plan))
            scen = cls(tuple(sensors), model, d.get("technique"), params, tol,
                       int(d.get("seed", 0)), tuple(float(v) for v in d.get("region", DEFAULT_REGION)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidScenario):
                raise
            raise InvalidScenario(f"malformed scenario: {exc}") from exc
        for key in ("n", "f"):
            if key in d and d[key] != getattr(scen, key):
                raise InvalidScenario(f"declared {key}={d[key]} does not match sensors ({getattr(scen, key)})")
        return scen

    @classmethod
    def from_json(cls, text: str) -> Scenario:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidScenario(f"scenario is not valid JSON: {exc}") from exc


def _policy_to_dict(policy: AccusationPolicy) -> Union[str, dict]:
    if policy.accusations is None:
        return policy.kind.value
    return {"kind": policy.kind.value, "accusations": "".join("1" if a else "0" for a in policy.accusations)}


def _policy_from_dict(raw) -> AccusationPolicy:
    if raw is None:
        return WORST_CASE
    if isinstance(raw, str):
        return AccusationPolicy(PolicyKind(raw))
    return AccusationPolicy(PolicyKind(raw["kind"]), tuple(c == "1" for c in raw["accusations"]))


def _sensor_to_dict(s: Sensor, params: RadioParams) -> dict:
    out = {"x": s.true_pos.x, "y": s.true_pos.y, "role": s.role.value}
    if s.plan is not None:
        plan = s.plan
        prm = {"claimed_x": plan.claimed.x, "claimed_y": plan.claimed.y, "policy": _policy_to_dict(plan.policy)}
        if isinstance(plan.corruption, PowerScale):
            prm["lambda"] = plan.corruption.ratio(params)
        elif isinstance(plan.corruption, TimeShift):
            prm["b"] = plan.corruption.b
        out["attack"] = {"kind": "silent" if plan.silent else plan.kind, "params": prm}
    return out


def _plan_from_dict(pos: Point2D, attack: dict, correct, params: RadioParams, tol: Tolerances) -> AttackPlan:
    kind = attack["kind"]
    prm = attack.get("params", {})
    policy = _policy_from_dict(prm.get("policy"))
    claimed = Point2D(float(prm.get("claimed_x", pos.x)), float(prm.get("claimed_y", pos.y)))
    if kind == "silent":
        return AttackPlan(pos, claimed, NO_CORRUPTION, frozenset(), policy, "silent", silent=True)
    if kind == "honest":
        return AttackPlan(pos, pos, NO_CORRUPTION, frozenset(correct), policy, "honest")
    if kind == "naive":
        return naive_fake(pos, claimed, correct, tol, policy)
    if kind == "rss":
        return rss_fake(pos, float(prm["lambda"]), claimed, correct, params, tol, policy)
    if kind == "tof":
        return tof_fake(pos, float(prm["b"]), claimed, correct, tol, policy)
    raise InvalidScenario(f"unknown attack kind {kind!r}")


# generation ----------------------------------------------------------------

def region_scale(region) -> float:
    x0, y0, x1, y1 = region
    return math.hypot(x1 - x0, y1 - y0)


def sample_general_position(n: int, model: ProtocolModel, region, rng: np.random.Generator,
                            max_rejections: int = MAX_REJECTIONS) -> np.ndarray:
    """Uniform points in ``region`` passing the model's general-position margins.

    Points are added one at a time; a candidate is rejected if it forms a
    near-degenerate triple (always), quadruple on a circle (rss) or sextuple
    on a conic (tof) with the points already accepted. An early pair that
    leaves almost no room for later points is escaped by starting over after
    RESTART_AFTER consecutive rejections.
    """
    model = ProtocolModel(model)
    x0, y0, x1, y1 = region
    scale = region_scale(region)
    min_area = AREA_MARGIN * scale * scale
    min_circle = CIRCLE_MARGIN * scale
    xy = np.empty((n, 2))
    k = 0
    rejections = streak = 0
    while k < n:
        p = np.array([rng.uniform(x0, x1), rng.uniform(y0, y1)])
        ok = kernels.min_triangle_area_with(xy[:k], p) >= min_area
        if ok and model is ProtocolModel.RSS and k >= 3:
            ok = kernels.min_circle_residual_with(xy[:k], kernels.combos(k, 3), p) >= min_circle
        if ok and model is ProtocolModel.TOF and k >= 5:
            ok = kernels.min_conic_det_with(xy[:k], kernels.combos(k, 5), p) >= CONIC_MARGIN
        if ok:
            xy[k] = p
            k += 1
            streak = 0
        else:
            rejections += 1
            streak += 1
            if streak >= RESTART_AFTER:
                k = streak = 0
            if rejections >= max_rejections:
                raise SamplingExhausted(f"gave up after {rejections} rejections placing {n} sensors")
    return xy


def _pick(rng, items, k):
    idx = rng.choice(len(items), size=k, replace=False)
    return [items[i] for i in idx]


def _anchored_attack(model, faker, correct, rng, params, tol, policy, scale) -> Optional[AttackPlan]:
    """Attack fooling as many correct sensors as a single construction allows."""
    if len(correct) < 3:
        return None
    for _ in range(20):
        try:
            if model is ProtocolModel.BASIC:
                p1, p2 = _pick(rng, correct, 2)
                return naive_reflection(faker, p1, p2, correct, tol, policy)
            p1, p2, p3 = _pick(rng, correct, 3)
            if model is ProtocolModel.RSS:
                return rss_fake_from_three(faker, p1, p2, p3, correct, params, tol, policy)
            plan = tof_fake_from_three(faker, p1, p2, p3, correct, tol, policy)
            # keep the claim within a few region diameters
            if distance(plan.claimed, faker) < 10 * scale:
                return plan
        except FindMapError:
            continue
    return None


def _random_attack(model, faker, correct, rng, params, tol, policy, scale) -> AttackPlan:
    angle = rng.uniform(0, 2 * math.pi)
    c = rng.uniform(0.02, 0.3) * scale
    claimed = Point2D(faker.x + c * math.cos(angle), faker.y + c * math.sin(angle))
    if model is ProtocolModel.RSS and len(correct) >= 2:
        lam = float(rng.choice([rng.uniform(0.5, 0.95), rng.uniform(1.05, 2.0)]))
        p1, p2 = sorted(correct, key=lambda p: distance(p, faker))[:2]
        try:
            return rss_fake_from_two(faker, p1, p2, lam, correct, params, tol, policy)
        except FindMapError:
            return rss_fake(faker, lam, claimed, correct, params, tol, policy)
    if model is ProtocolModel.TOF:
        b = float(rng.uniform(-0.9, 0.9) * c)
        return tof_fake(faker, b if b != 0 else 0.5 * c, claimed, correct, tol, policy)
    return naive_fake(faker, claimed, correct, tol, policy)


def generate_scenario(n: int, f: int, model: Union[ProtocolModel, str] = ProtocolModel.BASIC,
                      region=DEFAULT_REGION, seed: int = 0, technique: Optional[Technique] = None,
                      attack: str = "anchored", policy: AccusationPolicy = WORST_CASE,
                      tolerances: Tolerances = DEFAULT_TOL, radio_params: RadioParams = RadioParams(),
                      allow_excess: bool = False) -> Scenario:
    """Random general-position scenario, reproducible from ``seed``.

    ``attack`` is "anchored" (each faker fools as many correct sensors as its
    construction allows), "random" (random claim and bias) or "none"
    (fakers claim their true position).
    """
    model = ProtocolModel(model)
    if n < MIN_SENSORS[model]:
        raise InvalidScenario(f"{model.value} needs n >= {MIN_SENSORS[model]}")
    if not 0 <= f <= n:
        raise InvalidScenario(f"f={f} outside [0, n]")
    if not allow_excess and f > max_tolerable_fakers(model, n):
        raise InvalidScenario(f"f={f} exceeds the tolerable bound {max_tolerable_fakers(model, n)} for n={n}")
    rng = np.random.default_rng(seed)
    xy = sample_general_position(n, model, region, rng)
    fakers = set(int(i) for i in rng.choice(n, size=f, replace=False))
    positions = [Point2D(float(x), float(y)) for x, y in xy]
    correct = [p for i, p in enumerate(positions) if i not in fakers]
    scale = region_scale(region)
    sensors = []
    for i, pos in enumerate(positions):
        if i not in fakers:
            sensors.append(Sensor(pos))
            continue
        plan = None
        if attack == "anchored":
            plan = _anchored_attack(model, pos, correct, rng, radio_params, tolerances, policy, scale)
        elif attack == "none":
            plan = AttackPlan(pos, pos, NO_CORRUPTION, frozenset(correct), policy, "honest")
        if plan is None:
            plan = _random_attack(model, pos, correct, rng, radio_params, tolerances, policy, scale)
        sensors.append(Sensor(pos, Role.FAKING, plan))
    return Scenario(tuple(sensors), model, technique, radio_params, tolerances, int(seed), tuple(region))


def attach_attack(scenario: Scenario, faker: int, kind: str, **params) -> Scenario:
    """Replace the plan of faker ``faker``.

    kind "naive": claimed=(x, y) or offset=(dx, dy).
    kind "rss": lam plus anchors=(i, j) (default: the two nearest correct
    sensors), or lam plus claimed for an explicit fake position.
    kind "tof": b plus claimed, or b plus distance (and optional angle).
    """
    s = scenario.sensors[faker]
    if s.role is not Role.FAKING:
        raise InvalidScenario(f"sensor {faker} is not faking")
    pos = s.true_pos
    correct = scenario.correct_positions()
    tol, rp = scenario.tolerances, scenario.radio_params
    policy = params.get("policy", s.plan.policy if s.plan else WORST_CASE)

    def claimed_from(params):
        if "claimed" in params:
            return Point2D(*map(float, params["claimed"]))
        if "offset" in params:
            dx, dy = params["offset"]
            return Point2D(pos.x + dx, pos.y + dy)
        if "distance" in params:
            a = params.get("angle", 0.0)
            return Point2D(pos.x + params["distance"] * math.cos(a), pos.y + params["distance"] * math.sin(a))
        raise InvalidScenario("attack needs claimed, offset or distance")

    if kind == "naive":
        plan = naive_fake(pos, claimed_from(params), correct, tol, policy)
    elif kind == "rss":
        lam = float(params["lam"])
        if "claimed" in params:
            plan = rss_fake(pos, lam, claimed_from(params), correct, rp, tol, policy)
        else:
            idx = params.get("anchors")
            if idx is None:
                anchors = sorted(correct, key=lambda p: distance(p, pos))[:2]
            else:
                anchors = [scenario.sensors[i].true_pos for i in idx]
            plan = rss_fake_from_two(pos, anchors[0], anchors[1], lam, correct, rp, tol, policy)
    elif kind == "tof":
        plan = tof_fake(pos, float(params["b"]), claimed_from(params), correct, tol, policy)
    else:
        raise InvalidScenario(f"unknown attack kind {kind!r}")
    sensors = list(scenario.sensors)
    sensors[faker] = Sensor(pos, Role.FAKING, plan)
    return replace(scenario, sensors=tuple(sensors))


# oracles -------------------------------------------------------------------

def simulated_accusers(scenario: Scenario, faker: int) -> set[int]:
    """Correct ordinals that detect ``faker``, by per-sensor scalar simulation."""
    model = scenario.ranging_model()
    s = scenario.sensors[faker]
    corruption = s.plan.corruption if s.plan is not None else NO_CORRUPTION
    tx = Transmission(s.true_pos, corruption)
    out = set()
    for v in scenario.correct_indices():
        rx = scenario.sensors[v].true_pos
        try:
            est = observe(model, tx, rx)
        except NegativeDelay:
            out.add(v)
            continue
        if abs(est - distance(rx, s.claimed)) > scenario.tolerances.eps_distance:
            out.add(v)
    return out


def oracle_blind_set(scenario: Scenario, faker: int) -> frozenset[int]:
    return frozenset(set(scenario.correct_indices()) - simulated_accusers(scenario, faker))


def predicted_blind_ordinals(scenario: Scenario, faker: int) -> frozenset[int]:
    plan = scenario.sensors[faker].plan
    blind = plan.predicted_blind if plan is not None else frozenset()
    return frozenset(i for i in scenario.correct_indices() if scenario.sensors[i].true_pos in blind)


def oracle_fact1(scenario: Scenario) -> bool:
    """Every non-collinear triple of correct sensors holds an accuser of every naive faker."""
    correct = scenario.correct_indices()
    for u in scenario.faker_indices():
        plan = scenario.sensors[u].plan
        if plan is None or plan.kind != "naive":
            continue
        accusers = simulated_accusers(scenario, u)
        for tri in combinations(correct, 3):
            pts = [scenario.sensors[i].true_pos for i in tri]
            if collinear(*pts, scenario.tolerances):
                continue
            if not accusers.intersection(tri):
                return False
    return True


# mirror executions ----------------------------------------------------------

def mirror_executions(mc: MirrorConstruction, radio_params: RadioParams = RadioParams(),
                      tolerances: Tolerances = DEFAULT_TOL, seed: int = 0) -> tuple[Scenario, Scenario]:
    """Both executions of the reflection argument as basic-model scenarios.

    Ordinals: 0, 1 on-axis observers; 2..k+1 claim the C positions;
    k+2..2k+1 claim the mirrored faking positions; last is the silent faker
    when n is odd. Fakers copy the accusation row of their honest twin in
    the other execution.
    """
    k = mc.k
    v, u = mc.on_axis
    c_pos, g_pos, g_virt = mc.correct_set, mc.faking_set, mc.virtual_set
    c_virt = tuple(mc.reflect(p) for p in c_pos)

    def build(fake_policies=None):
        one = [Sensor(v), Sensor(u)] + [Sensor(p) for p in c_pos]
        two = [Sensor(v), Sensor(u)] + [None] * k + [Sensor(p) for p in g_virt]
        for i in range(k):
            pol = fake_policies[0][k + 2 + i] if fake_policies else WORST_CASE
            one.append(Sensor(g_pos[i], Role.FAKING,
                              AttackPlan(g_pos[i], g_virt[i], NO_CORRUPTION, frozenset(), pol, "naive")))
            pol = fake_policies[1][2 + i] if fake_policies else WORST_CASE
            two[2 + i] = Sensor(c_virt[i], Role.FAKING,
                                AttackPlan(c_virt[i], c_pos[i], NO_CORRUPTION, frozenset(), pol, "naive"))
        if mc.silent_faker is not None:
            for ex in (one, two):
                ex.append(Sensor(mc.silent_faker, Role.FAKING,
                                 AttackPlan(mc.silent_faker, mc.silent_faker, silent=True, kind="silent")))
        mk = lambda ss: Scenario(tuple(ss), ProtocolModel.BASIC, Technique.STOF, radio_params, tolerances, seed)
        return mk(one), mk(two)

    first, second = build()
    rows = (round1(first).matrix, round1(second).matrix)
    policies = ({}, {})
    for ex, other in ((0, 1), (1, 0)):
        scen = (first, second)[ex]
        for i in scen.faker_indices():
            if not scen.sensors[i].silent:
                policies[ex][i] = AccusationPolicy(PolicyKind.MIMIC, tuple(bool(a) for a in rows[other][i]))
    return build(policies)


def transcripts_match(a: Report, b: Report, observers: Sequence[int], atol: float = 1e-12) -> bool:
    for o in observers:
        ea, eb = a.observed_by(o), b.observed_by(o)
        if len(ea) != len(eb):
            return False
        for x, y in zip(ea, eb):
            if (x.round, x.receiver, x.sender) != (y.round, y.receiver, y.sender):
                return False
            if x.round == 1:
                if (x.estimate is None) != (y.estimate is None):
                    return False
                if x.estimate is not None and abs(x.estimate - y.estimate) > atol:
                    return False
                if abs(x.claimed.x - y.claimed.x) > atol or abs(x.claimed.y - y.claimed.y) > atol:
                    return False
            elif x.accusations != y.accusations:
                return False
    return True


# sweeps --------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    """Grid of (n, f) cells.

    ``f_values`` entries are integers or strings "max", "max+1", "max-2" ...
    relative to the model's tolerable bound for each n.
    """

    model: ProtocolModel = ProtocolModel.BASIC
    n_values: tuple[int, ...] = (8, 9, 10, 11, 12)
    f_values: tuple[Union[int, str], ...] = ("max",)
    trials: int = 100
    seed: int = 0
    attack: str = "anchored"
    mirror: bool = False
    region: tuple[float, float, float, float] = DEFAULT_REGION

    def __post_init__(self):
        object.__setattr__(self, "model", ProtocolModel(self.model))
        if not self.n_values or not self.f_values:
            raise ValueError("sweep ranges must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    def resolve_f(self, n: int) -> list[int]:
        top = max_tolerable_fakers(self.model, n)
        out = []
        for spec in self.f_values:
            if isinstance(spec, str):
                s = spec.replace(" ", "")
                if not s.startswith("max"):
                    out.append(int(s))
                    continue
                f = top + (int(s[3:]) if len(s) > 3 else 0)
            else:
                f = int(spec)
            out.append(f)
        return sorted({f for f in out if 0 <= f <= n - 3})

    @classmethod
    def from_dict(cls, d: dict) -> SweepSpec:
        def ints(v):
            if isinstance(v, str) and ".." in v:
                lo, hi = v.split("..")
                return tuple(range(int(lo), int(hi) + 1))
            if isinstance(v, (int, str)):
                return (v,)
            return tuple(v)

        return cls(
            model=ProtocolModel(d.get("model", "basic")),
            n_values=tuple(int(x) for x in ints(d.get("n", "8..12"))),
            f_values=ints(d.get("f", ["max"])),
            trials=int(d.get("trials", 100)),
            seed=int(d.get("seed", 0)),
            attack=d.get("attack", "anchored"),
            mirror=bool(d.get("mirror", False)),
            region=tuple(d.get("region", DEFAULT_REGION)),
        )


def derive_seed(base: int, *key: int) -> int:
    return int(np.random.SeedSequence([base, *key]).generate_state(1, dtype=np.uint64)[0] >> 1)


@dataclass(frozen=True)
class SweepRow:
    n: int
    f: int
    model: str
    trials: int
    exact_rate: float
    mean_accusers: float


def _run_cell(spec: SweepSpec, n: int, f: int) -> SweepRow:
    exact = 0
    tallies = []
    for t in range(spec.trials):
        scen = generate_scenario(n, f, spec.model, spec.region, derive_seed(spec.seed, n, f, t),
                                 attack=spec.attack, allow_excess=True)
        rep = run_findmap(scen)
        exact += rep.exact
        tallies.extend(rep.verdict.tallies[i] for i in scen.faker_indices())
    return SweepRow(n, f, spec.model.value, spec.trials, exact / spec.trials,
                    float(np.mean(tallies)) if tallies else 0.0)


def _run_mirror_cell(spec: SweepSpec, n: int) -> SweepRow:
    f = math.ceil(n / 2) - 1
    exact = 0
    tallies = []
    runs = 0
    for t in range(spec.trials):
        mc = mirror_construction(n, f, seed=derive_seed(spec.seed, n, f, t, 1))
        for scen in mirror_executions(mc):
            rep = run_findmap(scen)
            exact += rep.exact
            runs += 1
            tallies.extend(rep.verdict.tallies[i] for i in scen.faker_indices() if not scen.sensors[i].silent)
    return SweepRow(n, f, "mirror", runs, exact / runs, float(np.mean(tallies)) if tallies else 0.0)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    cells = [(n, f) for n in spec.n_values if n >= MIN_SENSORS[spec.model] for f in spec.resolve_f(n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell, [spec] * len(cells), *zip(*cells))) if cells else []
    else:
        rows = [_run_cell(spec, n, f) for n, f in cells]
    if spec.mirror:
        rows += [_run_mirror_cell(spec, n) for n in spec.n_values if n >= 4]
    return rows


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "f", "model", "trials", "exact_rate", "mean_accusers"])
    for r in rows:
        w.writerow([r.n, r.f, r.model, r.trials, f"{r.exact_rate:.6f}", f"{r.mean_accusers:.6f}"])
    return buf.getvalue()
