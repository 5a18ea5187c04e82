"""The two-round FindMap protocol over a lossless synchronous network.

Round 1: every sensor broadcasts its claimed coordinates; each correct
receiver compares the claimed distance with the ranged distance and records
an accusation on mismatch. Round 2: accusation arrays are broadcast and a
sensor is declared faking once its tally reaches the threshold.
"""
from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Optional

import numpy as np

from . import kernels
from .adversary import WORST_CASE, Role, faker_accusations
from .errors import NegativeDelay, TooFewSensors
from .geometry import Point2D, distance
from .ranging import NO_CORRUPTION, PowerScale, RangingModel, Technique, TimeShift, Transmission, observe

if TYPE_CHECKING:
    from .harness import Scenario


class ProtocolModel(str, Enum):
    BASIC = "basic"
    RSS = "rss"
    TOF = "tof"


class Status(str, Enum):
    CORRECT = "correct"
    FAKING = "faking"
    ABSENT = "absent"


MIN_SENSORS = {ProtocolModel.BASIC: 3, ProtocolModel.RSS: 4, ProtocolModel.TOF: 6}
# correct sensors a single faker can keep blind, by model
MAX_BLIND = {ProtocolModel.BASIC: 2, ProtocolModel.RSS: 3, ProtocolModel.TOF: 5}


def _check_n(model: ProtocolModel, n: int) -> ProtocolModel:
    model = ProtocolModel(model)
    if n < MIN_SENSORS[model]:
        raise TooFewSensors(f"{model.value} FindMap needs at least {MIN_SENSORS[model]} sensors, got {n}")
    return model


def threshold_for(model: ProtocolModel, n: int) -> int:
    model = _check_n(model, n)
    if model is ProtocolModel.BASIC:
        return n // 2
    return math.ceil(n / 2) - (1 if model is ProtocolModel.RSS else 2)


def max_tolerable_fakers(model: ProtocolModel, n: int) -> int:
    """Largest f with n - f - blind > f, blind being MAX_BLIND[model]."""
    model = _check_n(model, n)
    if model is ProtocolModel.BASIC:
        return math.ceil(n / 2) - 2
    return n // 2 - (2 if model is ProtocolModel.RSS else 3)


@dataclass(frozen=True)
class TranscriptEntry:
    round: int
    receiver: int
    sender: int
    claimed: Optional[Point2D] = None
    estimate: Optional[float] = None
    accusations: Optional[tuple[bool, ...]] = None

    def to_dict(self) -> dict:
        out = {"round": self.round, "receiver": self.receiver, "sender": self.sender}
        if self.round == 1:
            out["claimed"] = [self.claimed.x, self.claimed.y]
            out["estimate"] = self.estimate
        else:
            out["accusations"] = "".join("1" if a else "0" for a in self.accusations)
        return out


@dataclass(frozen=True)
class Verdict:
    statuses: tuple[Status, ...]
    tallies: tuple[int, ...]

    def faking(self) -> list[int]:
        return [i for i, s in enumerate(self.statuses) if s is Status.FAKING]


@dataclass
class Round1Result:
    matrix: np.ndarray
    present: np.ndarray
    transcript: list[TranscriptEntry] = field(default_factory=list)
    collisions: list[tuple[int, int]] = field(default_factory=list)


def _encode_corruption(scenario: Scenario):
    n = scenario.n
    kind = np.zeros(n, dtype=np.int64)
    value = np.zeros(n, dtype=np.float64)
    for i, s in enumerate(scenario.sensors):
        c = s.plan.corruption if s.plan is not None else None
        if isinstance(c, PowerScale):
            kind[i], value[i] = 1, c.s_fake
        elif isinstance(c, TimeShift):
            kind[i], value[i] = 2, c.b
    return kind, value


_TECH_CODE = {Technique.RSS: 0, Technique.STOF: 1, Technique.DAT: 2}


def round1(scenario: Scenario, transcript: bool = False) -> Round1Result:
    n = scenario.n
    tol = scenario.tolerances
    p = scenario.radio_params
    true_xy = np.array([(s.true_pos.x, s.true_pos.y) for s in scenario.sensors], dtype=np.float64)
    claimed = [s.claimed for s in scenario.sensors]
    claimed_xy = np.array([(c.x, c.y) for c in claimed], dtype=np.float64)
    kind, value = _encode_corruption(scenario)
    present = np.array([not s.silent for s in scenario.sensors], dtype=bool)
    roles = [s.role for s in scenario.sensors]

    acc = kernels.accusation_matrix(true_xy, claimed_xy, _TECH_CODE[scenario.technique], kind, value,
                                    p.s_common, p.wavelength, p.s_r, p.s_u, tol.eps_distance)
    matrix = np.zeros((n, n), dtype=bool)
    for i, s in enumerate(scenario.sensors):
        if not present[i]:
            continue
        if s.role is Role.CORRECT:
            matrix[i] = acc[i] & present
        else:
            matrix[i] = faker_accusations(s.plan.policy if s.plan else WORST_CASE, i, roles)
    np.fill_diagonal(matrix, False)

    collisions = [(i, j) for i in range(n) for j in range(i + 1, n)
                  if distance(claimed[i], claimed[j]) <= tol.eps_distance]
    result = Round1Result(matrix, present, collisions=collisions)
    if transcript:
        result.transcript = _round1_transcript(scenario, claimed, present)
    return result


def _round1_transcript(scenario: Scenario, claimed, present) -> list[TranscriptEntry]:
    model = RangingModel(scenario.technique, scenario.radio_params)
    entries = []
    for v, rx in enumerate(scenario.sensors):
        if rx.role is not Role.CORRECT:
            continue
        for u, tx in enumerate(scenario.sensors):
            if u == v or not present[u]:
                continue
            corruption = tx.plan.corruption if tx.plan is not None else NO_CORRUPTION
            try:
                est = observe(model, Transmission(tx.true_pos, corruption), rx.true_pos)
            except NegativeDelay:
                est = None
            entries.append(TranscriptEntry(1, v, u, claimed[u], est))
    return entries


def round2(matrix: np.ndarray, threshold: int, present: Optional[np.ndarray] = None) -> Verdict:
    """Tally accusations and apply ``threshold <= tally``.

    All correct sensors receive the same arrays, so one global tally stands
    for every sensor's local computation.
    """
    matrix = np.asarray(matrix, dtype=bool)
    n = matrix.shape[0]
    if present is None:
        present = np.ones(n, dtype=bool)
    tallies = matrix[present].sum(axis=0).astype(int)
    statuses = tuple(
        Status.ABSENT if not present[u] else (Status.FAKING if tallies[u] >= threshold else Status.CORRECT)
        for u in range(n)
    )
    return Verdict(statuses, tuple(int(t) for t in tallies))


def round2_transcript(scenario: Scenario, matrix: np.ndarray, present: np.ndarray) -> list[TranscriptEntry]:
    entries = []
    for v, rx in enumerate(scenario.sensors):
        if rx.role is not Role.CORRECT:
            continue
        for u in range(scenario.n):
            if u != v and present[u]:
                entries.append(TranscriptEntry(2, v, u, accusations=tuple(bool(a) for a in matrix[u])))
    return entries


@dataclass
class Report:
    scenario_digest: str
    verdict: Verdict
    matrix: np.ndarray
    threshold: int
    metrics: dict
    transcript: Optional[list[TranscriptEntry]] = None
    collisions: list[tuple[int, int]] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def exact(self) -> bool:
        return self.metrics["fp"] == 0 and self.metrics["fn"] == 0

    def observed_by(self, ordinal: int) -> list[TranscriptEntry]:
        return [e for e in (self.transcript or []) if e.receiver == ordinal]

    def to_dict(self) -> dict:
        """JSON-ready form. Wall time is left out so files are reproducible."""
        out = {
            "scenario_digest": self.scenario_digest,
            "threshold": self.threshold,
            "verdicts": [s.value for s in self.verdict.statuses],
            "tallies": list(self.verdict.tallies),
            "matrix": "".join("1" if a else "0" for a in self.matrix.ravel()),
            "metrics": dict(self.metrics),
        }
        if self.collisions:
            out["collisions"] = [list(c) for c in self.collisions]
        if self.transcript is not None:
            out["transcript"] = [e.to_dict() for e in self.transcript]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def score(roles, verdict: Verdict) -> dict:
    m = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    for role, status in zip(roles, verdict.statuses):
        if status is Status.ABSENT:
            continue
        faking = status is Status.FAKING
        if role is Role.FAKING:
            m["tp" if faking else "fn"] += 1
        else:
            m["fp" if faking else "tn"] += 1
    return m


def scenario_digest(scenario: Scenario) -> str:
    return hashlib.sha256(scenario.to_json().encode()).hexdigest()


def run_findmap(scenario: Scenario, transcript: bool = False, threshold: Optional[int] = None) -> Report:
    start = time.perf_counter()
    if threshold is None:
        threshold = threshold_for(scenario.model, scenario.n)
    r1 = round1(scenario, transcript=transcript)
    verdict = round2(r1.matrix, threshold, r1.present)
    log = None
    if transcript:
        log = r1.transcript + round2_transcript(scenario, r1.matrix, r1.present)
    return Report(
        scenario_digest=scenario_digest(scenario),
        verdict=verdict,
        matrix=r1.matrix,
        threshold=threshold,
        metrics=score([s.role for s in scenario.sensors], verdict),
        transcript=log,
        collisions=r1.collisions,
        wall_time=time.perf_counter() - start,
    )
