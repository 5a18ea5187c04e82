import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from findmap.adversary import AttackPlan, Role, naive_fake, rss_blind_circle, rss_fake_from_two
from findmap.errors import TooFewSensors
from findmap.geometry import Point2D
from findmap.harness import Scenario, Sensor, generate_scenario, simulated_accusers
from findmap.protocol import (
    ProtocolModel,
    Status,
    max_tolerable_fakers,
    round1,
    round2,
    run_findmap,
    threshold_for,
)

P = Point2D
B, R, T = ProtocolModel.BASIC, ProtocolModel.RSS, ProtocolModel.TOF


def test_threshold_examples():
    assert threshold_for(B, 10) == 5
    assert threshold_for(R, 10) == 4
    assert threshold_for(T, 12) == 4
    with pytest.raises(TooFewSensors):
        threshold_for(T, 5)


def test_max_tolerable_examples():
    assert max_tolerable_fakers(B, 10) == 3
    assert max_tolerable_fakers(R, 10) == 3
    assert max_tolerable_fakers(T, 12) == 3


@pytest.mark.parametrize("model,blind", [(B, 2), (R, 3), (T, 5)])
@given(n=st.integers(6, 200))
def test_tolerable_bound_is_largest_satisfying_inequality(model, blind, n):
    f = max_tolerable_fakers(model, n)
    assert n - f - blind > f
    assert not n - (f + 1) - blind > f + 1


@pytest.mark.parametrize("model,blind", [(B, 2), (R, 3), (T, 5)])
@given(n=st.integers(6, 200))
def test_threshold_separates_fakers_from_correct(model, blind, n):
    # at max f: a faker collects >= n - f - blind correct accusations,
    # a correct sensor collects at most f from fakers
    f = max_tolerable_fakers(model, n)
    t = threshold_for(model, n)
    assert f < t <= n - f - blind


def _honest(points):
    return Scenario(tuple(Sensor(p) for p in points), B)


def test_all_honest_has_no_accusations():
    sc = _honest([P(0, 0), P(10, 1), P(3, 9), P(7, 4), P(-5, 6)])
    r1 = round1(sc)
    assert not r1.matrix.any()
    rep = run_findmap(sc)
    assert rep.verdict.faking() == []


def test_single_naive_faker_accused_by_non_blind():
    pts = [P(0, 0), P(10, 1), P(3, 9), P(7, 4), P(-5, 6)]
    correct = pts[:4]
    plan = naive_fake(pts[4], P(-5, -6), correct)
    sensors = [Sensor(p) for p in correct] + [Sensor(pts[4], Role.FAKING, plan)]
    sc = Scenario(tuple(sensors), B)
    m = round1(sc).matrix
    accusers = {i for i in range(4) if m[i, 4]}
    assert len(accusers) >= 5 - 1 - 2
    assert accusers == {i for i, p in enumerate(correct) if p not in plan.predicted_blind}


def test_rss_faker_accused_exactly_off_circle():
    f, p1, p2 = P(0, 0), P(-20, 10), P(20, 10)
    base = rss_fake_from_two(f, p1, p2, 2.0)
    loc = rss_blind_circle(base)
    c, r = loc.circle.center, loc.circle.radius
    on = P(c.x + r * math.cos(0.7), c.y + r * math.sin(0.7))
    others = [P(-40, -30), P(35, -25), P(5, 60)]
    correct = [p1, p2, on] + others
    plan = rss_fake_from_two(f, p1, p2, 2.0, correct)
    assert plan.predicted_blind == frozenset({p1, p2, on})
    sc = Scenario(tuple([Sensor(p) for p in correct] + [Sensor(f, Role.FAKING, plan)]), R)
    m = round1(sc).matrix
    assert [bool(m[i, -1]) for i in range(len(correct))] == [False, False, False, True, True, True]


def test_round2_examples():
    assert all(s is Status.CORRECT for s in round2(np.zeros((10, 10), bool), 1).statuses)
    m = np.zeros((10, 10), bool)
    m[:5, 9] = True
    assert round2(m, 5).statuses[9] is Status.FAKING
    m = np.zeros((10, 10), bool)
    m[7:, 0] = True
    v = round2(m, 5)
    assert v.tallies[0] == 3 and v.statuses[0] is Status.CORRECT


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([B, R, T]), st.integers(0, 10**6), st.integers(0, 4))
def test_exact_detection_in_tolerable_region(model, seed, extra):
    n = {B: 5, R: 7, T: 9}[model] + extra
    f = max_tolerable_fakers(model, n)
    sc = generate_scenario(n, f, model, seed=seed)
    rep = run_findmap(sc)
    assert rep.exact
    assert set(rep.verdict.faking()) == set(sc.faker_indices())


def test_matrix_agrees_with_scalar_simulation():
    sc = generate_scenario(12, 3, T, seed=11)
    m = round1(sc).matrix
    for u in sc.faker_indices():
        kernel = {v for v in sc.correct_indices() if m[v, u]}
        assert kernel == simulated_accusers(sc, u)


def test_report_json_round_trip_and_content():
    sc = generate_scenario(8, 2, B, seed=4)
    rep = run_findmap(sc, transcript=True)
    d = json.loads(rep.to_json())
    assert d["threshold"] == 4
    assert len(d["matrix"]) == 64
    assert d["verdicts"].count("faking") == 2
    assert "wall_time" not in d
    assert {e["round"] for e in d["transcript"]} == {1, 2}
    assert rep.to_json() == run_findmap(sc, transcript=True).to_json()


def test_silent_faker_is_absent():
    pts = [P(0, 0), P(10, 1), P(3, 9), P(7, 4), P(-5, 6)]
    silent = AttackPlan(pts[4], pts[4], silent=True, kind="silent")
    sc = Scenario(tuple([Sensor(p) for p in pts[:4]] + [Sensor(pts[4], Role.FAKING, silent)]), B)
    rep = run_findmap(sc)
    assert rep.verdict.statuses[4] is Status.ABSENT
    assert rep.metrics == {"tp": 0, "fp": 0, "tn": 4, "fn": 0}
