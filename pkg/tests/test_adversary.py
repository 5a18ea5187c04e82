import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from findmap.adversary import (
    WORST_CASE,
    AccusationPolicy,
    PolicyKind,
    Role,
    faker_accusations,
    mirror_construction,
    naive_fake,
    naive_reflection,
    rss_blind_circle,
    rss_fake_from_three,
    rss_fake_from_two,
    tof_fake,
    tof_fake_from_three,
)
from findmap.errors import DegenerateConfiguration, InvalidCounts, SamePosition
from findmap.geometry import (
    Point2D,
    circle_through_three,
    collinear,
    conic_through_five,
    distance,
    enlargement_branch,
    six_on_common_conic,
    third_blind_sensor,
)
from findmap.ranging import RadioParams

P = Point2D
coord = st.floats(-500, 500, allow_nan=False)
points = st.builds(Point2D, coord, coord)


def test_naive_fake_blind_set():
    plan = naive_fake(P(0, 0), P(0, 2), [P(5, 1), P(0, 5)])
    assert P(5, 1) in plan.predicted_blind
    assert P(0, 5) not in plan.predicted_blind
    with pytest.raises(SamePosition):
        naive_fake(P(1, 1), P(1, 1))


@settings(max_examples=200)
@given(points, points, st.lists(points, min_size=3, max_size=3))
def test_fact_one_for_naive_fakes(faker, claimed, triple):
    # at least one sensor of a non-collinear triple sees the lie
    assume(distance(faker, claimed) > 1.0)
    a, b, c = triple
    assume(abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)) > 10.0)
    plan = naive_fake(faker, claimed, triple)
    assert len(plan.predicted_blind) <= 2


def test_naive_reflection_fools_both_anchors():
    plan = naive_reflection(P(3, 4), P(0, 0), P(10, 0), [P(0, 0), P(10, 0), P(5, 5)])
    assert plan.claimed == P(3, -4)
    assert plan.predicted_blind == frozenset({P(0, 0), P(10, 0)})


def test_rss_fake_from_two_example():
    f, p1, p2 = P(0, 0), P(-2, 1), P(2, 1)
    plan = rss_fake_from_two(f, p1, p2, 2.0, [p1, p2])
    assert distance(p1, plan.claimed) == pytest.approx(2 * distance(p1, f), abs=1e-9)
    assert distance(p2, plan.claimed) == pytest.approx(2 * distance(p2, f), abs=1e-9)
    assert plan.predicted_blind == frozenset({p1, p2})
    q = third_blind_sensor(f, plan.claimed, 2.0)
    plan3 = rss_fake_from_two(f, p1, p2, 2.0, [p1, p2, q])
    assert q in plan3.predicted_blind
    loc = rss_blind_circle(plan3)
    assert loc.contains(p1) and loc.contains(p2)


def test_rss_fourth_sensor_off_circle_is_not_blind():
    f, p1, p2 = P(0, 0), P(-2, 1), P(2, 1)
    plan = rss_fake_from_two(f, p1, p2, 2.0)
    loc = rss_blind_circle(plan)
    off = P(loc.circle.center.x + 1.3 * loc.circle.radius, loc.circle.center.y)
    plan = rss_fake_from_two(f, p1, p2, 2.0, [p1, p2, off])
    assert off not in plan.predicted_blind


@settings(max_examples=100)
@given(points, points, points, points)
def test_rss_fake_from_three_fools_all_three(f, p1, p2, p3):
    area = abs((p2.x - p1.x) * (p3.y - p1.y) - (p2.y - p1.y) * (p3.x - p1.x))
    assume(area > 1e3)
    circ_pts = [p1, p2, p3]
    c = circle_through_three(*circ_pts)
    r = distance(f, c.center)
    assume(0.05 * c.radius < r and abs(r - c.radius) > 0.05 * c.radius)
    plan = rss_fake_from_three(f, p1, p2, p3, circ_pts)
    lam = plan.corruption.ratio(RadioParams())
    for p in circ_pts:
        assert distance(p, plan.claimed) == pytest.approx(lam * distance(p, f), rel=1e-7)


def test_tof_examples():
    plan = tof_fake(P(0, 0), 1.0, P(0, 2), [P(0, 0.5), P(3, 3)])
    assert plan.predicted_blind == frozenset({P(0, 0.5)})
    assert not plan.degenerate
    close = tof_fake(P(0, 0), 2.0, P(0, 1), [P(5, 5), P(-1, 0), P(0, -3)])
    assert close.degenerate
    assert len(close.predicted_blind) <= 1


def test_tof_six_on_branch_all_blind():
    f, ff, b = P(10, 20), P(40, -10), 15.0
    on = enlargement_branch(f, ff, b, [-2, -1.2, -0.4, 0.3, 1.1, 1.9])
    off = P(100, 100)
    plan = tof_fake(f, b, ff, on + [off])
    assert plan.predicted_blind == frozenset(on)
    assert six_on_common_conic(on)
    assert conic_through_five(on[:5]).kind() == "hyperbola"


@settings(max_examples=100)
@given(points, points, points, points)
def test_tof_fake_from_three_fools_anchors(f, p1, p2, p3):
    area = abs((p2.x - p1.x) * (p3.y - p1.y) - (p2.y - p1.y) * (p3.x - p1.x))
    assume(area > 1e3 and min(distance(f, p) for p in (p1, p2, p3)) > 1.0)
    try:
        plan = tof_fake_from_three(f, p1, p2, p3, [p1, p2, p3])
    except DegenerateConfiguration:
        assume(False)
    b = plan.corruption.b
    for p in (p1, p2, p3):
        assert distance(p, plan.claimed) - distance(p, f) == pytest.approx(b, abs=1e-6 * max(1, abs(b)))
    assert plan.predicted_blind == frozenset({p1, p2, p3})


def test_mirror_construction_shapes():
    mc = mirror_construction(6, 2, seed=1)
    assert mc.k == 2 and len(mc.faking_set) == 2 and mc.silent_faker is None
    for v in mc.on_axis:
        assert (mc.reflect(v).x, mc.reflect(v).y) == pytest.approx((v.x, v.y))
    for g, gv in zip(mc.faking_set, mc.virtual_set):
        r = mc.reflect(g)
        assert (r.x, r.y) == (gv.x, gv.y)
    mc7 = mirror_construction(7, 3, seed=1)
    assert mc7.silent_faker is not None
    everything = list(mc7.on_axis) + list(mc7.correct_set) + list(mc7.faking_set) + list(mc7.virtual_set)
    everything.append(mc7.silent_faker)
    for a, b, c in combinations(everything, 3):
        assert not collinear(a, b, c)


def test_mirror_construction_rejects_counts():
    with pytest.raises(InvalidCounts):
        mirror_construction(6, 1)
    with pytest.raises(InvalidCounts):
        mirror_construction(3, 1)


def test_accusation_policies():
    roles = [Role.CORRECT, Role.FAKING, Role.CORRECT, Role.FAKING, Role.CORRECT]
    arr = faker_accusations(WORST_CASE, 1, roles)
    assert arr.tolist() == [True, False, True, False, True]
    assert arr.sum() == 3
    none = faker_accusations(AccusationPolicy(PolicyKind.ACCUSE_NONE), 1, roles)
    assert not none.any()
    copied = (True, True, False, True, False)
    mimic = faker_accusations(AccusationPolicy(PolicyKind.MIMIC, copied), 3, roles)
    assert mimic.tolist() == [True, True, False, False, False]
    with pytest.raises(ValueError):
        AccusationPolicy(PolicyKind.MIMIC)


def test_anchor_choice_is_the_farther_intersection():
    f, p1, p2 = P(0, 0), P(-2, 1), P(2, 1)
    plan = rss_fake_from_two(f, p1, p2, 2.0)
    # the two solutions are reflections across line p1p2 (y = 1)
    other = P(plan.claimed.x, 2 - plan.claimed.y)
    assert distance(plan.claimed, f) >= distance(other, f)
    assert math.isclose(distance(p1, other), 2 * distance(p1, f), rel_tol=1e-9)
    assert not np.isclose(plan.claimed.y, other.y)
