import math
from itertools import combinations

import numpy as np
import pytest

from findmap.cli.placement import Placement, PlacementResult, check_placement, grid_refutation
from findmap.errors import TooFewStations
from findmap.geometry import Point2D, collinear, concyclic_four, enlargement_branch, on_enlargement_locus

P = Point2D


def _unit_circle(angles):
    return [P(math.cos(a), math.sin(a)) for a in angles]


def test_concyclic_rss_is_unsafe_with_verified_witness():
    st = _unit_circle([0.3, 1.5, 2.9, 4.4])
    res = check_placement(st, "rss")
    assert res.verdict is Placement.UNSAFE
    w = res.witness
    assert w.blind == (0, 1, 2, 3) and w.simulated_accusers == 0
    for p in st:
        assert math.dist((p.x, p.y), (w.claimed.x, w.claimed.y)) == pytest.approx(
            w.parameter * math.dist((p.x, p.y), (w.faker.x, w.faker.y)), abs=1e-9)


def _brute_safe_rss(st):
    # independent enumeration of the sufficient condition
    for quad in combinations(st, 4):
        if any(collinear(*t) for t in combinations(quad, 3)):
            continue
        if not concyclic_four(*quad):
            return True
    return False


def test_five_station_example_is_safe():
    st = [P(0, 0), P(1, 0), P(0, 1), P(1, 1), P(0.3, 0.7)]
    assert _brute_safe_rss(st)
    res = check_placement(st, "rss")
    assert res.verdict is Placement.SAFE
    quad = [st[i] for i in res.certificate]
    assert not concyclic_four(*quad)


def test_non_concyclic_rss_grid_finds_nothing():
    st = [P(0, 0), P(1, 0), P(0, 1), P(1.2, 1.1)]
    assert check_placement(st, "rss").verdict is Placement.SAFE
    g = grid_refutation(st, "rss", grid=60, n_params=12)
    assert g.blind == 0 and g.candidates == 60 * 60 * 12


def test_collinear_rss_stations_are_unsafe():
    st = [P(0, 0), P(1, 0), P(2, 0), P(3, 0)]
    res = check_placement(st, "rss")
    assert res.verdict is Placement.UNSAFE and res.witness.simulated_accusers == 0


def test_tof_on_hyperbola_is_unsafe():
    st = enlargement_branch(P(0, 0), P(0, 2), 1.0, [-1.5, -0.9, -0.3, 0.4, 1.0, 1.7])
    res = check_placement(st, "tof")
    assert res.verdict is Placement.UNSAFE
    w = res.witness
    assert w.simulated_accusers == 0 and w.blind == tuple(range(6))
    for p in st:
        assert on_enlargement_locus(p, w.faker, w.claimed, w.parameter)


def test_tof_generic_is_safe_and_grid_agrees():
    st = [P(*xy) for xy in np.random.default_rng(1).uniform(0, 10, (6, 2))]
    res = check_placement(st, "tof")
    assert res.verdict is Placement.SAFE
    assert grid_refutation(st, "tof", grid=60, n_params=12).blind == 0


def test_too_few_stations():
    with pytest.raises(TooFewStations):
        check_placement(_unit_circle([0, 1, 2]), "rss")
    with pytest.raises(TooFewStations):
        check_placement(_unit_circle([0, 1, 2, 3, 4]), "tof")


def test_result_invariant():
    with pytest.raises(ValueError):
        PlacementResult(Placement.UNSAFE)
