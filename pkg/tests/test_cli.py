import json
import math
import xml.etree.ElementTree as ET

import pytest

from findmap.cli import main
from findmap.cli.svg import emit_locus_svg, viewport_from_svg
from findmap.errors import InvalidParams
from findmap.geometry import Point2D

SVG = "{http://www.w3.org/2000/svg}"


def _run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_then_run_matches_roles(tmp_path, capsys):
    s, r = tmp_path / "s.json", tmp_path / "r.json"
    assert _run(["gen", "--n", 10, "--f", 3, "--model", "basic", "--seed", 7, "--out", s], capsys)[0] == 0
    assert _run(["run", s, "--out", r], capsys)[0] == 0
    roles = [x["role"] for x in json.loads(s.read_text())["sensors"]]
    assert json.loads(r.read_text())["verdicts"] == roles


def test_run_missing_file(tmp_path, capsys):
    code, _, err = _run(["run", tmp_path / "missing.json", "--out", tmp_path / "r.json"], capsys)
    assert code == 2 and "error" in err


def test_usage_error_prints_synopsis(capsys):
    code, _, err = _run(["frobnicate"], capsys)
    assert code == 2 and "usage:" in err


def test_invalid_scenario_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"model": "basic"}')
    assert _run(["run", bad, "--out", tmp_path / "r.json"], capsys)[0] == 2


def test_gen_rejects_excess_fakers(tmp_path, capsys):
    assert _run(["gen", "--n", 10, "--f", 4, "--out", tmp_path / "s.json"], capsys)[0] == 2


def test_check_placement_concyclic(tmp_path, capsys):
    csv = tmp_path / "st.csv"
    csv.write_text("x,y\n1,0\n0,1\n-1,0\n0,-1\n")
    code, out, _ = _run(["check-placement", csv, "--model", "rss"], capsys)
    assert code == 0 and "UNSAFE" in out


def test_check_placement_headerless_and_bad_rows(tmp_path, capsys):
    csv = tmp_path / "st.csv"
    csv.write_text("0,0\n1,0\n0,1\n1.2,1.1\n")
    code, out, _ = _run(["check-placement", csv, "--model", "rss", "--out", tmp_path / "p.json"], capsys)
    assert code == 0 and "SAFE" in out
    assert json.loads((tmp_path / "p.json").read_text())["verdict"] == "safe"
    csv.write_text("0,0\n1,oops\n")
    assert _run(["check-placement", csv, "--model", "rss"], capsys)[0] == 2
    csv.write_text("0,0\n1,0\n2,3\n")
    assert _run(["check-placement", csv, "--model", "rss"], capsys)[0] == 2


def test_apollonius_svg_circle_position():
    text = emit_locus_svg("apollonius", {"p1": (0, 0), "p2": (3, 0), "delta": 2})
    root = ET.fromstring(text)
    assert root.get("width") == "800" and root.get("height") == "800"
    vp = viewport_from_svg(text)
    (c,) = [e for e in root.iter(SVG + "circle") if e.get("class") == "locus"]
    centre = vp.to_world(float(c.get("cx")), float(c.get("cy")))
    assert (centre.x, centre.y) == pytest.approx((4, 0), abs=1e-2)
    assert float(c.get("r")) / vp.scale == pytest.approx(2, abs=1e-2)
    assert any(t.text and "ratio" in t.text for t in root.iter(SVG + "text"))


def test_bisector_svg_is_a_line():
    root = ET.fromstring(emit_locus_svg("apollonius", {"p1": (0, 0), "p2": (2, 0), "delta": 1}))
    assert len([e for e in root.iter(SVG + "line") if e.get("class") == "locus"]) == 1
    assert not [e for e in root.iter(SVG + "circle") if e.get("class") == "locus"]


def test_hyperbola_svg_traces_both_arms():
    text = emit_locus_svg("hyperbola", {"f": (0, 0), "f_fake": (0, 2), "b": 1})
    vp = viewport_from_svg(text)
    (poly,) = ET.fromstring(text).iter(SVG + "polyline")
    pts = [tuple(map(float, pair.split(","))) for pair in poly.get("points").split()]
    assert len(pts) > 100
    assert all(0 <= x <= 800 and 0 <= y <= 800 for x, y in pts)
    world = [vp.to_world(x, y) for x, y in pts]
    assert min(p.x for p in world) < -1 and max(p.x for p in world) > 1
    # screen coordinates are rounded to 1e-3 px
    tol = 2e-3 / vp.scale * 2
    for p in world:
        assert abs(math.dist((p.x, p.y), (0, 2)) - math.dist((p.x, p.y), (0, 0)) - 1) < tol


def test_y_axis_is_flipped():
    text = emit_locus_svg("apollonius", {"p1": (0, 0), "p2": (0, 3), "delta": 2})
    vp = viewport_from_svg(text)
    lo, hi = vp.to_screen(Point2D(0, 0)), vp.to_screen(Point2D(0, 3))
    assert hi[1] < lo[1]


def test_svg_invalid_params():
    with pytest.raises(InvalidParams):
        emit_locus_svg("hyperbola", {"f": (0, 0), "f_fake": (0, 1), "b": 2})
    with pytest.raises(InvalidParams):
        emit_locus_svg("apollonius", {"p1": (0, 0), "p2": (0, 0), "delta": 2})
    with pytest.raises(InvalidParams):
        emit_locus_svg("parabola", {})


def test_locus_command_and_raw_offset(tmp_path, capsys):
    out = tmp_path / "h.svg"
    assert _run(["locus", "hyperbola", "--f", "0,0", "--f-fake", "0,600", "--t-offset", "1e-6",
                 "--sensor", "100,100", "--out", out], capsys)[0] == 0
    assert "b = 300" in out.read_text()
    assert _run(["locus", "hyperbola", "--f", "0,0", "--f-fake", "0,1", "--b", "3", "--out", out], capsys)[0] == 2


def test_mirror_command(tmp_path, capsys):
    code, out, _ = _run(["mirror", "--n", 7, "--out", tmp_path / "m"], capsys)
    assert code == 0 and "match" in out and "DIFFER" not in out
    names = sorted(p.name for p in (tmp_path / "m").iterdir())
    assert names == ["execution1_report.json", "execution1_scenario.json",
                     "execution2_report.json", "execution2_scenario.json"]


def test_sweep_command(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"model": "basic", "n": "6..7", "f": ["max"], "trials": 5}))
    out = tmp_path / "sw.csv"
    assert _run(["sweep", spec, "--seed", 3, "--out", out], capsys)[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,f,model,trials,exact_rate,mean_accusers"
    assert lines[1:] == ["6,1,basic,5,1.000000,3.000000", "7,2,basic,5,1.000000,3.000000"]


def _all_commands(d):
    st = d / "st.csv"
    st.write_text("1,0\n0,1\n-1,0\n0,-1\n")
    return [
        ["gen", "--n", 9, "--f", 2, "--model", "rss", "--seed", 5, "--out", d / "s.json"],
        ["run", d / "s.json", "--transcript", "--out", d / "r.json"],
        ["sweep", "--model", "tof", "--n", "9,10", "--trials", 4, "--out", d / "sw.csv"],
        ["check-placement", st, "--model", "rss", "--out", d / "p.json"],
        ["locus", "apollonius", "--p1", "0,0", "--p2", "3,0", "--delta", 2, "--out", d / "a.svg"],
        ["locus", "hyperbola", "--f", "0,0", "--f-fake", "0,2", "--b", 1, "--out", d / "h.svg"],
        ["mirror", "--n", 8, "--out", d / "mir"],
    ]


def _snapshot(d):
    return {str(p.relative_to(d)): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def test_every_command_is_byte_deterministic(tmp_path, capsys):
    first = tmp_path
    for argv in _all_commands(first):
        assert _run(argv, capsys)[0] == 0
    snap1 = _snapshot(first)
    for argv in _all_commands(first):
        assert _run(argv, capsys)[0] == 0
    assert _snapshot(first) == snap1
