"""``findmap`` command line."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Optional, Sequence

from ..errors import FindMapError, InvalidParams
from ..geometry import DEFAULT_TOL, Point2D, Tolerances
from ..harness import DEFAULT_REGION, Scenario, SweepSpec, generate_scenario, mirror_executions, run_sweep, sweep_csv
from ..adversary import mirror_construction
from ..harness import transcripts_match
from ..protocol import ProtocolModel, run_findmap
from ..ranging import RadioParams, Technique, TimeShift
from .placement import Placement, check_placement, grid_refutation
from .svg import emit_locus_svg

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _pair(text: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None
    return x, y


def _region(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) != 4 or vals[2] <= vals[0] or vals[3] <= vals[1]:
        raise argparse.ArgumentTypeError("region must be x0,y0,x1,y1 with x1>x0 and y1>y0")
    return vals


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _tol(eps: Optional[float]) -> Tolerances:
    if eps is None:
        return DEFAULT_TOL
    if not eps > 0:
        raise InvalidParams("--eps must be positive")
    return Tolerances(eps, eps, eps)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="findmap", description="FindMap secure positioning simulator")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a random scenario")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--f", type=int, required=True)
    g.add_argument("--model", choices=[m.value for m in ProtocolModel], default="basic")
    g.add_argument("--technique", choices=[t.value for t in Technique])
    g.add_argument("--attack", choices=["anchored", "random", "none"], default="anchored")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--region", type=_region, default=DEFAULT_REGION)
    g.add_argument("--eps", type=float)
    g.add_argument("--allow-excess", action="store_true", help="permit f beyond the tolerable bound")
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="run FindMap on a scenario file")
    r.add_argument("scenario")
    r.add_argument("--out", required=True)
    r.add_argument("--transcript", action="store_true")

    s = sub.add_parser("sweep", help="Monte Carlo sweep over (n, f)")
    s.add_argument("spec", nargs="?", help="sweep JSON; flags override its fields")
    s.add_argument("--model", choices=[m.value for m in ProtocolModel])
    s.add_argument("--n", type=_int_list, help="e.g. 8..12 or 6,8,10")
    s.add_argument("--f", help="comma list of ints or max, max+1, max-1 ...")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--attack", choices=["anchored", "random", "none"])
    s.add_argument("--region", type=_region)
    s.add_argument("--mirror", action="store_true")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", required=True)

    c = sub.add_parser("check-placement", help="validate trusted station placement")
    c.add_argument("stations", help="CSV of x,y rows, header optional")
    c.add_argument("--model", choices=["rss", "tof"], required=True)
    c.add_argument("--eps", type=float)
    c.add_argument("--grid-search", action="store_true", help="also run the bounded grid refutation")
    c.add_argument("--grid", type=int, default=200)
    c.add_argument("--out")

    lo = sub.add_parser("locus", help="draw an attack locus as SVG")
    lsub = lo.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    a = lsub.add_parser("apollonius")
    a.add_argument("--p1", type=_pair, required=True)
    a.add_argument("--p2", type=_pair, required=True)
    a.add_argument("--delta", type=float, required=True)
    h = lsub.add_parser("hyperbola")
    h.add_argument("--f", dest="focus", type=_pair, required=True, help="true position")
    h.add_argument("--f-fake", type=_pair, required=True, help="claimed position")
    bias = h.add_mutually_exclusive_group(required=True)
    bias.add_argument("--b", type=float, help="additive distance bias")
    bias.add_argument("--t-offset", type=float, help="raw timing offset in seconds")
    h.add_argument("--technique", choices=["stof", "dat"], default="stof", help="how to read --t-offset")
    for q in (a, h):
        q.add_argument("--sensor", type=_pair, action="append", default=[])
        q.add_argument("--out", required=True)

    m = sub.add_parser("mirror", help="build both executions of the reflection construction")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--f", type=int)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", required=True, help="output directory")
    return p


def _cmd_gen(ns) -> int:
    scen = generate_scenario(ns.n, ns.f, ns.model, region=ns.region, seed=ns.seed,
                             technique=Technique(ns.technique) if ns.technique else None,
                             attack=ns.attack, tolerances=_tol(ns.eps), allow_excess=ns.allow_excess)
    _write(ns.out, scen.to_json())
    print(f"wrote {ns.out}: n={scen.n} f={scen.f} model={scen.model.value} fakers={scen.faker_indices()}")
    return EXIT_OK


def _load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return Scenario.from_json(fh.read())


def _cmd_run(ns) -> int:
    scen = _load_scenario(ns.scenario)
    rep = run_findmap(scen, transcript=ns.transcript)
    _write(ns.out, rep.to_json())
    m = rep.metrics
    print(f"threshold={rep.threshold} declared faking={rep.verdict.faking()} "
          f"tp={m['tp']} fp={m['fp']} tn={m['tn']} fn={m['fn']} exact={rep.exact}")
    if rep.collisions:
        print(f"warning: coinciding claims {rep.collisions}")
    return EXIT_OK


def _cmd_sweep(ns) -> int:
    raw = {}
    if ns.spec:
        with open(ns.spec, encoding="utf-8") as fh:
            raw = json.load(fh)
    for key in ("model", "n", "trials", "seed", "attack", "region"):
        val = getattr(ns, key)
        if val is not None:
            raw[key] = val
    if ns.f is not None:
        raw["f"] = [int(x) if x.lstrip("-").isdigit() else x for x in ns.f.split(",")]
    if ns.mirror:
        raw["mirror"] = True
    spec = SweepSpec.from_dict(raw)
    rows = run_sweep(spec, workers=ns.workers)
    _write(ns.out, sweep_csv(rows))
    exact = sum(1 for r in rows if r.exact_rate == 1.0)
    print(f"wrote {ns.out}: {len(rows)} cells, {exact} with exact detection in every trial")
    return EXIT_OK


def read_stations(path: str) -> list[Point2D]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or not "".join(row).strip():
                continue
            try:
                x, y = (float(v) for v in row[:2])
            except ValueError:
                if lineno == 1 and not out:
                    continue  # header
                raise InvalidParams(f"{path}:{lineno}: expected x,y") from None
            out.append(Point2D(x, y))
    return out


def _cmd_check(ns) -> int:
    tol = _tol(ns.eps)
    stations = read_stations(ns.stations)
    res = check_placement(stations, ns.model, tol)
    print(f"verdict: {res.verdict.value.upper()}")
    if res.certificate is not None:
        print(f"certificate: stations {list(res.certificate)}")
    if res.witness is not None:
        w = res.witness
        param = "lambda" if ns.model == "rss" else "b"
        print(f"witness: true=({w.faker.x:.6g}, {w.faker.y:.6g}) claimed=({w.claimed.x:.6g}, {w.claimed.y:.6g}) "
              f"{param}={w.parameter:.6g} blind={list(w.blind)} accusers={w.simulated_accusers}")
    doc = res.to_dict()
    if ns.grid_search:
        extra = None
        if res.witness is not None:
            extra = (res.witness.claimed, res.witness.parameter)
        g = grid_refutation(stations, ns.model, grid=ns.grid, tol=tol, extra=extra)
        print(f"grid search: {g.blind} of {g.candidates} candidate attacks unnoticed")
        doc["grid_search"] = {"candidates": g.candidates, "blind": g.blind, "worst_margin": g.worst_margin}
    if ns.out:
        _write(ns.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if res.verdict is Placement.INCONCLUSIVE:
        print("no sufficient subset and no attack constructed")
    return EXIT_OK


def _cmd_locus(ns) -> int:
    sensors = [list(s) for s in ns.sensor]
    if ns.kind == "apollonius":
        params = {"p1": ns.p1, "p2": ns.p2, "delta": ns.delta, "sensors": sensors}
    else:
        b = ns.b
        if b is None:
            conv = TimeShift.from_stof_offset if ns.technique == "stof" else TimeShift.from_dat_offset
            b = conv(ns.t_offset, RadioParams()).b
        params = {"f": ns.focus, "f_fake": ns.f_fake, "b": b, "sensors": sensors}
    emit_locus_svg(ns.kind, params, ns.out)
    print(f"wrote {ns.out}")
    return EXIT_OK


def _cmd_mirror(ns) -> int:
    f = ns.f if ns.f is not None else -(-ns.n // 2) - 1
    mc = mirror_construction(ns.n, f, seed=ns.seed)
    one, two = mirror_executions(mc, seed=ns.seed)
    os.makedirs(ns.out, exist_ok=True)
    reports = []
    for tag, scen in (("execution1", one), ("execution2", two)):
        rep = run_findmap(scen, transcript=True)
        reports.append(rep)
        _write(os.path.join(ns.out, f"{tag}_scenario.json"), scen.to_json())
        _write(os.path.join(ns.out, f"{tag}_report.json"), rep.to_json())
    same = transcripts_match(reports[0], reports[1], observers=(0, 1))
    print(f"n={ns.n} f={f}: observer transcripts {'match' if same else 'DIFFER'}")
    for tag, rep in zip(("execution1", "execution2"), reports):
        print(f"{tag}: declared faking={rep.verdict.faking()} fp={rep.metrics['fp']} fn={rep.metrics['fn']}")
    return EXIT_OK


_COMMANDS = {"gen": _cmd_gen, "run": _cmd_run, "sweep": _cmd_sweep, "check-placement": _cmd_check,
             "locus": _cmd_locus, "mirror": _cmd_mirror}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[ns.command](ns)
    except (FindMapError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main_entry() -> None:
    sys.exit(main())
