"""``msl``: run check suites, list them, and write plot data.

Exit codes: 0 all assertions pass, 1 some assertion failed, 2 the scenario
or arguments did not validate, 3 a computation raised.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import GeometryError, UnknownSeries
from ..metric_core import default_grid_points
from .suites import PAPER_MAP, SUITES, Ctx

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_COMPUTE = 0, 1, 2, 3


class ScenarioError(ValueError):
    """Scenario or argument validation failure (exit code 2)."""


def num(v) -> str:
    return format(float(v), ".17g")


@dataclass
class Scenario:
    id: str
    check: str
    params: dict
    tolerance_scale: float = 1.0
    series: list = field(default_factory=list)

    def digest(self) -> str:
        payload = {"check": self.check, "params": {k: _encode(v) for k, v in self.params.items()},
                   "tolerance_scale": num(self.tolerance_scale), "grid_points": default_grid_points(),
                   "version": __version__}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _encode(v):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, int):
        return v
    return num(v)


def _coerce(name, kind, raw):
    if isinstance(raw, bool) or raw is None:
        raise ScenarioError(f"parameter {name!r}: expected {kind.__name__}, got {raw!r}")
    try:
        val = kind(raw) if not isinstance(raw, str) else kind(float(raw)) if kind is int else kind(raw)
    except (TypeError, ValueError):
        raise ScenarioError(f"parameter {name!r}: cannot read {raw!r} as {kind.__name__}") from None
    if kind is int and isinstance(raw, (float, str)) and float(raw) != val:
        raise ScenarioError(f"parameter {name!r}: expected an integer, got {raw!r}")
    if kind is float and not np.isfinite(val):
        raise ScenarioError(f"parameter {name!r} must be finite")
    return val


def validate(check: str, params: dict, tolerance_scale=1.0, sid=None, series=()) -> Scenario:
    """Check a parameter record against the suite's schema; nothing is computed."""
    if check not in SUITES:
        raise ScenarioError(f"unknown check {check!r}; known: {', '.join(SUITES)}")
    suite = SUITES[check]
    unknown = sorted(set(params) - set(suite.params))
    if unknown:
        raise ScenarioError(f"{check}: unknown parameters {unknown}")
    out = {}
    for name, (kind, default, positive) in suite.params.items():
        if name not in params or params[name] is None:
            out[name] = default
            continue
        val = _coerce(name, kind, params[name])
        if positive and not val > 0:
            raise ScenarioError(f"parameter {name!r} must be positive, got {val!r}")
        out[name] = val
    tol = _coerce("tolerance_scale", float, tolerance_scale)
    if not tol > 0:
        raise ScenarioError("tolerance scale must be positive")
    for name in series:
        if name not in suite.series:
            raise UnknownSeries(f"{check} has no series {name!r}; known: {', '.join(suite.series)}")
    return Scenario(sid or check, check, out, tol, list(series))


def load_scenarios(path, tolerance_scale=None) -> list[Scenario]:
    """Read a scenario file: one scenario object or ``{"scenarios": [...]}``."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from None
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise ScenarioError(f"scenario file needs schema_version {SCHEMA_VERSION}")
    items = doc.get("scenarios", [doc])
    out, seen = [], set()
    for item in items:
        if not isinstance(item, dict) or "check" not in item:
            raise ScenarioError("every scenario needs a 'check'")
        sid = str(item.get("id") or item["check"])
        if sid in seen:
            raise ScenarioError(f"duplicate scenario id {sid!r}")
        seen.add(sid)
        scale = item.get("tolerance_scale", 1.0) if tolerance_scale is None else tolerance_scale
        outputs = item.get("outputs", {})
        out.append(validate(item["check"], item.get("params", {}), scale, sid, outputs.get("series", [])))
    return out


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def execute(sc: Scenario) -> dict:
    """Run one scenario; computation errors are embedded, not raised."""
    ctx = Ctx(sc.check, sc.tolerance_scale)
    t0 = time.perf_counter()
    error = None
    try:
        SUITES[sc.check].run(dict(sc.params), ctx)
    except (GeometryError, ValueError, ArithmeticError) as exc:
        error = {"type": type(exc).__name__, "message": str(exc),
                 "where": traceback.extract_tb(exc.__traceback__)[-1].name}
    assertions = [{"name": a.name, "anchor": a.anchor, "measured": num(a.measured), "bound": num(a.bound),
                   "relation": a.relation, "margin": num(a.margin), "passed": a.passed}
                  for a in ctx.results]
    return {
        "schema_version": SCHEMA_VERSION,
        "id": sc.id,
        "suite": sc.check,
        "params": {k: _encode(v) for k, v in sc.params.items()},
        "tolerance_scale": num(sc.tolerance_scale),
        "grid_points": default_grid_points(),
        "version": __version__,
        "input_digest": sc.digest(),
        "assertions": assertions,
        "extras": ctx.extras,
        "error": error,
        "passed": error is None and all(a["passed"] for a in assertions),
        "wall_time": time.perf_counter() - t0,
    }


def run_all(scenarios: list[Scenario], jobs: int = 1) -> list[dict]:
    if jobs > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(execute, scenarios))
    else:
        reports = [execute(sc) for sc in scenarios]
    return sorted(reports, key=lambda r: r["id"])


def exit_code(reports) -> int:
    if any(r["error"] for r in reports):
        return EXIT_COMPUTE
    return EXIT_OK if all(r["passed"] for r in reports) else EXIT_FAIL


def write_report(report: dict, out: Path) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{report['id']}.report.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return path


def emit_series(sc: Scenario, names, out: Path) -> list[Path]:
    suite = SUITES[sc.check]
    paths = []
    for name in names:
        if name not in suite.series:
            raise UnknownSeries(f"{sc.check} has no series {name!r}; known: {', '.join(suite.series)}")
        header, rows = suite.series[name](dict(sc.params))
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{sc.id}.{name}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows([[num(v) for v in row] for row in np.atleast_2d(rows)])
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def _extra_params(extra: list[str]) -> dict:
    params = {}
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--"):
            raise ScenarioError(f"unexpected argument {tok!r}")
        key, _, val = tok[2:].partition("=")
        if not _:
            val = next(it, None)
            if val is None:
                raise ScenarioError(f"--{key} needs a value")
        params[key.replace("-", "_")] = val
    return params


def _series_arg(text):
    return [s for s in (text or "").split(",") if s]


def _print_summary(reports, stream=sys.stdout):
    for r in reports:
        status = "ERROR" if r["error"] else "PASS" if r["passed"] else "FAIL"
        print(f"[{status}] {r['id']} ({r['suite']}) {r['wall_time']:.2f}s", file=stream)
        for a in r["assertions"]:
            mark = "ok  " if a["passed"] else "FAIL"
            print(f"  {mark} {a['name']:<36} {a['measured']:>24} {a['relation']} {a['bound']:<24} "
                  f"[{a['anchor']}]", file=stream)
        if r["error"]:
            print(f"  {r['error']['type']}: {r['error']['message']}", file=stream)


def cmd_run(args, extra) -> int:
    if args.scenario:
        if args.suite or extra:
            raise ScenarioError("--scenario cannot be combined with --suite or parameters")
        scenarios = load_scenarios(args.scenario, args.tolerance_scale)
    elif args.suite:
        scale = 1.0 if args.tolerance_scale is None else args.tolerance_scale
        scenarios = [validate(args.suite, _extra_params(extra), scale, args.id, _series_arg(args.series))]
    else:
        raise ScenarioError("run needs --suite or --scenario")
    if args.jobs < 1:
        raise ScenarioError("--jobs must be at least 1")
    reports = run_all(scenarios, args.jobs)
    out = Path(args.out)
    by_id = {sc.id: sc for sc in scenarios}
    for r in reports:
        write_report(r, out)
        if r["error"] is None:
            emit_series(by_id[r["id"]], by_id[r["id"]].series, out)
    _print_summary(reports)
    return exit_code(reports)


def cmd_list(args, extra) -> int:
    if extra:
        raise ScenarioError(f"unexpected arguments {extra}")
    if args.json:
        doc = {name: {"summary": s.summary, "assertions": s.assertions, "series": sorted(s.series),
                      "params": {k: v[0].__name__ for k, v in s.params.items()}}
               for name, s in SUITES.items()}
        print(json.dumps({"schema_version": PAPER_MAP["schema_version"], "suites": doc}, indent=2))
        return EXIT_OK
    for name, s in SUITES.items():
        print(f"{name}: {s.summary}")
        for a, anchor in s.assertions.items():
            print(f"  {a:<32} {anchor}")
        print(f"  series: {', '.join(s.series)}")
    return EXIT_OK


def cmd_plots(args, extra) -> int:
    names = _series_arg(args.series)
    if args.report:
        try:
            rep = json.loads(Path(args.report).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"cannot read report {args.report}: {exc}") from None
        if extra or args.suite:
            raise ScenarioError("--report cannot be combined with --suite or parameters")
        sc = validate(rep["suite"], rep["params"], rep["tolerance_scale"], rep["id"], names)
    elif args.suite:
        sc = validate(args.suite, _extra_params(extra), 1.0, args.id, names)
    else:
        raise ScenarioError("emit-plots needs --report or --suite")
    for p in emit_series(sc, names, Path(args.out)):
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="msl", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a suite or a scenario file; extra --key value pairs are suite parameters")
    run.add_argument("--suite")
    run.add_argument("--scenario")
    run.add_argument("--id")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--out", default="msl-out")
    run.add_argument("--tolerance-scale", type=float, default=None)
    run.add_argument("--series", default="", help="comma-separated series to write as CSV")
    run.set_defaults(func=cmd_run)

    ls = sub.add_parser("list-suites", help="print suites, assertions and their anchors")
    ls.add_argument("--json", action="store_true")
    ls.set_defaults(func=cmd_list)

    plots = sub.add_parser("emit-plots", help="write CSV series for a report or an inline suite")
    plots.add_argument("--report")
    plots.add_argument("--suite")
    plots.add_argument("--id")
    plots.add_argument("--series", default="")
    plots.add_argument("--out", default="msl-out")
    plots.set_defaults(func=cmd_plots)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args, extra = ap.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, extra)
    except (ScenarioError, UnknownSeries) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (GeometryError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
