"""Command-line entry point: ``photon-bec <command> --config FILE``.

Exit codes: 0 success, 1 validation, 2 solver non-convergence,
3 conservation abort.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

from photon_bec import scenario
from photon_bec.config import load_config, sweepable_keys
from photon_bec.errors import ConservationError, SolverError, ValidationError


def fmt_value(value) -> str:
    """Scalar to text: floats with 17 significant digits, booleans in lower case."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if value is None:
        return ""
    return str(value)


def _json_value(value) -> str:
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        # JSON has no inf/nan literals; carry them as the same strings the CSV uses
        return format(value, ".17g") if math.isfinite(value) else json.dumps(fmt_value(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, dict):
        items = (f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in value.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    return json.dumps(str(value))


def render_json(obj) -> str:
    return _json_value(obj) + "\n"


def render_csv(rows: list[dict]) -> str:
    columns: list = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_value(row.get(c)) for c in columns])
    return buf.getvalue()


def render_text(report: dict) -> str:
    width = max(len(k) for k in report)
    return "".join(f"{k:<{width}}  {fmt_value(v)}\n" for k, v in report.items())


def render_table(rows: list[dict]) -> str:
    columns: list = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    cells = [columns] + [[fmt_value(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(columns))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() + "\n" for line in cells)


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return render_csv([report])
    return render_text(report)


def cmd_derive(cfg, args) -> str:
    return render_report(scenario.derive_report(cfg), args.format)


def cmd_feasibility(cfg, args) -> str:
    return render_report(scenario.feasibility_report(cfg).as_dict(), args.format)


def cmd_equilibrium(cfg, args) -> str:
    return render_report(scenario.equilibrium_report(cfg), args.format)


def cmd_simulate(cfg, args) -> str:
    traj, summary = scenario.simulate(cfg, seed=args.seed, keep_snapshots=args.snapshots)
    rows = [dict(zip(traj.COLUMNS, r)) for r in traj.rows()]
    if args.spectrum:
        spec_rows = [dict(zip(("t", "eps", "f", "f_target"), r)) for r in scenario.spectrum_rows(traj)]
        _write(args.spectrum, render_csv(spec_rows))
    if args.format == "json":
        return render_json({"summary": summary, "trajectory": rows})
    if args.format == "csv":
        return render_csv(rows)
    return render_text(summary) + "\n" + render_table(rows)


def run_sweep(cfg, key, values, jobs=1) -> list[dict]:
    """Evaluate every sweep point; rows come back in sweep order."""
    fn = partial(scenario.sweep_point, cfg, key)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, values))
    return [fn(v) for v in values]


def cmd_sweep(cfg, args) -> str:
    if args.param is None or args.start is None or args.stop is None:
        raise ValidationError("sweep needs --param, --from and --to")
    if args.param not in sweepable_keys():
        raise ValidationError(f"unknown sweep parameter {args.param!r}; sweepable keys: "
                              + ", ".join(sweepable_keys()))
    values = scenario.sweep_values(args.start, args.stop, args.steps, args.log)
    rows = run_sweep(cfg, args.param, values, args.jobs)
    if args.format == "json":
        return render_json(rows)
    if args.format == "csv":
        return render_csv(rows)
    return render_table(rows)


COMMANDS = {
    "derive": cmd_derive,
    "feasibility": cmd_feasibility,
    "equilibrium": cmd_equilibrium,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="run configuration file (key = value)")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    parser = argparse.ArgumentParser(prog="photon-bec", description="Photon condensation feasibility toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("derive", parents=[common], help="derived cavity and interaction scales")
    sub.add_parser("feasibility", parents=[common], help="photon-density window")
    sub.add_parser("equilibrium", parents=[common], help="thermalized state after collisions")
    sim = sub.add_parser("simulate", parents=[common], help="kinetic relaxation on an energy grid")
    sim.add_argument("--seed", type=int, default=None, help="seed for sim.noise on the start state")
    sim.add_argument("--spectrum", help="write the final spectrum (and snapshots) as CSV here")
    sim.add_argument("--snapshots", action="store_true", help="keep a spectrum at every record")
    sweep = sub.add_parser("sweep", parents=[common], help="scan one scalar key")
    sweep.add_argument("--param", help="dotted key, e.g. geometry.finesse")
    sweep.add_argument("--from", dest="start", type=float)
    sweep.add_argument("--to", dest="stop", type=float)
    sweep.add_argument("--steps", type=int, default=10)
    sweep.add_argument("--log", action="store_true", help="geometric spacing")
    sweep.add_argument("--jobs", type=int, default=1)
    return parser


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        text = COMMANDS[args.command](cfg, args)
    except ConservationError as exc:
        print(f"conservation error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.output:
        _write(args.output, text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); not an error of ours
            sys.stderr.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
