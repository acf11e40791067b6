"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical degeneracy, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .calibration import CalibrationError, calibrate_files, dump_result, load_result
from .equilibrium import DEFAULT_QUANTILES, DegenerateScheduleError, solve_equilibrium
from .fixtures import shipped_fixture_paths
from .model import CALIBRATION, NetworkParams, ParameterError, homophily_sensitivity
from .parity import PARITY_PARAMS, parity_sweep, solve_parity
from .simulation import POPULATIONS, SimConfig, SimConfigError, simulate
from .welfare import WELFARE_PARAMS, welfare_report, welfare_sweep

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
OUTPUT_DIR_ENV = "REFNET_OUTPUT_DIR"
PARAM_NAMES = ("delta", "alpha", "tau_maj", "tau_min", "psi_maj", "psi_min")
FIGURE_BASE = NetworkParams.uniform(0.8, 0.8)

GRID_BOUNDS = {
    "delta": (0.51, 0.99),
    "alpha": (0.51, 1.0),
    "tau_maj": (0.05, 1.0),
    "tau_min": (0.05, 1.0),
    "psi_maj": (0.5, 0.99),
    "psi_min": (0.5, 0.99),
}

# keys a --config file may carry besides the six parameters
COMMAND_KEYS = {
    "equilibrium": {"schedule_points"},
    "parity": set(),
    "welfare-gap": set(),
    "simulate": {"n_firms", "replications", "seed", "population", "workers"},
}


class UsageError(ValueError):
    pass


def fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "nan" if math.isnan(x) else format(float(x), ".17g")
    return str(x)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o).__name__)


def _clean(o):
    # JSON has no NaN; emit null
    if isinstance(o, float) and math.isnan(o):
        return None
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def emit(data: dict, fmt_name: str, out=None, percent: Sequence[str] = ()) -> None:
    out = out or sys.stdout
    if fmt_name == "json":
        json.dump(_clean(data), out, indent=2, default=_json_default)
        out.write("\n")
        return
    flat = _flatten(data)
    if fmt_name == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in flat:
            w.writerow([k, fmt(v)])
        return
    width = max((len(k) for k, _ in flat), default=0)
    for k, v in flat:
        if k in percent and isinstance(v, float):
            shown = f"{100 * v:.2f}%"
        elif isinstance(v, float):
            shown = f"{v:.6g}"
        else:
            shown = fmt(v) or "-"
        out.write(f"{k.ljust(width)}  {shown}\n")


def _flatten(data: dict, prefix: str = "") -> list[tuple[str, Any]]:
    rows = []
    for k, v in data.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            rows.extend(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)) and v and isinstance(v[0], (list, tuple)):
            continue
        else:
            rows.append((key, v))
    return rows


def load_config(path: str | None, command: str) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a JSON object")
    allowed = set(PARAM_NAMES) | COMMAND_KEYS.get(command, set())
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise UsageError(f"{path}: unknown key(s) {', '.join(unknown)}")
    return data


def resolve_params(args, config: dict, default: NetworkParams = CALIBRATION) -> NetworkParams:
    values = default.as_dict()
    values.update({k: config[k] for k in PARAM_NAMES if k in config})
    for k in PARAM_NAMES:
        v = getattr(args, k, None)
        if v is not None:
            values[k] = v
    return NetworkParams(**values)


def _setting(args, config: dict, name: str, default):
    v = getattr(args, name, None)
    if v is not None:
        return v
    return config.get(name, default)


def cmd_equilibrium(args, config) -> int:
    params = resolve_params(args, config)
    n = int(_setting(args, config, "schedule_points", DEFAULT_QUANTILES))
    eq = solve_equilibrium(params, n_quantiles=n)
    data = {"params": params.as_dict(), **eq.summary()}
    if args.format == "json":
        data["schedule"] = eq.schedule
    emit(data, args.format)
    return EXIT_OK


def cmd_parity(args, config) -> int:
    params = resolve_params(args, config)
    sol = solve_parity(params)
    data = {"params": params.as_dict()}
    for name, val in (("tau_min_eq", sol.tau_min_eq), ("psi_min_eq", sol.psi_min_eq)):
        data[name] = {"value": val.value, "feasible": val.feasible, "residual": val.residual}
    emit(data, args.format)
    return EXIT_OK


def cmd_welfare_gap(args, config) -> int:
    if args.calibration:
        result = load_result(args.calibration)
        params = result.to_params(alpha=args.alpha)
        base = {"delta", "tau_maj", "tau_min", "psi_maj", "psi_min"}
        overrides = {k: getattr(args, k) for k in base if getattr(args, k) is not None}
        if overrides:
            params = params.replace(**overrides)
    else:
        params = resolve_params(args, config)
    rep = welfare_report(params)
    emit({"params": params.as_dict(), **rep.as_dict()}, args.format, percent=("gap",))
    return EXIT_OK


def cmd_calibrate(args, config) -> int:
    if args.synthetic:
        rp, ep = shipped_fixture_paths()
    else:
        if not (args.respondents and args.edges):
            raise UsageError("calibrate needs --respondents and --edges, or --synthetic")
        rp, ep = Path(args.respondents), Path(args.edges)
    result = calibrate_files(rp, ep, alpha=args.alpha if args.alpha is not None else 1.0)
    if args.output:
        dump_result(result, args.output)
    data = result.to_json_dict()
    if args.format != "json":
        data["out_of_model"] = ",".join(result.out_of_model)
    emit(data, args.format)
    return EXIT_OK


def cmd_simulate(args, config) -> int:
    params = resolve_params(args, config)
    cfg = SimConfig(
        params,
        n_firms=int(_setting(args, config, "n_firms", 10_000)),
        replications=int(_setting(args, config, "replications", 20)),
        seed=int(_setting(args, config, "seed", 0)),
        population=_setting(args, config, "population", "equal"),
        workers=int(_setting(args, config, "workers", 1)),
    )
    rep = simulate(cfg)
    emit({"params": params.as_dict(), **rep.to_json_dict()}, args.format, percent=("gap_hat",))
    return EXIT_OK


def _write_panel(path: Path, header: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    buf = io.StringIO()
    buf.write(f"# {header}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _grid(name: str, points: int) -> np.ndarray:
    lo, hi = GRID_BOUNDS[name]
    return np.linspace(lo, hi, points)


def _provenance(figure: int, varying: str, fixed: NetworkParams | None = None, extra: str = "") -> str:
    parts = [f"refnet {__version__}", f"figure={figure}", f"varying={varying}"]
    if fixed is not None:
        parts.append("fixed=" + ";".join(f"{k}={v!r}" for k, v in fixed.as_dict().items() if k != varying))
    if extra:
        parts.append(extra)
    return " ".join(parts)


def cmd_sweep(args, config) -> int:
    out_dir = Path(args.out_dir or os.environ.get(OUTPUT_DIR_ENV) or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    base = resolve_params(args, config, default=FIGURE_BASE)
    written = []
    if args.figure == 2:
        for name in PARITY_PARAMS:
            rows = parity_sweep(name, _grid(name, args.points), base)
            cols = [name] + [c for c in ("tau_min_eq", "psi_min_eq") if c in rows[0]]
            path = out_dir / f"fig2_{name}.csv"
            _write_panel(path, _provenance(2, name, base), cols, ([r["value"]] + [r[c] for c in cols[1:]] for r in rows))
            written.append(path)
    elif args.figure == 3:
        for name in WELFARE_PARAMS:
            rows = welfare_sweep(name, _grid(name, args.points), base)
            path = out_dir / f"fig3_{name}.csv"
            _write_panel(path, _provenance(3, name, base), [name, "gap"], rows)
            written.append(path)
    else:
        psi = np.linspace(0.5, 1.0, args.points + 1)[:-1]
        for w in args.w or [0.8, 0.2]:
            if not 0 < w < 1:
                raise ParameterError("w", w, "(0, 1)")
            path = out_dir / f"fig4_w{w:g}.csv"
            _write_panel(path, _provenance(4, "psi", extra=f"w={w!r}"), ["psi", "phi", "linear"],
                         homophily_sensitivity(w, psi))
            written.append(path)
    for p in written:
        print(p)
    return EXIT_OK


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with parameter values; flags override it")
    for name in PARAM_NAMES:
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)


def build_parser() -> argparse.ArgumentParser:
    formats = ("table", "json", "csv")
    # subcommand copy is suppressed when absent so it cannot clobber a global --format
    fmt_parent = argparse.ArgumentParser(add_help=False)
    fmt_parent.add_argument("--format", choices=formats, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="refnet", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=formats, default="table")
    parser.add_argument("--version", action="version", version=f"refnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibrium", parents=[fmt_parent], help="market wage, profit constant, wage schedule")
    _add_param_flags(p)
    p.add_argument("--schedule-points", dest="schedule_points", type=int)
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("parity", parents=[fmt_parent], help="compensating minority density and bias")
    _add_param_flags(p)
    p.set_defaults(func=cmd_parity)

    p = sub.add_parser("welfare-gap", parents=[fmt_parent], help="expected wages and welfare gap")
    _add_param_flags(p)
    p.add_argument("--calibration", help="CalibrationResult JSON written by `calibrate --output`")
    p.set_defaults(func=cmd_welfare_gap)

    p = sub.add_parser("calibrate", parents=[fmt_parent], help="estimate parameters from ego networks")
    p.add_argument("--respondents")
    p.add_argument("--edges")
    p.add_argument("--synthetic", action="store_true", help="use the bundled synthetic fixture")
    p.add_argument("--alpha", type=float)
    p.add_argument("--output", help="write the CalibrationResult JSON here")
    p.set_defaults(func=cmd_calibrate, config=None)

    p = sub.add_parser("simulate", parents=[fmt_parent], help="Monte Carlo urn-ball market")
    _add_param_flags(p)
    p.add_argument("--n-firms", dest="n_firms", type=int)
    p.add_argument("--replications", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--population", choices=POPULATIONS)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[fmt_parent], help="write figure data series as CSV")
    _add_param_flags(p)
    p.add_argument("--figure", type=int, choices=(2, 3, 4), required=True)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--w", type=float, action="append", help="population share for figure 4 (repeatable)")
    p.add_argument("--out-dir", dest="out_dir", help=f"output directory (default ${OUTPUT_DIR_ENV} or .)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        config = load_config(getattr(args, "config", None), args.command)
        return args.func(args, config)
    except (ParameterError, UsageError, CalibrationError, SimConfigError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (DegenerateScheduleError, ZeroDivisionError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
