"""Command-line front end: ``phstring run | check | sweep``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 audit failure, 1 output failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .audit import audit
from .config import PRESETS, parse_config, preset
from .engine import SimConfig, equivalence_report, run_closed_loop
from .errors import (
    AuditFailure,
    CflViolation,
    ConfigError,
    ConvergenceError,
    IoError,
    KinkMismatch,
    NonFiniteState,
    PatchOffGrid,
)
from .outputs import (
    RunManifest,
    atomic_write,
    render_svg,
    write_fields_csv,
    write_trajectory_csv,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_AUDIT = 4

_INTEGRATORS = {"rk4": "rk4", "midpoint": "implicit_midpoint"}


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="TOML configuration file")
    src.add_argument("--preset", choices=sorted(PRESETS), help="named scenario")
    common.add_argument("--framework", choices=("jb", "sd", "both"))
    common.add_argument("--n", type=int, dest="n_cells", help="number of grid cells")
    common.add_argument("--dt", type=float, help="time step [s]")
    common.add_argument("--t-final", type=float, dest="t_final", help="end time [s]")
    common.add_argument("--integrator", choices=sorted(_INTEGRATORS))

    parser = argparse.ArgumentParser(prog="phstring", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="simulate and write outputs")
    run.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    run.add_argument("--snapshots", type=_floats, help="times for field snapshots, e.g. 0,2.5,10")
    run.add_argument("--svg", action="store_true", help="also write plots.svg")

    sub.add_parser("check", parents=[common], help="run the invariant audit")

    sweep = sub.add_parser("sweep", parents=[common], help="run a one-parameter sweep")
    sweep.add_argument("--param", required=True, help="SimConfig field to vary, e.g. c2")
    sweep.add_argument("--values", type=_floats, required=True, help="comma-separated values")
    sweep.add_argument("--out", type=Path, default=Path("sweep"), help="output directory")
    sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    return parser


def load_config(args) -> SimConfig:
    if args.config is not None:
        cfg = parse_config(args.config)
    else:
        cfg = preset(args.preset or "paper-fig1")
    changes = {}
    for name in ("framework", "n_cells", "dt", "t_final"):
        value = getattr(args, name, None)
        if value is not None:
            changes[name] = value
    if getattr(args, "integrator", None):
        changes["integrator"] = _INTEGRATORS[args.integrator]
    if getattr(args, "snapshots", None):
        changes["snapshots"] = args.snapshots
    return cfg.with_(**changes) if changes else cfg


def cmd_run(args) -> int:
    cfg = load_config(args)
    out: Path = args.out
    primary = "sd" if cfg.framework == "sd" else "jb"
    log = run_closed_loop(cfg, primary)
    files = [write_trajectory_csv(log, out / "trajectory.csv")]
    equivalence = None
    if cfg.framework == "both":
        files.append(write_trajectory_csv(run_closed_loop(cfg, "sd"), out / "trajectory_sd.csv"))
        equivalence = equivalence_report(cfg)
    files += write_fields_csv(log, out)
    if args.svg:
        files.append(render_svg(log, out / "plots.svg"))
    manifest = RunManifest.build(cfg, log, [f.name for f in files], equivalence)
    manifest.write(out / "manifest.json")
    s = manifest.summary
    print(f"wrote {len(files) + 1} files to {out}")
    print(f"w(L, t_final) = {s['final_w_L']:.6g}   H_tilde(t_final) = {s['final_Htilde']:.3e}")
    return EXIT_OK


def cmd_check(args) -> int:
    items = audit(load_config(args))
    for item in items:
        print(item.line())
    failed = [i.name for i in items if not i.passed]
    if failed:
        raise AuditFailure(f"{len(failed)} audit item(s) failed: {', '.join(failed)}")
    print(f"all {len(items)} audit items passed")
    return EXIT_OK


def _sweep_point(cfg: SimConfig) -> dict[str, float]:
    log = run_closed_loop(cfg)
    Ht = log["Htilde"]
    return {
        "final_w_L": float(log["w_L"][-1]),
        "Htilde_ratio": float(Ht[-1] / Ht[0]) if Ht[0] > 0 else 0.0,
        "max_casimir_drift": float(np.max(np.abs(log["casimir"] - log.kappa))),
        "plant_balance": log.balance.plant_step,
    }


def cmd_sweep(args) -> int:
    base = load_config(args)
    if args.param not in base.to_dict() or args.param == "snapshots":
        raise ConfigError(f"cannot sweep {args.param!r}")
    current = getattr(base, args.param)
    cast = int if isinstance(current, int) and not isinstance(current, bool) else float
    configs = [base.with_(**{args.param: cast(v)}) for v in args.values]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, configs))
    else:
        results = [_sweep_point(c) for c in configs]

    header = [args.param, *results[0]]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for v, r in zip(args.values, results):
        writer.writerow([f"{v:.17g}", *(f"{x:.17g}" for x in r.values())])
    atomic_write(args.out / "sweep.csv", buf.getvalue())
    echo = {"base": base.to_dict(), "param": args.param, "values": list(args.values), "files": ["sweep.csv"]}
    atomic_write(args.out / "manifest.json", json.dumps(echo, indent=2, sort_keys=True) + "\n")
    print(buf.getvalue(), end="")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "check": cmd_check, "sweep": cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, CflViolation, KinkMismatch, PatchOffGrid) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonFiniteState, ConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except AuditFailure as exc:
        print(f"audit failed: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    except IoError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
