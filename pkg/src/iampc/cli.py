"""Command-line front end.

Three commands: ``run`` executes one benchmark under one method and writes a
CSV log plus a metrics file; ``compare`` runs both methods on identical
seeds and prints a side-by-side table; ``list`` prints the built-in
benchmark settings. All argument validation happens before any computation,
with exit code 1 for bad arguments or I/O problems and 2 for a solver or
estimator abort mid-run.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

from .errors import ClosedLoopAbortError
from .harness import (
    _NOISE_AMPLITUDE,
    Metrics,
    RampRef,
    RandomStepRef,
    ScenarioConfig,
    SquareRef,
    default_scenario,
    run_ia_mpc,
    run_sl_mpc,
    write_log_csv,
    write_metrics,
)
from .dynamics import plant_names

_METHODS = ("ia-mpc", "sl-mpc")


@dataclass
class CliInvocation:
    command: str
    plant: str | None = None
    method: str = "ia-mpc"
    noise: bool = False
    seed: int = 0
    out_dir: str = "."
    config_file: str | None = None
    overrides: tuple[str, ...] = ()


def _coerce(text: str):
    t = text.strip()
    low = t.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    if low in ("none", "null"):
        return None
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        pass
    if "," in t:
        return tuple(_coerce(part) for part in t.split(","))
    return t


def _parse_assignment(item: str) -> tuple[str, object]:
    if "=" not in item:
        raise ValueError(f"override '{item}' is not of the form key=value")
    key, _, value = item.partition("=")
    key = key.strip()
    if not key:
        raise ValueError(f"override '{item}' has an empty key")
    return key, _coerce(value)


def _read_config_file(path: str) -> list[tuple[str, object]]:
    pairs = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            pairs.append(_parse_assignment(line))
    return pairs


def apply_override(scenario: ScenarioConfig, key: str, value) -> None:
    """Set a dotted scenario field like ``mpc.T`` or ``noise.amplitude``."""
    obj = scenario
    parts = key.split(".")
    for part in parts[:-1]:
        if not hasattr(obj, part):
            raise ValueError(f"unknown scenario field '{key}'")
        obj = getattr(obj, part)
    leaf = parts[-1]
    if not hasattr(obj, leaf) or leaf.startswith("_") or callable(getattr(obj, leaf)):
        raise ValueError(f"unknown scenario field '{key}'")
    setattr(obj, leaf, value)


def build_scenario(inv: CliInvocation) -> ScenarioConfig:
    """Built-in defaults for the plant, merged with config file then --set."""
    scenario = default_scenario(inv.plant, inv.noise, inv.seed)
    pairs = []
    if inv.config_file is not None:
        pairs.extend(_read_config_file(inv.config_file))
    pairs.extend(_parse_assignment(item) for item in inv.overrides)
    for key, value in pairs:
        apply_override(scenario, key, value)
    if pairs:  # re-run validation after raw field edits
        scenario.mpc.__post_init__()
        scenario.__post_init__()
    return scenario


def _validate(inv: CliInvocation) -> None:
    if inv.plant is None:
        raise ValueError(
            f"--plant is required (known: {', '.join(plant_names())})"
        )
    if inv.plant not in plant_names():
        raise ValueError(
            f"unknown plant '{inv.plant}' (known: {', '.join(plant_names())})"
        )
    if inv.method not in _METHODS:
        raise ValueError(f"unknown method '{inv.method}' (known: {', '.join(_METHODS)})")


def _run_method(method: str, scenario: ScenarioConfig):
    runner = run_ia_mpc if method == "ia-mpc" else run_sl_mpc
    return runner(scenario)


def _output_paths(inv: CliInvocation, method: str) -> tuple[str, str]:
    stem = f"{inv.plant}_{method}" + ("_noise" if inv.noise else "")
    base = os.path.join(inv.out_dir, stem)
    return base + ".csv", base + "_metrics.txt"


def _metrics_summary(method: str, metrics: Metrics) -> str:
    return (
        f"{method}: rms_tracking_error={metrics.rms_tracking_error:.6g} "
        f"max_constraint_violation={metrics.max_constraint_violation:.6g} "
        f"mean_solve_seconds={metrics.mean_solve_seconds:.6g} "
        f"mean_solver_iters={metrics.mean_solver_iters:.6g}"
    )


def cmd_run(inv: CliInvocation) -> int:
    _validate(inv)
    scenario = build_scenario(inv)
    os.makedirs(inv.out_dir, exist_ok=True)
    log, metrics = _run_method(inv.method, scenario)
    csv_path, metrics_path = _output_paths(inv, inv.method)
    write_log_csv(log, csv_path)
    write_metrics(metrics, metrics_path)
    print(f"wrote {csv_path}")
    print(f"wrote {metrics_path}")
    print(_metrics_summary(inv.method, metrics))
    return 0


def cmd_compare(inv: CliInvocation) -> int:
    _validate(inv)
    scenario = build_scenario(inv)
    os.makedirs(inv.out_dir, exist_ok=True)
    rows = []
    for method in _METHODS:
        log, metrics = _run_method(method, scenario)
        csv_path, metrics_path = _output_paths(inv, method)
        write_log_csv(log, csv_path)
        write_metrics(metrics, metrics_path)
        rows.append((method, metrics))
    header = f"{'method':<10} {'rms_error':>12} {'max_violation':>14} {'mean_solve_s':>13}"
    print(header)
    for method, metrics in rows:
        print(
            f"{method:<10} {metrics.rms_tracking_error:>12.6g} "
            f"{metrics.max_constraint_violation:>14.6g} "
            f"{metrics.mean_solve_seconds:>13.6g}"
        )
    return 0


def _describe_reference(ref) -> str:
    if isinstance(ref, RandomStepRef):
        return f"random-step every {ref.period:g} s in [{ref.low:g}, {ref.high:g}]"
    if isinstance(ref, RampRef):
        return (
            f"ramp {ref.y_from:g} to {ref.y_to:g} over "
            f"[{ref.t_start:g}, {ref.t_end:g}] s"
        )
    if isinstance(ref, SquareRef):
        return f"square every {ref.period:g} s between {ref.levels[0]:g} and {ref.levels[1]:g}"
    return type(ref).__name__


def _describe_box(lo, hi, name: str) -> str:
    if lo is None and hi is None:
        return f"{name} unbounded"
    lo_s = "-inf" if lo is None else f"{lo:g}"
    hi_s = "inf" if hi is None else f"{hi:g}"
    return f"{name} in [{lo_s}, {hi_s}]"


def cmd_list() -> int:
    for name in plant_names():
        sc = default_scenario(name)
        poles = ", ".join(f"{p:g}" for p in sc.observer_poles)
        parts = [
            f"t_s={sc.t_s:g}",
            f"duration={sc.duration:g}",
            f"p={sc.arx_order}",
            f"poles=[{poles}]",
            _describe_box(sc.mpc.u_min, sc.mpc.u_max, "u"),
            _describe_box(sc.mpc.du_min, sc.mpc.du_max, "du"),
            _describe_reference(sc.reference),
            f"noise_amplitude={_NOISE_AMPLITUDE[name]:g}",
        ]
        print(f"{name}: " + ", ".join(parts))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iampc",
        description="Adaptive ARX and successive-linearization MPC benchmarks",
    )
    sub = parser.add_subparsers(dest="command")
    for cmd in ("run", "compare"):
        sp = sub.add_parser(cmd)
        sp.add_argument("--plant", default=None,
                        help=f"benchmark name ({', '.join(plant_names())})")
        if cmd == "run":
            sp.add_argument("--method", default="ia-mpc",
                            help="ia-mpc or sl-mpc (default ia-mpc)")
        sp.add_argument("--noise", action="store_true",
                        help="enable the published process-noise scenario")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out-dir", default=None,
                        help="output directory (default $IAMPC_OUT_DIR or .)")
        sp.add_argument("--config", default=None,
                        help="key=value scenario file, dotted keys like mpc.T")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="scenario override, repeatable")
    sub.add_parser("list")
    return parser


def _invocation(args: argparse.Namespace) -> CliInvocation:
    out_dir = args.out_dir
    if out_dir is None:
        out_dir = os.environ.get("IAMPC_OUT_DIR", ".")
    return CliInvocation(
        command=args.command,
        plant=args.plant,
        method=getattr(args, "method", "ia-mpc"),
        noise=args.noise,
        seed=args.seed,
        out_dir=out_dir,
        config_file=args.config,
        overrides=tuple(args.set),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        if args.command == "list":
            return cmd_list()
        inv = _invocation(args)
        if args.command == "run":
            return cmd_run(inv)
        return cmd_compare(inv)
    except ClosedLoopAbortError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("usage: see 'iampc --help'", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
