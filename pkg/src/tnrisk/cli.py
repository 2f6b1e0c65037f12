"""Command-line front end.

Subcommands: validate, estimate, solve, scenario, sweep.
Exit codes: 0 success, 1 domain error, 2 I/O or usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import dataset, estimation, evader, scenario as scn
from .errors import ModelError, ThresholdOutOfRange
from .params import BLOCKED, WEIGHT_PRESETS, DEFAULT_LAMBDA, DEFAULT_Q, SupportWeights, is_blocked

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    data_dir: Path
    mode: str  # "estimate" | "pre"
    lam: float
    abandon: float
    weights: SupportWeights
    weights_label: str
    q: float
    out_dir: Path
    fmt: str
    seed: int


def _parse_weights(text: str) -> tuple[SupportWeights, str]:
    aliases = {"default": "default", "high": "high_commitment", "low": "low_commitment"}
    key = aliases.get(text, text)
    if key in WEIGHT_PRESETS:
        return WEIGHT_PRESETS[key], key
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"bad weights {text!r}: use a preset or r,s,o")
    w = SupportWeights(*(float(p) for p in parts))
    return w, text


def _parse_abandon(text: str) -> float:
    if text.strip().lower() == "inf":
        return BLOCKED
    return float(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", default=None, help="data directory (default: bundled dataset)")
    p.add_argument("--mode", choices=["estimate", "pre"], default="pre",
                   help="estimate parameters from raw tables, or load pre-estimated ones")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
                   help="rationality parameter")
    p.add_argument("--abandon", default="inf", help="abandon yield, a number or 'inf'")
    p.add_argument("--weights", default="default",
                   help="support weights: default|high|low or r,s,o")
    p.add_argument("--q", type=float, default=DEFAULT_Q, help="plot-conversion factor")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--seed", type=int, default=0, help="sampler seed for diagnostics")


def _config(args: argparse.Namespace) -> RunConfig:
    weights, label = _parse_weights(args.weights)
    data_dir = Path(args.data) if args.data else dataset.bundled_data_dir()
    return RunConfig(
        data_dir=data_dir,
        mode=args.mode,
        lam=args.lam,
        abandon=_parse_abandon(args.abandon),
        weights=weights,
        weights_label=label,
        q=args.q,
        out_dir=Path(args.out),
        fmt=args.format,
        seed=args.seed,
    )


def _load_params(config: RunConfig):
    if config.mode == "pre":
        params = dataset.load_pre_estimated(config.data_dir / "pre_estimated")
        params.lam = config.lam
        params.A = config.abandon
        params.Q = config.q
        params.weights_label = config.weights_label
        return params
    bundle = dataset.load_bundle(config.data_dir)
    return estimation.estimate_params(
        bundle, weights=config.weights, q=config.q,
        abandon_yield=config.abandon, lam=config.lam,
        weights_label=config.weights_label,
    )


def _echo(config: RunConfig) -> dict:
    return {
        "data": str(config.data_dir),
        "mode": config.mode,
        "lambda": config.lam,
        "abandon": "inf" if is_blocked(config.abandon) else config.abandon,
        "weights": config.weights_label,
        "q": config.q,
        "format": config.fmt,
        "seed": config.seed,
    }


def _write_json(path: Path, doc: dict) -> None:
    with path.open("w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def cmd_validate(config: RunConfig) -> int:
    if not config.data_dir.is_dir():
        print(f"error: data directory {config.data_dir} not found", file=sys.stderr)
        return EXIT_USAGE
    try:
        bundle = dataset.load_bundle(config.data_dir)
    except ModelError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    report = dataset.validate_bundle(bundle)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    report_path = config.out_dir / "validation_report.txt"
    report_path.write_text("\n".join(report.lines()) + ("\n" if report.entries else ""),
                           encoding="utf-8")
    if report.ok:
        print(f"ok: bundle at {config.data_dir} is valid")
        return EXIT_OK
    for line in report.lines():
        print(line)
    return EXIT_DOMAIN


def cmd_estimate(config: RunConfig) -> int:
    bundle = dataset.load_bundle(config.data_dir)
    params = estimation.estimate_params(
        bundle, weights=config.weights, q=config.q,
        abandon_yield=config.abandon, lam=config.lam, weights_label=config.weights_label,
    )
    config.out_dir.mkdir(parents=True, exist_ok=True)
    estimation.write_params_csv(params, config.out_dir)
    _write_json(config.out_dir / "run_metadata.json", {"config": _echo(config),
                                                       "params": params.echo()})
    print(f"wrote estimated parameter tables to {config.out_dir}")
    return EXIT_OK


def _solve_to_dir(params, config: RunConfig, prefix: str = "") -> "evader.AttackMatrix":
    matrix = scn.solve(params)
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    evader.write_matrix_csv(matrix, out / f"{prefix}attack_matrix.csv")
    evader.write_abandoned_csv(matrix, out / f"{prefix}abandoned.csv")
    if config.fmt == "json" or prefix == "":
        evader.write_matrix_json(matrix, out / f"{prefix}attack_matrix.json")
    totals, grand = evader.target_totals(matrix)
    with (out / f"{prefix}target_totals.csv").open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["target", "expected_plots"])
        for t, v in sorted(totals.items()):
            w.writerow([t, repr(v)])
        w.writerow(["TOTAL", repr(grand)])
    return matrix


def _write_plot_data(matrix, path: Path) -> None:
    # circle areas proportional to plot counts; zero entries omitted
    peak = max(matrix.N.values(), default=0.0)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["source", "target", "value", "normalized"])
        for (i, t), v in sorted(matrix.N.items()):
            w.writerow([i, t, repr(v), repr(v / peak if peak else 0.0)])


def cmd_solve(config: RunConfig) -> int:
    params = _load_params(config)
    matrix = _solve_to_dir(params, config)
    _write_plot_data(matrix, config.out_dir / "plot_data.csv")
    _write_json(config.out_dir / "run_metadata.json", {"config": _echo(config),
                                                       "params": params.echo()})
    totals, grand = evader.target_totals(matrix)
    top = max(totals.items(), key=lambda kv: kv[1]) if totals else ("-", 0.0)
    print(f"solved: {grand:.1f} expected attacks; top target {top[0]} ({top[1]:.1f})")
    return EXIT_OK


def cmd_scenario(config: RunConfig, spec_arg: str) -> int:
    params = _load_params(config)
    if spec_arg in ("fortress-USA", "homegrown"):
        alt_params = scn.builtin_scenario(spec_arg, params)
        name = spec_arg
    else:
        spec = scn.ScenarioSpec.from_json(spec_arg)
        alt_params = scn.apply_scenario(params, spec)
        name = spec.name
    base = _solve_to_dir(params, config, prefix="base_")
    alt = _solve_to_dir(alt_params, config, prefix="alt_")
    delta = scn.diff_matrices(base, alt)
    out = config.out_dir
    with (out / "delta.csv").open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["source", "target", "delta"])
        for (i, t), v in sorted(delta.delta.items()):
            w.writerow([i, t, repr(v)])
    with (out / "ranked_gainers.csv").open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["target", "total_delta"])
        for t, v in delta.ranked_targets:
            w.writerow([t, repr(v)])
    _write_json(out / "run_metadata.json", {"config": _echo(config), "scenario": name,
                                            "params": params.echo()})
    top = delta.ranked_targets[0] if delta.ranked_targets else ("-", 0.0)
    print(f"scenario {name}: largest per-target change {top[0]} ({top[1]:+.1f})")
    return EXIT_OK


def cmd_sweep(config: RunConfig, a_min: float, a_max: float, step: float) -> int:
    if not (a_min < a_max and step > 0):
        print("error: need a_min < a_max and step > 0", file=sys.stderr)
        return EXIT_USAGE
    params = _load_params(config)
    grid = []
    a = a_min
    while a <= a_max + 1e-9:
        grid.append(round(a, 9))
        a += step
    curve = scn.deterrence_sweep(params, grid, lam=config.lam)
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    tgt_cols = sorted(curve.per_target)
    with (out / "sweep.csv").open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["A", "total_attacks"] + tgt_cols)
        for k, a in enumerate(curve.a_values):
            w.writerow([repr(a), repr(curve.totals[k])] +
                       [repr(curve.per_target[t][k]) for t in tgt_cols])
    fraction = 0.5
    status = EXIT_OK
    try:
        threshold = scn.find_threshold(curve, fraction)
        print(f"threshold A* = {threshold:.2f} (fraction {fraction})")
    except ThresholdOutOfRange as e:
        threshold = None
        print(f"error: {e}", file=sys.stderr)
        status = EXIT_DOMAIN
    _write_json(out / "run_metadata.json", {
        "config": _echo(config), "params": params.echo(),
        "threshold": threshold, "threshold_fraction": fraction,
        "grid": {"min": a_min, "max": a_max, "step": step},
    })
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tnrisk",
        description="Estimate and solve the transnational attack-allocation model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in [
        ("validate", "check a data directory against the input schemas"),
        ("estimate", "derive the four parameter tables from raw data"),
        ("solve", "compute the baseline attack matrix"),
        ("scenario", "compare a counterfactual against the baseline"),
        ("sweep", "sweep the abandon yield and locate the deterrence threshold"),
    ]:
        p = sub.add_parser(name, help=doc)
        _add_common(p)
        if name == "scenario":
            p.add_argument("spec", help="built-in name (fortress-USA, homegrown) or a JSON file")
        if name == "sweep":
            p.add_argument("--a-min", type=float, default=-60.0)
            p.add_argument("--a-max", type=float, default=10.0)
            p.add_argument("--step", type=float, default=1.0)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config(args)
    except (ValueError, argparse.ArgumentTypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "validate":
            return cmd_validate(config)
        if args.command == "estimate":
            return cmd_estimate(config)
        if args.command == "solve":
            return cmd_solve(config)
        if args.command == "scenario":
            return cmd_scenario(config, args.spec)
        if args.command == "sweep":
            return cmd_sweep(config, args.a_min, args.a_max, args.step)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    parser.error(f"unknown command {args.command}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
