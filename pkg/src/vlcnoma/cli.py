"""Command line front end: sweep / trial / validate.

Exit codes: 0 success, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .allocation import sfpa_mu, validate_coefficients
from .channel import Position3
from .config import (ConfigError, config_from_dict, config_to_dict,
                     derived_quantities, load_config, load_raw, validate_dict)
from .link import sinr_vector
from .sim import ScenarioConfig, SweepResult, run_sweep, run_trial

CSV_HEADER = ("K,strategy,avg_sum_rate_mbps,avg_min_rate_mbps,fairness,"
              "infeasible_fraction,se_sum,se_min")


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def render_rows_csv(result: SweepResult) -> str:
    """Locale-independent CSV (period decimals, LF endings), rates in Mbps."""
    lines = [CSV_HEADER]
    for r in result.rows:
        lines.append(",".join([
            str(r.user_count),
            r.strategy,
            _fmt(r.avg_sum_rate / 1e6),
            _fmt(r.avg_min_rate / 1e6),
            _fmt(r.fairness),
            _fmt(r.infeasible_fraction),
            _fmt(r.se_sum_rate / 1e6),
            _fmt(r.se_min_rate / 1e6),
        ]))
    return "\n".join(lines) + "\n"


def render_wide_csv(result: SweepResult, column: str) -> str:
    """One figure-ready table: K in rows, one column per strategy."""
    strategies = result.metadata["strategies"]
    scale = 1e6 if column != "fairness" else 1.0
    lines = ["K," + ",".join(strategies)]
    for k in result.metadata["user_counts"]:
        cells = [str(k)]
        for name in strategies:
            cells.append(_fmt(getattr(result.row(k, name), column) / scale))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    if getattr(args, "seed", None) is not None:
        config = dataclasses.replace(config, seed=args.seed)
    names = getattr(args, "strategies", None)
    if names:
        wanted = [n.strip() for n in names.split(",") if n.strip()]
        by_name = {s.name: s for s in config.strategies}
        missing = [n for n in wanted if n not in by_name]
        if missing:
            raise ConfigError(
                f"--strategies names {missing} not present in the config "
                f"(available: {sorted(by_name)})"
            )
        config = dataclasses.replace(
            config, strategies=tuple(by_name[n] for n in wanted)
        )
    return config


def cmd_sweep(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    started = time.time()
    result = run_sweep(config, threads=args.threads)
    elapsed = time.time() - started
    _write(args.out, render_rows_csv(result))
    meta = dict(result.metadata)
    meta.update({
        "version": __version__,
        "threads_requested": args.threads,
        "runtime_seconds": round(elapsed, 3),
        "config": config_to_dict(config),
        "note": "trials count applies per user count K",
    })
    meta_path = args.out + ".meta.json"
    with open(meta_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.wide_dir:
        os.makedirs(args.wide_dir, exist_ok=True)
        for column, fname in (
            ("avg_sum_rate", "sum_rate_mbps_wide.csv"),
            ("avg_min_rate", "min_rate_mbps_wide.csv"),
            ("fairness", "fairness_wide.csv"),
        ):
            _write(os.path.join(args.wide_dir, fname),
                   render_wide_csv(result, column))
    print(f"wrote {len(result.rows)} rows to {args.out} "
          f"(metadata: {meta_path}, {elapsed:.1f}s)")
    return 0


def _parse_positions(text: str, config: ScenarioConfig) -> list:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--positions must be comma-separated numbers: {exc}")
    if not values or len(values) % 2:
        raise ConfigError("--positions needs an even number of values: x1,y1,x2,y2,...")
    pairs = list(zip(values[::2], values[1::2]))
    for x, y in pairs:
        if not (0.0 <= x <= config.room_x and 0.0 <= y <= config.room_y):
            raise ConfigError(
                f"position ({x}, {y}) lies outside the {config.room_x} x "
                f"{config.room_y} m room"
            )
    return [Position3(x, y, 0.0) for x, y in pairs]


def cmd_trial(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    positions = _parse_positions(args.positions, config)
    trial = run_trial(config, positions)
    gains = trial.gains
    n_users = len(positions)

    print(f"users: {n_users}, LEDs: {len(config.led_xy)}")
    for i, p in enumerate(positions):
        print(f"  user {i}: ({p.x:.4g}, {p.y:.4g})  "
              f"per-LED gain { [f'{g:.4g}' for g in gains.per_led[:, i]] }  "
              f"||h||^2 = {gains.combined_sq[i]:.6g}")
    order = ", ".join(str(int(u)) for u in gains.sic_order)
    print(f"SIC order (weakest first, ties broken by user index): [{order}]")
    print(f"noise power sigma^2 = {config.noise_power:.6g} A^2, "
          f"tx SNR = {config.tx_snr:.6g}")

    csv_lines = ["strategy,rank,user,alpha,sinr,rate_mbps"]
    for spec in config.strategies:
        rates = trial.rates[spec.name]
        if rates is None:
            print(f"\n{spec.name}: infeasible for this placement")
            continue
        coeffs = trial.alphas[spec.name]
        problems = validate_coefficients(coeffs)
        sinr = sinr_vector(coeffs, trial.budget.gains_sq,
                           config.device.led_optical_power, config.noise_power)
        extra = ""
        if spec.name == "sfpa" and spec.beta == 1.0:
            mu = sfpa_mu(config.tx_snr, float(trial.budget.gains_sq[-1]), n_users)
            extra = f"  (mu = {mu:.6g})"
        print(f"\n{spec.name}{extra}")
        for k in range(n_users):
            user = int(gains.sic_order[k])
            print(f"  rank {k + 1} (user {user}): alpha = {coeffs.alpha[k]:.6g}, "
                  f"SINR = {sinr[k]:.6g}, rate = {rates[k] / 1e6:.6g} Mbps")
            csv_lines.append(
                f"{spec.name},{k + 1},{user},{_fmt(coeffs.alpha[k])},"
                f"{_fmt(sinr[k])},{_fmt(rates[k] / 1e6)}"
            )
        if problems:
            print("  WARNING: " + "; ".join(problems))
    if args.out:
        _write(args.out, "\n".join(csv_lines) + "\n")
        print(f"\nwrote {args.out}")
    return 0


def cmd_validate(args) -> int:
    raw = load_raw(args.config)
    problems = validate_dict(raw)
    if problems:
        print(f"{len(problems)} problem(s) in {args.config}:")
        for msg in problems:
            print(f"  - {msg}")
        return 2
    config = config_from_dict(raw)
    q = derived_quantities(config)
    print(f"{args.config}: OK")
    print(f"  lambertian order m        = {q['lambertian_order']:.6g}")
    print(f"  concentrator gain g(0)    = {q['concentrator_gain_on_axis']:.6g}")
    print(f"  noise power sigma^2       = {q['noise_power_a2']:.6g} A^2")
    print(f"  tx SNR P^2/sigma^2        = {q['tx_snr']:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vlcnoma",
        description="Indoor visible-light NOMA downlink simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run the Monte Carlo sweep, write CSV")
    sweep.add_argument("--config", required=True, help="scenario TOML file")
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    sweep.add_argument("--threads", type=int, default=1,
                       help="worker threads (never changes results)")
    sweep.add_argument("--strategies", default=None,
                       help="comma-separated subset of configured strategies")
    sweep.add_argument("--wide-dir", default=None,
                       help="also write one figure-ready wide CSV per statistic")
    sweep.set_defaults(func=cmd_sweep)

    trial = sub.add_parser("trial", help="evaluate one fixed placement")
    trial.add_argument("--config", required=True)
    trial.add_argument("--positions", required=True,
                       help="flat x1,y1,x2,y2,... list inside the room")
    trial.add_argument("--strategies", default=None)
    trial.add_argument("--out", default=None, help="also write a CSV table")
    trial.set_defaults(func=cmd_trial)

    validate = sub.add_parser("validate", help="check a scenario file")
    validate.add_argument("--config", required=True)
    validate.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
