"""Scenario files: TOML in, JSON-compatible echo out, whole-file validation.

Boundary units are the human-friendly ones (angles in degrees, PD area in
cm^2, powers in watts, PSD in A^2/Hz, bandwidth in Hz); everything is
converted exactly once here. See configs/default.toml for a complete,
commented scenario file.
"""

from __future__ import annotations

import math
from pathlib import Path

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .allocation import STRATEGY_NAMES, StrategySpec
from .channel import DeviceParams
from .sim import ScenarioConfig

__all__ = [
    "ConfigError",
    "load_raw",
    "load_config",
    "config_from_dict",
    "config_to_dict",
    "validate_dict",
    "derived_quantities",
]


class ConfigError(ValueError):
    """Bad scenario file; the message names the offending field(s)."""


_SCHEMA = {
    "room": {"x", "y", "led_xy", "vertical_separation_m"},
    "device": {
        "half_intensity_angle_deg", "fov_semi_angle_deg", "pd_area_cm2",
        "responsivity_a_per_w", "refractive_index", "optical_filter_gain",
        "led_optical_power_w",
    },
    "link": {"bandwidth_hz", "noise_psd_a2_per_hz"},
    "sweep": {"user_counts", "trials", "seed"},
}
_STRATEGY_KEYS = {"name", "mu", "beta", "sinr_target_db"}


def load_raw(path) -> dict:
    """Read a scenario file into a plain mapping without building it."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid TOML: {exc}") from exc


def load_config(path) -> ScenarioConfig:
    """Parse and build a scenario; raises ConfigError naming what is wrong."""
    return config_from_dict(load_raw(path))


def config_from_dict(raw: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from a parsed config mapping."""
    problems = validate_dict(raw)
    if problems:
        raise ConfigError("; ".join(problems))
    room = raw["room"]
    dev = raw["device"]
    lnk = raw["link"]
    sweep = raw["sweep"]
    device = DeviceParams(
        pd_area=float(dev["pd_area_cm2"]) * 1e-4,
        responsivity=float(dev["responsivity_a_per_w"]),
        half_intensity_angle=math.radians(float(dev["half_intensity_angle_deg"])),
        fov_semi_angle=math.radians(float(dev["fov_semi_angle_deg"])),
        refractive_index=float(dev["refractive_index"]),
        optical_filter_gain=float(dev["optical_filter_gain"]),
        led_optical_power=float(dev["led_optical_power_w"]),
    )
    strategies = tuple(
        StrategySpec(
            name=s["name"],
            mu=float(s.get("mu", 0.2)),
            beta=float(s.get("beta", 1.0)),
            sinr_target_db=float(s.get("sinr_target_db", 1.0)),
        )
        for s in raw["strategies"]
    )
    return ScenarioConfig(
        room_x=float(room["x"]),
        room_y=float(room["y"]),
        led_xy=tuple((float(x), float(y)) for x, y in room["led_xy"]),
        vertical_separation=float(room["vertical_separation_m"]),
        device=device,
        noise_psd=float(lnk["noise_psd_a2_per_hz"]),
        bandwidth=float(lnk["bandwidth_hz"]),
        user_counts=tuple(int(k) for k in sweep["user_counts"]),
        trials=int(sweep["trials"]),
        seed=int(sweep["seed"]),
        strategies=strategies,
    )


def config_to_dict(config: ScenarioConfig) -> dict:
    """Config echo in the file schema; re-parses to an equivalent config."""
    dev = config.device
    return {
        "room": {
            "x": config.room_x,
            "y": config.room_y,
            "led_xy": [list(xy) for xy in config.led_xy],
            "vertical_separation_m": config.vertical_separation,
        },
        "device": {
            "half_intensity_angle_deg": math.degrees(dev.half_intensity_angle),
            "fov_semi_angle_deg": math.degrees(dev.fov_semi_angle),
            "pd_area_cm2": dev.pd_area * 1e4,
            "responsivity_a_per_w": dev.responsivity,
            "refractive_index": dev.refractive_index,
            "optical_filter_gain": dev.optical_filter_gain,
            "led_optical_power_w": dev.led_optical_power,
        },
        "link": {
            "bandwidth_hz": config.bandwidth,
            "noise_psd_a2_per_hz": config.noise_psd,
        },
        "sweep": {
            "user_counts": list(config.user_counts),
            "trials": config.trials,
            "seed": config.seed,
        },
        "strategies": [
            {
                "name": s.name,
                "mu": s.mu,
                "beta": s.beta,
                "sinr_target_db": s.sinr_target_db,
            }
            for s in config.strategies
        ],
    }


def validate_dict(raw: dict) -> list:
    """Every schema and physics problem in the mapping, not just the first."""
    problems = []
    for section, keys in _SCHEMA.items():
        if section not in raw:
            problems.append(f"missing section [{section}]")
            continue
        if not isinstance(raw[section], dict):
            problems.append(f"[{section}] must be a table")
            continue
        for key in keys:
            if key not in raw[section]:
                problems.append(f"missing {section}.{key}")
        for key in raw[section]:
            if key not in keys:
                problems.append(f"unknown key {section}.{key}")
    if "strategies" not in raw:
        problems.append("missing [[strategies]] entries")
    elif not isinstance(raw["strategies"], list) or not raw["strategies"]:
        problems.append("[[strategies]] must list at least one strategy")
    if problems:
        return problems

    def positive(section, key):
        v = raw[section][key]
        if not isinstance(v, (int, float)) or not v > 0:
            problems.append(f"{section}.{key} must be a positive number, got {v!r}")

    positive("room", "x")
    positive("room", "y")
    positive("room", "vertical_separation_m")
    led_xy = raw["room"]["led_xy"]
    if (not isinstance(led_xy, list) or not led_xy
            or any(not isinstance(p, list) or len(p) != 2 for p in led_xy)):
        problems.append("room.led_xy must be a non-empty list of [x, y] pairs")

    theta = raw["device"]["half_intensity_angle_deg"]
    if not isinstance(theta, (int, float)) or not 0.0 < theta < 90.0:
        problems.append(
            f"device.half_intensity_angle_deg must be in (0, 90), got {theta!r}")
    fov = raw["device"]["fov_semi_angle_deg"]
    if not isinstance(fov, (int, float)) or not 0.0 < fov <= 90.0:
        problems.append(f"device.fov_semi_angle_deg must be in (0, 90], got {fov!r}")
    positive("device", "pd_area_cm2")
    positive("device", "responsivity_a_per_w")
    n = raw["device"]["refractive_index"]
    if not isinstance(n, (int, float)) or n < 1.0:
        problems.append(f"device.refractive_index must be >= 1, got {n!r}")
    positive("device", "optical_filter_gain")
    positive("device", "led_optical_power_w")
    positive("link", "bandwidth_hz")
    positive("link", "noise_psd_a2_per_hz")

    counts = raw["sweep"]["user_counts"]
    if (not isinstance(counts, list) or not counts
            or any(not isinstance(k, int) or k < 1 for k in counts)):
        problems.append("sweep.user_counts must be a non-empty list of integers >= 1")
    trials = raw["sweep"]["trials"]
    if not isinstance(trials, int) or trials < 1:
        problems.append(f"sweep.trials must be an integer >= 1, got {trials!r}")
    if not isinstance(raw["sweep"]["seed"], int):
        problems.append("sweep.seed must be an integer")

    seen = set()
    for i, s in enumerate(raw["strategies"]):
        if not isinstance(s, dict) or "name" not in s:
            problems.append(f"strategies[{i}] must be a table with a name")
            continue
        for key in s:
            if key not in _STRATEGY_KEYS:
                problems.append(f"unknown key strategies[{i}].{key}")
        name = s["name"]
        if name not in STRATEGY_NAMES:
            problems.append(
                f"strategies[{i}].name must be one of {STRATEGY_NAMES}, got {name!r}")
            continue
        if name in seen:
            problems.append(f"duplicate strategy name {name!r}")
        seen.add(name)
        if "mu" in s and not 0.0 <= s["mu"] < 1.0:
            problems.append(f"strategies[{i}].mu must be in [0, 1), got {s['mu']!r}")
        if "beta" in s and s["beta"] < 1.0:
            problems.append(f"strategies[{i}].beta must be >= 1, got {s['beta']!r}")
        if "sinr_target_db" in s and not isinstance(s["sinr_target_db"], (int, float)):
            problems.append(f"strategies[{i}].sinr_target_db must be a number")
    return problems


def derived_quantities(config: ScenarioConfig) -> dict:
    """Quantities worth eyeballing after a parse."""
    dev = config.device
    return {
        "lambertian_order": dev.lambertian_m,
        "concentrator_gain_on_axis":
            dev.refractive_index ** 2 / math.sin(dev.fov_semi_angle) ** 2,
        "noise_power_a2": config.noise_power,
        "tx_snr": config.tx_snr,
    }
