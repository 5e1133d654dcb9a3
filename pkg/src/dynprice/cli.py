"""Command-line front end: scenario generation, runs and parameter sweeps.

Configuration lives in a TOML file of flat sections; every key is
optional and falls back to the bundled defaults, unknown keys are
rejected. The top-level ``seed`` feeds every component that was not given
its own seed, so one number pins a whole experiment; ``--seed`` overrides
it from the command line.

Exit codes: 0 success, 2 run completed but a constraint was violated
(a reportable outcome, not a crash), 1 configuration or I/O error.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import defaults
from .demand import DemandResponseModel, uniform_kernel
from .evaluate import BaselineTariff
from .forecast import ForecasterConfig
from .orchestrator import RunConfig, RunResult, run
from .policy import PolicyConfig
from .scenario import GeneratorConfig, Scenario, generate, load_csv, save_csv
from .settlement import CostModel
from .timeline import HOURS_PER_DAY, CalendarConfig, Horizon

REPORT_FILE = "report.json"
LEDGER_FILE = "ledger.csv"
TRAJECTORY_FILE = "trajectory.csv"
SWEEP_FILE = "sweep.csv"

_NUMBER = (int, float)
_NUMBER_LIST = "number_list"
_INT_LIST = "int_list"

# section -> key -> expected type ("" is the top level)
_SCHEMA: dict[str, dict[str, object]] = {
    "": {"seed": int, "output_dir": str},
    "horizon": {"hours": int, "days": int},
    "scenario": {
        "csv": str,
        "seed": int,
        "solar_capacity": _NUMBER,
        "wind_capacity": _NUMBER,
        "sunrise_hour": int,
        "sunset_hour": int,
        "wind_reversion": _NUMBER,
        "wind_noise_std": _NUMBER,
        "consumption_base": _NUMBER,
        "consumption_peak_amplitude": _NUMBER,
        "consumption_noise_std": _NUMBER,
        "weekend_factor": _NUMBER,
        "price_base": _NUMBER,
        "price_slope": _NUMBER,
        "price_noise_std": _NUMBER,
        "imbalance_spread": _NUMBER,
    },
    "calendar": {
        "start_weekday": int,
        "start_day_of_year": int,
        "holidays": _INT_LIST,
    },
    "forecasters": {
        "kind": str,
        "gamma": _NUMBER,
        "persistence_std": _NUMBER,
        "seed": int,
        "day0_production": _NUMBER_LIST,
        "day0_consumption": _NUMBER_LIST,
        "day0_price": _NUMBER_LIST,
    },
    "demand_model": {
        "elasticity_scale": _NUMBER,
        "elasticity": _NUMBER_LIST,
        "kernel_halfwidth": int,
        "kernel_weights": _NUMBER_LIST,
        "rho": _NUMBER,
    },
    "policy": {
        "kind": str,
        "price_min": _NUMBER,
        "price_max": _NUMBER,
        "grid_levels": int,
        "max_sweeps": int,
        "restarts": int,
        "penalty_weight": _NUMBER,
        "mc_samples": int,
        "chance_level": _NUMBER,
        "seed": int,
    },
    "tariff": {"alpha": _NUMBER, "beta": _NUMBER},
    "cost_model": {"fixed_cost_per_hour": _NUMBER, "marginal_cost": _NUMBER},
}


class ConfigError(ValueError):
    """Raised for malformed configuration files or sweep axes."""


def _check_type(section: str, key: str, value, expected) -> None:
    where = f"{section}.{key}" if section else key
    if expected is _NUMBER_LIST or expected is _INT_LIST:
        wanted = "numbers" if expected is _NUMBER_LIST else "integers"
        ok = isinstance(value, list) and all(
            isinstance(v, _NUMBER) and not isinstance(v, bool) for v in value
        )
        if expected is _INT_LIST:
            ok = ok and all(isinstance(v, int) for v in value)
        if not ok:
            raise ConfigError(f"key '{where}' must be a list of {wanted}")
        return
    if expected is _NUMBER:
        if not isinstance(value, _NUMBER) or isinstance(value, bool):
            raise ConfigError(f"key '{where}' must be a number")
        return
    if not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
        raise ConfigError(f"key '{where}' must be of type {expected.__name__}")


def validate_config(raw: dict, base_dir: Path) -> dict:
    """Check sections, keys and types; verify referenced files exist."""
    cfg: dict = {"": {}}
    for name, value in raw.items():
        if isinstance(value, dict):
            if name not in _SCHEMA or name == "":
                raise ConfigError(f"unknown section '{name}'")
            for key, v in value.items():
                if key not in _SCHEMA[name]:
                    raise ConfigError(f"unknown key '{name}.{key}'")
                _check_type(name, key, v, _SCHEMA[name][key])
            cfg[name] = dict(value)
        else:
            if name not in _SCHEMA[""]:
                raise ConfigError(f"unknown top-level key '{name}'")
            _check_type("", name, value, _SCHEMA[""][name])
            cfg[""][name] = value
    horizon = cfg.get("horizon", {})
    if "hours" in horizon and "days" in horizon:
        raise ConfigError("give either horizon.hours or horizon.days, not both")
    scenario = cfg.get("scenario", {})
    if "csv" in scenario:
        generator_keys = set(scenario) - {"csv"}
        if generator_keys:
            raise ConfigError(
                f"scenario.csv excludes generator keys: {sorted(generator_keys)}"
            )
        csv_path = (base_dir / scenario["csv"]).resolve()
        if not csv_path.is_file():
            raise ConfigError(f"scenario.csv file does not exist: {csv_path}")
        scenario["csv"] = str(csv_path)
    return cfg


def load_config_file(path: str | Path | None, seed_override: int | None = None) -> dict:
    if path is None:
        raw: dict = {}
        base_dir = Path.cwd()
    else:
        path = Path(path)
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        base_dir = path.parent
    cfg = validate_config(raw, base_dir)
    if seed_override is not None:
        cfg[""]["seed"] = int(seed_override)
    return cfg


def _get(cfg: dict, section: str, key: str, fallback):
    return cfg.get(section, {}).get(key, fallback)


def build_horizon(cfg: dict) -> Horizon:
    section = cfg.get("horizon", {})
    if "hours" in section:
        return Horizon(section["hours"])
    return Horizon(section.get("days", 7) * HOURS_PER_DAY)


def build_calendar(cfg: dict) -> CalendarConfig:
    return CalendarConfig(
        start_weekday=_get(cfg, "calendar", "start_weekday", 0),
        start_day_of_year=_get(cfg, "calendar", "start_day_of_year", 0),
        holidays=frozenset(_get(cfg, "calendar", "holidays", [])),
    )


def _base_seed(cfg: dict) -> int:
    return int(cfg[""].get("seed", 0))


def build_generator_config(cfg: dict) -> GeneratorConfig:
    section = dict(cfg.get("scenario", {}))
    section.pop("csv", None)
    section.setdefault("seed", _base_seed(cfg))
    return GeneratorConfig(**section)


def resolve_scenario(cfg: dict) -> Scenario:
    calendar = build_calendar(cfg)
    csv_path = _get(cfg, "scenario", "csv", None)
    if csv_path is not None:
        return load_csv(csv_path, calendar)
    return generate(build_generator_config(cfg), build_horizon(cfg), calendar)


def build_forecaster(cfg: dict, target: str) -> ForecasterConfig:
    section = cfg.get("forecasters", {})
    profile = section.get(f"day0_{target}")
    return ForecasterConfig(
        kind=section.get("kind", "noisy_oracle"),
        gamma=section.get("gamma", 0.0),
        persistence_std=section.get("persistence_std", 0.0),
        seed=section.get("seed", _base_seed(cfg)),
        day0_profile=tuple(profile) if profile is not None else None,
    )


def build_demand_model(cfg: dict) -> DemandResponseModel:
    section = cfg.get("demand_model", {})
    halfwidth = section.get("kernel_halfwidth", defaults.DEFAULT_KERNEL_HALFWIDTH)
    if "elasticity" in section:
        elasticity = np.asarray(section["elasticity"], dtype=float)
    else:
        scale = section.get("elasticity_scale", defaults.DEFAULT_ELASTICITY_SCALE)
        elasticity = np.full(HOURS_PER_DAY, -float(scale))
    weights = (
        np.asarray(section["kernel_weights"], dtype=float)
        if "kernel_weights" in section
        else uniform_kernel(halfwidth)
    )
    beta = _get(cfg, "tariff", "beta", defaults.DEFAULT_TARIFF_BETA)
    if beta <= 0:
        raise ConfigError("tariff.beta must be positive: it anchors the demand response")
    return DemandResponseModel(
        elasticity=elasticity,
        kernel_halfwidth=halfwidth,
        kernel_weights=weights,
        recovery_fraction=section.get("rho", defaults.DEFAULT_RECOVERY_FRACTION),
        reference_tariff=np.full(HOURS_PER_DAY, float(beta)),
    )


def build_policy(cfg: dict) -> PolicyConfig:
    section = dict(cfg.get("policy", {}))
    section.setdefault("seed", _base_seed(cfg))
    return PolicyConfig(**section)


def effective_horizon(cfg: dict, scenario: Scenario) -> Horizon:
    """CSV sources fix the horizon; an explicit section must agree."""
    if _get(cfg, "scenario", "csv", None) is not None:
        if "horizon" in cfg and build_horizon(cfg) != scenario.horizon:
            raise ConfigError(
                f"horizon section says {build_horizon(cfg).steps} h "
                f"but the scenario file has {scenario.horizon.steps} h"
            )
        return scenario.horizon
    return build_horizon(cfg)


def build_run_config(cfg: dict, horizon: Horizon | None = None) -> RunConfig:
    return RunConfig(
        horizon=horizon if horizon is not None else build_horizon(cfg),
        production_forecaster=build_forecaster(cfg, "production"),
        consumption_forecaster=build_forecaster(cfg, "consumption"),
        price_forecaster=build_forecaster(cfg, "price"),
        dr_model=build_demand_model(cfg),
        policy=build_policy(cfg),
        tariff=BaselineTariff(
            alpha=_get(cfg, "tariff", "alpha", 0.0),
            beta=_get(cfg, "tariff", "beta", defaults.DEFAULT_TARIFF_BETA),
        ),
        cost_model=CostModel(
            fixed_cost_per_hour=_get(cfg, "cost_model", "fixed_cost_per_hour", 0.0),
            marginal_cost=_get(cfg, "cost_model", "marginal_cost", 0.0),
        ),
        calendar=build_calendar(cfg),
    )


def write_trajectory(path: Path, scenario: Scenario, result: RunResult, tariff: BaselineTariff) -> None:
    import csv as _csv

    tariff_prices = tariff.prices(scenario.dayahead_price.values)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow(
            [
                "t",
                "production_kwh",
                "baseline_consumption_kwh",
                "realized_consumption_kwh",
                "predicted_consumption_kwh",
                "price_eur_mwh",
                "baseline_tariff_eur_mwh",
                "dayahead_price_eur_mwh",
                "imbalance_price_eur_mwh",
            ]
        )
        for t in range(result.horizon_hours):
            writer.writerow(
                [
                    t,
                    repr(float(scenario.production.values[t])),
                    repr(float(scenario.baseline_consumption.values[t])),
                    repr(float(result.realized_consumption[t])),
                    repr(float(result.predicted_consumption[t])),
                    repr(float(result.prices[t])),
                    repr(float(tariff_prices[t])),
                    repr(float(scenario.dayahead_price.values[t])),
                    repr(float(scenario.imbalance_price.values[t])),
                ]
            )


def _output_dir(cfg: dict, out: str | None) -> Path:
    directory = Path(out) if out is not None else Path(cfg[""].get("output_dir", "out"))
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = load_config_file(args.config, args.seed)
    scenario = resolve_scenario(cfg)
    if args.out is not None:
        out_path = Path(args.out)
    else:
        out_path = _output_dir(cfg, None) / "scenario.csv"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_csv(scenario, out_path)
    print(f"wrote {len(scenario.production)} rows to {out_path}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config_file(args.config, args.seed)
    scenario = resolve_scenario(cfg)
    run_config = build_run_config(cfg, effective_horizon(cfg, scenario))
    result = run(run_config, scenario)
    out_dir = _output_dir(cfg, args.out)
    (out_dir / REPORT_FILE).write_text(result.report.to_json() + "\n", encoding="utf-8")
    result.ledger.to_csv(out_dir / LEDGER_FILE)
    write_trajectory(out_dir / TRAJECTORY_FILE, scenario, result, run_config.tariff)
    r = result.report
    print(
        f"S={_fmt_pct(r.indicator_s_pct)} B={_fmt_pct(r.indicator_b_pct)} "
        f"R={_fmt_pct(r.indicator_r_pct)} consumer_ok={r.consumer_ok} "
        f"producer_ok={r.producer_ok} -> {out_dir}"
    )
    return 0 if (r.consumer_ok and r.producer_ok) else 2


def _fmt_pct(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.3f}%"


def _axis_leaf(cfg: dict, axis: str) -> tuple[str, str]:
    if "." in axis:
        section, key = axis.split(".", 1)
    else:
        section, key = "", axis
    known = _SCHEMA.get(section, {})
    expected = known.get(key)
    if expected not in (_NUMBER, int):
        raise ConfigError(f"unknown axis '{axis}': not a numeric config leaf")
    return section, key


def _parse_values(text: str) -> list[float]:
    try:
        values = [json.loads(v.strip()) for v in text.split(",") if v.strip() != ""]
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse --values: {exc}")
    if not values or not all(isinstance(v, _NUMBER) and not isinstance(v, bool) for v in values):
        raise ConfigError("--values must be a comma-separated list of numbers")
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    import csv as _csv

    cfg = load_config_file(args.config, args.seed)
    section, key = _axis_leaf(cfg, args.axis)
    values = _parse_values(args.values)
    expected = _SCHEMA.get(section, {}).get(key)
    out_dir = _output_dir(cfg, args.out)
    rows = []
    for value in values:
        point = copy.deepcopy(cfg)
        point.setdefault(section, {})
        point[section][key] = int(value) if expected is int else float(value)
        scenario = resolve_scenario(point)
        result = run(build_run_config(point, effective_horizon(point, scenario)), scenario)
        r = result.report
        rows.append(
            [
                value,
                r.indicator_s_pct,
                r.indicator_b_pct,
                r.indicator_r_pct,
                r.consumer_ok,
                r.producer_ok,
                r.consumer_ok and r.producer_ok,
            ]
        )
    with open(out_dir / SWEEP_FILE, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow(
            ["value", "indicator_s_pct", "indicator_b_pct", "indicator_r_pct",
             "consumer_ok", "producer_ok", "feasible"]
        )
        for row in rows:
            writer.writerow(
                [repr(float(row[0]))]
                + ["" if v is None else repr(float(v)) for v in row[1:4]]
                + [str(bool(v)) for v in row[4:]]
            )
    print(f"wrote {len(rows)} sweep rows to {out_dir / SWEEP_FILE}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynprice",
        description="Dynamic pricing simulation for a renewable producer/retailer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="TOML configuration file")
        p.add_argument("--seed", type=int, help="override the top-level seed")

    p_gen = sub.add_parser("generate", help="write a synthetic scenario CSV")
    common(p_gen)
    p_gen.add_argument("--out", help="output CSV path (default: <output_dir>/scenario.csv)")
    p_gen.set_defaults(func=cmd_generate)

    p_run = sub.add_parser("run", help="run the daily pricing loop and write reports")
    common(p_run)
    p_run.add_argument("--out", help="output directory (default: config output_dir)")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="re-run over a list of values for one config leaf")
    common(p_sweep)
    p_sweep.add_argument("--out", help="output directory (default: config output_dir)")
    p_sweep.add_argument("--axis", required=True, help="config leaf, e.g. demand_model.rho")
    p_sweep.add_argument("--values", required=True, help="comma-separated numbers")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
