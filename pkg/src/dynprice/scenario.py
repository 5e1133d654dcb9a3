"""Ground-truth scenario data: hourly series, synthetic generation, CSV I/O.

A scenario holds the realized production, baseline consumption, day-ahead
price and imbalance price over a whole number of days, starting at hour 0,
plus calendar labels and optional named feature columns for custom
forecasters.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .timeline import (
    HOURS_PER_DAY,
    CalendarConfig,
    CalendarFeatures,
    Horizon,
    calendar_features,
)

REQUIRED_COLUMNS = (
    "t",
    "production_kwh",
    "baseline_consumption_kwh",
    "dayahead_price_eur_mwh",
    "imbalance_price_eur_mwh",
)
FEATURE_PREFIX = "feature:"


class Unit(str, Enum):
    KWH_PER_H = "kWh_per_h"
    EUR_PER_MWH = "EUR_per_MWh"
    DIMENSIONLESS = "dimensionless"


class ScenarioCsvError(ValueError):
    """Raised when a scenario CSV file violates the schema."""


@dataclass(frozen=True, eq=False)
class HourlySeries:
    """Real-valued quantity indexed by global hour step."""

    start: int
    values: np.ndarray
    unit: Unit = Unit.DIMENSIONLESS

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("series needs at least one value")
        if not np.isfinite(arr).all():
            raise ValueError("series values must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start", int(self.start))

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HourlySeries):
            return NotImplemented
        return (
            self.start == other.start
            and self.unit == other.unit
            and np.array_equal(self.values, other.values)
        )

    @property
    def end(self) -> int:
        """Last covered hour step (inclusive)."""
        return self.start + len(self.values) - 1

    def covers(self, first: int, last: int) -> bool:
        return self.start <= first and last <= self.end

    def value_at(self, t: int) -> float:
        if not self.start <= t <= self.end:
            raise IndexError(f"step {t} outside series range [{self.start}, {self.end}]")
        return float(self.values[t - self.start])

    def window(self, first: int, length: int) -> np.ndarray:
        if length < 1 or not self.covers(first, first + length - 1):
            raise IndexError(
                f"window [{first}, {first + length - 1}] outside series range "
                f"[{self.start}, {self.end}]"
            )
        i = first - self.start
        return self.values[i : i + length].copy()


@dataclass(frozen=True, eq=False)
class Scenario:
    """Realized world over a whole number of days starting at hour 0."""

    production: HourlySeries
    baseline_consumption: HourlySeries
    dayahead_price: HourlySeries
    imbalance_price: HourlySeries
    calendar: tuple[CalendarFeatures, ...]
    features: dict[str, HourlySeries] = field(default_factory=dict)

    def __post_init__(self) -> None:
        series = {
            "production": self.production,
            "baseline_consumption": self.baseline_consumption,
            "dayahead_price": self.dayahead_price,
            "imbalance_price": self.imbalance_price,
            **{f"feature {k}": v for k, v in self.features.items()},
        }
        n = len(self.production)
        for name, s in series.items():
            if s.start != 0:
                raise ValueError(f"{name} series must start at hour 0, got {s.start}")
            if len(s) != n:
                raise ValueError(f"{name} series length {len(s)} != {n}")
        Horizon(n)  # rejects lengths that are not whole days
        if len(self.calendar) != n:
            raise ValueError(f"calendar length {len(self.calendar)} != {n}")
        if (self.production.values < 0).any():
            raise ValueError("production must be non-negative")
        if (self.baseline_consumption.values < 0).any():
            raise ValueError("baseline consumption must be non-negative")
        object.__setattr__(self, "calendar", tuple(self.calendar))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            self.production == other.production
            and self.baseline_consumption == other.baseline_consumption
            and self.dayahead_price == other.dayahead_price
            and self.imbalance_price == other.imbalance_price
            and self.calendar == other.calendar
            and set(self.features) == set(other.features)
            and all(self.features[k] == other.features[k] for k in self.features)
        )

    @property
    def horizon(self) -> Horizon:
        return Horizon(len(self.production))

    def calendar_day(self, day_index: int) -> tuple[CalendarFeatures, ...]:
        i = day_index * HOURS_PER_DAY
        return self.calendar[i : i + HOURS_PER_DAY]


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs of the synthetic scenario generator.

    Power in kWh/h, prices in EUR/MWh. The generated shapes are a solar
    bell plus autocorrelated wind on the supply side and a double-peak
    daily profile on the demand side; the day-ahead price follows the
    residual load, and the imbalance price penalises whichever direction
    the system is off.
    """

    seed: int = 0
    solar_capacity: float = 400.0
    wind_capacity: float = 250.0
    sunrise_hour: int = 6
    sunset_hour: int = 20
    wind_reversion: float = 0.25
    wind_noise_std: float = 40.0
    consumption_base: float = 300.0
    consumption_peak_amplitude: float = 220.0
    consumption_noise_std: float = 15.0
    weekend_factor: float = 0.9
    price_base: float = 45.0
    price_slope: float = 0.05
    price_noise_std: float = 4.0
    imbalance_spread: float = 15.0

    def __post_init__(self) -> None:
        nonneg = (
            "solar_capacity",
            "wind_capacity",
            "wind_noise_std",
            "consumption_base",
            "consumption_peak_amplitude",
            "consumption_noise_std",
            "weekend_factor",
            "price_noise_std",
            "imbalance_spread",
        )
        for name in nonneg:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if not 0 <= self.sunrise_hour < self.sunset_hour <= 24:
            raise ValueError("need 0 <= sunrise_hour < sunset_hour <= 24")
        if not 0 <= self.wind_reversion <= 1:
            raise ValueError("wind_reversion must be in [0, 1]")


def _solar_profile(hour_of_day: np.ndarray, config: GeneratorConfig) -> np.ndarray:
    # sin^2 bell, exactly zero outside the daylight window
    width = config.sunset_hour - config.sunrise_hour
    x = (hour_of_day - config.sunrise_hour) / width
    bell = np.where((x >= 0) & (x < 1), np.sin(np.pi * np.clip(x, 0, 1)) ** 2, 0.0)
    return config.solar_capacity * bell


def _double_peak_profile(hour_of_day: np.ndarray) -> np.ndarray:
    morning = np.exp(-0.5 * ((hour_of_day - 8.0) / 2.2) ** 2)
    evening = np.exp(-0.5 * ((hour_of_day - 19.0) / 2.5) ** 2)
    return 0.7 * morning + evening


def generate(
    config: GeneratorConfig,
    horizon: Horizon | int,
    calendar: CalendarConfig = CalendarConfig(),
) -> Scenario:
    """Draw a deterministic synthetic scenario for a fixed seed."""
    if not isinstance(horizon, Horizon):
        horizon = Horizon(int(horizon))
    n = horizon.steps
    rng = np.random.default_rng(config.seed)
    steps = np.arange(n)
    hod = steps % HOURS_PER_DAY

    solar = _solar_profile(hod.astype(float), config)

    # Mean-reverting wind around half capacity; draws are sequential so the
    # series is reproducible independent of later draws.
    wind = np.zeros(n)
    level = config.wind_capacity / 2.0
    shocks = rng.standard_normal(n)
    for i in range(n):
        level = level + config.wind_reversion * (config.wind_capacity / 2.0 - level)
        level += config.wind_noise_std * shocks[i]
        level = min(max(level, 0.0), config.wind_capacity)
        wind[i] = level
    production = np.minimum(solar, config.solar_capacity) + wind

    cal = tuple(calendar_features(int(t), calendar) for t in steps)
    weekend = np.array([1.0 if f.is_weekend else 0.0 for f in cal])
    scale = np.where(weekend > 0, config.weekend_factor, 1.0)
    consumption = scale * (
        config.consumption_base
        + config.consumption_peak_amplitude * _double_peak_profile(hod.astype(float))
    )
    consumption = consumption + config.consumption_noise_std * rng.standard_normal(n)
    consumption = np.maximum(consumption, 0.0)

    residual = consumption - production
    dayahead = (
        config.price_base
        + config.price_slope * residual
        + config.price_noise_std * rng.standard_normal(n)
    )
    # Imbalance penalises the system-short direction and rewards nobody.
    imbalance = dayahead + np.where(residual >= 0, 1.0, -1.0) * config.imbalance_spread

    return Scenario(
        production=HourlySeries(0, production, Unit.KWH_PER_H),
        baseline_consumption=HourlySeries(0, consumption, Unit.KWH_PER_H),
        dayahead_price=HourlySeries(0, dayahead, Unit.EUR_PER_MWH),
        imbalance_price=HourlySeries(0, imbalance, Unit.EUR_PER_MWH),
        calendar=cal,
    )


def save_csv(scenario: Scenario, path: str | Path) -> None:
    """Write the scenario in the one-row-per-hour CSV schema."""
    feature_names = sorted(scenario.features)
    header = list(REQUIRED_COLUMNS) + [FEATURE_PREFIX + name for name in feature_names]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(len(scenario.production)):
            row = [
                i,
                repr(float(scenario.production.values[i])),
                repr(float(scenario.baseline_consumption.values[i])),
                repr(float(scenario.dayahead_price.values[i])),
                repr(float(scenario.imbalance_price.values[i])),
            ]
            row += [repr(float(scenario.features[name].values[i])) for name in feature_names]
            writer.writerow(row)


def _parse_cell(raw: str, column: str, row: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ScenarioCsvError(f"non-numeric value {raw!r} in column '{column}' at row {row}")
    if math.isnan(value):
        raise ScenarioCsvError(f"NaN in column '{column}' at row {row}")
    if math.isinf(value):
        raise ScenarioCsvError(f"non-finite value in column '{column}' at row {row}")
    return value


def load_csv(path: str | Path, calendar: CalendarConfig = CalendarConfig()) -> Scenario:
    """Read a scenario CSV, rejecting schema violations with named errors.

    Row numbers in error messages are 0-based data rows (the header does
    not count).
    """
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ScenarioCsvError("empty file: header row required")
        rows = list(reader)

    for column in REQUIRED_COLUMNS:
        if column not in header:
            raise ScenarioCsvError(f"missing column '{column}'")
    for column in header:
        if column not in REQUIRED_COLUMNS and not column.startswith(FEATURE_PREFIX):
            raise ScenarioCsvError(f"unknown column '{column}'")
    if len(set(header)) != len(header):
        raise ScenarioCsvError("duplicate column in header")

    if len(rows) % HOURS_PER_DAY != 0 or not rows:
        raise ScenarioCsvError(f"horizon not multiple of 24: {len(rows)} rows")

    index = {name: header.index(name) for name in header}
    columns: dict[str, list[float]] = {name: [] for name in header if name != "t"}
    for row_number, row in enumerate(rows):
        if len(row) != len(header):
            raise ScenarioCsvError(
                f"row {row_number} has {len(row)} cells, expected {len(header)}"
            )
        t_value = _parse_cell(row[index["t"]], "t", row_number)
        if t_value != row_number:
            raise ScenarioCsvError(f"t must equal the row index: got {t_value} at row {row_number}")
        for name in columns:
            value = _parse_cell(row[index[name]], name, row_number)
            if name == "production_kwh" and value < 0:
                raise ScenarioCsvError(f"negative production_kwh at row {row_number}")
            if name == "baseline_consumption_kwh" and value < 0:
                raise ScenarioCsvError(f"negative baseline_consumption_kwh at row {row_number}")
            columns[name].append(value)

    n = len(rows)
    cal = tuple(calendar_features(t, calendar) for t in range(n))
    features = {
        name[len(FEATURE_PREFIX) :]: HourlySeries(0, np.array(columns[name]))
        for name in columns
        if name.startswith(FEATURE_PREFIX)
    }
    return Scenario(
        production=HourlySeries(0, np.array(columns["production_kwh"]), Unit.KWH_PER_H),
        baseline_consumption=HourlySeries(
            0, np.array(columns["baseline_consumption_kwh"]), Unit.KWH_PER_H
        ),
        dayahead_price=HourlySeries(
            0, np.array(columns["dayahead_price_eur_mwh"]), Unit.EUR_PER_MWH
        ),
        imbalance_price=HourlySeries(
            0, np.array(columns["imbalance_price_eur_mwh"]), Unit.EUR_PER_MWH
        ),
        calendar=cal,
        features=features,
    )
