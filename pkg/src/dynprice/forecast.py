"""Day-ahead forecasting of production, consumption and market price.

Two interchangeable forecasters are bundled: a noisy oracle whose error
level is a single knob (gamma = 0 gives perfect foresight) and a
same-hour-yesterday persistence baseline. Both return a Gaussian mean and
standard deviation per delivery hour, so policies can reason about
uncertainty and sample full trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Scenario
from .timeline import HOURS_PER_DAY, MAX_LAG_HOURS, MIN_LAG_HOURS, DecisionEvent, TimeStep

TARGETS = ("production", "consumption", "price")
METHODS = ("noisy_oracle", "persistence")

_TARGET_CODE = {name: i + 1 for i, name in enumerate(TARGETS)}
# Targets measured in power are clipped at zero and get relative noise.
_RELATIVE_NOISE = {"production": True, "consumption": True, "price": False}


@dataclass(frozen=True)
class Forecast:
    """Predictive distribution for one delivery hour."""

    delivery: TimeStep
    mean: float
    std: float

    def __post_init__(self) -> None:
        if self.std < 0:
            raise ValueError("forecast std must be >= 0")


@dataclass(frozen=True)
class ForecastSet:
    """The three per-hour forecast lists issued at one decision time."""

    issued_at: TimeStep
    production: tuple[Forecast, ...]
    consumption: tuple[Forecast, ...]
    price: tuple[Forecast, ...]

    def __post_init__(self) -> None:
        lists = {"production": self.production, "consumption": self.consumption, "price": self.price}
        n = len(self.production)
        if n < 1:
            raise ValueError("forecast set needs at least one hour")
        first = self.production[0].delivery.t
        for name, items in lists.items():
            items = tuple(items)
            object.__setattr__(self, name, items)
            if len(items) != n:
                raise ValueError(f"{name} forecast count {len(items)} != {n}")
            for i, f in enumerate(items):
                if f.delivery.t != first + i:
                    raise ValueError(f"{name} forecasts must cover consecutive hours")
        lag_first = first - self.issued_at.t
        lag_last = first + n - 1 - self.issued_at.t
        if lag_first < MIN_LAG_HOURS or lag_last > MAX_LAG_HOURS:
            raise ValueError(
                f"delivery lags [{lag_first}, {lag_last}] outside [{MIN_LAG_HOURS}, {MAX_LAG_HOURS}]"
            )

    def __len__(self) -> int:
        return len(self.production)

    @property
    def delivery_start(self) -> TimeStep:
        return self.production[0].delivery

    def means(self, target: str) -> np.ndarray:
        return np.array([f.mean for f in self._items(target)])

    def stds(self, target: str) -> np.ndarray:
        return np.array([f.std for f in self._items(target)])

    def _items(self, target: str) -> tuple[Forecast, ...]:
        if target not in TARGETS:
            raise ValueError(f"unknown forecast target {target!r}")
        return getattr(self, target)


@dataclass(frozen=True)
class ForecasterConfig:
    """Parameters of one bundled forecaster.

    ``gamma`` scales the noisy oracle's error (relative for power targets,
    absolute in EUR/MWh for the price). ``day0_profile`` supplies the
    persistence forecaster's 24 fallback values for the first delivery
    day, which has no previous day to persist from; it defaults to zeros.
    """

    kind: str = "noisy_oracle"
    gamma: float = 0.0
    persistence_std: float = 0.0
    seed: int = 0
    day0_profile: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in METHODS:
            raise ValueError(f"unknown forecaster kind {self.kind!r}")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.persistence_std < 0:
            raise ValueError("persistence_std must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if self.day0_profile is not None:
            profile = tuple(float(v) for v in self.day0_profile)
            if len(profile) != HOURS_PER_DAY:
                raise ValueError("day0_profile needs exactly 24 values")
            object.__setattr__(self, "day0_profile", profile)


def _truth_series(target: str, scenario: Scenario):
    if target == "production":
        return scenario.production
    if target == "consumption":
        return scenario.baseline_consumption
    if target == "price":
        return scenario.dayahead_price
    raise ValueError(f"unknown forecast target {target!r}")


def forecast(
    target: str,
    scenario: Scenario,
    event: DecisionEvent,
    config: ForecasterConfig,
) -> list[Forecast]:
    """Forecast all 24 delivery hours of one decision event."""
    series = _truth_series(target, scenario)
    if not series.covers(event.delivery_start.t, event.delivery_end.t):
        raise ValueError(
            f"delivery window [{event.delivery_start.t}, {event.delivery_end.t}] "
            f"outside scenario range [{series.start}, {series.end}]"
        )
    relative = _RELATIVE_NOISE[target]
    clip = relative  # power targets can never be negative
    out: list[Forecast] = []
    for t in event.delivery_hours:
        truth = series.value_at(t)
        if config.kind == "noisy_oracle":
            # One draw per (seed, target, decision, delivery): repeated calls
            # see the same noise, and different hours are independent.
            rng = np.random.default_rng(
                [config.seed, _TARGET_CODE[target], event.decision_time.t + MIN_LAG_HOURS, t]
            )
            z = rng.standard_normal()
            if relative:
                mean = truth * (1.0 + config.gamma * z)
                std = config.gamma * abs(truth)
            else:
                mean = truth + config.gamma * z
                std = config.gamma
        else:  # persistence
            previous = t - HOURS_PER_DAY
            if previous >= series.start:
                mean = series.value_at(previous)
            elif config.day0_profile is not None:
                mean = config.day0_profile[t % HOURS_PER_DAY]
            else:
                mean = 0.0
            std = config.persistence_std
        if clip:
            mean = max(mean, 0.0)
        out.append(Forecast(delivery=TimeStep(t), mean=float(mean), std=float(std)))
    return out


def forecast_set(
    scenario: Scenario,
    event: DecisionEvent,
    production: ForecasterConfig,
    consumption: ForecasterConfig,
    price: ForecasterConfig,
) -> ForecastSet:
    return ForecastSet(
        issued_at=event.decision_time,
        production=tuple(forecast("production", scenario, event, production)),
        consumption=tuple(forecast("consumption", scenario, event, consumption)),
        price=tuple(forecast("price", scenario, event, price)),
    )


@dataclass(frozen=True, eq=False)
class TrajectorySamples:
    """Monte-Carlo draws from a forecast set, one row per trajectory."""

    production: np.ndarray
    consumption: np.ndarray
    price: np.ndarray

    @property
    def count(self) -> int:
        return self.production.shape[0]


def sample(fs: ForecastSet, n: int, seed: int = 0) -> TrajectorySamples:
    """Draw ``n`` independent trajectories from the forecast distributions.

    Production and consumption draws are clipped at zero; price draws are
    not. Deterministic for a fixed seed.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    if seed < 0:
        raise ValueError("seed must be >= 0")
    rng = np.random.default_rng([seed, fs.issued_at.t + MIN_LAG_HOURS, len(fs)])
    out = {}
    for target in TARGETS:
        means = fs.means(target)
        stds = fs.stds(target)
        draws = means[None, :] + stds[None, :] * rng.standard_normal((n, len(fs)))
        if _RELATIVE_NOISE[target]:
            draws = np.maximum(draws, 0.0)
        out[target] = draws
    return TrajectorySamples(
        production=out["production"], consumption=out["consumption"], price=out["price"]
    )
