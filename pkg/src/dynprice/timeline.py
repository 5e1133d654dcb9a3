"""Hourly time discretisation and the day-ahead decision schedule.

Everything runs on integer hour steps ``t``. Consumer prices for one
calendar day are fixed in a single decision taken at hour 12 of the
previous day, so every delivery hour is priced 12 to 35 hours ahead of
time. Negative steps address the bootstrap decision for day 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

HOURS_PER_DAY = 24
MIN_LAG_HOURS = 12
MAX_LAG_HOURS = 35

# Season boundaries as day-of-year in a 365-day year (Mar 1 / Jun 1 / Sep 1 / Dec 1).
_SPRING_START = 59
_SUMMER_START = 151
_AUTUMN_START = 243
_WINTER_START = 334


class Season(str, Enum):
    WINTER = "winter"
    SPRING = "spring"
    SUMMER = "summer"
    AUTUMN = "autumn"


@dataclass(frozen=True, order=True)
class TimeStep:
    """Global hour index; hour 0 is 00:00 of day 0."""

    t: int

    @property
    def hour_of_day(self) -> int:
        # Python's % is a floor modulo, so this is correct for negative t too.
        return self.t % HOURS_PER_DAY

    @property
    def day_index(self) -> int:
        return self.t // HOURS_PER_DAY


def _as_step(t: int | TimeStep) -> int:
    return t.t if isinstance(t, TimeStep) else int(t)


@dataclass(frozen=True)
class DecisionEvent:
    """One daily pricing decision and the 24 delivery hours it covers."""

    decision_time: TimeStep

    def __post_init__(self) -> None:
        tau = self.decision_time.t
        if (tau + MIN_LAG_HOURS) % HOURS_PER_DAY != 0:
            raise ValueError(
                f"decision time {tau} is not a valid daily decision hour: "
                f"({tau} + {MIN_LAG_HOURS}) % {HOURS_PER_DAY} != 0"
            )

    @property
    def delivery_start(self) -> TimeStep:
        return TimeStep(self.decision_time.t + MIN_LAG_HOURS)

    @property
    def delivery_end(self) -> TimeStep:
        """Last delivery hour (inclusive)."""
        return TimeStep(self.decision_time.t + MAX_LAG_HOURS)

    @property
    def delivery_hours(self) -> range:
        return range(self.delivery_start.t, self.delivery_end.t + 1)

    @property
    def delivery_day_index(self) -> int:
        return self.delivery_start.day_index

    def covers(self, t: int | TimeStep) -> bool:
        return self.delivery_start.t <= _as_step(t) <= self.delivery_end.t


@dataclass(frozen=True)
class Horizon:
    """Simulation length in hourly steps; whole days only."""

    steps: int

    def __post_init__(self) -> None:
        if self.steps <= 0 or self.steps % HOURS_PER_DAY != 0:
            raise ValueError(f"horizon not multiple of 24: {self.steps} steps")

    @property
    def days(self) -> int:
        return self.steps // HOURS_PER_DAY


@dataclass(frozen=True)
class CalendarConfig:
    """Mapping from day indices to weekday, holiday and season labels.

    ``start_weekday`` is the weekday of day 0 (0 = Monday) and
    ``start_day_of_year`` its position in a 365-day year (0 = Jan 1).
    ``holidays`` lists day indices.
    """

    start_weekday: int = 0
    start_day_of_year: int = 0
    holidays: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if not 0 <= self.start_weekday <= 6:
            raise ValueError(f"start_weekday must be in [0, 6], got {self.start_weekday}")
        if not 0 <= self.start_day_of_year < 365:
            raise ValueError(f"start_day_of_year must be in [0, 364], got {self.start_day_of_year}")
        object.__setattr__(self, "holidays", frozenset(self.holidays))


@dataclass(frozen=True)
class CalendarFeatures:
    hour_of_day: int
    is_weekend: bool
    is_holiday: bool
    season: Season


def season_of_day_of_year(day_of_year: int) -> Season:
    d = day_of_year % 365
    if d < _SPRING_START or d >= _WINTER_START:
        return Season.WINTER
    if d < _SUMMER_START:
        return Season.SPRING
    if d < _AUTUMN_START:
        return Season.SUMMER
    return Season.AUTUMN


def calendar_features(t: int | TimeStep, config: CalendarConfig = CalendarConfig()) -> CalendarFeatures:
    """Deterministic calendar labels for one hour step."""
    step = TimeStep(_as_step(t))
    day = step.day_index
    weekday = (config.start_weekday + day) % 7
    return CalendarFeatures(
        hour_of_day=step.hour_of_day,
        is_weekend=weekday >= 5,
        is_holiday=day in config.holidays,
        season=season_of_day_of_year(config.start_day_of_year + day),
    )


def decision_time_for(t: int | TimeStep) -> TimeStep:
    """Hour at which the price for delivery hour ``t`` is decided.

    The lag between decision and delivery is always 12 to 35 hours.
    """
    step = _as_step(t)
    return TimeStep(step - (MIN_LAG_HOURS + step % HOURS_PER_DAY))


def decision_schedule(horizon: Horizon | int) -> list[DecisionEvent]:
    """One decision event per delivery day; the windows tile [0, steps-1]."""
    if not isinstance(horizon, Horizon):
        horizon = Horizon(int(horizon))
    return [
        DecisionEvent(TimeStep(day * HOURS_PER_DAY - MIN_LAG_HOURS))
        for day in range(horizon.days)
    ]
