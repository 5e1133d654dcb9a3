"""Deviation, bills, revenue and the two profitability/benefit constraints.

Money amounts are in EUR; energy is metered in kWh/h against prices in
EUR/MWh, so every price-times-energy product applies a factor of 1e-3.

The revenue ledger books three cash flows per hour: the consumer payment,
the day-ahead trade of the predicted mismatch, and the imbalance charge on
the realized production/consumption gap. A fourth informational column
books the imbalance on the residual gap left after the day-ahead trade;
with perfect forecasts and an exact demand model that residual is zero,
which is exactly the sense in which the portfolio is fully secured in the
day-ahead market.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .scenario import HourlySeries, Scenario
from .timeline import Horizon

KWH_PER_MWH = 1000.0
MWH_PER_KWH = 1.0 / KWH_PER_MWH  # kWh x EUR/MWh -> EUR


@dataclass(frozen=True)
class CostModel:
    """Producer/retailer costs: fixed EUR/h plus marginal EUR/MWh.

    The marginal cost defaults to zero, matching a portfolio of wind and
    solar assets, but stays configurable so the assumption can be tested.
    """

    fixed_cost_per_hour: float = 0.0
    marginal_cost: float = 0.0

    def __post_init__(self) -> None:
        if self.fixed_cost_per_hour < 0 or self.marginal_cost < 0:
            raise ValueError("costs must be >= 0")

    def floor_eur(self, hours: int, consumed_kwh: float = 0.0) -> float:
        """Total cost over ``hours`` hours; revenue at or above it is profitable."""
        return self.fixed_cost_per_hour * hours + self.marginal_cost * consumed_kwh * MWH_PER_KWH


def _values(series: HourlySeries | Sequence[float] | np.ndarray) -> tuple[np.ndarray, int | None]:
    if isinstance(series, HourlySeries):
        return series.values, series.start
    return np.asarray(series, dtype=float), None


def _aligned(*series) -> list[np.ndarray]:
    arrays, starts = [], []
    for s in series:
        arr, start = _values(s)
        arrays.append(arr)
        starts.append(start)
    lengths = {len(a) for a in arrays}
    if len(lengths) != 1:
        raise ValueError(f"misaligned series: lengths {sorted(len(a) for a in arrays)}")
    anchored = {s for s in starts if s is not None}
    if len(anchored) > 1:
        raise ValueError(f"misaligned series: starts {sorted(anchored)}")
    return arrays


def deviation(production, consumption) -> float:
    """Total absolute supply/demand gap in kWh; zero only for a perfect match."""
    p, c = _aligned(production, consumption)
    return float(np.abs(p - c).sum())


def bill(consumption, prices) -> float:
    """What the consumers pay in EUR for the given consumption and prices."""
    c, y = _aligned(consumption, prices)
    return float((c * y).sum() * MWH_PER_KWH)


@dataclass(frozen=True, eq=False)
class SettlementLedger:
    """Per-hour cash flows in EUR; totals reconcile to the revenue."""

    consumer_payment: np.ndarray
    dayahead_cashflow: np.ndarray
    imbalance_cashflow: np.ndarray
    residual_imbalance_cashflow: np.ndarray

    @property
    def hours(self) -> int:
        return len(self.consumer_payment)

    @property
    def total_revenue_eur(self) -> float:
        return float(
            self.consumer_payment.sum()
            + self.dayahead_cashflow.sum()
            + self.imbalance_cashflow.sum()
        )

    @property
    def total_revenue_residual_eur(self) -> float:
        """Revenue under residual-imbalance accounting (informational)."""
        return float(
            self.consumer_payment.sum()
            + self.dayahead_cashflow.sum()
            + self.residual_imbalance_cashflow.sum()
        )

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "consumer_payment", "dayahead_cashflow", "imbalance_cashflow"])
            for t in range(self.hours):
                writer.writerow(
                    [
                        t,
                        repr(float(self.consumer_payment[t])),
                        repr(float(self.dayahead_cashflow[t])),
                        repr(float(self.imbalance_cashflow[t])),
                    ]
                )


def revenue(
    scenario: Scenario,
    realized_consumption,
    predicted_consumption,
    production_forecast,
    prices,
) -> SettlementLedger:
    """Book all hourly cash flows of the producer/retailer.

    ``realized_consumption`` is what the consumers actually drew,
    ``predicted_consumption`` the demand-response prediction the day-ahead
    trade was based on, ``production_forecast`` the production means from
    decision time, and ``prices`` the dynamic consumer prices.
    """
    c, cp, pf, y = _aligned(
        realized_consumption, predicted_consumption, production_forecast, prices
    )
    p, lam, imb = _aligned(
        scenario.production, scenario.dayahead_price, scenario.imbalance_price
    )
    if len(p) != len(c):
        raise ValueError(f"misaligned series: scenario has {len(p)} hours, inputs {len(c)}")
    consumer = c * y * MWH_PER_KWH
    dayahead = -(cp - pf) * lam * MWH_PER_KWH
    imbalance = -(c - p) * imb * MWH_PER_KWH
    residual = -((c - p) - (cp - pf)) * imb * MWH_PER_KWH
    return SettlementLedger(
        consumer_payment=consumer,
        dayahead_cashflow=dayahead,
        imbalance_cashflow=imbalance,
        residual_imbalance_cashflow=residual,
    )


@dataclass(frozen=True)
class ConstraintStatus:
    consumer_ok: bool
    producer_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.consumer_ok and self.producer_ok


def check_constraints(
    bill_eur: float,
    baseline_bill_eur: float,
    revenue_eur: float,
    cost_model: CostModel,
    horizon: Horizon | int,
    consumed_kwh: float = 0.0,
) -> ConstraintStatus:
    """Benefit-the-consumer and stay-profitable checks, boundaries included.

    The consumer side holds when the dynamic bill does not exceed the
    bill without dynamic pricing; the producer side when revenue covers
    fixed costs over the horizon plus any marginal cost of the energy
    actually consumed.
    """
    hours = horizon.steps if isinstance(horizon, Horizon) else int(horizon)
    return ConstraintStatus(
        consumer_ok=bool(bill_eur <= baseline_bill_eur),
        producer_ok=bool(revenue_eur >= cost_model.floor_eur(hours, consumed_kwh)),
    )
