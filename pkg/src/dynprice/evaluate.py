"""Scoring a run against the no-dynamic-pricing counterfactual.

The baseline world bills the uninfluenced consumption at a tariff indexed
on the realized day-ahead price (alpha * price + beta; alpha = 0 is a
fixed tariff). Three percentage indicators compare the dynamic run to it:
synchronisation gain S, consumer bill saving B, and retailer revenue gain
R. Perfect supply/demand matching gives S = 100; an unchanged bill or
revenue gives B = 0 or R = 0.

Percentages are meaningless against a zero or negative denominator, so
each indicator carries a degeneracy flag; when flagged, the indicator is
None and the signed absolute gain (available as a property and derivable
from the report totals) is the meaningful number.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .scenario import Scenario
from .settlement import ConstraintStatus, bill, deviation, MWH_PER_KWH


FLAG_S = "s_denominator_nonpositive"
FLAG_B = "b_denominator_nonpositive"
FLAG_R = "r_denominator_nonpositive"


@dataclass(frozen=True)
class BaselineTariff:
    """Consumer price without dynamic pricing: alpha * dayahead + beta."""

    alpha: float = 0.0
    beta: float = 80.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise ValueError("tariff parameters must be finite")

    def prices(self, dayahead: np.ndarray) -> np.ndarray:
        return self.alpha * np.asarray(dayahead, dtype=float) + self.beta


@dataclass(frozen=True)
class BaselineOutcome:
    """Deviation, bill and revenue of the world without dynamic pricing."""

    horizon_hours: int
    deviation_kwh: float
    bill_eur: float
    revenue_eur: float


def baseline_run(
    scenario: Scenario,
    tariff: BaselineTariff,
    consumption_forecast: np.ndarray,
    production_forecast: np.ndarray,
) -> BaselineOutcome:
    """Settle the counterfactual where consumers never see a price signal.

    The baseline retailer still trades its forecast mismatch day-ahead, so
    pass the same forecast means the dynamic run used; the indicators then
    isolate the pricing policy's effect rather than forecast skill.
    """
    p = scenario.production.values
    c = scenario.baseline_consumption.values
    lam = scenario.dayahead_price.values
    imb = scenario.imbalance_price.values
    cf = np.asarray(consumption_forecast, dtype=float)
    pf = np.asarray(production_forecast, dtype=float)
    if len(cf) != len(c) or len(pf) != len(c):
        raise ValueError("forecast arrays must cover the whole horizon")
    tariff_prices = tariff.prices(lam)
    # Summed column by column, mirroring the ledger, so identical worlds
    # produce bit-identical revenues.
    rev = float(
        (c * tariff_prices * MWH_PER_KWH).sum()
        + (-(cf - pf) * lam * MWH_PER_KWH).sum()
        + (-(c - p) * imb * MWH_PER_KWH).sum()
    )
    return BaselineOutcome(
        horizon_hours=len(c),
        deviation_kwh=deviation(p, c),
        bill_eur=bill(c, tariff_prices),
        revenue_eur=rev,
    )


@dataclass(frozen=True)
class EvaluationReport:
    deviation_kwh: float
    deviation_baseline_kwh: float
    bill_eur: float
    bill_baseline_eur: float
    revenue_eur: float
    revenue_baseline_eur: float
    indicator_s_pct: float | None
    indicator_b_pct: float | None
    indicator_r_pct: float | None
    consumer_ok: bool
    producer_ok: bool
    flags: tuple[str, ...]

    @property
    def synchronisation_gain_kwh(self) -> float:
        return self.deviation_baseline_kwh - self.deviation_kwh

    @property
    def bill_saving_eur(self) -> float:
        return self.bill_baseline_eur - self.bill_eur

    @property
    def revenue_gain_eur(self) -> float:
        return self.revenue_eur - self.revenue_baseline_eur

    def to_json_dict(self) -> dict:
        return {
            "deviation_kwh": self.deviation_kwh,
            "deviation_baseline_kwh": self.deviation_baseline_kwh,
            "bill_eur": self.bill_eur,
            "bill_baseline_eur": self.bill_baseline_eur,
            "revenue_eur": self.revenue_eur,
            "revenue_baseline_eur": self.revenue_baseline_eur,
            "indicator_s_pct": self.indicator_s_pct,
            "indicator_b_pct": self.indicator_b_pct,
            "indicator_r_pct": self.indicator_r_pct,
            "consumer_ok": self.consumer_ok,
            "producer_ok": self.producer_ok,
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def indicators(
    deviation_kwh: float,
    bill_eur: float,
    revenue_eur: float,
    horizon_hours: int,
    baseline: BaselineOutcome,
    producer_ok: bool,
) -> EvaluationReport:
    """Build the evaluation report from run totals and the baseline."""
    if horizon_hours != baseline.horizon_hours:
        raise ValueError(
            f"mismatched horizons: run {horizon_hours} h, baseline {baseline.horizon_hours} h"
        )
    flags: list[str] = []

    if baseline.deviation_kwh > 0:
        s = 100.0 * (baseline.deviation_kwh - deviation_kwh) / baseline.deviation_kwh
    else:
        s = None
        flags.append(FLAG_S)

    if baseline.bill_eur > 0:
        b = 100.0 * (baseline.bill_eur - bill_eur) / baseline.bill_eur
    else:
        b = None
        flags.append(FLAG_B)

    if baseline.revenue_eur > 0:
        r = 100.0 * (revenue_eur - baseline.revenue_eur) / baseline.revenue_eur
    else:
        r = None
        flags.append(FLAG_R)

    return EvaluationReport(
        deviation_kwh=deviation_kwh,
        deviation_baseline_kwh=baseline.deviation_kwh,
        bill_eur=bill_eur,
        bill_baseline_eur=baseline.bill_eur,
        revenue_eur=revenue_eur,
        revenue_baseline_eur=baseline.revenue_eur,
        indicator_s_pct=s,
        indicator_b_pct=b,
        indicator_r_pct=r,
        consumer_ok=bool(bill_eur <= baseline.bill_eur),
        producer_ok=bool(producer_ok),
        flags=tuple(flags),
    )


def status_from_report(report: EvaluationReport) -> ConstraintStatus:
    return ConstraintStatus(consumer_ok=report.consumer_ok, producer_ok=report.producer_ok)
