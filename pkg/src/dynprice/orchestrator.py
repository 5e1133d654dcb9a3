"""End-to-end daily decision loop over one scenario.

For every delivery day, in order: forecast production, consumption and
market price for the 24 delivery hours; hand the policy its input bundle
(forecasts, price history, demand model, calendar, tariff, costs); apply
the announced signal to the forecast consumption to get the predicted
response, and to the true baseline consumption to get the realized one;
then settle all cash flows over the stitched horizon and score the run
against the no-dynamic-pricing baseline.

The policy never sees the scenario, only its forecast view, so a run
cannot leak realized information into pricing decisions. Realized demand
response uses the same model as the prediction unless a mismatch model is
configured explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .demand import DemandResponseModel, PriceSignal, respond
from .evaluate import BaselineOutcome, BaselineTariff, EvaluationReport, baseline_run, indicators
from .forecast import ForecasterConfig, forecast_set
from .policy import PolicyConfig, PolicyInput, decide
from .scenario import Scenario
from .settlement import CostModel, SettlementLedger, bill, check_constraints, deviation, revenue
from .timeline import HOURS_PER_DAY, CalendarConfig, Horizon, decision_schedule


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to run the decision loop on a scenario."""

    horizon: Horizon
    production_forecaster: ForecasterConfig = ForecasterConfig()
    consumption_forecaster: ForecasterConfig = ForecasterConfig()
    price_forecaster: ForecasterConfig = ForecasterConfig()
    dr_model: DemandResponseModel | None = None
    realized_dr_model: DemandResponseModel | None = None
    policy: PolicyConfig = PolicyConfig()
    tariff: BaselineTariff = BaselineTariff()
    cost_model: CostModel = CostModel()
    calendar: CalendarConfig = CalendarConfig()

    def __post_init__(self) -> None:
        if self.dr_model is None:
            raise ValueError("a demand response model is required")


@dataclass(frozen=True, eq=False)
class RunResult:
    """Stitched trajectories, ledger and evaluation of one run."""

    signals: tuple[PriceSignal, ...]
    prices: np.ndarray
    predicted_consumption: np.ndarray
    realized_consumption: np.ndarray
    production_forecast: np.ndarray
    consumption_forecast: np.ndarray
    price_forecast: np.ndarray
    ledger: SettlementLedger
    deviation_kwh: float
    bill_eur: float
    baseline: BaselineOutcome
    report: EvaluationReport

    @property
    def revenue_eur(self) -> float:
        return self.ledger.total_revenue_eur

    @property
    def horizon_hours(self) -> int:
        return len(self.prices)


def _day_reference_tariff(tariff: BaselineTariff, price_forecast_means: np.ndarray) -> np.ndarray:
    """What consumers would pay without dynamic pricing, seen from decision time.

    Keeps the demand model free of realized market prices: the reference
    is built from forecast means, so with an indexed tariff the consumers'
    anchor is the best decision-time estimate of their usual price.
    """
    reference = tariff.prices(price_forecast_means)
    if (reference <= 0).any():
        raise ValueError(
            "tariff produces a non-positive reference price; demand response is undefined"
        )
    return reference


def run(config: RunConfig, scenario: Scenario) -> RunResult:
    """Run the daily pricing loop over the whole scenario horizon."""
    if scenario.horizon != config.horizon:
        raise ValueError(
            f"scenario horizon {scenario.horizon.steps} h != config horizon {config.horizon.steps} h"
        )
    steps = config.horizon.steps
    prices = np.zeros(steps)
    predicted = np.zeros(steps)
    realized = np.zeros(steps)
    pf = np.zeros(steps)
    cf = np.zeros(steps)
    lf = np.zeros(steps)
    signals: list[PriceSignal] = []

    realized_model = config.realized_dr_model or config.dr_model

    for event in decision_schedule(config.horizon):
        day = event.delivery_day_index
        try:
            fs = forecast_set(
                scenario,
                event,
                production=config.production_forecaster,
                consumption=config.consumption_forecaster,
                price=config.price_forecaster,
            )
            day_reference = _day_reference_tariff(config.tariff, fs.means("price"))
            calendar_day = scenario.calendar_day(day)
            prediction_model = config.dr_model.with_reference(day_reference)
            policy_input = PolicyInput(
                forecasts=fs,
                price_history=tuple(signals),
                dr_model=prediction_model,
                calendar=calendar_day,
                tariff=config.tariff,
                cost_model=config.cost_model,
            )
            signal = decide(config.policy, policy_input)
            predicted_day = respond(
                prediction_model, fs.means("consumption"), signal, calendar_day
            ).values
            truth_model = realized_model.with_reference(day_reference)
            realized_day = respond(
                truth_model,
                scenario.baseline_consumption.window(event.delivery_start.t, HOURS_PER_DAY),
                signal,
                calendar_day,
            ).values
        except Exception as exc:
            exc.args = (f"day {day} (decision at hour {event.decision_time.t}): {exc}",)
            raise

        sl = slice(event.delivery_start.t, event.delivery_start.t + HOURS_PER_DAY)
        prices[sl] = signal.prices
        predicted[sl] = predicted_day
        realized[sl] = realized_day
        pf[sl] = fs.means("production")
        cf[sl] = fs.means("consumption")
        lf[sl] = fs.means("price")
        signals.append(signal)

    ledger = revenue(scenario, realized, predicted, pf, prices)
    total_deviation = deviation(scenario.production, realized)
    total_bill = bill(realized, prices)
    baseline = baseline_run(scenario, config.tariff, cf, pf)
    status = check_constraints(
        total_bill,
        baseline.bill_eur,
        ledger.total_revenue_eur,
        config.cost_model,
        config.horizon,
        consumed_kwh=float(realized.sum()),
    )
    report = indicators(
        total_deviation,
        total_bill,
        ledger.total_revenue_eur,
        steps,
        baseline,
        producer_ok=status.producer_ok,
    )
    return RunResult(
        signals=tuple(signals),
        prices=prices,
        predicted_consumption=predicted,
        realized_consumption=realized,
        production_forecast=pf,
        consumption_forecast=cf,
        price_forecast=lf,
        ledger=ledger,
        deviation_kwh=total_deviation,
        bill_eur=total_bill,
        baseline=baseline,
        report=report,
    )
