"""Simulation and policy optimization for dynamic electricity pricing.

A producer/retailer with intermittent renewable production announces
hourly consumer prices one day ahead, trades its predicted mismatch on
the day-ahead market, and settles the rest at the imbalance price. This
package simulates that loop hour by hour: synthetic or CSV scenarios,
distributional forecasts, a price-elastic load-shifting demand model,
constrained price optimization, settlement, and scoring against the
no-dynamic-pricing baseline.
"""

from .demand import (
    DemandResponseModel,
    PriceSignal,
    RespondedLoad,
    aggregate_elasticity,
    respond,
    uniform_kernel,
)
from .evaluate import BaselineOutcome, BaselineTariff, EvaluationReport, baseline_run, indicators
from .forecast import Forecast, ForecasterConfig, ForecastSet, forecast, forecast_set, sample
from .orchestrator import RunConfig, RunResult, run
from .policy import PolicyConfig, PolicyInput, PredictedOutcome, decide, predicted_objective
from .scenario import (
    GeneratorConfig,
    HourlySeries,
    Scenario,
    ScenarioCsvError,
    Unit,
    generate,
    load_csv,
    save_csv,
)
from .settlement import (
    ConstraintStatus,
    CostModel,
    SettlementLedger,
    bill,
    check_constraints,
    deviation,
    revenue,
)
from .timeline import (
    CalendarConfig,
    CalendarFeatures,
    DecisionEvent,
    Horizon,
    Season,
    TimeStep,
    calendar_features,
    decision_schedule,
    decision_time_for,
)

__all__ = [
    "BaselineOutcome",
    "BaselineTariff",
    "CalendarConfig",
    "CalendarFeatures",
    "ConstraintStatus",
    "CostModel",
    "DecisionEvent",
    "DemandResponseModel",
    "EvaluationReport",
    "Forecast",
    "ForecastSet",
    "ForecasterConfig",
    "GeneratorConfig",
    "Horizon",
    "HourlySeries",
    "PolicyConfig",
    "PolicyInput",
    "PredictedOutcome",
    "PriceSignal",
    "RespondedLoad",
    "RunConfig",
    "RunResult",
    "Scenario",
    "ScenarioCsvError",
    "Season",
    "SettlementLedger",
    "TimeStep",
    "Unit",
    "aggregate_elasticity",
    "baseline_run",
    "bill",
    "calendar_features",
    "check_constraints",
    "decide",
    "decision_schedule",
    "decision_time_for",
    "deviation",
    "forecast",
    "forecast_set",
    "generate",
    "indicators",
    "load_csv",
    "predicted_objective",
    "respond",
    "revenue",
    "run",
    "sample",
    "save_csv",
    "uniform_kernel",
]

__version__ = "0.1.0"
