"""Shared builders for small hand-checkable problem instances."""

from __future__ import annotations

import numpy as np
import pytest

from dynprice.demand import DemandResponseModel, PriceSignal, uniform_kernel
from dynprice.evaluate import BaselineTariff
from dynprice.forecast import Forecast, ForecastSet
from dynprice.policy import PolicyInput
from dynprice.settlement import CostModel
from dynprice.timeline import MIN_LAG_HOURS, TimeStep, calendar_features


def make_model(
    elasticity=-0.2,
    halfwidth=1,
    weights=None,
    recovery=1.0,
    reference=50.0,
) -> DemandResponseModel:
    eps = np.full(24, elasticity) if np.isscalar(elasticity) else np.asarray(elasticity)
    ref = np.full(24, reference) if np.isscalar(reference) else np.asarray(reference)
    w = uniform_kernel(halfwidth) if weights is None else np.asarray(weights)
    return DemandResponseModel(
        elasticity=eps,
        kernel_halfwidth=halfwidth,
        kernel_weights=w,
        recovery_fraction=recovery,
        reference_tariff=ref,
    )


def day_calendar(hours=24, start=0):
    return tuple(calendar_features(start + i) for i in range(hours))


def flat_signal(price, hours=24, start=0) -> PriceSignal:
    return PriceSignal(TimeStep(start), np.full(hours, float(price)))


def make_forecast_set(production, consumption, price, std=0.0, start=0) -> ForecastSet:
    def items(values):
        return tuple(
            Forecast(TimeStep(start + i), float(v), float(std)) for i, v in enumerate(values)
        )

    return ForecastSet(
        issued_at=TimeStep(start - MIN_LAG_HOURS),
        production=items(production),
        consumption=items(consumption),
        price=items(price),
    )


def make_policy_input(
    production,
    consumption,
    price,
    model: DemandResponseModel | None = None,
    tariff: BaselineTariff | None = None,
    cost_model: CostModel | None = None,
    std=0.0,
) -> PolicyInput:
    fs = make_forecast_set(production, consumption, price, std=std)
    return PolicyInput(
        forecasts=fs,
        price_history=(),
        dr_model=model if model is not None else make_model(),
        calendar=day_calendar(len(fs)),
        tariff=tariff if tariff is not None else BaselineTariff(0.0, 50.0),
        cost_model=cost_model if cost_model is not None else CostModel(),
    )


@pytest.fixture
def default_model() -> DemandResponseModel:
    return make_model()
