"""Bundled default configuration: a solar-heavy portfolio facing a
double-peak residential load, perfect forecasts, pure-shifting demand
response and the grid optimizer policy.

These defaults are what the CLI uses when a config file leaves keys out,
and what the acceptance suite runs against.
"""

from __future__ import annotations

import numpy as np

from .demand import DemandResponseModel, uniform_kernel
from .evaluate import BaselineTariff
from .forecast import ForecasterConfig
from .orchestrator import RunConfig
from .policy import PolicyConfig
from .scenario import GeneratorConfig
from .settlement import CostModel
from .timeline import HOURS_PER_DAY, CalendarConfig, Horizon

DEFAULT_ELASTICITY_SCALE = 0.3
DEFAULT_KERNEL_HALFWIDTH = 3
DEFAULT_RECOVERY_FRACTION = 1.0
DEFAULT_TARIFF_BETA = 80.0


def default_generator_config(seed: int = 0) -> GeneratorConfig:
    return GeneratorConfig(seed=seed)


def default_demand_model(
    elasticity_scale: float = DEFAULT_ELASTICITY_SCALE,
    kernel_halfwidth: int = DEFAULT_KERNEL_HALFWIDTH,
    recovery_fraction: float = DEFAULT_RECOVERY_FRACTION,
    reference_price: float = DEFAULT_TARIFF_BETA,
) -> DemandResponseModel:
    """Uniform hourly elasticity of ``-elasticity_scale`` with a flat kernel."""
    return DemandResponseModel(
        elasticity=np.full(HOURS_PER_DAY, -float(elasticity_scale)),
        kernel_halfwidth=kernel_halfwidth,
        kernel_weights=uniform_kernel(kernel_halfwidth),
        recovery_fraction=recovery_fraction,
        reference_tariff=np.full(HOURS_PER_DAY, float(reference_price)),
    )


def default_run_config(
    days: int = 7,
    elasticity_scale: float = DEFAULT_ELASTICITY_SCALE,
    policy_kind: str = "optimizer",
    gamma: float = 0.0,
    seed: int = 0,
) -> RunConfig:
    forecaster = ForecasterConfig(kind="noisy_oracle", gamma=gamma, seed=seed)
    return RunConfig(
        horizon=Horizon(days * HOURS_PER_DAY),
        production_forecaster=forecaster,
        consumption_forecaster=forecaster,
        price_forecaster=forecaster,
        dr_model=default_demand_model(elasticity_scale=elasticity_scale),
        policy=PolicyConfig(kind=policy_kind, seed=seed),
        tariff=BaselineTariff(alpha=0.0, beta=DEFAULT_TARIFF_BETA),
        cost_model=CostModel(),
        calendar=CalendarConfig(),
    )
