"""Consumer demand response to an hourly price signal.

The bundled model works in two stages. Stage one applies an hour-of-day
price elasticity to the deviation of the signal from a reference tariff,
giving an own-price load change per hour. Stage two shifts a configurable
fraction of each hour's change onto neighbouring hours through a
redistribution kernel, so that a price rise does not simply destroy
consumption but moves part of it earlier or later in the day. With a
recovery fraction of 1 and no clipping the day's total energy is
conserved exactly; with 0 the model is pure curtailment.

Redistribution is truncated at the day's edges: each source hour's kernel
is renormalised over its in-day targets, which keeps conservation exact
even at hour 0 and hour 23.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .timeline import HOURS_PER_DAY, CalendarFeatures, TimeStep

KERNEL_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PriceSignal:
    """Consumer prices for the hours of one delivery day, EUR/MWh."""

    day_start: TimeStep
    prices: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.prices, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("price signal needs at least one hour")
        if not np.isfinite(arr).all():
            raise ValueError("price signal must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "prices", arr)

    def __len__(self) -> int:
        return len(self.prices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PriceSignal):
            return NotImplemented
        return self.day_start == other.day_start and np.array_equal(self.prices, other.prices)


@dataclass(frozen=True, eq=False)
class DemandResponseModel:
    """Elasticity profile, shift kernel, recovery fraction, reference tariff.

    ``elasticity`` holds one value <= 0 per hour of day. ``kernel_weights``
    holds the shift weights for offsets -k..-1, +1..+k (the own hour is
    excluded); they must be non-negative and sum to 1. ``recovery_fraction``
    is the share of each hour's own-price change that reappears on
    neighbouring hours. ``reference_tariff`` is the positive per-hour-of-day
    price the consumers compare the signal against.
    """

    elasticity: np.ndarray
    kernel_halfwidth: int
    kernel_weights: np.ndarray
    recovery_fraction: float
    reference_tariff: np.ndarray

    def __post_init__(self) -> None:
        eps = np.asarray(self.elasticity, dtype=float)
        if eps.shape != (HOURS_PER_DAY,):
            raise ValueError("elasticity needs exactly 24 values")
        if (eps > 0).any():
            raise ValueError("elasticity must be <= 0 everywhere")
        k = int(self.kernel_halfwidth)
        if k < 1:
            raise ValueError("kernel halfwidth must be >= 1")
        w = np.asarray(self.kernel_weights, dtype=float)
        if w.shape != (2 * k,):
            raise ValueError(f"kernel needs {2 * k} weights for halfwidth {k}")
        if (w < 0).any():
            raise ValueError("kernel weights must be >= 0")
        if abs(w.sum() - 1.0) > KERNEL_SUM_TOL:
            raise ValueError(f"kernel weights must sum to 1, got {w.sum()!r}")
        if not 0.0 <= self.recovery_fraction <= 1.0:
            raise ValueError("recovery fraction must be in [0, 1]")
        ref = np.asarray(self.reference_tariff, dtype=float)
        if ref.shape != (HOURS_PER_DAY,):
            raise ValueError("reference tariff needs exactly 24 values")
        if not np.isfinite(ref).all() or (ref <= 0).any():
            raise ValueError("reference tariff must be positive and finite")
        for name, arr in (("elasticity", eps), ("kernel_weights", w), ("reference_tariff", ref)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "kernel_halfwidth", k)
        object.__setattr__(self, "recovery_fraction", float(self.recovery_fraction))

    @property
    def offsets(self) -> np.ndarray:
        k = self.kernel_halfwidth
        return np.concatenate([np.arange(-k, 0), np.arange(1, k + 1)])

    def with_reference(self, reference_tariff: np.ndarray) -> "DemandResponseModel":
        return replace(self, reference_tariff=np.asarray(reference_tariff, dtype=float))


def uniform_kernel(halfwidth: int) -> np.ndarray:
    """Equal shift weights over all 2k neighbouring offsets."""
    if halfwidth < 1:
        raise ValueError("kernel halfwidth must be >= 1")
    return np.full(2 * halfwidth, 1.0 / (2 * halfwidth))


@dataclass(frozen=True, eq=False)
class RespondedLoad:
    """Consumption after demand response, plus a clipping diagnostic."""

    values: np.ndarray
    clipped_hours: tuple[int, ...]

    @property
    def clipped(self) -> bool:
        return len(self.clipped_hours) > 0

    def total(self) -> float:
        return float(self.values.sum())


def shift_matrix(model: DemandResponseModel, length: int) -> np.ndarray:
    """Matrix M mapping per-hour own-price changes to shifted-in changes.

    ``M[target, source] = w[target - source] / W[source]`` where W[source]
    renormalises over the source's in-day targets. Every column sums to 1,
    so redistribution conserves energy regardless of edge truncation.
    """
    k = model.kernel_halfwidth
    weights = {int(d): w for d, w in zip(model.offsets, model.kernel_weights)}
    m = np.zeros((length, length))
    for source in range(length):
        targets = [source + d for d in weights if 0 <= source + d < length]
        total = sum(weights[t - source] for t in targets)
        if total <= 0:
            continue  # length-1 day: nowhere to shift
        for t in targets:
            m[t, source] = weights[t - source] / total
    return m


def linear_response(
    model: DemandResponseModel, hours_of_day: Sequence[int]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-position elasticity, reference tariff and combined response map.

    Returns (eps, ref, A) such that before clipping
    ``responded = forecast + A @ (forecast * eps * (prices - ref) / ref)``.
    """
    hod = np.asarray(hours_of_day, dtype=int)
    eps = model.elasticity[hod]
    ref = model.reference_tariff[hod]
    a = np.eye(len(hod)) - model.recovery_fraction * shift_matrix(model, len(hod))
    return eps, ref, a


def respond(
    model: DemandResponseModel,
    forecast_consumption: Sequence[float] | np.ndarray,
    signal: PriceSignal,
    calendar: Sequence[CalendarFeatures],
) -> RespondedLoad:
    """Map forecast consumption and a price signal to responded load."""
    cf = np.asarray(forecast_consumption, dtype=float)
    if cf.ndim != 1:
        raise ValueError("forecast consumption must be a flat series")
    if (cf < 0).any():
        raise ValueError("forecast consumption must be non-negative")
    if len(signal) != len(cf) or len(calendar) != len(cf):
        raise ValueError(
            f"misaligned inputs: {len(cf)} consumption hours, "
            f"{len(signal)} prices, {len(calendar)} calendar entries"
        )
    eps, ref, a = linear_response(model, [f.hour_of_day for f in calendar])
    own_change = cf * eps * (signal.prices - ref) / ref
    raw = cf + a @ own_change
    clipped = np.flatnonzero(raw < 0)
    return RespondedLoad(values=np.maximum(raw, 0.0), clipped_hours=tuple(int(i) for i in clipped))


def aggregate_elasticity(
    model: DemandResponseModel,
    forecast_consumption: Sequence[float] | np.ndarray,
    signal: PriceSignal,
    calendar: Sequence[CalendarFeatures],
    rel_step: float = 0.01,
) -> float:
    """Net relative load change per uniform relative price change.

    Perturbs every hour's price by ``rel_step`` times its reference tariff
    and measures the total-energy response. Pure shifting (recovery 1)
    gives 0; pure curtailment gives the consumption-weighted mean of the
    hourly elasticities.
    """
    if rel_step == 0:
        raise ValueError("perturbation must be nonzero")
    cf = np.asarray(forecast_consumption, dtype=float)
    total = cf.sum()
    if total <= 0:
        raise ValueError("forecast consumption must have positive total")
    _, ref, _ = linear_response(model, [f.hour_of_day for f in calendar])
    base = respond(model, cf, signal, calendar).total()
    bumped = PriceSignal(signal.day_start, signal.prices + rel_step * ref)
    perturbed = respond(model, cf, bumped, calendar).total()
    return ((perturbed - base) / total) / rel_step
