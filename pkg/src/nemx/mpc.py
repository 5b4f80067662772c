"""Receding-horizon consumption scheduling within one net-billing period.

A net-billing period is split into T decision periods.  At each period k
the scheduler knows the realized generation of periods 1..k-1 and a
forecast for k..T, re-solves the remaining problem in closed form, and
commits only period k's consumption.  The remaining problem pools every
not-yet-committed (period, device) pair into one two-threshold problem
whose thresholds are shifted by the already-exercised consumption, so
each step costs no more than the one-shot solve.

With exact forecasts the committed schedule reproduces the clairvoyant
one-shot optimum; with T = 1 it reduces to the single-period policy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .devices import DeviceModel
from .policy import CustomerKind, device_levels, optimal_consumption, solve_shadow_price, total_utility
from .tariffs import TariffParams, nem_payment

__all__ = [
    "BillingWindow",
    "SchedulerState",
    "ForecastProvider",
    "PerfectForecast",
    "PersistenceForecast",
    "BiasedForecast",
    "ScaledNoiseForecast",
    "mpc_step",
    "run_billing_period",
    "clairvoyant_optimum",
    "BillingResult",
]

# Forecast signature: (k, realized_history, n_ahead) -> array of length n_ahead.
ForecastProvider = Callable[[int, Sequence[float], int], np.ndarray]


@dataclass(frozen=True)
class BillingWindow:
    """T decision periods sharing one tariff; device models may vary by period."""

    tariff: TariffParams
    models: tuple[tuple[DeviceModel, ...], ...]

    def __post_init__(self) -> None:
        if len(self.models) < 1:
            raise ValueError("need at least one decision period")
        m = len(self.models[0])
        if any(len(row) != m for row in self.models):
            raise ValueError("every period must schedule the same device count")

    @property
    def periods(self) -> int:
        return len(self.models)

    @property
    def device_count(self) -> int:
        return len(self.models[0])


@dataclass
class SchedulerState:
    """Mutable progress through one billing window (single-owner)."""

    period: int = 1  # next period to decide, 1-based
    exercised_consumption: float = 0.0
    realized_der: float = 0.0
    exercised_utility: float = 0.0
    decisions: list[tuple[float, ...]] = field(default_factory=list)
    realized: list[float] = field(default_factory=list)

    def commit(self, window: BillingWindow, decision: tuple[float, ...],
               realized_r: float) -> None:
        models = window.models[self.period - 1]
        self.exercised_utility += total_utility(models, decision)
        self.exercised_consumption += float(sum(decision))
        self.realized_der += realized_r
        self.decisions.append(decision)
        self.realized.append(realized_r)
        self.period += 1


def _pool(window: BillingWindow, k: int) -> list[DeviceModel]:
    """Flatten not-yet-committed (period, device) pairs, period-major."""
    out: list[DeviceModel] = []
    for t in range(k - 1, window.periods):
        out.extend(window.models[t])
    return out


def mpc_step(state: SchedulerState, window: BillingWindow,
             forecast: Sequence[float]) -> tuple[float, ...]:
    """Decide period k's per-device consumption; does not mutate state.

    ``forecast`` must cover periods k..T (the current period's generation
    is itself a forecast: decisions are made before metering it).
    """
    k = state.period
    if not 1 <= k <= window.periods:
        raise ValueError(f"period {k} outside 1..{window.periods}")
    n_ahead = window.periods - k + 1
    fc = np.asarray(forecast, dtype=float)
    if fc.shape != (n_ahead,):
        raise ValueError(f"forecast must cover {n_ahead} periods, got shape {fc.shape}")
    if (fc < 0).any():
        raise ValueError("forecast generation must be >= 0")

    plus, minus = window.tariff.rates_for(0)
    pool = _pool(window, k)
    m = window.device_count

    pooled_target = state.realized_der + float(fc.sum())
    d_plus_pool = device_levels(pool, plus)
    d_minus_pool = device_levels(pool, minus)
    dk_plus = state.exercised_consumption + float(d_plus_pool.sum())
    dk_minus = state.exercised_consumption + float(d_minus_pool.sum())

    if pooled_target <= dk_plus:
        slice_k = d_plus_pool[:m]
    elif pooled_target <= dk_minus:
        mu = solve_shadow_price(
            pool, minus, plus, pooled_target - state.exercised_consumption
        )
        slice_k = device_levels(pool, mu)[:m]
    else:
        slice_k = d_minus_pool[:m]
    return tuple(float(d) for d in slice_k)


@dataclass(frozen=True)
class BillingResult:
    schedule: tuple[tuple[float, ...], ...]
    total_consumption: float
    net: float
    surplus: float


def run_billing_period(
    window: BillingWindow,
    realized: Sequence[float],
    forecast: ForecastProvider,
) -> BillingResult:
    """Run the sequential decision loop over a full billing window.

    At each period the provider is re-queried with the realized history;
    committed decisions are never revised.  The surplus is settled once
    at the end of the window on total net consumption.
    """
    trace = [float(r) for r in realized]
    if len(trace) != window.periods:
        raise ValueError(
            f"realized trace has {len(trace)} periods, window has {window.periods}"
        )
    if any(r < 0 for r in trace):
        raise ValueError("realized generation must be >= 0")

    state = SchedulerState()
    for k in range(1, window.periods + 1):
        fc = forecast(k, trace[: k - 1], window.periods - k + 1)
        decision = mpc_step(state, window, fc)
        state.commit(window, decision, trace[k - 1])

    net = state.exercised_consumption - state.realized_der
    pay = nem_payment(net, window.tariff)
    return BillingResult(
        schedule=tuple(state.decisions),
        total_consumption=state.exercised_consumption,
        net=net,
        surplus=state.exercised_utility - pay,
    )


def clairvoyant_optimum(window: BillingWindow,
                        realized: Sequence[float]) -> BillingResult:
    """One-shot optimum with the whole generation trace known in advance.

    Pools all (period, device) pairs into a single two-threshold problem
    with the window's total generation; upper-bounds any forecast-driven
    schedule.
    """
    trace = [float(r) for r in realized]
    if len(trace) != window.periods:
        raise ValueError("realized trace length mismatch")
    pool = _pool(window, 1)
    decision = optimal_consumption(
        pool, window.tariff, sum(trace), CustomerKind.ACTIVE_PROSUMER
    )
    m = window.device_count
    per_period = tuple(
        tuple(decision.per_device[t * m : (t + 1) * m])
        for t in range(window.periods)
    )
    u = total_utility(pool, decision.per_device)
    net = decision.total - sum(trace)
    return BillingResult(
        schedule=per_period,
        total_consumption=decision.total,
        net=net,
        surplus=u - nem_payment(net, window.tariff),
    )


class PerfectForecast:
    """Oracle provider: forecasts equal the realized trace."""

    def __init__(self, trace: Sequence[float]):
        self.trace = [float(r) for r in trace]

    def __call__(self, k: int, history: Sequence[float], n_ahead: int) -> np.ndarray:
        return np.asarray(self.trace[k - 1 : k - 1 + n_ahead], dtype=float)


class PersistenceForecast:
    """Repeats the last realized value; before any realization, ``initial``."""

    def __init__(self, initial: float = 0.0):
        self.initial = float(initial)

    def __call__(self, k: int, history: Sequence[float], n_ahead: int) -> np.ndarray:
        last = float(history[-1]) if len(history) else self.initial
        return np.full(n_ahead, last)


class BiasedForecast:
    """Realized trace shifted by a constant additive bias (floored at zero)."""

    def __init__(self, trace: Sequence[float], bias: float):
        self.trace = [float(r) for r in trace]
        self.bias = float(bias)

    def __call__(self, k: int, history: Sequence[float], n_ahead: int) -> np.ndarray:
        ahead = np.asarray(self.trace[k - 1 : k - 1 + n_ahead], dtype=float)
        return np.maximum(ahead + self.bias, 0.0)


class ScaledNoiseForecast:
    """Realized trace times i.i.d. lognormal-ish noise; seeded for replay."""

    def __init__(self, trace: Sequence[float], scale: float = 0.2, seed: int = 0):
        self.trace = [float(r) for r in trace]
        self.scale = float(scale)
        self.rng = np.random.default_rng(seed)

    def __call__(self, k: int, history: Sequence[float], n_ahead: int) -> np.ndarray:
        ahead = np.asarray(self.trace[k - 1 : k - 1 + n_ahead], dtype=float)
        noise = np.exp(self.rng.normal(0.0, self.scale, size=n_ahead))
        return ahead * noise
