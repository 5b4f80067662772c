"""Performance metrics: bill savings, cost-shifts, and social welfare.

Cost-shifts measure the cross-subsidy from non-adopters to adopters:
the part of adopter bill savings that exceeds the social-marginal-cost
value of their generation is revenue the utility must recover from
everyone else.  Social welfare adds customer surplus, utility surplus,
and the environmental externality of distributed generation; at a
break-even tariff the utility term vanishes.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .devices import DeviceModel
from .errors import ZeroBaselineError
from .policy import CustomerKind, optimal_consumption
from .rates import LinearCostModel, customer_surplus, utility_surplus
from .tariffs import TariffParams, nem_payment

__all__ = [
    "bill_savings",
    "cost_shift",
    "social_welfare",
    "percentage_change",
]


def bill_savings(
    tariff: TariffParams,
    devices: Sequence[DeviceModel],
    r: float,
    period: int = 0,
) -> float:
    """Net-metered bill before DER minus the bill after, both at optimum.

    The fixed charge cancels; only the volumetric change survives.
    """
    before = optimal_consumption(devices, tariff, 0.0, CustomerKind.CONSUMER, period)
    after = optimal_consumption(devices, tariff, r, CustomerKind.ACTIVE_PROSUMER, period)
    return nem_payment(before.total, tariff, period) - nem_payment(after.net, tariff, period)


def cost_shift(
    tariff: TariffParams,
    devices: Sequence[DeviceModel],
    gamma: float,
    samples_by_period: Sequence[Sequence[float]],
    smc_price: float | Sequence[float],
) -> float:
    """Expected adopter savings in excess of social marginal cost, summed
    over net-billing periods and scaled by the adopter fraction."""
    smc = np.broadcast_to(np.asarray(smc_price, dtype=float),
                          (len(samples_by_period),))
    total = 0.0
    for j, samples in enumerate(samples_by_period):
        excess = [
            bill_savings(tariff, devices, float(r), j) - smc[j] * float(r)
            for r in samples
        ]
        total += gamma * float(np.mean(excess))
    return total


def social_welfare(
    tariff: TariffParams,
    devices: Sequence[DeviceModel],
    gamma: float,
    samples_by_period: Sequence[Sequence[float]],
    cost: LinearCostModel,
    theta: float,
    env_price: float = 0.0,
) -> float:
    """Customer surplus + utility surplus + environmental benefit, expected
    over the generation samples of each net-billing period."""
    n_periods = len(samples_by_period)
    total = 0.0
    for j, samples in enumerate(samples_by_period):
        vals = [
            customer_surplus(tariff, gamma, devices, float(r), j)
            + utility_surplus(tariff, gamma, devices, float(r), cost, theta, n_periods, j)
            + gamma * env_price * float(r)
            for r in samples
        ]
        total += float(np.mean(vals))
    return total


def percentage_change(value: float, baseline: float) -> float:
    """(value - baseline) / |baseline| in percent; zero baseline is undefined."""
    if baseline == 0:
        raise ZeroBaselineError("percentage change undefined for zero baseline")
    return (value - baseline) / abs(baseline) * 100.0
