"""Optimal consumption policy for customers facing net-metered rates.

The surplus-maximization over device consumptions is convex but
non-differentiable at net-zero.  Its solution is a two-threshold policy:
two aggregate energy levels ``(d_plus, d_minus)``, computed from the
rates and the device marginal utilities alone, partition the range of
behind-the-meter generation ``r`` into three zones:

* net consumption (``r < d_plus``): each device consumes at the point
  where marginal utility equals the retail rate;
* net production (``r > d_minus``): each device consumes at the point
  where marginal utility equals the export rate;
* net zero (``d_plus <= r <= d_minus``): total consumption matches ``r``
  exactly, allocated across devices by a shared shadow price ``mu`` in
  ``[export, retail]``.

For quadratic utilities the shadow-price equation is piecewise linear
and solved exactly by breakpoint search; a bisection fallback covers any
strictly concave model exposing ``marginal_utility_inverse``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .devices import DeviceModel
from .errors import InternalInvariantError, PolicyAssumptionError
from .tariffs import TariffParams, fit_payment, nem_payment

__all__ = [
    "Zone",
    "CustomerKind",
    "ThresholdPair",
    "ConsumptionDecision",
    "thresholds",
    "zone_of",
    "optimal_consumption",
    "surplus",
    "solve_shadow_price",
]

# Net-zero allocations match r to this absolute energy tolerance (kWh).
_ENERGY_TOL = 1e-10


class Zone(enum.Enum):
    NET_CONSUMPTION = "net_consumption"
    NET_ZERO = "net_zero"
    NET_PRODUCTION = "net_production"


class CustomerKind(enum.Enum):
    """Decision models: active prosumers adapt consumption to generation,
    passive prosumers keep the no-generation schedule, consumers have no
    generation, and feed-in customers face gross metering (their optimal
    consumption is independent of generation)."""

    ACTIVE_PROSUMER = "active_prosumer"
    PASSIVE_PROSUMER = "passive_prosumer"
    CONSUMER = "consumer"
    FIT_PROSUMER = "fit_prosumer"


@dataclass(frozen=True)
class ThresholdPair:
    d_plus: float
    d_minus: float

    def __post_init__(self) -> None:
        if not 0 <= self.d_plus <= self.d_minus:
            raise ValueError(
                f"need 0 <= d_plus <= d_minus, got ({self.d_plus}, {self.d_minus})"
            )


@dataclass(frozen=True)
class ConsumptionDecision:
    """Optimal per-device consumptions plus bookkeeping for one period."""

    per_device: tuple[float, ...]
    zone: Zone
    net: float
    mu_star: float | None = None

    @property
    def total(self) -> float:
        return float(sum(self.per_device))


def _clip_inverse(model: DeviceModel, price: float) -> float:
    return min(max(model.marginal_utility_inverse(price), 0.0), model.cap)


def device_levels(devices: Sequence[DeviceModel], price: float) -> np.ndarray:
    """Per-device consumption when every device prices energy at ``price``."""
    return np.array([_clip_inverse(m, price) for m in devices])


def thresholds(devices: Sequence[DeviceModel], tariff: TariffParams,
               period: int = 0) -> ThresholdPair:
    """Aggregate zone thresholds for a device fleet under a tariff."""
    plus, minus = tariff.rates_for(period)
    if plus < minus:
        raise PolicyAssumptionError(
            f"retail rate {plus} below export rate {minus}"
        )
    d_plus = float(device_levels(devices, plus).sum())
    d_minus = float(device_levels(devices, minus).sum())
    return ThresholdPair(d_plus=d_plus, d_minus=max(d_plus, d_minus))


def zone_of(pair: ThresholdPair, r: float) -> Zone:
    """Zone classification; both boundaries belong to the net-zero zone."""
    if r < pair.d_plus:
        return Zone.NET_CONSUMPTION
    if r > pair.d_minus:
        return Zone.NET_PRODUCTION
    return Zone.NET_ZERO


def solve_shadow_price(
    devices: Sequence[DeviceModel],
    price_lo: float,
    price_hi: float,
    target: float,
    tol: float = _ENERGY_TOL,
) -> float:
    """Solve ``sum_i clip(V_i^-1(mu)) == target`` for mu in [price_lo, price_hi].

    The aggregate clipped inverse demand is continuous and nonincreasing
    in mu.  For quadratic devices it is piecewise linear with kinks only
    where a device saturates or drops out, so sorting those breakpoints
    and interpolating on the bracketing segment is exact.  On flat
    segments (every device clipped) any mu on the segment yields the
    same consumption; the left endpoint is returned.
    """
    quadratic = all(hasattr(m, "alpha") and hasattr(m, "beta") for m in devices)
    if quadratic:
        return _shadow_price_breakpoints(devices, price_lo, price_hi, target)
    return _shadow_price_bisection(devices, price_lo, price_hi, target, tol)


def _shadow_price_breakpoints(
    devices: Sequence[DeviceModel], lo: float, hi: float, target: float
) -> float:
    points = {lo, hi}
    for m in devices:
        for p in (m.alpha, m.alpha - m.beta * m.cap):
            if lo < p < hi:
                points.add(float(p))
    prices = np.array(sorted(points))  # ascending: demand descending
    demand = np.array([device_levels(devices, p).sum() for p in prices])

    if target >= demand[0]:
        return float(prices[0])
    if target <= demand[-1]:
        return float(prices[-1])

    # first segment [k, k+1] with demand[k] >= target >= demand[k+1]
    k = int(np.searchsorted(-demand, -target, side="left")) - 1
    k = max(0, min(k, len(prices) - 2))
    d0, d1 = demand[k], demand[k + 1]
    if d0 == d1:
        return float(prices[k])
    frac = (d0 - target) / (d0 - d1)
    return float(prices[k] + frac * (prices[k + 1] - prices[k]))


def _shadow_price_bisection(devices, lo: float, hi: float, target: float,
                            tol: float) -> float:
    def aggregate(mu: float) -> float:
        return float(sum(
            min(max(m.marginal_utility_inverse(mu), 0.0), m.cap) for m in devices
        ))

    f_lo, f_hi = aggregate(lo), aggregate(hi)
    if target > f_lo + tol or target < f_hi - tol:
        raise InternalInvariantError(
            f"target {target} outside aggregate demand range [{f_hi}, {f_lo}]"
        )
    a, b = lo, hi
    for _ in range(200):
        mid = 0.5 * (a + b)
        if aggregate(mid) >= target:
            a = mid
        else:
            b = mid
        if abs(aggregate(a) - target) <= tol:
            break
    return a


def _net_zero_allocation(
    devices: Sequence[DeviceModel], plus: float, minus: float, r: float
) -> tuple[np.ndarray, float]:
    mu = solve_shadow_price(devices, minus, plus, r)
    if not (minus - 1e-9 <= mu <= plus + 1e-9):
        raise InternalInvariantError(
            f"shadow price {mu} escaped [{minus}, {plus}]"
        )
    return device_levels(devices, mu), mu


def optimal_consumption(
    devices: Sequence[DeviceModel],
    tariff: TariffParams,
    r: float,
    kind: CustomerKind = CustomerKind.ACTIVE_PROSUMER,
    period: int = 0,
) -> ConsumptionDecision:
    """Optimal per-device consumption for one net-billing period.

    Active prosumers follow the two-threshold policy at generation ``r``.
    Consumers are the ``r = 0`` special case.  Passive prosumers and
    feed-in customers reuse the ``r = 0`` schedule (the former by choice,
    the latter because gross metering decouples consumption from
    generation), differing only in how their net/billing is computed.
    """
    if r < 0:
        raise ValueError(f"generation must be >= 0, got {r}")
    plus, minus = tariff.rates_for(period)
    if plus < minus:
        raise PolicyAssumptionError(f"retail rate {plus} below export rate {minus}")

    pair = thresholds(devices, tariff, period)
    if kind is CustomerKind.CONSUMER:
        r_effective = 0.0
    elif kind in (CustomerKind.PASSIVE_PROSUMER, CustomerKind.FIT_PROSUMER):
        base = optimal_consumption(devices, tariff, 0.0,
                                   CustomerKind.ACTIVE_PROSUMER, period)
        net = base.total - r
        if net > _ENERGY_TOL:
            fixed_zone = Zone.NET_CONSUMPTION
        elif net < -_ENERGY_TOL:
            fixed_zone = Zone.NET_PRODUCTION
        else:
            fixed_zone = Zone.NET_ZERO
        return ConsumptionDecision(
            per_device=base.per_device,
            zone=fixed_zone,
            net=net,
            mu_star=None,
        )
    else:
        r_effective = r

    zone = zone_of(pair, r_effective)
    mu_star: float | None = None
    if zone is Zone.NET_CONSUMPTION:
        alloc = device_levels(devices, plus)
    elif zone is Zone.NET_PRODUCTION:
        alloc = device_levels(devices, minus)
    else:
        alloc, mu_star = _net_zero_allocation(devices, plus, minus, r_effective)
    return ConsumptionDecision(
        per_device=tuple(float(a) for a in alloc),
        zone=zone,
        net=float(alloc.sum()) - r_effective,
        mu_star=mu_star,
    )


def total_utility(devices: Sequence[DeviceModel], allocation: Sequence[float]) -> float:
    return float(sum(m.utility(d) for m, d in zip(devices, allocation)))


def surplus(
    devices: Sequence[DeviceModel],
    tariff: TariffParams,
    r: float,
    kind: CustomerKind = CustomerKind.ACTIVE_PROSUMER,
    period: int = 0,
) -> float:
    """Consumption utility minus the bill, at the kind's optimal decision.

    Net-metered kinds pay on net consumption; the feed-in kind pays
    gross-consumption retail minus gross-generation compensation.
    Consumers ignore ``r`` entirely.
    """
    decision = optimal_consumption(devices, tariff, r, kind, period)
    u = total_utility(devices, decision.per_device)
    if kind is CustomerKind.FIT_PROSUMER:
        pay = fit_payment(decision.total, r, tariff, period)
    elif kind is CustomerKind.CONSUMER:
        pay = nem_payment(decision.total, tariff, period)
    else:
        pay = nem_payment(decision.net, tariff, period)
    return u - pay
