"""The regulator's break-even rate problem and the policy rules it prices.

Each year the regulator fixes the export rate and fixed charges by
policy and chooses the retail rate so that the utility's expected
surplus over the rate-setting period is zero: tariff income from
adopters and non-adopters, minus the wholesale cost of serving their
aggregate net demand, minus the fixed cost.  Expected revenue as a
function of the retail rate is hump-shaped (higher rates depress
consumption), so the break-even equation can have two roots, one root,
or none.  The smaller root is returned because consumer surplus falls
with the retail rate, making it the welfare-preferred choice; no root at
all is the death-spiral regime.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .devices import DeviceModel
from .engine import PeriodSet, TariffArrays, aggregate, evaluate
from .errors import BracketError, DeathSpiralError
from .policy import CustomerKind, optimal_consumption, surplus
from .tariffs import TariffParams, nem_payment, peak_rate_factors

__all__ = [
    "LinearCostModel",
    "PolicyRule",
    "RateCase",
    "BreakEvenResult",
    "customer_surplus",
    "utility_surplus",
    "ramsey_objective",
    "expected_utility_surplus",
    "solve_break_even",
]


@dataclass(frozen=True)
class LinearCostModel:
    """Variable cost ``C(y) = rate * y`` of serving aggregate net demand.

    Negative aggregate demand (net system export) is credited at the
    same wholesale rate: the utility resells surplus generation.
    """

    rate: float

    def __post_init__(self) -> None:
        if self.rate < 0:
            raise ValueError("wholesale rate must be >= 0")

    def __call__(self, y: float) -> float:
        return self.rate * y


def customer_surplus(
    tariff: TariffParams,
    gamma: float,
    devices: Sequence[DeviceModel],
    r: float,
    period: int = 0,
) -> float:
    """Population surplus: adopter share at generation r, the rest at zero."""
    if not 0 <= gamma <= 1:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    s_pro = surplus(devices, tariff, r, CustomerKind.ACTIVE_PROSUMER, period)
    s_con = surplus(devices, tariff, 0.0, CustomerKind.CONSUMER, period)
    return gamma * s_pro + (1.0 - gamma) * s_con


def utility_surplus(
    tariff: TariffParams,
    gamma: float,
    devices: Sequence[DeviceModel],
    r: float,
    cost: LinearCostModel,
    theta: float,
    n_periods: int,
    period: int = 0,
) -> float:
    """Utility surplus in one net-billing period at one generation draw.

    Income from both customer classes, minus the wholesale cost of their
    aggregate net demand, minus this period's share of the fixed cost.
    """
    dec_pro = optimal_consumption(devices, tariff, r, CustomerKind.ACTIVE_PROSUMER, period)
    dec_con = optimal_consumption(devices, tariff, 0.0, CustomerKind.CONSUMER, period)
    pay_pro = nem_payment(dec_pro.net, tariff, period)
    pay_con = nem_payment(dec_con.total, tariff, period)
    y = gamma * dec_pro.net + (1.0 - gamma) * dec_con.total
    return gamma * pay_pro + (1.0 - gamma) * pay_con - cost(y) - theta / n_periods


def ramsey_objective(
    tariff: TariffParams,
    gamma: float,
    devices: Sequence[DeviceModel],
    samples_by_period: Sequence[Sequence[float]],
    env_price: float = 0.0,
) -> float:
    """Rate-setting objective: expected customer surplus plus the
    adopter-weighted environmental value of generation, summed over
    net-billing periods."""
    total = 0.0
    for j, samples in enumerate(samples_by_period):
        vals = [
            customer_surplus(tariff, gamma, devices, float(r), j) +
            gamma * env_price * float(r)
            for r in samples
        ]
        total += float(np.mean(vals))
    return total


@dataclass(frozen=True)
class PolicyRule:
    """How the export rate and fixed charges follow from the retail rate.

    ``export_rule`` is one of:

    * ``"retail"``: export equals retail (first-generation net metering);
    * ``"offset"``: export is retail minus ``export_offset`` (floored at 0);
    * ``"ratio"``: export is ``export_ratio`` times retail, with the ratio
      lowered by ``ratio_decrement`` percentage points each year down to
      ``ratio_floor``;
    * ``"profile"``: export follows a fixed per-period price profile
      (avoided-cost style), independent of the retail rate;
    * ``"smc"``: placeholder resolved by scenario preparation into a
      profile equal to wholesale plus the configured non-market adder.

    Fixed charges: ``fixed_monthly`` applies to every customer and may
    grow by ``fixed_increment`` per year up to ``fixed_cap``;
    ``cbc_per_kw_month`` is a capacity-based charge on adopters only.
    ``tou`` scales the retail rate by ``tou_peak_ratio`` during the
    ``[tou_peak_start, tou_peak_end)`` daily window.
    """

    name: str
    metering: str = "nem"
    export_rule: str = "retail"
    export_offset: float = 0.035
    export_ratio: float = 1.0
    ratio_decrement: float = 0.0
    ratio_floor: float = 0.0
    export_profile: tuple[float, ...] | None = None
    tou: bool = False
    tou_peak_ratio: float = 1.5
    tou_peak_start: float = 16.0
    tou_peak_end: float = 21.0
    fixed_monthly: float = 0.0
    fixed_increment: float = 0.0
    fixed_cap: float | None = None
    cbc_per_kw_month: float = 0.0

    def __post_init__(self) -> None:
        if self.metering not in ("nem", "fit"):
            raise ValueError(f"metering must be 'nem' or 'fit', got {self.metering!r}")
        if self.export_rule not in ("retail", "offset", "ratio", "profile", "smc"):
            raise ValueError(f"unknown export_rule {self.export_rule!r}")
        if self.export_rule == "profile" and self.export_profile is None:
            raise ValueError("profile export rule needs export_profile")
        if self.export_profile is not None:
            object.__setattr__(
                self, "export_profile",
                tuple(float(x) for x in self.export_profile),
            )

    def ratio_at(self, year: int) -> float:
        ratio = self.export_ratio - self.ratio_decrement * year
        return max(ratio, self.ratio_floor)

    def fixed_monthly_at(self, year: int) -> float:
        f = self.fixed_monthly + self.fixed_increment * year
        if self.fixed_cap is not None:
            f = min(f, self.fixed_cap)
        return f

    def retail_factors(self, pset: PeriodSet) -> np.ndarray:
        """Per-period multipliers on the base retail rate."""
        j = pset.n_periods
        if not self.tou:
            return np.ones(j)
        ppd = pset.periods_per_day
        if j % ppd:
            raise ValueError(
                f"TOU needs whole days of model periods: J={j}, periods/day={ppd}"
            )
        day = peak_rate_factors(ppd, self.tou_peak_ratio,
                                self.tou_peak_start, self.tou_peak_end)
        return np.resize(day, j)

    def export_rates(self, retail: np.ndarray, pset: PeriodSet, year: int) -> np.ndarray:
        if self.export_rule == "retail":
            return retail.copy()
        if self.export_rule == "offset":
            return np.maximum(retail - self.export_offset, 0.0)
        if self.export_rule == "ratio":
            return self.ratio_at(year) * retail
        if self.export_rule == "smc":
            raise ValueError(
                "smc export rule must be resolved to a profile against a period "
                "set first (scenario preparation does this)"
            )
        profile = np.resize(np.asarray(self.export_profile, dtype=float), pset.n_periods)
        return profile

    def min_base_rate(self, pset: PeriodSet, year: int) -> float:
        """Smallest base rate keeping retail >= export in every period."""
        if self.export_rule != "profile":
            return 0.0
        factors = self.retail_factors(pset)
        profile = np.resize(np.asarray(self.export_profile, dtype=float), pset.n_periods)
        return float(np.max(profile / factors))

    def tariff_arrays(
        self,
        base_rate: float,
        pset: PeriodSet,
        year: int = 0,
        system_kw: float = 0.0,
    ) -> TariffArrays:
        factors = self.retail_factors(pset)
        plus = base_rate * factors
        minus = np.minimum(self.export_rates(plus, pset, year), plus)
        per_real_period = 12.0 / pset.real_periods_per_year
        fixed_con = self.fixed_monthly_at(year) * per_real_period
        fixed_pro = fixed_con + self.cbc_per_kw_month * system_kw * per_real_period
        return TariffArrays(plus=plus, minus=minus,
                            fixed_consumer=fixed_con, fixed_prosumer=fixed_pro)


@dataclass(frozen=True)
class RateCase:
    """One break-even problem: who adopts, what it costs, which rule prices it."""

    periods: PeriodSet
    gamma: float
    theta: float
    rule: PolicyRule
    year: int = 0
    system_kw: float = 0.0
    bracket: tuple[float, float] = (0.0, 1.5)
    scan_step: float = 0.005

    def __post_init__(self) -> None:
        if not 0 <= self.gamma <= 1:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        lo, hi = self.bracket
        if not lo < hi:
            raise ValueError(f"empty bracket {self.bracket}")


@dataclass(frozen=True)
class BreakEvenResult:
    base_rate: float
    rates: TariffArrays
    residual: float


def expected_utility_surplus(case: RateCase, base_rate: float) -> float:
    """Expected annual utility surplus at a candidate base retail rate."""
    rates = case.rule.tariff_arrays(base_rate, case.periods, case.year, case.system_kw)
    ev = evaluate(case.periods, rates, case.rule.metering)
    agg = aggregate(case.periods, ev, case.gamma, case.theta,
                    env_price=0.0, smc_prices=np.zeros(case.periods.n_periods))
    return agg.utility_surplus


def solve_break_even(case: RateCase, tol_scale: float = 1e-6) -> BreakEvenResult:
    """Smallest base retail rate with zero expected utility surplus.

    Scans the bracket on a coarse grid for the first upward sign change,
    then bisects to 1e-9 on the rate.  Raises
    :class:`~nemx.errors.DeathSpiralError` when the surplus is negative
    throughout (no rate recovers costs) and
    :class:`~nemx.errors.BracketError` when it is positive from the
    bracket's low end (the bracket excludes every break-even rate).
    """
    lo = max(case.bracket[0], case.rule.min_base_rate(case.periods, case.year))
    hi = case.bracket[1]
    if lo >= hi:
        raise BracketError(f"bracket [{lo}, {hi}] collapsed by rule constraints")

    g: Callable[[float], float] = lambda x: expected_utility_surplus(case, x)
    grid = np.arange(lo, hi + case.scan_step, case.scan_step)
    grid[-1] = min(grid[-1], hi)

    first = g(float(grid[0]))
    if first > 0:
        raise BracketError(
            f"utility surplus already positive ({first:.4g}) at the bracket "
            f"low end {lo}; no minimal break-even rate inside the bracket"
        )

    # Walk the grid until the surplus first crosses (upward) through zero;
    # only an infeasible (death-spiral) case scans the whole bracket.
    cross = None
    prev = first
    best = first
    for i in range(1, len(grid)):
        if prev == 0.0:
            cross = (float(grid[i - 1]), float(grid[i - 1]))
            break
        cur = g(float(grid[i]))
        best = max(best, cur)
        if prev < 0 <= cur:
            cross = (float(grid[i - 1]), float(grid[i]))
            break
        prev = cur
    if cross is None:
        raise DeathSpiralError(case.gamma, case.theta, best)

    a, b = cross
    if a != b:
        for _ in range(64):
            if b - a <= 1e-9:
                break
            mid = 0.5 * (a + b)
            if g(mid) < 0:
                a = mid
            else:
                b = mid
    root = 0.5 * (a + b)
    residual = g(root)
    tolerance = tol_scale * max(case.theta, 1.0)
    if abs(residual) > tolerance:
        raise BracketError(
            f"break-even residual {residual:.3g} exceeds tolerance {tolerance:.3g}"
        )
    rates = case.rule.tariff_arrays(root, case.periods, case.year, case.system_kw)
    return BreakEvenResult(base_rate=root, rates=rates, residual=residual)
