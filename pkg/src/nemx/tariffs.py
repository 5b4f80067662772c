"""Tariff parameters and customer payment rules.

Two metering families are covered: net metering, which bills the signed
net consumption ``z = d - r`` of a billing period, and feed-in metering,
which prices gross consumption ``d`` and gross generation ``r``
separately.  Both share the same parameter triple: a retail (import)
rate, an export (compensation) rate, and a volume-independent fixed
charge per net-billing period.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "TariffParams",
    "MeterReading",
    "nem_payment",
    "fit_payment",
    "payment_gap",
    "peak_rate_factors",
    "build_tou_schedule",
]


@dataclass(frozen=True)
class TariffParams:
    """Rate triple (retail, export, fixed) with an optional TOU schedule.

    ``retail_rate`` applies to positive net consumption, ``export_rate``
    to negative net consumption, and ``fixed_charge`` is levied once per
    net-billing period regardless of volume.  ``period_schedule``, when
    present, lists ``(retail, export)`` pairs per net-billing period for
    time-of-use pricing; the scalar rates then act as defaults for
    callers that do not index a period.

    Requires ``retail_rate >= export_rate >= 0`` (equality permitted:
    the first-generation net-metering setting).
    """

    retail_rate: float
    export_rate: float
    fixed_charge: float = 0.0
    period_schedule: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self) -> None:
        _check_rate_pair(self.retail_rate, self.export_rate)
        if self.fixed_charge < 0:
            raise ValueError(f"fixed_charge must be >= 0, got {self.fixed_charge}")
        if self.period_schedule is not None:
            sched = tuple((float(p), float(m)) for p, m in self.period_schedule)
            for p, m in sched:
                _check_rate_pair(p, m)
            object.__setattr__(self, "period_schedule", sched)

    def rates_for(self, period: int = 0) -> tuple[float, float]:
        """(retail, export) pair for a net-billing period index."""
        if self.period_schedule is None:
            return self.retail_rate, self.export_rate
        return self.period_schedule[period % len(self.period_schedule)]


def _check_rate_pair(retail: float, export: float) -> None:
    if retail < 0 or export < 0:
        raise ValueError(f"rates must be >= 0, got retail={retail}, export={export}")
    if retail < export:
        raise ValueError(
            f"retail rate ({retail}) must be >= export rate ({export})"
        )


@dataclass(frozen=True)
class MeterReading:
    """Gross consumption and behind-the-meter generation of one period."""

    gross_consumption: float
    btm_generation: float

    def __post_init__(self) -> None:
        if self.gross_consumption < 0 or self.btm_generation < 0:
            raise ValueError("consumption and generation must be >= 0")

    @property
    def net(self) -> float:
        return self.gross_consumption - self.btm_generation


def nem_payment(z: float, tariff: TariffParams, period: int = 0) -> float:
    """Net-metered payment for net consumption ``z`` in one billing period.

    Positive net consumption is billed at the retail rate, negative at
    the export rate; ``z == 0`` falls on the import branch (where the
    volumetric term vanishes anyway).  Total function: any real ``z`` is
    accepted.
    """
    plus, minus = tariff.rates_for(period)
    rate = plus if z >= 0 else minus
    return rate * z + tariff.fixed_charge


def fit_payment(d: float, r: float, tariff: TariffParams, period: int = 0) -> float:
    """Feed-in payment: gross consumption bought at retail, gross generation
    sold at the export rate."""
    if d < 0 or r < 0:
        raise ValueError(f"gross quantities must be >= 0, got d={d}, r={r}")
    plus, minus = tariff.rates_for(period)
    return plus * d - minus * r + tariff.fixed_charge


def payment_gap(d: float, r: float, tariff: TariffParams, period: int = 0) -> float:
    """Feed-in minus net-metered payment: ``(retail - export) * min(d, r)``.

    The gap is the value of self-consumed generation, which net metering
    implicitly compensates at the retail rate.  Zero whenever the two
    rates coincide.
    """
    if d < 0 or r < 0:
        raise ValueError(f"gross quantities must be >= 0, got d={d}, r={r}")
    plus, minus = tariff.rates_for(period)
    return (plus - minus) * min(d, r)


def peak_rate_factors(
    periods_per_day: int = 24,
    peak_ratio: float = 1.5,
    peak_start_hour: float = 16.0,
    peak_end_hour: float = 21.0,
) -> np.ndarray:
    """Multiplicative TOU factors over one day of billing periods.

    Periods whose start time falls in ``[peak_start_hour, peak_end_hour)``
    carry ``peak_ratio``; all others carry 1.0.
    """
    if periods_per_day < 1:
        raise ValueError("periods_per_day must be >= 1")
    hours = np.arange(periods_per_day) * (24.0 / periods_per_day)
    return np.where((hours >= peak_start_hour) & (hours < peak_end_hour), peak_ratio, 1.0)


def build_tou_schedule(
    base_retail: float,
    export_offset: float = 0.0,
    periods_per_day: int = 24,
    peak_ratio: float = 1.5,
    peak_start_hour: float = 16.0,
    peak_end_hour: float = 21.0,
    fixed_charge: float = 0.0,
) -> TariffParams:
    """Build a one-day TOU tariff from a base rate and a peak ratio.

    The export rate tracks the per-period retail rate minus
    ``export_offset`` (floored at zero).
    """
    factors = peak_rate_factors(periods_per_day, peak_ratio, peak_start_hour, peak_end_hour)
    schedule = []
    for f in factors:
        plus = base_retail * float(f)
        minus = max(0.0, plus - export_offset)
        schedule.append((plus, minus))
    return TariffParams(
        retail_rate=base_retail,
        export_rate=max(0.0, base_retail - export_offset),
        fixed_charge=fixed_charge,
        period_schedule=tuple(schedule),
    )


def joint_rates(tariff: TariffParams, periods: Sequence[int] | None = None) -> np.ndarray:
    """Stack per-period (retail, export) pairs as an array of shape (n, 2)."""
    if periods is None:
        if tariff.period_schedule is None:
            return np.array([[tariff.retail_rate, tariff.export_rate]])
        return np.asarray(tariff.period_schedule, dtype=float)
    return np.asarray([tariff.rates_for(p) for p in periods], dtype=float)
