"""Adoption dynamics: payback time, market potential, and S-curve diffusion.

The installed-base fraction follows a ceiling-scaled S-curve: the
ceiling (market potential) is an exponentially decaying function of the
investment payback time, and within a rate-setting period the cumulative
installed fraction advances one step along a Bass diffusion curve whose
clock is re-synchronized to the current ceiling.  The update never
decreases the adopter fraction: customers do not un-install.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .devices import DeviceModel
from .metrics import bill_savings
from .tariffs import TariffParams

__all__ = [
    "AdoptionParams",
    "payback_time",
    "payback_time_from_saving",
    "market_potential",
    "bass_cdf",
    "bass_cdf_inverse",
    "adoption_update",
    "INFINITE_PAYBACK",
]

INFINITE_PAYBACK = math.inf

# Ratio gamma/ceiling above this is treated as saturated (inverse blows up).
_SATURATION_EPS = 1e-9


@dataclass(frozen=True)
class AdoptionParams:
    """Market-potential and diffusion-shape parameters.

    ``market_size`` caps the adopter fraction; ``payback_sensitivity``
    (negative, per year) discounts the cap by payback time;
    ``bass_p``/``bass_q`` are the innovation and imitation coefficients
    per rate-setting period; ``degradation`` and ``interest`` discount
    future bill savings; ``horizon`` bounds the payback search (years).
    """

    market_size: float = 0.45
    payback_sensitivity: float = -0.1
    bass_p: float = 0.03
    bass_q: float = 0.38
    degradation: float = 0.0
    interest: float = 0.0
    horizon: int = 30

    def __post_init__(self) -> None:
        if not 0 < self.market_size <= 1:
            raise ValueError("market_size must be in (0, 1]")
        if self.payback_sensitivity >= 0:
            raise ValueError("payback_sensitivity must be < 0")
        if self.bass_p <= 0 or self.bass_q < 0:
            raise ValueError("need bass_p > 0 and bass_q >= 0")
        if not 0 <= self.degradation < 1 or not 0 <= self.interest < 1:
            raise ValueError("degradation and interest must be in [0, 1)")
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")


def payback_time_from_saving(
    annual_saving: float,
    install_cost: float,
    degradation: float = 0.0,
    interest: float = 0.0,
    horizon: int = 30,
) -> float:
    """Smallest t* with sum_{t=0..t*} ((1-nu)/(1+zeta))^t * saving >= cost.

    ``annual_saving`` is the expected first-year bill saving; later years
    are discounted by system degradation and the interest rate jointly.
    Returns ``INFINITE_PAYBACK`` when the horizon cannot recover the
    installation cost.
    """
    if install_cost <= 0:
        raise ValueError(f"install_cost must be > 0, got {install_cost}")
    factor = (1.0 - degradation) / (1.0 + interest)
    cumulative = 0.0
    term = annual_saving
    for t in range(horizon + 1):
        cumulative += term
        if cumulative >= install_cost:
            return float(t)
        term *= factor
    return INFINITE_PAYBACK


def payback_time(
    tariff: TariffParams,
    devices: Sequence[DeviceModel],
    der_samples: Sequence[float],
    install_cost: float,
    degradation: float = 0.0,
    interest: float = 0.0,
    horizon: int = 30,
    billing_periods_per_year: float = 1.0,
) -> float:
    """Payback under the current tariff held fixed indefinitely.

    The first-year saving is the sample-mean bill saving per net-billing
    period times the number of such periods in a year.  ``install_cost``
    is the full system cost (per-kW price times system size).
    """
    samples = np.asarray(der_samples, dtype=float)
    if samples.size == 0:
        raise ValueError("need at least one generation sample")
    per_period = float(
        np.mean([bill_savings(tariff, devices, r) for r in samples])
    )
    return payback_time_from_saving(
        per_period * billing_periods_per_year,
        install_cost,
        degradation,
        interest,
        horizon,
    )


def market_potential(params: AdoptionParams, payback: float) -> float:
    """Adoption ceiling ``market_size * exp(sensitivity * payback)``.

    Unreachable payback yields a zero ceiling.
    """
    if math.isinf(payback):
        return 0.0
    return params.market_size * math.exp(params.payback_sensitivity * payback)


def bass_cdf(params: AdoptionParams, t: float) -> float:
    """Cumulative installed fraction after t periods; 0 at t=0, limit 1."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    p, q = params.bass_p, params.bass_q
    e = math.exp(-(p + q) * t)
    return (1.0 - e) / (1.0 + (q / p) * e)


def bass_cdf_inverse(params: AdoptionParams, y: float) -> float:
    """Time at which the cumulative installed fraction reaches y in [0, 1)."""
    if not 0 <= y < 1:
        raise ValueError(f"y must be in [0, 1), got {y}")
    p, q = params.bass_p, params.bass_q
    e = (1.0 - y) / (1.0 + (q / p) * y)
    return -math.log(e) / (p + q)


def adoption_update(gamma: float, ceiling: float, params: AdoptionParams) -> float:
    """One rate-setting-period advance of the adopter fraction.

    When the new ceiling is below the current fraction the fraction
    freezes (no disinstallation).  Otherwise the diffusion clock is set
    to the time at which a ceiling-scaled S-curve passes through the
    current fraction, advanced by one period, and re-evaluated.  At or
    beyond saturation the fraction is a fixed point.
    """
    if not 0 <= gamma <= 1:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    if ceiling < gamma or ceiling <= 0.0:
        return gamma
    ratio = gamma / ceiling
    if ratio >= 1.0 - _SATURATION_EPS:
        return gamma
    t_next = 1.0 + bass_cdf_inverse(params, ratio)
    return ceiling * bass_cdf(params, t_next)
