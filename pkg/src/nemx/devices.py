"""Quadratic device utility models and their calibration.

Each controllable load (HVAC, EV charging, remaining appliances) carries
a strictly concave quadratic utility of consumed energy,

    U(d) = alpha * d - beta * d**2 / 2,      0 <= d <= cap,

whose marginal utility ``V(d) = alpha - beta * d`` is linear and hence
invertible in closed form.  Parameters are calibrated from a historical
price/consumption operating point and an own-price elasticity of demand.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CalibrationError

__all__ = [
    "DeviceModel",
    "CalibrationInput",
    "utility",
    "marginal_utility",
    "marginal_utility_inverse",
    "calibrate",
]


@dataclass(frozen=True)
class DeviceModel:
    """Quadratic utility parameters for one device.

    ``alpha`` is the marginal utility at zero consumption ($/kWh),
    ``beta`` the curvature ($/kWh^2, strictly positive), and ``cap`` the
    consumption upper limit (kWh) for the billing period the model
    describes.

    The consumption policy only relies on the method surface (``cap``,
    ``utility``, ``marginal_utility_inverse``), so any strictly concave
    model exposing those can stand in where a DeviceModel is expected;
    closed-form fast paths remain reserved for the quadratic family.
    """

    alpha: float
    beta: float
    cap: float
    label: str = "device"

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0 for strict concavity, got {self.beta}")
        if self.cap < 0:
            raise ValueError(f"cap must be >= 0, got {self.cap}")

    def utility(self, d: float) -> float:
        if d < 0 or d > self.cap:
            raise ValueError(f"d={d} outside [0, {self.cap}]")
        return self.alpha * d - 0.5 * self.beta * d * d

    def marginal_utility(self, d: float) -> float:
        return self.alpha - self.beta * d

    def marginal_utility_inverse(self, price: float) -> float:
        return (self.alpha - price) / self.beta


@dataclass(frozen=True)
class CalibrationInput:
    """Historical operating point and elasticity used to fit a model."""

    historical_price: float
    historical_demand: float
    elasticity: float
    label: str = "device"

    def __post_init__(self) -> None:
        if self.elasticity >= 0:
            raise CalibrationError(
                f"elasticity must be < 0, got {self.elasticity}"
            )
        if self.historical_price <= 0 or self.historical_demand <= 0:
            raise CalibrationError(
                "historical price and demand must be > 0, got "
                f"{self.historical_price}, {self.historical_demand}"
            )


def utility(model: DeviceModel, d: float) -> float:
    """Utility of consuming ``d`` kWh; domain ``0 <= d <= cap``."""
    return model.utility(d)


def marginal_utility(model: DeviceModel, d: float) -> float:
    return model.marginal_utility(d)


def marginal_utility_inverse(model: DeviceModel, price: float) -> float:
    """Consumption at which marginal utility equals ``price``.

    Unclipped on purpose: the zone logic of the consumption policy owns
    the projection onto ``[0, cap]``, so negative or above-cap values
    are legitimate return values here.
    """
    return model.marginal_utility_inverse(price)


def calibrate(inp: CalibrationInput) -> DeviceModel:
    """Fit (alpha, beta) so the model reproduces the historical demand.

    With demand ``d(p) = (alpha - p) / beta``, matching the observed
    point and the prescribed elasticity gives

        alpha = -((1 - eps) / eps) * p_hist
        beta  = -p_hist / (eps * d_hist)

    which round-trips: ``(alpha - p_hist) / beta == d_hist``.  The cap
    defaults to the satiation point ``alpha / beta`` (demand at price
    zero), beyond which marginal utility is negative.
    """
    eps = inp.elasticity
    p = inp.historical_price
    alpha = -((1.0 - eps) / eps) * p
    beta = -p / (eps * inp.historical_demand)
    return DeviceModel(alpha=alpha, beta=beta, cap=alpha / beta, label=inp.label)
