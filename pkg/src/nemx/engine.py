"""Vectorized evaluation of customer decisions over period/sample grids.

Rate solving and scenario runs evaluate the optimal-consumption policy
for every net-billing period of a rate-setting period and every
generation sample, many times inside a root search.  This module
implements the same two-threshold policy as :mod:`nemx.policy`, but over
numpy arrays shaped (periods, samples); agreement of the two routes is
pinned by tests.

A :class:`PeriodSet` may be a reduced representation of a longer trace:
each model period stands for ``weight`` real net-billing periods, so
annual totals are ``weight * sum over periods`` and per-period fixed
charges are expressed per *real* period.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PeriodSet", "TariffArrays", "PeriodEvaluation", "evaluate", "Aggregates", "aggregate"]


@dataclass(frozen=True)
class PeriodSet:
    """Device parameters, wholesale prices, and generation samples per period.

    Shapes: ``alpha``, ``beta``, ``cap`` are (J, M); ``wholesale`` is
    (J,); ``der_samples`` is (J, S).  ``weight`` is the number of real
    net-billing periods each model period represents and
    ``periods_per_day`` the number of real billing periods per day
    (used to place time-of-use peak windows).
    """

    alpha: np.ndarray
    beta: np.ndarray
    cap: np.ndarray
    wholesale: np.ndarray
    der_samples: np.ndarray
    weight: float = 1.0
    periods_per_day: int = 24

    def __post_init__(self) -> None:
        a = np.asarray(self.alpha, dtype=float)
        for name in ("alpha", "beta", "cap", "wholesale", "der_samples"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        j, m = self.alpha.shape
        if self.beta.shape != (j, m) or self.cap.shape != (j, m):
            raise ValueError("alpha, beta, cap must share shape (J, M)")
        if self.wholesale.shape != (j,):
            raise ValueError("wholesale must have shape (J,)")
        if self.der_samples.ndim != 2 or self.der_samples.shape[0] != j:
            raise ValueError("der_samples must have shape (J, S)")
        if np.any(self.beta <= 0):
            raise ValueError("beta must be > 0")
        if np.any(self.cap < 0) or np.any(self.der_samples < 0):
            raise ValueError("caps and generation samples must be >= 0")
        if self.weight <= 0:
            raise ValueError("weight must be > 0")

    @property
    def n_periods(self) -> int:
        return self.alpha.shape[0]

    @property
    def n_samples(self) -> int:
        return self.der_samples.shape[1]

    @property
    def real_periods_per_year(self) -> float:
        return self.weight * self.n_periods


@dataclass(frozen=True)
class TariffArrays:
    """Per-period rates plus fixed charges per real net-billing period.

    ``fixed_prosumer`` may exceed ``fixed_consumer`` when adopters carry
    an extra capacity-based charge.
    """

    plus: np.ndarray
    minus: np.ndarray
    fixed_consumer: float = 0.0
    fixed_prosumer: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "plus", np.asarray(self.plus, dtype=float))
        object.__setattr__(self, "minus", np.asarray(self.minus, dtype=float))
        if self.plus.shape != self.minus.shape:
            raise ValueError("plus and minus must share shape")
        if np.any(self.minus < 0) or np.any(self.plus < self.minus - 1e-12):
            raise ValueError("need retail >= export >= 0 in every period")


@dataclass(frozen=True)
class PeriodEvaluation:
    """Decision outcomes: consumer quantities (J,), prosumer (J, S)."""

    d0: np.ndarray
    u0: np.ndarray
    pay0: np.ndarray
    d_pro: np.ndarray
    u_pro: np.ndarray
    pay_pro: np.ndarray
    net_pro: np.ndarray
    r: np.ndarray


def _clip_levels(pset: PeriodSet, price: np.ndarray) -> np.ndarray:
    """Per-device consumption at a price; (J,) -> (J, M), (J, S) -> (J, S, M)."""
    if price.ndim == 1:
        lvl = (pset.alpha - price[:, None]) / pset.beta
        return np.clip(lvl, 0.0, pset.cap)
    lvl = (pset.alpha[:, None, :] - price[..., None]) / pset.beta[:, None, :]
    return np.clip(lvl, 0.0, pset.cap[:, None, :])


def _quad_utility(pset: PeriodSet, levels: np.ndarray) -> np.ndarray:
    if levels.ndim == 2:
        return np.sum(pset.alpha * levels - 0.5 * pset.beta * levels**2, axis=-1)
    return np.sum(
        pset.alpha[:, None, :] * levels - 0.5 * pset.beta[:, None, :] * levels**2,
        axis=-1,
    )


def _shadow_prices(pset: PeriodSet, plus: np.ndarray, minus: np.ndarray,
                   r: np.ndarray) -> np.ndarray:
    """Per-(period, sample) shadow price solving aggregate demand == r.

    Exact piecewise-linear interpolation over the per-period breakpoint
    lattice; values are meaningful only where r lies in the net-zero
    band and are clipped into it elsewhere.
    """
    j, m = pset.alpha.shape
    bp = np.concatenate(
        [
            np.broadcast_to(minus[:, None], (j, 1)),
            np.broadcast_to(plus[:, None], (j, 1)),
            pset.alpha,
            pset.alpha - pset.beta * pset.cap,
        ],
        axis=1,
    )
    bp = np.clip(bp, minus[:, None], plus[:, None])
    bp = np.sort(bp, axis=1)  # ascending prices
    # demand at each breakpoint: (J, B)
    lvl = np.clip(
        (pset.alpha[:, None, :] - bp[:, :, None]) / pset.beta[:, None, :],
        0.0,
        pset.cap[:, None, :],
    )
    demand = lvl.sum(axis=2)  # nonincreasing along axis 1

    d_hi = demand[:, 0]  # at lowest price
    d_lo = demand[:, -1]  # at highest price
    target = np.clip(r, d_lo[:, None], d_hi[:, None])

    mu = np.empty_like(target)
    for row in range(j):
        idx = np.searchsorted(-demand[row], -target[row], side="left")
        k = np.clip(idx - 1, 0, demand.shape[1] - 2)
        dk, dk1 = demand[row, k], demand[row, k + 1]
        span = dk - dk1
        frac = np.where(span > 0, (dk - target[row]) / np.where(span > 0, span, 1.0), 0.0)
        mu[row] = bp[row, k] + frac * (bp[row, k + 1] - bp[row, k])
    return mu


def evaluate(pset: PeriodSet, rates: TariffArrays, metering: str = "nem") -> PeriodEvaluation:
    """Optimal decisions and bills for consumers and prosumers on the grid."""
    if metering not in ("nem", "fit"):
        raise ValueError(f"metering must be 'nem' or 'fit', got {metering!r}")
    plus, minus = rates.plus, rates.minus
    r = pset.der_samples

    lvl_plus = _clip_levels(pset, plus)  # (J, M)
    d0 = lvl_plus.sum(axis=1)
    u0 = _quad_utility(pset, lvl_plus)
    pay0 = plus * d0 + rates.fixed_consumer

    if metering == "fit":
        d_pro = np.broadcast_to(d0[:, None], r.shape)
        u_pro = np.broadcast_to(u0[:, None], r.shape)
        pay_pro = plus[:, None] * d_pro - minus[:, None] * r + rates.fixed_prosumer
        net = d_pro - r
        return PeriodEvaluation(d0, u0, pay0, d_pro.copy(), u_pro.copy(),
                                pay_pro, net, r)

    lvl_minus = _clip_levels(pset, minus)  # (J, M)
    d_plus_tot = d0
    d_minus_tot = lvl_minus.sum(axis=1)

    in_cons = r < d_plus_tot[:, None]
    in_prod = r > d_minus_tot[:, None]

    mu = _shadow_prices(pset, plus, minus, r)
    lvl_zero = _clip_levels(pset, mu)  # (J, S, M)

    lvl = np.where(
        in_cons[..., None],
        lvl_plus[:, None, :],
        np.where(in_prod[..., None], lvl_minus[:, None, :], lvl_zero),
    )
    d_pro = lvl.sum(axis=2)
    u_pro = _quad_utility(pset, lvl)
    net = d_pro - r
    volumetric = np.where(net >= 0, plus[:, None] * net, minus[:, None] * net)
    pay_pro = volumetric + rates.fixed_prosumer
    return PeriodEvaluation(d0, u0, pay0, d_pro, u_pro, pay_pro, net, r)


@dataclass(frozen=True)
class Aggregates:
    """Annualized economics of one (tariff, adoption level) configuration.

    All money values are $/customer/year except where noted; surpluses
    follow the adopter-share mix given by ``gamma``.
    """

    customer_surplus: float
    utility_surplus: float
    environmental: float
    welfare: float
    cost_shift: float
    bill_saving: float
    prosumer_surplus: float
    consumer_surplus: float
    revenue: float
    energy_cost: float


def aggregate(
    pset: PeriodSet,
    ev: PeriodEvaluation,
    gamma: float,
    theta: float,
    env_price: float,
    smc_prices: np.ndarray,
) -> Aggregates:
    """Annualize surpluses, welfare, cost-shifts, and savings.

    ``theta`` is the utility's fixed cost per rate-setting period
    (year); ``smc_prices`` the per-period social marginal cost ($/kWh).
    The utility's variable cost is wholesale-linear and credits negative
    aggregate net demand at the wholesale rate.
    """
    w = pset.weight
    mean_pay_pro = ev.pay_pro.mean(axis=1)
    mean_r = ev.r.mean(axis=1)

    y = gamma * ev.net_pro + (1.0 - gamma) * ev.d0[:, None]
    energy_cost = w * float((pset.wholesale[:, None] * y).mean(axis=1).sum())
    revenue = w * float((gamma * mean_pay_pro + (1.0 - gamma) * ev.pay0).sum())
    utility_surplus = revenue - energy_cost - theta

    pro_surplus = w * float((ev.u_pro - ev.pay_pro).mean(axis=1).sum())
    con_surplus = w * float((ev.u0 - ev.pay0).sum())
    customer_surplus = gamma * pro_surplus + (1.0 - gamma) * con_surplus

    environmental = gamma * env_price * w * float(mean_r.sum())
    welfare = customer_surplus + utility_surplus + environmental

    saving = ev.pay0[:, None] - ev.pay_pro  # (J, S)
    bill_saving = w * float(saving.mean(axis=1).sum())
    shift = gamma * w * float(
        (saving - np.asarray(smc_prices)[:, None] * ev.r).mean(axis=1).sum()
    )
    return Aggregates(
        customer_surplus=customer_surplus,
        utility_surplus=utility_surplus,
        environmental=environmental,
        welfare=welfare,
        cost_shift=shift,
        bill_saving=bill_saving,
        prosumer_surplus=pro_surplus,
        consumer_surplus=con_surplus,
        revenue=revenue,
        energy_cost=energy_cost,
    )
