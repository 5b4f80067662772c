"""Trace ingestion and reduction to desk-scale period sets.

Three comma-separated inputs with header rows describe a utility's
service territory at meter resolution:

* load: ``timestamp,device_id,kwh`` (per-device consumption baselines),
* solar: ``timestamp,kwh`` (per-system behind-the-meter generation),
* prices: ``timestamp,usd_per_kwh`` (wholesale energy prices).

Timestamps are ISO-8601 and uniformly spaced within each file.  Rows
are first summed (kWh) or averaged (prices) into net-billing periods,
on which all three series must align exactly.  A model year is then
built by cyclic binning: model period ``j`` pools every net-billing
period whose index is congruent to ``j``, giving J representative
periods that each stand for ``weight`` real ones.  Generation samples
are bootstrap draws from each bin's pool.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import pandas as pd

from .devices import CalibrationInput, calibrate
from .engine import PeriodSet
from .errors import EmptyTraceError, SchemaError, TraceAlignmentError

__all__ = ["ScenarioData", "read_load", "read_solar", "read_prices",
           "ingest_traces", "build_period_set"]


def _read_csv(path: str | Path, columns: Sequence[str]) -> pd.DataFrame:
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise EmptyTraceError(f"{path}: file has no rows") from None
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {missing}")
    if len(frame) == 0:
        raise EmptyTraceError(f"{path}: no data rows")
    try:
        frame["timestamp"] = pd.to_datetime(frame["timestamp"], format="ISO8601")
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{path}: unparseable timestamp ({exc})") from None
    value_col = columns[-1]
    values = pd.to_numeric(frame[value_col], errors="coerce")
    bad = values.isna()
    if bad.any():
        row = int(np.argmax(bad.to_numpy()))
        raise SchemaError(f"{path}: non-numeric {value_col} at data row {row + 1} "
                          f"(file line {row + 2})")
    neg = values < 0
    if neg.any():
        row = int(np.argmax(neg.to_numpy()))
        raise SchemaError(f"{path}: negative {value_col} at data row {row + 1} "
                          f"(file line {row + 2})")
    frame[value_col] = values.astype(float)
    return frame


def _check_uniform(ts: pd.Series, path: str | Path) -> pd.Timedelta:
    if len(ts) < 2:
        raise TraceAlignmentError(f"{path}: need at least two timestamps")
    deltas = ts.diff().dropna()
    step = deltas.iloc[0]
    if step <= pd.Timedelta(0) or not (deltas == step).all():
        raise TraceAlignmentError(f"{path}: timestamps not uniformly spaced")
    return step


def _to_billing_periods(ts: pd.Series, values: pd.Series, minutes: int,
                        how: str, path: str | Path) -> pd.Series:
    step = _check_uniform(ts, path)
    window = pd.Timedelta(minutes=minutes)
    if window % step != pd.Timedelta(0):
        raise TraceAlignmentError(
            f"{path}: net-billing period {minutes} min not a multiple of the "
            f"trace step {step}"
        )
    series = pd.Series(values.to_numpy(), index=pd.DatetimeIndex(ts))
    resampled = series.resample(window)
    out = resampled.sum() if how == "sum" else resampled.mean()
    if out.isna().any():
        raise TraceAlignmentError(f"{path}: gaps after resampling to {minutes} min")
    return out


def read_load(path: str | Path, minutes: int = 60) -> pd.DataFrame:
    """Per-device consumption per net-billing period (columns = device ids)."""
    frame = _read_csv(path, ["timestamp", "device_id", "kwh"])
    per_device = {}
    for device, group in frame.groupby("device_id", sort=True):
        per_device[str(device)] = _to_billing_periods(
            group["timestamp"], group["kwh"], minutes, "sum", path
        )
    out = pd.DataFrame(per_device)
    if out.isna().any().any():
        raise TraceAlignmentError(f"{path}: devices cover different timestamps")
    return out


def read_solar(path: str | Path, minutes: int = 60) -> pd.Series:
    frame = _read_csv(path, ["timestamp", "kwh"])
    return _to_billing_periods(frame["timestamp"], frame["kwh"], minutes, "sum", path)


def read_prices(path: str | Path, minutes: int = 60) -> pd.Series:
    frame = _read_csv(path, ["timestamp", "usd_per_kwh"])
    return _to_billing_periods(frame["timestamp"], frame["usd_per_kwh"], minutes,
                               "mean", path)


@dataclass(frozen=True)
class ScenarioData:
    """Aligned net-billing-period series shared by every scenario."""

    load: pd.DataFrame       # periods x devices, kWh
    solar: np.ndarray        # kWh per period
    prices: np.ndarray       # $/kWh per period
    net_billing_minutes: int

    @property
    def n_periods(self) -> int:
        return len(self.load)

    @property
    def periods_per_day(self) -> int:
        return (24 * 60) // self.net_billing_minutes

    @property
    def devices(self) -> tuple[str, ...]:
        return tuple(self.load.columns)


def ingest_traces(
    load_path: str | Path,
    solar_path: str | Path,
    prices_path: str | Path,
    net_billing_minutes: int = 60,
) -> ScenarioData:
    """Read, validate, and align the three traces on the billing grid."""
    if (24 * 60) % net_billing_minutes != 0:
        raise ValueError("net_billing_minutes must divide a day")
    load = read_load(load_path, net_billing_minutes)
    solar = read_solar(solar_path, net_billing_minutes)
    prices = read_prices(prices_path, net_billing_minutes)
    if not (load.index.equals(solar.index) and load.index.equals(prices.index)):
        raise TraceAlignmentError(
            "load, solar, and prices do not cover the same net-billing periods"
        )
    return ScenarioData(
        load=load,
        solar=solar.to_numpy(),
        prices=prices.to_numpy(),
        net_billing_minutes=net_billing_minutes,
    )


def _bin_indices(n: int, j: int, n_bins: int) -> np.ndarray:
    if n_bins <= n:
        return np.arange(j, n, n_bins)
    return np.array([j % n])


def build_period_set(
    data: ScenarioData,
    n_periods: int,
    n_samples: int,
    seed: int,
    elasticities: Mapping[str, float],
    historical_price: float,
    hours_per_year: float = 8760.0,
) -> PeriodSet:
    """Reduce trace data to a J-period model year with bootstrap samples.

    Device utilities are calibrated per model period from the bin-mean
    demand, the historical retail price, and per-device elasticities
    (falling back to ``elasticities['default']``).  The bootstrap draw
    is seeded; identical inputs give identical period sets.
    """
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n = data.n_periods
    rng = np.random.default_rng(seed)
    devices = data.devices

    def elasticity_for(device: str) -> float:
        if device in elasticities:
            return float(elasticities[device])
        if "default" in elasticities:
            return float(elasticities["default"])
        raise KeyError(f"no elasticity for device {device!r} and no default")

    alpha = np.empty((n_periods, len(devices)))
    beta = np.empty_like(alpha)
    cap = np.empty_like(alpha)
    wholesale = np.empty(n_periods)
    samples = np.empty((n_periods, n_samples))

    load_values = data.load.to_numpy()
    for j in range(n_periods):
        idx = _bin_indices(n, j, n_periods)
        wholesale[j] = float(np.mean(data.prices[idx]))
        pool = data.solar[idx]
        samples[j] = rng.choice(pool, size=n_samples, replace=True)
        for i, device in enumerate(devices):
            demand = float(np.mean(load_values[idx, i]))
            model = calibrate(CalibrationInput(
                historical_price=historical_price,
                historical_demand=demand,
                elasticity=elasticity_for(device),
                label=device,
            ))
            alpha[j, i], beta[j, i], cap[j, i] = model.alpha, model.beta, model.cap

    real_periods_per_year = hours_per_year * 60.0 / data.net_billing_minutes
    return PeriodSet(
        alpha=alpha,
        beta=beta,
        cap=cap,
        wholesale=wholesale,
        der_samples=samples,
        weight=real_periods_per_year / n_periods,
        periods_per_day=data.periods_per_day,
    )
