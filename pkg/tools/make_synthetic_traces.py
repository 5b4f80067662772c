"""Regenerate the bundled synthetic traces (src/nemx/data/*.csv).

Synthetic stand-ins for metered data: 90 summer days at 15-minute
resolution starting 2019-06-01, covering a three-device household
(hvac, ev, other), a 5 kW rooftop solar system, and a duck-curve
wholesale price series.  Fully seeded; rerunning reproduces the
checked-in files byte for byte.

Usage: python tools/make_synthetic_traces.py [out_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pandas as pd

SEED = 20190601
DAYS = 90
STEPS_PER_DAY = 96  # 15-minute intervals
START = "2019-06-01T00:00:00"


def _gauss(hours: np.ndarray, center: float, sigma: float) -> np.ndarray:
    return np.exp(-0.5 * ((hours - center) / sigma) ** 2)


def _wrapped_gauss(hours: np.ndarray, center: float, sigma: float) -> np.ndarray:
    """Gaussian on the 24 h circle (for loads spanning midnight)."""
    delta = np.minimum(np.abs(hours - center), 24.0 - np.abs(hours - center))
    return np.exp(-0.5 * (delta / sigma) ** 2)


def make_traces(out_dir: Path) -> None:
    rng = np.random.default_rng(SEED)
    n = DAYS * STEPS_PER_DAY
    t = np.arange(n)
    hours = (t % STEPS_PER_DAY) * (24.0 / STEPS_PER_DAY)
    timestamps = pd.date_range(START, periods=n, freq="15min")

    # Daily weather: sunny/hot factor in (0, 1], persistent across the day.
    sky = rng.beta(5.0, 1.4, size=DAYS)
    sky_step = np.repeat(sky, STEPS_PER_DAY)

    # --- solar: 5 kW system, bell-shaped production 6h-20h -----------------
    shape = _gauss(hours, 13.0, 3.0)
    shape[(hours < 6.0) | (hours > 20.0)] = 0.0
    peak_kw = 3.6
    solar = peak_kw * 0.25 * shape * sky_step
    solar *= 1.0 + rng.normal(0.0, 0.04, size=n)
    solar = np.clip(solar, 0.0, None)

    # --- loads (kWh per 15 min), strictly positive ------------------------
    # Evening-heavy household: cooling peaks after work hours, EV charges
    # at night, so most solar output is exported rather than self-consumed.
    heat = 0.55 + 0.45 * sky_step  # hot days drive cooling
    hvac = 0.020 + 0.21 * _gauss(hours, 18.8, 2.1) * heat
    ev = 0.006 + 0.18 * _wrapped_gauss(hours, 22.0, 1.5) + 0.06 * _wrapped_gauss(hours, 1.0, 1.2)
    other = 0.095 + 0.07 * _gauss(hours, 7.0, 1.0) + 0.18 * _gauss(hours, 20.3, 1.6)
    loads = {"ev": ev, "hvac": hvac, "other": other}
    for name, series in loads.items():
        noisy = series * (1.0 + rng.normal(0.0, 0.05, size=n))
        loads[name] = np.maximum(noisy, 0.002)

    # --- wholesale prices: midday solar glut, evening peak ----------------
    price = (
        0.036
        - 0.016 * _gauss(hours, 13.0, 3.0) * sky_step
        + 0.062 * _gauss(hours, 18.5, 1.5)
    )
    price *= 1.0 + rng.normal(0.0, 0.06, size=n)
    price = np.maximum(price, 0.004)

    out_dir.mkdir(parents=True, exist_ok=True)
    ts = timestamps.strftime("%Y-%m-%dT%H:%M:%S")

    load_rows = []
    for name in sorted(loads):
        frame = pd.DataFrame({
            "timestamp": ts, "device_id": name,
            "kwh": np.round(loads[name], 6),
        })
        load_rows.append(frame)
    pd.concat(load_rows, ignore_index=True).to_csv(out_dir / "load.csv", index=False)
    pd.DataFrame({"timestamp": ts, "kwh": np.round(solar, 6)}).to_csv(
        out_dir / "solar.csv", index=False)
    pd.DataFrame({"timestamp": ts, "usd_per_kwh": np.round(price, 6)}).to_csv(
        out_dir / "prices.csv", index=False)

    daily_solar = solar.sum() / DAYS
    daily_load = sum(v.sum() for v in loads.values()) / DAYS
    print(f"wrote {out_dir}: {n} steps, solar {daily_solar:.1f} kWh/day, "
          f"load {daily_load:.1f} kWh/day, price mean {price.mean():.4f} $/kWh")


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "nemx" / "data"
    )
    make_traces(target)
