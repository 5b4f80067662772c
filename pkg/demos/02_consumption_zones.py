"""The two-threshold consumption policy and its three operating zones.

A household with three flexible loads faces a net-metering tariff.  Two
energy thresholds, computed from the rates alone, split the range of
solar output into a net-consumption zone (buy at retail), a net-zero
zone (match generation exactly), and a net-production zone (sell at the
export rate).  The demo prints the policy's behavior across that range
and, if matplotlib is available, saves the consumption and surplus
curves.
"""

import numpy as np

from nemx import CustomerKind, DeviceModel, TariffParams
from nemx.policy import optimal_consumption, surplus, thresholds, zone_of

devices = [
    DeviceModel(alpha=1.0, beta=0.10, cap=20.0, label="hvac"),
    DeviceModel(alpha=0.5, beta=0.10, cap=20.0, label="appliances"),
    DeviceModel(alpha=0.05, beta=0.10, cap=20.0, label="low-value"),
]
tariff = TariffParams(retail_rate=0.40, export_rate=0.10)

pair = thresholds(devices, tariff)
print(f"thresholds: d+ = {pair.d_plus:.2f} kWh, d- = {pair.d_minus:.2f} kWh")
print("(the low-value device never runs: its marginal utility at zero is "
      "below the export rate)\n")

print(f"{'solar r':>8} {'zone':>16} {'total d*':>9} {'net':>7} "
      f"{'per-device':>22}")
for r in (0.0, 4.0, 7.0, 10.0, 13.0, 16.0):
    dec = optimal_consumption(devices, tariff, r)
    alloc = ", ".join(f"{d:.2f}" for d in dec.per_device)
    print(f"{r:8.1f} {dec.zone.value:>16} {dec.total:9.2f} {dec.net:7.2f} "
          f"[{alloc}]")

print("\nsurplus by decision model (active adapts, passive does not):")
print(f"{'solar r':>8} {'active':>9} {'passive':>9} {'consumer':>9} {'feed-in':>9}")
rs = np.linspace(0.0, 16.0, 9)
for r in rs:
    row = [surplus(devices, tariff, float(r), kind)
           for kind in (CustomerKind.ACTIVE_PROSUMER,
                        CustomerKind.PASSIVE_PROSUMER,
                        CustomerKind.CONSUMER,
                        CustomerKind.FIT_PROSUMER)]
    print(f"{r:8.1f} " + " ".join(f"{s:9.3f}" for s in row))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping plots")
else:
    grid = np.linspace(0.0, 18.0, 400)
    totals = [optimal_consumption(devices, tariff, float(r)).total for r in grid]
    surpluses = {
        kind.value: [surplus(devices, tariff, float(r), kind) for r in grid]
        for kind in CustomerKind
    }
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
    ax1.plot(grid, totals)
    ax1.axvline(pair.d_plus, ls="--", c="gray")
    ax1.axvline(pair.d_minus, ls="--", c="gray")
    ax1.set_xlabel("solar output r (kWh)")
    ax1.set_ylabel("optimal total consumption (kWh)")
    ax1.set_title("two-threshold policy")
    for name, values in surpluses.items():
        ax2.plot(grid, values, label=name)
    ax2.set_xlabel("solar output r (kWh)")
    ax2.set_ylabel("surplus ($)")
    ax2.legend()
    ax2.set_title("surplus by decision model")
    fig.tight_layout()
    fig.savefig("demos_zones.png", dpi=120)
    print("\nsaved demos_zones.png")
