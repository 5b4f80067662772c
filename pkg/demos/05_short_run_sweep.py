"""Short-run policy comparison on the bundled synthetic dataset.

For each tariff policy and each fixed adoption level, solve the
break-even retail rate and evaluate welfare changes and the long-run
adoption ceiling (market potential).  Net metering and feed-in coincide
when export equals retail; once exports are priced below retail, net
metering leaves adopters better off (self-consumption keeps the retail
value), so its market potential is the larger of the two.

Equivalent CLI:  nemx sweep <bundled synthetic_sweep.yaml> --out out/
"""

from nemx.config import builtin_data_path, load_config
from nemx.scenario import prepare, run_short_run_sweep

config = load_config(builtin_data_path("synthetic_sweep.yaml"))
prepared = prepare(config)
print(f"scenario {config.name}: {prepared.periods.n_periods} model periods, "
      f"{prepared.periods.n_samples} generation samples per period\n")

cells = run_short_run_sweep(prepared)
gammas = sorted({c.gamma for c in cells})

header = "policy          " + " ".join(f"{g:>6.0%}" for g in gammas)
print("market potential by adoption level (-- marks death spiral):")
print(header)
for policy in [r.name for r in prepared.rules]:
    row = [c for c in cells if c.policy == policy]
    cellstr = " ".join(
        f"{c.market_potential:6.1%}" if c.feasible else "    --" for c in row
    )
    print(f"{policy:<15} {cellstr}")

print("\nbreak-even retail rate (base, $/kWh):")
print(header)
for policy in [r.name for r in prepared.rules]:
    row = [c for c in cells if c.policy == policy]
    cellstr = " ".join(
        f"{c.retail_base:6.3f}" if c.feasible else "    --" for c in row
    )
    print(f"{policy:<15} {cellstr}")

print("\nwelfare change vs zero adoption (%):")
print(header)
for policy in [r.name for r in prepared.rules]:
    row = [c for c in cells if c.policy == policy]
    cellstr = " ".join(
        f"{c.welfare_pct:6.2f}" if c.feasible else "    --" for c in row
    )
    print(f"{policy:<15} {cellstr}")
