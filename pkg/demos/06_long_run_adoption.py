"""Closed-loop rate setting and solar adoption over 26 years.

Each year the regulator re-solves the break-even retail rate at the
current adopter fraction, then households respond to the new rates and
the (falling) installation cost by adopting along an S-curve.  Policies
differ only in how exports and fixed charges follow the retail rate:

* equal-export net metering accelerates adoption until no rate recovers
  costs (death spiral);
* yearly export-ratio decrements stabilize adoption and eventually turn
  the cost-shift trend downward;
* avoided-cost exports plus a capacity charge stall adoption and keep
  cost-shifts near zero.

Equivalent CLI:  nemx run <bundled synthetic_longrun.yaml> --out out/
"""

from nemx.config import builtin_data_path, load_config
from nemx.scenario import prepare, run_long_run

config = load_config(builtin_data_path("synthetic_longrun.yaml"))
prepared = prepare(config)

runs = {rule.name: run_long_run(prepared, rule) for rule in prepared.rules}

print("terminal status:")
for name, run in runs.items():
    print(f"  {name:<8} {run.terminal}")

years = (3, 6, 9, 12, 15, 18, 21, 24)
print("\nadopter fraction by year:")
print("policy    " + " ".join(f"y{y:<4d}" for y in years))
for name, run in runs.items():
    by_year = {r.year: r for r in run.records if r.feasible}
    cells = " ".join(
        f"{by_year[y].gamma:5.2f}" if y in by_year else "   --" for y in years
    )
    print(f"{name:<9} {cells}")

print("\ncost shifts ($/customer/month):")
print("policy    " + " ".join(f"y{y:<4d}" for y in years))
for name, run in runs.items():
    by_year = {r.year: r for r in run.records if r.feasible}
    cells = " ".join(
        f"{by_year[y].cost_shift_monthly:5.1f}" if y in by_year else "   --"
        for y in years
    )
    print(f"{name:<9} {cells}")

print("\nretail rate (mean $/kWh):")
print("policy    " + " ".join(f"y{y:<4d}" for y in years))
for name, run in runs.items():
    by_year = {r.year: r for r in run.records if r.feasible}
    cells = " ".join(
        f"{by_year[y].retail_mean:5.3f}" if y in by_year else "   --"
        for y in years
    )
    print(f"{name:<9} {cells}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping plot")
else:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
    for name, run in runs.items():
        feasible = [r for r in run.records if r.feasible]
        ax1.plot([r.year for r in feasible], [r.gamma for r in feasible],
                 label=name)
        ax2.plot([r.year for r in feasible],
                 [r.cost_shift_monthly for r in feasible], label=name)
    ax1.set_xlabel("year"); ax1.set_ylabel("adopter fraction")
    ax1.set_title("long-run adoption")
    ax2.set_xlabel("year"); ax2.set_ylabel("cost shift ($/customer/month)")
    ax2.set_title("cross-subsidy")
    ax1.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig("demos_longrun.png", dpi=120)
    print("\nsaved demos_longrun.png")
