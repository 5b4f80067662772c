"""The regulator's problem: pick the retail rate that recovers costs.

Expected utility revenue is hump-shaped in the retail rate (higher
prices choke demand), so cost recovery admits zero, one, or two roots.
The regulator takes the smallest root -- consumer surplus falls with the
rate -- and when the hump never reaches the fixed cost there is no
feasible rate at all: the death-spiral regime.  Rooftop solar shrinks
billable sales, so adoption pushes the break-even rate up and the
feasible region shut.
"""

import numpy as np

from nemx.engine import PeriodSet
from nemx.errors import DeathSpiralError
from nemx.rates import PolicyRule, RateCase, expected_utility_surplus, solve_break_even

pset = PeriodSet(
    alpha=[[1.0]], beta=[[0.1]], cap=[[20.0]],
    wholesale=[0.1], der_samples=[[3.0, 5.0, 7.0]],
)
rule = PolicyRule(name="flat net metering", export_rule="retail")


def case(gamma, theta):
    return RateCase(periods=pset, gamma=gamma, theta=theta, rule=rule,
                    bracket=(0.0, 1.2))


print("expected annual utility surplus vs retail rate (gamma=0, theta=0.8):")
for x in np.arange(0.1, 1.01, 0.1):
    s = expected_utility_surplus(case(0.0, 0.8), float(x))
    bar = "#" * max(0, int(20 + s * 15))
    print(f"  rate {x:.2f}: {s:+7.3f}  {bar}")

res = solve_break_even(case(0.0, 0.8))
print(f"\nsmallest break-even rate: {res.base_rate:.6f} "
      f"(residual {res.residual:.2e})")

print("\nadoption pressure on the break-even rate (theta=0.8):")
for gamma in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7):
    try:
        res = solve_break_even(case(gamma, 0.8))
        print(f"  gamma {gamma:.1f}: rate {res.base_rate:.4f}")
    except DeathSpiralError as exc:
        print(f"  gamma {gamma:.1f}: DEATH SPIRAL "
              f"(best achievable surplus {exc.max_surplus:.3f})")
        break

print("\nfixed-cost pressure at gamma=0:")
for theta in (0.5, 1.0, 1.5, 2.0, 2.025, 2.1):
    try:
        res = solve_break_even(case(0.0, theta))
        print(f"  theta {theta:5.3f}: rate {res.base_rate:.4f}")
    except DeathSpiralError:
        print(f"  theta {theta:5.3f}: DEATH SPIRAL (revenue peak is ~2.025)")
