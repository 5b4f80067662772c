"""Billing basics: net metering vs feed-in for the same household.

Walks through the two payment rules on a single net-billing period and
shows the structural identity between them: the payments differ by the
price spread applied to self-consumed generation, so net metering is
never the more expensive tariff for the customer when the retail rate
is at or above the export rate.
"""

import numpy as np

from nemx import TariffParams, fit_payment, nem_payment, payment_gap
from nemx.tariffs import build_tou_schedule

tariff = TariffParams(retail_rate=0.30, export_rate=0.08, fixed_charge=0.50)

print("tariff: retail $0.30/kWh, export $0.08/kWh, fixed $0.50/period\n")
print(f"{'consumed':>9} {'generated':>10} {'net':>6} {'NEM bill':>9} "
      f"{'FiT bill':>9} {'gap':>7}")
for d, r in [(12.0, 0.0), (12.0, 6.0), (12.0, 12.0), (12.0, 20.0), (3.0, 20.0)]:
    z = d - r
    nem = nem_payment(z, tariff)
    fit = fit_payment(d, r, tariff)
    gap = payment_gap(d, r, tariff)
    print(f"{d:9.1f} {r:10.1f} {z:6.1f} {nem:9.2f} {fit:9.2f} {gap:7.2f}")

print("\nThe gap equals (retail - export) * min(consumed, generated):")
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(1000):
    d, r = rng.uniform(0, 30, size=2)
    gap = fit_payment(d, r, tariff) - nem_payment(d - r, tariff)
    worst = max(worst, abs(gap - payment_gap(d, r, tariff)))
print(f"max identity error over 1000 random meter readings: {worst:.2e}")

print("\nTime-of-use variant (evening peak priced 1.5x):")
tou = build_tou_schedule(base_retail=0.30, export_offset=0.035)
for hour in (3, 12, 17, 20, 22):
    plus, minus = tou.rates_for(hour)
    print(f"  hour {hour:2d}: retail {plus:.3f}  export {minus:.3f}")
