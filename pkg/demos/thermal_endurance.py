"""Five-hour thermal endurance run in a few wall-clock seconds.

Cycles every motor continuously and logs per-group temperatures from the
first-order thermal model. Temperatures rise monotonically to group
steady states; a first-order model cannot overshoot.
"""

import time

from tendonhand.eval_harness import run_thermal_endurance
from tendonhand.plant_sim import DEFAULT_THERMAL, Plant, ideal_plant_config

t0 = time.perf_counter()
report = run_thermal_endurance(Plant(ideal_plant_config()), duration_hours=5.0,
                               dt=1.0)
wall = time.perf_counter() - t0

print(f"simulated 5 h in {wall:.1f} s wall clock\n")
print(f"{'group':8s} {'peak':>7s} {'steady':>7s} {'delta':>7s} {'model ss':>9s}")
for g in report.groups:
    model_ss = DEFAULT_THERMAL[g.group].steady_state
    print(f"{g.group:8s} {g.peak:7.2f} {g.steady:7.2f} {g.delta:7.2f} "
          f"{model_ss:9.2f}  degC")

print("\nwarm-up trace (fingers group, first 10 min):")
for t, fingers, _, _ in report.log[:11]:
    print(f"  t = {t:5.0f} s   T = {fingers:6.2f} degC")
