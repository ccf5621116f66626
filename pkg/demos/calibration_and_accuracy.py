"""Auto-calibration and the controller accuracy experiment.

Discovers each motor's usable tick range against the simulated plant,
then measures open-loop tracking accuracy with simulated magnetic
encoders, both on an ideal plant and under the fitted noise preset.
"""

from tendonhand.calibration import auto_calibrate_all
from tendonhand.eval_harness import paper_regime_config, run_accuracy_experiment
from tendonhand.plant_sim import Plant, ideal_plant_config

plant = Plant(ideal_plant_config())
cals = auto_calibrate_all(plant)
print("discovered calibration (ideal plant):")
for m in sorted(cals)[:4]:
    r = cals[m]
    print(f"  motor {m}: ticks [{r.p_min:.0f}, {r.p_max:.0f}] "
          f"-> angles [{r.theta_min:.1f}, {r.theta_max:.1f}] deg")
print("  ...")

print("\naccuracy on the ideal plant (quantization only):")
report = run_accuracy_experiment(Plant(ideal_plant_config()), cals, n=20, seed=0)
for a in report.per_joint:
    print(f"  {a.joint:32s} {a.mean_abs_error:6.3f} deg  {a.mean_pct_error:5.2f} %")
print(f"  overall: {report.overall_abs_error:.3f} deg")

print("\naccuracy under the fitted noise preset (slack + friction + sensor noise):")
noisy = run_accuracy_experiment(Plant(paper_regime_config(), seed=0), cals,
                                n=20, seed=0)
for a in noisy.per_joint:
    print(f"  {a.joint:32s} {a.mean_abs_error:6.2f} deg  {a.mean_pct_error:5.2f} %")
print(f"  overall: {noisy.overall_abs_error:.2f} deg / {noisy.overall_pct_error:.2f} %")
