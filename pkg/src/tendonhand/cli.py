"""Command-line harness: calibration, offline experiments, teleop service."""

from __future__ import annotations

import argparse
import sys

from . import calibration, eval_harness, motor_map, plant_sim


def _make_plant(args) -> plant_sim.Plant:
    if getattr(args, "plant", None):
        cfg = plant_sim.load_plant_config(args.plant)
    elif getattr(args, "paper_regime", False):
        cfg = eval_harness.paper_regime_config()
    else:
        cfg = plant_sim.ideal_plant_config()
    return plant_sim.Plant(cfg, seed=getattr(args, "seed", 0))


def _load_cals(args, plant) -> dict[int, motor_map.CalibrationRecord]:
    if getattr(args, "calib", None):
        return motor_map.load_calibrations(args.calib)
    return dict(plant.config.true_cals)


def cmd_calibrate(args) -> int:
    plant = _make_plant(args)
    if args.motor == "all":
        cals = calibration.auto_calibrate_all(plant)
    else:
        m = int(args.motor)
        cals = {m: calibration.auto_calibrate_motor(plant, m)}
    motor_map.save_calibrations(cals, args.out)
    print(f"calibrated {len(cals)} motor(s) -> {args.out}")
    return 0


def cmd_eval_accuracy(args) -> int:
    plant = _make_plant(args)
    cals = _load_cals(args, plant)
    report = eval_harness.run_accuracy_experiment(
        plant, cals, n=args.n, hold=args.hold, seed=args.seed
    )
    for a in report.per_joint:
        print(f"{a.joint:20s} {a.mean_abs_error:7.2f} deg  {a.mean_pct_error:6.2f} %")
    print(f"{'overall':20s} {report.overall_abs_error:7.2f} deg  "
          f"{report.overall_pct_error:6.2f} %")
    if args.out:
        eval_harness.export_report(report, args.format, args.out)
    return 0


def cmd_eval_coupling(args) -> int:
    base = (plant_sim.load_plant_config(args.plant) if args.plant
            else plant_sim.ideal_plant_config(
                noise_sigma=0.2, uncoupled_ratio_jitter=0.05, coulomb_band=20.0))
    report = eval_harness.run_coupling_comparison(
        base, trials=args.trials, seed=args.seed
    )
    print(f"mean per-command std: coupled {report.mean_std_coupled:.4f} deg, "
          f"uncoupled {report.mean_std_uncoupled:.4f} deg")
    print(f"coupled more repeatable: {report.coupled_more_repeatable}")
    if args.out:
        eval_harness.export_report(report, args.format, args.out)
    return 0 if report.coupled_more_repeatable else 1


def cmd_eval_thermal(args) -> int:
    plant = _make_plant(args)
    report = eval_harness.run_thermal_endurance(
        plant, duration_hours=args.hours, dt=args.dt
    )
    for g in report.groups:
        print(f"{g.group:8s} peak {g.peak:6.2f}  steady {g.steady:6.2f}  "
              f"delta {g.delta:6.2f} degC")
    if args.out:
        eval_harness.export_report(report, args.format, args.out)
    return 0


class _DictReport:
    """Adapter so a previously saved JSON report can be re-exported."""

    def __init__(self, doc: dict):
        self._doc = doc

    def to_dict(self) -> dict:
        return self._doc


def cmd_eval_export(args) -> int:
    doc = eval_harness.import_report(getattr(args, "in"))
    if "kind" not in doc:
        raise ValueError("input file is not a report (missing 'kind')")
    eval_harness.export_report(_DictReport(doc), args.format, args.out)
    print(f"wrote {args.format} report -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve
    from .teleop import TeleopSession

    plant = _make_plant(args)
    cals = _load_cals(args, plant)
    session = TeleopSession(
        cals, plant, rate_hz=args.rate, noise_sigma=args.noise_sigma,
        seed=args.seed,
    )
    print(f"teleop service on ws://{args.host}:{args.port}/ws "
          f"({args.rate:.0f} Hz)")
    serve(session, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tendonhand")
    sub = ap.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="auto-calibrate motors against the plant")
    cal.add_argument("--motor", default="all", help="motor index or 'all'")
    cal.add_argument("--out", required=True)
    cal.add_argument("--plant", help="plant config file (default: ideal plant)")
    cal.add_argument("--seed", type=int, default=0)
    cal.set_defaults(func=cmd_calibrate)

    ev = sub.add_parser("eval", help="run an experiment")
    evsub = ev.add_subparsers(dest="experiment", required=True)

    acc = evsub.add_parser("accuracy")
    acc.add_argument("--n", type=int, default=20)
    acc.add_argument("--hold", type=float, default=1.5)
    acc.add_argument("--seed", type=int, default=0)
    acc.add_argument("--plant")
    acc.add_argument("--calib")
    acc.add_argument("--paper-regime", action="store_true",
                     help="use the fitted demonstration noise preset")
    acc.add_argument("--out")
    acc.add_argument("--format", choices=["csv", "json"], default="json")
    acc.set_defaults(func=cmd_eval_accuracy)

    coup = evsub.add_parser("coupling")
    coup.add_argument("--trials", type=int, default=10)
    coup.add_argument("--seed", type=int, default=0)
    coup.add_argument("--plant")
    coup.add_argument("--out")
    coup.add_argument("--format", choices=["csv", "json"], default="json")
    coup.set_defaults(func=cmd_eval_coupling)

    th = evsub.add_parser("thermal")
    th.add_argument("--hours", type=float, default=5.0)
    th.add_argument("--dt", type=float, default=1.0)
    th.add_argument("--seed", type=int, default=0)
    th.add_argument("--plant")
    th.add_argument("--out")
    th.add_argument("--format", choices=["csv", "json"], default="json")
    th.set_defaults(func=cmd_eval_thermal)

    exp = evsub.add_parser("export", help="re-export a saved JSON report")
    exp.add_argument("--in", required=True, dest="in", metavar="REPORT_JSON")
    exp.add_argument("--format", choices=["csv", "json"], default="csv")
    exp.add_argument("--out", required=True)
    exp.set_defaults(func=cmd_eval_export)

    srv = sub.add_parser("serve", help="run the teleop service")
    srv.add_argument("--rate", type=float, default=50.0)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8765)
    srv.add_argument("--plant")
    srv.add_argument("--calib")
    srv.add_argument("--noise-sigma", type=float, default=0.0)
    srv.add_argument("--seed", type=int, default=0)
    srv.set_defaults(func=cmd_serve)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as e:  # diagnostics to stderr, nonzero exit
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
