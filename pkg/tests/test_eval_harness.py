import json
from fractions import Fraction

import numpy as np
import pytest

from tendonhand.eval_harness import (
    INSTRUMENTED_JOINTS,
    config_hash,
    export_report,
    import_report,
    overall_average,
    paper_regime_config,
    round_half_up,
    run_accuracy_experiment,
    run_coupling_comparison,
    run_thermal_endurance,
)
from tendonhand.plant_sim import DEFAULT_THERMAL, Plant, default_true_cals, ideal_plant_config

# measured per-joint columns that the aggregation must reproduce exactly
ABS_COLUMN = [3.76, 7.69, 11.91, 12.77, 7.85, 11.07, 2.76]
PCT_COLUMN = [15.96, 9.62, 11.91, 8.51, 7.47, 16.27, 5.01]


class TestAggregation:
    def test_abs_column_average(self):
        assert round_half_up(overall_average(ABS_COLUMN)) == 8.26

    def test_pct_column_average(self):
        assert round_half_up(overall_average(PCT_COLUMN)) == 10.68

    def test_overall_average_exact_rational(self):
        assert overall_average([0.1, 0.2]) == Fraction(3, 20)

    def test_round_half_up_ties(self):
        assert round_half_up(Fraction(1, 8), 2) == 0.13   # 0.125 rounds up
        assert round_half_up(Fraction(255, 100), 1) == 2.6
        assert round_half_up(Fraction(1, 3), 2) == 0.33

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            overall_average([])


class TestAccuracy:
    def test_ideal_plant_tight_errors(self):
        plant = Plant(ideal_plant_config())
        report = run_accuracy_experiment(plant, default_true_cals(), n=5, seed=0)
        assert len(report.per_joint) == 7
        for a in report.per_joint:
            assert a.mean_abs_error <= 0.05

    def test_pct_uses_calibrated_range(self):
        # percentage column must be abs error over that joint's calibrated
        # span, not a shared denominator
        plant = Plant(ideal_plant_config())
        report = run_accuracy_experiment(plant, default_true_cals(), n=3, seed=1)
        cals = default_true_cals()
        for a, j in zip(report.per_joint, INSTRUMENTED_JOINTS):
            m = plant.model.motor_of(j)
            expected = 100.0 * a.mean_abs_error / cals[m].theta_span
            assert a.mean_pct_error == pytest.approx(expected, rel=1e-12)

    def test_seeded_determinism(self):
        r1 = run_accuracy_experiment(
            Plant(paper_regime_config(), seed=2), default_true_cals(), n=5, seed=2
        )
        r2 = run_accuracy_experiment(
            Plant(paper_regime_config(), seed=2), default_true_cals(), n=5, seed=2
        )
        assert r1 == r2

    @pytest.mark.slow
    def test_paper_regime_band(self):
        plant = Plant(paper_regime_config(), seed=0)
        report = run_accuracy_experiment(plant, default_true_cals(), seed=0)
        for a in report.per_joint:
            assert 5.0 <= a.mean_pct_error <= 17.0

    def test_missing_calibration(self):
        cals = default_true_cals()
        del cals[0]
        with pytest.raises(KeyError):
            run_accuracy_experiment(Plant(ideal_plant_config()), cals, n=1)


class TestCoupling:
    BASE = dict(noise_sigma=0.2, coulomb_band=10.0, uncoupled_ratio_jitter=0.05)

    def test_coupled_more_repeatable(self):
        report = run_coupling_comparison(
            ideal_plant_config(**self.BASE), trials=10, seed=0
        )
        assert report.coupled_more_repeatable
        assert report.mean_std_coupled < report.mean_std_uncoupled

    def test_ideal_loop_areas_zero(self):
        report = run_coupling_comparison(ideal_plant_config(), trials=2, seed=0)
        assert report.loop_area_coupled == pytest.approx(0.0, abs=1e-9)
        assert report.loop_area_uncoupled == pytest.approx(0.0, abs=1e-9)

    def test_deterministic(self):
        cfg = ideal_plant_config(**self.BASE)
        r1 = run_coupling_comparison(cfg, trials=4, seed=7)
        r2 = run_coupling_comparison(cfg, trials=4, seed=7)
        assert r1 == r2

    def test_too_few_trials(self):
        with pytest.raises(ValueError):
            run_coupling_comparison(ideal_plant_config(), trials=1)


class TestThermal:
    def test_steady_states_match_published(self):
        plant = Plant(ideal_plant_config())
        report = run_thermal_endurance(plant, duration_hours=5.0, dt=1.0)
        expected = {"fingers": 30.35, "thumb": 46.97, "wrist": 43.80}
        for g in report.groups:
            assert g.steady == pytest.approx(expected[g.group], abs=0.5)

    def test_delta_is_steady_minus_ambient(self):
        plant = Plant(ideal_plant_config())
        report = run_thermal_endurance(plant, duration_hours=0.5, dt=1.0)
        for g in report.groups:
            ambient = DEFAULT_THERMAL[g.group].T_ambient
            assert g.delta == pytest.approx(g.steady - ambient, abs=1e-9)

    def test_no_overshoot(self):
        plant = Plant(ideal_plant_config())
        report = run_thermal_endurance(plant, duration_hours=2.0, dt=1.0)
        for g in report.groups:
            assert g.peak <= g.steady + 1e-9

    def test_log_cadence(self):
        plant = Plant(ideal_plant_config())
        report = run_thermal_endurance(plant, duration_hours=0.1, dt=1.0,
                                       log_every=60.0)
        times = [row[0] for row in report.log]
        assert times == sorted(times)
        assert len(times) == pytest.approx(0.1 * 3600 / 60, abs=2)


class TestExport:
    @pytest.fixture
    def accuracy_report(self):
        return run_accuracy_experiment(
            Plant(ideal_plant_config()), default_true_cals(), n=2, seed=0
        )

    def test_json_round_trip(self, accuracy_report, tmp_path):
        path = tmp_path / "report.json"
        export_report(accuracy_report, "json", path)
        doc = import_report(path)
        assert doc == accuracy_report.to_dict()

    def test_json_byte_deterministic(self, accuracy_report, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        export_report(accuracy_report, "json", p1)
        export_report(accuracy_report, "json", p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_csv_columns_accuracy(self, accuracy_report, tmp_path):
        path = tmp_path / "report.csv"
        export_report(accuracy_report, "csv", path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "joint,mean_abs_error,mean_pct_error,n"
        assert len(lines) == 1 + 7 + 1
        assert lines[-1].startswith("overall,")

    def test_csv_columns_thermal(self, tmp_path):
        report = run_thermal_endurance(Plant(ideal_plant_config()),
                                       duration_hours=0.05, dt=1.0)
        path = tmp_path / "thermal.csv"
        export_report(report, "csv", path)
        assert path.read_text().splitlines()[0] == "group,peak,steady,delta"

    def test_unknown_format(self, accuracy_report, tmp_path):
        with pytest.raises(ValueError):
            export_report(accuracy_report, "xml", tmp_path / "x")


def test_config_hash_stable_and_order_free():
    assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})
    assert len(config_hash({})) == 16
