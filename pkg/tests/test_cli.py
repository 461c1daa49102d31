"""Command-line interface: subcommands, exit codes, artifacts."""

import json

import pytest

from graspforce.cli import main

ANTIPODAL = {
    "contacts": [
        {"position": [0.0, 0.03, 0.0], "normal": [0.0, -1.0, 0.0], "mu": 0.5},
        {"position": [0.0, -0.03, 0.0], "normal": [0.0, 1.0, 0.0], "mu": 0.5},
    ]
}


def write_json(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


@pytest.fixture()
def scenario_file(tmp_path):
    return write_json(
        tmp_path / "tape.json",
        {"object": "tape_roll", "offset": 0.005, "sensors": {"noise": False}},
    )


class TestTopLevel:
    def test_version_exits_clean(self, capsys):
        assert main(["--version"]) == 0
        assert "graspforce" in capsys.readouterr().out

    def test_help_exits_clean(self):
        assert main(["--help"]) == 0

    def test_missing_subcommand_is_usage_error(self):
        assert main([]) == 2

    def test_unknown_subcommand_is_usage_error(self):
        assert main(["plot"]) == 2


class TestRun:
    def test_valid_scenario(self, scenario_file, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["run", scenario_file, "--out-dir", str(out)])
        captured = capsys.readouterr()
        assert code == 0
        assert (out / "tape.csv").exists()
        assert "displacement (ground truth)" in captured.out
        assert "displacement (joint proxy)" in captured.out

    def test_missing_scenario_file(self, tmp_path, capsys):
        code = main(["run", str(tmp_path / "nope.json")])
        assert code == 2
        assert "nope.json" in capsys.readouterr().err

    def test_unknown_override_key(self, scenario_file, tmp_path, capsys):
        code = main(["run", scenario_file, "--out-dir", str(tmp_path / "o"),
                     "--set", "control.bogus=1"])
        assert code == 2
        assert "control.bogus" in capsys.readouterr().err

    def test_pathological_config_faults(self, scenario_file, tmp_path, capsys):
        code = main(["run", scenario_file, "--out-dir", str(tmp_path / "o"),
                     "--set", "plant.gravity=NaN"])
        assert code == 1
        assert "fault" in capsys.readouterr().err

    def test_seed_flag_overrides_scenario(self, scenario_file, tmp_path, capsys):
        out = tmp_path / "a"
        main(["run", scenario_file, "--out-dir", str(out), "--seed", "3",
              "--set", "sensors.noise=true"])
        first = (out / "tape.csv").read_bytes()
        out2 = tmp_path / "b"
        main(["run", scenario_file, "--out-dir", str(out2), "--seed", "3",
              "--set", "sensors.noise=true"])
        assert (out2 / "tape.csv").read_bytes() == first


class TestClosure:
    def test_antipodal_with_friction(self, tmp_path, capsys):
        code = main(["closure", write_json(tmp_path / "c.json", ANTIPODAL)])
        out = capsys.readouterr().out
        assert code == 0
        assert "force-closure: yes" in out
        assert "margin" in out

    def test_frictionless_pair_is_no_closure(self, tmp_path, capsys):
        payload = {"contacts": [dict(c, mu=0.0, mu_tau=0.0) for c in ANTIPODAL["contacts"]]}
        code = main(["closure", write_json(tmp_path / "c.json", payload)])
        assert code == 3
        assert "force-closure: no" in capsys.readouterr().out

    def test_single_contact_is_no_closure(self, tmp_path, capsys):
        payload = {"contacts": ANTIPODAL["contacts"][:1]}
        assert main(["closure", write_json(tmp_path / "c.json", payload)]) == 3

    def test_malformed_contact_file(self, tmp_path, capsys):
        payload = {"contacts": [{"position": [0.0, 0.0, 0.0]}]}
        code = main(["closure", write_json(tmp_path / "c.json", payload)])
        assert code == 2
        assert "malformed" in capsys.readouterr().err

    def test_empty_contact_list(self, tmp_path, capsys):
        code = main(["closure", write_json(tmp_path / "c.json", {"contacts": []})])
        assert code == 2

    def test_sides_validated(self, tmp_path, capsys):
        code = main(["closure", write_json(tmp_path / "c.json", ANTIPODAL), "--sides", "2"])
        assert code == 2


class TestCalibrate:
    def test_reports_residual(self, capsys):
        code = main(["calibrate", "--samples", "200", "--seed", "1"])
        out = capsys.readouterr().out
        assert code == 0
        assert "true bias" in out
        assert "residual" in out

    def test_sample_count_validated(self, capsys):
        assert main(["calibrate", "--samples", "0"]) == 2


class TestExperiments:
    def test_exp_a_writes_reports(self, tmp_path, capsys):
        out = tmp_path / "expa"
        code = main(["exp-a", "--out-dir", str(out)])
        captured = capsys.readouterr()
        assert code == 0
        trials = (out / "exp_a_trials.csv").read_text().splitlines()
        assert len(trials) == 91  # header + full grid
        assert (out / "exp_a_summary.csv").exists()
        assert "tape_roll" in captured.out
        assert "90 trials" in captured.out

    def test_exp_b_writes_series_and_metrics(self, tmp_path, capsys):
        out = tmp_path / "expb"
        code = main(["exp-b", "--out-dir", str(out)])
        captured = capsys.readouterr()
        assert code == 0
        series = sorted(p.name for p in out.glob("exp_b_*.csv"))
        assert (out / "exp_b_metrics.csv").exists()
        assert len(series) == 9  # 2 scenarios x 4 variants + the metrics table
        assert "rotation" in captured.out
