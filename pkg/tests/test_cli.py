import json

import pandas as pd
from pytest import fixture, raises

from cv_models.fock.states import vacuum
from uncertainty_lab import cli
from uncertainty_lab.experiments import ExperimentResult, Violation
from uncertainty_lab.utils.state_io import save_state


@fixture
def out_dir(tmp_path):
    return tmp_path / "results"


def test_parser_shared_flags(out_dir):
    args = cli.build_parser().parse_args(
        ["random-scan", "--trials", "3", "--dim", "2", "--nmax", "12", "--hbar", "2", "--format", "json", "--out", str(out_dir)]
    )
    settings = cli.settings_from_args(args)
    assert args.command == "random-scan"
    assert settings.nmax == 12
    assert settings.hbar == 2.0
    assert cli.command_params(args, settings) == {"trials": 3, "dim": 2, "seed": 42}


def test_parser_rejects_unknown_subcommand():
    with raises(SystemExit):
        cli.build_parser().parse_args(["teleport"])


def test_grid_lists_are_parsed():
    args = cli.build_parser().parse_args(["gaussian-saturation", "--r-grid", "0,0.2", "--theta-grid", "0.5"])
    assert args.r_grid == [0.0, 0.2]
    assert args.theta_grid == [0.5]


def test_random_scan_writes_table_and_manifest(out_dir):
    code = cli.main(["random-scan", "--trials", "3", "--dim", "2", "--grid-points", "1024", "--out", str(out_dir)])
    assert code == cli.EXIT_OK
    table = pd.read_csv(out_dir / "random-scan.csv")
    assert len(table) == 3
    manifest = json.loads((out_dir / "random-scan_manifest.json").read_text())
    assert manifest["parameters"]["trials"] == 3
    assert manifest["settings"]["grid_points"] == 1024
    assert manifest["summary"]["violations"] == 0


def test_check_reads_a_state_file(tmp_path, out_dir):
    path = save_state(vacuum(3, hbar=2.0), tmp_path / "vacuum.json")
    code = cli.main(["check", str(path), "--no-joint", "--format", "json", "--out", str(out_dir)])
    assert code == cli.EXIT_OK
    rows = json.loads((out_dir / "check.json").read_text())
    assert {row["relation"] for row in rows} >= {"bbm", "tight_epur"}
    manifest = json.loads((out_dir / "check_manifest.json").read_text())
    assert manifest["settings"]["hbar"] == 2.0


def test_malformed_state_file_is_invalid_input(tmp_path, out_dir):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"hbar": 1.0}))
    assert cli.main(["check", str(path), "--out", str(out_dir)]) == cli.EXIT_INVALID


def test_invalid_configuration(out_dir):
    assert cli.main(["hygiene", "--hbar", "-1", "--out", str(out_dir)]) == cli.EXIT_INVALID


def test_violation_exits_nonzero_and_saves_the_state(monkeypatch, out_dir):
    state = vacuum(2)

    def fake_run(self, command, **params):
        return ExperimentResult(command, params, pd.DataFrame({"x": [1]}), {"violations": 1}, [Violation("broken", state)])

    monkeypatch.setattr(cli.ExperimentRunner, "run", fake_run)
    code = cli.main(["hygiene", "--out", str(out_dir)])
    assert code == cli.EXIT_VIOLATION
    replay = json.loads((out_dir / "hygiene_violation_state.json").read_text())
    assert replay["amplitudes"][0] == [1.0, 0.0]
    assert (out_dir / "hygiene.csv").exists()


def test_counterexample_writes_report_and_best_state(out_dir):
    code = cli.main(
        ["counterexample", "--dim", "2", "--restarts", "1", "--max-iter", "20", "--grid-points", "1024", "--out", str(out_dir)]
    )
    assert code == cli.EXIT_OK
    report = json.loads((out_dir / "counterexample_report.json").read_text())
    assert "best_slack" in report
    assert (out_dir / "counterexample_best_state.json").exists()
