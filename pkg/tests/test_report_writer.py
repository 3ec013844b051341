import json
from datetime import datetime

import pandas as pd
import plotly.graph_objects as go
from pytest import raises

from cv_models.fock.states import vacuum
from uncertainty_lab import __version__
from uncertainty_lab.config import NumericsSettings
from uncertainty_lab.utils.plotting import figure_for
from uncertainty_lab.utils.report_writer import ReportWriter


def _table():
    return pd.DataFrame({"N": [0, 1], "label": ["a, b", "c"], "slack": [0.0, float("nan")]})


def test_csv_table_has_one_header_row(tmp_path):
    path = ReportWriter(tmp_path, "csv").write_table("demo", _table())
    lines = path.read_text().splitlines()
    assert lines[0] == "N,label,slack"
    assert lines[1].startswith('0,"a, b"')
    assert len(lines) == 3


def test_json_table_is_a_list_of_records(tmp_path):
    path = ReportWriter(tmp_path, "json").write_table("demo", _table())
    records = json.loads(path.read_text())
    assert records[0] == {"N": 0, "label": "a, b", "slack": 0.0}
    assert records[1]["slack"] is None


def test_unknown_format(tmp_path):
    with raises(ValueError):
        ReportWriter(tmp_path, "xlsx")


def test_manifest_contents(tmp_path):
    writer = ReportWriter(tmp_path / "nested")
    path = writer.write_manifest(
        "demo", {"trials": 3}, NumericsSettings(), {"violations": 0}, datetime(2024, 1, 1), datetime(2024, 1, 2)
    )
    manifest = json.loads(path.read_text())
    assert path.name == "demo_manifest.json"
    assert manifest["parameters"] == {"trials": 3}
    assert manifest["settings"]["nmax"] == 64
    assert manifest["versions"]["uncertainty_lab"] == __version__
    assert set(manifest["versions"]) >= {"numpy", "scipy", "pandas", "python"}
    assert manifest["started"] == "2024-01-01T00:00:00"


def test_state_is_written_for_replay(tmp_path):
    path = ReportWriter(tmp_path).write_state("replay", vacuum(2))
    assert json.loads(path.read_text())["amplitudes"][0] == [1.0, 0.0]


def test_figures_for_known_commands():
    table = pd.DataFrame({"restart": [0, 1], "final_slack": [0.1, 0.2]})
    assert isinstance(figure_for("counterexample", table), go.Figure)
    assert figure_for("counterexample", table.iloc[0:0]) is None
    assert figure_for("unknown", table) is None
