import numpy as np
import pandas as pd
from pytest import approx, fixture, mark, raises

from cv_models.exceptions import RelationViolation
from cv_models.fock.states import vacuum
from cv_models.gaussian.multimode import GaussianState
from uncertainty_lab.config import NumericsSettings
from uncertainty_lab.experiments import (
    ExperimentResult,
    ExperimentRunner,
    Violation,
    default_concavity_pairs,
    nearest_pure_gaussian_distance,
)

from conftest import LN_PI_E


@fixture
def runner(settings):
    return ExperimentRunner(settings)


def test_unknown_command(runner):
    with raises(ValueError):
        runner.run("teleport")


def test_violations_raise_with_the_state():
    state = vacuum(2)
    result = ExperimentResult("demo", {}, pd.DataFrame(), {}, [Violation("broken", state)])
    assert not result.passed
    with raises(RelationViolation) as info:
        result.raise_for_violations()
    assert info.value.state is state


def test_passive_scan(runner):
    result = runner.run("passive-scan", n_max_photon=3)
    table = result.table
    assert list(table["N"]) == [0, 1, 2, 3]
    assert table["hx_plus_hp"].iloc[0] == approx(LN_PI_E, abs=1e-5)
    assert table["hxp"].iloc[0] == approx(LN_PI_E, abs=1e-5)
    assert (table["joint_slack"] >= -1e-4).all()
    assert (table["mutual_information"] >= -1e-4).all()
    assert result.summary["joint_monotone"]
    assert result.summary["marginal_monotone"]
    assert result.passed
    assert result.started is not None and result.finished >= result.started


def test_random_scan_is_sorted_and_reproducible(runner):
    first = runner.run("random-scan", trials=6, dim=3, seed=9)
    again = runner.run("random-scan", trials=6, dim=3, seed=9)
    assert first.table["rho"].is_monotonic_increasing
    assert (first.table["tight_slack"] >= -1e-4).all()
    pd.testing.assert_frame_equal(first.table, again.table)
    assert first.passed


def test_random_scan_with_workers_matches_serial(settings):
    serial = ExperimentRunner(settings).run("random-scan", trials=4, dim=2, seed=3)
    parallel = ExperimentRunner(settings.with_overrides(workers=2)).run("random-scan", trials=4, dim=2, seed=3)
    pd.testing.assert_frame_equal(serial.table, parallel.table)


def test_one_dimensional_random_states_saturate(runner):
    result = runner.run("random-scan", trials=3, dim=1, seed=1)
    assert result.table["tight_slack"].abs().max() < 1e-5


@mark.parametrize("reference", ["fock", "wavefunction"])
def test_unperturbed_neighborhood_saturates(runner, reference):
    result = runner.run("neighborhood", eps=0.0, trials=2, seed=4, reference=reference)
    assert result.table["tight_slack"].abs().max() < 1e-4
    assert result.passed


def test_neighborhood(runner):
    result = runner.run("neighborhood", trials=4, seed=5)
    assert len(result.table) == 4
    assert result.summary["min_tight_slack"] >= -1e-4


def test_neighborhood_rejects_unknown_reference(runner):
    with raises(ValueError):
        runner.run("neighborhood", trials=1, reference="coherent")


def test_concavity(runner):
    result = runner.run("concavity", lambdas=[0.0, 0.5, 1.0])
    table = result.table
    assert len(table) == 3 * len(default_concavity_pairs())
    endpoints = table[table["lam"].isin([0.0, 1.0])]
    assert endpoints["defect"].abs().max() < 1e-10
    assert result.summary["min_defect"] >= -1e-4
    assert result.passed


def test_concavity_with_custom_pairs(runner):
    first, second = vacuum(3), default_concavity_pairs()[0][2]
    result = runner.run("concavity", pairs=[("custom", first, second)], lambdas=[0.25])
    assert list(result.table["label"]) == ["custom"]


def test_counterexample_search_reports_without_asserting(runner):
    result = runner.run("counterexample", dim=2, restarts=2, seed=8, max_iter=60)
    assert list(result.table["restart"]) == [0, 1]
    assert result.summary["best_slack"] >= -1e-4
    assert result.passed
    assert "counterexample_best_state" in result.states
    assert set(result.report["traces"]) == {0, 1}
    assert result.report["nearest_pure_gaussian_distance"] >= 0
    again = runner.run("counterexample", dim=2, restarts=2, seed=8, max_iter=60)
    assert again.summary["best_slack"] == result.summary["best_slack"]


def test_counterexample_search_needs_two_amplitudes(runner):
    with raises(ValueError):
        runner.run("counterexample", dim=1, restarts=1)


def test_nearest_pure_gaussian_distance():
    assert nearest_pure_gaussian_distance(0.5 * np.eye(2), 1.0) == approx(0.0)
    assert nearest_pure_gaussian_distance(np.eye(2), 1.0) == approx(np.sqrt(2) * 0.5)


def test_gaussian_saturation(runner):
    r = float(np.log(1.5))
    result = runner.run("gaussian-saturation", r_grid=[0.0, r], theta_grid=[np.pi / 4])
    row = result.table.iloc[-1]
    assert row["bbm_slack"] == approx(0.29805, abs=2e-4)
    assert abs(row["tight_slack"]) < 1e-4
    assert result.table["eigencheck_residual"].max() < 1e-7
    assert result.table.iloc[0]["bbm_slack"] == approx(0.0, abs=1e-6)
    assert result.passed


@mark.slow
def test_gaussian_saturation_full_sweep(default_settings):
    result = ExperimentRunner(default_settings).run("gaussian-saturation")
    assert len(result.table) == 25
    assert result.passed


def test_multimode(runner):
    result = runner.run("multimode", r_grid=[0.0, 0.5], trials=5, modes=3, seed=2)
    table = result.table
    assert len(table) == 2 * 2 + 5
    pair = table[(table["kind"] == "rotated_pair") & (table["r"] == 0.5)].iloc[0]
    assert pair["nmode_bbm_slack"] == approx(2 * np.log(np.cosh(1.0)), abs=1e-12)
    assert result.passed


def test_hygiene(default_settings):
    result = ExperimentRunner(default_settings).run("hygiene")
    assert set(result.table["state"]) == {"vacuum", "fock_1", "squeezed", "passive_5", "haar_4"}
    assert result.summary["max_grid_drift"] < 1e-6
    assert result.summary["max_nmax_drift"] < 1e-5
    assert result.passed


def test_check(runner):
    result = runner.run("check", state=vacuum(3))
    assert "tight_epur" in set(result.table["relation"])
    assert result.passed
    assert "bbm" in result.summary["saturated"]


def test_multimode_violation_carries_the_gamma(monkeypatch, runner):
    monkeypatch.setattr("uncertainty_lab.experiments.nmode_a_expectation", lambda g: -1.0)
    result = runner.run("multimode", r_grid=[], trials=1, modes=1, seed=0)
    assert not result.passed
    assert isinstance(result.violations[0].state, GaussianState)


@mark.slow
@mark.parametrize(
    "command, params",
    [
        ("passive-scan", {"n_max_photon": 20}),
        ("random-scan", {"trials": 1000, "dim": 4, "seed": 42}),
        ("neighborhood", {"trials": 500, "seed": 42}),
        ("concavity", {}),
        ("counterexample", {"dim": 6, "restarts": 50, "seed": 42}),
        ("multimode", {"trials": 200, "modes": 4, "seed": 42}),
    ],
)
def test_acceptance_runs(default_settings, command, params):
    result = ExperimentRunner(default_settings).run(command, **params)
    if command == "counterexample":
        assert result.summary["best_slack"] >= -1e-4
    else:
        assert result.passed


def test_settings_are_not_mutated(runner):
    before = runner.settings.as_dict()
    runner.run("random-scan", trials=1, dim=2, seed=0)
    assert runner.settings.as_dict() == before
    assert isinstance(runner.settings, NumericsSettings)
