import numpy as np
import hypothesis.strategies as st
from hypothesis import given, settings as hypothesis_settings
from pytest import approx, mark

from cv_models.fock.states import (
    GaussianUnitarySpec,
    displace,
    extremal_passive_state,
    fock_state,
    haar_random_state,
    squeezed_vacuum,
    vacuum,
)
from cv_models.moments.covariance import covariance
from cv_models.relations.verdicts import (
    RelationVerdict,
    bbm,
    epur,
    full_report,
    heisenberg,
    implication_chain,
    joint_conjecture,
    make_verdict,
    nongaussianity_relation,
    profile_state,
    purity_form,
    schrodinger_robertson,
    tight_epur,
    uncertainty_functional,
)
from uncertainty_lab.config import NumericsSettings

from conftest import LN_PI_E


def test_make_verdict_slack_and_saturation():
    verdict = make_verdict("demo", 1.00001, 1.0, 1e-4)
    assert verdict.slack == approx(1e-5)
    assert verdict.saturated
    assert verdict.holds(0.0)
    assert not make_verdict("demo", 0.9, 1.0, 1e-4).holds(1e-4)


def test_inapplicable_verdict_always_holds():
    verdict = RelationVerdict("joint", float("nan"), 1.0, float("nan"), False, applicable=False)
    assert verdict.holds(1e-4)
    assert verdict.power_slack is None


def test_as_row_flattens_details():
    row = make_verdict("demo", 2.0, 1.0, 1e-4, details={"extra": 3.0}).as_row()
    assert row["relation"] == "demo"
    assert row["slack"] == approx(1.0)
    assert row["extra"] == 3.0


def test_vacuum_saturates_every_variance_relation(vacuum_state):
    g = covariance(vacuum_state)
    assert heisenberg(g).saturated
    assert schrodinger_robertson(g).slack == approx(0.0, abs=1e-14)


def test_bbm_power_form_on_vacuum(vacuum_state, settings):
    profile = profile_state(vacuum_state, settings)
    verdict = bbm(profile.hx, profile.hp, profile.hbar)
    assert verdict.saturated
    assert verdict.lhs == approx(LN_PI_E, abs=1e-9)
    assert verdict.power_slack == approx(0.0, abs=1e-9)
    assert epur(profile.nx, profile.np_).saturated


@mark.parametrize("hbar", [0.5, 2.0])
def test_bbm_bound_scales_with_hbar(hbar):
    cfg = NumericsSettings(hbar=hbar, grid_points=1024)
    profile = profile_state(vacuum(3, hbar), cfg)
    assert bbm(profile.hx, profile.hp, hbar).slack == approx(0.0, abs=1e-9)


def test_tight_relation_closes_the_marginal_gap(squeezed_state, settings):
    r = np.log(1.5)
    profile = profile_state(squeezed_state, settings)
    tight = tight_epur(profile, settings)
    gap = bbm(profile.hx, profile.hp, profile.hbar).slack
    assert abs(tight.slack) < 1e-4
    assert tight.saturated
    assert gap == approx(np.log(np.cosh(2 * r)), abs=2e-4)
    assert gap == approx(0.29805, abs=2e-4)
    assert tight.power_slack == approx(0.0, abs=1e-4)


@hypothesis_settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), dim=st.integers(2, 4))
def test_tight_relation_holds_for_random_states(seed, dim):
    cfg = NumericsSettings(grid_points=1024)
    state = haar_random_state(dim, dim - 1, seed)
    profile = profile_state(state, cfg)
    assert tight_epur(profile, cfg).slack >= -1e-4
    assert implication_chain(profile, cfg).holds(1e-4)


def test_joint_relation_saturates_on_vacuum(vacuum_state, settings):
    verdict = joint_conjecture(vacuum_state, settings)
    assert verdict.applicable
    assert verdict.slack == approx(0.0, abs=1e-5)
    assert verdict.details["mutual_information"] == approx(0.0, abs=1e-5)


@mark.parametrize("r, phi", [(0.2, 1.0), (0.5, 1.0), (0.8, 1.0), (0.8, np.pi / 2)])
def test_joint_relation_saturates_on_squeezed_vacua(r, phi, settings):
    verdict = joint_conjecture(squeezed_vacuum(GaussianUnitarySpec(r=r, phi=phi), 64), settings)
    assert verdict.applicable
    assert abs(verdict.slack) < 1e-4
    assert verdict.details["negativity_gate"] >= settings.neg_tol


def test_joint_relation_is_inapplicable_for_negative_wigner(settings):
    verdict = joint_conjecture(fock_state(1, 3), settings)
    assert not verdict.applicable
    assert verdict.details["min_wigner"] < 0
    assert verdict.details["negativity_gate"] == settings.neg_tol
    assert verdict.holds(1e-4)


def test_joint_relation_on_passive_state(settings):
    verdict = joint_conjecture(extremal_passive_state(2, 3), settings)
    assert verdict.applicable
    assert verdict.slack >= -1e-4
    assert verdict.details["mutual_information"] >= -1e-4


def test_implication_chain_links(settings):
    report = implication_chain(extremal_passive_state(3, 4), settings)
    assert [v.name for v in report.verdicts] == [
        "variances_over_powers",
        "powers_over_vacuum",
        "determinant_over_scaled_powers",
        "scaled_powers_over_vacuum",
        "nongaussian_determinant",
    ]
    assert report.holds(1e-4)
    assert report.worst().slack == min(v.slack for v in report.verdicts)
    assert set(report.by_name()) == {v.name for v in report.verdicts}


def test_functional_is_minimized_by_gaussian_states(vacuum_state, squeezed_state, settings):
    assert uncertainty_functional(vacuum_state, settings) == approx(LN_PI_E, abs=1e-9)
    assert uncertainty_functional(squeezed_state, settings) == approx(LN_PI_E, abs=1e-4)
    assert uncertainty_functional(fock_state(2, 3), settings) > LN_PI_E


def test_nongaussianity_and_purity_forms_hold(settings):
    profile = profile_state(extremal_passive_state(1, 3), settings)
    assert nongaussianity_relation(profile).slack >= -1e-4
    assert purity_form(profile).slack >= -1e-4


@mark.parametrize(
    "state",
    [extremal_passive_state(1, 3), haar_random_state(4, 3, seed=5), squeezed_vacuum(GaussianUnitarySpec(r=0.4, phi=0.7), 48)],
)
def test_purity_form_matches_the_tight_relation(state, settings):
    profile = profile_state(state, settings)
    assert purity_form(profile).slack == approx(tight_epur(profile, settings).slack, abs=1e-10)


def test_displacement_leaves_entropies_and_slacks_unchanged(settings):
    state = squeezed_vacuum(GaussianUnitarySpec(r=0.4, phi=0.7), 64)
    shifted = displace(state, 0.5 - 0.3j)
    before, after = profile_state(state, settings), profile_state(shifted, settings)
    assert after.hx == approx(before.hx, abs=1e-8)
    assert after.hp == approx(before.hp, abs=1e-8)
    reports = full_report(state, settings, include_joint=False), full_report(shifted, settings, include_joint=False)
    for original, moved in zip(*reports):
        assert moved.name == original.name
        assert moved.slack == approx(original.slack, abs=1e-8)


def test_full_report_order(settings):
    verdicts = full_report(squeezed_vacuum(GaussianUnitarySpec(r=0.3, phi=0.7), 40), settings)
    names = [v.name for v in verdicts]
    assert names[:8] == [
        "heisenberg",
        "schrodinger_robertson",
        "bbm",
        "epur",
        "tight_epur",
        "nongaussianity",
        "purity_form",
        "joint_conjecture",
    ]
    assert len(names) == 13
    assert all(v.holds(1e-4) for v in verdicts)


def test_full_report_can_skip_the_joint_relation(vacuum_state, settings):
    names = [v.name for v in full_report(vacuum_state, settings, include_joint=False)]
    assert "joint_conjecture" not in names
