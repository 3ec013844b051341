import numpy as np
import hypothesis.strategies as st
from hypothesis import given, settings
from pytest import approx, mark, raises

from cv_models.exceptions import DegenerateCovarianceError
from cv_models.fock.states import GaussianUnitarySpec, squeezed_vacuum, vacuum
from cv_models.gaussian.multimode import GaussianState, random_physical_gamma
from cv_models.moments.covariance import CovarianceMatrix, covariance
from cv_models.variational.eigencheck import a_operator, a_residual, eigencheck, nmode_a_expectation


def test_vacuum_operator_is_the_number_operator():
    a = a_operator(covariance(vacuum(6)), 6)
    assert np.allclose(a, np.diag(2 * np.arange(7) + 1.0))


def test_degenerate_covariance_is_rejected():
    with raises(DegenerateCovarianceError):
        a_operator(CovarianceMatrix((0.0, 0.0), 1.0, 1.0, 1.0), 4)


@mark.parametrize("r", [0.0, 0.3, 0.8])
@mark.parametrize("phi", [0.0, 1.0, np.pi / 2, 4.0])
def test_squeezed_vacuum_is_an_eigenvector(r, phi):
    report = eigencheck(GaussianUnitarySpec(r=r, phi=phi), 80)
    assert report.residual < 1e-7
    assert report.gamma_discrepancy < 1e-8
    assert report.tail_weight < 1e-10
    assert report.full_residual >= report.residual


def test_displaced_squeezed_vacuum_is_an_eigenvector():
    state = squeezed_vacuum(GaussianUnitarySpec(r=0.4, phi=0.5, alpha=0.3 + 0.2j), 60)
    assert a_residual(covariance(state), state) < 1e-7


def test_report_row():
    row = eigencheck(GaussianUnitarySpec(r=0.2), 40).as_row()
    assert set(row) == {"r", "phi", "nmax", "residual", "full_residual", "tail_weight", "gamma_discrepancy"}
    assert row["nmax"] == 40


def test_short_truncation_can_be_diagnosed():
    report = eigencheck(GaussianUnitarySpec(r=0.8), 12, check_truncation=False)
    assert report.tail_weight > 1e-10
    assert report.full_residual > report.residual


@settings(max_examples=20, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 2 ** 32 - 1))
def test_nmode_expectation_counts_the_modes(n, seed):
    assert nmode_a_expectation(random_physical_gamma(n, seed)) == approx(n, abs=1e-9)


def test_nmode_expectation_on_vacuum():
    assert nmode_a_expectation(GaussianState.vacuum(3)) == approx(3.0)
