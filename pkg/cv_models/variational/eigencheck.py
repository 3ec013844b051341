"""
Variational Eigencheck Module
Checks that a squeezed vacuum is an eigenvector of A = 1/2 r^T gamma^-1 r with eigenvalue 1
"""

from dataclasses import dataclass

import numpy as np
from loguru import logger

from cv_models.exceptions import DegenerateCovarianceError
from cv_models.fock.states import (
    FockVector,
    GaussianUnitarySpec,
    embed,
    quadrature_operators,
    squeezed_vacuum,
)
from cv_models.gaussian.multimode import GaussianState, single_mode_gamma
from cv_models.moments.covariance import DEGENERATE_TOL, OPERATOR_PADDING, CovarianceMatrix, covariance


@dataclass(frozen=True)
class EigencheckReport:
    """
    Residuals of A psi = psi for one squeezed vacuum

    residual covers the rows where the truncated operator acts exactly on the
    truncated state; full_residual includes the rows at the truncation edge.
    """

    r: float
    phi: float
    nmax: int
    residual: float
    full_residual: float
    tail_weight: float
    gamma_discrepancy: float

    def as_row(self) -> dict:
        return {
            "r": self.r,
            "phi": self.phi,
            "nmax": self.nmax,
            "residual": self.residual,
            "full_residual": self.full_residual,
            "tail_weight": self.tail_weight,
            "gamma_discrepancy": self.gamma_discrepancy,
        }


def a_operator(g: CovarianceMatrix, nmax: int) -> np.ndarray:
    """
    A = (X'^2 spp + P'^2 sxx - {X', P'} sxp) / (2 |gamma|) with X' = X - xbar, P' = P - pbar

    Products are taken on a padded space and cut back, so the result is the exact
    compression of A onto |0>..|nmax>.

    Args:
        g: Covariance matrix (means included)
        nmax: Highest Fock level

    Returns:
        array: Hermitian (nmax + 1) x (nmax + 1) matrix
    """
    det = g.determinant
    if det <= DEGENERATE_TOL:
        raise DegenerateCovarianceError(f"Covariance determinant {det:.3e} is not positive")
    x_op, p_op = quadrature_operators(nmax + OPERATOR_PADDING, g.hbar)
    identity = np.eye(nmax + 1 + OPERATOR_PADDING)
    x = x_op.matrix - g.mean[0] * identity
    p = p_op.matrix - g.mean[1] * identity
    a = (g.spp * (x @ x) + g.sxx * (p @ p) - g.sxp * (x @ p + p @ x)) / (2.0 * det)
    a = a[: nmax + 1, : nmax + 1]
    return 0.5 * (a + a.conj().T)


def _residual_vector(g: CovarianceMatrix, state: FockVector) -> np.ndarray:
    padded = embed(state, state.nmax + OPERATOR_PADDING).amplitudes
    return a_operator(g, padded.size - 1) @ padded - padded


def a_residual(g: CovarianceMatrix, state: FockVector) -> float:
    """Norm of (A - 1) psi over the rows unaffected by truncating psi"""
    interior = max(state.nmax - 1, 1)
    return float(np.linalg.norm(_residual_vector(g, state)[:interior]))


def eigencheck(
    spec: GaussianUnitarySpec, nmax: int, hbar: float = 1.0, check_truncation: bool = True
) -> EigencheckReport:
    """
    Build the squeezed state, measure its covariance and test A psi = psi

    Args:
        spec: Squeezing specification
        nmax: Fock truncation
        hbar: Action unit
        check_truncation: Raise TruncationError below adequacy; pass False for refinement sweeps

    Returns:
        EigencheckReport: Residuals and truncation diagnostics
    """
    psi = squeezed_vacuum(spec, nmax, hbar, check_truncation=check_truncation)
    g = covariance(psi, require_adequate=check_truncation)
    vector = _residual_vector(g, psi)
    expected = single_mode_gamma(spec.r, spec.theta, hbar)
    report = EigencheckReport(
        r=spec.r,
        phi=spec.phi,
        nmax=nmax,
        residual=float(np.linalg.norm(vector[: max(nmax - 1, 1)])),
        full_residual=float(np.linalg.norm(vector)),
        tail_weight=psi.tail_weight,
        gamma_discrepancy=float(np.max(np.abs(g.matrix - expected))),
    )
    logger.debug(
        f"Eigencheck r={spec.r:.3f} phi={spec.phi:.3f} nmax={nmax}: "
        f"residual {report.residual:.2e}, edge {report.full_residual:.2e}"
    )
    return report


def nmode_a_expectation(g: GaussianState) -> float:
    """<1/2 (r - rbar)^T gamma^-1 (r - rbar)> = 1/2 tr(gamma^-1 gamma), which equals the mode count"""
    return float(0.5 * np.trace(np.linalg.solve(g.gamma, g.gamma)))
