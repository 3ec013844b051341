"""
Moments Module
First and second moments, the single-mode covariance matrix and its Gaussian functionals
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from cv_models.exceptions import DegenerateCovarianceError, UnphysicalCovarianceError
from cv_models.fock.states import State, check_truncation, embed, quadrature_operators, to_density

PHYSICAL_TOL = 1e-9
DEGENERATE_TOL = 1e-300
# operators are built this many levels above the state so X^2, P^2, XP are exact on it
OPERATOR_PADDING = 2


@dataclass(frozen=True)
class CovarianceMatrix:
    """
    Single-mode means and symmetrized central second moments

    sxx = sigma_x^2, spp = sigma_p^2, sxp = <{x - xbar, p - pbar}> / 2.
    """

    mean: Tuple[float, float]
    sxx: float
    spp: float
    sxp: float
    hbar: float = 1.0

    def __post_init__(self):
        if self.sxx <= 0 or self.spp <= 0:
            raise DegenerateCovarianceError(f"Variances must be positive (got {self.sxx}, {self.spp})")
        object.__setattr__(self, "mean", (float(self.mean[0]), float(self.mean[1])))

    @classmethod
    def from_matrix(cls, gamma: np.ndarray, mean=(0.0, 0.0), hbar: float = 1.0) -> "CovarianceMatrix":
        gamma = np.asarray(gamma, dtype=float)
        return cls(mean, float(gamma[0, 0]), float(gamma[1, 1]), float(0.5 * (gamma[0, 1] + gamma[1, 0])), hbar)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.sxx, self.sxp], [self.sxp, self.spp]])

    @property
    def determinant(self) -> float:
        return float(self.sxx * self.spp - self.sxp ** 2)

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        return self.determinant >= (self.hbar / 2.0) ** 2 - tol


def covariance(state: State, require_adequate: bool = True) -> CovarianceMatrix:
    """
    Covariance matrix from quadrature operator matrices

    Args:
        state: Truncation-adequate pure or mixed state
        require_adequate: Raise TruncationError for states that lost tail weight

    Returns:
        CovarianceMatrix: Means and central second moments
    """
    if require_adequate:
        check_truncation(state)
    rho = to_density(embed(state, state.nmax + OPERATOR_PADDING)).matrix
    x_op, p_op = quadrature_operators(rho.shape[0] - 1, state.hbar)
    x, p = x_op.matrix, p_op.matrix

    def expect(op: np.ndarray) -> float:
        return float(np.real(np.trace(rho @ op)))

    xbar, pbar = expect(x), expect(p)
    sxx = expect(x @ x) - xbar ** 2
    spp = expect(p @ p) - pbar ** 2
    sxp = 0.5 * expect(x @ p + p @ x) - xbar * pbar
    return CovarianceMatrix((xbar, pbar), sxx, spp, sxp, state.hbar)


def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def rotate_covariance(g: CovarianceMatrix, theta: float) -> CovarianceMatrix:
    """
    Covariance of the rotated quadratures x_t = x cos t + p sin t, p_t = -x sin t + p cos t

    Args:
        g: Covariance matrix
        theta: Rotation angle

    Returns:
        CovarianceMatrix: Rotated moments (same determinant)
    """
    rotation = _rotation(theta)
    gamma = rotation @ g.matrix @ rotation.T
    mean = rotation @ np.asarray(g.mean)
    return CovarianceMatrix.from_matrix(gamma, tuple(mean), g.hbar)


def principal_angle(g: CovarianceMatrix) -> float:
    """Angle at which rotate_covariance zeroes sxp (the larger variance lands on x)"""
    return float(0.5 * np.arctan2(2.0 * g.sxp, g.sxx - g.spp))


def correlation_coefficient(g: CovarianceMatrix) -> float:
    return float(g.sxp / np.sqrt(g.sxx * g.spp))


def gaussian_mutual_information(g: CovarianceMatrix) -> float:
    """
    Mutual information of the Gaussian with covariance g

    I_G = 1/2 ln(sxx spp / |gamma|) = -1/2 ln(1 - rho^2)

    Raises:
        DegenerateCovarianceError: if |gamma| vanishes
    """
    det = g.determinant
    if det <= DEGENERATE_TOL:
        raise DegenerateCovarianceError(f"Covariance determinant {det:.3e} is not positive")
    return float(0.5 * np.log(g.sxx * g.spp / det))


def gaussian_purity(g: CovarianceMatrix) -> float:
    """Purity (hbar/2) / sqrt|gamma| of the Gaussian state with covariance g"""
    det = g.determinant
    if not g.is_physical():
        raise UnphysicalCovarianceError(
            f"|gamma| = {det:.6e} is below (hbar/2)^2 = {(g.hbar / 2.0) ** 2:.6e}"
        )
    return float((g.hbar / 2.0) / np.sqrt(det))


def nongaussian_sr_bound(g: CovarianceMatrix, dx: float, dp: float) -> float:
    """
    Lower bound (hbar/2)^2 e^{2(Dx + Dp)} on |gamma| once the marginals' non-Gaussianity is known
    """
    return float((g.hbar / 2.0) ** 2 * np.exp(2.0 * (dx + dp)))
