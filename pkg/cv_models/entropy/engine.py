"""
Entropy Engine Module
Differential and joint entropies, entropy powers and non-Gaussianity, all in nats
"""

from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy.integrate import trapezoid

from cv_models.exceptions import DegenerateCovarianceError, NormalizationError, WignerNegativeError
from cv_models.phase_space.quad_rep import Density1D, WignerGrid, min_wigner, negative_mass

DENSITY_FLOOR = 1e-300
NORMALIZATION_TOL = 1e-4
NONGAUSSIANITY_CLAMP = 1e-6


@dataclass(frozen=True)
class JointEntropyReport:
    """Joint entropy together with what the negativity gate clipped"""

    value: float
    min_value: float
    clipped_mass: float


def _plogp(values: np.ndarray) -> np.ndarray:
    # p ln p -> 0 below the floor (and for the clipped negative samples)
    safe = np.where(values > DENSITY_FLOOR, values, 1.0)
    return np.where(values > DENSITY_FLOOR, values * np.log(safe), 0.0)


def differential_entropy(d: Density1D) -> float:
    """
    Shannon differential entropy h = -int d ln d

    Args:
        d: Normalized density on a uniform grid

    Returns:
        float: Entropy in nats
    """
    integral = d.integral()
    if abs(integral - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError(f"Density integrates to {integral:.6f}, expected 1")
    return float(-trapezoid(_plogp(d.values), dx=d.grid.spacing))


def joint_entropy_report(w: WignerGrid, neg_tol: float = 1e-9) -> JointEntropyReport:
    """
    Joint entropy of a nonnegative Wigner function with the gate diagnostics

    Args:
        w: Sampled Wigner function
        neg_tol: Largest tolerated negative sample magnitude

    Returns:
        JointEntropyReport: Entropy, minimum sample and clipped negative mass

    Raises:
        WignerNegativeError: if some sample is below -neg_tol
    """
    lowest = min_wigner(w)
    if lowest < -neg_tol:
        raise WignerNegativeError(
            f"Wigner function has negative values (min {lowest:.3e} < -{neg_tol:.1e})",
            min_value=lowest,
        )
    clipped = negative_mass(w)
    if clipped > 0:
        logger.warning(f"Clipped negative Wigner mass {clipped:.3e} from the joint entropy")
    inner = trapezoid(_plogp(w.values), dx=w.pgrid.spacing, axis=1)
    value = float(-trapezoid(inner, dx=w.xgrid.spacing))
    return JointEntropyReport(value=value, min_value=lowest, clipped_mass=clipped)


def joint_entropy(w: WignerGrid, neg_tol: float = 1e-9) -> float:
    return joint_entropy_report(w, neg_tol).value


def entropy_power(h: float) -> float:
    """Variance of the Gaussian with entropy h: N = e^{2h} / (2 pi e)"""
    return float(np.exp(2.0 * h) / (2.0 * np.pi * np.e))


def gaussian_entropy_1d(variance: float) -> float:
    if variance <= 0:
        raise DegenerateCovarianceError(f"Gaussian entropy needs a positive variance (got {variance})")
    return float(0.5 * np.log(2.0 * np.pi * np.e * variance))


def nongaussianity(h: float, variance: float) -> float:
    """
    Relative-entropy non-Gaussianity D = h(x_G) - h(x) = 1/2 ln(variance / N)

    Negative values are clamped to zero; those beyond numerical noise are logged.
    """
    if variance <= 0:
        raise DegenerateCovarianceError(f"Non-Gaussianity needs a positive variance (got {variance})")
    value = float(0.5 * np.log(variance) + 0.5 * np.log(2.0 * np.pi * np.e) - h)
    if value < -NONGAUSSIANITY_CLAMP:
        logger.warning(f"⚠️ Clamping non-Gaussianity {value:.3e} to 0: entropy exceeds its Gaussian bound")
    elif value < 0:
        logger.debug(f"Clamping non-Gaussianity {value:.3e} to 0")
    return max(value, 0.0)


def relative_entropy_to_gaussian(d: Density1D) -> float:
    """
    D(d || g) against the moment-matched Gaussian, integrated on the density's grid

    Args:
        d: Normalized density

    Returns:
        float: Relative entropy in nats
    """
    mean = d.mean()
    variance = d.variance()
    if variance <= 0:
        raise DegenerateCovarianceError("Density has zero variance")
    x = d.grid.points
    log_g = -0.5 * (x - mean) ** 2 / variance - 0.5 * np.log(2.0 * np.pi * variance)
    integrand = _plogp(d.values) - np.where(d.values > DENSITY_FLOOR, d.values * log_g, 0.0)
    return float(trapezoid(integrand, dx=d.grid.spacing))


def mutual_information(hx: float, hp: float, hxp: float) -> float:
    return float(hx + hp - hxp)
