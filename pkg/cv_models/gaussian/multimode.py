"""
Multimode Gaussian Module
Closed-form n-mode Gaussian states: symplectic algebra, joint entropies and the n-mode relations

Phase-space vectors are interleaved (x1, p1, ..., xn, pn); block order (x1..xn, p1..pn)
only appears through to_block_order / to_interleaved.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.linalg import block_diag

from cv_models.exceptions import (
    DegenerateCovarianceError,
    DimensionMismatchError,
    InvalidDimensionError,
    UnphysicalCovarianceError,
)
from cv_models.fock.states import haar_unitary
from cv_models.moments.covariance import CovarianceMatrix
from cv_models.relations.verdicts import ChainReport, RelationVerdict, make_verdict

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-9
SYMPLECTIC_TOL = 1e-10
CLOSED_FORM_TOL = 1e-8


def symplectic_form(n: int) -> np.ndarray:
    """Interleaved symplectic form: n copies of [[0, 1], [-1, 0]] on the diagonal"""
    if n < 1:
        raise InvalidDimensionError(f"Mode count must be at least 1 (got {n})")
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _block_permutation(n: int) -> np.ndarray:
    # row k of the result picks the interleaved index of the k-th block coordinate
    order = np.concatenate([np.arange(0, 2 * n, 2), np.arange(1, 2 * n, 2)])
    return np.eye(2 * n)[order]


def to_block_order(matrix: np.ndarray) -> np.ndarray:
    """Re-express an interleaved 2n x 2n matrix in (x1..xn, p1..pn) order"""
    matrix = np.asarray(matrix, dtype=float)
    perm = _block_permutation(matrix.shape[0] // 2)
    return perm @ matrix @ perm.T


def to_interleaved(matrix: np.ndarray) -> np.ndarray:
    """Inverse of to_block_order"""
    matrix = np.asarray(matrix, dtype=float)
    perm = _block_permutation(matrix.shape[0] // 2)
    return perm.T @ matrix @ perm


def _mode_count(matrix: np.ndarray) -> int:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
        raise InvalidDimensionError(f"Expected a 2n x 2n matrix (got shape {matrix.shape})")
    return matrix.shape[0] // 2


def is_physical(gamma: np.ndarray, hbar: float = 1.0, tol: float = PHYSICAL_TOL) -> bool:
    """gamma + i (hbar/2) Omega is positive semidefinite within tol"""
    gamma = np.asarray(gamma, dtype=float)
    omega = symplectic_form(_mode_count(gamma))
    return bool(np.linalg.eigvalsh(gamma + 0.5j * hbar * omega)[0] >= -tol)


@dataclass(frozen=True)
class GaussianState:
    """n-mode Gaussian state given by its mean vector and covariance matrix"""

    gamma: np.ndarray
    mean: Optional[np.ndarray] = None
    hbar: float = 1.0

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=float)
        n = _mode_count(gamma)
        if np.max(np.abs(gamma - gamma.T)) > SYMMETRY_TOL:
            raise UnphysicalCovarianceError("Covariance matrix is not symmetric")
        gamma = 0.5 * (gamma + gamma.T)
        if not is_physical(gamma, self.hbar):
            raise UnphysicalCovarianceError("gamma + i (hbar/2) Omega is not positive semidefinite")
        mean = np.zeros(2 * n) if self.mean is None else np.array(self.mean, dtype=float)
        if mean.shape != (2 * n,):
            raise DimensionMismatchError(f"Mean must have length {2 * n} (got {mean.shape})")
        gamma.setflags(write=False)
        mean.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "mean", mean)

    @property
    def n(self) -> int:
        return self.gamma.shape[0] // 2

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.gamma))

    @classmethod
    def from_single_mode(cls, g: CovarianceMatrix) -> "GaussianState":
        return cls(g.matrix, np.asarray(g.mean), g.hbar)

    @classmethod
    def vacuum(cls, n: int, hbar: float = 1.0) -> "GaussianState":
        return cls(0.5 * hbar * np.eye(2 * n), hbar=hbar)

    @classmethod
    def thermal(cls, n: int, nu: float, hbar: float = 1.0) -> "GaussianState":
        """gamma = nu I with nu >= hbar / 2"""
        return cls(nu * np.eye(2 * n), hbar=hbar)


@dataclass(frozen=True)
class Symplectic:
    """Linear phase-space map preserving the interleaved symplectic form"""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        omega = symplectic_form(_mode_count(matrix))
        error = np.max(np.abs(matrix @ omega @ matrix.T - omega))
        if error > SYMPLECTIC_TOL:
            raise UnphysicalCovarianceError(f"Matrix is not symplectic (deviation {error:.2e})")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2

    def act(self, state: GaussianState) -> GaussianState:
        if state.n != self.n:
            raise DimensionMismatchError(f"{self.n}-mode map applied to a {state.n}-mode state")
        return GaussianState(self.matrix @ state.gamma @ self.matrix.T, self.matrix @ state.mean, state.hbar)

    def __matmul__(self, other: "Symplectic") -> "Symplectic":
        return Symplectic(self.matrix @ other.matrix)


def passive_orthogonal(orthogonal: np.ndarray) -> Symplectic:
    """Apply the same real orthogonal matrix to the x and p vectors"""
    orthogonal = np.asarray(orthogonal, dtype=float)
    return Symplectic(np.kron(orthogonal, np.eye(2)))


def local_squeezer(rs: Sequence[float]) -> Symplectic:
    """x_i -> e^{-r_i} x_i, p_i -> e^{r_i} p_i"""
    rs = np.asarray(rs, dtype=float)
    return Symplectic(np.diag(np.ravel(np.column_stack([np.exp(-rs), np.exp(rs)]))))


def _unitary_symplectic(unitary: np.ndarray) -> Symplectic:
    re, im = unitary.real, unitary.imag
    return Symplectic(to_interleaved(np.block([[re, -im], [im, re]])))


def beamsplitter() -> Symplectic:
    """50:50 beamsplitter x1' = (x1 + x2)/sqrt2, x2' = (x2 - x1)/sqrt2 (same on p)"""
    return passive_orthogonal(np.array([[1.0, 1.0], [-1.0, 1.0]]) / np.sqrt(2.0))


def random_symplectic(n: int, seed: int, max_squeezing: float = 1.0) -> Symplectic:
    """
    Random symplectic matrix as a passive-squeeze-passive product

    Args:
        n: Mode count
        seed: RNG seed
        max_squeezing: Upper bound on each squeezing modulus

    Returns:
        Symplectic: Deterministic per seed
    """
    rng = np.random.default_rng(seed)
    first = _unitary_symplectic(haar_unitary(n, rng))
    squeeze = local_squeezer(rng.uniform(0.0, max_squeezing, size=n))
    second = _unitary_symplectic(haar_unitary(n, rng))
    return first @ squeeze @ second


def single_mode_gamma(r: float, theta: float, hbar: float = 1.0) -> np.ndarray:
    """
    Covariance (hbar/2) M M^T of a squeezed vacuum with M = R(theta) diag(e^-r, e^r) R(-theta)
    """
    c, s = np.cos(theta), np.sin(theta)
    rotation = np.array([[c, -s], [s, c]])
    m = rotation @ np.diag([np.exp(-r), np.exp(r)]) @ rotation.T
    return 0.5 * hbar * m @ m.T


def direct_sum(*gammas: np.ndarray) -> np.ndarray:
    return block_diag(*gammas)


def _check_r(r: float) -> None:
    if r < 0:
        raise ValueError(f"Squeezing modulus must be nonnegative (got {r})")


def two_mode_squeezed(r: float, hbar: float = 1.0) -> GaussianState:
    """Beamsplitter output for an x-squeezed and a p-squeezed input"""
    _check_r(r)
    inputs = GaussianState(direct_sum(single_mode_gamma(r, 0.0, hbar), single_mode_gamma(r, np.pi / 2, hbar)), hbar=hbar)
    return beamsplitter().act(inputs)


def rotated_pair(r: float, hbar: float = 1.0) -> GaussianState:
    """Beamsplitter output for inputs squeezed along -pi/4 and +pi/4"""
    _check_r(r)
    inputs = GaussianState(
        direct_sum(single_mode_gamma(r, -np.pi / 4, hbar), single_mode_gamma(r, np.pi / 4, hbar)), hbar=hbar
    )
    return beamsplitter().act(inputs)


def random_physical_gamma(n: int, seed: int, hbar: float = 1.0, pure: bool = False) -> GaussianState:
    """
    Random physical covariance S diag(nu) S^T with symplectic eigenvalues nu >= hbar/2

    Args:
        n: Mode count
        seed: RNG seed
        hbar: Action unit
        pure: Use nu = hbar/2 for every mode

    Returns:
        GaussianState: Zero-mean state
    """
    rng = np.random.default_rng(seed)
    nu = np.full(n, 0.5 * hbar) if pure else 0.5 * hbar * (1.0 + rng.uniform(0.0, 1.5, size=n))
    symplectic = random_symplectic(n, int(rng.integers(2 ** 32)))
    williamson = np.diag(np.repeat(nu, 2))
    return GaussianState(symplectic.matrix @ williamson @ symplectic.matrix.T, hbar=hbar)


def reduced_blocks(g: GaussianState) -> Tuple[np.ndarray, np.ndarray]:
    """(gamma_x, gamma_p): the x-x and p-p blocks"""
    block = to_block_order(g.gamma)
    n = g.n
    return block[:n, :n], block[n:, n:]


def _log_det(matrix: np.ndarray) -> float:
    sign, logdet = np.linalg.slogdet(matrix)
    if sign <= 0:
        raise DegenerateCovarianceError("Covariance block has nonpositive determinant")
    return float(logdet)


def gaussian_joint_entropies(g: GaussianState) -> Tuple[float, float]:
    """h(x) = 1/2 ln((2 pi e)^n |gamma_x|) and likewise for p"""
    gamma_x, gamma_p = reduced_blocks(g)
    base = g.n * np.log(2.0 * np.pi * np.e)
    return 0.5 * (base + _log_det(gamma_x)), 0.5 * (base + _log_det(gamma_p))


def gaussian_phase_space_entropy(g: GaussianState) -> float:
    """Joint entropy 1/2 ln((2 pi e)^{2n} |gamma|) of the full Gaussian"""
    return 0.5 * (2 * g.n * np.log(2.0 * np.pi * np.e) + _log_det(g.gamma))


def _vacuum_entropy(g: GaussianState) -> float:
    return g.n * np.log(np.pi * np.e * g.hbar)


def nmode_bbm(g: GaussianState, sat_tol: float = CLOSED_FORM_TOL) -> RelationVerdict:
    hx, hp = gaussian_joint_entropies(g)
    return make_verdict("nmode_bbm", hx + hp, _vacuum_entropy(g), sat_tol)


def _block_correction(g: GaussianState) -> float:
    gamma_x, gamma_p = reduced_blocks(g)
    return 0.5 * (_log_det(gamma_x) + _log_det(gamma_p) - _log_det(g.gamma))


def nmode_tight(g: GaussianState, sat_tol: float = CLOSED_FORM_TOL) -> RelationVerdict:
    """h(x) + h(p) - 1/2 ln(|gamma_x||gamma_p| / |gamma|) >= n ln(pi e hbar)"""
    hx, hp = gaussian_joint_entropies(g)
    correction = _block_correction(g)
    return make_verdict(
        "nmode_tight", hx + hp - correction, _vacuum_entropy(g), sat_tol, details={"correction": correction}
    )


def nmode_joint_conjecture(g: GaussianState, sat_tol: float = CLOSED_FORM_TOL) -> RelationVerdict:
    """Joint phase-space entropy against n ln(pi e hbar), evaluated in closed form"""
    return make_verdict("nmode_joint_conjecture", gaussian_phase_space_entropy(g), _vacuum_entropy(g), sat_tol)


def nmode_entropy_powers(hx: float, hp: float, n: int) -> Tuple[float, float]:
    """N = e^{2h/n} / (2 pi e) for an n-dimensional joint entropy"""
    scale = 2.0 * np.pi * np.e
    return float(np.exp(2.0 * hx / n) / scale), float(np.exp(2.0 * hp / n) / scale)


def nmode_epur(g: GaussianState, sat_tol: float = CLOSED_FORM_TOL) -> RelationVerdict:
    hx, hp = gaussian_joint_entropies(g)
    nx, np_ = nmode_entropy_powers(hx, hp, g.n)
    return make_verdict("nmode_epur", nx * np_, (g.hbar / 2.0) ** 2, sat_tol)


def nmode_tight_epur(g: GaussianState, sat_tol: float = CLOSED_FORM_TOL) -> RelationVerdict:
    """Nx Np >= (|gamma_x||gamma_p| / |gamma|)^{1/n} (hbar/2)^2"""
    hx, hp = gaussian_joint_entropies(g)
    nx, np_ = nmode_entropy_powers(hx, hp, g.n)
    factor = np.exp(2.0 * _block_correction(g) / g.n)
    return make_verdict("nmode_tight_epur", nx * np_, factor * (g.hbar / 2.0) ** 2, sat_tol)


def nmode_chain(
    g: GaussianState,
    hx: Optional[float] = None,
    hp: Optional[float] = None,
    sat_tol: float = CLOSED_FORM_TOL,
) -> ChainReport:
    """
    |gamma_x||gamma_p| >= |gamma| >= (Nx Np)^n |gamma| / (|gamma_x||gamma_p|) >= (hbar/2)^{2n}

    Entropies default to the Gaussian closed forms; numerical ones can be supplied.
    Links are compared in log space so large mode counts stay finite.
    """
    closed_hx, closed_hp = gaussian_joint_entropies(g)
    hx = closed_hx if hx is None else hx
    hp = closed_hp if hp is None else hp
    n = g.n
    nx, np_ = nmode_entropy_powers(hx, hp, n)
    gamma_x, gamma_p = reduced_blocks(g)
    log_blocks = _log_det(gamma_x) + _log_det(gamma_p)
    log_det = _log_det(g.gamma)
    log_scaled = n * np.log(nx * np_) + log_det - log_blocks
    log_vacuum = 2 * n * np.log(g.hbar / 2.0)
    report = ChainReport(
        (
            make_verdict("blocks_over_determinant", log_blocks, log_det, sat_tol),
            make_verdict("determinant_over_scaled_powers", log_det, log_scaled, sat_tol),
            make_verdict("scaled_powers_over_vacuum", log_scaled, log_vacuum, sat_tol),
        )
    )
    logger.debug(f"{n}-mode chain slacks: {[round(v.slack, 12) for v in report.verdicts]}")
    return report
