"""
Fock Basis States Module
Truncated-Fock-basis state construction and quadrature operator algebra
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.linalg import expm
from scipy.special import gammaln

from cv_models.exceptions import (
    DimensionMismatchError,
    InvalidDimensionError,
    NormalizationError,
    TruncationError,
    WeightError,
)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRUNCATION_TOL = 1e-10
SUPPORT_THRESHOLD = 1e-14


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=complex)
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class FockVector:
    """
    Pure state in the Fock span {|0>, ..., |nmax>}

    tail_weight records the probability left outside the truncation when the
    state approximates an infinite-dimensional one (squeezed, displaced).
    """

    amplitudes: np.ndarray
    hbar: float = 1.0
    tail_weight: float = 0.0

    def __post_init__(self):
        amplitudes = np.ravel(np.asarray(self.amplitudes, dtype=complex))
        if amplitudes.size < 2:
            raise InvalidDimensionError(f"nmax must be at least 1 (got {amplitudes.size - 1})")
        if self.hbar <= 0:
            raise ValueError(f"hbar must be positive (got {self.hbar})")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(f"Amplitudes have norm^2 {norm:.15f}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(amplitudes))

    @property
    def nmax(self) -> int:
        return self.amplitudes.size - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def support_nmax(self) -> int:
        """Highest Fock level carrying non-negligible weight (at least 1)"""
        populated = np.nonzero(np.abs(self.amplitudes) ** 2 > SUPPORT_THRESHOLD)[0]
        return max(int(populated[-1]) if populated.size else 0, 1)

    def density(self) -> "FockDensity":
        return FockDensity(np.outer(self.amplitudes, self.amplitudes.conj()), self.hbar, self.tail_weight)


@dataclass(frozen=True)
class FockDensity:
    """Density matrix in the truncated Fock basis"""

    matrix: np.ndarray
    hbar: float = 1.0
    tail_weight: float = 0.0

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidDimensionError(f"Density matrix must be square (got shape {matrix.shape})")
        if matrix.shape[0] < 2:
            raise InvalidDimensionError("nmax must be at least 1")
        if self.hbar <= 0:
            raise ValueError(f"hbar must be positive (got {self.hbar})")
        if np.max(np.abs(matrix - matrix.conj().T)) > HERMITIAN_TOL:
            raise NormalizationError("Density matrix is not Hermitian")
        trace = np.trace(matrix).real
        if abs(trace - 1.0) > NORM_TOL:
            raise NormalizationError(f"Density matrix has trace {trace:.15f}, expected 1")
        # symmetrize away round-off so eigvalsh sees an exactly Hermitian input
        matrix = 0.5 * (matrix + matrix.conj().T)
        min_eig = float(np.linalg.eigvalsh(matrix)[0])
        if min_eig < -PSD_TOL:
            raise NormalizationError(f"Density matrix is not positive (min eigenvalue {min_eig:.3e})")
        object.__setattr__(self, "matrix", _frozen(matrix))

    @property
    def nmax(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def support_nmax(self) -> int:
        populated = np.nonzero(np.diag(self.matrix).real > SUPPORT_THRESHOLD)[0]
        return max(int(populated[-1]) if populated.size else 0, 1)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


State = Union[FockVector, FockDensity]


@dataclass(frozen=True)
class QuadOperator:
    """Quadrature operator matrix, label X or P"""

    matrix: np.ndarray
    label: str

    def __post_init__(self):
        if self.label not in ("X", "P"):
            raise ValueError(f"label must be X or P (got {self.label})")
        object.__setattr__(self, "matrix", _frozen(self.matrix))


@dataclass(frozen=True)
class GaussianUnitarySpec:
    """
    Squeeze-then-displace specification

    phi is the squeezing phase (twice the principal-axis angle), reduced to [0, 2pi).
    """

    r: float = 0.0
    phi: float = 0.0
    alpha: complex = 0j

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"squeezing modulus must be nonnegative (got {self.r})")
        object.__setattr__(self, "phi", float(np.mod(self.phi, 2 * np.pi)))
        object.__setattr__(self, "alpha", complex(self.alpha))

    @classmethod
    def from_axis(cls, s: float, theta: float, alpha: complex = 0j) -> "GaussianUnitarySpec":
        """Build from squeezing factor s = e^r and principal-axis angle theta"""
        return cls(r=float(np.log(s)), phi=2.0 * theta, alpha=alpha)

    @property
    def theta(self) -> float:
        return self.phi / 2.0


def annihilation(dim: int) -> np.ndarray:
    """Truncated annihilation operator on a dim-level space"""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def quadrature_operators(nmax: int, hbar: float = 1.0) -> Tuple[QuadOperator, QuadOperator]:
    """
    Build the truncated quadrature operators

    Args:
        nmax: Highest Fock level kept
        hbar: Action unit

    Returns:
        tuple: (X, P) with X = sqrt(hbar/2)(a + a^dag), P = i sqrt(hbar/2)(a^dag - a)
    """
    if nmax < 1:
        raise InvalidDimensionError(f"nmax must be at least 1 (got {nmax})")
    a = annihilation(nmax + 1)
    scale = np.sqrt(hbar / 2.0)
    x = scale * (a + a.conj().T)
    p = 1j * scale * (a.conj().T - a)
    return QuadOperator(x, "X"), QuadOperator(p, "P")


def vacuum(nmax: int, hbar: float = 1.0) -> FockVector:
    return fock_state(0, nmax, hbar)


def fock_state(n: int, nmax: int, hbar: float = 1.0) -> FockVector:
    if not 0 <= n <= nmax:
        raise InvalidDimensionError(f"Fock level {n} outside 0..{nmax}")
    amplitudes = np.zeros(nmax + 1, dtype=complex)
    amplitudes[n] = 1.0
    return FockVector(amplitudes, hbar)


def from_amplitudes(values: Iterable[complex], nmax: Optional[int] = None, hbar: float = 1.0) -> FockVector:
    """
    Normalize arbitrary amplitudes into a FockVector

    Args:
        values: Unnormalized amplitudes c_0, c_1, ...
        nmax: Truncation (defaults to len(values) - 1, at least 1)
        hbar: Action unit

    Returns:
        FockVector: Normalized state
    """
    values = np.asarray(list(values), dtype=complex)
    nmax = max(values.size - 1, 1) if nmax is None else nmax
    if values.size > nmax + 1:
        if np.any(np.abs(values[nmax + 1:]) > 0):
            raise DimensionMismatchError(f"{values.size} amplitudes do not fit in nmax={nmax}")
        values = values[: nmax + 1]
    amplitudes = np.zeros(nmax + 1, dtype=complex)
    amplitudes[: values.size] = values
    norm = np.linalg.norm(amplitudes)
    if norm == 0:
        raise NormalizationError("Cannot normalize the zero vector")
    return FockVector(amplitudes / norm, hbar)


def to_density(state: State) -> FockDensity:
    return state.density() if isinstance(state, FockVector) else state


def embed(state: State, nmax: int) -> State:
    """Re-express a state in a larger (or equal) truncation"""
    if nmax < state.nmax:
        if state.support_nmax() > nmax:
            raise DimensionMismatchError(f"State supported up to {state.support_nmax()} cannot shrink to {nmax}")
        return trim(state, nmax)
    pad = nmax - state.nmax
    if isinstance(state, FockVector):
        return FockVector(np.pad(state.amplitudes, (0, pad)), state.hbar, state.tail_weight)
    return FockDensity(np.pad(state.matrix, ((0, pad), (0, pad))), state.hbar, state.tail_weight)


def trim(state: State, nmax: Optional[int] = None) -> State:
    """Drop empty top levels (defaults to the support of the state)"""
    nmax = max(state.support_nmax() if nmax is None else nmax, 1)
    if nmax >= state.nmax:
        return state
    if isinstance(state, FockVector):
        amplitudes = state.amplitudes[: nmax + 1]
        lost = 1.0 - float(np.vdot(amplitudes, amplitudes).real)
        return FockVector(amplitudes / np.linalg.norm(amplitudes), state.hbar, state.tail_weight + max(lost, 0.0))
    matrix = state.matrix[: nmax + 1, : nmax + 1]
    trace = np.trace(matrix).real
    return FockDensity(matrix / trace, state.hbar, state.tail_weight + max(1.0 - trace, 0.0))


def _tail_from(probabilities: np.ndarray, nmax: int) -> float:
    # adequacy rule: weight on levels above nmax - 2 (level 0 never counts)
    return float(np.sum(probabilities[max(nmax - 1, 1):]))


def _required_nmax(probabilities: np.ndarray, tol: float = TRUNCATION_TOL) -> int:
    # smallest nmax whose tail (levels >= max(nmax - 1, 1)) stays below tol
    tails = np.cumsum(probabilities[::-1])[::-1]
    adequate = np.nonzero(tails[1:] < tol)[0]
    if adequate.size == 0:
        return probabilities.size + 1
    first = int(adequate[0]) + 1
    return 1 if first == 1 else first + 1


def required_nmax_for_squeezing(r: float, tol: float = TRUNCATION_TOL) -> int:
    """
    Smallest nmax meeting the truncation rule for squeezed vacuum of modulus r

    Uses the closed-form photon statistics p_2k = tanh(r)^2k (2k)! / (4^k k!^2 cosh r).
    """
    if r == 0:
        return 1
    k = np.arange(0, 2000)
    log_p = (
        2 * k * np.log(np.tanh(r))
        + gammaln(2 * k + 1)
        - 2 * gammaln(k + 1)
        - k * np.log(4.0)
        - np.log(np.cosh(r))
    )
    probabilities = np.zeros(2 * k.size)
    probabilities[0::2] = np.exp(log_p)
    return _required_nmax(probabilities, tol)


def _working_dim(nmax: int, alpha: complex = 0j) -> int:
    mean_photons = abs(alpha) ** 2
    pad = max(40, nmax, int(4 * mean_photons + 12 * abs(alpha)))
    return nmax + 1 + pad


def _finish_truncation(
    amplitudes: np.ndarray, nmax: int, hbar: float, check_truncation: bool, what: str
) -> FockVector:
    probabilities = np.abs(amplitudes) ** 2
    tail = _tail_from(probabilities, nmax)
    if tail > TRUNCATION_TOL:
        required = _required_nmax(probabilities)
        message = f"{what} needs nmax >= {required} (tail weight {tail:.2e} at nmax={nmax})"
        if check_truncation:
            raise TruncationError(message, required_nmax=required)
        logger.debug(f"Truncation check bypassed: {message}")
    kept = amplitudes[: nmax + 1]
    return FockVector(kept / np.linalg.norm(kept), hbar, tail_weight=tail)


def squeezed_vacuum(
    spec: GaussianUnitarySpec, nmax: int, hbar: float = 1.0, check_truncation: bool = True
) -> FockVector:
    """
    Squeezed (and optionally displaced) vacuum by exponentiating the generator

    The generator 1/2 (z* a^2 - z a^dag^2) is exponentiated on a padded working
    space, then cut to nmax + 1 levels.

    Args:
        spec: Squeezing modulus/phase and displacement
        nmax: Highest Fock level kept
        hbar: Action unit
        check_truncation: Raise TruncationError when the tail rule fails

    Returns:
        FockVector: Normalized squeezed state
    """
    if nmax < 1:
        raise InvalidDimensionError(f"nmax must be at least 1 (got {nmax})")
    working = _working_dim(nmax, spec.alpha)
    a = annihilation(working)
    ad = a.conj().T
    z = spec.r * np.exp(1j * spec.phi)
    generator = 0.5 * (np.conj(z) * (a @ a) - z * (ad @ ad))
    psi = expm(generator)[:, 0]
    if spec.alpha != 0:
        psi = expm(spec.alpha * ad - np.conj(spec.alpha) * a) @ psi
    return _finish_truncation(psi, nmax, hbar, check_truncation, f"Squeezed state r={spec.r:.4f}")


def displace(state: State, alpha: complex, check_truncation: bool = True) -> State:
    """
    Apply the displacement D(alpha) = exp(alpha a^dag - alpha* a)

    Args:
        state: Pure or mixed state
        alpha: Complex displacement, <X> shifts by sqrt(2 hbar) Re(alpha)
        check_truncation: Raise TruncationError when the result leaks past nmax

    Returns:
        State of the same kind and truncation
    """
    alpha = complex(alpha)
    if alpha == 0:
        return state
    working = _working_dim(state.nmax, alpha)
    a = annihilation(working)
    d_op = expm(alpha * a.conj().T - np.conj(alpha) * a)
    if isinstance(state, FockVector):
        psi = d_op @ np.pad(state.amplitudes, (0, working - state.dim))
        shifted = _finish_truncation(psi, state.nmax, state.hbar, check_truncation, f"Displacement {alpha}")
        return FockVector(shifted.amplitudes, state.hbar, state.tail_weight + shifted.tail_weight)

    pad = working - state.dim
    rho = d_op @ np.pad(state.matrix, ((0, pad), (0, pad))) @ d_op.conj().T
    probabilities = np.real(np.diag(rho))
    tail = _tail_from(probabilities, state.nmax)
    if tail > TRUNCATION_TOL and check_truncation:
        required = _required_nmax(probabilities)
        raise TruncationError(f"Displacement {alpha} needs nmax >= {required}", required_nmax=required)
    kept = rho[: state.dim, : state.dim]
    return FockDensity(kept / np.trace(kept).real, state.hbar, state.tail_weight + tail)


def phase_rotate(state: State, theta: float) -> State:
    """Apply exp(-i theta a^dag a), rotating the phase-space picture by theta"""
    phases = np.exp(-1j * theta * np.arange(state.dim))
    if isinstance(state, FockVector):
        return FockVector(phases * state.amplitudes, state.hbar, state.tail_weight)
    return FockDensity(np.outer(phases, phases.conj()) * state.matrix, state.hbar, state.tail_weight)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """
    Haar-distributed unitary from a QR decomposition of a complex Ginibre matrix

    The phases of R's diagonal are pushed into Q so the result is exactly Haar.
    """
    ginibre = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(ginibre)
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))


def haar_random_state(dim: int, nmax: int, seed: int, hbar: float = 1.0) -> FockVector:
    """
    Random pure state: first column of a Haar unitary applied to the vacuum

    The global phase is fixed so that <0|psi> is real and nonnegative.

    Args:
        dim: Size of the unitary (state lives in span{|0>..|dim-1>})
        nmax: Highest Fock level of the carrier space
        seed: RNG seed, identical seeds give identical states
        hbar: Action unit

    Returns:
        FockVector: Random state
    """
    if not 1 <= dim <= nmax + 1:
        raise InvalidDimensionError(f"dim must be in 1..{nmax + 1} (got {dim})")
    rng = np.random.default_rng(seed)
    column = haar_unitary(dim, rng)[:, 0]
    if abs(column[0]) > 0:
        column = column * np.conj(column[0]) / abs(column[0])
    amplitudes = np.zeros(nmax + 1, dtype=complex)
    amplitudes[:dim] = column
    return FockVector(amplitudes / np.linalg.norm(amplitudes), hbar)


def derive_seed(seed: int, index: int) -> int:
    """Independent per-task seed from (seed, index)"""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


def extremal_passive_state(N: int, nmax: int, hbar: float = 1.0) -> FockDensity:
    """Equal-weight mixture of |0>..|N>"""
    if N < 0 or N > nmax:
        raise InvalidDimensionError(f"N must be in 0..{nmax} (got {N})")
    weights = np.zeros(nmax + 1)
    weights[: N + 1] = 1.0 / (N + 1)
    return FockDensity(np.diag(weights), hbar)


def mix(states: Sequence[State], weights: Sequence[float]) -> FockDensity:
    """
    Convex combination of states

    Args:
        states: States with equal truncation and hbar
        weights: Nonnegative weights summing to one

    Returns:
        FockDensity: sum_i w_i rho_i
    """
    if len(states) == 0 or len(states) != len(weights):
        raise WeightError("Need one weight per state and at least one state")
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0):
        raise WeightError(f"Weights must be nonnegative (got {weights.tolist()})")
    if abs(weights.sum() - 1.0) > NORM_TOL:
        raise WeightError(f"Weights sum to {weights.sum():.15f}, expected 1")

    densities: List[FockDensity] = [to_density(state) for state in states]
    dims = {rho.dim for rho in densities}
    if len(dims) != 1:
        raise DimensionMismatchError(f"Cannot mix states of dimensions {sorted(dims)}")
    hbars = {rho.hbar for rho in densities}
    if len(hbars) != 1:
        raise DimensionMismatchError(f"Cannot mix states with different hbar {sorted(hbars)}")

    matrix = sum(w * rho.matrix for w, rho in zip(weights, densities))
    matrix = matrix / np.trace(matrix).real
    tail = float(sum(w * rho.tail_weight for w, rho in zip(weights, densities)))
    return FockDensity(matrix, densities[0].hbar, tail)


def superpose(base: FockVector, other: FockVector, eps: float) -> FockVector:
    """Normalized |base> + eps |other>"""
    if base.dim != other.dim:
        raise DimensionMismatchError(f"Cannot superpose dimensions {base.dim} and {other.dim}")
    combined = base.amplitudes + eps * other.amplitudes
    return FockVector(combined / np.linalg.norm(combined), base.hbar, base.tail_weight)


def check_truncation(state: State) -> None:
    """Raise TruncationError if the state lost more than the allowed tail weight"""
    if state.tail_weight > TRUNCATION_TOL:
        raise TruncationError(
            f"State discarded weight {state.tail_weight:.2e} at nmax={state.nmax}",
            required_nmax=None,
        )
