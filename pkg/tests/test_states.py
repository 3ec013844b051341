import numpy as np
import hypothesis.strategies as st
from hypothesis import given, settings
from pytest import approx, mark, raises
from scipy import stats

from cv_models.exceptions import (
    DimensionMismatchError,
    InvalidDimensionError,
    NormalizationError,
    TruncationError,
    WeightError,
)
from cv_models.fock.states import (
    FockDensity,
    FockVector,
    GaussianUnitarySpec,
    check_truncation,
    derive_seed,
    displace,
    embed,
    extremal_passive_state,
    fock_state,
    from_amplitudes,
    haar_random_state,
    mix,
    phase_rotate,
    quadrature_operators,
    required_nmax_for_squeezing,
    squeezed_vacuum,
    superpose,
    to_density,
    trim,
    vacuum,
)
from cv_models.moments.covariance import covariance


@mark.parametrize("hbar", [0.5, 1.0, 2.0])
def test_commutator_is_i_hbar_away_from_the_edge(hbar):
    x, p = quadrature_operators(10, hbar)
    commutator = x.matrix @ p.matrix - p.matrix @ x.matrix
    assert np.allclose(commutator[:-1, :-1], 1j * hbar * np.eye(10))


def test_quadrature_operators_reject_single_level():
    with raises(InvalidDimensionError):
        quadrature_operators(0)


@mark.parametrize("n", [0, 1, 3, 7])
def test_fock_state_variances(n):
    g = covariance(fock_state(n, 10, hbar=2.0))
    assert g.sxx == approx(2.0 * (n + 0.5))
    assert g.spp == approx(2.0 * (n + 0.5))
    assert g.sxp == approx(0.0, abs=1e-12)


def test_squeezed_covariance_matches_closed_form():
    r = np.log(1.5)
    g = covariance(squeezed_vacuum(GaussianUnitarySpec(r=r, phi=np.pi / 2), 64))
    assert g.sxx == approx(0.5 * np.cosh(2 * r), abs=1e-8)
    assert g.spp == approx(0.5 * np.cosh(2 * r), abs=1e-8)
    assert g.sxp == approx(-0.5 * np.sinh(2 * r), abs=1e-8)
    assert g.sxx == approx(0.67361, abs=1e-5)
    assert g.sxp == approx(-0.45139, abs=1e-5)


def test_axis_spec_doubles_the_angle():
    spec = GaussianUnitarySpec.from_axis(1.5, np.pi / 4)
    assert spec.r == approx(np.log(1.5))
    assert spec.phi == approx(np.pi / 2)
    assert spec.theta == approx(np.pi / 4)


def test_negative_squeezing_is_rejected():
    with raises(ValueError):
        GaussianUnitarySpec(r=-0.1)


def test_too_small_truncation_reports_required_nmax():
    with raises(TruncationError) as info:
        squeezed_vacuum(GaussianUnitarySpec(r=1.5), 10)
    assert info.value.required_nmax > 10


def test_bypassed_truncation_keeps_the_tail():
    state = squeezed_vacuum(GaussianUnitarySpec(r=1.5), 10, check_truncation=False)
    assert state.tail_weight > 1e-10
    with raises(TruncationError):
        check_truncation(state)


def test_required_nmax_grows_with_squeezing():
    values = [required_nmax_for_squeezing(r) for r in (0.0, 0.2, 0.5, 0.8, 1.2)]
    assert values[0] == 1
    assert values == sorted(values)


def test_from_amplitudes_normalizes():
    state = from_amplitudes([3, 4j])
    assert np.vdot(state.amplitudes, state.amplitudes).real == approx(1.0)
    assert state.amplitudes[1] == approx(0.8j)


def test_from_amplitudes_rejects_zero_vector():
    with raises(NormalizationError):
        from_amplitudes([0, 0, 0])


def test_single_level_vector_is_rejected():
    with raises(InvalidDimensionError):
        FockVector(np.array([1.0]))


def test_non_hermitian_density_is_rejected():
    with raises(NormalizationError):
        FockDensity(np.array([[0.5, 0.5], [0.0, 0.5]]))


def test_mix_weights_are_validated():
    states = [fock_state(0, 3), fock_state(1, 3)]
    with raises(WeightError):
        mix(states, [1.5, -0.5])
    with raises(WeightError):
        mix(states, [0.3, 0.3])
    with raises(DimensionMismatchError):
        mix([fock_state(0, 3), fock_state(1, 4)], [0.5, 0.5])


def test_mix_is_a_density_matrix():
    rho = mix([fock_state(0, 3), fock_state(2, 3)], [0.25, 0.75])
    assert np.trace(rho.matrix).real == approx(1.0)
    assert np.diag(rho.matrix).real == approx([0.25, 0.0, 0.75, 0.0])


@mark.parametrize("N", [0, 1, 5, 20])
def test_extremal_passive_purity(N):
    assert extremal_passive_state(N, max(N, 1)).purity() == approx(1.0 / (N + 1))


def test_haar_state_is_deterministic_per_seed():
    first = haar_random_state(4, 6, seed=7)
    again = haar_random_state(4, 6, seed=7)
    other = haar_random_state(4, 6, seed=8)
    assert np.array_equal(first.amplitudes, again.amplitudes)
    assert not np.allclose(first.amplitudes, other.amplitudes)
    assert first.amplitudes[0].imag == approx(0.0, abs=1e-15)
    assert first.amplitudes[0].real >= 0
    assert np.all(first.amplitudes[4:] == 0)


@mark.parametrize("dim", [2, 4])
def test_haar_vacuum_weight_follows_a_beta_law(dim):
    # |<0|psi>|^2 of a Haar state on dim levels is Beta(1, dim - 1) with mean 1/dim
    weights = np.array(
        [abs(haar_random_state(dim, dim - 1, derive_seed(11, i)).amplitudes[0]) ** 2 for i in range(4000)]
    )
    assert stats.kstest(weights, stats.beta(1, dim - 1).cdf).pvalue > 1e-3
    assert weights.mean() == approx(1.0 / dim, abs=0.02)


def test_haar_state_of_dimension_one_is_vacuum():
    state = haar_random_state(1, 1, seed=3)
    assert np.allclose(state.amplitudes, vacuum(1).amplitudes)


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(42, 0) == derive_seed(42, 0)
    assert len({derive_seed(42, i) for i in range(50)}) == 50


def test_embed_and_trim():
    state = from_amplitudes([1, 1j, 0.5])
    padded = embed(state, 10)
    assert padded.nmax == 10
    assert np.allclose(trim(padded).amplitudes, state.amplitudes)
    with raises(DimensionMismatchError):
        embed(state, 1)


def test_trim_records_lost_weight():
    state = from_amplitudes([1, 0, 0, 1e-3])
    trimmed = trim(state, 2)
    assert trimmed.tail_weight == approx(1e-6 / (1 + 1e-6))


def test_displacement_shifts_the_means():
    alpha = 0.5 + 0.3j
    g = covariance(displace(vacuum(30), alpha))
    assert g.mean[0] == approx(np.sqrt(2.0) * 0.5, abs=1e-10)
    assert g.mean[1] == approx(np.sqrt(2.0) * 0.3, abs=1e-10)
    assert g.sxx == approx(0.5, abs=1e-10)


def test_displacement_of_density_matches_vector():
    alpha = 0.4 - 0.2j
    from_vector = to_density(displace(fock_state(1, 30), alpha))
    from_density = displace(to_density(fock_state(1, 30)), alpha)
    assert np.allclose(from_vector.matrix, from_density.matrix, atol=1e-12)


def test_quarter_turn_swaps_the_variances():
    r = 0.4
    state = squeezed_vacuum(GaussianUnitarySpec(r=r, phi=0.0), 40)
    g = covariance(phase_rotate(state, np.pi / 2))
    assert g.sxx == approx(0.5 * np.exp(2 * r), abs=1e-9)
    assert g.spp == approx(0.5 * np.exp(-2 * r), abs=1e-9)


def test_superpose_with_zero_eps_is_the_base():
    base = haar_random_state(3, 5, seed=1)
    other = haar_random_state(3, 5, seed=2)
    assert np.allclose(superpose(base, other, 0.0).amplitudes, base.amplitudes)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), dim=st.integers(1, 6))
def test_random_states_obey_schrodinger_robertson(seed, dim):
    g = covariance(haar_random_state(dim, max(dim - 1, 1), seed))
    assert g.determinant >= 0.25 - 1e-9
