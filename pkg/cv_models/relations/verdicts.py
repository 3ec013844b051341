"""
Uncertainty Relations Module
Evaluates each uncertainty relation as lhs / rhs / slack and checks the implication chains
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from loguru import logger

from cv_models.entropy.engine import (
    differential_entropy,
    entropy_power,
    gaussian_entropy_1d,
    joint_entropy_report,
    mutual_information,
    nongaussianity,
)
from cv_models.exceptions import WignerNegativeError
from cv_models.fock.states import State, check_truncation, trim
from cv_models.moments.covariance import (
    CovarianceMatrix,
    covariance,
    gaussian_mutual_information,
    gaussian_purity,
)
from cv_models.phase_space.quad_rep import (
    Grid1D,
    default_grid,
    marginal_p,
    marginal_x,
    truncation_wigner_bound,
    wigner,
)
from uncertainty_lab.config import NumericsSettings


@dataclass(frozen=True)
class RelationVerdict:
    """
    One evaluation of one uncertainty relation

    slack = lhs - rhs (>= 0 when the relation holds). Entropic relations also carry
    their entropy-power form in power_lhs / power_rhs.
    """

    name: str
    lhs: float
    rhs: float
    slack: float
    saturated: bool
    applicable: bool = True
    power_lhs: Optional[float] = None
    power_rhs: Optional[float] = None
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def power_slack(self) -> Optional[float]:
        if self.power_lhs is None or self.power_rhs is None:
            return None
        return self.power_lhs - self.power_rhs

    def holds(self, tol: float) -> bool:
        return not self.applicable or self.slack >= -tol

    def as_row(self) -> Dict[str, object]:
        row = {
            "relation": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "saturated": self.saturated,
            "applicable": self.applicable,
            "power_lhs": self.power_lhs,
            "power_rhs": self.power_rhs,
        }
        row.update(self.details)
        return row


def make_verdict(name: str, lhs: float, rhs: float, sat_tol: float, **extra) -> RelationVerdict:
    slack = float(lhs - rhs)
    return RelationVerdict(name, float(lhs), float(rhs), slack, abs(slack) < sat_tol, **extra)


def _not_applicable(name: str, rhs: float, **details: float) -> RelationVerdict:
    return RelationVerdict(name, float("nan"), float(rhs), float("nan"), False, applicable=False, details=details)


@dataclass(frozen=True)
class StateProfile:
    """Marginal entropies and moments of one state, shared by every relation"""

    state: State
    cov: CovarianceMatrix
    hx: float
    hp: float
    grid: Grid1D
    settings: NumericsSettings

    @property
    def hbar(self) -> float:
        return self.cov.hbar

    @property
    def nx(self) -> float:
        return entropy_power(self.hx)

    @property
    def np_(self) -> float:
        return entropy_power(self.hp)

    @property
    def dx(self) -> float:
        return nongaussianity(self.hx, self.cov.sxx)

    @property
    def dp(self) -> float:
        return nongaussianity(self.hp, self.cov.spp)

    @property
    def gaussian_mi(self) -> float:
        return gaussian_mutual_information(self.cov)


StateLike = Union[State, StateProfile]


def marginal_grid(state: State, cfg: NumericsSettings) -> Grid1D:
    """Default grid sized to the populated levels of the state"""
    return default_grid(trim(state).nmax, state.hbar, cfg.grid_points, cfg.grid_extent)


def profile_state(state: State, cfg: NumericsSettings) -> StateProfile:
    """
    Evaluate marginal entropies and the covariance matrix of a state

    Args:
        state: Truncation-adequate pure or mixed state
        cfg: Numerical settings

    Returns:
        StateProfile: Shared inputs of all single-mode relations
    """
    check_truncation(state)
    grid = marginal_grid(state, cfg)
    hx = differential_entropy(marginal_x(state, grid))
    hp = differential_entropy(marginal_p(state, grid))
    cov = covariance(state)
    logger.debug(f"Profiled state nmax={state.nmax}: hx={hx:.8f} hp={hp:.8f} |gamma|={cov.determinant:.8f}")
    return StateProfile(state, cov, hx, hp, grid, cfg)


def _as_profile(state: StateLike, cfg: NumericsSettings) -> StateProfile:
    return state if isinstance(state, StateProfile) else profile_state(state, cfg)


def heisenberg(g: CovarianceMatrix, sat_tol: float = 1e-4) -> RelationVerdict:
    return make_verdict("heisenberg", g.sxx * g.spp, (g.hbar / 2.0) ** 2, sat_tol)


def schrodinger_robertson(g: CovarianceMatrix, sat_tol: float = 1e-4) -> RelationVerdict:
    return make_verdict("schrodinger_robertson", g.determinant, (g.hbar / 2.0) ** 2, sat_tol)


def bbm(hx: float, hp: float, hbar: float = 1.0, sat_tol: float = 1e-4) -> RelationVerdict:
    """Marginal entropic relation h(x) + h(p) >= ln(pi e hbar), with its entropy-power form"""
    return make_verdict(
        "bbm",
        hx + hp,
        np.log(np.pi * np.e * hbar),
        sat_tol,
        power_lhs=entropy_power(hx) * entropy_power(hp),
        power_rhs=(hbar / 2.0) ** 2,
    )


def epur(nx: float, np_: float, hbar: float = 1.0, sat_tol: float = 1e-4) -> RelationVerdict:
    return make_verdict("epur", nx * np_, (hbar / 2.0) ** 2, sat_tol)


def tight_epur(state: StateLike, cfg: NumericsSettings) -> RelationVerdict:
    """
    Covariance-corrected relation h(x) + h(p) - I_G >= ln(pi e hbar)

    The entropy-power form compares Nx Np with (sxx spp / |gamma|)(hbar/2)^2.

    Args:
        state: State or an existing StateProfile
        cfg: Numerical settings

    Returns:
        RelationVerdict: Verdict named tight_epur
    """
    profile = _as_profile(state, cfg)
    g = profile.cov
    hbar = profile.hbar
    i_g = profile.gaussian_mi
    return make_verdict(
        "tight_epur",
        profile.hx + profile.hp - i_g,
        np.log(np.pi * np.e * hbar),
        cfg.sat_tol,
        power_lhs=profile.nx * profile.np_,
        power_rhs=(g.sxx * g.spp / g.determinant) * (hbar / 2.0) ** 2,
        details={"gaussian_mi": i_g},
    )


def wigner_grid_for(state: State, cfg: NumericsSettings) -> Grid1D:
    return default_grid(trim(state).nmax, state.hbar, cfg.wigner_points, cfg.grid_extent)


def joint_conjecture(state: StateLike, cfg: NumericsSettings) -> RelationVerdict:
    """
    Joint-entropy relation h(x, p) >= ln(pi e hbar) for nonnegative Wigner functions

    States whose sampled Wigner function dips below the negativity gate get an
    inapplicable verdict carrying the minimum value. The gate is cfg.neg_tol,
    widened to the Wigner change the truncated tail of the state can cause.
    """
    profile = _as_profile(state, cfg)
    hbar = profile.hbar
    rhs = np.log(np.pi * np.e * hbar)
    grid = wigner_grid_for(profile.state, cfg)
    w = wigner(profile.state, grid, grid, order=cfg.quadrature_order)
    gate = max(cfg.neg_tol, truncation_wigner_bound(trim(profile.state)))
    try:
        report = joint_entropy_report(w, gate)
    except WignerNegativeError as e:
        logger.info(f"Joint-entropy relation not applicable: {e}")
        return _not_applicable("joint_conjecture", rhs, min_wigner=e.min_value, negativity_gate=gate)

    return make_verdict(
        "joint_conjecture",
        report.value,
        rhs,
        cfg.sat_tol,
        details={
            "min_wigner": report.min_value,
            "negativity_gate": gate,
            "clipped_mass": report.clipped_mass,
            "mutual_information": mutual_information(profile.hx, profile.hp, report.value),
        },
    )


@dataclass(frozen=True)
class ChainReport:
    """Slacks of every link of the variance / entropy-power / determinant chains"""

    verdicts: Tuple[RelationVerdict, ...]

    def holds(self, tol: float) -> bool:
        return all(v.holds(tol) for v in self.verdicts)

    def worst(self) -> RelationVerdict:
        return min(self.verdicts, key=lambda v: v.slack)

    def by_name(self) -> Dict[str, RelationVerdict]:
        return {v.name: v for v in self.verdicts}


def implication_chain(state: StateLike, cfg: NumericsSettings) -> ChainReport:
    """
    Check sxx spp >= Nx Np >= (hbar/2)^2, |gamma| >= (Nx Np / sxx spp)|gamma| >= (hbar/2)^2
    and sqrt|gamma| >= (hbar/2) e^{Dx + Dp} on one state

    Args:
        state: State or an existing StateProfile
        cfg: Numerical settings

    Returns:
        ChainReport: One verdict per link
    """
    profile = _as_profile(state, cfg)
    g = profile.cov
    vacuum_bound = (profile.hbar / 2.0) ** 2
    power = profile.nx * profile.np_
    variances = g.sxx * g.spp
    scaled = power / variances * g.determinant
    tol = cfg.sat_tol
    verdicts = (
        make_verdict("variances_over_powers", variances, power, tol),
        make_verdict("powers_over_vacuum", power, vacuum_bound, tol),
        make_verdict("determinant_over_scaled_powers", g.determinant, scaled, tol),
        make_verdict("scaled_powers_over_vacuum", scaled, vacuum_bound, tol),
        make_verdict(
            "nongaussian_determinant",
            np.sqrt(g.determinant),
            (profile.hbar / 2.0) * np.exp(profile.dx + profile.dp),
            tol,
        ),
    )
    report = ChainReport(verdicts)
    if not report.holds(cfg.tol):
        worst = report.worst()
        logger.warning(f"Implication chain broken at {worst.name}: slack {worst.slack:.3e}")
    return report


def uncertainty_functional(state: StateLike, cfg: NumericsSettings) -> float:
    """F = h(x) + h(p) - I_G, minimized by pure Gaussian states"""
    profile = _as_profile(state, cfg)
    return float(profile.hx + profile.hp - profile.gaussian_mi)


def nongaussianity_relation(profile: StateProfile) -> RelationVerdict:
    """Dx + Dp <= ln(sqrt|gamma| / (hbar/2)), written so that slack >= 0 when it holds"""
    g = profile.cov
    return make_verdict(
        "nongaussianity",
        np.log(np.sqrt(g.determinant) / (profile.hbar / 2.0)),
        profile.dx + profile.dp,
        profile.settings.sat_tol,
    )


def purity_form(profile: StateProfile) -> RelationVerdict:
    """h(x) + h(p) >= h(x_G) + h(p_G) + ln mu_G"""
    g = profile.cov
    rhs = gaussian_entropy_1d(g.sxx) + gaussian_entropy_1d(g.spp) + np.log(gaussian_purity(g))
    return make_verdict("purity_form", profile.hx + profile.hp, rhs, profile.settings.sat_tol)


def full_report(state: State, cfg: NumericsSettings, include_joint: bool = True) -> List[RelationVerdict]:
    """
    Every single-mode verdict for one state

    Args:
        state: Truncation-adequate state
        cfg: Numerical settings
        include_joint: Also evaluate the Wigner-based joint-entropy relation

    Returns:
        list: Verdicts in a fixed order (chain links last)
    """
    profile = profile_state(state, cfg)
    g = profile.cov
    verdicts = [
        heisenberg(g, cfg.sat_tol),
        schrodinger_robertson(g, cfg.sat_tol),
        bbm(profile.hx, profile.hp, profile.hbar, cfg.sat_tol),
        epur(profile.nx, profile.np_, profile.hbar, cfg.sat_tol),
        tight_epur(profile, cfg),
        nongaussianity_relation(profile),
        purity_form(profile),
    ]
    if include_joint:
        verdicts.append(joint_conjecture(profile, cfg))
    verdicts.extend(implication_chain(profile, cfg).verdicts)
    return verdicts
