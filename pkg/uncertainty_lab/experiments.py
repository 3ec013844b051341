"""
Experiment Runner
Reproduces the passive, random, neighbourhood and concavity tests, the Gaussian
saturation sweep, the counterexample search and the multimode closed forms
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy.optimize import minimize

from cv_models.exceptions import LabError, RelationViolation
from cv_models.fock.states import (
    FockVector,
    GaussianUnitarySpec,
    State,
    derive_seed,
    embed,
    extremal_passive_state,
    fock_state,
    from_amplitudes,
    haar_random_state,
    mix,
    required_nmax_for_squeezing,
    squeezed_vacuum,
    superpose,
    to_density,
    vacuum,
)
from cv_models.gaussian.multimode import (
    nmode_bbm,
    nmode_chain,
    nmode_epur,
    nmode_tight,
    nmode_tight_epur,
    random_physical_gamma,
    reduced_blocks,
    rotated_pair,
    two_mode_squeezed,
)
from cv_models.moments.covariance import correlation_coefficient
from cv_models.phase_space.quad_rep import default_grid, project_wavefunction, squeezed_wavefunction
from cv_models.relations.verdicts import (
    RelationVerdict,
    bbm,
    full_report,
    heisenberg,
    joint_conjecture,
    profile_state,
    schrodinger_robertson,
    tight_epur,
    uncertainty_functional,
)
from cv_models.variational.eigencheck import eigencheck, nmode_a_expectation
from uncertainty_lab.config import NumericsSettings

EIGENCHECK_TOL = 1e-7
HYGIENE_GRID_TOL = 1e-6
HYGIENE_NMAX_TOL = 1e-5
HYGIENE_EXTRA_LEVELS = 16
SEARCH_PENALTY = 1e3


@dataclass
class Violation:
    """One failed assertion and the state that triggered it"""

    message: str
    state: Any = None
    verdict: Optional[RelationVerdict] = None


@dataclass
class ExperimentResult:
    """Table, summary and failed assertions of one command"""

    command: str
    parameters: Dict[str, Any]
    table: pd.DataFrame
    summary: Dict[str, Any]
    violations: List[Violation] = field(default_factory=list)
    report: Optional[Dict[str, Any]] = None
    states: Dict[str, State] = field(default_factory=dict)
    started: Optional[datetime] = None
    finished: Optional[datetime] = None

    @property
    def passed(self) -> bool:
        return not self.violations

    def raise_for_violations(self) -> None:
        """Raise RelationViolation carrying the first offending state"""
        if not self.violations:
            return
        first = self.violations[0]
        raise RelationViolation(
            f"{self.command}: {len(self.violations)} violation(s), first: {first.message}",
            state=first.state,
            verdict=first.verdict,
        )


def _map_tasks(func: Callable[[Any], Any], tasks: Sequence[Any], workers: int) -> List[Any]:
    """Run tasks in worker processes when workers > 1; results keep the task order"""
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, tasks))
    return [func(task) for task in tasks]


# Worker tasks live at module level so ProcessPoolExecutor can pickle them


def _passive_row(task: Tuple[int, NumericsSettings]) -> Dict[str, Any]:
    n, cfg = task
    state = extremal_passive_state(n, max(n, 1), cfg.hbar)
    profile = profile_state(state, cfg)
    joint = joint_conjecture(profile, cfg)
    marginal = bbm(profile.hx, profile.hp, profile.hbar, cfg.sat_tol)
    return {
        "N": n,
        "hx": profile.hx,
        "hp": profile.hp,
        "hx_plus_hp": profile.hx + profile.hp,
        "hxp": joint.lhs,
        "bound": joint.rhs,
        "mutual_information": joint.details.get("mutual_information", float("nan")),
        "joint_slack": joint.slack,
        "bbm_slack": marginal.slack,
        "applicable": joint.applicable,
        "min_wigner": joint.details.get("min_wigner", float("nan")),
        "clipped_mass": joint.details.get("clipped_mass", float("nan")),
    }


def _random_row(task: Tuple[int, int, int, NumericsSettings]) -> Dict[str, Any]:
    index, dim, seed, cfg = task
    trial_seed = derive_seed(seed, index)
    state = haar_random_state(dim, max(dim - 1, 1), trial_seed, cfg.hbar)
    profile = profile_state(state, cfg)
    tight = tight_epur(profile, cfg)
    return {
        "trial": index,
        "seed": trial_seed,
        "rho": correlation_coefficient(profile.cov),
        "hx_plus_hp": profile.hx + profile.hp,
        "bound": tight.rhs + tight.details["gaussian_mi"],
        "tight_slack": tight.slack,
        "bbm_slack": bbm(profile.hx, profile.hp, profile.hbar, cfg.sat_tol).slack,
        "sxx": profile.cov.sxx,
        "spp": profile.cov.spp,
        "sxp": profile.cov.sxp,
        "hbar": profile.hbar,
    }


def _neighborhood_row(task: Tuple[int, FockVector, int, float, int, NumericsSettings]) -> Dict[str, Any]:
    index, reference, neighbor_dim, eps, seed, cfg = task
    trial_seed = derive_seed(seed, index)
    neighbor = haar_random_state(neighbor_dim, reference.nmax, trial_seed, reference.hbar)
    state = superpose(reference, neighbor, eps)
    profile = profile_state(state, cfg)
    tight = tight_epur(profile, cfg)
    return {
        "trial": index,
        "seed": trial_seed,
        "rho": correlation_coefficient(profile.cov),
        "hx_plus_hp": profile.hx + profile.hp,
        "tight_slack": tight.slack,
        "bbm_slack": bbm(profile.hx, profile.hp, profile.hbar, cfg.sat_tol).slack,
    }


def _functional_of_mixture(task: Tuple[State, State, float, NumericsSettings]) -> float:
    first, second, lam, cfg = task
    return uncertainty_functional(mix([first, second], [lam, 1.0 - lam]), cfg)


def _amplitudes_from(coordinates: np.ndarray, dim: int) -> np.ndarray:
    return coordinates[:dim] + 1j * coordinates[dim:]


def _search_slack(coordinates: np.ndarray, dim: int, cfg: NumericsSettings) -> float:
    amplitudes = _amplitudes_from(coordinates, dim)
    if np.linalg.norm(amplitudes) < 1e-12:
        return SEARCH_PENALTY
    try:
        state = from_amplitudes(amplitudes, max(dim - 1, 1), cfg.hbar)
        return tight_epur(state, cfg).slack
    except LabError as e:
        logger.debug(f"Search point rejected: {e}")
        return SEARCH_PENALTY


def _search_restart(task: Tuple[int, int, int, int, NumericsSettings]) -> Dict[str, Any]:
    index, dim, seed, max_iter, cfg = task
    restart_seed = derive_seed(seed, index)
    rng = np.random.default_rng(restart_seed)
    start = rng.standard_normal(2 * dim)
    trace: List[float] = []

    def objective(coordinates: np.ndarray) -> float:
        value = _search_slack(coordinates, dim, cfg)
        trace.append(min(value, trace[-1]) if trace else value)
        return value

    result = minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={"maxiter": max_iter, "xatol": 1e-7, "fatol": 1e-10, "adaptive": True},
    )
    amplitudes = _amplitudes_from(np.asarray(result.x), dim)
    amplitudes = amplitudes / np.linalg.norm(amplitudes)
    return {
        "restart": index,
        "seed": restart_seed,
        "final_slack": float(result.fun),
        "evaluations": int(result.nfev),
        "converged": bool(result.success),
        "amplitudes": amplitudes,
        "trace": trace,
    }


def _saturation_row(task: Tuple[float, float, int, NumericsSettings]) -> Dict[str, Any]:
    r, theta, eigencheck_nmax, cfg = task
    spec = GaussianUnitarySpec(r=r, phi=2.0 * theta)
    nmax = max(cfg.nmax, required_nmax_for_squeezing(r))
    state = squeezed_vacuum(spec, nmax, cfg.hbar)
    profile = profile_state(state, cfg)
    g = profile.cov
    expected = 0.5 * np.log(np.cosh(2 * r) ** 2 - np.cos(2 * theta) ** 2 * np.sinh(2 * r) ** 2)
    check = eigencheck(spec, max(eigencheck_nmax, nmax), cfg.hbar)
    return {
        "r": r,
        "theta": theta,
        "phi": spec.phi,
        "nmax": nmax,
        "hx_plus_hp": profile.hx + profile.hp,
        "bbm_slack": bbm(profile.hx, profile.hp, profile.hbar, cfg.sat_tol).slack,
        "expected_bbm_slack": float(expected),
        "tight_slack": tight_epur(profile, cfg).slack,
        "sr_slack": schrodinger_robertson(g, cfg.sat_tol).slack,
        "heisenberg_slack": heisenberg(g, cfg.sat_tol).slack,
        "eigencheck_residual": check.residual,
        "gamma_discrepancy": check.gamma_discrepancy,
    }


def nearest_pure_gaussian_distance(gamma: np.ndarray, hbar: float) -> float:
    """Frobenius distance from gamma to gamma (hbar/2)/sqrt|gamma|, the pure covariance with the same shape"""
    gamma = np.asarray(gamma, dtype=float)
    scaled = gamma * (hbar / 2.0) / np.sqrt(np.linalg.det(gamma))
    return float(np.linalg.norm(gamma - scaled))


def default_concavity_pairs(hbar: float = 1.0) -> List[Tuple[str, State, State]]:
    """The three published binary mixtures plus a pair sharing one covariance matrix"""
    psi = from_amplitudes([7j, 0, 1, 0], 3, hbar)
    phi = from_amplitudes([3j + 1, 2 + 5j, 1 + 3j, 6 + 8j], 3, hbar)
    plus = from_amplitudes([1, 0, 0, 1], 3, hbar)
    minus = from_amplitudes([1, 0, 0, -1], 3, hbar)
    return [
        ("|0>,|1>", fock_state(0, 3, hbar), fock_state(1, 3, hbar)),
        ("|2>,|0>", fock_state(2, 3, hbar), fock_state(0, 3, hbar)),
        ("psi,phi", psi, phi),
        ("same_covariance", plus, minus),
    ]


class ExperimentRunner:
    """
    Runs one experiment command per call
    Dispatches on the command name the way a message handler dispatches on intents
    """

    COMMANDS = (
        "passive-scan",
        "random-scan",
        "neighborhood",
        "concavity",
        "counterexample",
        "gaussian-saturation",
        "check",
        "multimode",
        "hygiene",
    )

    def __init__(self, settings: NumericsSettings):
        """
        Initialize the runner

        Args:
            settings: Numerical settings shared by every command
        """
        self.settings = settings

    def run(self, command: str, **params: Any) -> ExperimentResult:
        """
        Run a command by name

        Args:
            command: One of COMMANDS
            **params: Command parameters

        Returns:
            ExperimentResult: Table, summary and violations
        """
        handlers: Dict[str, Callable[..., ExperimentResult]] = {
            "passive-scan": self.cmd_passive_scan,
            "random-scan": self.cmd_random_scan,
            "neighborhood": self.cmd_neighborhood,
            "concavity": self.cmd_concavity,
            "counterexample": self.cmd_counterexample_search,
            "gaussian-saturation": self.cmd_gaussian_saturation,
            "check": self.cmd_check,
            "multimode": self.cmd_multimode,
            "hygiene": self.cmd_hygiene,
        }
        handler = handlers.get(command)
        if handler is None:
            raise ValueError(f"Unknown command {command!r} (expected one of {self.COMMANDS})")

        logger.info(f"▶️  Running {command}")
        started = datetime.now()
        result = handler(**params)
        result.started = started
        result.finished = datetime.now()

        elapsed = (result.finished - started).total_seconds()
        if result.passed:
            logger.info(f"✅ {command} finished in {elapsed:.1f}s with no violations")
        else:
            logger.error(f"❌ {command} finished in {elapsed:.1f}s with {len(result.violations)} violation(s)")
        return result

    @property
    def tol(self) -> float:
        return self.settings.tol

    def cmd_passive_scan(self, n_max_photon: int = 20) -> ExperimentResult:
        """
        Joint and marginal entropies of extremal passive states N = 0..n_max_photon

        Args:
            n_max_photon: Largest photon number N

        Returns:
            ExperimentResult: One row per N
        """
        cfg = self.settings
        rows = _map_tasks(_passive_row, [(n, cfg) for n in range(n_max_photon + 1)], cfg.workers)
        table = pd.DataFrame(rows).sort_values("N").reset_index(drop=True)

        violations = []
        for row in rows:
            state = extremal_passive_state(row["N"], max(row["N"], 1), cfg.hbar)
            if not row["applicable"]:
                violations.append(Violation(f"N={row['N']}: Wigner function below the negativity gate", state))
            elif row["joint_slack"] < -self.tol:
                violations.append(Violation(f"N={row['N']}: joint slack {row['joint_slack']:.3e}", state))
            elif row["hxp"] > row["hx_plus_hp"] + self.tol:
                violations.append(Violation(f"N={row['N']}: h(x,p) exceeds h(x)+h(p)", state))

        summary = {
            "rows": len(table),
            "min_joint_slack": float(table["joint_slack"].min()),
            "min_mutual_information": float(table["mutual_information"].min()),
            "joint_monotone": bool(np.all(np.diff(table["hxp"]) >= -self.tol)),
            "marginal_monotone": bool(np.all(np.diff(table["hx_plus_hp"]) >= -self.tol)),
            "violations": len(violations),
        }
        return ExperimentResult("passive-scan", {"n_max_photon": n_max_photon}, table, summary, violations)

    def cmd_random_scan(self, trials: int = 1000, dim: int = 4, seed: int = 42) -> ExperimentResult:
        """
        Covariance-corrected relation on Haar-random states

        Args:
            trials: Number of states
            dim: Size of the random unitary applied to the vacuum
            seed: Base seed; trial i uses derive_seed(seed, i)

        Returns:
            ExperimentResult: One row per trial, sorted by correlation coefficient
        """
        cfg = self.settings
        rows = _map_tasks(_random_row, [(i, dim, seed, cfg) for i in range(trials)], cfg.workers)
        table = pd.DataFrame(rows).sort_values(["rho", "trial"]).reset_index(drop=True)

        violations = [
            Violation(
                f"trial {row['trial']}: tight slack {row['tight_slack']:.3e}",
                haar_random_state(dim, max(dim - 1, 1), row["seed"], cfg.hbar),
            )
            for row in rows
            if row["tight_slack"] < -self.tol
        ]
        summary = {
            "trials": trials,
            "dim": dim,
            "min_tight_slack": float(table["tight_slack"].min()),
            "violations": len(violations),
        }
        params = {"trials": trials, "dim": dim, "seed": seed}
        return ExperimentResult("random-scan", params, table, summary, violations)

    def _neighborhood_reference(self, s: float, theta: float, reference: str) -> FockVector:
        cfg = self.settings
        if reference == "wavefunction":
            grid = default_grid(cfg.nmax, cfg.hbar, cfg.grid_points, cfg.grid_extent)
            logger.info("Reference built from the closed-form wavefunction (axis at 3pi/4, theta ignored)")
            return project_wavefunction(squeezed_wavefunction(grid.points, s, cfg.hbar), grid, cfg.nmax, cfg.hbar)
        if reference != "fock":
            raise ValueError(f"Unknown reference {reference!r} (expected fock or wavefunction)")
        spec = GaussianUnitarySpec.from_axis(s, theta)
        return squeezed_vacuum(spec, max(cfg.nmax, required_nmax_for_squeezing(spec.r)), cfg.hbar)

    def cmd_neighborhood(
        self,
        s: float = 1.5,
        theta: float = np.pi / 4,
        eps: float = 0.01,
        trials: int = 500,
        seed: int = 42,
        neighbor_dim: int = 4,
        reference: str = "fock",
    ) -> ExperimentResult:
        """
        Slightly non-Gaussian states |s, theta> + eps |phi> with Haar-random |phi>

        Args:
            s: Squeezing factor e^r of the reference
            theta: Principal-axis angle of the reference
            eps: Admixture amplitude
            trials: Number of random directions
            seed: Base seed
            neighbor_dim: Fock span of the random direction
            reference: fock (generator exponential) or wavefunction (closed form)

        Returns:
            ExperimentResult: One row per trial
        """
        cfg = self.settings
        ref = self._neighborhood_reference(s, theta, reference)
        tasks = [(i, ref, neighbor_dim, eps, seed, cfg) for i in range(trials)]
        rows = _map_tasks(_neighborhood_row, tasks, cfg.workers)
        table = pd.DataFrame(rows).sort_values("trial").reset_index(drop=True)

        violations = []
        for row in rows:
            if row["tight_slack"] < -self.tol:
                neighbor = haar_random_state(neighbor_dim, ref.nmax, row["seed"], ref.hbar)
                violations.append(
                    Violation(f"trial {row['trial']}: tight slack {row['tight_slack']:.3e}", superpose(ref, neighbor, eps))
                )
        summary = {
            "trials": trials,
            "min_tight_slack": float(table["tight_slack"].min()) if trials else float("nan"),
            "violations": len(violations),
        }
        params = {
            "s": s,
            "theta": theta,
            "eps": eps,
            "trials": trials,
            "seed": seed,
            "neighbor_dim": neighbor_dim,
            "reference": reference,
        }
        return ExperimentResult("neighborhood", params, table, summary, violations)

    def cmd_concavity(
        self,
        pairs: Optional[Sequence[Tuple[str, State, State]]] = None,
        lambdas: Optional[Iterable[float]] = None,
    ) -> ExperimentResult:
        """
        Concavity defect F(lam rho1 + (1 - lam) rho2) - [lam F(rho1) + (1 - lam) F(rho2)]

        Args:
            pairs: (label, state, state) triples; defaults to default_concavity_pairs
            lambdas: Mixing weights (defaults to 21 points on [0, 1])

        Returns:
            ExperimentResult: One row per pair and weight
        """
        cfg = self.settings
        pairs = list(pairs) if pairs is not None else default_concavity_pairs(cfg.hbar)
        lambdas = [float(v) for v in (np.linspace(0.0, 1.0, 21) if lambdas is None else lambdas)]

        rows = []
        violations = []
        for index, (label, first, second) in enumerate(pairs):
            nmax = max(first.nmax, second.nmax)
            rho1, rho2 = to_density(embed(first, nmax)), to_density(embed(second, nmax))
            f1 = uncertainty_functional(rho1, cfg)
            f2 = uncertainty_functional(rho2, cfg)
            values = _map_tasks(_functional_of_mixture, [(rho1, rho2, lam, cfg) for lam in lambdas], cfg.workers)
            for lam, value in zip(lambdas, values):
                linear = lam * f1 + (1.0 - lam) * f2
                defect = value - linear
                rows.append(
                    {"pair": index, "label": label, "lam": lam, "functional_mix": value, "functional_linear": linear, "defect": defect}
                )
                if defect < -self.tol:
                    violations.append(
                        Violation(f"pair {label} at lambda={lam:.3f}: defect {defect:.3e}", mix([rho1, rho2], [lam, 1.0 - lam]))
                    )

        table = pd.DataFrame(rows)
        summary = {
            "pairs": len(pairs),
            "lambdas": len(lambdas),
            "min_defect": float(table["defect"].min()) if rows else float("nan"),
            "violations": len(violations),
        }
        params = {"pairs": [label for label, _, _ in pairs], "lambdas": lambdas}
        return ExperimentResult("concavity", params, table, summary, violations)

    def cmd_counterexample_search(
        self, dim: int = 6, restarts: int = 50, seed: int = 42, max_iter: int = 2000
    ) -> ExperimentResult:
        """
        Nelder-Mead search for a state violating the covariance-corrected relation

        Never asserts: a negative slack is reported, not raised.

        Args:
            dim: Number of Fock amplitudes (at least 2)
            restarts: Independent random starting points
            seed: Base seed
            max_iter: Iteration cap per restart

        Returns:
            ExperimentResult: One row per restart; report holds the best state and traces
        """
        if dim < 2:
            raise ValueError(f"Search dimension must be at least 2 (got {dim})")
        cfg = self.settings
        outcomes = _map_tasks(_search_restart, [(i, dim, seed, max_iter, cfg) for i in range(restarts)], cfg.workers)
        outcomes.sort(key=lambda o: o["restart"])
        table = pd.DataFrame(
            [{k: o[k] for k in ("restart", "seed", "final_slack", "evaluations", "converged")} for o in outcomes]
        )

        best = min(outcomes, key=lambda o: (o["final_slack"], o["restart"]))
        best_state = FockVector(best["amplitudes"], cfg.hbar)
        profile = profile_state(best_state, cfg)
        distance = nearest_pure_gaussian_distance(profile.cov.matrix, cfg.hbar)
        if best["final_slack"] < -self.tol:
            logger.warning(f"⚠️  Search found slack {best['final_slack']:.3e} below -{self.tol}")

        summary = {
            "restarts": restarts,
            "dim": dim,
            "best_slack": best["final_slack"],
            "best_restart": best["restart"],
            "nearest_pure_gaussian_distance": distance,
        }
        report = {
            "best_slack": best["final_slack"],
            "best_restart": best["restart"],
            "best_amplitudes": best["amplitudes"],
            "best_covariance": profile.cov.matrix,
            "nearest_pure_gaussian_distance": distance,
            "traces": {o["restart"]: o["trace"] for o in outcomes},
        }
        params = {"dim": dim, "restarts": restarts, "seed": seed, "max_iter": max_iter}
        return ExperimentResult(
            "counterexample", params, table, summary, report=report, states={"counterexample_best_state": best_state}
        )

    def cmd_gaussian_saturation(
        self,
        r_grid: Optional[Iterable[float]] = None,
        theta_grid: Optional[Iterable[float]] = None,
        eigencheck_nmax: int = 80,
    ) -> ExperimentResult:
        """
        Sweep rotated squeezed vacua: the covariance-corrected and Schrodinger-Robertson
        relations saturate while the marginal relation keeps its closed-form gap

        Args:
            r_grid: Squeezing moduli (defaults to 5 values in [0, 0.8])
            theta_grid: Axis angles (defaults to 5 values in [0, pi))
            eigencheck_nmax: Truncation for the operator eigencheck column

        Returns:
            ExperimentResult: One row per (r, theta)
        """
        cfg = self.settings
        r_grid = [float(r) for r in (np.linspace(0.0, 0.8, 5) if r_grid is None else r_grid)]
        theta_grid = [float(t) for t in (np.linspace(0.0, np.pi, 5, endpoint=False) if theta_grid is None else theta_grid)]
        tasks = [(r, theta, eigencheck_nmax, cfg) for r in r_grid for theta in theta_grid]
        rows = _map_tasks(_saturation_row, tasks, cfg.workers)
        table = pd.DataFrame(rows).sort_values(["r", "theta"]).reset_index(drop=True)

        violations = []
        for row in rows:
            problems = []
            if abs(row["tight_slack"]) >= cfg.sat_tol:
                problems.append(f"tight slack {row['tight_slack']:.3e}")
            if abs(row["sr_slack"]) >= cfg.closed_form_tol:
                problems.append(f"SR slack {row['sr_slack']:.3e}")
            if abs(row["bbm_slack"] - row["expected_bbm_slack"]) >= 2 * cfg.sat_tol:
                problems.append(f"bbm slack {row['bbm_slack']:.5f} != {row['expected_bbm_slack']:.5f}")
            if row["eigencheck_residual"] >= EIGENCHECK_TOL:
                problems.append(f"eigencheck residual {row['eigencheck_residual']:.3e}")
            if problems:
                spec = GaussianUnitarySpec(r=row["r"], phi=row["phi"])
                violations.append(
                    Violation(f"r={row['r']:.3f} theta={row['theta']:.3f}: " + "; ".join(problems), squeezed_vacuum(spec, row["nmax"], cfg.hbar))
                )

        summary = {
            "points": len(rows),
            "max_abs_tight_slack": float(table["tight_slack"].abs().max()),
            "max_abs_sr_slack": float(table["sr_slack"].abs().max()),
            "max_bbm_gap_error": float((table["bbm_slack"] - table["expected_bbm_slack"]).abs().max()),
            "max_eigencheck_residual": float(table["eigencheck_residual"].max()),
            "violations": len(violations),
        }
        params = {"r_grid": r_grid, "theta_grid": theta_grid, "eigencheck_nmax": eigencheck_nmax}
        return ExperimentResult("gaussian-saturation", params, table, summary, violations)

    def cmd_check(self, state: State, include_joint: bool = True) -> ExperimentResult:
        """
        Every single-mode relation for one state

        Args:
            state: State to examine (typically loaded from a JSON state file)
            include_joint: Evaluate the Wigner-based joint relation as well

        Returns:
            ExperimentResult: One row per relation
        """
        verdicts = full_report(state, self.settings, include_joint=include_joint)
        table = pd.DataFrame([v.as_row() for v in verdicts])
        violations = [
            Violation(f"{v.name}: slack {v.slack:.3e}", state, v) for v in verdicts if not v.holds(self.tol)
        ]
        summary = {
            "nmax": state.nmax,
            "relations": len(verdicts),
            "saturated": [v.name for v in verdicts if v.saturated],
            "not_applicable": [v.name for v in verdicts if not v.applicable],
            "violations": len(violations),
        }
        return ExperimentResult("check", {"nmax": state.nmax, "include_joint": include_joint}, table, summary, violations)

    def cmd_multimode(
        self,
        r_grid: Optional[Iterable[float]] = None,
        trials: int = 200,
        modes: int = 4,
        seed: int = 42,
    ) -> ExperimentResult:
        """
        Closed-form two-mode examples and the n-mode chain on random physical covariances

        Args:
            r_grid: Squeezing values for the two-mode states
            trials: Random covariance matrices
            modes: Largest mode count of the random matrices
            seed: Base seed

        Returns:
            ExperimentResult: Rows of kind two_mode_squeezed, rotated_pair and random
        """
        cfg = self.settings
        tol = cfg.closed_form_tol
        r_grid = [float(r) for r in (np.linspace(0.0, 1.0, 6) if r_grid is None else r_grid)]
        rows = []
        violations = []

        for r in r_grid:
            for kind, builder in (("two_mode_squeezed", two_mode_squeezed), ("rotated_pair", rotated_pair)):
                g = builder(r, cfg.hbar)
                marginal = nmode_bbm(g, tol)
                tight = nmode_tight(g, tol)
                gamma_x, _ = reduced_blocks(g)
                expected = 2.0 * np.log(np.cosh(2 * r)) if kind == "rotated_pair" else 0.0
                rows.append(
                    {
                        "kind": kind,
                        "r": r,
                        "trial": -1,
                        "n": g.n,
                        "nmode_bbm_slack": marginal.slack,
                        "expected_bbm_slack": expected,
                        "nmode_tight_slack": tight.slack,
                        "nmode_epur_slack": nmode_epur(g, tol).slack,
                        "nmode_tight_epur_slack": nmode_tight_epur(g, tol).slack,
                        "det_gamma_x": float(np.linalg.det(gamma_x)),
                        "chain_min_slack": nmode_chain(g, sat_tol=tol).worst().slack,
                    }
                )
                if abs(marginal.slack - expected) > tol or abs(tight.slack) > tol:
                    violations.append(
                        Violation(f"{kind} r={r:.3f}: bbm {marginal.slack:.3e}, tight {tight.slack:.3e}", g, tight)
                    )

        for index in range(trials):
            trial_seed = derive_seed(seed, index)
            n = int(np.random.default_rng(trial_seed).integers(1, modes + 1))
            g = random_physical_gamma(n, trial_seed, cfg.hbar)
            chain = nmode_chain(g, sat_tol=tol)
            tight = nmode_tight(g, tol)
            gamma_x, _ = reduced_blocks(g)
            a_value = nmode_a_expectation(g)
            rows.append(
                {
                    "kind": "random",
                    "r": float("nan"),
                    "trial": index,
                    "n": n,
                    "nmode_bbm_slack": nmode_bbm(g, tol).slack,
                    "expected_bbm_slack": float("nan"),
                    "nmode_tight_slack": tight.slack,
                    "nmode_epur_slack": nmode_epur(g, tol).slack,
                    "nmode_tight_epur_slack": nmode_tight_epur(g, tol).slack,
                    "det_gamma_x": float(np.linalg.det(gamma_x)),
                    "chain_min_slack": chain.worst().slack,
                }
            )
            if not chain.holds(tol) or tight.slack < -tol or abs(a_value - n) > tol:
                violations.append(Violation(f"random trial {index} (n={n}): chain {chain.worst().name} broken", g, chain.worst()))

        table = pd.DataFrame(rows)
        summary = {
            "closed_form_rows": 2 * len(r_grid),
            "random_trials": trials,
            "min_chain_slack": float(table["chain_min_slack"].min()),
            "violations": len(violations),
        }
        params = {"r_grid": r_grid, "trials": trials, "modes": modes, "seed": seed}
        return ExperimentResult("multimode", params, table, summary, violations)

    def cmd_hygiene(self, seed: int = 42) -> ExperimentResult:
        """
        Entropy drift under grid doubling and under nmax + 16 on reference states

        Args:
            seed: Seed of the random reference state

        Returns:
            ExperimentResult: One row per state and marginal
        """
        cfg = self.settings
        hbar = cfg.hbar
        nmax = cfg.nmax
        squeeze = GaussianUnitarySpec(r=0.5, phi=1.0)
        larger = nmax + HYGIENE_EXTRA_LEVELS
        references: List[Tuple[str, State, State]] = [
            ("vacuum", vacuum(nmax, hbar), vacuum(larger, hbar)),
            ("fock_1", fock_state(1, nmax, hbar), fock_state(1, larger, hbar)),
            ("squeezed", squeezed_vacuum(squeeze, nmax, hbar), squeezed_vacuum(squeeze, larger, hbar)),
            ("passive_5", extremal_passive_state(5, nmax, hbar), extremal_passive_state(5, larger, hbar)),
            ("haar_4", haar_random_state(4, nmax, seed, hbar), haar_random_state(4, larger, seed, hbar)),
        ]
        refined = cfg.with_overrides(grid_points=2 * (cfg.grid_points - 1) + 1)

        rows = []
        violations = []
        for name, state, bigger in references:
            base = profile_state(state, cfg)
            fine = profile_state(state, refined)
            wide = profile_state(bigger, cfg)
            for quantity, attr in (("hx", "hx"), ("hp", "hp")):
                reference = getattr(base, attr)
                grid_drift = abs(getattr(fine, attr) - reference)
                nmax_drift = abs(getattr(wide, attr) - reference)
                rows.append(
                    {
                        "state": name,
                        "quantity": quantity,
                        "reference": reference,
                        "refined_grid": getattr(fine, attr),
                        "larger_nmax": getattr(wide, attr),
                        "grid_drift": grid_drift,
                        "nmax_drift": nmax_drift,
                    }
                )
                if grid_drift >= HYGIENE_GRID_TOL or nmax_drift >= HYGIENE_NMAX_TOL:
                    violations.append(
                        Violation(f"{name} {quantity}: grid drift {grid_drift:.2e}, nmax drift {nmax_drift:.2e}", state)
                    )

        table = pd.DataFrame(rows)
        summary = {
            "max_grid_drift": float(table["grid_drift"].max()),
            "max_nmax_drift": float(table["nmax_drift"].max()),
            "violations": len(violations),
        }
        return ExperimentResult("hygiene", {"seed": seed, "extra_levels": HYGIENE_EXTRA_LEVELS}, table, summary, violations)
