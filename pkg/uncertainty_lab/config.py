"""
Configuration module for the Entropic Uncertainty Lab
Manages environment variables and numerical settings
"""

import os
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from loguru import logger

# Load environment variables from .env file
load_dotenv()


@dataclass(frozen=True)
class NumericsSettings:
    """
    Immutable numerical settings threaded through every relation evaluation

    Built by Config.numerics(); CLI flags arrive as overrides.
    """

    hbar: float = 1.0
    nmax: int = 64
    grid_points: int = 2048
    grid_extent: float = 1.0
    wigner_points: int = 256
    quadrature_order: int = 512
    neg_tol: float = 1e-9
    sat_tol: float = 1e-4
    tol: float = 1e-4
    closed_form_tol: float = 1e-8
    workers: int = 1

    def with_overrides(self, **overrides: Any) -> "NumericsSettings":
        """Return a copy with the non-None overrides applied"""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **changes) if changes else self

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


class Config:
    """Lab Configuration"""

    # Lab identity
    LAB_NAME: str = os.getenv("CVLAB_NAME", "Entropic Uncertainty Lab")
    LAB_VERSION: str = os.getenv("CVLAB_VERSION", "1.0.0")

    # Physical units
    HBAR: float = float(os.getenv("CVLAB_HBAR", "1.0"))

    # Fock truncation and sampling grids
    NMAX: int = int(os.getenv("CVLAB_NMAX", "64"))
    GRID_POINTS: int = int(os.getenv("CVLAB_GRID_POINTS", "2048"))
    GRID_EXTENT: float = float(os.getenv("CVLAB_GRID_EXTENT", "1.0"))
    WIGNER_POINTS: int = int(os.getenv("CVLAB_WIGNER_POINTS", "256"))
    QUADRATURE_ORDER: int = int(os.getenv("CVLAB_QUADRATURE_ORDER", "512"))

    # Tolerances
    NEG_TOL: float = float(os.getenv("CVLAB_NEG_TOL", "1e-9"))
    SAT_TOL: float = float(os.getenv("CVLAB_SAT_TOL", "1e-4"))
    TOL: float = float(os.getenv("CVLAB_TOL", "1e-4"))
    CLOSED_FORM_TOL: float = float(os.getenv("CVLAB_CLOSED_FORM_TOL", "1e-8"))

    # Execution
    WORKERS: int = int(os.getenv("CVLAB_WORKERS", "1"))
    OUTPUT_DIR: str = os.getenv("CVLAB_OUTPUT_DIR", "results")
    LOG_LEVEL: str = os.getenv("CVLAB_LOG_LEVEL", "INFO")

    @classmethod
    def numerics(cls, **overrides: Any) -> NumericsSettings:
        """
        Build numerical settings from the environment defaults

        Args:
            **overrides: Field values replacing the defaults (None is ignored)

        Returns:
            NumericsSettings: Frozen settings object
        """
        base = NumericsSettings(
            hbar=cls.HBAR,
            nmax=cls.NMAX,
            grid_points=cls.GRID_POINTS,
            grid_extent=cls.GRID_EXTENT,
            wigner_points=cls.WIGNER_POINTS,
            quadrature_order=cls.QUADRATURE_ORDER,
            neg_tol=cls.NEG_TOL,
            sat_tol=cls.SAT_TOL,
            tol=cls.TOL,
            closed_form_tol=cls.CLOSED_FORM_TOL,
            workers=cls.WORKERS,
        )
        return base.with_overrides(**overrides)

    @classmethod
    def validate_config(cls, settings: Optional[NumericsSettings] = None) -> tuple[bool, list[str]]:
        """
        Validate numerical configuration values

        Args:
            settings: Settings to check (defaults to the environment settings)

        Returns:
            tuple: (is_valid, list of problems)
        """
        settings = settings or cls.numerics()
        problems = []

        if settings.hbar <= 0:
            problems.append(f"hbar must be positive (got {settings.hbar})")
        if settings.nmax < 1:
            problems.append(f"nmax must be at least 1 (got {settings.nmax})")
        if settings.grid_points < 64:
            problems.append(f"grid_points must be at least 64 (got {settings.grid_points})")
        if settings.wigner_points < 64:
            problems.append(f"wigner_points must be at least 64 (got {settings.wigner_points})")
        if settings.grid_extent <= 0:
            problems.append(f"grid_extent must be positive (got {settings.grid_extent})")
        if settings.quadrature_order < 16:
            problems.append(f"quadrature_order must be at least 16 (got {settings.quadrature_order})")
        if settings.workers < 1:
            problems.append(f"workers must be at least 1 (got {settings.workers})")

        for name in ("neg_tol", "sat_tol", "tol", "closed_form_tol"):
            if getattr(settings, name) <= 0:
                problems.append(f"{name} must be positive")

        return not problems, problems

    @classmethod
    def print_config_summary(cls, settings: Optional[NumericsSettings] = None) -> None:
        """Log configuration summary"""
        settings = settings or cls.numerics()
        logger.info("=" * 60)
        logger.info("LAB CONFIGURATION SUMMARY")
        logger.info("=" * 60)
        logger.info(f"Lab Name: {cls.LAB_NAME}")
        logger.info(f"Lab Version: {cls.LAB_VERSION}")
        logger.info(f"hbar: {settings.hbar}")
        logger.info(f"Fock truncation nmax: {settings.nmax}")
        logger.info(f"Grid: {settings.grid_points} points x{settings.grid_extent} extent")
        logger.info(f"Wigner grid: {settings.wigner_points}^2, quadrature order {settings.quadrature_order}")
        logger.info(f"Tolerances: tol={settings.tol} sat={settings.sat_tol} neg={settings.neg_tol}")
        logger.info(f"Workers: {settings.workers}")
        logger.info("=" * 60)

        is_valid, problems = cls.validate_config(settings)
        if not is_valid:
            logger.warning(f"⚠️  Invalid configuration: {'; '.join(problems)}")
        else:
            logger.info("✅ Numerical configuration is valid")
        logger.info("=" * 60)


# Create singleton instance
config = Config()
