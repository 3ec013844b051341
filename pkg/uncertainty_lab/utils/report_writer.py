"""
Report Writer Utility
Persists experiment tables, run manifests, reports and replay states
"""

import json
import platform
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd
import scipy
from loguru import logger

from cv_models.fock.states import State
from uncertainty_lab import __version__
from uncertainty_lab.config import NumericsSettings
from uncertainty_lab.utils.state_io import save_state

FORMATS = ("csv", "json")


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, datetime):
        return value.isoformat()
    return value


class ReportWriter:
    """Writes every artifact of one command into an output directory"""

    def __init__(self, out_dir: Union[str, Path], fmt: str = "csv"):
        """
        Initialize the writer

        Args:
            out_dir: Directory receiving the artifacts (created if missing)
            fmt: Table format, csv or json
        """
        if fmt not in FORMATS:
            raise ValueError(f"Unknown table format {fmt!r} (expected one of {FORMATS})")
        self.out_dir = Path(out_dir)
        self.fmt = fmt
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def write_table(self, name: str, table: pd.DataFrame) -> Path:
        """
        Write a table as CSV (one header row) or JSON records

        Args:
            name: File stem
            table: Data to write

        Returns:
            Path: Written file
        """
        path = self.out_dir / f"{name}.{self.fmt}"
        if self.fmt == "csv":
            table.to_csv(path, index=False)
        else:
            path.write_text(json.dumps(_jsonable(table.to_dict(orient="records")), indent=2))
        logger.info(f"📄 Wrote {len(table)} rows to {path}")
        return path

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self.out_dir / f"{name}.json"
        path.write_text(json.dumps(_jsonable(payload), indent=2))
        logger.info(f"📄 Wrote {path}")
        return path

    def write_manifest(
        self,
        command: str,
        parameters: Dict[str, Any],
        settings: NumericsSettings,
        summary: Dict[str, Any],
        started: datetime,
        finished: Optional[datetime] = None,
    ) -> Path:
        """
        Write <command>_manifest.json describing the run

        Args:
            command: Subcommand name
            parameters: Command parameters
            settings: Numerical settings in force
            summary: Verdict summary of the command
            started: Start time
            finished: End time (defaults to now)

        Returns:
            Path: Written manifest
        """
        manifest = {
            "command": command,
            "parameters": parameters,
            "settings": settings.as_dict(),
            "summary": summary,
            "versions": {
                "uncertainty_lab": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pandas": pd.__version__,
            },
            "started": started,
            "finished": finished or datetime.now(),
        }
        return self.write_json(f"{command}_manifest", manifest)

    def write_state(self, name: str, state: State) -> Path:
        """Serialize a state for replay with the check command"""
        return save_state(state, self.out_dir / f"{name}.json")
