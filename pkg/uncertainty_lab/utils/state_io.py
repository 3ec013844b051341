"""
State File Helper
Reads and writes states as JSON documents so runs can be replayed
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np
from loguru import logger

from cv_models.exceptions import StateFormatError
from cv_models.fock.states import FockDensity, FockVector, State, embed, from_amplitudes


def _complex_list(values: np.ndarray) -> List[Any]:
    values = np.asarray(values, dtype=complex)
    if values.ndim == 1:
        return [[float(v.real), float(v.imag)] for v in values]
    return [_complex_list(row) for row in values]


def _parse_complex(entry: Any, where: str) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2 and all(isinstance(v, (int, float)) for v in entry):
        return complex(entry[0], entry[1])
    raise StateFormatError(f"{where}: expected a number or a [re, im] pair, got {entry!r}")


def state_to_dict(state: State) -> Dict[str, Any]:
    """Serialize a state to the documented JSON layout"""
    if isinstance(state, FockVector):
        return {"hbar": state.hbar, "amplitudes": _complex_list(state.amplitudes)}
    return {"hbar": state.hbar, "matrix": _complex_list(state.matrix)}


def state_from_dict(document: Dict[str, Any]) -> State:
    """
    Build a state from {"hbar", "amplitudes"} or {"hbar", "matrix"}

    Amplitudes are normalized on load; an optional "nmax" pads the state to a
    larger truncation.

    Args:
        document: Parsed JSON object

    Returns:
        State: FockVector or FockDensity
    """
    if not isinstance(document, dict):
        raise StateFormatError(f"State must be a JSON object, got {type(document).__name__}")
    hbar = float(document.get("hbar", 1.0))
    if "amplitudes" in document:
        entries = document["amplitudes"]
        if not isinstance(entries, list) or not entries:
            raise StateFormatError("'amplitudes' must be a non-empty list")
        values = [_parse_complex(entry, f"amplitudes[{i}]") for i, entry in enumerate(entries)]
        state: State = from_amplitudes(values, hbar=hbar)
    elif "matrix" in document:
        rows = document["matrix"]
        if not isinstance(rows, list) or not rows or any(not isinstance(row, list) for row in rows):
            raise StateFormatError("'matrix' must be a list of rows")
        matrix = np.array(
            [[_parse_complex(entry, f"matrix[{i}][{j}]") for j, entry in enumerate(row)] for i, row in enumerate(rows)]
        )
        state = FockDensity(matrix, hbar)
    else:
        raise StateFormatError("State object needs an 'amplitudes' or a 'matrix' key")

    if "nmax" in document:
        state = embed(state, int(document["nmax"]))
    return state


def load_state(path: Union[str, Path]) -> State:
    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise StateFormatError(f"{path}: invalid JSON ({e})") from e
    state = state_from_dict(document)
    logger.info(f"📂 Loaded state from {path} (nmax={state.nmax})")
    return state


def save_state(state: State, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(state_to_dict(state), indent=2))
    logger.info(f"💾 Saved state to {path}")
    return path


def load_pairs(path: Union[str, Path]) -> List[Tuple[State, State]]:
    """Read a JSON list of [state, state] pairs for the concavity test"""
    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise StateFormatError(f"{path}: invalid JSON ({e})") from e
    if not isinstance(document, list):
        raise StateFormatError(f"{path}: expected a list of state pairs")
    pairs = []
    for index, pair in enumerate(document):
        if not isinstance(pair, list) or len(pair) != 2:
            raise StateFormatError(f"{path}: entry {index} is not a pair")
        pairs.append((state_from_dict(pair[0]), state_from_dict(pair[1])))
    logger.info(f"📂 Loaded {len(pairs)} state pairs from {path}")
    return pairs
