"""Deterministic JSON and CSV output."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, List, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def complex_to_pair(z: complex) -> List[float]:
    return [float(np.real(z)), float(np.imag(z))]


def pair_to_complex(pair: Any) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    re, im = pair
    return complex(float(re), float(im))


def matrix_to_json(m: np.ndarray) -> List[List[List[float]]]:
    """Nested ``[re, im]`` pairs, row-major."""
    return [[complex_to_pair(z) for z in row] for row in np.asarray(m)]


def _default(obj: Any) -> Any:
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return complex_to_pair(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def dumps(payload: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, indent=2, sort_keys=True, default=_default) + "\n"


def write_json(payload: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps(payload))
    logger.info(f"Wrote {path}")
    return path


def write_csv(df: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(
        path,
        index=False,
        float_format=CSV_FLOAT_FORMAT,
        encoding="utf-8",
        lineterminator="\n",
    )
    logger.info(f"Wrote {path} ({len(df)} rows)")
    return path


def config_hash(payload: Any) -> str:
    """SHA-256 of the canonical compact JSON form."""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=_default)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
