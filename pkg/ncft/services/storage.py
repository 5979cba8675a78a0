import csv
import json
import logging
from pathlib import Path
from typing import Any, Union

import numpy as np
from pydantic import BaseModel

from ncft.core.exceptions import InvalidFile, ShapeMismatch

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def encode_complex(array) -> list:
    """Nested row-major lists with every complex entry as [re, im]"""
    array = np.asarray(array, dtype=complex)
    return np.stack([array.real, array.imag], axis=-1).tolist()


def decode_complex(data) -> np.ndarray:
    try:
        array = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise ShapeMismatch(f"complex entries must be numeric [re, im] pairs: {e}") from e
    if array.ndim == 0 or array.shape[-1] != 2:
        raise ShapeMismatch("complex entries must be [re, im] pairs")
    return array[..., 0] + 1j * array[..., 1]


def read_json(path: PathLike) -> Any:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as e:
            raise InvalidFile(f"{path} is not valid JSON: line {e.lineno}, column {e.colno}: {e.msg}") from e


def read_json_object(path: PathLike, what: str) -> dict:
    """read_json for files whose top level must be an object"""
    payload = read_json(path)
    if not isinstance(payload, dict):
        raise InvalidFile(f"{path}: expected a JSON object for the {what}, got {type(payload).__name__}")
    return payload


def write_json(payload: Union[BaseModel, dict, list], path: PathLike | None = None) -> str:
    """Serialize to path, or return the text when no path is given"""
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
        logger.info(f"✅ Wrote {path}")
    return text


CSV_COLUMNS = ["group", "kind", "p", "E", "estimate", "bound"]


def write_estimates_csv(rows: list[dict], path: PathLike) -> None:
    """One row per constant estimate with its tightest theorem bound (blank when none)"""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    logger.info(f"✅ Wrote {len(rows)} rows to {path}")
