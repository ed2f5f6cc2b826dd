"""Storage helpers for parameter documents, restriction matrices and reports on disk."""
from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np

from . import config
from .errors import ConfigInvalid

logger = logging.getLogger(__name__)


def read_json(path: str | Path) -> Dict[str, Any]:
    """Return the JSON object stored at *path*."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError as exc:
        message = config.PARAMS_FILE_MISSING.format(path=path)
        logger.error(message)
        raise ConfigInvalid(message) from exc
    except json.JSONDecodeError as exc:
        message = config.PARAMS_FILE_INVALID.format(path=path, error=exc)
        logger.error(message)
        raise ConfigInvalid(message) from exc
    except OSError as exc:
        message = config.PARAMS_FILE_INVALID.format(path=path, error=exc)
        logger.error(message)
        raise ConfigInvalid(message) from exc
    if not isinstance(data, dict):
        message = config.PARAMS_FILE_INVALID.format(path=path, error="top level must be an object")
        logger.error(message)
        raise ConfigInvalid(message)
    return data


def write_json(path: str | Path, data: Dict[str, Any]) -> None:
    """Write *data* as indented JSON, creating parent directories."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as handle:
            json.dump(data, handle, indent=2)
            handle.write("\n")
    except OSError as exc:
        message = config.REPORT_WRITE_FAILED.format(path=path, error=exc)
        logger.error(message)
        raise ConfigInvalid(message) from exc


def load_params(path: str | Path) -> Dict[str, Any]:
    """Return a raw parameter document; validation happens in the models."""
    data = read_json(path)
    logger.debug("loaded parameter document %s with keys %s", path, sorted(data))
    return data


def write_report(path: str | Path, report: Dict[str, Any]) -> None:
    write_json(path, report)
    logger.info("report with %d checks written to %s", len(report.get("checks", [])), path)


def format_cell(value: complex) -> str:
    value = complex(value)
    return f"{value.real:.17g}{value.imag:+.17g}j"


def write_matrix_csv(path: str | Path, basis: Sequence[str], entries: np.ndarray) -> None:
    """Write one CSV row per matrix row, led by the basis label, cells as re+imj."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["", *basis])
            for label, row in zip(basis, entries):
                writer.writerow([label, *(format_cell(value) for value in row)])
    except OSError as exc:
        message = config.REPORT_WRITE_FAILED.format(path=path, error=exc)
        logger.error(message)
        raise ConfigInvalid(message) from exc


def read_matrix_csv(path: str | Path) -> List[List[complex]]:
    """Return the complex cells of a matrix written by write_matrix_csv."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        message = config.PARAMS_FILE_MISSING.format(path=path)
        logger.error(message)
        raise ConfigInvalid(message) from exc
    try:
        return [[complex(cell) for cell in row[1:]] for row in rows[1:]]
    except ValueError as exc:
        message = config.PARAMS_FILE_INVALID.format(path=path, error=exc)
        logger.error(message)
        raise ConfigInvalid(message) from exc
