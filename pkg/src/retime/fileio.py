"""Text file formats shared by the CLI and tests.

Matrices and signals travel as CSV with a ``#`` header line; structured
results travel as JSON.  All writers are deterministic for fixed inputs.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .signals import ORIENTATIONS, ZERO_SLOW, SlownessMatrix
from .synth import GroundTruthCase, perfect_slowness, skip_labels

_SLOWNESS_HEADER = re.compile(r"#\s*slowness\s+k=(\d+)\s*$")
_ORIENTATION_HEADER = re.compile(r"#\s*orientation=(\w+)\s*$")
_FLOAT_FORMAT = "%.17g"


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


def write_slowness_csv(path, matrix: SlownessMatrix) -> None:
    """One row per between-frame position, preceded by ``# slowness k=<k>``."""
    lines = [f"# slowness k={matrix.k}"]
    for row in matrix.probs:
        lines.append(",".join(_FLOAT_FORMAT % value for value in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_slowness_csv(path) -> SlownessMatrix:
    text = _read_text(path)
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise InvalidInputError(f"{path} is empty")
    header = _SLOWNESS_HEADER.match(lines[0])
    if header is None:
        raise InvalidInputError(f"{path} lacks the '# slowness k=<k>' header")
    k = int(header.group(1))
    try:
        rows = [[float(cell) for cell in line.split(",")] for line in lines[1:]]
        probs = np.asarray(rows, dtype=np.float64)
    except ValueError as exc:
        raise InvalidInputError(f"{path} has malformed rows: {exc}") from exc
    if probs.ndim != 2:
        raise InvalidInputError(f"{path} rows have inconsistent widths")
    return SlownessMatrix(probs, k)


def write_slowness_json(path, matrix: SlownessMatrix) -> None:
    payload = {"k": matrix.k, "probs": matrix.probs.tolist()}
    Path(path).write_text(json.dumps(payload) + "\n")


def read_slowness_json(path) -> SlownessMatrix:
    try:
        payload = json.loads(_read_text(path))
        return SlownessMatrix(np.asarray(payload["probs"], dtype=np.float64), int(payload["k"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"{path} is not a valid slowness JSON: {exc}") from exc


def load_slowness(path) -> SlownessMatrix:
    """Dispatch on the file suffix: .json or CSV otherwise."""
    if str(path).endswith(".json"):
        return read_slowness_json(path)
    return read_slowness_csv(path)


def write_signal_csv(path, values, orientation: str = ZERO_SLOW) -> None:
    """One float per line with an ``# orientation=<token>`` header."""
    if orientation not in ORIENTATIONS:
        raise InvalidInputError(f"unknown orientation {orientation!r}")
    values = np.asarray(values, dtype=np.float64)
    lines = [f"# orientation={orientation}"]
    lines.extend(_FLOAT_FORMAT % value for value in values)
    Path(path).write_text("\n".join(lines) + "\n")


def read_signal_csv(path):
    """Returns (values, orientation); a missing header means zero_slow."""
    text = _read_text(path)
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    orientation = ZERO_SLOW
    if lines and lines[0].startswith("#"):
        header = _ORIENTATION_HEADER.match(lines[0])
        if header is None or header.group(1) not in ORIENTATIONS:
            raise InvalidInputError(f"{path} has an invalid orientation header")
        orientation = header.group(1)
        lines = lines[1:]
    if not lines:
        raise InvalidInputError(f"{path} holds no signal values")
    try:
        values = np.asarray([float(line) for line in lines])
    except ValueError as exc:
        raise InvalidInputError(f"{path} has malformed values: {exc}") from exc
    return values, orientation


def read_features_csv(path) -> np.ndarray:
    """Per-frame feature vectors: one comma-separated row per frame."""
    text = _read_text(path)
    lines = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not lines:
        raise InvalidInputError(f"{path} holds no feature rows")
    try:
        rows = [[float(cell) for cell in line.split(",")] for line in lines]
        feats = np.asarray(rows, dtype=np.float64)
    except ValueError as exc:
        raise InvalidInputError(f"{path} has malformed rows: {exc}") from exc
    if feats.ndim != 2:
        raise InvalidInputError(f"{path} rows have inconsistent widths")
    return feats


def write_case_json(path, case: GroundTruthCase) -> None:
    payload = {
        "seed": case.seed,
        "k": case.k,
        "skips": case.skips.tolist(),
        "labels": case.labels.tolist(),
        "n": case.n,
        "l": case.l,
    }
    Path(path).write_text(json.dumps(payload) + "\n")


def read_case_json(path) -> GroundTruthCase:
    """Rebuilds the perfect slowness matrix from the stored skips."""
    try:
        payload = json.loads(_read_text(path))
        skips = np.asarray(payload["skips"], dtype=np.int64)
        k = int(payload["k"])
        case = GroundTruthCase(
            skips=skips,
            labels=np.asarray(payload["labels"], dtype=np.int64),
            n=int(payload["n"]),
            l=int(payload["l"]),
            slowness=perfect_slowness(skips, k),
            seed=int(payload["seed"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"{path} is not a valid case JSON: {exc}") from exc
    if (case.labels != skip_labels(skips, k)).any():
        raise InvalidInputError(f"{path} labels do not match its skips")
    return case


def write_report_json(path, report) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2) + "\n")


def write_summary_csv(path, report) -> None:
    """Flat method x duration table of mean absolute errors."""
    lines = ["method,duration_seconds,mean_mae"]
    for method in report.methods:
        for duration in report.durations:
            lines.append(f"{method},{duration:g},{report.mean_mae(method, duration):.6f}")
    Path(path).write_text("\n".join(lines) + "\n")
