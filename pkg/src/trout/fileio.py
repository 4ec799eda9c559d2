"""CSV and JSON readers and writers used by the command-line tools.

Floats are serialized with 17 significant digits so that a write/read round
trip reproduces every value exactly. Data files are UTF-8 with LF endings.
"""

from __future__ import annotations

import json

import numpy as np

from .spectral import TimeSeries

__all__ = [
    "DataError",
    "format_float",
    "write_data_csv",
    "read_data_csv",
    "write_labels_csv",
    "read_labels_csv",
    "write_json",
    "complex_matrix_to_pairs",
]


class DataError(Exception):
    """Malformed or unreadable input data."""


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def write_data_csv(path, series) -> None:
    """One observation per row under a t0..t{N-1} header."""
    if len(series) == 0:
        raise ValueError("nothing to write")
    n_samples = len(series[0])
    header = ",".join(f"t{i}" for i in range(n_samples))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for ts in series:
            values = ts.values if isinstance(ts, TimeSeries) else np.asarray(ts)
            if values.size != n_samples:
                raise ValueError("series lengths differ")
            fh.write(",".join(format_float(v) for v in values) + "\n")


def read_data_csv(path) -> list[TimeSeries]:
    """Parse a data CSV back into a list of TimeSeries.

    Raises DataError with the offending row and column on malformed input.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.rstrip("\n").rstrip("\r") for ln in fh]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in lines if ln != ""]
    if not lines:
        raise DataError(f"{path}: empty file")
    header = lines[0].split(",")
    n_samples = len(header)
    expected = [f"t{i}" for i in range(n_samples)]
    if header != expected:
        raise DataError(f"{path}: row 1: expected header t0..t{n_samples - 1}")
    series = []
    for r, line in enumerate(lines[1:], start=2):
        tokens = line.split(",")
        if len(tokens) != n_samples:
            raise DataError(
                f"{path}: row {r}: expected {n_samples} columns, got {len(tokens)}"
            )
        values = np.empty(n_samples)
        for c, tok in enumerate(tokens, start=1):
            try:
                values[c - 1] = float(tok)
            except ValueError:
                raise DataError(
                    f"{path}: row {r}, column {c}: not a number: {tok!r}"
                ) from None
        try:
            series.append(TimeSeries(values, float(n_samples)))
        except ValueError as exc:
            raise DataError(f"{path}: row {r}: {exc}") from exc
    if not series:
        raise DataError(f"{path}: no data rows")
    return series


def write_labels_csv(path, labels) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("label\n")
        for lab in np.asarray(labels).ravel():
            fh.write(f"{int(lab)}\n")


def read_labels_csv(path) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in lines if ln != ""]
    if not lines or lines[0] != "label":
        raise DataError(f"{path}: row 1: expected header 'label'")
    labels = []
    for r, line in enumerate(lines[1:], start=2):
        try:
            labels.append(int(line))
        except ValueError:
            raise DataError(f"{path}: row {r}: not an integer: {line!r}") from None
    return np.array(labels, dtype=int)


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def complex_matrix_to_pairs(matrix) -> list:
    """Encode a complex matrix as nested [re, im] pairs for JSON output."""
    m = np.asarray(matrix, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]
