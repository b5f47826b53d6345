"""CSV + JSON sidecar serialization for payoff matrices.

CSV layout: the first row holds strategy labels, every following row is one
row of the matrix. The sidecar (``<stem>.json``) carries provenance.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np


class PayoffFormatError(ValueError):
    pass


def matrix_to_csv(P, labels) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(labels)
    for row in np.asarray(P, dtype=float):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def write_payoff(path, P, labels, sidecar: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(matrix_to_csv(P, labels))
    if sidecar is not None:
        sidecar_path(path).write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return path


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def read_payoff(path) -> tuple[np.ndarray, list[str], dict]:
    """Parse a payoff CSV. Raises :class:`PayoffFormatError` on malformed input."""
    path = Path(path)
    try:
        rows = list(csv.reader(path.read_text().splitlines()))
    except OSError as e:
        raise PayoffFormatError(f"cannot read {path}: {e}") from e
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise PayoffFormatError("payoff CSV needs a label row and at least one data row")
    labels = [s.strip() for s in rows[0]]
    n = len(labels)
    if len(rows) - 1 != n:
        raise PayoffFormatError(f"non-square payoff: {n} labels but {len(rows) - 1} rows")
    try:
        P = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as e:
        raise PayoffFormatError(f"non-numeric entry: {e}") from e
    if P.shape != (n, n):
        raise PayoffFormatError(f"non-square payoff: expected {n}x{n}, got ragged rows")
    if not np.all(np.isfinite(P)):
        raise PayoffFormatError("payoff contains NaN or infinite entries")
    side = sidecar_path(path)
    meta = json.loads(side.read_text()) if side.exists() else {}
    return P, labels, meta
