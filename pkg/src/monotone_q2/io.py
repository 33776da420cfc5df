"""Matrix Market coordinate files, CSV tables and JSON-lines reports.

The Matrix Market writer emits ``coordinate real general`` with entries
sorted by (row, col) and values in shortest round-trip form, so
``read(write(A)) == A`` bit for bit and files are deterministic. The reader
accepts the same subset and reports malformed input with its line number.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .assembly import SparseOperator

__all__ = [
    "MatrixMarketError",
    "write_matrix_market",
    "read_matrix_market",
    "write_csv",
    "write_jsonl",
    "read_jsonl",
]

HEADER = "%%MatrixMarket matrix coordinate real general"


class MatrixMarketError(ValueError):
    """Malformed Matrix Market input; ``line`` is 1-based."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


def _matrix(op) -> sp.coo_matrix:
    A = op.matrix if isinstance(op, SparseOperator) else op
    A = sp.csr_matrix(A)
    A.sum_duplicates()
    A.sort_indices()
    return A.tocoo()


def write_matrix_market(op, path, comment: str | None = None) -> None:
    """Write ``op`` (a :class:`SparseOperator` or any sparse/dense matrix)."""
    A = _matrix(op)
    order = np.lexsort((A.col, A.row))
    lines = [HEADER]
    if comment:
        lines += [f"% {line}" for line in comment.splitlines()]
    lines.append(f"{A.shape[0]} {A.shape[1]} {A.nnz}")
    lines += [f"{r + 1} {c + 1} {float(v)!r}" for r, c, v in zip(A.row[order], A.col[order], A.data[order])]
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write Matrix Market file {path}: {exc.strerror or exc}") from exc


def read_matrix_market(path) -> SparseOperator:
    """Read a ``coordinate real general`` file into an operator without grid
    metadata."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read Matrix Market file {path}: {exc.strerror or exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise MatrixMarketError(path, 1, "empty file")
    banner = lines[0].split()
    if len(banner) != 5 or banner[0] != "%%MatrixMarket":
        raise MatrixMarketError(path, 1, "missing '%%MatrixMarket' banner")
    if [t.lower() for t in banner[1:]] != ["matrix", "coordinate", "real", "general"]:
        raise MatrixMarketError(path, 1, f"unsupported format {' '.join(banner[1:])!r}; "
                                         "only 'matrix coordinate real general' is read")
    k = 1
    while k < len(lines) and (not lines[k].strip() or lines[k].lstrip().startswith("%")):
        k += 1
    if k == len(lines):
        raise MatrixMarketError(path, k + 1, "missing size line")
    size = lines[k].split()
    try:
        n_rows, n_cols, nnz = (int(t) for t in size)
    except ValueError:
        raise MatrixMarketError(path, k + 1, f"size line must hold three integers, got {lines[k]!r}") from None
    if n_rows < 0 or n_cols < 0 or nnz < 0:
        raise MatrixMarketError(path, k + 1, "negative size")
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz)
    count = 0
    for lineno in range(k + 2, len(lines) + 1):
        line = lines[lineno - 1].strip()
        if not line or line.startswith("%"):
            continue
        if count == nnz:
            raise MatrixMarketError(path, lineno, f"more entries than the declared {nnz}")
        parts = line.split()
        if len(parts) != 3:
            raise MatrixMarketError(path, lineno, f"expected 'row col value', got {line!r}")
        try:
            r, c = int(parts[0]), int(parts[1])
            v = float(parts[2])
        except ValueError:
            raise MatrixMarketError(path, lineno, f"cannot parse entry {line!r}") from None
        if not (1 <= r <= n_rows and 1 <= c <= n_cols):
            raise MatrixMarketError(path, lineno, f"index ({r}, {c}) outside {n_rows} x {n_cols}")
        if not math.isfinite(v):
            raise MatrixMarketError(path, lineno, f"non-finite value {parts[2]!r}")
        rows[count], cols[count], vals[count] = r - 1, c - 1, v
        count += 1
    if count != nnz:
        raise MatrixMarketError(path, len(lines), f"declared {nnz} entries but found {count}")
    A = sp.csr_matrix((vals, (rows, cols)), shape=(n_rows, n_cols))
    A.sum_duplicates()
    A.sort_indices()
    return SparseOperator(A)


def write_csv(path, rows: Iterable[Mapping], columns: Sequence[str]) -> None:
    """RFC 4180 CSV with a header row."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), quoting=csv.QUOTE_MINIMAL)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in columns})


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _finite(obj):
    # JSON has no infinities; encode them as strings
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def write_jsonl(path_or_file, reports: Iterable) -> None:
    """One JSON object per line; reports may be dicts or have ``to_dict``."""
    records = [r.to_dict() if hasattr(r, "to_dict") else r for r in reports]
    text = "".join(json.dumps(_finite(json.loads(json.dumps(r, default=_default))), allow_nan=False) + "\n"
                   for r in records)
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "a") as fh:
            fh.write(text)


def read_jsonl(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
