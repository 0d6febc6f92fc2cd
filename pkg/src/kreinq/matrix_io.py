"""Plain-text complex matrices: a "rows cols" header, then row-major "re im" pairs.

Writers emit one matrix row per line with 17 significant digits, which
round-trips binary64 exactly. Readers accept any whitespace layout.
"""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np


def format_matrix(m: np.ndarray) -> str:
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    out = io.StringIO()
    out.write(f"{m.shape[0]} {m.shape[1]}\n")
    for row in m:
        out.write(" ".join(f"{x.real:.17g} {x.imag:.17g}" for x in row))
        out.write("\n")
    return out.getvalue()


def parse_matrix(text: str) -> np.ndarray:
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError("matrix text needs a 'rows cols' header")
    rows, cols = int(tokens[0]), int(tokens[1])
    if rows < 1 or cols < 1:
        raise ValueError(f"bad matrix shape {rows}x{cols}")
    values = tokens[2:]
    if len(values) != 2 * rows * cols:
        raise ValueError(f"expected {2 * rows * cols} numbers for a {rows}x{cols} matrix, got {len(values)}")
    pairs = np.array([float(v) for v in values]).reshape(rows, cols, 2)
    return pairs[..., 0] + 1j * pairs[..., 1]


def write_matrix(path: str | Path, m: np.ndarray) -> None:
    Path(path).write_text(format_matrix(m))


def read_matrix(path: str | Path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())
