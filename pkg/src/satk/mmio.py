"""Matrix ingestion: Matrix Market files and the tool's JSON schema.

The JSON schema is {"dim": m, "entries": [[re, im], ...]} with m*m entries in
row-major order.  Matrix Market support covers array and coordinate layouts
with real, integer, or complex general matrices.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import linalg
from .errors import InvalidInput, ParseError


def _parse_mm_lines(lines) -> np.ndarray:
    header = lines[0][1].split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket":
        raise ParseError("not a Matrix Market header", line=lines[0][0])
    _, obj, layout, field, symmetry = (tok.lower() for tok in header)
    if obj != "matrix":
        raise ParseError(f"unsupported object {obj!r}", line=lines[0][0])
    if layout not in ("array", "coordinate"):
        raise ParseError(f"unsupported layout {layout!r}", line=lines[0][0])
    if field not in ("real", "integer", "complex"):
        raise ParseError(f"unsupported field {field!r}", line=lines[0][0])
    if symmetry != "general":
        raise ParseError(f"unsupported symmetry {symmetry!r}", line=lines[0][0])

    body = [(no, text) for no, text in lines[1:] if not text.lstrip().startswith("%")]
    body = [(no, text) for no, text in body if text.strip()]
    if not body:
        raise ParseError("missing size line", line=lines[-1][0])

    size_no, size_text = body[0]
    sizes = size_text.split()
    expected_sizes = 3 if layout == "coordinate" else 2
    if len(sizes) != expected_sizes:
        raise ParseError("malformed size line", line=size_no)
    try:
        sizes = [int(tok) for tok in sizes]
    except ValueError:
        raise ParseError("malformed size line", line=size_no)
    rows, cols = sizes[0], sizes[1]
    if rows < 1 or cols < 1:
        raise ParseError("matrix dimensions must be positive", line=size_no)

    def value_of(toks, no):
        try:
            if field == "complex":
                return complex(float(toks[0]), float(toks[1]))
            return complex(float(toks[0]))
        except (ValueError, IndexError):
            raise ParseError("malformed numeric entry", line=no)

    value_width = 2 if field == "complex" else 1
    out = np.zeros((rows, cols), dtype=np.complex128)
    data = body[1:]

    if layout == "array":
        # column-major scan, one entry per line
        if len(data) != rows * cols:
            raise ParseError(
                f"expected {rows * cols} entries, found {len(data)}",
                line=data[-1][0] if data else size_no,
            )
        for idx, (no, text) in enumerate(data):
            toks = text.split()
            if len(toks) != value_width:
                raise ParseError("malformed numeric entry", line=no)
            out[idx % rows, idx // rows] = value_of(toks, no)
    else:
        nnz = sizes[2]
        if len(data) != nnz:
            raise ParseError(
                f"expected {nnz} entries, found {len(data)}",
                line=data[-1][0] if data else size_no,
            )
        for no, text in data:
            toks = text.split()
            if len(toks) != 2 + value_width:
                raise ParseError("malformed coordinate entry", line=no)
            try:
                i, j = int(toks[0]), int(toks[1])
            except ValueError:
                raise ParseError("malformed coordinate entry", line=no)
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise ParseError("coordinate out of range", line=no)
            out[i - 1, j - 1] = value_of(toks[2:], no)
    return out


def _parse_json_obj(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "dim" not in obj or "entries" not in obj:
        raise ParseError("JSON matrix needs 'dim' and 'entries' fields")
    dim = obj["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ParseError("'dim' must be a positive integer")
    entries = obj["entries"]
    if not isinstance(entries, list) or len(entries) != dim * dim:
        raise ParseError(f"'entries' must hold {dim * dim} [re, im] pairs")
    flat = np.empty(dim * dim, dtype=np.complex128)
    for idx, pair in enumerate(entries):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(v, (int, float)) for v in pair)
        ):
            raise ParseError(f"entry {idx} is not a [re, im] pair")
        flat[idx] = complex(pair[0], pair[1])
    return flat.reshape(dim, dim)


def parse_matrix(source) -> np.ndarray:
    """Load and validate a square complex matrix from a file path or text.

    Matrix Market input is recognized by its %%MatrixMarket banner; anything
    else must be the JSON schema.
    """
    text = str(source)
    try:
        is_file = isinstance(source, (str, Path)) and Path(text).exists()
    except OSError:  # e.g. inline text longer than a legal file name
        is_file = False
    if is_file:
        text = Path(text).read_text()
    stripped = text.lstrip()
    if not stripped:
        raise ParseError("empty input", line=1)
    if stripped.lower().startswith("%%matrixmarket"):
        lines = [(no, raw) for no, raw in enumerate(text.splitlines(), start=1)]
        first = next(i for i, (_, raw) in enumerate(lines) if raw.strip())
        mat = _parse_mm_lines(lines[first:])
    else:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno)
        mat = _parse_json_obj(obj)
    if mat.shape[0] != mat.shape[1]:
        raise InvalidInput(f"matrix is {mat.shape[0]}x{mat.shape[1]}, expected square")
    return linalg.as_matrix(mat)


def matrix_to_json(a) -> dict:
    """Inverse of the JSON schema: row-major [re, im] pairs."""
    a = linalg.as_matrix(a)
    entries = [[float(z.real), float(z.imag)] for z in a.reshape(-1)]
    return {"dim": int(a.shape[0]), "entries": entries}
