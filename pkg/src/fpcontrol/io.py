"""Matrix file parsing, report serialization and trace export."""
import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError


def parse_matrix_file(path):
    """
    Read a dense matrix from Matrix Market (array or coordinate) or plain text.

    Plain text: first non-comment line "rows cols", then rows·cols entries in
    row-major order, split over lines freely.  Lines starting with '#' or '%'
    are comments.  Vectors are n×1 matrices in either format.
    """
    path = Path(path)
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    if lines and lines[0].lower().startswith("%%matrixmarket"):
        return _parse_matrix_market(lines, path)
    return _parse_plain(lines, path)


def _tokens(lines, start=0, comment=("#", "%")):
    for lineno, line in enumerate(lines[start:], start + 1):
        stripped = line.strip()
        if not stripped or stripped.startswith(comment):
            continue
        for tok in stripped.split():
            yield lineno, tok


def _number(tok, lineno, path, kind=float):
    try:
        value = kind(tok)
    except ValueError:
        raise ParseError(f"cannot read {tok!r} as a number", lineno, path) from None
    if kind is float and not math.isfinite(value):
        raise ParseError(f"non-finite entry {tok!r}", lineno, path)
    return value


def _read_shape(tokens, path, count):
    try:
        items = [next(tokens) for _ in range(count)]
    except StopIteration:
        raise ParseError("missing size line", None, path) from None
    dims = [_number(tok, lineno, path, int) for lineno, tok in items]
    if any(d < 1 for d in dims[:2]):
        raise ParseError(f"matrix dimensions must be positive, got {dims[:2]}", items[0][0], path)
    return dims


def _parse_plain(lines, path):
    tokens = _tokens(lines)
    rows, cols = _read_shape(tokens, path, 2)
    values = [_number(tok, lineno, path) for lineno, tok in tokens]
    if len(values) != rows * cols:
        raise ParseError(f"expected {rows * cols} entries for a {rows}x{cols} matrix, found {len(values)}",
                         len(lines), path)
    return np.array(values, dtype=np.float64).reshape(rows, cols)


def _parse_matrix_market(lines, path):
    header = lines[0].split()
    if len(header) != 5 or header[1].lower() != "matrix":
        raise ParseError("malformed MatrixMarket banner", 1, path)
    fmt, field, symmetry = (h.lower() for h in header[2:])
    if fmt not in ("array", "coordinate"):
        raise ParseError(f"unsupported MatrixMarket format {fmt!r}", 1, path)
    if field not in ("real", "integer", "double", "pattern"):
        raise ParseError(f"unsupported MatrixMarket field {field!r}", 1, path)
    if symmetry not in ("general", "symmetric", "skew-symmetric"):
        raise ParseError(f"unsupported MatrixMarket symmetry {symmetry!r}", 1, path)
    if field == "pattern" and fmt == "array":
        raise ParseError("pattern field requires coordinate format", 1, path)

    tokens = _tokens(lines, start=1, comment=("%",))
    sign = -1.0 if symmetry == "skew-symmetric" else 1.0
    if fmt == "array":
        rows, cols = _read_shape(tokens, path, 2)
        A = np.zeros((rows, cols))
        if symmetry == "general":
            slots = [(i, j) for j in range(cols) for i in range(rows)]
        else:
            if rows != cols:
                raise ParseError("symmetric storage needs a square matrix", 2, path)
            first = 0 if symmetry == "symmetric" else 1
            slots = [(i, j) for j in range(cols) for i in range(j + first, rows)]
        values = [(lineno, _number(tok, lineno, path)) for lineno, tok in tokens]
        if len(values) != len(slots):
            raise ParseError(f"expected {len(slots)} array entries, found {len(values)}", len(lines), path)
        for (i, j), (_, v) in zip(slots, values):
            A[i, j] = v
            if symmetry != "general" and i != j:
                A[j, i] = sign * v
        return A

    rows, cols, nnz = _read_shape(tokens, path, 3)
    A = np.zeros((rows, cols))
    per_entry = 2 if field == "pattern" else 3
    items = list(tokens)
    if len(items) != nnz * per_entry:
        raise ParseError(f"expected {nnz} coordinate entries", len(lines), path)
    for e in range(nnz):
        chunk = items[e * per_entry:(e + 1) * per_entry]
        lineno = chunk[0][0]
        i = _number(chunk[0][1], lineno, path, int) - 1
        j = _number(chunk[1][1], lineno, path, int) - 1
        if not (0 <= i < rows and 0 <= j < cols):
            raise ParseError(f"index ({i + 1}, {j + 1}) outside {rows}x{cols}", lineno, path)
        v = 1.0 if field == "pattern" else _number(chunk[2][1], lineno, path)
        # duplicate coordinates accumulate
        A[i, j] += v
        if symmetry != "general" and i != j:
            A[j, i] += sign * v
    return A


def format_float(x):
    return format(float(x), ".17g")


def write_matrix_file(path, M):
    """Plain-text format accepted by parse_matrix_file, 17 significant digits."""
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(format_float(v) for v in row) + "\n")


def write_vector_file(path, v):
    write_matrix_file(path, np.asarray(v, dtype=np.float64).reshape(-1, 1))


def _json_float(x):
    x = float(x)
    # repr of a float is the shortest string that reads back to the same binary64
    return x if math.isfinite(x) else None


def report_to_dict(report):
    return {
        "mode": report.mode.replace("_", "-"),
        "n": report.n,
        "w": report.w,
        "N": report.N,
        "M": report.M,
        "gain": [_json_float(v) for v in report.gain],
        "x_tilde": [_json_float(v) for v in report.x_tilde],
        "x": [_json_float(v) for v in report.x],
        "residual": [_json_float(v) for v in report.residual],
        "residual_norm": _json_float(report.residual_norm),
        "steps_used": report.steps_used,
        "spectral_bound": report.spectral_bound,
        "diagnostics": {key: _json_float(val) for key, val in sorted(report.diagnostics.items())},
        "warnings": list(report.warnings),
    }


def dump_report(report, fh):
    json.dump(report_to_dict(report), fh, indent=2, allow_nan=False)
    fh.write("\n")


def write_trace_csv(path, trace):
    """Columns: step, x1..xn and err_norm when the trace carries error norms."""
    n = trace.iterates[0].shape[0]
    header = ["step"] + [f"x{i + 1}" for i in range(n)]
    with_err = trace.error_norms is not None
    if with_err:
        header.append("err_norm")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for m, x in enumerate(trace.iterates):
            row = [m] + [format_float(v) for v in x]
            if with_err:
                row.append(format_float(trace.error_norms[m]))
            writer.writerow(row)
