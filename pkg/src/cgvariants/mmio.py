"""Matrix Market reader and writer for real square matrices."""

from __future__ import annotations

import numpy as np

from .linalg import SparseMatrix


class MatrixMarketError(ValueError):
    """Base class for Matrix Market parse failures."""


class HeaderError(MatrixMarketError):
    pass


class NonSquareError(MatrixMarketError):
    pass


class FieldError(MatrixMarketError):
    """The value field is not real (complex matrices are unsupported)."""


class PatternError(MatrixMarketError):
    """Pattern-only files carry no values to solve with."""


class BoundsError(MatrixMarketError):
    """An entry index lies outside the declared dimensions."""


class SymmetryError(MatrixMarketError):
    """Unsupported symmetry qualifier, or a general matrix that is not symmetric."""


class DataError(MatrixMarketError):
    """Entry lines are missing, extra, or unreadable."""


_FORMATS = ("coordinate", "array")
_SYMMETRIES = ("general", "symmetric")


def _header(line):
    if not line.startswith("%%MatrixMarket"):
        raise HeaderError("first line must start with %%MatrixMarket")
    parts = line.split()
    if len(parts) != 5 or parts[1].lower() != "matrix":
        raise HeaderError(f"malformed header {line!r}")
    fmt, fld, sym = (p.lower() for p in parts[2:])
    if fmt not in _FORMATS:
        raise HeaderError(f"unknown format {fmt!r}")
    if fld == "pattern":
        raise PatternError("pattern matrices have no numerical values")
    if fld not in ("real", "integer", "double"):
        raise FieldError(f"field {fld!r} is not real")
    if sym not in _SYMMETRIES:
        raise SymmetryError(f"symmetry {sym!r} is not supported")
    return fmt, sym


def parse_matrix_market(text, require_symmetric=True):
    """Parse Matrix Market ``text`` (bytes or str) into a :class:`SparseMatrix`.

    Symmetric storage is expanded to both triangles, duplicates are summed and
    explicit zeros dropped.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("ascii")
        except UnicodeDecodeError as exc:
            raise DataError("file is not ASCII text") from exc
    lines = text.splitlines()
    if not lines:
        raise HeaderError("empty input")
    fmt, sym = _header(lines[0].strip())

    body = (ln.strip() for ln in lines[1:])
    body = [ln for ln in body if ln and not ln.startswith("%")]
    if not body:
        raise DataError("missing size line")
    try:
        size = [int(tok) for tok in body[0].split()]
    except ValueError as exc:
        raise DataError(f"bad size line {body[0]!r}") from exc
    entries = body[1:]

    if fmt == "coordinate":
        if len(size) != 3:
            raise DataError(f"coordinate size line needs 3 integers, got {body[0]!r}")
        nrows, ncols, nnz = size
        if nrows != ncols:
            raise NonSquareError(f"matrix is {nrows}x{ncols}")
        if len(entries) != nnz:
            raise DataError(f"expected {nnz} entries, found {len(entries)}")
        try:
            data = np.array([ln.split()[:3] for ln in entries], dtype=np.float64).reshape(-1, 3)
        except ValueError as exc:
            raise DataError("unreadable entry line") from exc
        rows = data[:, 0].astype(np.int64) - 1
        cols = data[:, 1].astype(np.int64) - 1
        if np.any(data[:, :2] != np.floor(data[:, :2])):
            raise DataError("non-integer index")
        vals = data[:, 2]
        n = nrows
        if np.any((rows < 0) | (rows >= n) | (cols < 0) | (cols >= n)):
            raise BoundsError("entry index outside declared dimensions")
    else:
        if len(size) != 2:
            raise DataError(f"array size line needs 2 integers, got {body[0]!r}")
        nrows, ncols = size
        if nrows != ncols:
            raise NonSquareError(f"matrix is {nrows}x{ncols}")
        n = nrows
        try:
            vals = np.array([float(ln.split()[0]) for ln in entries])
        except ValueError as exc:
            raise DataError("unreadable entry line") from exc
        # Column-major; symmetric arrays list the lower triangle only.
        if sym == "symmetric":
            cols, rows = np.nonzero(np.tril(np.ones((n, n), dtype=bool)).T)
        else:
            cols, rows = np.divmod(np.arange(n * n), n)
        if vals.size != rows.size:
            raise DataError(f"expected {rows.size} values, found {vals.size}")

    if sym == "symmetric":
        if np.any(cols > rows):
            raise DataError("symmetric storage must list the lower triangle only")
        off = rows != cols
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, vals[off]]),
        )
    A = SparseMatrix.from_coo(n, rows, cols, vals)
    if require_symmetric and sym == "general" and not A.is_symmetric():
        raise SymmetryError("general matrix is not symmetric")
    return A


def serialize_matrix_market(A, symmetric=None, comment=None):
    """Write ``A`` in coordinate format with round-trip exact values."""
    if symmetric is None:
        symmetric = A.is_symmetric()
    rows = np.repeat(np.arange(A.n), np.diff(A.row_ptr))
    cols = A.col_idx
    vals = A.values
    if symmetric:
        keep = cols <= rows
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    out = [f"%%MatrixMarket matrix coordinate real {'symmetric' if symmetric else 'general'}"]
    if comment:
        out.extend(f"% {ln}" for ln in comment.splitlines())
    out.append(f"{A.n} {A.n} {vals.size}")
    out.extend(f"{i + 1} {j + 1} {v!r}" for i, j, v in zip(rows.tolist(), cols.tolist(), vals.tolist()))
    return "\n".join(out) + "\n"


def read_matrix_market(path, require_symmetric=True):
    with open(path, "rb") as fh:
        return parse_matrix_market(fh.read(), require_symmetric=require_symmetric)
