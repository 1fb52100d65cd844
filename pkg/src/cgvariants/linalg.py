"""Deterministic linear algebra substrate shared by every CG variant.

Inner products and matrix-vector products accumulate strictly left to right
(see ``_kernels``) so that runs are reproducible bit for bit.  Vector updates
use plain numpy elementwise arithmetic, which is already order independent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

EPS = np.finfo(np.float64).eps


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class RoundoffWarning(UserWarning):
    """A quantity that is non-negative in exact arithmetic came out negative."""


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Square matrix in compressed sparse row form.

    Column indices are strictly increasing within each row.  The constructor
    checks the structural invariants; numerical symmetry is checked with
    :meth:`is_symmetric` because not every caller needs it.
    """

    n: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray
    _dense_cache: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        row_ptr = np.ascontiguousarray(self.row_ptr, dtype=np.int64)
        col_idx = np.ascontiguousarray(self.col_idx, dtype=np.int64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        object.__setattr__(self, "row_ptr", row_ptr)
        object.__setattr__(self, "col_idx", col_idx)
        object.__setattr__(self, "values", values)
        n = self.n
        if n < 1:
            raise ValueError("matrix dimension must be positive")
        if row_ptr.shape != (n + 1,):
            raise ValueError(f"row_ptr must have length n+1={n + 1}")
        if row_ptr[0] != 0 or row_ptr[-1] != col_idx.shape[0]:
            raise ValueError("row_ptr must start at 0 and end at nnz")
        if col_idx.shape != values.shape:
            raise ValueError("col_idx and values differ in length")
        if np.any(np.diff(row_ptr) < 0):
            raise ValueError("row_ptr must be non-decreasing")
        if col_idx.size:
            if col_idx.min() < 0 or col_idx.max() >= n:
                raise ValueError("column index out of range")
            inner = np.diff(col_idx)
            # Differences across a row boundary are allowed to be anything.
            boundary = np.zeros(inner.shape, dtype=bool)
            starts = row_ptr[1:-1]
            starts = starts[(starts > 0) & (starts < col_idx.size)]
            boundary[starts - 1] = True
            if np.any((inner <= 0) & ~boundary):
                raise ValueError("column indices must be strictly increasing within a row")

    @property
    def nnz(self):
        return int(self.values.shape[0])

    @property
    def shape(self):
        return (self.n, self.n)

    @classmethod
    def from_dense(cls, dense, drop_zeros=False):
        dense = np.asarray(dense, dtype=np.float64)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise DimensionError("dense matrix must be square")
        n = dense.shape[0]
        mask = dense != 0.0 if drop_zeros else np.ones(dense.shape, dtype=bool)
        rows, cols = np.nonzero(mask)
        row_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=row_ptr[1:])
        return cls(n, row_ptr, cols, dense[rows, cols])

    @classmethod
    def from_coo(cls, n, rows, cols, vals):
        """Build from triplets; duplicates are summed and exact zeros dropped."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if rows.size:
            new = np.ones(rows.size, dtype=bool)
            new[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
            group = np.cumsum(new) - 1
            summed = vals[new].copy()
            # add.at is unbuffered and applied in index order: duplicates
            # accumulate sequentially in file order.
            np.add.at(summed, group[~new], vals[~new])
            rows, cols, vals = rows[new], cols[new], summed
            keep = vals != 0.0
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
        row_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=row_ptr[1:])
        return cls(n, row_ptr, cols, vals)

    def to_dense(self):
        if not self._dense_cache:
            dense = np.zeros((self.n, self.n))
            rows = np.repeat(np.arange(self.n), np.diff(self.row_ptr))
            dense[rows, self.col_idx] = self.values
            dense.setflags(write=False)
            self._dense_cache.append(dense)
        return self._dense_cache[0]

    def diagonal(self):
        diag = np.zeros(self.n)
        rows = np.repeat(np.arange(self.n), np.diff(self.row_ptr))
        on = rows == self.col_idx
        diag[rows[on]] = self.values[on]
        return diag

    def frobenius_norm(self):
        return float(np.sqrt(np.sum(self.values * self.values)))

    def transpose(self):
        rows = np.repeat(np.arange(self.n), np.diff(self.row_ptr))
        return SparseMatrix.from_coo(self.n, self.col_idx, rows, self.values)

    def is_symmetric(self):
        """True when every stored (i, j, v) has a stored (j, i, v) bit for bit."""
        t = self.transpose()
        return (
            np.array_equal(t.row_ptr, self.row_ptr)
            and np.array_equal(t.col_idx, self.col_idx)
            and np.array_equal(t.values.view(np.int64), self.values.view(np.int64))
        )

    def structurally_equal(self, other):
        return (
            self.n == other.n
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.values.view(np.int64), other.values.view(np.int64))
        )

    # Operator protocol used by the solvers.
    def matvec(self, x):
        return spmv(self, x)

    def matvec2(self, x1, x2):
        return block_spmv(self, x1, x2)


class CountingOperator:
    """Wraps a matrix and counts passes over it."""

    def __init__(self, A):
        self.A = A
        self.n = A.n
        self.passes = 0
        self.products = 0

    def matvec(self, x):
        self.passes += 1
        self.products += 1
        return self.A.matvec(x)

    def matvec2(self, x1, x2):
        self.passes += 1
        self.products += 2
        return self.A.matvec2(x1, x2)

    def __getattr__(self, name):
        return getattr(self.A, name)


@dataclass(frozen=True, eq=False)
class Preconditioner:
    """Diagonal preconditioner M^{-1}; ``inv_diag is None`` means identity."""

    inv_diag: np.ndarray | None = None

    @property
    def kind(self):
        return "identity" if self.inv_diag is None else "jacobi"

    @property
    def is_identity(self):
        return self.inv_diag is None

    def apply(self, x):
        if self.inv_diag is None:
            return x
        if x.shape != self.inv_diag.shape:
            raise DimensionError(f"preconditioner of size {self.inv_diag.shape[0]} applied to {x.shape}")
        return self.inv_diag * x

    __call__ = apply

    @classmethod
    def identity(cls):
        return cls(None)

    @classmethod
    def jacobi(cls, A):
        diag = A.diagonal()
        if np.any(diag <= 0.0):
            bad = int(np.flatnonzero(diag <= 0.0)[0])
            raise ValueError(f"Jacobi preconditioner needs a positive diagonal; A[{bad},{bad}] = {diag[bad]}")
        inv = 1.0 / diag
        inv.setflags(write=False)
        return cls(inv)


def make_preconditioner(kind, A):
    if kind in (None, "none", "identity"):
        return Preconditioner.identity()
    if kind == "jacobi":
        return Preconditioner.jacobi(A)
    raise ValueError(f"unknown preconditioner {kind!r}")


def _check_vec(A, x):
    if x.ndim != 1 or x.shape[0] != A.n:
        raise DimensionError(f"vector of shape {x.shape} does not match matrix of size {A.n}")


def spmv(A, x):
    """y = A x with a fixed per-row accumulation order."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    _check_vec(A, x)
    return _kernels.csr_matvec(A.row_ptr, A.col_idx, A.values, x)


def block_spmv(A, x1, x2):
    """(A x1, A x2) in a single traversal of A; each half equals ``spmv``."""
    x1 = np.ascontiguousarray(x1, dtype=np.float64)
    x2 = np.ascontiguousarray(x2, dtype=np.float64)
    _check_vec(A, x1)
    _check_vec(A, x2)
    return _kernels.csr_matvec2(A.row_ptr, A.col_idx, A.values, x1, x2)


def dot(x, y):
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError(f"cannot take inner product of shapes {x.shape} and {y.shape}")
    return float(_kernels.dot(np.ascontiguousarray(x, dtype=np.float64), np.ascontiguousarray(y, dtype=np.float64)))


def axpy(a, x, y):
    """Return y + a*x."""
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch {x.shape} vs {y.shape}")
    return y + a * x


def norm2(x):
    return float(np.sqrt(dot(x, x)))


def a_norm(A, x):
    """||x||_A.  Small negative values of <x, Ax> from roundoff clamp to 0."""
    q = dot(x, spmv(A, x))
    if q < 0.0:
        tol = A.n * EPS * A.frobenius_norm() * dot(x, x)
        if q < -tol:
            raise ValueError(f"<x, Ax> = {q:.3e} is negative beyond roundoff; A is not positive definite")
        warnings.warn(f"<x, Ax> = {q:.3e} clamped to zero", RoundoffWarning, stacklevel=2)
        return 0.0
    return float(np.sqrt(q))


@dataclass(frozen=True)
class ModelProblemSpec:
    n: int = 48
    rho: float = 0.8
    kappa: float = 1e3
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("model problem needs n >= 2")
        if not self.kappa > 1.0:
            raise ValueError("model problem needs kappa > 1")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("model problem needs 0 < rho <= 1")

    @property
    def name(self):
        return f"model_{self.n}_{self.rho:g}_{self.kappa:g}_s{self.seed}"


def model_eigenvalues(n, rho, kappa):
    """Exponentially clustered spectrum on [1/kappa, 1]."""
    lam1, lamn = 1.0 / kappa, 1.0
    i = np.arange(1, n + 1)
    lam = lam1 + ((i - 1) / (n - 1)) * (lamn - lam1) * rho ** (n - i)
    lam[0], lam[-1] = lam1, lamn
    return lam


def haar_orthogonal(n, rng):
    """Orthogonal matrix distributed uniformly (QR of a Gaussian, sign-fixed)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def build_model_problem(spec):
    """Dense SPD matrix Q diag(lambda) Q^T with the clustered spectrum.

    Returns the matrix (stored densely in CSR form) and its eigenvalues.
    """
    lam = model_eigenvalues(spec.n, spec.rho, spec.kappa)
    q = haar_orthogonal(spec.n, np.random.default_rng(spec.seed))
    dense = (q * lam) @ q.T
    # (a + b)/2 is bitwise symmetric in a and b.
    dense = (dense + dense.T) / 2.0
    return SparseMatrix.from_dense(dense), lam
