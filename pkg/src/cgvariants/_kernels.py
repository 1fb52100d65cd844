# Compiled loops with a fixed left-to-right accumulation order.  No fastmath:
# LLVM must not reassociate or contract these sums.
import numba
import numpy as np


@numba.njit(cache=True)
def dot(x, y):
    acc = 0.0
    for i in range(x.shape[0]):
        acc += x[i] * y[i]
    return acc


@numba.njit(cache=True)
def csr_matvec(row_ptr, col_idx, values, x):
    n = row_ptr.shape[0] - 1
    y = np.empty(n)
    for i in range(n):
        acc = 0.0
        for jj in range(row_ptr[i], row_ptr[i + 1]):
            acc += values[jj] * x[col_idx[jj]]
        y[i] = acc
    return y


@numba.njit(cache=True)
def csr_matvec2(row_ptr, col_idx, values, x1, x2):
    n = row_ptr.shape[0] - 1
    y1 = np.empty(n)
    y2 = np.empty(n)
    for i in range(n):
        acc1 = 0.0
        acc2 = 0.0
        for jj in range(row_ptr[i], row_ptr[i + 1]):
            v = values[jj]
            j = col_idx[jj]
            acc1 += v * x1[j]
            acc2 += v * x2[j]
        y1[i] = acc1
        y2[i] = acc2
    return y1, y2
