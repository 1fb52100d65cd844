import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cgvariants.linalg import (
    EPS,
    CountingOperator,
    DimensionError,
    ModelProblemSpec,
    Preconditioner,
    RoundoffWarning,
    SparseMatrix,
    a_norm,
    axpy,
    block_spmv,
    build_model_problem,
    dot,
    make_preconditioner,
    model_eigenvalues,
    norm2,
    spmv,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def loop_dot(x, y):
    s = 0.0
    for a, b in zip(x.tolist(), y.tolist()):
        s += a * b
    return s


def loop_spmv(dense, x):
    """Row-wise left-to-right accumulation over the stored (here: all) entries."""
    n = dense.shape[0]
    y = np.zeros(n)
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += dense[i, j] * x[j]
        y[i] = s
    return y


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 200).flatmap(lambda n: st.tuples(arrays(np.float64, n, elements=finite),
                                                       arrays(np.float64, n, elements=finite))))
def test_dot_matches_sequential_loop_bitwise(xy):
    x, y = xy
    assert dot(x, y) == loop_dot(x, y)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 60).flatmap(lambda n: st.tuples(arrays(np.float64, n, elements=finite),
                                                      arrays(np.float64, n, elements=finite))))
def test_dot_error_bound_against_exact_rational(xy):
    x, y = xy
    exact = sum(Fraction(a) * Fraction(b) for a, b in zip(x.tolist(), y.tolist()))
    bound = len(x) * EPS * float(np.sum(np.abs(x * y)))
    assert abs(dot(x, y) - float(exact)) <= bound + 1e-300


def test_dot_dimension_mismatch():
    with pytest.raises(DimensionError):
        dot(np.ones(3), np.ones(4))


def test_dot_empty_is_zero():
    assert dot(np.zeros(0), np.zeros(0)) == 0.0


def test_spmv_matches_dense_triple_loop_bitwise():
    rng = np.random.default_rng(1)
    dense = rng.standard_normal((30, 30))
    A = SparseMatrix.from_dense(dense)
    x = rng.standard_normal(30)
    assert np.array_equal(spmv(A, x), loop_spmv(dense, x))


def test_block_spmv_halves_equal_single_products():
    rng = np.random.default_rng(2)
    dense = rng.standard_normal((25, 25))
    dense[np.abs(dense) < 0.8] = 0.0
    A = SparseMatrix.from_dense(dense, drop_zeros=True)
    x1, x2 = rng.standard_normal(25), rng.standard_normal(25)
    y1, y2 = block_spmv(A, x1, x2)
    assert np.array_equal(y1, spmv(A, x1))
    assert np.array_equal(y2, spmv(A, x2))


def test_spmv_dimension_mismatch():
    A = SparseMatrix.from_dense(np.eye(3))
    with pytest.raises(DimensionError):
        spmv(A, np.ones(4))
    with pytest.raises(DimensionError):
        block_spmv(A, np.ones(3), np.ones(2))


def test_axpy_and_norm():
    x = np.array([1.0, 2.0])
    y = np.array([3.0, 4.0])
    assert np.array_equal(axpy(2.0, x, y), np.array([5.0, 8.0]))
    assert norm2(np.array([3.0, 4.0])) == 5.0
    with pytest.raises(DimensionError):
        axpy(1.0, x, np.ones(3))


def test_from_coo_sums_duplicates_and_drops_zeros():
    A = SparseMatrix.from_coo(3, [0, 0, 1, 2, 2], [0, 0, 1, 2, 1], [1.0, 2.0, 0.0, 5.0, 1.0])
    assert A.nnz == 3
    assert np.array_equal(A.to_dense(), np.array([[3.0, 0, 0], [0, 0, 0], [0, 1.0, 5.0]]))


def test_sparse_matrix_rejects_bad_structure():
    with pytest.raises(ValueError):
        SparseMatrix(2, [0, 2, 1], [0, 1], [1.0, 1.0])  # row_ptr does not end at nnz
    with pytest.raises(ValueError):
        SparseMatrix(2, [0, 2, 2], [1, 0], [1.0, 1.0])  # unsorted columns
    with pytest.raises(ValueError):
        SparseMatrix(2, [0, 1, 2], [0, 2], [1.0, 1.0])  # column out of range


def test_symmetry_and_transpose():
    dense = np.array([[2.0, 1.0], [1.0, 3.0]])
    assert SparseMatrix.from_dense(dense).is_symmetric()
    dense[0, 1] = np.nextafter(1.0, 2.0)
    A = SparseMatrix.from_dense(dense)
    assert not A.is_symmetric()
    assert np.array_equal(A.transpose().to_dense(), dense.T)


def test_diagonal_and_frobenius():
    A = SparseMatrix.from_dense(np.array([[4.0, 0.0], [3.0, 0.0]]), drop_zeros=True)
    assert np.array_equal(A.diagonal(), [4.0, 0.0])
    assert A.frobenius_norm() == 5.0


def test_a_norm_positive_and_clamped():
    A = SparseMatrix.from_dense(np.diag([4.0, 9.0]))
    assert a_norm(A, np.array([1.0, 1.0])) == np.sqrt(13.0)
    # A tiny negative quadratic form from a nearly singular indefinite part clamps to zero.
    B = SparseMatrix.from_dense(np.array([[1.0, 0.0], [0.0, -1e-30]]))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert a_norm(B, np.array([0.0, 1.0])) == 0.0
    assert any(issubclass(w.category, RoundoffWarning) for w in caught)
    C = SparseMatrix.from_dense(np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        a_norm(C, np.array([0.0, 1.0]))


def test_preconditioners():
    A = SparseMatrix.from_dense(np.diag([2.0, 4.0]))
    ident = Preconditioner.identity()
    v = np.array([1.0, 1.0])
    assert ident.apply(v) is v
    jac = make_preconditioner("jacobi", A)
    assert np.array_equal(jac.apply(v), [0.5, 0.25])
    with pytest.raises(ValueError):
        Preconditioner.jacobi(SparseMatrix.from_dense(np.diag([1.0, 0.0])))
    with pytest.raises(ValueError):
        make_preconditioner("ilu", A)
    with pytest.raises(DimensionError):
        jac.apply(np.ones(3))


def test_counting_operator():
    A = CountingOperator(SparseMatrix.from_dense(np.eye(3)))
    A.matvec(np.ones(3))
    A.matvec2(np.ones(3), np.ones(3))
    assert (A.passes, A.products) == (2, 3)
    assert A.nnz == 9


def test_model_eigenvalues_endpoints_and_clustering():
    lam = model_eigenvalues(48, 0.8, 1e3)
    assert lam[0] == 1e-3 and lam[-1] == 1.0
    assert np.all(np.diff(lam) > 0)
    # Exponential clustering: gaps grow towards the top of the spectrum.
    assert np.diff(lam)[-1] > 100 * np.diff(lam)[0]


def test_model_problem_spectrum_symmetry_and_determinism():
    spec = ModelProblemSpec(n=48, rho=0.8, kappa=1e3, seed=3)
    A, lam = build_model_problem(spec)
    assert A.is_symmetric()
    assert np.allclose(np.linalg.eigvalsh(A.to_dense()), lam, rtol=1e-10, atol=1e-14)
    B, _ = build_model_problem(spec)
    assert A.structurally_equal(B)
    C, _ = build_model_problem(ModelProblemSpec(n=48, rho=0.8, kappa=1e3, seed=4))
    assert not A.structurally_equal(C)


@pytest.mark.parametrize("kwargs", [dict(n=1), dict(kappa=1.0), dict(rho=0.0), dict(rho=1.5)])
def test_model_problem_rejects_bad_parameters(kwargs):
    with pytest.raises(ValueError):
        ModelProblemSpec(**kwargs)
