import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgvariants.linalg import SparseMatrix
from cgvariants.mmio import (
    BoundsError,
    DataError,
    FieldError,
    HeaderError,
    NonSquareError,
    PatternError,
    SymmetryError,
    parse_matrix_market,
    read_matrix_market,
    serialize_matrix_market,
)

HEAD = "%%MatrixMarket matrix coordinate real symmetric\n"


def test_identity_2x2():
    A = parse_matrix_market(HEAD + "2 2 2\n1 1 1.0\n2 2 1.0\n")
    assert np.array_equal(A.to_dense(), np.eye(2))


def test_symmetric_storage_is_expanded():
    text = HEAD + "% a comment\n\n3 3 4\n1 1 4\n2 1 -1\n2 2 4\n3 3 2.5e0\n"
    A = parse_matrix_market(text)
    assert A.nnz == 5
    assert A.to_dense()[0, 1] == A.to_dense()[1, 0] == -1.0
    assert A.is_symmetric()


def test_general_symmetric_matrix_accepted_and_nonsymmetric_rejected():
    head = "%%MatrixMarket matrix coordinate real general\n"
    A = parse_matrix_market(head + "2 2 3\n1 1 2\n1 2 1\n2 1 1\n")
    assert A.is_symmetric()
    with pytest.raises(SymmetryError):
        parse_matrix_market(head + "2 2 2\n1 1 2\n1 2 1\n")
    B = parse_matrix_market(head + "2 2 2\n1 1 2\n1 2 1\n", require_symmetric=False)
    assert not B.is_symmetric()


def test_integer_field_and_bytes_input():
    A = parse_matrix_market(b"%%MatrixMarket matrix coordinate integer symmetric\n1 1 1\n1 1 7\n")
    assert A.values[0] == 7.0


def test_array_format():
    general = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n2\n5\n"
    assert np.array_equal(parse_matrix_market(general).to_dense(), [[1.0, 2.0], [2.0, 5.0]])
    sym = "%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n5\n"
    assert np.array_equal(parse_matrix_market(sym).to_dense(), [[1.0, 2.0], [2.0, 5.0]])


@pytest.mark.parametrize(
    "text, error",
    [
        ("", HeaderError),
        ("%%MatrixMarket matrix coordinate real\n1 1 1\n1 1 1\n", HeaderError),
        ("%MatrixMarket matrix coordinate real general\n", HeaderError),
        ("%%MatrixMarket matrix coordinate pattern symmetric\n1 1 1\n1 1\n", PatternError),
        ("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n", FieldError),
        ("%%MatrixMarket matrix coordinate real hermitian\n1 1 1\n1 1 1\n", SymmetryError),
        (HEAD + "2 3 1\n1 1 1\n", NonSquareError),
        (HEAD + "2 2 1\n3 1 1\n", BoundsError),
        (HEAD + "2 2 1\n0 1 1\n", BoundsError),
        (HEAD + "2 2 2\n1 1 1\n", DataError),
        (HEAD + "2 2 1\n1 1 1\n2 2 1\n", DataError),
        (HEAD + "2 2 1\n1 1 x\n", DataError),
        (HEAD + "2 2 1\n1 2 1\n", DataError),
        (HEAD, DataError),
    ],
)
def test_malformed_inputs(text, error):
    with pytest.raises(error):
        parse_matrix_market(text)


def test_truncated_file_is_a_data_error():
    full = HEAD + "3 3 3\n1 1 1\n2 2 1\n3 3 1\n"
    with pytest.raises(DataError):
        parse_matrix_market(full[: full.rindex("3 3 1")])


@st.composite
def symmetric_sparse(draw):
    n = draw(st.integers(1, 12))
    vals = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False).filter(lambda v: v != 0.0)
    dense = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            if draw(st.booleans()):
                dense[i, j] = dense[j, i] = draw(vals)
    return SparseMatrix.from_dense(dense, drop_zeros=True)


@settings(max_examples=60, deadline=None)
@given(symmetric_sparse())
def test_round_trip_is_exact(A):
    for symmetric in (True, False):
        B = parse_matrix_market(serialize_matrix_market(A, symmetric=symmetric))
        assert B.structurally_equal(A)


def test_read_from_file(tmp_path):
    path = tmp_path / "m.mtx"
    path.write_text(serialize_matrix_market(SparseMatrix.from_dense(np.diag([1.0, 2.0])), comment="test"))
    assert read_matrix_market(path).n == 2
