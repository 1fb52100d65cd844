import sys

import numpy as np
import pytest

from cgvariants.fetch import FetchError, cached_path, default_cache_dir, fetch_matrix
from cgvariants.linalg import SparseMatrix
from cgvariants.mmio import read_matrix_market


def random_spd(n, cond, seed):
    """Dense SPD matrix with Haar eigenvectors and a uniform spectrum on [1/cond, 1].

    Log-uniform spectra are avoided on purpose: their well-separated top
    eigenvalues make even plain CG drift from exact arithmetic within 20
    iterations, which would hide the equivalence being tested.
    """
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    lam = np.sort(rng.uniform(1.0 / cond, 1.0, n))
    lam[0], lam[-1] = 1.0 / cond, 1.0
    dense = (q * lam) @ q.T
    dense = (dense + dense.T) / 2.0
    return SparseMatrix.from_dense(dense)


def table3_matrix(name):
    """Load a Table 3 matrix from the cache, fetching it if possible.

    Fails (rather than skips) when the matrix cannot be obtained, so that
    results depending on it are reported as not reproduced.
    """
    path = cached_path(name)
    if not path.exists():
        try:
            path = fetch_matrix(name, default_cache_dir())
        except FetchError as exc:
            pytest.fail(f"matrix {name} unavailable: not cached in {default_cache_dir()} and fetch failed "
                        f"({type(exc).__name__})", pytrace=False)
    return path, read_matrix_market(path)


@pytest.fixture
def spd_factory():
    return random_spd


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        terminalreporter.write_line(verdicts[number])
