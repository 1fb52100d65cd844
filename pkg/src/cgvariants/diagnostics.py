"""Finite-precision diagnostics measured directly from solver state.

Every gap is recomputed from first principles: a fresh product with ``A``,
a fresh application of the preconditioner and fresh inner products in the
fixed accumulation order.  Nothing is taken from the solver's own
recurrences except the quantity whose drift is being measured.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, fields

import numpy as np

from .linalg import a_norm, dot, norm2, spmv

CSV_COLUMNS = (
    "k",
    "rel_err_a_norm",
    "true_res_norm",
    "upd_res_norm",
    "residual_gap_norm",
    "nu_gap",
    "w_gap_norm",
    "s_gap_norm",
    "lanczos_res_norm",
    "succ_orth",
    "alpha",
    "beta",
    "nu",
    "nu_prime",
)


@dataclass(frozen=True)
class IterationRecord:
    """Diagnostics of one iterate.  Fields that do not apply are ``None``."""

    k: int
    rel_err_a_norm: float | None = None
    true_res_norm: float | None = None
    upd_res_norm: float | None = None
    residual_gap_norm: float | None = None
    nu_gap: float | None = None
    w_gap_norm: float | None = None
    s_gap_norm: float | None = None
    lanczos_res_norm: float | None = None
    succ_orth: float | None = None
    alpha: float | None = None
    beta: float | None = None
    nu: float | None = None
    nu_prime: float | None = None

    def as_row(self):
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


assert tuple(f.name for f in fields(IterationRecord)) == CSV_COLUMNS


@dataclass(frozen=True)
class Summary:
    iters_to_1e5: int | None
    min_log10_err: float


@dataclass
class ConvergenceHistory:
    variant: str
    problem: str
    preconditioner: str
    records: list = field(default_factory=list)
    status: object = None
    final_state: object = field(default=None, repr=False, compare=False)

    @property
    def summary(self):
        return summarize(self)

    def column(self, name):
        """Values of one record field as a float array (absent -> nan)."""
        return np.array([np.nan if getattr(r, name) is None else getattr(r, name) for r in self.records])


def _log10(x):
    return -math.inf if x == 0.0 else math.log10(x)


def summarize(history, threshold_log10=-5.0):
    """Table 3 statistics: first ``k`` with ``log10(err) < -5`` and the best error.

    Accepts a :class:`ConvergenceHistory` or a plain list of records.
    """
    records = history.records if hasattr(history, "records") else list(history)
    if not records:
        raise ValueError("cannot summarize an empty history")
    first, best = None, math.inf
    for rec in records:
        if rec.rel_err_a_norm is None:
            raise ValueError(f"record k={rec.k} has no relative A-norm error (probe without x_star?)")
        lg = _log10(rec.rel_err_a_norm)
        if first is None and lg < threshold_log10:
            first = rec.k
        best = min(best, lg)
    return Summary(first, best)


def _precond_sqrt(M):
    """Square root of the diagonal of M^{-1}, or None for the identity."""
    if M is None or M.is_identity:
        return None
    return np.sqrt(M.inv_diag)


def lanczos_recurrence_residual(r_km2, r_km1, r_k, alpha_km2, alpha_km1, beta_km1, A, M=None):
    """Violation of the three-term Lanczos relation by three CG residuals.

    With ``q_{j+1} = (-1)^j r_j / ||r_j||`` exact CG satisfies ::

        A q_k = (1/a_{k-1}) (|r_k|/|r_{k-1}|) q_{k+1}
              + (1/a_{k-1} + b_{k-1}/a_{k-2}) q_k
              + (1/a_{k-2}) (|r_{k-1}|/|r_{k-2}|) q_{k-1}

    and this returns the 2-norm of the difference of the two sides.  With a
    diagonal preconditioner the relation is evaluated for the symmetrically
    preconditioned operator ``D^{1/2} A D^{1/2}`` (``D = M^{-1}``) and
    residuals ``D^{1/2} r``.

    Raises
    ------
    ValueError
        If a residual in the window has zero norm or a step length is zero.
    """
    root = _precond_sqrt(M)
    if root is not None:
        r_km2, r_km1, r_k = root * r_km2, root * r_km1, root * r_k
    n2, n1, n0 = norm2(r_km2), norm2(r_km1), norm2(r_k)
    if n2 == 0.0 or n1 == 0.0 or n0 == 0.0:
        raise ValueError("zero residual in Lanczos window")
    if alpha_km1 == 0.0 or alpha_km2 == 0.0:
        raise ValueError("zero step length in Lanczos window")
    # The common sign (-1)^(k-1) is dropped; it does not change the norm.
    q_next = -r_k / n0
    q_cur = r_km1 / n1
    q_prev = -r_km2 / n2
    aq = spmv(A, q_cur if root is None else root * q_cur)
    if root is not None:
        aq = root * aq
    c_next = (1.0 / alpha_km1) * (n0 / n1)
    c_cur = 1.0 / alpha_km1 + beta_km1 / alpha_km2
    c_prev = (1.0 / alpha_km2) * (n1 / n2)
    return norm2(aq - (c_next * q_next + c_cur * q_cur + c_prev * q_prev))


class DiagnosticsProbe:
    """Callable that turns a :class:`SolverState` into an :class:`IterationRecord`.

    Parameters
    ----------
    A : SparseMatrix
        The system matrix.  Pass the bare matrix, not a counting wrapper, so
        that probe products are not charged to the solver.
    M : Preconditioner
    b : ndarray
    x_star : ndarray, optional
        Exact solution; without it ``rel_err_a_norm`` stays absent.
    cadence : int
        Probe every ``cadence``-th iteration (k = 0 is always probed).
        The residual window used by the Lanczos residual and successive
        orthogonality is still advanced every iteration.
    """

    def __init__(self, A, M, b, x_star=None, cadence=1, x0=None):
        if cadence < 1:
            raise ValueError("probe cadence must be at least 1")
        self.A, self.M, self.b = A, M, np.asarray(b, dtype=np.float64)
        self.x_star = None if x_star is None else np.asarray(x_star, dtype=np.float64)
        self.cadence = int(cadence)
        self._e0 = None
        self._window = deque(maxlen=3)  # (j, r_j, alpha_j, beta_j) for j = k-2..k
        if self.x_star is not None and x0 is not None:
            self._e0 = a_norm(A, self.x_star - np.asarray(x0, dtype=np.float64))

    def _m_inner(self, x, y):
        if self.M is None or self.M.is_identity:
            return dot(x, y)
        return dot(self.M.apply(x), y)

    def __call__(self, state, force=False):
        k = state.k
        if not self._window or self._window[-1][0] != k:
            self._window.append((k, state.r, state.alpha, state.beta))
        if k != 0 and k % self.cadence and not force:
            return None
        return self.record(state)

    def _relative_error(self, state):
        if self.x_star is None:
            return None
        if self._e0 is None:
            if state.k != 0:
                raise ValueError("the relative error needs the initial iterate (pass x0)")
            self._e0 = a_norm(self.A, self.x_star - state.x)
        ek = a_norm(self.A, self.x_star - state.x)
        return ek / self._e0 if self._e0 > 0.0 else None

    def record(self, state):
        """Build the record for ``state`` without advancing the window."""
        A, b = self.A, self.b
        variant = state.variant
        k = state.k
        running = state.status.running
        out = {"k": k, "rel_err_a_norm": self._relative_error(state)}

        true_res = b - spmv(A, state.x)
        r = state.r
        out["true_res_norm"] = norm2(true_res)
        out["upd_res_norm"] = norm2(r)
        out["residual_gap_norm"] = norm2(true_res - r)

        if variant.is_predictor and k >= 1 and state.nu_prime is not None:
            out["nu_gap"] = self._m_inner(r, r) - state.nu_prime
        kind = variant.kind.value
        if kind in ("PIPE_PR_M", "PIPE_PR", "GV") and k >= 1 and running:
            w_pred = state.w_prime if variant.is_pipelined else state.w
            out["w_gap_norm"] = norm2(spmv(A, state.rt) - w_pred)
        if kind in ("PIPE_PR_M", "PIPE_PR", "GV", "CG_CG") and state.p is not None and running:
            out["s_gap_norm"] = norm2(spmv(A, state.p) - state.s)

        window = list(self._window)
        if window and window[-1][0] == k:
            root = _precond_sqrt(self.M)
            if len(window) >= 2 and window[-2][0] == k - 1:
                r_prev = window[-2][1]
                a, c = (r, r_prev) if root is None else (root * r, root * r_prev)
                na, nc = norm2(a), norm2(c)
                if na > 0.0 and nc > 0.0:
                    out["succ_orth"] = dot(a, c) / (na * nc)
            if len(window) == 3 and window[0][0] == k - 2:
                (_, r2, a2, _), (_, r1, a1, b1), _ = window
                try:
                    out["lanczos_res_norm"] = lanczos_recurrence_residual(r2, r1, r, a2, a1, b1, A, self.M)
                except (ValueError, TypeError):
                    pass
        return IterationRecord(alpha=state.alpha, beta=state.beta, nu=state.nu, nu_prime=state.nu_prime, **out)


def probe(state, A, M, b, x_star=None, x0=None):
    """One-shot record of ``state``.

    Window-based fields (Lanczos residual, successive orthogonality) are
    absent; use :class:`DiagnosticsProbe` to follow a whole run.

    Raises
    ------
    ValueError
        If ``x_star`` is given for ``k > 0`` without the initial iterate ``x0``.
    """
    p = DiagnosticsProbe(A, M, b, x_star=x_star, x0=x0)
    return p.record(state)


__all__ = [
    "CSV_COLUMNS", "ConvergenceHistory", "DiagnosticsProbe", "IterationRecord", "Summary",
    "lanczos_recurrence_residual", "probe", "summarize",
]
