"""Seven algebraically equivalent conjugate gradient variants.

Every variant is a state machine over :class:`SolverState`: :func:`initialize`
builds the state for ``x_0`` and :func:`step` advances it by one iteration.
Steppers follow the published listings line by line so that rounding errors
land where they would in the reference algorithms:

========== =============================================================
HS         Hestenes-Stiefel, two reductions per iteration
CG_CG      Chronopoulos-Gear, one reduction, recurrence for ``s``
M          Meurant: predict ``nu`` from ``-nu + alpha^2 gamma``, recompute
PR         predict ``nu`` from ``nu - 2 alpha delta + alpha^2 gamma``, recompute
GV         Ghysels-Vanroose pipelined CG
PIPE_PR_M  pipelined M with ``w = A r~`` recomputed
PIPE_PR    pipelined PR with ``w = A r~`` recomputed
========== =============================================================

In unpreconditioned mode every tilde vector aliases its plain counterpart and
the preconditioner is never applied.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import DimensionError, Preconditioner, axpy, dot


class Kind(enum.Enum):
    HS = "HS"
    CG_CG = "CG_CG"
    M = "M"
    PR = "PR"
    GV = "GV"
    PIPE_PR_M = "PIPE_PR_M"
    PIPE_PR = "PIPE_PR"


class NuExpression(enum.Enum):
    """Which recurrence predicts ``nu_k = <r~_k, r_k>``."""

    EXPANDED = "expanded"  # nu - alpha <r~, s> - alpha <s~, r> + alpha^2 gamma
    SIMPLIFIED = "simplified"  # nu - 2 alpha delta + alpha^2 gamma
    MEURANT = "meurant"  # -nu + alpha^2 gamma


PREDICTOR_KINDS = (Kind.M, Kind.PR, Kind.PIPE_PR_M, Kind.PIPE_PR)
PIPELINED_KINDS = (Kind.PIPE_PR_M, Kind.PIPE_PR)
MU_RECURRENCE_KINDS = (Kind.CG_CG, Kind.GV)

_ALIASES = {
    "HS": Kind.HS, "HS_CG": Kind.HS,
    "CG": Kind.CG_CG, "CG_CG": Kind.CG_CG,
    "M": Kind.M, "M_CG": Kind.M,
    "PR": Kind.PR, "PR_CG": Kind.PR,
    "GV": Kind.GV, "GV_CG": Kind.GV,
    "PPRM": Kind.PIPE_PR_M, "PIPE_PR_M": Kind.PIPE_PR_M, "PIPE_PR_M_CG": Kind.PIPE_PR_M,
    "PPR": Kind.PIPE_PR, "PIPE_PR": Kind.PIPE_PR, "PIPE_PR_CG": Kind.PIPE_PR,
}


def _truthy(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


@dataclass(frozen=True)
class VariantId:
    """A variant plus its ablation switches.

    ``nu_expression`` defaults to the expression of the published algorithm
    (Meurant for M and PIPE_PR_M, simplified for PR and PIPE_PR).
    ``expanded_mu`` is an experimental switch for CG_CG and GV that replaces
    ``mu = eta - (beta/alpha) nu`` by the unsimplified
    ``mu = eta + 2 beta <r~_k, s_{k-1}> + beta^2 mu_{k-1}``; it is not one
    of the published listings.
    """

    kind: Kind
    recompute_nu: bool = True
    recompute_w: bool = True
    nu_expression: NuExpression | None = None
    expanded_mu: bool = False

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, Kind) else Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        expr = self.nu_expression
        if expr is not None and not isinstance(expr, NuExpression):
            expr = NuExpression(expr)
        if kind in PREDICTOR_KINDS:
            if expr is None:
                expr = NuExpression.MEURANT if kind in (Kind.M, Kind.PIPE_PR_M) else NuExpression.SIMPLIFIED
        elif expr is not None:
            raise ValueError(f"{kind.value} has no predicted nu; nu_expression does not apply")
        elif not self.recompute_nu:
            raise ValueError(f"{kind.value} computes nu directly; recompute_nu does not apply")
        object.__setattr__(self, "nu_expression", expr)
        if not self.recompute_w and kind not in PIPELINED_KINDS:
            raise ValueError("recompute_w only applies to PIPE_PR_M and PIPE_PR")
        if self.expanded_mu and kind not in MU_RECURRENCE_KINDS:
            raise ValueError("expanded_mu only applies to CG_CG and GV")

    @property
    def is_predictor(self):
        return self.kind in PREDICTOR_KINDS

    @property
    def is_pipelined(self):
        return self.kind in PIPELINED_KINDS

    @property
    def label(self):
        """Short name; non-default switches are appended after a colon."""
        default = VariantId(self.kind)
        extras = []
        if self.nu_expression != default.nu_expression:
            extras.append(f"nu={self.nu_expression.value}")
        if not self.recompute_nu:
            extras.append("recompute_nu=false")
        if not self.recompute_w:
            extras.append("recompute_w=false")
        if self.expanded_mu:
            extras.append("expanded_mu=true")
        return self.kind.value + (":" + ",".join(extras) if extras else "")

    def __str__(self):
        return self.label

    @classmethod
    def parse(cls, text):
        """Parse ``"PIPE_PR"`` or ``"pr:recompute_nu=false,nu=expanded"``."""
        if isinstance(text, VariantId):
            return text
        name, _, opts = str(text).partition(":")
        key = name.strip().upper().replace("-", "_")
        if key not in _ALIASES:
            raise ValueError(f"unknown variant {name!r}; choose from {', '.join(k.value for k in Kind)}")
        kwargs = {}
        for item in filter(None, (o.strip() for o in opts.split(","))):
            opt, _, value = item.partition("=")
            opt = opt.strip().lower()
            if opt in ("nu", "nu_expression"):
                kwargs["nu_expression"] = NuExpression(value.strip().lower())
            elif opt in ("recompute_nu", "recompute_w", "expanded_mu"):
                kwargs[opt] = _truthy(value)
            else:
                raise ValueError(f"unknown variant option {opt!r}")
        return cls(_ALIASES[key], **kwargs)


ALL_VARIANTS = tuple(VariantId(k) for k in Kind)


class StatusKind(enum.Enum):
    RUNNING = "running"
    BREAKDOWN = "breakdown"
    MAX_ITERATIONS = "max_iterations"
    CONVERGED = "converged"


@dataclass(frozen=True)
class SolveStatus:
    kind: StatusKind
    reason: str = ""
    k: int | None = None

    @property
    def running(self):
        return self.kind is StatusKind.RUNNING

    def __str__(self):
        if self.kind is StatusKind.RUNNING:
            return "running"
        text = self.kind.value
        if self.reason:
            text += f"({self.reason})"
        if self.k is not None:
            text += f"@{self.k}"
        return text


RUNNING = SolveStatus(StatusKind.RUNNING)


class BreakdownError(RuntimeError):
    def __init__(self, status):
        super().__init__(f"solver broke down: {status}")
        self.status = status


VECTOR_NAMES = ("x", "r", "rt", "p", "s", "st", "w", "wt", "u", "ut", "t")


@dataclass(eq=False)
class SolverState:
    """Working vectors and scalars of one solve.

    Tilde vectors (``rt``, ``st``, ``wt``, ``ut``) are the same objects as
    their plain counterparts when the preconditioner is the identity.
    ``w_prime`` is a read-only snapshot of the predicted ``w'`` for
    diagnostics; in the algorithm it shares storage with ``w``.
    """

    variant: VariantId
    A: object
    M: Preconditioner
    b: np.ndarray
    k: int = 0
    status: SolveStatus = RUNNING
    x: np.ndarray | None = None
    r: np.ndarray | None = None
    rt: np.ndarray | None = None
    p: np.ndarray | None = None
    s: np.ndarray | None = None
    st: np.ndarray | None = None
    w: np.ndarray | None = None
    wt: np.ndarray | None = None
    u: np.ndarray | None = None
    ut: np.ndarray | None = None
    t: np.ndarray | None = None
    w_prime: np.ndarray | None = field(default=None, repr=False)
    alpha: float | None = None
    beta: float | None = None
    nu: float | None = None
    nu_prime: float | None = None
    mu: float | None = None
    delta: float | None = None
    delta_t: float | None = None
    gamma: float | None = None
    eta: float | None = None

    @property
    def preconditioned(self):
        return not self.M.is_identity

    def working_vectors(self):
        """Names of the distinct vectors the variant holds."""
        seen, names = set(), []
        for name in VECTOR_NAMES:
            vec = getattr(self, name)
            if vec is not None and id(vec) not in seen:
                seen.add(id(vec))
                names.append(name)
        return names


def _precondition(state, v):
    return state.M.apply(v) if state.preconditioned else v


def _positive(state, name, value, zero_converges=False):
    """Update ``state.status`` for a scalar that must stay positive."""
    if not math.isfinite(value):
        state.status = SolveStatus(StatusKind.BREAKDOWN, f"{name} not finite", state.k)
    elif value == 0.0 and zero_converges:
        # An exactly zero residual norm: the iterate is the solution.
        state.status = SolveStatus(StatusKind.CONVERGED, f"{name}=0", state.k)
    elif value <= 0.0:
        state.status = SolveStatus(StatusKind.BREAKDOWN, f"{name}<=0", state.k)
    return state.status.running


def _set_alpha(state, nu, mu):
    if _positive(state, "mu", mu):
        state.alpha = nu / mu
        _positive(state, "alpha", state.alpha)


def initialize(variant, A, M, b, x0=None):
    """Shared start-up: residual, first search direction and step length.

    Only the quantities the variant uses are formed.  An exact initial guess
    (``nu_0 == 0``) returns a state that is already converged.
    """
    variant = VariantId.parse(variant)
    M = M if M is not None else Preconditioner.identity()
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (A.n,):
        raise DimensionError(f"right-hand side of shape {b.shape} for matrix of size {A.n}")
    x0 = np.zeros(A.n) if x0 is None else np.array(x0, dtype=np.float64)
    if x0.shape != (A.n,):
        raise DimensionError(f"initial guess of shape {x0.shape} for matrix of size {A.n}")

    st = SolverState(variant, A, M, b, x=x0)
    st.r = b - A.matvec(x0)
    st.rt = _precondition(st, st.r)
    st.nu = dot(st.rt, st.r)
    if not _positive(st, "nu", st.nu, zero_converges=True):
        return st
    st.p = st.rt.copy()
    st.s = A.matvec(st.p)
    st.mu = dot(st.p, st.s)
    _set_alpha(st, st.nu, st.mu)

    kind = variant.kind
    if kind in (Kind.M, Kind.PR, Kind.PIPE_PR_M, Kind.PIPE_PR, Kind.GV):
        st.st = _precondition(st, st.s)
    if kind in (Kind.GV, Kind.PIPE_PR_M, Kind.PIPE_PR):
        st.w = A.matvec(st.rt)
        st.u = A.matvec(st.st)
    if variant.is_pipelined:
        st.wt = _precondition(st, st.w)
        st.ut = _precondition(st, st.u)
    if variant.is_predictor:
        _predictor_products(st)
    return st


def _predictor_products(st):
    expr = st.variant.nu_expression
    if expr is not NuExpression.MEURANT:
        st.delta = dot(st.rt, st.s)
    if expr is NuExpression.EXPANDED:
        st.delta_t = dot(st.st, st.r)
    st.gamma = dot(st.st, st.s)


def _predict_nu(st, a):
    nu, gamma = st.nu, st.gamma
    expr = st.variant.nu_expression
    if expr is NuExpression.SIMPLIFIED:
        return nu - 2.0 * a * st.delta + a * a * gamma
    if expr is NuExpression.EXPANDED:
        return nu - a * st.delta - a * st.delta_t + a * a * gamma
    return -nu + a * a * gamma


def _require_running(st):
    if not st.status.running:
        raise RuntimeError(f"cannot step a solver whose status is {st.status}")
    st.k += 1


def step_hs(st):
    _require_running(st)
    a = st.alpha
    st.x = axpy(a, st.p, st.x)
    st.r = axpy(-a, st.s, st.r)
    st.rt = _precondition(st, st.r)
    nu = dot(st.rt, st.r)
    if not _positive(st, "nu", nu, zero_converges=True):
        st.nu = nu
        return st
    st.beta = nu / st.nu
    st.nu = nu
    st.p = axpy(st.beta, st.p, st.rt)
    st.s = st.A.matvec(st.p)
    st.mu = dot(st.p, st.s)
    _set_alpha(st, st.nu, st.mu)
    return st


def step_cg_cg(st):
    _require_running(st)
    a = st.alpha
    st.x = axpy(a, st.p, st.x)
    st.r = axpy(-a, st.s, st.r)
    st.rt = _precondition(st, st.r)
    st.w = st.A.matvec(st.rt)
    nu = dot(st.rt, st.r)
    st.eta = dot(st.rt, st.w)
    if st.variant.expanded_mu:
        rs = dot(st.rt, st.s)
    if not _positive(st, "nu", nu, zero_converges=True):
        st.nu = nu
        return st
    beta = nu / st.nu
    st.beta, st.nu = beta, nu
    st.p = axpy(beta, st.p, st.rt)
    st.s = axpy(beta, st.s, st.w)
    if st.variant.expanded_mu:
        st.mu = st.eta + 2.0 * beta * rs + beta * beta * st.mu
    else:
        st.mu = st.eta - (beta / a) * nu
    _set_alpha(st, nu, st.mu)
    return st


def step_pr(st):
    """PR-CG step; also M-CG (``nu_expression=MEURANT``)."""
    _require_running(st)
    a = st.alpha
    st.x = axpy(a, st.p, st.x)
    st.r = axpy(-a, st.s, st.r)
    st.rt = axpy(-a, st.st, st.rt) if st.preconditioned else st.r
    nu_p = _predict_nu(st, a)
    st.nu_prime = nu_p
    if not _positive(st, "nu_prime", nu_p, zero_converges=True):
        return st
    st.beta = nu_p / st.nu
    st.p = axpy(st.beta, st.p, st.rt)
    st.s = st.A.matvec(st.p)
    st.st = _precondition(st, st.s)
    st.mu = dot(st.p, st.s)
    _predictor_products(st)
    st.nu = dot(st.rt, st.r) if st.variant.recompute_nu else nu_p
    if _positive(st, "nu", st.nu, zero_converges=True):
        _set_alpha(st, st.nu, st.mu)
    return st


def step_gv(st):
    _require_running(st)
    a = st.alpha
    pre = st.preconditioned
    st.x = axpy(a, st.p, st.x)
    st.r = axpy(-a, st.s, st.r)
    st.rt = axpy(-a, st.st, st.rt) if pre else st.r
    st.w = axpy(-a, st.u, st.w)
    st.wt = _precondition(st, st.w)
    nu = dot(st.rt, st.r)
    st.eta = dot(st.rt, st.w)
    if st.variant.expanded_mu:
        rs = dot(st.rt, st.s)
    st.t = st.A.matvec(st.wt)
    if not _positive(st, "nu", nu, zero_converges=True):
        st.nu = nu
        return st
    beta = nu / st.nu
    st.beta, st.nu = beta, nu
    st.p = axpy(beta, st.p, st.rt)
    st.s = axpy(beta, st.s, st.w)
    st.st = axpy(beta, st.st, st.wt) if pre else st.s
    st.u = axpy(beta, st.u, st.t)
    if st.variant.expanded_mu:
        st.mu = st.eta + 2.0 * beta * rs + beta * beta * st.mu
    else:
        st.mu = st.eta - (beta / a) * nu
    _set_alpha(st, nu, st.mu)
    return st


def step_pipe_pr(st):
    """Pipelined PR step; also PIPE_PR_M (``nu_expression=MEURANT``).

    Scalars first, then every vector update, then the fused product
    ``(A s~, A r~)`` and the four inner products, which are independent of one
    another and would share one reduction.
    """
    _require_running(st)
    pre = st.preconditioned
    a = st.alpha
    nu_p = _predict_nu(st, a)
    st.nu_prime = nu_p
    st.x = axpy(a, st.p, st.x)
    st.r = axpy(-a, st.s, st.r)
    st.rt = axpy(-a, st.st, st.rt) if pre else st.r
    if not _positive(st, "nu_prime", nu_p, zero_converges=True):
        return st
    st.beta = beta = nu_p / st.nu

    wp = axpy(-a, st.u, st.w)
    wtp = axpy(-a, st.ut, st.wt) if pre else wp
    st.p = axpy(beta, st.p, st.rt)
    st.s = axpy(beta, st.s, wp)
    st.st = axpy(beta, st.st, wtp) if pre else st.s

    if st.variant.recompute_w:
        st.u, st.w = st.A.matvec2(st.st, st.rt)
        st.wt = _precondition(st, st.w)
    else:
        st.u = st.A.matvec(st.st)
        st.w, st.wt = wp, wtp
    st.ut = _precondition(st, st.u)
    st.w_prime = wp

    st.mu = dot(st.p, st.s)
    _predictor_products(st)
    st.nu = dot(st.rt, st.r) if st.variant.recompute_nu else nu_p
    if _positive(st, "nu", st.nu, zero_converges=True):
        _set_alpha(st, st.nu, st.mu)
    return st


_STEPPERS = {
    Kind.HS: step_hs,
    Kind.CG_CG: step_cg_cg,
    Kind.M: step_pr,
    Kind.PR: step_pr,
    Kind.GV: step_gv,
    Kind.PIPE_PR_M: step_pipe_pr,
    Kind.PIPE_PR: step_pipe_pr,
}


def step(state):
    """Advance ``state`` by one iteration in place and return it."""
    return _STEPPERS[state.variant.kind](state)


# --- stopping rules -------------------------------------------------------


@dataclass(frozen=True)
class FixedIterations:
    iterations: int

    def check(self, state, history):
        return "iterations" if state.k >= self.iterations else None


@dataclass(frozen=True)
class ErrorReduction:
    """Stop once ``||e_k||_A / ||e_0||_A`` drops below ``threshold``."""

    threshold: float = 1e-5

    def check(self, state, history):
        if not history.records:
            raise ValueError("ErrorReduction needs a diagnostics probe")
        err = history.records[-1].rel_err_a_norm
        if err is None:
            raise ValueError("ErrorReduction needs the exact solution in the probe")
        return "error_reduction" if err < self.threshold else None


@dataclass(frozen=True)
class Stagnation:
    """Stop when the true residual improved by less than ``rel_improvement``
    over the last ``window`` probed iterations."""

    window: int = 50
    rel_improvement: float = 0.01

    def check(self, state, history):
        if not history.records:
            raise ValueError("Stagnation needs a diagnostics probe")
        return "stagnation" if stagnated(history.records, self.window, self.rel_improvement) else None


def stagnated(records, window=50, rel_improvement=0.01):
    res = [r.true_res_norm for r in records]
    if len(res) <= window:
        return False
    best_before = min(res[:-window])
    best_recent = min(res[-window:])
    return best_recent > (1.0 - rel_improvement) * best_before


def run(variant, A, M, b, x0=None, max_iter=1000, stop=None, probe=None, strict=False,
        problem="", on_step=None):
    """Drive a variant from ``x0`` and collect per-iteration diagnostics.

    ``stop`` is a rule or list of rules checked after every probed
    iteration; ``max_iter`` always bounds the run.  A breakdown ends the run
    with that status (or raises :class:`BreakdownError` when ``strict``).
    """
    from .diagnostics import ConvergenceHistory

    variant = VariantId.parse(variant)
    if max_iter < 0:
        raise ValueError("max_iter must be non-negative")
    rules = [] if stop is None else list(stop) if isinstance(stop, (list, tuple)) else [stop]
    if probe is None and any(not isinstance(r, FixedIterations) for r in rules):
        raise ValueError("error-reduction and stagnation rules need a diagnostics probe")
    state = initialize(variant, A, M, b, x0)
    history = ConvergenceHistory(
        variant=variant.label,
        problem=problem,
        preconditioner="none" if state.M.is_identity else state.M.kind,
        records=[],
    )

    def probed():
        if probe is None:
            return False
        rec = probe(state)
        if rec is not None:
            history.records.append(rec)
            return True
        return False

    fresh = probed()
    while True:
        if not state.status.running:
            break
        done = None
        for rule in rules:
            if isinstance(rule, FixedIterations) or fresh:
                done = rule.check(state, history)
                if done:
                    break
        if done:
            kind = StatusKind.MAX_ITERATIONS if done == "iterations" else StatusKind.CONVERGED
            state.status = SolveStatus(kind, done, state.k)
            break
        if state.k >= max_iter:
            state.status = SolveStatus(StatusKind.MAX_ITERATIONS, "max_iter", state.k)
            break
        step(state)
        fresh = probed()
        if on_step is not None:
            on_step(state)
    if probe is not None and history.records and history.records[-1].k != state.k:
        # Always record the final iterate, whatever the probing cadence.
        rec = probe(state, force=True)
        if rec is not None:
            history.records.append(rec)
    history.status = state.status
    history.final_state = state
    if strict and state.status.kind is StatusKind.BREAKDOWN:
        raise BreakdownError(state.status)
    return history


__all__ = [
    "ALL_VARIANTS", "BreakdownError", "ErrorReduction", "FixedIterations", "Kind", "NuExpression",
    "RUNNING", "SolveStatus", "SolverState", "Stagnation", "StatusKind", "VariantId", "initialize",
    "run", "stagnated", "step", "step_cg_cg", "step_gv", "step_hs", "step_pipe_pr", "step_pr",
]
