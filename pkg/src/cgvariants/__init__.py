"""Conjugate gradient variants, finite-precision diagnostics and a cost model."""

from .costmodel import CostParams, ScalingScenario, iteration_time, predict_scaling
from .diagnostics import ConvergenceHistory, DiagnosticsProbe, IterationRecord, lanczos_recurrence_residual, probe, summarize
from .linalg import (
    ModelProblemSpec,
    Preconditioner,
    SparseMatrix,
    a_norm,
    axpy,
    block_spmv,
    build_model_problem,
    dot,
    spmv,
)
from .mmio import parse_matrix_market, read_matrix_market, serialize_matrix_market
from .variants import (
    ALL_VARIANTS,
    ErrorReduction,
    FixedIterations,
    Kind,
    NuExpression,
    SolverState,
    SolveStatus,
    Stagnation,
    VariantId,
    initialize,
    run,
    step,
)

__version__ = "0.1.0"
