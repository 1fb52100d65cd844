"""Per-iteration time model and strong-scaling predictions.

Only the dominant costs are modelled: global reductions (``c_gr``), the
matrix-vector product (``t_mv`` computation, ``c_mv`` communication) and the
fused pair of products (``t_2mv``).  Vector updates and local inner-product
work are ignored, and communication time does not depend on message size.
Overlapped work costs the maximum of its parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .variants import Kind, VariantId

ITERATIONS_PER_RUN = 1500


@dataclass(frozen=True)
class CostParams:
    """Times in seconds for one reduction, one product and one fused product pair."""

    c_gr: float
    t_mv: float
    c_mv: float
    t_2mv: float

    def __post_init__(self):
        for name in ("c_gr", "t_mv", "c_mv", "t_2mv"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be a finite non-negative number, got {value!r}")
        # Relative slack so that parameters produced by arithmetic (e.g.
        # 1.5 * t_mv scaled by 1/nodes) are not rejected for one ulp.
        slack = 4 * 2.0 ** -52 * self.t_mv
        if not self.t_mv - slack <= self.t_2mv <= 2 * self.t_mv + slack:
            raise ValueError(f"need t_mv <= t_2mv <= 2 t_mv, got t_mv={self.t_mv}, t_2mv={self.t_2mv}")


def iteration_time(variant, p):
    """Dominant time of one iteration of ``variant`` under cost parameters ``p``."""
    kind = VariantId.parse(variant).kind
    if kind is Kind.HS:
        return 2 * p.c_gr + p.t_mv + p.c_mv
    if kind in (Kind.CG_CG, Kind.M, Kind.PR):
        return p.c_gr + p.t_mv + p.c_mv
    if kind is Kind.GV:
        return max(p.c_gr, p.t_mv + p.c_mv)
    return max(p.c_gr, p.t_2mv + p.c_mv)


def _evaluate(form, nodes):
    """Evaluate a cost term: a number, a callable, or an expression in ``nodes``.

    Expressions may use ``nodes``, ``log``, ``log2``, ``sqrt``, ``min``, ``max``
    and arithmetic, e.g. ``"2e-5 * log2(nodes)"``.
    """
    if callable(form):
        return float(form(nodes))
    if isinstance(form, (int, float)):
        return float(form)
    env = {"nodes": nodes, "log": math.log, "log2": math.log2, "log10": math.log10,
           "sqrt": math.sqrt, "min": min, "max": max}
    try:
        return float(eval(compile(str(form), "<cost>", "eval"), {"__builtins__": {}}, env))
    except Exception as exc:  # noqa: BLE001 - surface any expression error uniformly
        raise ValueError(f"cannot evaluate cost expression {form!r} at nodes={nodes}: {exc}") from exc


@dataclass(frozen=True)
class ScalingScenario:
    """Node counts with cost terms given as functions of the node count."""

    nodes: tuple
    c_gr: object
    t_mv: object
    c_mv: object
    t_2mv: object
    name: str = "scenario"

    def __post_init__(self):
        nodes = tuple(int(n) for n in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if any(n < 1 for n in nodes):
            raise ValueError("node counts must be positive")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise ValueError("node counts must be strictly increasing")

    def params(self, nodes):
        return CostParams(*(_evaluate(getattr(self, f), nodes) for f in ("c_gr", "t_mv", "c_mv", "t_2mv")))

    @classmethod
    def from_dict(cls, data):
        """Build from a mapping such as a parsed YAML scenario file."""
        try:
            nodes = data["nodes"]
            terms = {k: data[k] for k in ("c_gr", "t_mv", "c_mv", "t_2mv")}
        except KeyError as exc:
            raise ValueError(f"scaling scenario is missing {exc.args[0]!r}") from exc
        if isinstance(nodes, dict):
            start, stop = int(nodes["start"]), int(nodes["stop"])
            factor = int(nodes.get("factor", 2))
            seq = []
            n = start
            while n <= stop:
                seq.append(n)
                n *= factor
            nodes = seq
        return cls(tuple(nodes), name=str(data.get("name", "scenario")), **terms)


@dataclass(frozen=True)
class ScalingPoint:
    nodes: int
    seconds: float


@dataclass(frozen=True)
class ScalingPrediction:
    variant: str
    points: tuple
    crossover_nodes: int | None
    """First node count at which the variant is faster than HS (None if never)."""


def predict_scaling(variant, scenario, iterations=ITERATIONS_PER_RUN):
    """Predicted time for ``iterations`` iterations at every node count.

    ``crossover_nodes`` is the smallest node count where ``variant`` beats
    HS; it is ``None`` for HS itself or if the variant never wins.
    """
    if not scenario.nodes:
        raise ValueError("scaling scenario has no node counts")
    variant = VariantId.parse(variant)
    hs = VariantId(Kind.HS)
    points, crossover = [], None
    for nodes in scenario.nodes:
        p = scenario.params(nodes)
        t = iterations * iteration_time(variant, p)
        points.append(ScalingPoint(nodes, t))
        if crossover is None and variant.kind is not Kind.HS and t < iterations * iteration_time(hs, p):
            crossover = nodes
    return ScalingPrediction(variant.label, tuple(points), crossover)


def default_scenario():
    """Illustrative scenario: products shrink with the node count, reductions grow."""
    return ScalingScenario(
        nodes=(1, 2, 4, 8, 16, 32, 64, 128, 256),
        c_gr="2e-5 * (1 + log2(nodes))",
        t_mv="4e-3 / nodes",
        c_mv="1e-5 * (nodes > 1)",
        t_2mv="1.5 * 4e-3 / nodes",
        name="default",
    )


__all__ = [
    "CostParams", "ITERATIONS_PER_RUN", "ScalingPoint", "ScalingPrediction", "ScalingScenario",
    "default_scenario", "iteration_time", "predict_scaling",
]
