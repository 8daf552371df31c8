"""Greedy maximisation of monotone submodular functions under chance constraints."""

__version__ = "0.1.0"

from .greedy import GreedyResult, greedy_ga, greedy_gga, run_greedy
from .objectives import (
    CoverageInstance,
    CoverageObjective,
    InfluenceGraph,
    InfluenceObjective,
    LiveEdgeEnsemble,
    coverage_value,
    degree_cost_model,
    influence_spread,
    load_coverage,
    load_graph,
    sample_live_edges,
)
from .surrogates import ChanceConstraint, SurrogateKind, SurrogateValue, surrogate_tail
from .theory import BoundReport, approximation_ratio, gga_precondition, k_star
from .weights import SolutionStats, WeightModel, exact_tail_uniform_iid, solution_stats
