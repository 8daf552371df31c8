"""Greedy selection under a surrogate chance constraint.

``greedy_ga`` picks by marginal gain, ``greedy_gga`` by marginal gain per
unit of expected weight and then compares the result against the best
single element that is feasible by the exact single-item tail.

Candidates are examined in score order.  An infeasible candidate is
dropped and never reconsidered, so every run finishes after at most
``|V|`` examinations.  Ties go to the lowest element id.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable

from .objectives import BitsetCoverage, SubmodularObjective
from .surrogates import (
    ChanceConstraint,
    SurrogateValue,
    exact_single_element_tail,
    surrogate_tail,
)
from .weights import SolutionStats, WeightModel, solution_stats


@dataclass(frozen=True)
class TraceStep:
    element: int
    gain: float
    bound: float


@dataclass
class GreedyResult:
    solution: tuple[int, ...]
    objective: float
    stats: SolutionStats
    surrogate: SurrogateValue
    trace: list[TraceStep] = field(default_factory=list)
    fallback: bool = False       # GGA returned the single best element
    no_feasible: bool = False    # nothing at all could be selected

    @property
    def items(self) -> int:
        return len(self.solution)


class _GainOracle:
    """Marginal gains against the growing greedy solution."""

    def __init__(self, f: SubmodularObjective):
        self.f = f
        self.S: list[int] = []
        self._bitset = isinstance(f, BitsetCoverage)
        self._covered = 0

    def gain(self, v: int) -> float:
        if self._bitset:
            return self.f.gain_given(self._covered, v)
        return self.f.gain(self.S, v)

    def add(self, v: int) -> None:
        self.S.append(v)
        if self._bitset:
            self._covered |= self.f.cover(v)


def _select(
    f: SubmodularObjective,
    model: WeightModel,
    cc: ChanceConstraint,
    score: Callable[[float, int], float],
    lazy: bool,
) -> tuple[list[int], list[TraceStep]]:
    n = f.n
    if model.n != n:
        raise ValueError(f"weight model has {model.n} elements but the objective has {n}")
    oracle = _GainOracle(f)
    trace: list[TraceStep] = []

    def consider(v: int, g: float) -> None:
        sv = surrogate_tail(oracle.S + [v], model, cc)
        if sv.feasible:
            oracle.add(v)
            trace.append(TraceStep(v, g, sv.bound))

    if lazy:
        # stale scores are upper bounds by submodularity; a fresh top entry is the argmax
        version = 0
        heap = []
        for v in range(n):
            g = oracle.gain(v)
            heap.append((-score(g, v), v, version, g))
        heapq.heapify(heap)
        while heap:
            _, v, stamp, g = heapq.heappop(heap)
            if stamp != len(oracle.S):
                g = oracle.gain(v)
                heapq.heappush(heap, (-score(g, v), v, len(oracle.S), g))
                continue
            consider(v, g)
    else:
        remaining = list(range(n))
        while remaining:
            best, best_key, best_gain = None, None, 0.0
            for v in remaining:
                g = oracle.gain(v)
                key = score(g, v)
                if best is None or key > best_key:
                    best, best_key, best_gain = v, key, g
            remaining.remove(best)
            consider(best, best_gain)
    return oracle.S, trace


def _result(f, model, cc, S, trace) -> GreedyResult:
    return GreedyResult(
        solution=tuple(S),
        objective=f.value(S),
        stats=solution_stats(S, model),
        surrogate=surrogate_tail(S, model, cc),
        trace=trace,
    )


def greedy_ga(
    f: SubmodularObjective, model: WeightModel, cc: ChanceConstraint, lazy: bool = True
) -> GreedyResult:
    """Greedy by marginal gain, accepting an element only if the surrogate allows it."""
    S, trace = _select(f, model, cc, lambda g, v: g, lazy)
    return _result(f, model, cc, S, trace)


def greedy_gga(
    f: SubmodularObjective, model: WeightModel, cc: ChanceConstraint, lazy: bool = True
) -> GreedyResult:
    """Greedy by gain per expected weight, then compare with the best feasible single element.

    Single elements are certified with the exact uniform tail rather than the
    surrogate; when the single element wins, ``result.surrogate`` holds that
    exact tail and ``result.fallback`` is set.
    """
    a = model.expected
    S, trace = _select(f, model, cc, lambda g, v: g / a[v], lazy)
    result = _result(f, model, cc, S, trace)

    best, best_val, best_tail = None, None, None
    for v in range(f.n):
        tail = exact_single_element_tail(float(a[v]), model.delta, cc.budget)
        if tail > cc.alpha:
            continue
        val = f.value([v])
        if best is None or val > best_val:
            best, best_val, best_tail = v, val, tail

    if best is not None and best_val > result.objective:
        return GreedyResult(
            solution=(best,),
            objective=best_val,
            stats=solution_stats([best], model),
            surrogate=SurrogateValue.of(best_tail, cc.alpha),
            trace=[TraceStep(best, best_val, best_tail)],
            fallback=True,
        )
    if not S and best is None:
        result.no_feasible = True
    return result


def run_greedy(
    algorithm: str, f: SubmodularObjective, model: WeightModel, cc: ChanceConstraint, lazy: bool = True
) -> GreedyResult:
    algorithm = algorithm.lower()
    if algorithm == "ga":
        return greedy_ga(f, model, cc, lazy=lazy)
    if algorithm == "gga":
        return greedy_gga(f, model, cc, lazy=lazy)
    raise ValueError(f"unknown algorithm {algorithm!r}; choose 'ga' or 'gga'")


def certified_bound(result: GreedyResult, model: WeightModel, cc: ChanceConstraint) -> SurrogateValue:
    """Recompute the bound that certifies ``result`` from scratch."""
    if result.fallback:
        v = result.solution[0]
        tail = exact_single_element_tail(float(model.expected[v]), model.delta, cc.budget)
        return SurrogateValue.of(tail, cc.alpha)
    return surrogate_tail(result.solution, model, cc)
