"""Experiment sweeps over (budget, alpha, delta, surrogate), validation and oracles."""

from __future__ import annotations

import csv
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .greedy import GreedyResult, certified_bound, run_greedy
from .objectives import (
    BitsetCoverage,
    CoverageObjective,
    InfluenceGraph,
    SubmodularObjective,
    degree_cost_model,
)
from .surrogates import ChanceConstraint, SurrogateKind
from .weights import WeightModel, exact_tail, sample_total_weights

DEFAULT_ALPHAS = (0.1, 0.01, 0.001, 0.0001)
DEFAULT_DELTAS = tuple(round(0.1 * i, 1) for i in range(1, 11))
CSV_COLUMNS = ("B", "alpha", "delta", "surrogate", "value", "exp_cost", "items", "bound", "violation")
BRUTE_FORCE_MAX_N = 20


@dataclass(frozen=True)
class SweepConfig:
    budgets: tuple[float, ...] = (20, 50, 100, 150)
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    deltas: tuple[float, ...] = DEFAULT_DELTAS
    surrogates: tuple[SurrogateKind, ...] = (SurrogateKind.CHERNOFF_EXP, SurrogateKind.CHEBYSHEV)
    cost_mode: str = "uniform"
    algorithm: str = "ga"
    seed: int = 0
    mc_samples: int = 0
    degree_mode: str = "out"
    lazy: bool = True

    def __post_init__(self):
        for name in ("budgets", "alphas", "deltas", "surrogates"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"SweepConfig.{name} must not be empty")
            object.__setattr__(self, name, values)
        object.__setattr__(self, "surrogates", tuple(SurrogateKind.parse(s) for s in self.surrogates))
        if self.cost_mode not in ("uniform", "degree"):
            raise ValueError(f"cost_mode must be 'uniform' or 'degree', got {self.cost_mode!r}")
        if self.algorithm.lower() not in ("ga", "gga"):
            raise ValueError(f"algorithm must be 'ga' or 'gga', got {self.algorithm!r}")
        if self.mc_samples < 0:
            raise ValueError("mc_samples must be non-negative")

    def cells(self):
        """Cells in lexicographic (B, alpha, delta, surrogate) order."""
        return list(itertools.product(self.budgets, self.alphas, self.deltas, self.surrogates))


@dataclass
class SweepRow:
    B: float
    alpha: float
    delta: float
    surrogate: str
    value: float
    exp_cost: float
    items: int
    bound: float
    violation: float | None = None
    solution: tuple[int, ...] = field(default=(), compare=False)
    fallback: bool = field(default=False, compare=False)


@dataclass(frozen=True)
class ViolationEstimate:
    rate: float
    stderr: float
    samples: int


def validate_solution(X, model: WeightModel, cc: ChanceConstraint, samples: int, seed: int) -> ViolationEstimate:
    """Monte Carlo estimate of ``Pr[W(X) > B]`` with its binomial standard error."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    w = sample_total_weights(X, model, rng, samples)
    p = float(np.count_nonzero(w > cc.budget)) / samples
    return ViolationEstimate(p, math.sqrt(p * (1.0 - p) / samples), samples)


def expected_costs(cfg: SweepConfig, objective: SubmodularObjective, graph: InfluenceGraph | None = None) -> np.ndarray:
    if cfg.cost_mode == "uniform":
        return np.ones(objective.n)
    if graph is None:
        raise ValueError("degree-based costs need an influence graph, not a coverage instance")
    if graph.n != objective.n:
        raise ValueError("graph and objective disagree on the number of elements")
    return degree_cost_model(graph, cfg.degree_mode)


def _cell_seed(base: int, index: int) -> int:
    return int(np.random.SeedSequence([int(base), int(index)]).generate_state(1)[0])


def run_cell(cfg, objective, costs, index, cell) -> SweepRow:
    B, alpha, delta, kind = cell
    model = WeightModel(costs, delta)
    cc = ChanceConstraint(B, alpha, kind)
    res = run_greedy(cfg.algorithm, objective, model, cc, lazy=cfg.lazy)
    violation = None
    if cfg.mc_samples:
        est = validate_solution(res.solution, model, cc, cfg.mc_samples, _cell_seed(cfg.seed, index))
        violation = est.rate
    return SweepRow(
        B=B,
        alpha=alpha,
        delta=delta,
        surrogate=kind.value,
        value=res.objective,
        exp_cost=res.stats.expected_weight,
        items=res.items,
        bound=res.surrogate.bound,
        violation=violation,
        solution=res.solution,
        fallback=res.fallback,
    )


def run_sweep(
    cfg: SweepConfig,
    objective: SubmodularObjective,
    graph: InfluenceGraph | None = None,
    workers: int = 1,
    progress=None,
) -> list[SweepRow]:
    """Run one greedy optimisation per (B, alpha, delta, surrogate) cell.

    Rows come back in lexicographic cell order regardless of ``workers``;
    Monte Carlo validation in cell ``i`` is seeded from ``(cfg.seed, i)``.
    """
    if isinstance(objective, CoverageObjective) and cfg.cost_mode == "degree":
        raise ValueError("degree-based costs are defined for influence graphs only")
    costs = expected_costs(cfg, objective, graph)
    cells = cfg.cells()

    def job(item):
        i, cell = item
        row = run_cell(cfg, objective, costs, i, cell)
        if progress is not None:
            progress(i, len(cells), row)
        return row

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, enumerate(cells)))
    return [job(item) for item in enumerate(cells)]


def brute_force_opt(
    objective: SubmodularObjective, model: WeightModel, cc: ChanceConstraint, exact: bool = False
) -> tuple[tuple[int, ...], float]:
    """Best subset by enumeration over all ``2^n`` subsets.

    ``exact=False`` admits subsets with expected weight at most ``B`` (the
    deterministic optimum); ``exact=True`` admits subsets whose exact
    uniform tail is at most ``alpha``.  Ties go to the subset with the
    smallest bitmask.
    """
    n = objective.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force is limited to {BRUTE_FORCE_MAX_N} elements, got {n}")
    if model.n != n:
        raise ValueError("weight model and objective disagree on the number of elements")
    a = [float(x) for x in model.expected]
    size = 1 << n
    cost = [0.0] * size
    count = [0] * size
    bitset = isinstance(objective, BitsetCoverage)
    union = [0] * size if bitset else None
    best_mask, best_val = 0, objective.value([])
    for mask in range(1, size):
        low = mask & -mask
        v = low.bit_length() - 1
        prev = mask ^ low
        cost[mask] = cost[prev] + a[v]
        count[mask] = count[prev] + 1
        if bitset:
            union[mask] = union[prev] | objective.cover(v)
        if exact:
            ok = exact_tail(count[mask], cost[mask], model.delta, cc.budget) <= cc.alpha
        else:
            ok = cost[mask] <= cc.budget + 1e-9 * max(1.0, cc.budget)
        if not ok:
            continue
        if bitset:
            val = union[mask].bit_count() / objective.scale
        else:
            val = objective.value([i for i in range(n) if mask >> i & 1])
        if val > best_val:
            best_mask, best_val = mask, val
    return tuple(i for i in range(n) if best_mask >> i & 1), best_val


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".6g")


def emit_csv(rows: Sequence[SweepRow], path: str | os.PathLike) -> None:
    """Write rows with a fixed header; floats use 6 significant digits."""
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for r in rows:
                w.writerow([
                    _fmt(r.B), _fmt(r.alpha), _fmt(r.delta), r.surrogate,
                    _fmt(r.value), _fmt(r.exp_cost), str(int(r.items)), _fmt(r.bound), _fmt(r.violation),
                ])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path: str | os.PathLike) -> list[SweepRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            SweepRow(
                B=float(d["B"]),
                alpha=float(d["alpha"]),
                delta=float(d["delta"]),
                surrogate=d["surrogate"],
                value=float(d["value"]),
                exp_cost=float(d["exp_cost"]),
                items=int(d["items"]),
                bound=float(d["bound"]),
                violation=float(d["violation"]) if d["violation"] else None,
            )
            for d in reader
        ]


def recheck_row(row: SweepRow, cfg: SweepConfig, objective, graph=None) -> float:
    """Recompute the certified bound of a row's stored solution."""
    model = WeightModel(expected_costs(cfg, objective, graph), row.delta)
    cc = ChanceConstraint(row.B, row.alpha, row.surrogate)
    stub = GreedyResult(row.solution, row.value, None, None, fallback=row.fallback)
    return certified_bound(stub, model, cc).bound
