"""Closed-form feasibility conditions and greedy approximation guarantees.

For i.i.d. weights ``U[a - delta, a + delta]`` the greedy algorithm keeps
adding items while ``k + eps(k) <= k_opt`` with ``k_opt = floor(B / a)``,
where ``eps`` is the surrogate-specific safety margin measured in items.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .surrogates import ChanceConstraint, SurrogateKind
from .weights import SolutionStats, WeightModel


def feasible_by_chernoff(stats: SolutionStats, delta: float, cc: ChanceConstraint) -> bool:
    """``B - E[W(X)] >= sqrt(3 delta k ln(1/alpha))``."""
    margin = math.sqrt(3.0 * delta * stats.count * math.log(1.0 / cc.alpha))
    return cc.budget - stats.expected_weight >= margin


def feasible_by_chebyshev(stats: SolutionStats, cc: ChanceConstraint) -> bool:
    """``B - E[W(X)] >= sqrt((1 - alpha) Var[W(X)] / alpha)``."""
    margin = math.sqrt((1.0 - cc.alpha) * stats.variance / cc.alpha)
    return cc.budget - stats.expected_weight >= margin


def chernoff_epsilon(k: int, a: float, delta: float, alpha: float) -> float:
    return math.sqrt(3.0 * delta * k * math.log(1.0 / alpha)) / a


def chebyshev_epsilon(k: int, a: float, delta: float, alpha: float) -> float:
    return math.sqrt((1.0 - alpha) * k * delta * delta) / (math.sqrt(3.0 * alpha) * a)


def _epsilon_fn(kind: SurrogateKind):
    if kind in (SurrogateKind.CHERNOFF_EXP, SurrogateKind.CHERNOFF_SIMPLE):
        return chernoff_epsilon
    if kind is SurrogateKind.CHEBYSHEV:
        return chebyshev_epsilon
    raise ValueError(f"no closed-form item bound for surrogate {kind.value!r}")


@dataclass(frozen=True)
class BoundReport:
    a: float
    delta: float
    alpha: float
    budget: float
    surrogate_kind: SurrogateKind
    k_opt: int
    k_star: int
    epsilon_k: float      # margin at k*
    epsilon_next: float   # margin at k* + 1, used by the ratio
    ratio: float


def approximation_ratio(report: BoundReport) -> float:
    """``1 - (1/e) exp((1 + eps(k*+1)) / (k* + 1 + eps(k*+1)))``; 0 when ``k* = 0``."""
    k = report.k_star
    if k < 1:
        return 0.0
    e = report.epsilon_next
    return 1.0 - math.exp((1.0 + e) / (k + 1.0 + e) - 1.0)


def k_star(a: float, delta: float, cc: ChanceConstraint) -> BoundReport:
    """Largest ``k`` with ``k + eps(k) <= floor(B / a)``, found by a linear scan.

    Chernoff kinds use ``eps(k) = sqrt(3 delta k ln(1/alpha)) / a``;
    Chebyshev uses ``sqrt((1 - alpha) k delta^2) / (sqrt(3 alpha) a)``.
    Equality at the boundary counts as feasible.
    """
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    if not 0 <= delta <= a:
        raise ValueError(f"delta must lie in [0, a], got {delta}")
    eps = _epsilon_fn(cc.kind)
    k_opt = math.floor(cc.budget / a)
    best = 0
    for k in range(1, k_opt + 1):
        if k + eps(k, a, delta, cc.alpha) <= k_opt:
            best = k
        else:
            break
    report = BoundReport(
        a=a,
        delta=delta,
        alpha=cc.alpha,
        budget=cc.budget,
        surrogate_kind=cc.kind,
        k_opt=k_opt,
        k_star=best,
        epsilon_k=eps(best, a, delta, cc.alpha),
        epsilon_next=eps(best + 1, a, delta, cc.alpha),
        ratio=0.0,
    )
    return replace(report, ratio=approximation_ratio(report))


def gga_precondition(model: WeightModel, cc: ChanceConstraint) -> bool:
    """Every single item satisfies the chance constraint on its own.

    Checks ``(a_max + delta - B) / (2 delta) <= alpha``; with ``delta = 0``
    this is ``a_max <= B``.
    """
    if model.delta == 0:
        return model.a_max <= cc.budget
    return (model.a_max + model.delta - cc.budget) / (2.0 * model.delta) <= cc.alpha


def gga_guarantee(tau: float = 0.0) -> float:
    """Finite-size stand-in for the ``(1/2 - o(1))(1 - 1/e)`` guarantee."""
    return 0.5 * (1.0 - 1.0 / math.e - tau)
