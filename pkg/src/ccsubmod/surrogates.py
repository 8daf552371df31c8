"""Upper bounds on the violation probability ``Pr[W(X) > B]``.

A selection is accepted when its surrogate bound is at most ``alpha``.
Each bound below is sound (never smaller than the true tail) for the
uniform weight model of :mod:`ccsubmod.weights`; ``chernoff-simple`` is
sound for ``delta <= 1.5``, which covers every setting with ``a <= 1.5``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

from .weights import SolutionStats, WeightModel, exact_tail, solution_stats


class SurrogateKind(str, enum.Enum):
    CHERNOFF_EXP = "chernoff-exp"
    CHERNOFF_SIMPLE = "chernoff-simple"
    CHEBYSHEV = "chebyshev"
    EXACT = "exact"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: "str | SurrogateKind") -> "SurrogateKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {"exact-irwin-hall": "exact", "irwin-hall": "exact", "chernoff": "chernoff-exp"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown surrogate {name!r}; choose one of {choices}") from None


@dataclass(frozen=True)
class ChanceConstraint:
    """Require ``Pr[W(X) > budget] <= alpha``, certified by ``kind``."""

    budget: float
    alpha: float
    kind: SurrogateKind = SurrogateKind.CHERNOFF_EXP

    def __post_init__(self):
        if not self.budget > 0:
            raise ValueError(f"budget must be positive, got {self.budget}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        object.__setattr__(self, "kind", SurrogateKind.parse(self.kind))


@dataclass(frozen=True)
class SurrogateValue:
    bound: float
    feasible: bool

    @classmethod
    def of(cls, bound: float, alpha: float) -> "SurrogateValue":
        bound = min(1.0, max(0.0, float(bound)))
        return cls(bound, bound <= alpha)


def _indicator(expected: float, B: float) -> float:
    return 1.0 if expected > B else 0.0


def chernoff_exp_tail(stats: SolutionStats, delta: float, B: float) -> float:
    """Multiplicative Chernoff bound on items rescaled to ``[0, 1]``.

    Each weight maps to ``(w - a + delta) / (2 delta)``, so the rescaled sum
    has mean ``k / 2`` and exceeding ``B`` means exceeding it by the factor
    ``1 + eps`` with ``eps = (B - E[W]) / (k delta)``.
    """
    k, E = stats.count, stats.expected_weight
    if k == 0 or delta == 0:
        return _indicator(E, B)
    if B >= E + k * delta:
        return 0.0
    if B <= E:
        return 1.0
    eps = (B - E) / (k * delta)
    log_bound = 0.5 * k * (eps - (1.0 + eps) * math.log1p(eps))
    return min(1.0, math.exp(log_bound))


def chernoff_simple_tail(stats: SolutionStats, delta: float, B: float) -> float:
    """The simplified Chernoff bound ``exp(-eps**2 * k * delta / 3)``.

    Uses ``E[sum] = k delta`` for the shifted weights ``W - a + delta``
    without rescaling them to ``[0, 1]``, as in the published feasibility
    condition ``B - E[W] >= sqrt(3 delta k ln(1/alpha))``.  At
    ``B = E[W] + k delta`` (``eps = 1``) the formula value is returned;
    beyond it the tail is zero.
    """
    k, E = stats.count, stats.expected_weight
    if k == 0 or delta == 0:
        return _indicator(E, B)
    if B > E + k * delta:
        return 0.0
    if B <= E:
        return 1.0
    eps = (B - E) / (k * delta)
    return min(1.0, math.exp(-eps * eps * k * delta / 3.0))


def chebyshev_tail(stats: SolutionStats, B: float) -> float:
    """One-sided Chebyshev (Cantelli) bound ``Var / (Var + lambda**2)``."""
    lam = B - stats.expected_weight
    if stats.variance == 0:
        return _indicator(stats.expected_weight, B)
    if lam <= 0:
        return 1.0
    return stats.variance / (stats.variance + lam * lam)


def exact_single_element_tail(a_v: float, delta: float, B: float) -> float:
    """Exact ``Pr[W(v) > B]`` for one ``U[a_v - delta, a_v + delta]`` weight."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if B >= a_v + delta:
        return 0.0
    if B < a_v - delta:
        return 1.0
    return (a_v + delta - B) / (2.0 * delta)


def tail_bound(stats: SolutionStats, delta: float, B: float, kind: SurrogateKind) -> float:
    """Raw bound for ``kind`` from summary statistics, clamped to ``[0, 1]``."""
    kind = SurrogateKind.parse(kind)
    if kind is SurrogateKind.CHERNOFF_EXP:
        value = chernoff_exp_tail(stats, delta, B)
    elif kind is SurrogateKind.CHERNOFF_SIMPLE:
        value = chernoff_simple_tail(stats, delta, B)
    elif kind is SurrogateKind.CHEBYSHEV:
        value = chebyshev_tail(stats, B)
    else:
        value = exact_tail(stats.count, stats.expected_weight, delta, B)
    return min(1.0, max(0.0, value))


def surrogate_tail(X: Iterable[int], model: WeightModel, cc: ChanceConstraint) -> SurrogateValue:
    """Evaluate the constraint's surrogate on the selection ``X``."""
    stats = solution_stats(X, model)
    if stats.count == 0:
        return SurrogateValue.of(0.0, cc.alpha)
    return SurrogateValue.of(tail_bound(stats, model.delta, cc.budget, cc.kind), cc.alpha)
