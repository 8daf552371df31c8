"""Stochastic weight models for chance-constrained selection.

Every element ``s`` carries a random weight drawn uniformly from
``[a(s) - delta, a(s) + delta]``; the dispersion ``delta`` is shared by all
elements.  This module holds the model itself, summary statistics of a
selection, an exact tail probability based on the Irwin-Hall distribution,
and samplers used for Monte Carlo validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

#: Largest item count accepted by the exact Irwin-Hall evaluation.
IRWIN_HALL_MAX_K = 40


class ExactTailUnavailable(ValueError):
    """Raised when the exact tail cannot be evaluated for the given size."""


@dataclass(frozen=True)
class WeightModel:
    """Independent uniform weights ``W(s) ~ U[a(s) - delta, a(s) + delta]``.

    Parameters
    ----------
    expected : sequence of float
        Expected weight ``a(s)`` of every element, indexed by element id.
    delta : float or sequence of float
        Shared dispersion.  A sequence is accepted only if all entries are
        equal; per-element dispersions are not supported.
    """

    expected: np.ndarray
    delta: float

    def __init__(self, expected: Sequence[float], delta: float | Sequence[float]):
        arr = np.array(expected, dtype=float).reshape(-1)
        if arr.size and not np.all(arr > 0):
            raise ValueError("expected weights must be strictly positive")
        if np.ndim(delta) > 0:
            ds = np.unique(np.asarray(delta, dtype=float))
            if ds.size > 1:
                raise ValueError(
                    "heterogeneous dispersions are not supported; "
                    "all elements must share one delta"
                )
            delta = float(ds[0]) if ds.size else 0.0
        delta = float(delta)
        if not math.isfinite(delta) or delta < 0:
            raise ValueError(f"delta must be a finite non-negative number, got {delta}")
        if arr.size and delta > arr.min():
            raise ValueError(
                f"delta={delta} exceeds the smallest expected weight {arr.min()}; "
                "weights would become negative"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "expected", arr)
        object.__setattr__(self, "delta", delta)

    @classmethod
    def uniform(cls, n: int, delta: float, a: float = 1.0) -> "WeightModel":
        return cls(np.full(n, float(a)), delta)

    @property
    def n(self) -> int:
        return int(self.expected.size)

    @property
    def a_max(self) -> float:
        return float(self.expected.max()) if self.n else 0.0

    def is_iid(self) -> bool:
        return self.n == 0 or bool(np.all(self.expected == self.expected[0]))

    def with_delta(self, delta: float) -> "WeightModel":
        return WeightModel(self.expected, delta)

    def check_ids(self, X: Iterable[int]) -> list[int]:
        ids = [int(x) for x in X]
        for x in ids:
            if x < 0 or x >= self.n:
                raise IndexError(f"invalid element id {x} for a ground set of size {self.n}")
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate element ids in {ids}")
        return ids


@dataclass(frozen=True)
class SolutionStats:
    count: int
    expected_weight: float
    variance: float


def solution_stats(X: Iterable[int], model: WeightModel) -> SolutionStats:
    """Item count, expected total weight and variance ``k * delta**2 / 3``."""
    ids = model.check_ids(X)
    k = len(ids)
    expected = math.fsum(model.expected[i] for i in ids)
    return SolutionStats(k, expected, k * model.delta**2 / 3.0)


def sample_total_weight(X: Iterable[int], model: WeightModel, rng: np.random.Generator) -> float:
    """Draw one realisation of ``W(X)``."""
    return float(sample_total_weights(X, model, rng, 1)[0])


def sample_total_weights(
    X: Iterable[int],
    model: WeightModel,
    rng: np.random.Generator,
    size: int,
    chunk: int = 1 << 22,
) -> np.ndarray:
    """Draw ``size`` independent realisations of ``W(X)`` as a float array.

    Draws are generated in chunks of at most ``chunk`` uniforms so memory
    stays bounded for large selections.  The stream consumed from ``rng``
    depends only on ``size`` and ``|X|``.
    """
    ids = model.check_ids(X)
    k = len(ids)
    out = np.zeros(size, dtype=float)
    if k == 0 or size == 0:
        return out
    a = model.expected[ids]
    d = model.delta
    if d == 0:
        out[:] = math.fsum(a)
        return out
    rows = max(1, chunk // k)
    for start in range(0, size, rows):
        stop = min(size, start + rows)
        u = rng.uniform(-d, d, size=(stop - start, k))
        out[start:stop] = (u + a).sum(axis=1)
    return out


def irwin_hall_cdf(k: int, x: float | Fraction) -> Fraction:
    """Exact CDF of the sum of ``k`` independent U[0,1] variables at ``x``.

    ``x`` is converted to an exact rational and the alternating sum is
    accumulated over integers, so the result is exact; callers round it.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    x = Fraction(x)
    if k == 0:
        return Fraction(1) if x >= 0 else Fraction(0)
    if x <= 0:
        return Fraction(0)
    if x >= k:
        return Fraction(1)
    p, q = x.numerator, x.denominator
    total = 0
    for j in range(p // q + 1):
        term = math.comb(k, j) * (p - j * q) ** k
        total += -term if j & 1 else term
    return Fraction(total, q**k * math.factorial(k))


def exact_tail(k: int, expected_total: float, delta: float, B: float) -> float:
    """``Pr[W(X) > B]`` for ``k`` independent uniforms of common width ``2 delta``.

    The expected weights may differ between items: since all widths agree,
    ``W(X) = E[W(X)] - k delta + 2 delta * IH_k`` with ``IH_k`` Irwin-Hall.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if k == 0 or delta == 0:
        return 1.0 if expected_total > B else 0.0
    if B >= expected_total + k * delta:
        return 0.0
    if B < expected_total - k * delta:
        return 1.0
    if k > IRWIN_HALL_MAX_K:
        raise ExactTailUnavailable(
            f"exact Irwin-Hall tail is limited to k <= {IRWIN_HALL_MAX_K} (got k={k}); "
            "use the Monte Carlo validator (harness.validate_solution) instead"
        )
    d = Fraction(delta)
    x = (Fraction(B) - Fraction(expected_total) + k * d) / (2 * d)
    tail = 1 - irwin_hall_cdf(k, x)
    return min(1.0, max(0.0, float(tail)))


def exact_tail_uniform_iid(k: int, a: float, delta: float, B: float) -> float:
    """Exact ``Pr[W(X) > B]`` for ``k`` i.i.d. ``U[a - delta, a + delta]`` weights."""
    return exact_tail(k, k * Fraction(a), delta, B)
