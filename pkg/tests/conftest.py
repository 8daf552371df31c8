import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest
import sympy

from ccsubmod.objectives import CoverageInstance, random_coverage

_t = sympy.Symbol("t")


@lru_cache(maxsize=None)
def _ih_density_pieces(k):
    """Density of the sum of k U[0,1] as one polynomial per unit interval.

    Built by repeated convolution f_k(x) = int_{x-1}^{x} f_{k-1}(t) dt,
    independent of the alternating-sum formula under test.
    """
    if k == 1:
        return (sympy.Integer(1),)
    prev = _ih_density_pieces(k - 1)
    x = sympy.Symbol("x")
    pieces = []
    for j in range(k):
        expr = 0
        if j - 1 >= 0:
            expr += sympy.integrate(prev[j - 1], (_t, x - 1, j))
        if j < k - 1:
            expr += sympy.integrate(prev[j], (_t, j, x))
        pieces.append(sympy.expand(expr.subs(x, _t)))
    return tuple(pieces)


def irwin_hall_tail_oracle(k, x):
    """Pr[IH_k > x] by exact integration of the convolved density."""
    x = sympy.Rational(Fraction(x))
    if x <= 0:
        return 1.0
    if x >= k:
        return 0.0
    total = 0
    for j, p in enumerate(_ih_density_pieces(k)):
        lo = max(sympy.Integer(j), x)
        hi = sympy.Integer(j + 1)
        if lo < hi:
            total += sympy.integrate(p, (_t, lo, hi))
    return float(total)


def uniform_tail_oracle(k, a, delta, B):
    if delta == 0:
        return 1.0 if k * a > B else 0.0
    return irwin_hall_tail_oracle(k, (Fraction(B) - k * Fraction(a) + k * Fraction(delta)) / (2 * Fraction(delta)))


def deterministic_cardinality_greedy(inst: CoverageInstance, k: int):
    """Plain greedy max coverage with k picks, ties to the lowest id."""
    chosen, covered = [], set()
    for _ in range(min(k, inst.n)):
        best, best_gain = None, -1
        for v in range(inst.n):
            if v in chosen:
                continue
            g = len(set(inst.covers[v]) - covered)
            if g > best_gain:
                best, best_gain = v, g
        chosen.append(best)
        covered |= set(inst.covers[best])
    return chosen


def enumerate_best(values_fn, n, feasible_fn):
    best, best_val = (), values_fn(())
    for mask in range(1, 1 << n):
        X = tuple(i for i in range(n) if mask >> i & 1)
        if feasible_fn(X):
            val = values_fn(X)
            if val > best_val:
                best, best_val = X, val
    return best, best_val


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def disjoint_instance():
    # 30 elements, each covering its own 3 indices; all gains positive and equal
    return CoverageInstance(90, tuple(tuple(range(3 * i, 3 * i + 3)) for i in range(30)))


@pytest.fixture
def random_instance(rng):
    return random_coverage(12, 30, rng, density=0.2)


def abundant_instance(n, seed=0):
    """Instance with ``n`` elements and strictly positive gains until all are chosen."""
    rng = np.random.default_rng(seed)
    covers = []
    for i in range(n):
        own = [i]
        extra = rng.choice(n, size=3, replace=False) + n
        covers.append(tuple(sorted(own + extra.tolist())))
    return CoverageInstance(2 * n, tuple(covers))


def chernoff_exp_formula(eps, mean):
    return (math.exp(eps) / (1 + eps) ** (1 + eps)) ** mean


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if rep.when == "call" and "criterion" in props:
                lines.append((props["criterion"], "PASS" if rep.passed else "FAIL", props.get("title", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for num, verdict, title in sorted(lines):
        terminalreporter.write_line(f"criterion {num:>2}: {verdict}  {title}")
