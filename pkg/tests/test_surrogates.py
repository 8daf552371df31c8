import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccsubmod.surrogates import (
    ChanceConstraint,
    SurrogateKind,
    SurrogateValue,
    chebyshev_tail,
    chernoff_exp_tail,
    chernoff_simple_tail,
    exact_single_element_tail,
    surrogate_tail,
    tail_bound,
)
from ccsubmod.weights import SolutionStats, WeightModel, exact_tail_uniform_iid, solution_stats
from conftest import chernoff_exp_formula

BOUND_KINDS = [SurrogateKind.CHERNOFF_EXP, SurrogateKind.CHERNOFF_SIMPLE, SurrogateKind.CHEBYSHEV]


def iid_stats(k, delta, a=1.0):
    return solution_stats(range(k), WeightModel.uniform(max(k, 1), delta, a))


class TestChernoffExp:
    def test_example_value(self):
        # eps = (5 - 4) / (4 * 0.5) = 0.5; rescaled mean k/2 = 2
        expected = chernoff_exp_formula(0.5, 2)
        assert expected == pytest.approx(0.8054168380619393, rel=1e-14)
        assert chernoff_exp_tail(iid_stats(4, 0.5), 0.5, 5.0) == pytest.approx(expected, rel=1e-12)

    def test_example_dominates_true_tail(self):
        rng = np.random.default_rng(3)
        w = rng.uniform(0.5, 1.5, size=(10**6, 4)).sum(axis=1)
        assert np.mean(w > 5.0) <= chernoff_exp_tail(iid_stats(4, 0.5), 0.5, 5.0)
        assert exact_tail_uniform_iid(4, 1.0, 0.5, 5.0) <= chernoff_exp_tail(iid_stats(4, 0.5), 0.5, 5.0)

    def test_beyond_support_is_zero(self):
        assert chernoff_exp_tail(iid_stats(4, 0.5), 0.5, 6.0) == 0.0
        assert chernoff_exp_tail(iid_stats(4, 0.5), 0.5, 7.0) == 0.0

    def test_at_mean_is_one(self):
        assert chernoff_exp_tail(iid_stats(4, 0.5), 0.5, 4.0) == 1.0

    def test_below_mean_is_one(self):
        assert chernoff_exp_tail(iid_stats(4, 0.5), 0.5, 3.0) == 1.0

    def test_delta_zero_indicator(self):
        assert chernoff_exp_tail(iid_stats(4, 0.0), 0.0, 4.0) == 0.0
        assert chernoff_exp_tail(iid_stats(4, 0.0), 0.0, 3.9) == 1.0


class TestChernoffSimple:
    def test_example_value(self):
        assert chernoff_simple_tail(iid_stats(4, 0.5), 0.5, 5.0) == pytest.approx(math.exp(-1 / 6), rel=1e-12)
        assert math.exp(-1 / 6) == pytest.approx(0.8464817248906141)
        assert exact_tail_uniform_iid(4, 1.0, 0.5, 5.0) <= math.exp(-1 / 6)

    def test_eps_one_boundary(self):
        k, d = 6, 0.4
        B = k + k * d
        assert chernoff_simple_tail(iid_stats(k, d), d, B) == pytest.approx(math.exp(-k * d / 3))

    def test_support_branch(self):
        # B - E = 15 exceeds k * delta = 12.5: no realisation can exceed B
        assert chernoff_simple_tail(iid_stats(25, 0.5), 0.5, 40.0) == 0.0

    def test_support_branch_heterogeneous(self):
        m = WeightModel([1.0, 3.0, 5.0], 0.5)
        s = solution_stats([0, 1, 2], m)
        assert chernoff_simple_tail(s, 0.5, 10.6) == 0.0
        assert chernoff_simple_tail(s, 0.5, 10.4) > 0.0


class TestChebyshev:
    def test_example(self):
        assert chebyshev_tail(SolutionStats(3, 1.2, 0.36), 3.0) == pytest.approx(0.1, abs=1e-15)

    def test_symmetric(self):
        assert chebyshev_tail(SolutionStats(3, 1.0, 1.0), 2.0) == 0.5

    def test_decreasing_to_zero(self):
        vals = [chebyshev_tail(SolutionStats(3, 1.0, 1.0), 1.0 + lam) for lam in (1, 10, 100, 1e4)]
        assert all(x > y for x, y in zip(vals, vals[1:]))
        assert vals[-1] < 1e-7

    def test_non_positive_lambda(self):
        assert chebyshev_tail(SolutionStats(3, 3.0, 1.0), 3.0) == 1.0
        assert chebyshev_tail(SolutionStats(3, 3.0, 1.0), 2.0) == 1.0

    def test_zero_variance(self):
        assert chebyshev_tail(SolutionStats(3, 3.0, 0.0), 3.0) == 0.0
        assert chebyshev_tail(SolutionStats(3, 3.0, 0.0), 2.9) == 1.0


class TestSingleElement:
    @pytest.mark.parametrize("B, expected", [(1.2, 0.3), (1.5, 0.0), (2.0, 0.0), (0.4, 1.0)])
    def test_uniform_cdf(self, B, expected):
        assert exact_single_element_tail(1.0, 0.5, B) == pytest.approx(expected)

    def test_matches_precondition_formula(self):
        a_max, d, B = 6.0, 0.5, 6.2
        assert exact_single_element_tail(a_max, d, B) == pytest.approx((a_max + d - B) / (2 * d))

    def test_matches_exact_tail_k1(self):
        for B in np.linspace(0.4, 1.6, 13):
            assert exact_single_element_tail(1.0, 0.5, B) == pytest.approx(exact_tail_uniform_iid(1, 1.0, 0.5, B))


class TestSurrogateTail:
    @pytest.mark.parametrize("kind", list(SurrogateKind))
    def test_empty_set(self, kind):
        sv = surrogate_tail([], WeightModel.uniform(3, 0.5), ChanceConstraint(1.0, 0.1, kind))
        assert sv == SurrogateValue(0.0, True)

    def test_chebyshev_example(self):
        # Var = 3 * 0.6^2 / 3 = 0.36, B - E = 1.8
        m = WeightModel.uniform(4, 0.6)
        cc = ChanceConstraint(4.8, 0.1, "chebyshev")
        sv = surrogate_tail([0, 1, 2], m, cc)
        assert sv.bound == pytest.approx(0.1, abs=1e-12)
        assert sv.feasible == (sv.bound <= cc.alpha)
        inside = surrogate_tail([0, 1, 2], m, ChanceConstraint(4.8 + 1e-9, 0.1, "chebyshev"))
        assert inside.feasible

    def test_exact_kind_allows_shared_width_heterogeneous(self):
        m = WeightModel([1.0, 2.0], 0.5)
        sv = surrogate_tail([0, 1], m, ChanceConstraint(3.5, 0.5, "exact"))
        assert sv.bound == pytest.approx(0.125)

    def test_invalid_id(self):
        with pytest.raises(IndexError):
            surrogate_tail([5], WeightModel.uniform(3, 0.5), ChanceConstraint(1.0, 0.1))

    def test_kind_parsing(self):
        assert SurrogateKind.parse("Chernoff_Simple") is SurrogateKind.CHERNOFF_SIMPLE
        assert SurrogateKind.parse("exact-irwin-hall") is SurrogateKind.EXACT
        with pytest.raises(ValueError, match="unknown surrogate"):
            SurrogateKind.parse("hoeffding")

    @pytest.mark.parametrize("budget, alpha", [(0, 0.1), (-1, 0.1), (1, 0), (1, 1)])
    def test_constraint_validation(self, budget, alpha):
        with pytest.raises(ValueError):
            ChanceConstraint(budget, alpha)


def test_dominance_where_simplified_bound_is_conservative():
    # exp(-eps^2 k delta / 3) >= exp(-eps^2 k / 6) >= Chernoff-exp exactly when delta <= 1/2
    for d in np.arange(0.05, 0.5001, 0.05):
        for k in range(1, 21):
            for frac in np.linspace(0, 1, 21):
                B = k + frac * k * d
                s = iid_stats(k, d)
                assert chernoff_exp_tail(s, d, B) <= chernoff_simple_tail(s, d, B) + 1e-15


def test_dominance_fails_for_wide_weights():
    s = iid_stats(10, 1.0)
    assert chernoff_exp_tail(s, 1.0, 15.0) > chernoff_simple_tail(s, 1.0, 15.0)


@settings(max_examples=200, deadline=None)
@given(
    k=st.integers(1, 20),
    delta=st.floats(0.05, 1.0),
    frac=st.floats(0, 1.2),
    a=st.sampled_from([1.0, 1.5, 2.0]),
)
def test_soundness_random(k, delta, frac, a):
    B = k * a + frac * k * delta
    exact = exact_tail_uniform_iid(k, a, delta, B)
    s = iid_stats(k, delta, a)
    for kind in BOUND_KINDS:
        assert tail_bound(s, delta, B, kind) >= exact - 1e-9


@settings(max_examples=150, deadline=None)
@given(
    k=st.integers(1, 30),
    d1=st.floats(0.01, 1.0),
    d2=st.floats(0.01, 1.0),
    f1=st.floats(0, 1.5),
    f2=st.floats(0, 1.5),
)
def test_monotone_in_budget_and_delta(k, d1, d2, f1, f2):
    dlo, dhi = sorted((d1, d2))
    Blo, Bhi = sorted((k + f1 * k * 0.5, k + f2 * k * 0.5))
    for kind in BOUND_KINDS:
        s_lo, s_hi = iid_stats(k, dlo), iid_stats(k, dhi)
        assert tail_bound(s_lo, dlo, Bhi, kind) <= tail_bound(s_lo, dlo, Blo, kind) + 1e-15
        assert tail_bound(s_lo, dlo, Bhi, kind) <= tail_bound(s_hi, dhi, Bhi, kind) + 1e-15


@settings(max_examples=150, deadline=None)
@given(k=st.integers(1, 40), delta=st.floats(0.01, 1.0), B=st.floats(1, 60))
def test_monotone_in_item_count(k, delta, B):
    for kind in BOUND_KINDS:
        a = tail_bound(iid_stats(k, delta), delta, B, kind)
        b = tail_bound(iid_stats(k + 1, delta), delta, B, kind)
        assert a <= b + 1e-15


@settings(max_examples=150, deadline=None)
@given(
    a=st.lists(st.floats(1.0, 10.0), min_size=1, max_size=12),
    delta=st.floats(0, 1.0),
    B=st.floats(0.1, 150),
    alpha=st.floats(1e-4, 0.99),
    kind=st.sampled_from(list(SurrogateKind)),
)
def test_clamped_and_flag_consistent(a, delta, B, alpha, kind):
    m = WeightModel(a, delta)
    sv = surrogate_tail(range(len(a)), m, ChanceConstraint(B, alpha, kind))
    assert 0.0 <= sv.bound <= 1.0
    assert sv.feasible == (sv.bound <= alpha)
