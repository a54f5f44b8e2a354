import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats as sst

from degcausal.errors import DegenerateInputError, NumericalError, TestInfeasibleError
from degcausal.stats import (BICScore, bic_local_delta, correlation_matrix, fisher_z_test,
                             pairwise_lr, partial_correlation)


def rng(*key):
    return np.random.default_rng(list(key))


class TestPartialCorrelation:
    def test_copy_is_one(self):
        x = rng(1).standard_normal(50)
        assert partial_correlation(np.c_[x, x], 0, 1) == pytest.approx(1.0)

    def test_independent_columns(self):
        X = rng(2).standard_normal((10_000, 2))
        assert abs(partial_correlation(X, 0, 1)) < 0.05

    def test_conditioning_removes_shared_parent(self):
        r = rng(3)
        x = r.standard_normal(10_000)
        y = x + r.standard_normal(10_000)
        z = x.copy()
        assert abs(partial_correlation(np.c_[x, y, z], 1, 2, [0])) < 0.05

    def test_matches_residual_regression(self):
        r = rng(4)
        X = r.standard_normal((300, 4)) @ r.standard_normal((4, 4))
        S = X[:, 2:]
        D = np.c_[np.ones(300), S]
        res = [X[:, c] - D @ np.linalg.lstsq(D, X[:, c], rcond=None)[0] for c in (0, 1)]
        assert partial_correlation(X, 0, 1, [2, 3]) == pytest.approx(np.corrcoef(*res)[0, 1], abs=1e-10)

    @given(st.integers(0, 10_000), st.floats(0.01, 1e6), st.floats(-1e6, 1e6))
    def test_symmetric_and_affine_invariant(self, seed, scale, shift):
        r = rng(seed)
        X = r.standard_normal((60, 3)) @ r.standard_normal((3, 3))
        base = partial_correlation(X, 0, 1, [2])
        assert partial_correlation(X, 1, 0, [2]) == pytest.approx(base, abs=1e-9)
        Y = X.copy()
        Y[:, 0] = Y[:, 0] * scale + shift
        Y[:, 2] = -Y[:, 2] * scale
        assert partial_correlation(Y, 0, 1, [2]) == pytest.approx(base, abs=1e-7)

    def test_too_few_rows(self):
        with pytest.raises(TestInfeasibleError):
            partial_correlation(np.zeros((3, 3)) + np.arange(3), 0, 1, [2])

    def test_constant_column(self):
        X = np.c_[np.ones(20), np.arange(20.0)]
        with pytest.raises(DegenerateInputError):
            correlation_matrix(X)

    def test_collinear_conditioning_set(self):
        r = rng(5)
        a = r.standard_normal(40)
        X = np.c_[r.standard_normal((40, 2)), a, 2 * a]
        with pytest.raises(NumericalError):
            partial_correlation(X, 0, 1, [2, 3])


class TestFisherZ:
    def test_zero(self):
        res = fisher_z_test(0.0, 30, 0)
        assert res.statistic == 0 and res.p_value == 1 and res.independent

    def test_strong(self):
        res = fisher_z_test(0.5, 100, 0)
        assert res.statistic == pytest.approx(math.atanh(0.5) * math.sqrt(97))
        assert res.statistic == pytest.approx(5.41, abs=0.005)
        assert res.p_value < 1e-6 and not res.independent

    def test_weak(self):
        res = fisher_z_test(0.1, 50, 1)
        assert res.statistic == pytest.approx(math.atanh(0.1) * math.sqrt(46), rel=1e-12)
        assert res.statistic == pytest.approx(0.680, abs=1e-3)
        assert res.p_value == pytest.approx(0.496, abs=5e-4)
        assert res.p_value == pytest.approx(2 * sst.norm.sf(res.statistic), rel=1e-12)
        assert res.independent

    def test_infeasible(self):
        with pytest.raises(TestInfeasibleError):
            fisher_z_test(0.2, 5, 2)

    def test_perfect_correlation(self):
        assert fisher_z_test(1.0, 20, 0).p_value == 0.0

    @given(st.floats(-0.999, 0.999), st.floats(-0.999, 0.999), st.integers(10, 500), st.integers(0, 5))
    def test_monotone_in_abs_r(self, r1, r2, rows, s):
        lo, hi = sorted((abs(r1), abs(r2)))
        assert fisher_z_test(hi, rows, s).p_value <= fisher_z_test(lo, rows, s).p_value


class TestBIC:
    def test_no_change(self):
        X = rng(6).standard_normal((100, 3))
        assert bic_local_delta(X, 0, [1], [1]) == 0

    def test_true_parent_rewarded(self):
        r = rng(7)
        x = r.standard_normal(1000)
        y = 2 * x + 0.1 * r.standard_normal(1000)
        assert bic_local_delta(np.c_[x, y], 1, [], [0]) > 0

    def test_irrelevant_parent_penalised(self):
        neg = 0
        for seed in range(100):
            X = rng(8, seed).standard_normal((1000, 2))
            neg += bic_local_delta(X, 0, [], [1]) < 0
        assert neg >= 95

    @given(st.integers(0, 10_000))
    def test_telescopes(self, seed):
        r = rng(seed)
        X = r.standard_normal((200, 5)) @ r.standard_normal((5, 5))
        s = BICScore(X)
        total = s.delta(0, [], [1, 2, 3])
        assert s.delta(0, [], [1]) + s.delta(0, [1], [1, 2, 3]) == pytest.approx(total, abs=1e-8)

    def test_matches_ols_formula(self):
        r = rng(9)
        X = r.standard_normal((500, 3))
        X[:, 0] += X[:, 1] - 0.5 * X[:, 2]
        Z = (X - X.mean(0)) / X.std(0)
        D = Z[:, 1:]
        res = Z[:, 0] - D @ np.linalg.lstsq(D, Z[:, 0], rcond=None)[0]
        expected = -500 * math.log(np.mean(res ** 2)) - 2 * math.log(500)
        assert BICScore(X).local(0, [1, 2]) == pytest.approx(expected, rel=1e-10)


def distance_correlation(a, b):
    def centred(v):
        d = np.abs(v[:, None] - v[None, :])
        return d - d.mean(0) - d.mean(1)[:, None] + d.mean()
    A, B = centred(a), centred(b)
    return math.sqrt(max((A * B).mean(), 0) / math.sqrt((A * A).mean() * (B * B).mean()))


def residual_dependence(cause, effect):
    """Distance correlation between the regressor and the OLS residual."""
    c, e = cause - cause.mean(), effect - effect.mean()
    return distance_correlation(c, e - (c @ e / (c @ c)) * c)


@pytest.fixture(scope="module")
def uniform_pair():
    r = rng(10)
    x = r.uniform(-1, 1, 10_000)
    return np.c_[x, x + 0.3 * r.uniform(-1, 1, 10_000)]


class TestPairwiseLR:

    def test_direction_and_antisymmetry(self, uniform_pair):
        fwd = pairwise_lr(uniform_pair, 0, 1)
        assert fwd > 0
        assert pairwise_lr(uniform_pair, 1, 0) == pytest.approx(-fwd, abs=1e-12)

    def test_agrees_with_distance_correlation_oracle(self, uniform_pair):
        sub = uniform_pair[:2000]
        forward = residual_dependence(sub[:, 0], sub[:, 1])
        backward = residual_dependence(sub[:, 1], sub[:, 0])
        assert forward < backward
        assert np.sign(pairwise_lr(uniform_pair, 0, 1)) == np.sign(backward - forward)

    @pytest.mark.parametrize("seed", range(5))
    def test_oracle_agreement_random_mixtures(self, seed):
        r = rng(11, seed)
        x = r.exponential(size=3000) * r.choice([-1, 1], 3000)
        y = r.uniform(0.5, 1.5) * x + 0.5 * r.uniform(-1, 1, 3000)
        X = np.c_[x, y]
        sub = X[:1500]
        oracle = residual_dependence(sub[:, 1], sub[:, 0]) - residual_dependence(sub[:, 0], sub[:, 1])
        assert np.sign(pairwise_lr(X, 0, 1)) == np.sign(oracle)

    def test_identical_columns_near_zero(self):
        x = rng(12).standard_normal(5000)
        assert abs(pairwise_lr(np.c_[x, x], 0, 1)) < 1e-6

    def test_needs_rows(self):
        with pytest.raises(TestInfeasibleError):
            pairwise_lr(np.ones((5, 2)), 0, 1)
