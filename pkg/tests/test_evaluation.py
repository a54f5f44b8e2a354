import numpy as np
import pytest
from hypothesis import given, strategies as st

from degcausal.discovery import MethodConfig
from degcausal.errors import ComparisonError, ConfigError, MetricError
from degcausal.evaluation import (SweepConfig, apply_level, derive_seed, exact_match_rate,
                                  run_benchmark, run_cell_replication, run_sweep, tally_outcomes,
                                  write_emr_csv, write_tallies_csv)
from degcausal.graph import CausalGraph, PairwiseOutcome
from degcausal.presets import dependent_system, independent_system, system_truth
from degcausal.simulate import simulate_system

X12 = CausalGraph.from_edges(2, directed=[(0, 1)])
UND = CausalGraph.from_edges(2, undirected=[(0, 1)])
EMPTY = CausalGraph.empty(2)


class TestEMR:
    def test_all_equal(self):
        assert exact_match_rate([X12] * 20, X12) == 1.0

    def test_half(self):
        assert exact_match_rate([X12] * 10 + [EMPTY] * 10, X12) == 0.5

    def test_undirected_never_matches_directed_truth(self):
        assert exact_match_rate([UND] * 20, X12) == 0.0

    def test_failed_runs_count_as_misses(self):
        assert exact_match_rate([X12, None], X12) == 0.5

    def test_empty(self):
        with pytest.raises(MetricError):
            exact_match_rate([], X12)

    def test_label_mismatch(self):
        with pytest.raises(ComparisonError):
            exact_match_rate([CausalGraph.empty(2, "ab")], EMPTY)


graph2 = st.tuples(st.integers(0, 1), st.integers(0, 1)).map(
    lambda t: CausalGraph(np.array([[0, t[0]], [t[1], 0]])))


@given(st.lists(graph2, min_size=1, max_size=60), graph2)
def test_emr_naive_recount(results, truth):
    hits = 0
    for g in results:
        same = True
        for i in range(2):
            for j in range(2):
                if int(g.adj[i, j]) != int(truth.adj[i, j]):
                    same = False
        hits += same
    assert exact_match_rate(results, truth) == hits / len(results)


@given(st.lists(graph2, min_size=1, max_size=60))
def test_tallies_sum_to_count(results):
    t = tally_outcomes(results)
    assert sum(t.values()) == len(results)
    assert t[PairwiseOutcome.OTHER] == 0


def test_derive_seed():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)
    assert 0 <= derive_seed(0) < 2 ** 63


class TestSweepLevels:
    def test_gamma_pairs_drift(self):
        spec = apply_level(independent_system(), "gamma", 1.5)
        assert [p.mu_a for p in spec.params] == [-0.0008, -0.001]
        assert all(p.gamma == 1.5 for p in spec.params)

    def test_beta_pairs_alpha(self):
        e = apply_level(dependent_system(), "beta", 1.8).edges[0]
        assert (e.alpha, e.beta) == (0.014, 1.8)

    def test_zero_random_effect(self):
        spec = apply_level(independent_system(), "v_a", 0.0)
        assert all(p.sigma_a == 0 for p in spec.params)
        spec = spec.replace(params=tuple(p.replace(sigma=0, sigma_eps=0, sigma_x0=0) for p in spec.params))
        x1 = simulate_system(spec, 3, 0).column("X1")
        assert np.allclose(np.diff(x1, axis=1), -0.04 * 20)

    def test_unknown_level(self):
        with pytest.raises(ConfigError):
            apply_level(dependent_system(), "beta", 0.3)

    def test_unknown_factor(self):
        with pytest.raises(ConfigError):
            SweepConfig("alpha", dependent_system())

    def test_default_levels(self):
        cfg = SweepConfig("sigma", dependent_system())
        assert cfg.levels == (0.0, 0.05, 0.1, 0.2, 0.4)


FAST = ("stable-pc", "ges", "notears-linear")


@pytest.fixture(scope="module")
def small_benchmark():
    spec = dependent_system()
    return run_benchmark(spec, system_truth(spec), FAST, ("S1", "S2"), (2, 4), N=4, seed=5)


def test_benchmark_shape(small_benchmark):
    assert len(small_benchmark.cells) == 3 * 2 * 2 * 4
    for key, rate in small_benchmark.emr.items():
        assert 0 <= rate <= 1
        assert sum(small_benchmark.tallies[key].values()) == 4


def test_cell_independence(small_benchmark):
    spec = dependent_system()
    target = small_benchmark.cells_for("ges", "S2", 4)[2]
    again = run_cell_replication(spec, system_truth(spec), ["ges"], ["S2"], 4, target.replication, 5,
                                 MethodConfig())
    assert again[0].graph == target.graph and again[0].seed == target.seed


def test_benchmark_reproducible(small_benchmark, tmp_path):
    spec = dependent_system()
    again = run_benchmark(spec, system_truth(spec), FAST, ("S1", "S2"), (2, 4), N=4, seed=5)
    for writer in (write_emr_csv, write_tallies_csv):
        writer(small_benchmark, tmp_path / "a.csv")
        writer(again, tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_parallel_matches_serial(small_benchmark):
    spec = dependent_system()
    par = run_benchmark(spec, system_truth(spec), FAST, ("S1", "S2"), (2, 4), N=4, seed=5, jobs=2)
    assert par.emr == small_benchmark.emr
    assert [c.graph for c in par.cells] == [c.graph for c in small_benchmark.cells]


def test_failures_recorded_not_raised():
    spec = dependent_system()
    # three measurements give two S2 rows, too few for LiNGAM
    res = run_benchmark(spec.replace(m=3), system_truth(spec), ["direct-lingam"], ["S2"], (1,), N=2)
    assert all(c.graph is None and c.error for c in res.cells)
    assert res.emr[(None, "direct-lingam", "S2", 1)] == 0.0


def test_sweep_keys_and_levels():
    cfg = SweepConfig("beta", dependent_system(), levels=(1.0, 1.8), n_range=(3,), N=2, methods=("ges",))
    res = run_sweep(cfg, seed=1)
    assert set(res.emr) == {(1.0, "ges", "S2", 3), (1.8, "ges", "S2", 3)}
    assert all(c.factor == "beta" for c in res.cells)
