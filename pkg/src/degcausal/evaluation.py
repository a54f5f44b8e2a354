"""Exact-match metrics and the seeded benchmark / sensitivity-sweep engine.

Every cell of an experiment gets its seeds from its coordinates alone, so
any cell can be recomputed in isolation and cells can run in any order or in
parallel without changing the results.
"""
from __future__ import annotations

import csv
import time
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .discovery import METHODS, MethodConfig, discover
from .errors import ConfigError, MetricError
from .graph import CausalGraph, PairwiseOutcome, classify_pairwise, graphs_equal
from .presets import BETA_ALPHAS, GAMMA_DRIFTS, SIGMA_EPS_LEVELS, SIGMA_LEVELS, V_A_LEVELS, lookup_level
from .simulate import SystemSpec, simulate_system
from .strategy import STRATEGIES

FACTORS: tuple[str, ...] = ("beta", "gamma", "v_a", "sigma_eps", "sigma")
DEFAULT_LEVELS = {
    "beta": tuple(BETA_ALPHAS),
    "gamma": tuple(GAMMA_DRIFTS),
    "v_a": V_A_LEVELS,
    "sigma_eps": SIGMA_EPS_LEVELS,
    "sigma": SIGMA_LEVELS,
}


def exact_match_rate(results: Sequence[CausalGraph | None], truth: CausalGraph) -> float:
    """Fraction of ``results`` equal to ``truth``; ``None`` entries (failed runs) never match."""
    if len(results) == 0:
        raise MetricError("exact match rate of an empty result list")
    hits = sum(1 for g in results if g is not None and graphs_equal(g, truth))
    return hits / len(results)


def tally_outcomes(results: Sequence[CausalGraph]) -> dict[PairwiseOutcome, int]:
    """Counts of each pairwise outcome over two-variable graphs."""
    counts = Counter(classify_pairwise(g) for g in results)
    return {o: counts.get(o, 0) for o in PairwiseOutcome}


def derive_seed(*coords: int) -> int:
    """Deterministic 63-bit seed from integer coordinates."""
    state = np.random.SeedSequence([int(c) for c in coords]).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1])) & ((1 << 63) - 1)


@dataclass(frozen=True)
class BenchmarkCell:
    method: str
    strategy: str
    n: int
    replication: int
    seed: int
    graph: CausalGraph | None
    seconds: float
    error: str | None = None
    match: bool = False
    factor: str = ""
    level: float | None = None

    @property
    def outcome(self) -> str:
        if self.graph is None:
            return "error"
        if self.graph.k == 2:
            return classify_pairwise(self.graph).value
        return "match" if self.match else "mismatch"


@dataclass
class BenchmarkResult:
    cells: list[BenchmarkCell]
    emr: dict[tuple, float] = field(default_factory=dict)
    tallies: dict[tuple, dict[str, int]] = field(default_factory=dict)

    def cells_for(self, method: str, strategy: str, n: int, level=None) -> list[BenchmarkCell]:
        return [c for c in self.cells if c.method == method and c.strategy == strategy
                and c.n == n and (level is None or c.level == level)]


def _method_seed(seed: int, r: int, n: int, method: str, strategy: str) -> int:
    return derive_seed(seed, r, n, METHODS.index(method), STRATEGIES.index(strategy))


def run_cell_replication(spec: SystemSpec, truth: CausalGraph, methods, strategies, n: int, r: int,
                         seed: int, cfg: MethodConfig, factor: str = "",
                         level: float | None = None) -> list[BenchmarkCell]:
    """Simulate replication ``r`` at sample size ``n`` and run every (method, strategy)."""
    data_seed = derive_seed(seed, r, n)
    d = simulate_system(spec, n, data_seed)
    cells = []
    for method in methods:
        for strategy in strategies:
            mseed = _method_seed(seed, r, n, method, strategy)
            t0 = time.perf_counter()
            graph, err = None, None
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    graph = discover(method, d, cfg, seed=mseed, strategy=strategy)
            except Exception as exc:  # recorded, counts as a non-match
                err = f"{type(exc).__name__}: {exc}"
            secs = time.perf_counter() - t0
            match = graph is not None and graphs_equal(graph, truth)
            cells.append(BenchmarkCell(method, strategy, n, r, mseed, graph, secs, err, match, factor, level))
    return cells


def _run_job(args):
    return run_cell_replication(*args)


def _execute(jobs_args: list, jobs: int) -> list[BenchmarkCell]:
    if jobs <= 1 or len(jobs_args) <= 1:
        out = [_run_job(a) for a in jobs_args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            out = list(pool.map(_run_job, jobs_args))
    return [c for chunk in out for c in chunk]


def _validate(methods, strategies, n_range, N):
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; choose from {list(METHODS)}")
    for s in strategies:
        if s not in STRATEGIES:
            raise ConfigError(f"unknown strategy {s!r}; choose from {list(STRATEGIES)}")
    if not n_range or min(n_range) < 1:
        raise ConfigError("n_range must contain positive unit counts")
    if N < 1:
        raise ConfigError("number of replications must be >= 1")


def _aggregate(cells: list[BenchmarkCell], truth: CausalGraph) -> BenchmarkResult:
    cells = sorted(cells, key=lambda c: (c.level if c.level is not None else 0.0, METHODS.index(c.method),
                                         STRATEGIES.index(c.strategy), c.n, c.replication))
    groups: dict[tuple, list[BenchmarkCell]] = {}
    for c in cells:
        groups.setdefault((c.level, c.method, c.strategy, c.n), []).append(c)
    res = BenchmarkResult(cells)
    for key, group in groups.items():
        res.emr[key] = exact_match_rate([c.graph for c in group], truth)
        res.tallies[key] = dict(Counter(c.outcome for c in group))
    return res


def run_benchmark(spec: SystemSpec, truth: CausalGraph, methods=METHODS[:5], strategies=STRATEGIES,
                  n_range=range(1, 11), N: int = 20, seed: int = 0, cfg: MethodConfig | None = None,
                  jobs: int = 1) -> BenchmarkResult:
    """EMR and outcome tallies per ``(None, method, strategy, n)`` over ``N`` replications.

    One dataset is simulated per ``(replication, n)`` with seed derived from
    ``(seed, replication, n)`` and shared by all methods and strategies.
    """
    methods, strategies, n_range = tuple(methods), tuple(strategies), tuple(n_range)
    _validate(methods, strategies, n_range, N)
    cfg = cfg or MethodConfig()
    args = [(spec, truth, methods, strategies, n, r, seed, cfg)
            for n in n_range for r in range(N)]
    return _aggregate(_execute(args, jobs), truth)


@dataclass(frozen=True)
class SweepConfig:
    factor: str
    base: SystemSpec
    levels: tuple[float, ...] = ()
    n_range: tuple[int, ...] = tuple(range(1, 11))
    N: int = 20
    methods: tuple[str, ...] = METHODS[:5]
    strategies: tuple[str, ...] = ("S2",)

    def __post_init__(self):
        if self.factor not in FACTORS:
            raise ConfigError(f"unknown sweep factor {self.factor!r}; choose from {list(FACTORS)}")
        levels = tuple(float(v) for v in (self.levels or DEFAULT_LEVELS[self.factor]))
        if not levels:
            raise ConfigError("sweep needs at least one level")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "n_range", tuple(int(n) for n in self.n_range))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "strategies", tuple(self.strategies))
        _validate(self.methods, self.strategies, self.n_range, self.N)
        for lv in levels:
            apply_level(self.base, self.factor, lv)  # fail early on bad levels


def apply_level(base: SystemSpec, factor: str, level: float) -> SystemSpec:
    """Substitute one factor level into ``base`` with its paired settings.

    ``gamma`` also sets the drifts of the two paths; ``beta`` also sets the
    coupling scale ``alpha`` of every edge.
    """
    if factor == "gamma":
        drifts = lookup_level(GAMMA_DRIFTS, level, "gamma")
        if base.k != len(drifts):
            raise ConfigError(f"gamma sweep pairs drifts for {len(drifts)} paths, system has {base.k}")
        params = tuple(p.replace(gamma=level, mu_a=mu) for p, mu in zip(base.params, drifts))
        return base.replace(params=params)
    if factor == "beta":
        if not base.edges:
            raise ConfigError("beta sweep needs a system with causal edges")
        alpha = lookup_level(BETA_ALPHAS, level, "beta")
        edges = tuple(type(e)(e.parent, e.child, alpha, level) for e in base.edges)
        return base.replace(edges=edges)
    if factor in ("v_a", "sigma_eps", "sigma"):
        if level < 0:
            raise ConfigError(f"{factor} level must be >= 0, got {level}")
        return base.replace(params=tuple(p.replace(**{factor: level}) for p in base.params))
    raise ConfigError(f"unknown sweep factor {factor!r}; choose from {list(FACTORS)}")


def run_sweep(cfg: SweepConfig, seed: int = 0, method_cfg: MethodConfig | None = None,
              jobs: int = 1) -> BenchmarkResult:
    """One benchmark per level; EMR keyed by ``(level, method, strategy, n)``."""
    method_cfg = method_cfg or MethodConfig()
    truth = CausalGraph(cfg.base.truth_adjacency(), cfg.base.labels)
    args = []
    for li, level in enumerate(cfg.levels):
        spec = apply_level(cfg.base, cfg.factor, level)
        lseed = derive_seed(seed, li)
        args += [(spec, truth, cfg.methods, cfg.strategies, n, r, lseed, method_cfg, cfg.factor, level)
                 for n in cfg.n_range for r in range(cfg.N)]
    return _aggregate(_execute(args, jobs), truth)


# -- tidy CSV output --------------------------------------------------------

def _fmt_level(level) -> str:
    return "" if level is None else repr(float(level))


def write_results_csv(cells: Sequence[BenchmarkCell], path: str | Path, timings: bool = False) -> None:
    """One row per cell.  ``timings`` adds wall-clock seconds, which are not reproducible."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["factor", "level", "method", "strategy", "n", "replication", "outcome", "match"]
        w.writerow(header + ["seconds"] if timings else header)
        for c in cells:
            row = [c.factor, _fmt_level(c.level), c.method, c.strategy, c.n, c.replication,
                   c.outcome, int(c.match)]
            w.writerow(row + [f"{c.seconds:.4f}"] if timings else row)


def write_emr_csv(result: BenchmarkResult, path: str | Path, factor: str = "") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["factor", "level", "method", "strategy", "n", "replications", "emr"])
        for (level, method, strategy, n), rate in result.emr.items():
            count = sum(result.tallies[(level, method, strategy, n)].values())
            w.writerow([factor, _fmt_level(level), method, strategy, n, count, repr(rate)])


def write_tallies_csv(result: BenchmarkResult, path: str | Path, factor: str = "") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["factor", "level", "method", "strategy", "n", "outcome", "count"])
        for (level, method, strategy, n), tally in result.tallies.items():
            for outcome in sorted(tally):
                w.writerow([factor, _fmt_level(level), method, strategy, n, outcome, tally[outcome]])


def write_errors_csv(cells: Sequence[BenchmarkCell], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["factor", "level", "method", "strategy", "n", "replication", "error"])
        for c in cells:
            if c.error is not None:
                w.writerow([c.factor, _fmt_level(c.level), c.method, c.strategy, c.n, c.replication, c.error])


__all__ = [
    "FACTORS", "DEFAULT_LEVELS", "exact_match_rate", "tally_outcomes", "derive_seed", "BenchmarkCell",
    "BenchmarkResult", "run_cell_replication", "run_benchmark", "SweepConfig", "apply_level", "run_sweep",
    "write_results_csv", "write_emr_csv", "write_tallies_csv", "write_errors_csv",
]
