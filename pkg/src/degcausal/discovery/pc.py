"""Order-independent PC search with Fisher-z conditional-independence tests."""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import TestInfeasibleError
from ..graph import CausalGraph, orient_cpdag
from ..stats import correlation_matrix, fisher_z_test, partial_correlation_from_corr
from .config import PCConfig
from .notears import _labels


def pc_skeleton(M, cfg: PCConfig = PCConfig()):
    """Skeleton adjacency and separating sets.

    Neighbourhoods are frozen at the start of every level, so removals made
    within a level cannot influence other tests of that level.  When several
    conditioning sets separate a pair, the one with the largest p-value is
    kept (ties broken by the sorted set), which makes the recorded sepsets,
    and hence the orientation, independent of the variable order.
    """
    x = np.asarray(getattr(M, "values", M), dtype=float)
    rows, k = x.shape
    if rows <= k + 3:
        raise TestInfeasibleError(f"stable-pc needs rows > k + 3 ({rows} <= {k + 3})")
    corr = correlation_matrix(x)
    adj = ~np.eye(k, dtype=bool)
    sepsets: dict[frozenset, frozenset] = {}
    level = 0
    while True:
        snap = adj.copy()
        tested = False
        for i, j in itertools.combinations(range(k), 2):
            if not snap[i, j]:
                continue
            pools = [np.flatnonzero(snap[i]), np.flatnonzero(snap[j])]
            candidates = set()
            for pool, other in zip(pools, (j, i)):
                pool = [int(v) for v in pool if v != other]
                if len(pool) >= level:
                    candidates.update(itertools.combinations(pool, level))
            if not candidates:
                continue
            tested = True
            best = None
            for S in sorted(candidates):
                r = partial_correlation_from_corr(corr, i, j, S)
                res = fisher_z_test(r, rows, level, cfg.alpha)
                if res.independent and (best is None or res.p_value > best[0]):
                    best = (res.p_value, S)
            if best is not None:
                adj[i, j] = adj[j, i] = False
                sepsets[frozenset((i, j))] = frozenset(best[1])
        if not tested:
            break
        level += 1
    return adj.astype(np.int8), sepsets


def stable_pc(M, cfg: PCConfig = PCConfig()) -> CausalGraph:
    """CPDAG estimated by Stable-PC; invariant to the column order of ``M``."""
    adj, sepsets = pc_skeleton(M, cfg)
    labels = _labels(M) or ()
    return orient_cpdag(CausalGraph(adj, labels), sepsets)
