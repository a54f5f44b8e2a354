"""Greedy equivalence search with the decomposable Gaussian BIC score.

The state is a CPDAG.  Insert and delete operators and their validity
conditions follow Chickering's formulation; after each move the PDAG is
completed again via a consistent extension.
"""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import GraphStructureError, NumericalError, TestInfeasibleError
from ..graph import CausalGraph, cpdag_from_dag, dag_extension
from ..stats import BICScore
from .config import GESConfig
from .notears import _labels


def _undirected_nbrs(a, y):
    return {int(v) for v in np.flatnonzero(a[y] & a[:, y])}


def _parents(a, y):
    return {int(v) for v in np.flatnonzero(a[:, y] & (1 - a[y]))}


def _adjacent(a, x, y):
    return bool(a[x, y] or a[y, x])


def _is_clique(a, nodes) -> bool:
    return all(_adjacent(a, u, v) for u, v in itertools.combinations(nodes, 2))


def _semi_directed_path_blocked(a, src, dst, blocked) -> bool:
    """True when every semi-directed path ``src ~> dst`` meets ``blocked``."""
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(a[u]):  # u -> v or u - v
            v = int(v)
            if v == dst:
                return False
            if v in seen or v in blocked:
                continue
            seen.add(v)
            stack.append(v)
    return True


def _subsets(items):
    items = sorted(items)
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


class _Search:
    def __init__(self, score: BICScore):
        self.score = score

    def local(self, child, parents):
        try:
            return self.score.local(child, parents)
        except NumericalError as exc:
            raise NumericalError(f"{exc} (child={child}, parents={sorted(parents)})") from None

    def best_insert(self, a):
        best = (0.0, None)
        k = a.shape[0]
        for x, y in itertools.permutations(range(k), 2):
            if _adjacent(a, x, y):
                continue
            ny = _undirected_nbrs(a, y)
            na = {v for v in ny if _adjacent(a, v, x)}
            pa = _parents(a, y)
            for T in _subsets(ny - na - {x}):
                cond = na | set(T)
                if not _is_clique(a, cond):
                    continue
                if not _semi_directed_path_blocked(a, y, x, cond):
                    continue
                delta = self.local(y, cond | pa | {x}) - self.local(y, cond | pa)
                if delta > best[0]:
                    best = (delta, ("insert", x, y, T))
        return best

    def best_delete(self, a):
        best = (0.0, None)
        k = a.shape[0]
        for x, y in itertools.permutations(range(k), 2):
            if not a[x, y]:
                continue  # need x -> y or x - y
            ny = _undirected_nbrs(a, y)
            na = {v for v in ny if _adjacent(a, v, x)} - {x}
            pa = _parents(a, y) - {x}
            for H in _subsets(na):
                rest = na - set(H)
                if not _is_clique(a, rest):
                    continue
                delta = self.local(y, rest | pa) - self.local(y, rest | pa | {x})
                if delta > best[0]:
                    best = (delta, ("delete", x, y, H))
        return best


def _apply(a, move):
    kind, x, y, S = move
    a = a.copy()
    if kind == "insert":
        a[x, y], a[y, x] = 1, 0
        for t in S:
            a[t, y], a[y, t] = 1, 0
    else:
        a[x, y] = a[y, x] = 0
        for h in S:
            a[y, h], a[h, y] = 1, 0
            if a[x, h] and a[h, x]:
                a[h, x] = 0
    dag = dag_extension(a)
    if dag is None:
        raise GraphStructureError(f"GES move {move} produced a PDAG without consistent extension")
    return cpdag_from_dag(CausalGraph(dag)).adj.copy()


def ges(M, cfg: GESConfig = GESConfig()) -> CausalGraph:
    """CPDAG maximising BIC: greedy forward insertions, then greedy deletions."""
    x = np.asarray(getattr(M, "values", M), dtype=float)
    rows, k = x.shape
    if rows <= k + 3:
        raise TestInfeasibleError(f"ges needs rows > k + 3 ({rows} <= {k + 3})")
    search = _Search(BICScore(x, cfg.penalty))
    a = np.zeros((k, k), dtype=np.int8)
    for phase in (search.best_insert, search.best_delete):
        while True:
            delta, move = phase(a)
            if move is None:
                break
            a = _apply(a, move)
    return CausalGraph(a, _labels(M))
