"""Independent brute-force references used by several test modules.

Nothing here imports the package's graph algorithms: Markov equivalence is
decided from d-separation statements, and the CPDAG of a class is read off
by intersecting the orientations of all its members.
"""
from __future__ import annotations

import itertools

import numpy as np


def all_dags(k: int):
    """Every DAG on ``k`` labelled nodes as a 0/1 ``(k, k)`` array."""
    pairs = list(itertools.combinations(range(k), 2))
    for states in itertools.product((0, 1, 2), repeat=len(pairs)):
        a = np.zeros((k, k), dtype=np.int8)
        for (i, j), s in zip(pairs, states):
            if s == 1:
                a[i, j] = 1
            elif s == 2:
                a[j, i] = 1
        if _acyclic(a):
            yield a


def _acyclic(a) -> bool:
    k = len(a)
    reach = a.astype(bool).copy()
    for m in range(k):
        reach |= reach[:, [m]] & reach[[m], :]
    return not reach.diagonal().any()


def _ancestors(a, nodes) -> set:
    out = set(nodes)
    frontier = list(nodes)
    while frontier:
        v = frontier.pop()
        for p in np.flatnonzero(a[:, v]):
            if p not in out:
                out.add(int(p))
                frontier.append(int(p))
    return out


def d_separated(a, x: int, y: int, z) -> bool:
    """Moralised-ancestral-graph criterion."""
    z = set(z)
    keep = _ancestors(a, {x, y} | z)
    und = set()
    for v in keep:
        parents = [int(p) for p in np.flatnonzero(a[:, v]) if p in keep]
        for p in parents:
            und.add(frozenset((p, v)))
        for p, q in itertools.combinations(parents, 2):
            und.add(frozenset((p, q)))
    seen, stack = {x}, [x]
    while stack:
        u = stack.pop()
        for e in und:
            if u in e:
                (w,) = e - {u}
                if w == y:
                    return False
                if w not in seen and w not in z:
                    seen.add(w)
                    stack.append(w)
    return True


def independence_model(a) -> frozenset:
    k = len(a)
    stmts = set()
    for x, y in itertools.combinations(range(k), 2):
        rest = [v for v in range(k) if v not in (x, y)]
        for r in range(len(rest) + 1):
            for z in itertools.combinations(rest, r):
                if d_separated(a, x, y, z):
                    stmts.add((x, y, z))
    return frozenset(stmts)


def cpdag_by_enumeration(dag, k: int | None = None) -> np.ndarray:
    """Edge ``i -> j`` kept directed iff every Markov-equivalent DAG has it."""
    dag = np.asarray(dag)
    k = k or len(dag)
    target = independence_model(dag)
    members = [d for d in all_dags(k) if independence_model(d) == target]
    out = np.zeros((k, k), dtype=np.int8)
    for i, j in itertools.permutations(range(k), 2):
        if any(d[i, j] for d in members):
            out[i, j] = 1
    return out


def linear_gaussian_sample(dag, rows: int, rng) -> np.ndarray:
    """Linear SEM with unit-variance Gaussian noise.

    Edge weights are drawn from +-[0.5, 1.5]; a common weight would let two
    paths cancel exactly (e.g. a triangle with all weights 1 makes the two
    parents conditionally uncorrelated given the child).
    """
    dag = np.asarray(dag)
    k = len(dag)
    w = rng.uniform(0.5, 1.5, (k, k)) * rng.choice([-1.0, 1.0], (k, k)) * dag
    order = []
    remaining = set(range(k))
    while remaining:
        for v in sorted(remaining):
            if not any(dag[p, v] for p in remaining if p != v):
                order.append(v)
                remaining.remove(v)
                break
    x = np.zeros((rows, k))
    for v in order:
        x[:, v] = rng.standard_normal(rows) + x @ w[:, v]
    return x


def _whitened_noise(rows: int, k: int, rng) -> np.ndarray:
    e = rng.standard_normal((rows, k))
    e -= e.mean(axis=0)
    chol = np.linalg.cholesky(e.T @ e / rows)
    return e @ np.linalg.inv(chol).T


def _min_dependence(x: np.ndarray, dag) -> float:
    """Smallest |partial correlation| over pairs that are d-connected given the set."""
    c = np.corrcoef(x, rowvar=False)
    k = len(dag)
    worst = np.inf
    for i, j in itertools.combinations(range(k), 2):
        rest = [v for v in range(k) if v not in (i, j)]
        for r in range(len(rest) + 1):
            for z in itertools.combinations(rest, r):
                if d_separated(dag, i, j, z):
                    continue
                idx = [i, j, *z]
                prec = np.linalg.inv(c[np.ix_(idx, idx)])
                worst = min(worst, abs(prec[0, 1]) / np.sqrt(prec[0, 0] * prec[1, 1]))
    return worst


def strong_signal_sample(dag, rows: int, rng, margin: float = 0.2) -> np.ndarray:
    """Linear SEM whose sample moments match the DAG exactly.

    The exogenous noise is whitened in-sample, so every partial correlation
    the DAG implies to be zero is zero in the sample too, and weight draws
    are repeated until every implied dependence has ``|partial r| >= margin``.
    """
    dag = np.asarray(dag)
    k = len(dag)
    while True:
        w = rng.uniform(0.5, 1.5, (k, k)) * rng.choice([-1.0, 1.0], (k, k)) * dag
        x = _whitened_noise(rows, k, rng) @ np.linalg.inv(np.eye(k) - w)
        if _min_dependence(x, dag) >= margin:
            return x
