"""Causal graph representation and structural operations.

Adjacency convention: ``adj[i, j] = 1`` and ``adj[j, i] = 0`` encodes the
directed edge ``i -> j``; a symmetric pair ``adj[i, j] = adj[j, i] = 1``
encodes the undirected edge ``i - j``.  The same matrix therefore holds
DAGs, PDAGs and CPDAGs.
"""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ArityError, ComparisonError, GraphStructureError

Pair = frozenset


@dataclass(frozen=True, eq=False)
class CausalGraph:
    """Immutable k x k binary adjacency matrix with variable labels."""

    adj: np.ndarray
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        adj = np.asarray(self.adj)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise GraphStructureError(f"adjacency must be square, got shape {adj.shape}")
        if adj.size and not np.isin(adj, (0, 1)).all():
            raise GraphStructureError("adjacency entries must be 0 or 1")
        if np.any(np.diag(adj) != 0):
            raise GraphStructureError("self-loops are not allowed")
        k = adj.shape[0]
        labels = tuple(self.labels) if self.labels else tuple(f"X{i + 1}" for i in range(k))
        if len(labels) != k:
            raise GraphStructureError(f"{len(labels)} labels for {k} variables")
        adj = adj.astype(np.int8, copy=True)
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)
        object.__setattr__(self, "labels", labels)

    @property
    def k(self) -> int:
        return self.adj.shape[0]

    @classmethod
    def empty(cls, k: int, labels: Sequence[str] = ()) -> "CausalGraph":
        return cls(np.zeros((k, k), dtype=np.int8), tuple(labels))

    @classmethod
    def from_edges(cls, k: int, directed: Iterable[tuple[int, int]] = (),
                   undirected: Iterable[tuple[int, int]] = (),
                   labels: Sequence[str] = ()) -> "CausalGraph":
        adj = np.zeros((k, k), dtype=np.int8)
        for i, j in directed:
            adj[i, j] = 1
        for i, j in undirected:
            adj[i, j] = adj[j, i] = 1
        return cls(adj, tuple(labels))

    def directed_edges(self) -> list[tuple[int, int]]:
        a = self.adj
        return [(i, j) for i, j in zip(*np.nonzero(a)) if not a[j, i]]

    def undirected_edges(self) -> list[tuple[int, int]]:
        a = self.adj
        return [(i, j) for i, j in zip(*np.nonzero(a)) if i < j and a[j, i]]

    def skeleton_edges(self) -> set[frozenset]:
        """Unordered adjacent pairs, as label sets."""
        a = self.adj
        return {frozenset((self.labels[i], self.labels[j]))
                for i, j in zip(*np.nonzero(a | a.T)) if i < j}

    def is_dag(self) -> bool:
        return not self.undirected_edges() and is_acyclic(self)

    def with_labels(self, labels: Sequence[str]) -> "CausalGraph":
        return CausalGraph(self.adj, tuple(labels))

    def permuted(self, perm: Sequence[int]) -> "CausalGraph":
        """Graph over variables reordered so that new variable ``p`` is old ``perm[p]``."""
        perm = list(perm)
        return CausalGraph(self.adj[np.ix_(perm, perm)], tuple(self.labels[p] for p in perm))

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "adj": self.adj.astype(int).tolist()}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "CausalGraph":
        try:
            adj = np.array(obj["adj"], dtype=float)
            labels = tuple(obj.get("labels", ()))
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphStructureError(f"invalid graph object: {exc}") from exc
        if adj.ndim != 2 or not np.isin(adj, (0, 1)).all():
            raise GraphStructureError("adjacency entries must be 0 or 1")
        return cls(adj.astype(np.int8), labels)

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def from_json(cls, path: str | Path) -> "CausalGraph":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def __eq__(self, other):
        if not isinstance(other, CausalGraph):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.labels, self.adj.tobytes()))

    def __repr__(self):
        parts = [f"{self.labels[i]}->{self.labels[j]}" for i, j in self.directed_edges()]
        parts += [f"{self.labels[i]}-{self.labels[j]}" for i, j in self.undirected_edges()]
        return f"CausalGraph({', '.join(parts) or 'empty'})"


class PairwiseOutcome(str, enum.Enum):
    """Outcome categories for a two-variable result graph."""

    EMPTY = "empty"
    X1_TO_X2 = "x1->x2"
    X2_TO_X1 = "x2->x1"
    UNDIRECTED = "undirected"
    OTHER = "other"


# -- low-level helpers on raw matrices ------------------------------------

def _directed_part(a: np.ndarray) -> np.ndarray:
    return (a.astype(bool) & ~a.T.astype(bool))


def _reachable(directed: np.ndarray, src: int, dst: int) -> bool:
    """True if a directed path src ~> dst exists (src == dst counts)."""
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        if u == dst:
            return True
        for v in np.flatnonzero(directed[u]):
            if v not in seen:
                seen.add(int(v))
                stack.append(int(v))
    return False


def has_directed_cycle(directed: np.ndarray) -> bool:
    """Cycle check on a plain 0/1 relation (symmetric pairs count as 2-cycles)."""
    d = np.asarray(directed, dtype=bool).copy()
    np.fill_diagonal(d, False)
    indeg = d.sum(axis=0)
    queue = [i for i in range(d.shape[0]) if indeg[i] == 0]
    removed = 0
    while queue:
        u = queue.pop()
        removed += 1
        for v in np.flatnonzero(d[u]):
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(int(v))
    return removed < d.shape[0]


def _orient(a: np.ndarray, tail: int, head: int) -> bool:
    """Turn tail - head into tail -> head unless that closes a directed cycle."""
    if _reachable(_directed_part(a), head, tail):
        return False
    a[head, tail] = 0
    a[tail, head] = 1
    return True


# -- public operations ----------------------------------------------------

def is_acyclic(g: CausalGraph) -> bool:
    """Whether the directed edges of ``g`` contain no directed cycle."""
    return not has_directed_cycle(_directed_part(g.adj))


def skeleton_of(g: CausalGraph) -> CausalGraph:
    a = g.adj
    return CausalGraph(a | a.T, g.labels)


def graphs_equal(a: CausalGraph, b: CausalGraph) -> bool:
    """Entrywise equality; raises when the graphs are over different variables."""
    if a.k != b.k or a.labels != b.labels:
        raise ComparisonError(
            f"cannot compare graphs over {a.labels} and {b.labels}")
    return bool(np.array_equal(a.adj, b.adj))


def classify_pairwise(g: CausalGraph) -> PairwiseOutcome:
    if g.k != 2:
        raise ArityError(f"pairwise outcome needs k=2, got k={g.k}")
    a01, a10 = int(g.adj[0, 1]), int(g.adj[1, 0])
    return {
        (0, 0): PairwiseOutcome.EMPTY,
        (1, 0): PairwiseOutcome.X1_TO_X2,
        (0, 1): PairwiseOutcome.X2_TO_X1,
        (1, 1): PairwiseOutcome.UNDIRECTED,
    }.get((a01, a10), PairwiseOutcome.OTHER)


def meek_closure(a: np.ndarray) -> np.ndarray:
    """Apply Meek's four orientation rules until nothing changes.

    Operates on a copy of the PDAG matrix ``a``.  An orientation that would
    close a directed cycle is skipped, so the result is always acyclic in its
    directed part when the input was.
    """
    a = np.array(a, dtype=np.int8)
    k = a.shape[0]

    def und(i, j):
        return a[i, j] == 1 and a[j, i] == 1

    def dir_(i, j):
        return a[i, j] == 1 and a[j, i] == 0

    def adj(i, j):
        return a[i, j] == 1 or a[j, i] == 1

    changed = True
    while changed:
        changed = False
        for i, j in itertools.permutations(range(k), 2):
            if not und(i, j):
                continue
            others = [x for x in range(k) if x != i and x != j]
            fire = False
            # R1: c -> i - j, c and j nonadjacent
            if any(dir_(c, i) and not adj(c, j) for c in others):
                fire = True
            # R2: i -> c -> j
            elif any(dir_(i, c) and dir_(c, j) for c in others):
                fire = True
            else:
                # R3: i - c -> j, i - d -> j, c and d nonadjacent
                kids = [c for c in others if und(i, c) and dir_(c, j)]
                if any(not adj(c, d) for c, d in itertools.combinations(kids, 2)):
                    fire = True
                else:
                    # R4: i adj c, c -> l -> j, i adj l, c and j nonadjacent
                    for c, l in itertools.permutations(others, 2):
                        if (adj(i, c) and dir_(c, l) and dir_(l, j)
                                and adj(i, l) and not adj(c, j)):
                            fire = True
                            break
            if fire and _orient(a, i, j):
                changed = True
    return a


def _normalize_sepsets(sepsets: Mapping) -> dict[frozenset, frozenset]:
    return {frozenset(key): frozenset(val) for key, val in sepsets.items()}


def orient_cpdag(skeleton: CausalGraph, sepsets: Mapping) -> CausalGraph:
    """Orient v-structures from separating sets, then close under Meek's rules.

    ``sepsets`` maps unordered index pairs (tuples or frozensets) to the
    conditioning set that separated them.  An edge that two v-structures want
    oriented in opposite directions is left undirected.
    """
    base = skeleton.adj | skeleton.adj.T
    seps = _normalize_sepsets(sepsets)
    k = skeleton.k
    demands: set[tuple[int, int]] = set()
    for c in range(k):
        nbrs = np.flatnonzero(base[c])
        for x, y in itertools.combinations(nbrs, 2):
            x, y = int(x), int(y)
            if base[x, y]:
                continue
            sep = seps.get(frozenset((x, y)), frozenset())
            if c not in sep:
                demands.add((x, c))
                demands.add((y, c))
    a = base.astype(np.int8).copy()
    for tail, head in sorted(demands):
        if (head, tail) in demands:
            continue
        _orient(a, tail, head)
    return CausalGraph(meek_closure(a), skeleton.labels)


def v_structures(g: CausalGraph) -> set[tuple[int, int, int]]:
    """Triples ``(a, c, b)`` with ``a -> c <- b``, ``a < b`` and a, b nonadjacent."""
    a = g.adj
    d = _directed_part(a)
    out = set()
    for c in range(g.k):
        pa = np.flatnonzero(d[:, c])
        for x, y in itertools.combinations(pa, 2):
            if not (a[x, y] or a[y, x]):
                out.add((int(x), c, int(y)))
    return out


def cpdag_from_dag(dag: CausalGraph) -> CausalGraph:
    """Completed PDAG of the Markov equivalence class containing ``dag``."""
    if not dag.is_dag():
        raise GraphStructureError("cpdag_from_dag expects a DAG")
    a = (dag.adj | dag.adj.T).astype(np.int8)
    for x, c, y in sorted(v_structures(dag)):
        a[c, x] = a[c, y] = 0
    return CausalGraph(meek_closure(a), dag.labels)


def dag_extension(pdag: np.ndarray) -> np.ndarray | None:
    """Consistent DAG extension of a PDAG (Dor & Tarsi), or ``None`` if none exists."""
    a = np.array(pdag, dtype=np.int8)
    out = np.where(_directed_part(a), 1, 0).astype(np.int8)
    alive = list(range(a.shape[0]))
    while alive:
        for x in alive:
            others = [y for y in alive if y != x]
            if any(a[x, y] and not a[y, x] for y in others):
                continue  # x has an outgoing directed edge
            und_nbrs = [y for y in others if a[x, y] and a[y, x]]
            adj_nbrs = [y for y in others if a[x, y] or a[y, x]]
            if all(a[y, z] or a[z, y] for y in und_nbrs for z in adj_nbrs if z != y):
                for y in und_nbrs:
                    out[y, x] = 1
                alive.remove(x)
                break
        else:
            return None
    return out
