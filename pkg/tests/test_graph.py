import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from degcausal.errors import ArityError, ComparisonError, GraphStructureError
from degcausal.graph import (CausalGraph, PairwiseOutcome, classify_pairwise, cpdag_from_dag,
                             dag_extension, graphs_equal, is_acyclic, meek_closure, orient_cpdag,
                             skeleton_of, v_structures)

from oracles import all_dags, cpdag_by_enumeration


def g(adj, labels=()):
    return CausalGraph(np.array(adj), labels)


class TestCausalGraph:
    def test_rejects_non_binary(self):
        with pytest.raises(GraphStructureError):
            g([[0, 2], [0, 0]])

    def test_rejects_self_loop(self):
        with pytest.raises(GraphStructureError):
            g([[1, 0], [0, 0]])

    def test_rejects_non_square(self):
        with pytest.raises(GraphStructureError):
            CausalGraph(np.zeros((2, 3)))

    def test_default_labels(self):
        assert CausalGraph.empty(3).labels == ("X1", "X2", "X3")

    def test_immutable(self):
        a = CausalGraph.empty(2)
        with pytest.raises(ValueError):
            a.adj[0, 1] = 1

    def test_edge_views(self):
        G = CausalGraph.from_edges(3, directed=[(0, 1)], undirected=[(1, 2)])
        assert G.directed_edges() == [(0, 1)]
        assert G.undirected_edges() == [(1, 2)]
        assert G.skeleton_edges() == {frozenset(("X1", "X2")), frozenset(("X2", "X3"))}

    def test_json_round_trip(self, tmp_path):
        G = CausalGraph.from_edges(3, directed=[(2, 0)], undirected=[(0, 1)], labels="abc")
        G.to_json(tmp_path / "g.json")
        assert CausalGraph.from_json(tmp_path / "g.json") == G

    def test_permuted(self):
        G = CausalGraph.from_edges(3, directed=[(0, 1)], labels="abc")
        P = G.permuted([2, 1, 0])
        assert P.labels == ("c", "b", "a")
        assert P.directed_edges() == [(2, 1)]


@pytest.mark.parametrize("adj, expected", [
    ([[0, 1], [0, 0]], True),
    ([[0, 1, 0], [0, 0, 1], [1, 0, 0]], False),
    ([[0, 1], [1, 0]], True),  # undirected edges are ignored
    (np.zeros((4, 4), int), True),
])
def test_is_acyclic(adj, expected):
    assert is_acyclic(g(adj)) is expected


def test_skeleton_symmetrises():
    s = skeleton_of(g([[0, 1, 0], [0, 0, 0], [0, 1, 0]]))
    assert np.array_equal(s.adj, s.adj.T)
    assert s.adj.sum() == 4


def test_graphs_equal_label_mismatch():
    with pytest.raises(ComparisonError):
        graphs_equal(CausalGraph.empty(2, "ab"), CausalGraph.empty(2, "xy"))
    with pytest.raises(ComparisonError):
        graphs_equal(CausalGraph.empty(2), CausalGraph.empty(3))


@pytest.mark.parametrize("adj, outcome", [
    ([[0, 0], [0, 0]], PairwiseOutcome.EMPTY),
    ([[0, 1], [0, 0]], PairwiseOutcome.X1_TO_X2),
    ([[0, 0], [1, 0]], PairwiseOutcome.X2_TO_X1),
    ([[0, 1], [1, 0]], PairwiseOutcome.UNDIRECTED),
])
def test_classify_pairwise(adj, outcome):
    assert classify_pairwise(g(adj)) is outcome


def test_classify_pairwise_arity():
    with pytest.raises(ArityError):
        classify_pairwise(CausalGraph.empty(3))


def test_orient_collider_example():
    # skeleton X - Z - Y with X, Y separated by the empty set gives X -> Z <- Y
    skel = CausalGraph.from_edges(3, undirected=[(0, 2), (1, 2)])
    out = orient_cpdag(skel, {(0, 1): ()})
    assert sorted(out.directed_edges()) == [(0, 2), (1, 2)]


def test_orient_chain_example():
    skel = CausalGraph.from_edges(3, undirected=[(0, 2), (1, 2)])
    out = orient_cpdag(skel, {(0, 1): (2,)})
    assert sorted(out.undirected_edges()) == [(0, 2), (1, 2)]


def test_meek_rule_one():
    a = np.array([[0, 1, 0], [0, 0, 1], [0, 1, 0]])  # 0 -> 1 - 2, 0 and 2 nonadjacent
    out = meek_closure(a)
    assert out[1, 2] == 1 and out[2, 1] == 0


def test_meek_idempotent_on_every_k4_cpdag():
    for dag in all_dags(4):
        c = cpdag_from_dag(CausalGraph(dag)).adj
        assert np.array_equal(meek_closure(c), c)


def test_v_structures_of_collider():
    assert v_structures(g([[0, 0, 1], [0, 0, 1], [0, 0, 0]])) == {(0, 2, 1)}


@pytest.mark.parametrize("k", [2, 3])
def test_cpdag_matches_enumeration(k):
    for dag in all_dags(k):
        assert np.array_equal(cpdag_from_dag(CausalGraph(dag)).adj, cpdag_by_enumeration(dag))


def test_cpdag_rejects_non_dag():
    with pytest.raises(GraphStructureError):
        cpdag_from_dag(g([[0, 1], [1, 0]]))


def test_dag_extension_is_member_of_class():
    for dag in all_dags(4):
        c = cpdag_from_dag(CausalGraph(dag))
        ext = dag_extension(c.adj)
        assert ext is not None
        assert cpdag_from_dag(CausalGraph(ext)) == c


def test_dag_extension_none_for_inconsistent_pdag():
    # a directed 3-cycle has no acyclic extension
    cyc = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert dag_extension(cyc) is None


adjacency = st.integers(2, 6).flatmap(
    lambda k: st.lists(st.lists(st.integers(0, 1), min_size=k, max_size=k), min_size=k, max_size=k))


@given(adjacency, st.data())
def test_orient_cpdag_never_creates_cycles(rows, data):
    a = np.array(rows, dtype=np.int8)
    np.fill_diagonal(a, 0)
    skel = skeleton_of(CausalGraph(a))
    k = skel.k
    seps = {}
    for i, j in itertools.combinations(range(k), 2):
        if not skel.adj[i, j]:
            others = [v for v in range(k) if v not in (i, j)]
            seps[(i, j)] = tuple(data.draw(st.lists(st.sampled_from(others), unique=True))) if others else ()
    out = orient_cpdag(skel, seps)
    assert is_acyclic(out)
    assert skeleton_of(out) == skel
