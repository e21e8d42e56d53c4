import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import labeled_isomorphic
from projgraft.errors import InvalidLabel, InvalidRank, NotConnected, StalePair
from projgraft.foldgraph import (
    Edge,
    FoldPair,
    Iso,
    Label,
    LabeledGraph,
    NotRose,
    canonical_form,
    decompose_to_rose,
    find_foldable_pair,
    fold_step,
    fold_to_completion,
    foldable_pairs,
    handlebody_summary,
    is_rose,
    random_blowup,
    rose,
    unfold,
)


def test_rose_shape():
    r = rose(3)
    assert r.vertices == (0,)
    assert [e.id for e in r.edges] == [0, 1, 2]
    assert is_rose(r)
    assert r.euler_rank == 3
    assert foldable_pairs(r) == []
    assert handlebody_summary(r).genus == 3


def test_validation():
    with pytest.raises(InvalidRank):
        LabeledGraph.from_edges(0, [0], [])
    with pytest.raises(InvalidLabel):
        LabeledGraph.from_edges(1, [0], [(0, 0, 2, 1)])
    with pytest.raises(NotConnected):
        LabeledGraph.from_edges(1, [0, 1], [(0, 0, 1, 1)])


def test_label_order_and_inverse():
    assert Label(1, -1) < Label(1, 1) < Label(2, -1)
    assert Label(2, 1).inverse() == Label(2, -1)
    assert str(Label(1, 1)) == "g1+"


def test_single_fold_example():
    # a -g1-> b, a -g1-> c, b -g2-> c: folding merges b and c
    k = LabeledGraph.from_edges(2, ["a", "b", "c"], [("a", "b", 1, 1), ("a", "c", 1, 1), ("b", "c", 2, 1)])
    pair = find_foldable_pair(k)
    assert pair == FoldPair("a", 0, 1, Label(1, 1))
    folded, ev = fold_step(k, pair)
    assert ev.merged == ("b", "c")
    assert ev.rank_preserving
    assert ev.line() == "FOLD v=a keep=0 drop=1 label=g1+"
    assert len(folded.edges) == 2 and len(folded.vertices) == 2
    # E - V + 1 = 1 < 2, so the result is a tree edge plus a g2 loop, not the rose
    res = decompose_to_rose(k)
    assert isinstance(res, NotRose) and res.rank == 1
    assert len(res.trace) == 1


def test_incoming_edges_fold_through_inverse_label():
    # b -g1-> a and c -g1-> a: at a both read g1^-1
    k = LabeledGraph.from_edges(1, ["a", "b", "c"], [("b", "a", 1, 1), ("c", "a", 1, 1), ("b", "c", 1, 1)])
    pair = find_foldable_pair(k)
    assert pair.vertex == "a" and pair.label == Label(1, -1)


def test_stale_pair():
    k = LabeledGraph.from_edges(2, ["a", "b", "c"], [("a", "b", 1, 1), ("a", "c", 1, 1), ("b", "c", 2, 1)])
    pair = find_foldable_pair(k)
    folded, _ = fold_step(k, pair)
    with pytest.raises(StalePair):
        fold_step(folded, pair)


def test_parallel_fold_reduces_rank():
    k = LabeledGraph.from_edges(1, ["a", "b"], [("a", "b", 1, 1), ("a", "b", 1, 1)])
    res = decompose_to_rose(k)
    assert isinstance(res, NotRose)
    assert res.rank == 1
    assert not res.trace.events[0].rank_preserving


def test_extra_loop_is_not_rose():
    k = LabeledGraph.from_edges(2, [0], [(0, 0, 1, 1), (0, 0, 2, 1), (0, 0, 2, -1)])
    res = decompose_to_rose(k)
    assert isinstance(res, NotRose) and res.rank == 3


def test_unfold_inverts_fold():
    r = rose(2)
    b = unfold(r, 0, False, [(1, "src")])
    assert len(b.vertices) == 2 and len(b.edges) == 3
    assert b.euler_rank == 2
    folded, _ = fold_to_completion(b)
    assert labeled_isomorphic(folded, r)


def test_canonical_form_matches_isomorphism_oracle():
    rng = random.Random(5)
    graphs = [random_blowup(2, rng.randint(0, 4), rng) for _ in range(25)]
    for i, a in enumerate(graphs):
        for b in graphs[i:]:
            assert (canonical_form(a) == canonical_form(b)) == labeled_isomorphic(a, b)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 8), st.integers(0, 2**32 - 1))
def test_blowups_fold_back(g, n, seed):
    k = random_blowup(g, n, random.Random(seed))
    assert k.euler_rank == g
    assert len(k.edges) == g + n
    res = decompose_to_rose(k)
    assert isinstance(res, Iso)
    assert len(res.trace) == n


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 3), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_random_fold_order_is_confluent(g, n, seed):
    k = random_blowup(g, n, random.Random(seed))
    a, _ = fold_to_completion(k)
    b, _ = fold_to_completion(k, random.Random(seed + 1))
    assert canonical_form(a) == canonical_form(b)
    assert labeled_isomorphic(a, b)


def test_min_degree_blowup():
    k = random_blowup(3, 6, random.Random(1), min_degree=2)
    assert min(k.degree(v) for v in k.vertices) >= 2


def test_duplicate_edge_ids_rejected():
    with pytest.raises(ValueError):
        LabeledGraph(1, (0,), (Edge(0, 0, 0, Label(1, 1)), Edge(0, 0, 0, Label(1, 1))))
