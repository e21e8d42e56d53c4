import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_presentation
from projgraft.documents import load, presentation_from_doc
from projgraft.errors import (
    CarrierOverlap,
    EndpointMismatch,
    EulerMismatch,
    InvalidChart,
    NotAdmissible,
    RHViolation,
    SameBoundary,
    UnknownBoundary,
)
from projgraft.graftcalc import (
    AdmissibleLoop,
    CarrierArc,
    Component,
    HoledSphereChart,
    Quality,
    assemble,
    carrier_word,
    cover_degree,
    euler_characteristic,
    graft_arc,
    graft_loop,
    graft_multiarc,
    presentation_from_marking,
    random_carrier,
    riemann_hurwitz_check,
    split,
    verify_presentation,
)
from projgraft.multiarc import construct, feasible
from projgraft.foldgraph import LabeledGraph
from projgraft.schottky import GroupWord, standard_fuchsian


def test_basic_chart():
    c = HoledSphereChart.basic("P", ["a", "b", "c"])
    assert c.degrees() == (1, 1, 1)
    assert cover_degree(c) == 1
    assert c.euler_characteristic == -1
    with pytest.raises(InvalidChart):
        HoledSphereChart.basic("P", ["a"])
    with pytest.raises(InvalidChart):
        HoledSphereChart("P", (Component("a", 2), Component("b")), quality=Quality.BASIC)


def test_graft_arc():
    c = graft_arc(HoledSphereChart.basic("P", ["a", "b", "c"]), ("a", "b"))
    assert c.degrees() == (2, 2, 1)
    assert c.quality is Quality.GOOD
    assert cover_degree(c) == 2
    with pytest.raises(SameBoundary):
        graft_arc(c, ("a", "a"))
    with pytest.raises(UnknownBoundary):
        graft_arc(c, ("a", "z"))


def test_odd_ramification_rejected():
    c = HoledSphereChart("P", (Component("a", 2), Component("b", 1)), quality=Quality.GOOD)
    with pytest.raises(RHViolation):
        cover_degree(c)


def test_riemann_hurwitz_check():
    assert riemann_hurwitz_check(3, [3, 3])
    assert riemann_hurwitz_check(2, [2, 2, 1])
    assert not riemann_hurwitz_check(2, [3, 1])
    assert not riemann_hurwitz_check(0, [1])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=2, max_size=6))
def test_multiarc_degree_law(t):
    if not feasible(t):
        return
    chart = HoledSphereChart.basic("P", [f"b{i}" for i in range(len(t))])
    out = graft_multiarc(chart, construct(t))
    k = sum(t) // 2
    assert out.degrees() == tuple(x + 1 for x in t)
    d = cover_degree(out)
    assert d == k + 1
    assert 2 * (d - 1) == sum(x - 1 for x in out.degrees())


def test_fixture_presentations(fixtures):
    ok = presentation_from_doc(load(fixtures / "genus2_one_loop.json"))
    assert all(r.ok for r in verify_presentation(ok))
    assert carrier_word(ok, ok.loops[0]) == GroupWord(((1, 1),))
    assert euler_characteristic(ok) == -2
    bad = presentation_from_doc(load(fixtures / "genus2_endpoint_mismatch.json"))
    first = next(r for r in verify_presentation(bad) if not r.ok)
    assert isinstance(first.error, EndpointMismatch)
    assert first.error.counts == (1, 0)
    triv = presentation_from_doc(load(fixtures / "genus2_trivial_word.json"))
    first = next(r for r in verify_presentation(triv) if not r.ok)
    assert isinstance(first.error, NotAdmissible)


def test_crossing_direction_reads_inverse(fixtures):
    p = presentation_from_doc(load(fixtures / "genus2_zero_arc.json"))
    fwd = AdmissibleLoop(None, (CarrierArc("A", "a2", "a1"),))
    back = AdmissibleLoop(None, (CarrierArc("A", "a1", "a2"),))
    assert carrier_word(p, fwd) == GroupWord(((1, 1),))
    assert carrier_word(p, back) == GroupWord(((1, -1),))


def test_graft_loop_and_round_trip(fixtures):
    p = presentation_from_doc(load(fixtures / "genus2_zero_arc.json"))
    q = graft_loop(p, AdmissibleLoop(None, (CarrierArc("A", "a2", "a1"),)))
    assert euler_characteristic(q) == -2
    assert q.piece("A").degrees() == (2, 2, 1)
    assert assemble(*split(q)) == q
    with pytest.raises(NotAdmissible):
        graft_loop(p, AdmissibleLoop(GroupWord(()), ()))


def test_assemble_rejects_unbalanced_arcs(fixtures):
    p = presentation_from_doc(load(fixtures / "genus2_zero_arc.json"))
    group, genus, marking, pieces, gluing, _ = split(p)
    with pytest.raises(EndpointMismatch) as exc:
        assemble(group, genus, marking, pieces, gluing, {"A": [("a1", "a3")]})
    assert exc.value.counts == (1, 0)


def _arcs(p):
    return Counter((a.piece, a.b_in, a.b_out) for loop in p.loops for a in loop.carrier)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(0, 2**32 - 1))
def test_random_grafts_keep_euler(g, seed):
    rng = random.Random(seed)
    p = random_presentation(g, rng)
    assert euler_characteristic(p) == 2 - 2 * g
    for _ in range(3):
        carrier = random_carrier(p, rng)
        if carrier is None:
            continue
        loop = AdmissibleLoop(None, carrier)
        try:
            p = graft_loop(p, loop)
        except (NotAdmissible, CarrierOverlap):
            continue
        assert euler_characteristic(p) == 2 - 2 * g
        assert all(r.ok for r in verify_presentation(p))
    # assemble re-chains loops from the first unused arc, so it is canonical
    # rather than an exact inverse; it keeps pieces and arcs and is idempotent
    q = assemble(*split(p))
    assert q.pieces == p.pieces
    assert _arcs(q) == _arcs(p)
    assert assemble(*split(q)) == q


def test_euler_mismatch_surfaces():
    # six 3-holed pieces have chi = -6, but genus 3 needs -4
    edges = [(u, v, 1 + (u + v) % 3, 1) for u in range(3) for v in range(3, 6)]
    marking = LabeledGraph.from_edges(3, list(range(6)), edges)
    p = presentation_from_marking(standard_fuchsian(3), marking)
    assert euler_characteristic(p) == -6
    euler = next(r for r in verify_presentation(p) if r.name == "euler")
    assert not euler.ok and isinstance(euler.error, EulerMismatch)
    with pytest.raises(EulerMismatch):
        p.verify()
