import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_reduced_words, eigen_class
from projgraft.errors import CapExceeded, CirclesOverlap, InputError, NonRealCenters
from projgraft.moebius import Circle, MapClass, MoebiusMap, apply, classify
from projgraft.schottky import (
    GroupWord,
    SchottkyGroup,
    all_loxodromic_check,
    enumerate_reduced_words,
    evaluate,
    in_fundamental_domain,
    limit_set_approx,
    nesting_violations,
    reduce,
    standard_fuchsian,
    word_count,
)

letters2 = st.tuples(st.integers(1, 2), st.sampled_from([1, -1]))


def test_generators_of_the_rank2_group(rank2):
    a, b = rank2.generators
    assert a == MoebiusMap.from_entries(-2, -13, 1, 6)
    assert b == MoebiusMap.from_entries(6, -13, 1, -2)


def test_build_rejects_overlap_and_offaxis():
    with pytest.raises(CirclesOverlap) as exc:
        SchottkyGroup.build([(Circle(-1, 1), Circle(0.5, 1))])
    assert (exc.value.i, exc.value.j) == (0, 1)
    with pytest.raises(NonRealCenters):
        SchottkyGroup.build([(Circle(-3 + 1j, 1), Circle(3, 1))])


def test_word_parse_and_str():
    w = GroupWord.parse("g1 g2^-2 g1^3")
    assert w.letters == ((1, 1), (2, -1), (2, -1), (1, 1), (1, 1), (1, 1))
    assert str(GroupWord.parse("g2^-1 g1")) == "g2^-1 g1"
    assert GroupWord.parse("e") == GroupWord(())
    with pytest.raises(InputError):
        GroupWord.parse("h1")


def test_reduce_examples():
    assert reduce([(1, 1), (1, -1)]) == GroupWord(())
    assert reduce([(1, 1), (2, 1), (2, -1), (1, -1), (2, 1)]) == GroupWord(((2, 1),))


@settings(max_examples=200)
@given(st.lists(letters2, max_size=12))
def test_reduce_is_idempotent_and_reduced(ls):
    r = reduce(ls)
    assert r.is_reduced()
    assert reduce(r) == r
    assert len(r) <= len(ls)
    assert (GroupWord(tuple(ls)) * GroupWord(tuple(ls)).inverse()) == GroupWord(())


@pytest.mark.parametrize("g,n,count", [(1, 2, 5), (2, 2, 17), (1, 3, 7), (2, 6, 1457)])
def test_word_counts(g, n, count):
    assert word_count(g, n) == count
    if n <= 3:
        assert len(brute_reduced_words(g, n)) == count


@pytest.mark.parametrize("g,n", [(1, 4), (2, 3), (3, 2)])
def test_enumeration_matches_brute_force(g, n):
    ours = [w.letters for w in enumerate_reduced_words(g, n)]
    assert len(ours) == len(set(ours))
    assert set(ours) == set(brute_reduced_words(g, n))
    assert [len(w) for w in ours] == sorted(len(w) for w in ours)


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        list(enumerate_reduced_words(2, 6, max_words=100))


@settings(max_examples=100, deadline=None)
@given(st.lists(letters2, min_size=1, max_size=5))
def test_evaluate_is_homomorphism(ls):
    group = SchottkyGroup.build([(Circle(-6, 1), Circle(-2, 1)), (Circle(2, 1), Circle(6, 1))])
    w = reduce(ls)
    m = evaluate(group, GroupWord(tuple(ls)))
    assert m.isclose(evaluate(group, w), tol=1e-6)
    assert evaluate(group, w * w.inverse()).isclose(MoebiusMap.identity())


def test_loxodromic_report(rank2):
    report = all_loxodromic_check(rank2, 4)
    assert report.ok
    assert report.words_checked == word_count(2, 4) - 1
    assert report.min_gap > 1e-6


def test_loxodromic_agrees_with_eigen_oracle(rank2):
    for w in enumerate_reduced_words(rank2, 4):
        if not len(w):
            continue
        m = evaluate(rank2, w)
        assert classify(m) is MapClass.LOXODROMIC
        assert eigen_class(m.as_array()) == "Loxodromic"


def test_unverified_overlapping_group_is_caught():
    group = SchottkyGroup.build([(Circle(-1.5, 1), Circle(1.5, 1)), (Circle(-0.2j, 1), Circle(0.2j, 1))],
                                fuchsian=False, verify=False)
    with pytest.raises(CirclesOverlap):
        group.verify()


def test_fundamental_domain(rank2):
    assert in_fundamental_domain(rank2, 0)
    assert in_fundamental_domain(rank2, complex("inf"))
    assert in_fundamental_domain(rank2, 3)  # on C(2,1): closed domain
    assert not in_fundamental_domain(rank2, 2)
    # the generator sends the exterior of its source into its target
    a = rank2.letter_map((1, 1))
    img = apply(a, 10j).to_complex()
    assert abs(img + 2) < 1


def test_limit_set_depth_and_points(rank2):
    tree, points = limit_set_approx(rank2, 5)
    assert tree.depth == 5
    assert [len(lvl.words) for lvl in tree.levels] == [4, 12, 36, 108, 324]
    assert nesting_violations(tree) == 0
    assert len(points) == 324
    assert max(abs(p.to_complex().imag) for p in points) < 1e-8
    # each leaf disk is the image of the range disk under its word
    for k in (0, 17, 200):
        node = tree.node(5, k)
        c = node.disk
        m = evaluate(rank2, GroupWord(node.word.letters[:-1]))
        last = node.word.letters[-1]
        rd = rank2.range_disk(last)
        pts = rd.sample(16)
        img = np.array([apply(m, z).to_complex() for z in pts])
        assert np.max(np.abs(np.abs(img - c.center) - c.radius)) < 1e-9 * max(1, c.radius) + 1e-12


def test_limit_set_workers_identical(rank2):
    t1, p1 = limit_set_approx(rank2, 6, workers=1)
    t4, p4 = limit_set_approx(rank2, 6, workers=4)
    assert [p.to_complex() for p in p1] == [p.to_complex() for p in p4]
    for a, b in zip(t1.levels, t4.levels):
        assert a.words == b.words
        assert np.array_equal(a.radii, b.radii)


def test_limit_set_cap(rank2):
    with pytest.raises(CapExceeded):
        limit_set_approx(rank2, 8, max_words=1000)


def test_rank1_limit_set_is_two_points(rank1):
    # the limit set of <z -> (2z+3)/(z+2)> is the fixed-point pair {sqrt 3, -sqrt 3}
    _, points = limit_set_approx(rank1, 12)
    zs = sorted({round(p.to_complex().real, 3) for p in points})
    assert zs == pytest.approx([-math.sqrt(3), math.sqrt(3)], abs=1e-3)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3))
def test_standard_fuchsian_is_schottky(g):
    group = standard_fuchsian(g)
    assert all_loxodromic_check(group, 3).ok
    tree, _ = limit_set_approx(group, 3)
    assert nesting_violations(tree) == 0
