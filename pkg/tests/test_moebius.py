import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import circle_through_points, eigen_class, quadratic_fixed_points
from projgraft.errors import AmbiguousClassification, DegenerateMap, IsIdentity, NonRealCenters
from projgraft.moebius import (
    Circle,
    Line,
    MapClass,
    MoebiusMap,
    SpherePoint,
    apply,
    apply_circle,
    chordal_distance,
    classify,
    compose,
    fixed_points,
    from_circle_pairing,
    inverse,
)

SQ3 = math.sqrt(3)
M = MoebiusMap.from_entries(2, 3, 1, 2)

finite = st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False)


entry = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@st.composite
def maps(draw):
    # det-1 by construction; a kept away from 0 so d stays bounded
    a = draw(st.complex_numbers(min_magnitude=0.2, max_magnitude=10, allow_nan=False, allow_infinity=False))
    b, c = draw(entry), draw(entry)
    return MoebiusMap.from_entries(a, b, c, (1 + b * c) / a)


# -- points --

def test_infinity_is_one_zero():
    p = SpherePoint.infinity()
    assert (p.z1, p.z2) == (1, 0)
    assert SpherePoint.of(complex("inf")) == p


def test_canonical_idempotent_and_scale_free():
    p = SpherePoint(3 + 4j, 2)
    assert SpherePoint(p.z1, p.z2) == p
    assert SpherePoint(2j * p.z1, 2j * p.z2) == p
    assert max(abs(p.z1), abs(p.z2)) == pytest.approx(1.0)


def test_zero_zero_rejected():
    with pytest.raises(ValueError):
        SpherePoint(0, 0)


def test_chordal_metric_values():
    assert chordal_distance(0, complex("inf")) == pytest.approx(2.0)
    assert chordal_distance(1, -1) == pytest.approx(2.0)
    assert chordal_distance(0, 1) == pytest.approx(math.sqrt(2))


# -- apply / compose --

def test_apply_examples():
    assert apply(MoebiusMap.identity(), 5).to_complex() == 5
    assert apply(M, complex("inf")).to_complex() == pytest.approx(2)
    assert apply(M, SQ3).to_complex() == pytest.approx(SQ3)


def test_compose_examples():
    dilate = MoebiusMap.from_entries(2, 0, 0, 1)
    shift = MoebiusMap.from_entries(1, 1, 0, 1)
    assert compose(dilate, shift) == MoebiusMap.from_entries(2, 2, 0, 1)
    assert compose(M, MoebiusMap.identity()) == M
    assert compose(M, inverse(M)).isclose(MoebiusMap.identity())


def test_det_one_and_sign_rule():
    m = MoebiusMap.from_entries(-2, -13, 1, 6)
    assert m.det() == pytest.approx(1)
    assert m.entries == pytest.approx((2, 13, -1, -6))
    assert m == MoebiusMap.from_entries(2, 13, -1, -6)


def test_degenerate_rejected():
    with pytest.raises(DegenerateMap):
        MoebiusMap.from_entries(1, 2, 2, 4)


@settings(max_examples=200, deadline=None)
@given(maps(), finite)
def test_inverse_round_trip(m, z):
    assert chordal_distance(apply(inverse(m), apply(m, z)), z) < 1e-9


@settings(max_examples=100, deadline=None)
@given(maps())
def test_det_normalized(m):
    assert abs(m.det() - 1) < 1e-9


# -- classification --

def test_classify_examples():
    assert classify(MoebiusMap.identity()) is MapClass.IDENTITY
    assert classify(M) is MapClass.LOXODROMIC
    rot = MoebiusMap.from_entries(cmath.exp(1j * math.pi / 6), 0, 0, cmath.exp(-1j * math.pi / 6))
    assert classify(rot) is MapClass.ELLIPTIC
    assert classify(MoebiusMap.from_entries(1, 1, 0, 1)) is MapClass.PARABOLIC


def test_classify_boundary_shell_is_ambiguous():
    # tr^2 = 4 + 1.5e-9: within (tol, 2 tol] of the parabolic value
    t = math.sqrt(4 + 1.5e-9)
    lam = (t + math.sqrt(t * t - 4)) / 2
    m = MoebiusMap.from_entries(lam, 0, 0, 1 / lam)
    with pytest.raises(AmbiguousClassification):
        classify(m, tol=1e-9)
    assert classify(m, tol=1e-10) is MapClass.LOXODROMIC


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["lox", "ell"]), maps())
def test_classify_conjugation_invariant(kind, g):
    base = M if kind == "lox" else MoebiusMap.from_entries(cmath.exp(0.4j), 0, 0, cmath.exp(-0.4j))
    conj = compose(compose(g, base), inverse(g))
    assert classify(conj, tol=1e-8) is classify(base, tol=1e-8)


def test_classify_agrees_with_eigenvalue_oracle():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, b, c, d = rng.normal(size=4) + 1j * rng.normal(size=4)
        m = MoebiusMap.from_entries(a, b, c, d)
        try:
            cls = classify(m, tol=1e-8)
        except AmbiguousClassification:
            continue
        expect = eigen_class(m.as_array())
        if cls is MapClass.LOXODROMIC:
            assert expect == "Loxodromic"
        elif cls is MapClass.ELLIPTIC:
            assert expect == "Elliptic"


# -- fixed points --

def test_fixed_points_examples():
    att, rep = fixed_points(M)
    assert att.to_complex() == pytest.approx(SQ3)
    assert rep.to_complex() == pytest.approx(-SQ3)
    oracle = sorted(quadratic_fixed_points(2, 3, 1, 2), key=lambda z: -z.real)
    assert [att.to_complex(), rep.to_complex()] == pytest.approx(oracle)
    att, rep = fixed_points(MoebiusMap.from_entries(2, 0, 0, 1))
    assert att.is_infinity() and rep.to_complex() == 0
    p, q = fixed_points(MoebiusMap.from_entries(1, 1, 0, 1))
    assert p.is_infinity() and q.is_infinity()
    with pytest.raises(IsIdentity):
        fixed_points(MoebiusMap.identity())


@settings(max_examples=100, deadline=None)
@given(maps())
def test_fixed_points_are_fixed(m):
    try:
        pts = fixed_points(m)
    except IsIdentity:
        return
    for p in pts:
        assert chordal_distance(apply(m, p), p) < 1e-6


# -- circles --

def test_apply_circle_examples():
    unit = Circle(0, 1)
    out = apply_circle(MoebiusMap.identity(), unit)
    assert out.center == pytest.approx(0) and out.radius == pytest.approx(1)
    inv = MoebiusMap.from_entries(0, 1, 1, 0)
    img = apply_circle(inv, Circle(3, 1))
    # oracle: circle through the images of three points of |z - 3| = 1
    c, r = circle_through_points(1 / 2, 1 / 4, 1 / (3 + 1j))
    assert img.center == pytest.approx(c) and img.radius == pytest.approx(r)
    assert img.center == pytest.approx(3 / 8) and img.radius == pytest.approx(1 / 8)
    line = apply_circle(MoebiusMap.from_entries(2, 0, 0, 1), Line(1j, 0))
    assert isinstance(line, Line) and line.offset == pytest.approx(0)
    assert abs(line.normal.imag) == pytest.approx(1)


def test_big_circle_becomes_line():
    # z -> 1/(z - 1) sends a circle through 1 to a line
    img = apply_circle(MoebiusMap.from_entries(0, 1, 1, -1), Circle(1.5, 0.5))
    assert isinstance(img, Line)


@settings(max_examples=60, deadline=None)
@given(maps(), st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 5))
def test_apply_circle_matches_pointwise(m, x, y, r):
    c = Circle(complex(x, y), r)
    pole = -m.d / m.c if m.c != 0 else None
    if pole is not None and abs(abs(pole - c.center) - r) < 1e-2:
        return
    img = apply_circle(m, c)
    zs = c.sample(1000)
    w = np.array([apply(m, z).to_complex() for z in zs])
    if isinstance(img, Circle):
        resid = np.abs(np.abs(w - img.center) - img.radius)
        scale = 1 + img.radius
        assert np.max(resid[np.isfinite(resid)] / scale) < 1e-7
    else:
        fin = w[np.isfinite(w)]
        resid = np.abs((np.conj(img.normal) * fin).real - img.offset)
        assert np.max(resid / (1 + np.abs(fin))) < 1e-7


def test_pairing_examples():
    m = from_circle_pairing(Circle(-2, 1), Circle(2, 1))
    assert m == MoebiusMap.from_entries(2, 3, 1, 2)
    m = from_circle_pairing(Circle(-6, 1), Circle(-2, 1))
    assert m == MoebiusMap.from_entries(-2, -13, 1, 6)
    generic = from_circle_pairing(Circle(0, 1), Circle(0, 1), fuchsian=False)
    assert generic == MoebiusMap.from_entries(0, 1, 1, 0)
    with pytest.raises(NonRealCenters):
        from_circle_pairing(Circle(1j, 1), Circle(4, 1))


@settings(max_examples=100, deadline=None)
@given(st.floats(-20, 20), st.floats(0.1, 3), st.floats(-20, 20), st.floats(0.1, 3), st.booleans())
def test_pairing_sends_far_point_inside(c, r, cp, rp, fuchsian):
    if abs(c - cp) < r + rp + 0.1:
        return
    m = from_circle_pairing(Circle(c, r), Circle(cp, rp), fuchsian=fuchsian)
    img = apply(m, complex(c + 100 * (r + 1), 0)).to_complex()
    assert abs(img - cp) < rp
