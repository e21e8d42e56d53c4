"""Points of the Riemann sphere, Moebius maps and generalized circles.

Points are kept in homogeneous coordinates so that infinity needs no special
casing; maps are 2x2 complex matrices normalized to determinant one with a
canonical sign.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    AmbiguousClassification,
    DegenerateImage,
    DegenerateMap,
    IsIdentity,
    NonRealCenters,
)

DEFAULT_TOL = 1e-9
LINE_RADIUS = 1e6

INF = complex(math.inf, 0.0)


@dataclass(frozen=True)
class SpherePoint:
    """Homogeneous point ``z1 : z2``; the larger-modulus coordinate is exactly 1."""

    z1: complex
    z2: complex

    def __post_init__(self):
        z1, z2 = complex(self.z1), complex(self.z2)
        if z1 == 0 and z2 == 0:
            raise ValueError("SpherePoint(0, 0) is not a point")
        if not (cmath.isfinite(z1) and cmath.isfinite(z2)):
            raise ValueError("homogeneous coordinates must be finite")
        if not _is_canonical(z1, z2):
            if abs(z1) >= abs(z2):
                z1, z2 = 1.0 + 0j, z2 / z1
            else:
                z1, z2 = z1 / z2, 1.0 + 0j
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)

    @classmethod
    def of(cls, z) -> "SpherePoint":
        """From a complex number; ``inf`` (any infinite value) gives the point at infinity."""
        if isinstance(z, SpherePoint):
            return z
        z = complex(z)
        if cmath.isinf(z):
            return cls(1.0, 0.0)
        return cls(z, 1.0)

    @classmethod
    def infinity(cls) -> "SpherePoint":
        return cls(1.0, 0.0)

    def is_infinity(self, tol: float = 0.0) -> bool:
        return self.z1 == 1 and abs(self.z2) <= tol

    def to_complex(self) -> complex:
        if self.z2 == 0:
            return INF
        return self.z1 / self.z2

    def chordal(self, other: "SpherePoint") -> float:
        return chordal_distance(self, other)

    def __repr__(self):
        if self.z2 == 0:
            return "SpherePoint(inf)"
        return f"SpherePoint({self.to_complex()!r})"


def _is_canonical(z1: complex, z2: complex) -> bool:
    return (z1 == 1 and abs(z2) <= 1) or (z2 == 1 and abs(z1) < 1)


def chordal_distance(p, q) -> float:
    """Chordal distance on the unit sphere (diameter 2)."""
    p, q = SpherePoint.of(p), SpherePoint.of(q)
    num = abs(p.z1 * q.z2 - p.z2 * q.z1)
    den = math.hypot(abs(p.z1), abs(p.z2)) * math.hypot(abs(q.z1), abs(q.z2))
    return 2.0 * num / den


def chordal_distance_array(z, w):
    """Vectorized chordal distance; entries with an infinite part stand for infinity."""
    z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
    zi, wi = ~np.isfinite(z), ~np.isfinite(w)
    zf, wf = np.where(zi, 0, z), np.where(wi, 0, w)
    finite = 2.0 * np.abs(zf - wf) / np.sqrt((1 + np.abs(zf) ** 2) * (1 + np.abs(wf) ** 2))
    to_inf = 2.0 / np.sqrt(1 + np.abs(np.where(zi, wf, zf)) ** 2)
    return np.where(zi & wi, 0.0, np.where(zi | wi, to_inf, finite))


class MapClass(enum.Enum):
    IDENTITY = "Identity"
    PARABOLIC = "Parabolic"
    ELLIPTIC = "Elliptic"
    LOXODROMIC = "Loxodromic"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class MoebiusMap:
    """z -> (a z + b) / (c z + d) with ad - bc = 1.

    Use :meth:`from_entries` to build one from arbitrary (non-singular) entries.
    Equality (``==``) is exact up to the global sign; use :meth:`isclose` for
    numerical comparisons.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def from_entries(cls, a, b, c, d) -> "MoebiusMap":
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        scale = max(abs(a), abs(b), abs(c), abs(d))
        if scale == 0 or abs(det) <= 1e-14 * scale * scale:
            raise DegenerateMap(detail=f"determinant {det!r} vanishes")
        s = cmath.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
        return cls(*_canonical_sign(a, b, c, d))

    @classmethod
    def from_matrix(cls, m) -> "MoebiusMap":
        m = np.asarray(m, dtype=complex)
        return cls.from_entries(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1 + 0j, 0j, 0j, 1 + 0j)

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def trace(self) -> complex:
        return self.a + self.d

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(*_canonical_sign(self.d, -self.b, -self.c, self.a))

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """``self o other`` (apply ``other`` first)."""
        return compose(self, other)

    def __matmul__(self, other):
        return compose(self, other)

    def __call__(self, z):
        return apply(self, SpherePoint.of(z)).to_complex()

    def apply(self, p) -> SpherePoint:
        return apply(self, p)

    def isclose(self, other: "MoebiusMap", tol: float = 1e-9) -> bool:
        x = np.array(self.entries)
        y = np.array(other.entries)
        return bool(min(np.max(np.abs(x - y)), np.max(np.abs(x + y))) <= tol)

    def __eq__(self, other):
        if not isinstance(other, MoebiusMap):
            return NotImplemented
        return self.entries == other.entries or self.entries == tuple(-e for e in other.entries)

    def __hash__(self):
        return hash(tuple(_canonical_sign(*self.entries)))

    def __repr__(self):
        return "MoebiusMap([[{!r}, {!r}], [{!r}, {!r}]])".format(*self.entries)


def _canonical_sign(a, b, c, d):
    entries = (a, b, c, d)
    scale = max(abs(x) for x in entries)
    for x in entries:
        if abs(x) > 1e-12 * scale:
            if not (x.real > 0 or (x.real == 0 and x.imag > 0)):
                entries = tuple(-e for e in entries)
            break
    # adding 0.0 clears negative zeros so printed matrices are stable
    return tuple(e + 0.0 for e in entries)


def apply(m: MoebiusMap, p) -> SpherePoint:
    p = SpherePoint.of(p)
    return SpherePoint(m.a * p.z1 + m.b * p.z2, m.c * p.z1 + m.d * p.z2)


def compose(m1: MoebiusMap, m2: MoebiusMap) -> MoebiusMap:
    a = m1.a * m2.a + m1.b * m2.c
    b = m1.a * m2.b + m1.b * m2.d
    c = m1.c * m2.a + m1.d * m2.c
    d = m1.c * m2.b + m1.d * m2.d
    # products of det-1 matrices are det-1; recomputing the determinant of
    # large entries would only add cancellation error
    return MoebiusMap(*_canonical_sign(a, b, c, d))


def inverse(m: MoebiusMap) -> MoebiusMap:
    return m.inverse()


def distance_to_identity(m: MoebiusMap) -> float:
    x = np.array(m.entries)
    ident = np.array([1, 0, 0, 1], dtype=complex)
    return float(min(np.max(np.abs(x - ident)), np.max(np.abs(x + ident))))


def trace_squared_gap(m: MoebiusMap) -> float:
    """Distance of tr^2 from the real segment [0, 4]."""
    t = m.trace() ** 2
    return _distance_to_segment(t)


def _distance_to_segment(t: complex) -> float:
    if t.real < 0:
        return abs(t)
    if t.real > 4:
        return abs(t - 4)
    return abs(t.imag)


def classify(m: MoebiusMap, tol: float = DEFAULT_TOL) -> MapClass:
    """Classify by tr^2.

    A value whose deciding quantity lands in the shell ``(tol, 2 tol]`` sits
    on a class boundary and raises :class:`AmbiguousClassification`.
    """
    ident = distance_to_identity(m)
    if ident <= tol:
        return MapClass.IDENTITY
    if ident <= 2 * tol:
        raise AmbiguousClassification(detail=f"distance to identity {ident:.3g} with tol {tol:.3g}")
    t = m.trace() ** 2
    near_four = abs(t - 4)
    gap = _distance_to_segment(t)
    if near_four <= tol:
        return MapClass.PARABOLIC
    if near_four <= 2 * tol:
        raise AmbiguousClassification(detail=f"tr^2 = {t!r} borders the parabolic value 4")
    if gap <= tol:
        return MapClass.ELLIPTIC
    if gap <= 2 * tol:
        raise AmbiguousClassification(detail=f"tr^2 = {t!r} borders the segment [0, 4]")
    return MapClass.LOXODROMIC


def fixed_points(m: MoebiusMap) -> tuple[SpherePoint, SpherePoint]:
    """Fixed points as eigenvector directions, attracting one first.

    A parabolic map reports its single fixed point twice.
    """
    if distance_to_identity(m) <= 1e-14:
        raise IsIdentity()
    tr = m.trace()
    disc = cmath.sqrt(tr * tr - 4)
    lam1, lam2 = (tr + disc) / 2, (tr - disc) / 2
    if abs(lam2) > abs(lam1):
        lam1, lam2 = lam2, lam1
    return _eigvec(m, lam1), _eigvec(m, lam2)


def _eigvec(m: MoebiusMap, lam: complex) -> SpherePoint:
    v1 = (m.b, lam - m.a)
    v2 = (lam - m.d, m.c)
    n1 = abs(v1[0]) + abs(v1[1])
    n2 = abs(v2[0]) + abs(v2[1])
    v = v1 if n1 >= n2 else v2
    return SpherePoint(*v)


# -- generalized circles ----------------------------------------------------


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ValueError(f"circle radius must be positive, got {self.radius}")

    def sample(self, n: int) -> np.ndarray:
        theta = 2 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * theta)

    def contains(self, z, tol: float = 0.0) -> bool:
        """Closed-disk membership (points within ``tol`` of the circle count)."""
        p = SpherePoint.of(z)
        if p.is_infinity():
            return False
        return abs(p.to_complex() - self.center) <= self.radius + tol

    def diameter(self) -> float:
        return 2 * self.radius


@dataclass(frozen=True)
class Line:
    """``{z : Re(conj(normal) z) = offset}`` together with infinity."""

    normal: complex
    offset: float

    def __post_init__(self):
        n = complex(self.normal)
        if abs(n) == 0:
            raise ValueError("line normal must be nonzero")
        n = n / abs(n)
        off = float(self.offset)
        if off < 0 or (off == 0 and not (-math.pi / 2 < cmath.phase(n) <= math.pi / 2)):
            n, off = -n, -off
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", off + 0.0)

    def base_point(self) -> complex:
        return self.offset * self.normal

    def sample(self, n: int, half_width: float = 10.0) -> np.ndarray:
        t = np.linspace(-half_width, half_width, n)
        return self.base_point() + 1j * self.normal * t


GeneralizedCircle = Union[Circle, Line]


def circle_through(z1, z2, z3, tol: float = DEFAULT_TOL) -> GeneralizedCircle:
    """The generalized circle through three distinct points of the sphere."""
    pts = [SpherePoint.of(z) for z in (z1, z2, z3)]
    finite = [p.to_complex() for p in pts if not p.is_infinity(tol)]
    if len(finite) < 2:
        raise DegenerateImage(detail="two of the three points are infinity")
    if len(finite) == 2:
        return _line_through(finite[0], finite[1], tol)
    a, b, c = finite
    span = max(abs(b - a), abs(c - a), abs(c - b))
    if span <= tol:
        raise DegenerateImage(detail="points coincide")
    w = (c - a) / (b - a) if b != a else None
    if w is None or abs(w.imag) <= 1e-15 * max(1.0, abs(w)):
        if min(abs(b - a), abs(c - a), abs(c - b)) <= tol:
            raise DegenerateImage(detail="points collinear and nearly coincident")
        return _line_through(a, c if abs(c - a) >= abs(b - a) else b, tol)
    center = (b - a) * (w - abs(w) ** 2) / (2j * w.imag) + a
    radius = abs(a - center)
    if radius > LINE_RADIUS:
        far = max((a, b, c), key=lambda z: abs(z - a))
        return _line_through(a, far, tol)
    return Circle(center, radius)


def _line_through(p: complex, q: complex, tol: float) -> Line:
    if abs(q - p) <= tol:
        raise DegenerateImage(detail="points coincide")
    u = (q - p) / abs(q - p)
    n = 1j * u
    return Line(n, (n.conjugate() * p).real)


def _transport_points(c: GeneralizedCircle):
    if isinstance(c, Circle):
        return [SpherePoint.of(z) for z in c.sample(3)]
    base = c.base_point()
    along = 1j * c.normal
    return [SpherePoint.of(base - along), SpherePoint.of(base + along), SpherePoint.infinity()]


def apply_circle(m: MoebiusMap, c: GeneralizedCircle, tol: float = DEFAULT_TOL) -> GeneralizedCircle:
    """Image circle, fitted through the images of three points of ``c``."""
    images = [apply(m, p) for p in _transport_points(c)]
    return circle_through(*images, tol=tol)


def circle_distance(c1: GeneralizedCircle, c2: GeneralizedCircle) -> float:
    """Parameter distance between two generalized circles of the same variant (inf otherwise)."""
    if isinstance(c1, Circle) and isinstance(c2, Circle):
        return max(abs(c1.center - c2.center), abs(c1.radius - c2.radius))
    if isinstance(c1, Line) and isinstance(c2, Line):
        return max(abs(c1.normal - c2.normal), abs(c1.offset - c2.offset))
    return math.inf


def from_circle_pairing(src: Circle, dst: Circle, fuchsian: bool = True, tol: float = DEFAULT_TOL) -> MoebiusMap:
    """Map sending ``src`` onto ``dst`` and the exterior of ``src`` into the disk of ``dst``.

    Fuchsian mode uses z -> c' - r r' / (z - c) (real entries when both centers
    are real); generic mode uses z -> c' + r r' / (z - c).
    """
    if not (isinstance(src, Circle) and isinstance(dst, Circle)):
        raise TypeError("circle pairings need Circle variants")
    c, r = src.center, src.radius
    cp, rp = dst.center, dst.radius
    if fuchsian:
        if abs(c.imag) > tol or abs(cp.imag) > tol:
            raise NonRealCenters(detail=f"centers {c!r}, {cp!r}")
        c, cp = complex(c.real), complex(cp.real)
        return MoebiusMap.from_entries(cp, -c * cp - r * rp, 1, -c)
    return MoebiusMap.from_entries(cp, r * rp - c * cp, 1, -c)


# -- vectorized helpers used by the limit-set code ---------------------------


def mobius_apply_array(entries, z: np.ndarray) -> np.ndarray:
    a, b, c, d = entries
    return (a * z + b) / (c * z + d)


def circumcircles(z1: np.ndarray, z2: np.ndarray, z3: np.ndarray):
    """Centers and radii of the circles through triples of finite points."""
    w = (z3 - z1) / (z2 - z1)
    center = (z2 - z1) * (w - np.abs(w) ** 2) / (2j * w.imag) + z1
    radius = np.abs(z1 - center)
    return center, radius
