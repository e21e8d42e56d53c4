"""Non-crossing multiarcs on a polygon with prescribed endpoint counts.

Edge ``i`` (1-based) of an n-gon carries ``delta_i`` marked points, numbered
``1..delta_i`` counterclockwise. A chord joins two points on different edges;
a valid diagram is a non-crossing perfect matching of all the points.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import CapExceeded, Infeasible, InternalInvariantBreach

BRUTE_FORCE_CAP = 12

Point = tuple[int, int]  # (edge, index), both 1-based


def _check_tuple(t: Sequence[int]) -> tuple[int, ...]:
    t = tuple(int(x) for x in t)
    if not t:
        raise ValueError("degree tuple must have at least one entry")
    if any(x < 0 for x in t):
        raise ValueError("degree tuple entries must be non-negative")
    return t


def point_label(p: Point) -> str:
    return f"e{p[0]}.p{p[1]}"


@dataclass(frozen=True)
class ChordDiagram:
    degrees: tuple[int, ...]
    chords: tuple[tuple[Point, Point], ...]

    def points(self) -> list[Point]:
        """All marked points in counterclockwise order."""
        return [(i + 1, k) for i, d in enumerate(self.degrees) for k in range(1, d + 1)]

    def endpoint_counts(self) -> tuple[int, ...]:
        counts = [0] * len(self.degrees)
        for a, b in self.chords:
            counts[a[0] - 1] += 1
            counts[b[0] - 1] += 1
        return tuple(counts)

    def lines(self) -> list[str]:
        return [f"{point_label(a)} -- {point_label(b)}" for a, b in self.chords]


def feasible(t: Sequence[int]) -> bool:
    t = _check_tuple(t)
    s = sum(t)
    return s % 2 == 0 and 2 * max(t) <= s


def construct(t: Sequence[int]) -> ChordDiagram:
    """Canonical non-crossing multiarc, built greedily from the largest edge.

    Each step takes the edge ``j`` with most unmatched points (smallest index
    on ties) and the next edge ``m`` after it that still has unmatched points,
    and joins the last unmatched point on ``j`` to the first one on ``m``.
    Everything between those two points is already matched, so the new chord
    cannot cross an old one.
    """
    t = _check_tuple(t)
    if not feasible(t):
        raise Infeasible(*t)
    n = len(t)
    remaining = list(t)
    lo = [1] * n        # first unmatched index on each edge
    hi = list(t)        # last unmatched index on each edge
    chords = []
    while any(remaining):
        j = max(range(n), key=lambda i: (remaining[i], -i))
        m = next((k % n for k in range(j + 1, j + n) if remaining[k % n] > 0), None)
        if m is None:
            raise InternalInvariantBreach(*t, detail=f"stalled on edge e{j + 1}")
        chords.append(((j + 1, hi[j]), (m + 1, lo[m])))
        hi[j] -= 1
        lo[m] += 1
        remaining[j] -= 1
        remaining[m] -= 1
    diagram = ChordDiagram(t, tuple(chords))
    if not validate(diagram, t):
        raise InternalInvariantBreach(*t, detail="constructed diagram failed validation")
    return diagram


def _crosses(a: int, b: int, c: int, d: int) -> bool:
    """Chords given by positions on a circle; True iff they interleave."""
    if a > b:
        a, b = b, a
    inside_c = a < c < b
    inside_d = a < d < b
    return inside_c != inside_d


def validate(diagram: ChordDiagram, t: Sequence[int]) -> bool:
    t = _check_tuple(t)
    if tuple(diagram.degrees) != t:
        return False
    pts = diagram.points()
    position = {p: i for i, p in enumerate(pts)}
    seen = set()
    for a, b in diagram.chords:
        if a not in position or b not in position:
            return False
        if a[0] == b[0]:
            return False
        if a in seen or b in seen or a == b:
            return False
        seen.update((a, b))
    if len(seen) != len(pts):
        return False
    pos = [(position[a], position[b]) for a, b in diagram.chords]
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            if _crosses(*pos[i], *pos[j]):
                return False
    return diagram.endpoint_counts() == t


def brute_force_exists(t: Sequence[int]) -> bool:
    """Exhaustive search for a non-crossing matching avoiding same-edge chords."""
    t = _check_tuple(t)
    if sum(t) > BRUTE_FORCE_CAP:
        raise CapExceeded(sum(t), detail=f"cap is {BRUTE_FORCE_CAP} points")
    edges = tuple(i for i, d in enumerate(t) for _ in range(d))

    @lru_cache(maxsize=None)
    def match(lo: int, hi: int) -> bool:
        # points lo..hi-1 of the linear order, matched among themselves
        if lo == hi:
            return True
        for k in range(lo + 1, hi, 2):
            if edges[k] != edges[lo] and match(lo + 1, k) and match(k + 1, hi):
                return True
        return False

    return match(0, len(edges))
