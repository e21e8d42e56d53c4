"""Combinatorial grafting calculus on holed spheres.

A surface is cut along meridians into holed-sphere pieces. Each piece keeps
a degree per boundary component (how many times that boundary covers its
support) and grafting arcs raise these degrees. Loops of the grafting
multiloop are carried as cyclic lists of arcs, one per piece visited.

Conventions:

* gluing entry ``k`` pairs two sides ``(piece, boundary)`` and corresponds to
  edge ``k`` of the marking graph, oriented from the piece of the first side
  to the piece of the second. Crossing from the first side to the second
  reads the edge label, the other way reads its inverse;
* arc endpoints on a side are numbered by slots ``1..c``; slot ``s`` on one
  side continues as slot ``s`` on the glued side.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import networkx as nx

from .errors import (
    AmbiguousClassification,
    CarrierBroken,
    CarrierOverlap,
    DegreeMismatch,
    EndpointMismatch,
    EulerMismatch,
    GluingError,
    InadmissibleLoopFormed,
    InvalidChart,
    MarkingMismatch,
    NotAdmissible,
    ProjGraftError,
    RHViolation,
    SameBoundary,
    UnknownBoundary,
    WordMismatch,
)
from .foldgraph import Iso, LabeledGraph, decompose_to_rose
from .moebius import MapClass, classify
from .multiarc import ChordDiagram
from .schottky import GroupWord, SchottkyGroup, evaluate, reduce

ADMISSIBLE_TOL = 1e-8

Side = tuple[str, str]  # (piece id, boundary id)


class Quality(enum.Enum):
    BASIC = "Basic"
    GOOD = "Good"
    ALMOST_GOOD = "AlmostGood"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Component:
    """A boundary circle or puncture of a chart, with its covering degree."""

    id: str
    degree: int = 1
    support: Optional[str] = None


@dataclass(frozen=True)
class HoledSphereChart:
    id: str
    boundaries: tuple[Component, ...]
    punctures: tuple[Component, ...] = ()
    quality: Quality = Quality.BASIC

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        object.__setattr__(self, "punctures", tuple(self.punctures))
        comps = self.components
        ids = [c.id for c in comps]
        if len(set(ids)) != len(ids):
            raise InvalidChart(self.id, detail="duplicate component ids")
        if len(comps) < 2:
            raise InvalidChart(self.id, detail="a chart needs at least two boundary or puncture components")
        if any(c.degree < 1 for c in comps):
            raise InvalidChart(self.id, detail="degrees must be at least 1")
        if self.quality is Quality.BASIC and any(c.degree != 1 for c in comps):
            raise InvalidChart(self.id, detail="basic charts have all degrees 1")
        if self.quality is Quality.GOOD:
            supports = [c.support or c.id for c in comps]
            if len(set(supports)) != len(supports):
                raise InvalidChart(self.id, detail="good charts cover distinct supports")

    @classmethod
    def basic(cls, id: str, boundary_ids: Sequence[str]) -> "HoledSphereChart":
        return cls(id, tuple(Component(b) for b in boundary_ids))

    @property
    def components(self) -> tuple[Component, ...]:
        return self.boundaries + self.punctures

    @property
    def boundary_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.boundaries)

    def degrees(self) -> tuple[int, ...]:
        return tuple(c.degree for c in self.components)

    def degree(self, component_id: str) -> int:
        for c in self.components:
            if c.id == component_id:
                return c.degree
        raise UnknownBoundary(self.id, component_id)

    @property
    def euler_characteristic(self) -> int:
        return 2 - len(self.components)

    def as_basic(self) -> "HoledSphereChart":
        return HoledSphereChart(self.id, tuple(replace(c, degree=1) for c in self.boundaries),
                                tuple(replace(c, degree=1) for c in self.punctures), Quality.BASIC)


def graft_arc(chart: HoledSphereChart, arc: tuple[str, str]) -> HoledSphereChart:
    """Graft along an arc joining two boundary components; both degrees go up by one."""
    a, b = arc
    if a == b:
        raise SameBoundary(chart.id, a)
    known = chart.boundary_ids
    for x in (a, b):
        if x not in known:
            raise UnknownBoundary(chart.id, x)
    bounds = tuple(replace(c, degree=c.degree + 1) if c.id in (a, b) else c for c in chart.boundaries)
    quality = Quality.GOOD if chart.quality is Quality.BASIC else chart.quality
    return HoledSphereChart(chart.id, bounds, chart.punctures, quality)


def graft_multiarc(chart: HoledSphereChart, diagram: ChordDiagram) -> HoledSphereChart:
    """Graft a basic chart along a chord diagram; polygon edge i is boundary i."""
    if chart.quality is not Quality.BASIC:
        raise InvalidChart(chart.id, detail="multiarc grafting starts from a basic chart")
    if len(diagram.degrees) != len(chart.boundaries):
        raise InvalidChart(chart.id, detail=f"diagram has {len(diagram.degrees)} edges, chart has "
                                            f"{len(chart.boundaries)} boundaries")
    ids = chart.boundary_ids
    for (ea, _), (eb, _) in diagram.chords:
        chart = graft_arc(chart, (ids[ea - 1], ids[eb - 1]))
    return chart


def cover_degree(chart: HoledSphereChart) -> int:
    excess = sum(d - 1 for d in chart.degrees())
    if excess % 2:
        raise RHViolation(chart.id, detail=f"total ramification {excess} is odd")
    return 1 + excess // 2


def riemann_hurwitz_check(d: int, degrees: Sequence[int]) -> bool:
    degrees = list(degrees)
    if d < 1 or any(x < 1 for x in degrees):
        return False
    return 2 * (d - 1) == sum(x - 1 for x in degrees) and max(degrees, default=1) <= d


# -- presentations --------------------------------------------------------------


@dataclass(frozen=True)
class CarrierArc:
    """Arc inside ``piece`` entering through ``b_in`` and leaving through ``b_out``."""

    piece: str
    b_in: str
    b_out: str
    slot_in: Optional[int] = None
    slot_out: Optional[int] = None


@dataclass(frozen=True)
class AdmissibleLoop:
    word: Optional[GroupWord]
    carrier: tuple[CarrierArc, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "carrier", tuple(self.carrier))


def side_label(side: Side) -> str:
    return f"{side[0]}.{side[1]}"


@dataclass(frozen=True)
class GraftingPresentation:
    genus: int
    group: SchottkyGroup
    marking: LabeledGraph
    pieces: tuple[HoledSphereChart, ...]
    gluing: tuple[tuple[Side, Side], ...]
    loops: tuple[AdmissibleLoop, ...] = ()
    _partner: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "gluing", tuple((tuple(a), tuple(b)) for a, b in self.gluing))
        object.__setattr__(self, "loops", tuple(self.loops))
        partner = {}
        for k, (a, b) in enumerate(self.gluing):
            partner.setdefault(a, []).append((k, 0, b))
            partner.setdefault(b, []).append((k, 1, a))
        object.__setattr__(self, "_partner", partner)

    def piece(self, piece_id: str) -> HoledSphereChart:
        for p in self.pieces:
            if p.id == piece_id:
                return p
        raise UnknownBoundary(piece_id, detail="no such piece")

    def crossing(self, side: Side) -> tuple[int, int, Side]:
        """``(gluing index, position of side in the entry, glued side)``."""
        entries = self._partner.get(side)
        if not entries or len(entries) != 1:
            raise GluingError(side_label(side), detail="side is not glued exactly once")
        return entries[0]

    def verify(self) -> None:
        """Raise the first failing invariant."""
        for result in verify_presentation(self):
            if not result.ok:
                raise result.error


def euler_characteristic(p: GraftingPresentation) -> int:
    return sum(piece.euler_characteristic for piece in p.pieces)


def carrier_word(p: GraftingPresentation, loop: AdmissibleLoop) -> GroupWord:
    """Holonomy word read off the carrier through the marking labels."""
    carrier = loop.carrier
    if not carrier:
        raise CarrierBroken(detail="empty carrier")
    edges = sorted(p.marking.edges, key=lambda e: e.id)
    letters = []
    for i, arc in enumerate(carrier):
        nxt = carrier[(i + 1) % len(carrier)]
        try:
            piece = p.piece(arc.piece)
        except UnknownBoundary:
            raise CarrierBroken(i, detail=f"unknown piece {arc.piece}") from None
        if arc.b_in not in piece.boundary_ids or arc.b_out not in piece.boundary_ids:
            raise CarrierBroken(i, detail=f"arc {arc.b_in}->{arc.b_out} leaves piece {arc.piece}")
        if arc.b_in == arc.b_out:
            raise CarrierBroken(i, detail="arc must join distinct boundaries")
        k, pos, glued = p.crossing((arc.piece, arc.b_out))
        if glued != (nxt.piece, nxt.b_in):
            raise CarrierBroken(i, detail=f"{side_label((arc.piece, arc.b_out))} is glued to "
                                          f"{side_label(glued)}, not {side_label((nxt.piece, nxt.b_in))}")
        if arc.slot_out is not None and nxt.slot_in is not None and arc.slot_out != nxt.slot_in:
            raise CarrierBroken(i, detail="slot numbers do not continue across the meridian")
        if k >= len(edges):
            raise MarkingMismatch(k, detail="gluing entry without a marking edge")
        label = edges[k].label
        letters.append((label.gen, label.sign if pos == 0 else -label.sign))
    return reduce(letters)


def loop_word(p: GraftingPresentation, loop: AdmissibleLoop) -> GroupWord:
    """The carrier word when there is a carrier, else the stated word."""
    if loop.carrier:
        word = carrier_word(p, loop)
        if loop.word is not None and reduce(loop.word) != word:
            raise WordMismatch(str(loop.word), str(word))
        return word
    if loop.word is None:
        raise CarrierBroken(detail="loop has neither a word nor a carrier")
    return reduce(loop.word)


def word_admissible(group: SchottkyGroup, word: GroupWord, tol: float = ADMISSIBLE_TOL) -> bool:
    word = reduce(word)
    if len(word) == 0:
        return False
    try:
        return classify(evaluate(group, word), tol) is MapClass.LOXODROMIC
    except AmbiguousClassification:
        return False


def admissible(p: GraftingPresentation, loop: AdmissibleLoop, tol: float = ADMISSIBLE_TOL) -> bool:
    return word_admissible(p.group, loop_word(p, loop), tol)


def endpoint_counts(p: GraftingPresentation) -> dict[Side, int]:
    counts = {(piece.id, b): 0 for piece in p.pieces for b in piece.boundary_ids}
    for loop in p.loops:
        for arc in loop.carrier:
            for b in (arc.b_in, arc.b_out):
                counts[(arc.piece, b)] = counts.get((arc.piece, b), 0) + 1
    return counts


# -- invariant checks -----------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""
    error: Optional[ProjGraftError] = None

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        text = f"{status} {self.name}"
        if self.detail:
            text += f" {self.detail}"
        if self.error is not None:
            text += f" {self.error}"
        return text


def check_gluing(p: GraftingPresentation) -> str:
    sides = [(piece.id, b) for piece in p.pieces for b in piece.boundary_ids]
    glued = [s for pair in p.gluing for s in pair]
    known = set(sides)
    for s in glued:
        if s not in known:
            raise GluingError(side_label(s), detail="unknown side")
    if len(set(glued)) != len(glued):
        dup = next(s for s in glued if glued.count(s) > 1)
        raise GluingError(side_label(dup), detail="side glued twice")
    missing = [s for s in sides if s not in set(glued)]
    if missing:
        raise GluingError(side_label(missing[0]), detail="side left unglued")
    return f"meridians={len(p.gluing)}"


def check_marking(p: GraftingPresentation) -> str:
    m = p.marking
    if not (p.genus == p.group.rank == m.rank):
        raise MarkingMismatch(detail=f"genus {p.genus}, group rank {p.group.rank}, marking rank {m.rank}")
    vertices = sorted(str(v) for v in m.vertices)
    if vertices != sorted(piece.id for piece in p.pieces):
        raise MarkingMismatch(detail="marking vertices differ from piece ids")
    edges = sorted(m.edges, key=lambda e: e.id)
    if len(edges) != len(p.gluing):
        raise MarkingMismatch(detail=f"{len(edges)} marking edges for {len(p.gluing)} meridians")
    for k, (e, (a, b)) in enumerate(zip(edges, p.gluing)):
        if (str(e.src), str(e.dst)) != (a[0], b[0]):
            raise MarkingMismatch(k, detail=f"edge {e.id} runs {e.src}->{e.dst}, meridian {k} joins {a[0]}-{b[0]}")
    return f"edges={len(edges)}"


def check_euler(p: GraftingPresentation) -> str:
    chi = euler_characteristic(p)
    if chi != 2 - 2 * p.genus:
        raise EulerMismatch(chi, 2 - 2 * p.genus)
    return f"chi={chi}"


def check_endpoints(p: GraftingPresentation) -> str:
    counts = endpoint_counts(p)
    for a, b in p.gluing:
        ca, cb = counts.get(a, 0), counts.get(b, 0)
        if ca != cb:
            raise EndpointMismatch(f"{side_label(a)}:{side_label(b)}", ca, cb)
        da, db = p.piece(a[0]).degree(a[1]), p.piece(b[0]).degree(b[1])
        if da != db or da != ca + 1:
            raise DegreeMismatch(f"{side_label(a)}:{side_label(b)}",
                                 detail=f"degrees ({da},{db}) with {ca} arc endpoints per side")
    return f"endpoints={sum(counts.values())}"


def check_piece_rh(p: GraftingPresentation) -> str:
    for piece in p.pieces:
        d = cover_degree(piece)
        if not riemann_hurwitz_check(d, piece.degrees()):
            raise RHViolation(piece.id, detail=f"d={d} degrees={piece.degrees()}")
    return f"pieces={len(p.pieces)}"


def check_loops(p: GraftingPresentation) -> str:
    for i, loop in enumerate(p.loops):
        if not admissible(p, loop):
            raise NotAdmissible(i, detail=f"word {loop_word(p, loop) if loop.carrier else reduce(loop.word)}")
    return f"loops={len(p.loops)}"


def check_marking_rose(p: GraftingPresentation) -> str:
    result = decompose_to_rose(p.marking)
    if not isinstance(result, Iso):
        raise MarkingMismatch(detail=f"marking does not fold to the rose (rank {result.rank})")
    return f"folds={len(result.trace)}"


CHECKS = (
    ("gluing", check_gluing),
    ("marking", check_marking),
    ("euler", check_euler),
    ("endpoints", check_endpoints),
    ("riemann-hurwitz", check_piece_rh),
    ("admissible", check_loops),
    ("rose", check_marking_rose),
)


def verify_presentation(p: GraftingPresentation) -> list[CheckResult]:
    """Run every invariant check in a fixed order; later checks that depend on
    a failed structural check are reported as failures of their own."""
    results = []
    for name, check in CHECKS:
        try:
            results.append(CheckResult(name, True, check(p)))
        except ProjGraftError as err:
            results.append(CheckResult(name, False, error=err))
    return results


# -- grafting loops and assembling ------------------------------------------------


def _slotted(p: GraftingPresentation, loop: AdmissibleLoop, counts: dict[Side, int]) -> AdmissibleLoop:
    """Give every crossing of ``loop`` the next free slot on its meridian."""
    carrier = list(loop.carrier)
    n = len(carrier)
    slots_out = [0] * n
    for i, arc in enumerate(carrier):
        side = (arc.piece, arc.b_out)
        _, _, glued = p.crossing(side)
        s = counts.get(side, 0) + 1
        counts[side] = s
        counts[glued] = counts.get(glued, 0) + 1
        slots_out[i] = s
    arcs = tuple(replace(arc, slot_in=slots_out[i - 1], slot_out=slots_out[i]) for i, arc in enumerate(carrier))
    return AdmissibleLoop(loop.word, arcs)


def with_slots(p: GraftingPresentation) -> GraftingPresentation:
    """Fill in slot numbers by crossing order when the carriers carry none."""
    if all(a.slot_in is not None for loop in p.loops for a in loop.carrier):
        return p
    counts: dict[Side, int] = {}
    loops = tuple(_slotted(p, loop, counts) if loop.carrier else loop for loop in p.loops)
    return replace(p, loops=loops)


def _check_planar(p: GraftingPresentation) -> None:
    for piece in p.pieces:
        g = nx.Graph()
        for loop in p.loops:
            for arc in loop.carrier:
                if arc.piece == piece.id:
                    g.add_edge(arc.b_in, arc.b_out)
        planar, _ = nx.check_planarity(g)
        if not planar:
            raise CarrierOverlap(piece.id, detail="arcs cannot be drawn disjointly on this piece")


def graft_loop(p: GraftingPresentation, loop: AdmissibleLoop) -> GraftingPresentation:
    """Append ``loop`` to the multiloop and graft every arc of its carrier."""
    if not admissible(p, loop):
        raise NotAdmissible(detail=f"word {loop_word(p, loop)}")
    if loop.carrier:
        p = with_slots(p)
        loop = _slotted(p, loop, endpoint_counts(p))
    word = loop_word(p, loop)
    pieces = {piece.id: piece for piece in p.pieces}
    for arc in loop.carrier:
        pieces[arc.piece] = graft_arc(pieces[arc.piece], (arc.b_in, arc.b_out))
    out = replace(p, pieces=tuple(pieces[piece.id] for piece in p.pieces),
                  loops=p.loops + (AdmissibleLoop(word, loop.carrier),))
    _check_planar(out)
    out.verify()
    return out


def assemble(group: SchottkyGroup, genus: int, marking: LabeledGraph, pieces: Sequence[HoledSphereChart],
             gluing: Sequence[tuple[Side, Side]], arcs: dict) -> GraftingPresentation:
    """Chain per-piece arcs across the meridians into closed loops.

    ``arcs[piece_id]`` lists arcs ``(b1, b2)`` or ``(b1, b2, slot1, slot2)``.
    Without slots, endpoints on a side are numbered in order of appearance.
    Loops start at the first unused arc (piece order, then list order) and
    leave it through its second endpoint.
    """
    pieces = tuple(pieces)
    for piece in pieces:
        if piece.quality is not Quality.BASIC:
            raise InvalidChart(piece.id, detail="assemble expects basic pieces")
    base = GraftingPresentation(genus, group, marking, pieces, tuple(gluing))
    check_gluing(base)

    ends: list[tuple[tuple, tuple]] = []  # per arc: ((piece, b1, s1), (piece, b2, s2))
    counter: dict[Side, int] = {}
    for piece in pieces:
        for raw in arcs.get(piece.id, ()):
            b1, b2 = raw[0], raw[1]
            for b in (b1, b2):
                if b not in piece.boundary_ids:
                    raise UnknownBoundary(piece.id, b)
            if b1 == b2:
                raise SameBoundary(piece.id, b1)
            slots = []
            for b, given in ((b1, raw[2] if len(raw) > 2 else None), (b2, raw[3] if len(raw) > 3 else None)):
                counter[(piece.id, b)] = counter.get((piece.id, b), 0) + 1
                slots.append(given if given is not None else counter[(piece.id, b)])
            ends.append(((piece.id, b1, slots[0]), (piece.id, b2, slots[1])))

    for a, b in base.gluing:
        ca, cb = counter.get(a, 0), counter.get(b, 0)
        if ca != cb:
            raise EndpointMismatch(f"{side_label(a)}:{side_label(b)}", ca, cb)
    where = {}
    for idx, pair in enumerate(ends):
        for e, end in enumerate(pair):
            if end in where:
                raise GluingError(side_label(end[:2]), detail=f"slot {end[2]} used twice")
            where[end] = (idx, e)
    for (piece_id, b, s) in where:
        if not 1 <= s <= counter[(piece_id, b)]:
            raise GluingError(side_label((piece_id, b)), detail=f"slot {s} out of range")

    used = [False] * len(ends)
    loops = []
    for start in range(len(ends)):
        if used[start]:
            continue
        carrier = []
        idx, enter = start, 0
        while not used[idx]:
            used[idx] = True
            ein, eout = ends[idx][enter], ends[idx][1 - enter]
            carrier.append(CarrierArc(ein[0], ein[1], eout[1], ein[2], eout[2]))
            _, _, glued = base.crossing(eout[:2])
            idx, enter = where[(glued[0], glued[1], eout[2])]
        loop = AdmissibleLoop(None, tuple(carrier))
        word = carrier_word(base, loop)
        if not word_admissible(group, word):
            raise InadmissibleLoopFormed(len(loops), detail=f"word {word}")
        loops.append(AdmissibleLoop(word, loop.carrier))

    charts = {piece.id: piece for piece in pieces}
    for loop in loops:
        for arc in loop.carrier:
            charts[arc.piece] = graft_arc(charts[arc.piece], (arc.b_in, arc.b_out))
    out = replace(base, pieces=tuple(charts[piece.id] for piece in pieces), loops=tuple(loops))
    out.verify()
    return out


def split(p: GraftingPresentation):
    """Inverse of :func:`assemble`: basic pieces, gluing and per-piece slotted arcs."""
    p = with_slots(p)
    arcs: dict[str, list] = {piece.id: [] for piece in p.pieces}
    for loop in p.loops:
        for arc in loop.carrier:
            arcs[arc.piece].append((arc.b_in, arc.b_out, arc.slot_in, arc.slot_out))
    return (p.group, p.genus, p.marking, tuple(piece.as_basic() for piece in p.pieces), p.gluing, arcs)


def degree_table(p: GraftingPresentation) -> list[tuple[str, tuple[int, ...], int]]:
    """Per piece: ``(id, component degrees, cover degree)``."""
    return [(piece.id, piece.degrees(), cover_degree(piece)) for piece in p.pieces]


# -- building presentations from a marking graph -----------------------------------


def presentation_from_marking(group: SchottkyGroup, marking: LabeledGraph) -> GraftingPresentation:
    """Zero-arc presentation with one basic piece per marking vertex.

    Edge ``k`` from ``u`` to ``v`` becomes the meridian gluing ``u.o<k>`` to
    ``v.i<k>``.
    """
    bounds: dict = {v: [] for v in marking.vertices}
    gluing = []
    for e in sorted(marking.edges, key=lambda e: e.id):
        bounds[e.src].append(f"o{e.id}")
        bounds[e.dst].append(f"i{e.id}")
        gluing.append(((str(e.src), f"o{e.id}"), (str(e.dst), f"i{e.id}")))
    pieces = tuple(HoledSphereChart.basic(str(v), bounds[v]) for v in marking.vertices)
    renumbered = LabeledGraph(marking.rank, tuple(str(v) for v in marking.vertices),
                              tuple(replace(e, id=k, src=str(e.src), dst=str(e.dst))
                                    for k, e in enumerate(sorted(marking.edges, key=lambda e: e.id))))
    return GraftingPresentation(marking.rank, group, renumbered, pieces, tuple(gluing))


def random_carrier(p: GraftingPresentation, rng, max_len: int = 12) -> Optional[tuple[CarrierArc, ...]]:
    """A random closed carrier that never leaves a piece through the side it entered.

    Returns ``None`` when the walk did not close within ``max_len`` crossings.
    """
    piece = rng.choice(p.pieces)
    first_out = (piece.id, rng.choice(piece.boundary_ids))
    outs = [first_out]
    ins = []
    for _ in range(max_len):
        _, _, entered = p.crossing(outs[-1])
        ins.append(entered)
        if entered[0] == first_out[0] and entered[1] != first_out[1] and rng.random() < 0.5:
            arcs = [CarrierArc(first_out[0], ins[-1][1], first_out[1])]
            arcs += [CarrierArc(o[0], i[1], o[1]) for i, o in zip(ins, outs[1:])]
            return tuple(arcs)
        here = p.piece(entered[0])
        outs.append((here.id, rng.choice([b for b in here.boundary_ids if b != entered[1]])))
    return None
