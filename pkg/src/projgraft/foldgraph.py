"""Labeled graphs dual to cellular handlebodies and their Stallings foldings.

Each edge is stored once, with an orientation and a label ``g_k^{+-1}``;
walking it backwards reads the inverse label. Vertex order (the order of
``LabeledGraph.vertices``) and edge ids drive every deterministic choice.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Hashable, Optional, Sequence

from .errors import InvalidLabel, InvalidRank, NotConnected, StalePair


@dataclass(frozen=True, order=True)
class Label:
    gen: int
    sign: int = 1

    def inverse(self) -> "Label":
        return Label(self.gen, -self.sign)

    def __str__(self):
        return f"g{self.gen}{'+' if self.sign > 0 else '-'}"


@dataclass(frozen=True)
class Edge:
    id: int
    src: Hashable
    dst: Hashable
    label: Label


@dataclass(frozen=True)
class HalfEdge:
    """An edge as seen from one of its endpoints."""

    label: Label  # label read when leaving ``vertex`` along the edge
    edge: int
    vertex: Hashable
    far: Hashable
    forward: bool  # True when leaving along the stored orientation


@dataclass(frozen=True)
class LabeledGraph:
    rank: int
    vertices: tuple
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.rank < 1:
            raise InvalidRank(self.rank)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        if len({e.id for e in self.edges}) != len(self.edges):
            raise ValueError("duplicate edge ids")
        known = set(self.vertices)
        for e in self.edges:
            if not (1 <= e.label.gen <= self.rank) or e.label.sign not in (1, -1):
                raise InvalidLabel(e.id, detail=f"label {e.label} outside rank {self.rank}")
            if e.src not in known or e.dst not in known:
                raise ValueError(f"edge {e.id} has an unknown endpoint")
        if not self.vertices:
            raise NotConnected(detail="graph has no vertices")
        if not _connected(self.vertices, self.edges):
            raise NotConnected()

    @classmethod
    def from_edges(cls, rank: int, vertices: Sequence, edges: Sequence) -> "LabeledGraph":
        """Edges as ``(src, dst, gen, sign)`` tuples; ids are list positions."""
        return cls(rank, tuple(vertices),
                   tuple(Edge(k, s, t, Label(gen, sign)) for k, (s, t, gen, sign) in enumerate(edges)))

    @property
    def euler_rank(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def edge(self, edge_id: int) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def half_edges(self, v) -> list[HalfEdge]:
        out = []
        for e in self.edges:
            if e.src == v:
                out.append(HalfEdge(e.label, e.id, v, e.dst, True))
            if e.dst == v:
                out.append(HalfEdge(e.label.inverse(), e.id, v, e.src, False))
        return out

    def degree(self, v) -> int:
        return len(self.half_edges(v))


def _connected(vertices, edges) -> bool:
    adj = {v: [] for v in vertices}
    for e in edges:
        adj[e.src].append(e.dst)
        adj[e.dst].append(e.src)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vertices)


def rose(g: int) -> LabeledGraph:
    if g < 1:
        raise InvalidRank(g)
    return LabeledGraph(g, (0,), tuple(Edge(i - 1, 0, 0, Label(i, 1)) for i in range(1, g + 1)))


# -- folding -----------------------------------------------------------------


@dataclass(frozen=True)
class FoldPair:
    vertex: Hashable
    keep: int
    drop: int
    label: Label


@dataclass(frozen=True)
class FoldEvent:
    vertex: Hashable
    keep: int
    drop: int
    label: Label
    merged: Optional[tuple] = None  # (survivor, absorbed) when two vertices were identified

    @property
    def rank_preserving(self) -> bool:
        """False for the fold of two parallel edges, which kills a cycle."""
        return self.merged is not None

    def line(self) -> str:
        return f"FOLD v={self.vertex} keep={self.keep} drop={self.drop} label={self.label}"


@dataclass(frozen=True)
class FoldTrace:
    events: tuple[FoldEvent, ...] = ()

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def lines(self) -> list[str]:
        return [e.line() for e in self.events]


def foldable_pairs(graph: LabeledGraph) -> list[FoldPair]:
    """Every foldable pair, sorted by (vertex order, label, edge ids)."""
    pairs = []
    for v in graph.vertices:
        by_label: dict[Label, list[int]] = {}
        for h in graph.half_edges(v):
            by_label.setdefault(h.label, []).append(h.edge)
        for label in sorted(by_label):
            ids = sorted(by_label[label])
            for i in range(len(ids)):
                for j in range(i + 1, len(ids)):
                    pairs.append(FoldPair(v, ids[i], ids[j], label))
    return pairs


def find_foldable_pair(graph: LabeledGraph) -> Optional[FoldPair]:
    for v in graph.vertices:
        by_label: dict[Label, list[int]] = {}
        for h in graph.half_edges(v):
            by_label.setdefault(h.label, []).append(h.edge)
        for label in sorted(by_label):
            ids = by_label[label]
            if len(ids) >= 2:
                ids = sorted(ids)
                return FoldPair(v, ids[0], ids[1], label)
    return None


def fold_step(graph: LabeledGraph, pair: FoldPair) -> tuple[LabeledGraph, FoldEvent]:
    """Identify the two edges of ``pair``; merges their far endpoints if distinct."""
    if pair is None or pair.keep == pair.drop:
        raise StalePair(detail="no pair to fold")
    far = {}
    for h in graph.half_edges(pair.vertex) if pair.vertex in graph.vertices else ():
        if h.label == pair.label and h.edge in (pair.keep, pair.drop):
            far[h.edge] = h.far
    if set(far) != {pair.keep, pair.drop}:
        raise StalePair(pair.vertex, pair.keep, pair.drop)
    v1, v2 = far[pair.keep], far[pair.drop]
    merged = None
    rename = {}
    if v1 != v2:
        order = {v: i for i, v in enumerate(graph.vertices)}
        survivor, absorbed = (v1, v2) if order[v1] < order[v2] else (v2, v1)
        rename[absorbed] = survivor
        merged = (survivor, absorbed)
    vertices = tuple(v for v in graph.vertices if v not in rename)
    edges = tuple(
        Edge(e.id, rename.get(e.src, e.src), rename.get(e.dst, e.dst), e.label)
        for e in graph.edges if e.id != pair.drop
    )
    event = FoldEvent(pair.vertex, pair.keep, pair.drop, pair.label, merged)
    return LabeledGraph(graph.rank, vertices, edges), event


def fold_to_completion(graph: LabeledGraph, rng: Optional[random.Random] = None):
    """Fold until no foldable pair is left.

    With ``rng`` the pair is drawn at random among all foldable pairs instead
    of taking the first one in the deterministic order.
    """
    events = []
    while True:
        if rng is None:
            pair = find_foldable_pair(graph)
        else:
            pairs = foldable_pairs(graph)
            pair = rng.choice(pairs) if pairs else None
        if pair is None:
            return graph, FoldTrace(tuple(events))
        graph, event = fold_step(graph, pair)
        events.append(event)


def is_rose(graph: LabeledGraph) -> bool:
    gens = sorted(e.label.gen for e in graph.edges)
    return len(graph.vertices) == 1 and gens == list(range(1, graph.rank + 1))


@dataclass(frozen=True)
class Iso:
    """Folding reached the rose; ``edge_to_gen`` maps surviving edge ids to generators."""

    trace: FoldTrace
    folded: LabeledGraph
    edge_to_gen: dict = field(default_factory=dict)


@dataclass(frozen=True)
class NotRose:
    folded: LabeledGraph
    trace: FoldTrace
    rank: int  # E - V + 1 of the input graph


def decompose_to_rose(graph: LabeledGraph):
    """Folds followed by an isomorphism onto the rose, when they exist.

    A graph whose rank differs from the rose's (so that some fold along the
    way identified parallel edges) is reported as :class:`NotRose` even if
    the folded graph looks like a rose.
    """
    folded, trace = fold_to_completion(graph)
    if graph.euler_rank == graph.rank and is_rose(folded):
        return Iso(trace, folded, {e.id: e.label.gen for e in folded.edges})
    return NotRose(folded, trace, graph.euler_rank)


@dataclass(frozen=True)
class HandlebodySummary:
    three_cells: int
    two_cells: int
    genus: int


def handlebody_summary(graph: LabeledGraph) -> HandlebodySummary:
    return HandlebodySummary(len(graph.vertices), len(graph.edges), graph.euler_rank)


# -- canonical form for label-isomorphism --------------------------------------


def canonical_form(graph: LabeledGraph) -> tuple:
    """Encoding equal for two graphs iff they are isomorphic as labeled graphs.

    Color refinement followed by individualization of the first non-singleton
    cell, taking the lexicographically smallest edge list over all branches.
    """
    oriented = [(e.src, e.dst, e.label.gen) if e.label.sign > 0 else (e.dst, e.src, e.label.gen)
                for e in graph.edges]
    incident = {v: [] for v in graph.vertices}
    for s, t, gen in oriented:
        incident[s].append((1, gen, t))
        incident[t].append((-1, gen, s))
    start = _refine({v: 0 for v in graph.vertices}, incident)
    best = _search(start, incident, oriented)
    return (graph.rank, len(graph.vertices), best)


def _relabel(signatures: dict) -> dict:
    order = {sig: i for i, sig in enumerate(sorted(set(signatures.values())))}
    return {v: order[sig] for v, sig in signatures.items()}


def _refine(colors: dict, incident: dict) -> dict:
    while True:
        sigs = {v: (colors[v], tuple(sorted((d, g, colors[w]) for d, g, w in incident[v])))
                for v in colors}
        new = _relabel(sigs)
        if len(set(new.values())) == len(set(colors.values())):
            return new
        colors = new


def _search(colors: dict, incident: dict, oriented: list) -> tuple:
    cells: dict[int, list] = {}
    for v, c in colors.items():
        cells.setdefault(c, []).append(v)
    split = next((c for c in sorted(cells) if len(cells[c]) > 1), None)
    if split is None:
        return tuple(sorted((colors[s], colors[t], g) for s, t, g in oriented))
    best = None
    for v in cells[split]:
        trial = _relabel({w: (colors[w], 1 if w == v else 0) for w in colors})
        enc = _search(_refine(trial, incident), incident, oriented)
        if best is None or enc < best:
            best = enc
    return best


# -- blowups (inverse folds), used for fixtures --------------------------------


def unfold(graph: LabeledGraph, edge_id: int, reverse: bool, moved: Sequence[tuple[int, str]]) -> LabeledGraph:
    """Inverse of a fold that merges vertices.

    Splits the head ``v`` of the oriented edge into ``v`` and a fresh vertex
    ``v'``, moves the listed edge ends (``(edge_id, "src"|"dst")``) from ``v``
    to ``v'`` and adds an edge from the tail to ``v'`` carrying the same label.
    Folding the old and new edge recovers ``graph``.
    """
    e = graph.edge(edge_id)
    u, v = (e.dst, e.src) if reverse else (e.src, e.dst)
    new_v = max((x for x in graph.vertices if isinstance(x, int)), default=-1) + 1
    new_e = max(x.id for x in graph.edges) + 1 if graph.edges else 0
    moved = set(moved)
    blocked = {(edge_id, "dst" if not reverse else "src")}
    if u == v:
        blocked = {(edge_id, "src"), (edge_id, "dst")}
    if moved & blocked:
        raise ValueError("cannot move the unfolded edge's own end")
    edges = []
    for x in graph.edges:
        src = new_v if (x.id, "src") in moved else x.src
        dst = new_v if (x.id, "dst") in moved else x.dst
        if (x.id, "src") in moved and x.src != v or (x.id, "dst") in moved and x.dst != v:
            raise ValueError("moved ends must sit at the split vertex")
        edges.append(Edge(x.id, src, dst, x.label))
    if reverse:
        edges.append(Edge(new_e, new_v, u, e.label))
    else:
        edges.append(Edge(new_e, u, new_v, e.label))
    return LabeledGraph(graph.rank, graph.vertices + (new_v,), tuple(edges))


def random_blowup(g: int, unfolds: int, rng: random.Random, min_degree: int = 1) -> LabeledGraph:
    """``rose(g)`` blown up by ``unfolds`` random inverse folds.

    With ``min_degree=2`` every vertex of the result has degree >= 2.
    """
    graph = rose(g)
    for _ in range(unfolds):
        for _attempt in range(100):
            e = rng.choice(graph.edges)
            reverse = rng.random() < 0.5
            u, v = (e.dst, e.src) if reverse else (e.src, e.dst)
            own = {(e.id, "dst" if not reverse else "src")}
            if u == v:
                own = {(e.id, "src"), (e.id, "dst")}
            ends = [(x.id, "src") for x in graph.edges if x.src == v]
            ends += [(x.id, "dst") for x in graph.edges if x.dst == v]
            free = [h for h in ends if h not in own]
            lo = 1 if min_degree >= 2 else 0
            hi = len(free) - (1 if min_degree >= 2 and u != v else 0)
            if min_degree >= 2 and u == v:
                hi = len(free)
            if hi < lo:
                continue
            k = rng.randint(lo, hi)
            moved = rng.sample(free, k)
            candidate = unfold(graph, e.id, reverse, moved)
            if min(candidate.degree(x) for x in candidate.vertices) >= min_degree:
                graph = candidate
                break
        else:
            raise RuntimeError("could not find an admissible unfold")
    return graph
