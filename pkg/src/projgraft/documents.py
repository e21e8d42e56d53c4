"""JSON documents for groups, graphs and grafting presentations.

Syntax errors carry ``line:col``; schema errors carry a ``$.path`` into the
document. Both are :class:`InputError` subclasses.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

from .errors import DocumentError, ParseError, ProjGraftError
from .foldgraph import Edge, Label, LabeledGraph
from .graftcalc import (
    AdmissibleLoop,
    CarrierArc,
    Component,
    GraftingPresentation,
    HoledSphereChart,
    Quality,
)
from .moebius import Circle
from .schottky import GroupWord, SchottkyGroup


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{err.lineno}:{err.colno}", err.msg) from None


def load(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise DocumentError(str(path), err.strerror or "cannot read file") from None
    return loads(text)


def _field(obj, key: str, path: str, kind, optional: bool = False, default=None):
    if not isinstance(obj, dict):
        raise DocumentError(path, "expected an object")
    if key not in obj:
        if optional:
            return default
        raise DocumentError(f"{path}.{key}", "missing field")
    value = obj[key]
    kinds = kind if isinstance(kind, tuple) else (kind,)
    if float in kinds and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if isinstance(value, bool) and bool not in kinds:
        raise DocumentError(f"{path}.{key}", f"expected {_kind_name(kinds)}")
    if not isinstance(value, kinds):
        raise DocumentError(f"{path}.{key}", f"expected {_kind_name(kinds)}")
    return value


def _kind_name(kinds) -> str:
    names = {int: "integer", float: "number", str: "string", bool: "boolean", list: "array", dict: "object"}
    return " or ".join(names.get(k, k.__name__) for k in kinds)


# -- schottky -----------------------------------------------------------------------


def _circle(obj, path: str) -> Circle:
    cx = _field(obj, "cx", path, float)
    cy = _field(obj, "cy", path, float)
    r = _field(obj, "r", path, float)
    if not r > 0:
        raise DocumentError(f"{path}.r", "radius must be positive")
    return Circle(complex(cx, cy), r)


def schottky_from_doc(doc, path: str = "$", tol: Optional[float] = None, verify: bool = True) -> SchottkyGroup:
    rank = _field(doc, "rank", path, int)
    pairs = _field(doc, "pairs", path, list)
    fuchsian = _field(doc, "fuchsian", path, bool, optional=True, default=True)
    doc_tol = _field(doc, "tol", path, float, optional=True, default=1e-9)
    if rank != len(pairs):
        raise DocumentError(f"{path}.rank", f"rank {rank} but {len(pairs)} pairs")
    if rank < 1:
        raise DocumentError(f"{path}.rank", "rank must be at least 1")
    circles = []
    for k, pair in enumerate(pairs):
        p = f"{path}.pairs[{k}]"
        circles.append((_circle(_field(pair, "src", p, dict), f"{p}.src"),
                        _circle(_field(pair, "dst", p, dict), f"{p}.dst")))
    return SchottkyGroup.build(circles, fuchsian=fuchsian, tol=doc_tol if tol is None else tol, verify=verify)


def schottky_to_doc(group: SchottkyGroup) -> dict:
    def circ(c: Circle):
        return {"cx": c.center.real, "cy": c.center.imag, "r": c.radius}
    return {"rank": group.rank, "pairs": [{"src": circ(s), "dst": circ(d)} for s, d in group.pairing],
            "fuchsian": group.fuchsian, "tol": group.tol}


# -- graphs -------------------------------------------------------------------------


def graph_from_doc(doc, path: str = "$") -> LabeledGraph:
    rank = _field(doc, "rank", path, int)
    vertices = _field(doc, "vertices", path, list)
    for k, v in enumerate(vertices):
        if not isinstance(v, (int, str)) or isinstance(v, bool):
            raise DocumentError(f"{path}.vertices[{k}]", "vertex ids are integers or strings")
    if len(set(vertices)) != len(vertices):
        raise DocumentError(f"{path}.vertices", "duplicate vertex id")
    known = set(vertices)
    edges = []
    for k, e in enumerate(_field(doc, "edges", path, list)):
        p = f"{path}.edges[{k}]"
        src = _field(e, "from", p, (int, str))
        dst = _field(e, "to", p, (int, str))
        gen = _field(e, "gen", p, int)
        sign = _field(e, "sign", p, int, optional=True, default=1)
        if sign not in (1, -1):
            raise DocumentError(f"{p}.sign", "sign must be 1 or -1")
        for key, v in (("from", src), ("to", dst)):
            if v not in known:
                raise DocumentError(f"{p}.{key}", f"unknown vertex {v!r}")
        edges.append(Edge(k, src, dst, Label(gen, sign)))
    return LabeledGraph(rank, tuple(vertices), tuple(edges))


def graph_to_doc(graph: LabeledGraph) -> dict:
    edges = sorted(graph.edges, key=lambda e: e.id)
    return {"rank": graph.rank, "vertices": list(graph.vertices),
            "edges": [{"from": e.src, "to": e.dst, "gen": e.label.gen, "sign": e.label.sign} for e in edges]}


# -- presentations ------------------------------------------------------------------


def _side(text, path: str):
    if not isinstance(text, str) or "." not in text:
        raise DocumentError(path, "expected \"piece.boundary\"")
    piece, boundary = text.split(".", 1)
    if not piece or not boundary:
        raise DocumentError(path, "expected \"piece.boundary\"")
    return (piece, boundary)


def _components(items, path: str) -> tuple[Component, ...]:
    out = []
    for k, b in enumerate(items):
        p = f"{path}[{k}]"
        out.append(Component(_field(b, "id", p, str), _field(b, "deg", p, int, optional=True, default=1),
                             _field(b, "support", p, str, optional=True)))
    return tuple(out)


def presentation_from_doc(doc, path: str = "$", tol: Optional[float] = None) -> GraftingPresentation:
    genus = _field(doc, "genus", path, int)
    group = schottky_from_doc(_field(doc, "group", path, dict), f"{path}.group", tol=tol)
    marking = graph_from_doc(_field(doc, "marking", path, dict), f"{path}.marking")
    pieces = []
    for k, item in enumerate(_field(doc, "pieces", path, list)):
        p = f"{path}.pieces[{k}]"
        pid = _field(item, "id", p, str)
        bounds = _components(_field(item, "boundaries", p, list), f"{p}.boundaries")
        punct = _components(_field(item, "punctures", p, list, optional=True, default=[]), f"{p}.punctures")
        default_q = "Basic" if all(c.degree == 1 for c in bounds + punct) else "Good"
        qname = _field(item, "quality", p, str, optional=True, default=default_q)
        try:
            quality = Quality(qname)
        except ValueError:
            raise DocumentError(f"{p}.quality", f"unknown quality {qname!r}") from None
        pieces.append(HoledSphereChart(pid, bounds, punct, quality))
    gluing = []
    for k, pair in enumerate(_field(doc, "gluing", path, list)):
        p = f"{path}.gluing[{k}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise DocumentError(p, "expected a pair of sides")
        gluing.append((_side(pair[0], f"{p}[0]"), _side(pair[1], f"{p}[1]")))
    loops = []
    for k, item in enumerate(_field(doc, "loops", path, list, optional=True, default=[])):
        p = f"{path}.loops[{k}]"
        text = _field(item, "word", p, str, optional=True)
        try:
            word = GroupWord.parse(text) if text is not None else None
        except ProjGraftError as err:
            raise DocumentError(f"{p}.word", str(err)) from None
        carrier = []
        for j, arc in enumerate(_field(item, "carrier", p, list, optional=True, default=[])):
            q = f"{p}.carrier[{j}]"
            if not isinstance(arc, list) or len(arc) not in (3, 5):
                raise DocumentError(q, "expected [piece, b_in, b_out] or [piece, b_in, b_out, slot_in, slot_out]")
            if not all(isinstance(x, str) for x in arc[:3]):
                raise DocumentError(q, "piece and boundary ids are strings")
            slots = arc[3:] if len(arc) == 5 else (None, None)
            if any(s is not None and (not isinstance(s, int) or isinstance(s, bool)) for s in slots):
                raise DocumentError(q, "slots are integers")
            carrier.append(CarrierArc(arc[0], arc[1], arc[2], *slots))
        if word is None and not carrier:
            raise DocumentError(p, "loop needs a word or a carrier")
        loops.append(AdmissibleLoop(word, tuple(carrier)))
    return GraftingPresentation(genus, group, marking, tuple(pieces), tuple(gluing), tuple(loops))


def presentation_to_doc(p: GraftingPresentation) -> dict:
    def comps(cs):
        return [{"id": c.id, "deg": c.degree} | ({"support": c.support} if c.support else {}) for c in cs]
    pieces = []
    for piece in p.pieces:
        item = {"id": piece.id, "boundaries": comps(piece.boundaries)}
        if piece.punctures:
            item["punctures"] = comps(piece.punctures)
        pieces.append(item)
    loops = []
    for loop in p.loops:
        item = {}
        if loop.word is not None:
            item["word"] = str(loop.word)
        if loop.carrier:
            item["carrier"] = [[a.piece, a.b_in, a.b_out] + ([a.slot_in, a.slot_out] if a.slot_in is not None else [])
                               for a in loop.carrier]
        loops.append(item)
    return {"genus": p.genus, "group": schottky_to_doc(p.group), "marking": graph_to_doc(p.marking),
            "pieces": pieces, "gluing": [[f"{a[0]}.{a[1]}", f"{b[0]}.{b[1]}"] for a, b in p.gluing],
            "loops": loops}


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"
