"""Plain SVG writers on the fixed viewport [-10, 10]^2."""

from __future__ import annotations

import math

from .multiarc import ChordDiagram

SIZE = 800
HALF = 10.0
LEVEL_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                "#bcbd22", "#17becf")


def _x(x: float) -> float:
    return (x + HALF) / (2 * HALF) * SIZE


def _y(y: float) -> float:
    return (HALF - y) / (2 * HALF) * SIZE


def _r(r: float) -> float:
    return r / (2 * HALF) * SIZE


def _num(v: float) -> str:
    return f"{v:.4f}"


def _header() -> list[str]:
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
            f'viewBox="0 0 {SIZE} {SIZE}">',
            f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>']


def _circle(cx: float, cy: float, r: float, style: str) -> str:
    return f'<circle cx="{_num(_x(cx))}" cy="{_num(_y(cy))}" r="{_num(_r(r))}" {style}/>'


def limitset_svg(pairing_circles, tree, points) -> str:
    """Pairing circles stroked, deeper disks filled by depth, leaf centers as crosses.

    Depth-1 disks coincide with the pairing disks and are not drawn twice.
    """
    out = _header()
    for c in pairing_circles:
        out.append(_circle(c.center.real, c.center.imag, c.radius, 'fill="none" stroke="black" stroke-width="1"'))
    for k, lvl in enumerate(tree.levels[1:], start=2):
        color = LEVEL_COLORS[(k - 2) % len(LEVEL_COLORS)]
        style = f'fill="{color}" fill-opacity="0.35" stroke="none"'
        for z, r in zip(lvl.centers, lvl.radii):
            out.append(_circle(z.real, z.imag, r, style))
    arm = 2.0
    parts = []
    for p in points:
        if p.is_infinity():
            continue
        z = p.to_complex()
        if abs(z.real) > HALF or abs(z.imag) > HALF:
            continue
        x, y = _x(z.real), _y(z.imag)
        parts.append(f"M{_num(x - arm)} {_num(y)}H{_num(x + arm)}M{_num(x)} {_num(y - arm)}V{_num(y + arm)}")
    if parts:
        out.append(f'<path d="{"".join(parts)}" stroke="black" stroke-width="0.5" fill="none"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _polygon_point(n: int, edge: int, frac: float, radius: float) -> tuple[float, float]:
    """Point at fraction ``frac`` along polygon edge ``edge`` (0-based), counterclockwise."""
    a0 = 2 * math.pi * edge / n
    a1 = 2 * math.pi * (edge + 1) / n
    if n < 3:
        a = a0 + frac * (a1 - a0)
        return radius * math.cos(a), radius * math.sin(a)
    x0, y0 = radius * math.cos(a0), radius * math.sin(a0)
    x1, y1 = radius * math.cos(a1), radius * math.sin(a1)
    return x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)


def multiarc_svg(diagram: ChordDiagram, radius: float = 8.0) -> str:
    n = len(diagram.degrees)
    out = _header()
    if n < 3:
        out.append(_circle(0.0, 0.0, radius, 'fill="none" stroke="black" stroke-width="2"'))
    else:
        verts = [_polygon_point(n, i, 0.0, radius) for i in range(n)]
        pts = " ".join(f"{_num(_x(x))},{_num(_y(y))}" for x, y in verts)
        out.append(f'<polygon points="{pts}" fill="none" stroke="black" stroke-width="2"/>')
    pos = {}
    for i, d in enumerate(diagram.degrees):
        for k in range(1, d + 1):
            pos[(i + 1, k)] = _polygon_point(n, i, k / (d + 1), radius)
        lx, ly = _polygon_point(n, i, 0.5, radius * 1.12)
        out.append(f'<text x="{_num(_x(lx))}" y="{_num(_y(ly))}" font-size="16" text-anchor="middle">e{i + 1}</text>')
    for a, b in diagram.chords:
        (xa, ya), (xb, yb) = pos[a], pos[b]
        out.append(f'<line x1="{_num(_x(xa))}" y1="{_num(_y(ya))}" x2="{_num(_x(xb))}" y2="{_num(_y(yb))}" '
                   f'stroke="#d62728" stroke-width="2"/>')
    for (x, y) in pos.values():
        out.append(f'<circle cx="{_num(_x(x))}" cy="{_num(_y(y))}" r="4" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def points_csv(points) -> str:
    lines = []
    for p in points:
        if p.is_infinity():
            continue
        z = p.to_complex()
        lines.append(f"{z.real!r},{z.imag!r}")
    return "\n".join(lines) + ("\n" if lines else "")

