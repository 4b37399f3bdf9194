"""Deterministic SVG picture of a window simulation."""

from __future__ import annotations

import numpy as np

from .arrangement import CellComplex

SIZE = 1000
MARGIN = 20
TRIANGLE_FILL = "#e4572e"
CELL_FILL = "#f4f1ea"


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_svg(c: CellComplex) -> str:
    r = c.radius
    scale = (SIZE / 2 - MARGIN) / r
    cx = cy = SIZE / 2

    def xy(p):
        return _fmt(cx + scale * p[0]), _fmt(cy - scale * p[1])

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(scale * r)}" fill="{CELL_FILL}" stroke="black" '
        f'stroke-width="1.5"/>',
    ]
    tri = np.flatnonzero(c.interior_mask & (c.face_corners == 3))
    out.append(f'<g id="triangles" fill="{TRIANGLE_FILL}" fill-opacity="0.8" stroke="none">')
    for f in tri:
        pts = " ".join(",".join(xy(p)) for p in c.face_vertices(int(f)))
        out.append(f'<polygon points="{pts}"/>')
    out.append("</g>")
    out.append('<g id="lines" stroke="black" stroke-width="0.8">')
    for (a, b), line in zip(c.edges, c.edge_line):
        if line < 0:
            continue
        (x1, y1), (x2, y2) = xy(c.vertices[a]), xy(c.vertices[b])
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
