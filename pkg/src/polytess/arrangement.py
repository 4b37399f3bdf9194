"""Planar subdivision of a disk by a finite set of lines, and cell statistics.

The complex is built in array form: all pairwise intersections inside the
window, sorted along each line, become line edges; chord endpoints split the
window circle into arcs.  Half-edges are sorted by outgoing angle around each
vertex, ``next`` pointers follow the usual "turn to the clockwise neighbour
of the twin" rule, and faces are the cycles of ``next``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .geometry import EPS_PARALLEL, ConvexPolygon, Line
from .lines import LineArrays

SNAP_REL = 1e-9
EPS_ON_REL = 1e-9
TWO_PI = 2.0 * math.pi


@dataclass
class CellComplex:
    radius: float
    vertices: np.ndarray          # (V, 2)
    on_circle: np.ndarray         # (V,) bool
    edges: np.ndarray             # (E, 2) vertex ids
    edge_line: np.ndarray         # (E,) supporting line id, -1 for circle arcs
    he_origin: np.ndarray         # (2E,) half-edge h and h^1 are twins
    he_next: np.ndarray
    he_face: np.ndarray
    face_area: np.ndarray         # (F,) signed area, the outer face is negative
    face_boundary: np.ndarray     # (F,) touches the window circle
    face_corners: np.ndarray      # (F,) number of polygon corners
    outer_face: int
    n_lines: int
    interior_mask: np.ndarray = field(default=None)

    @property
    def n_faces(self) -> int:
        """Faces inside the window (the unbounded outer face is not counted)."""
        return len(self.face_area) - (0 if self.outer_face < 0 else 1)

    def inner_faces(self) -> np.ndarray:
        f = np.arange(len(self.face_area))
        return f[f != self.outer_face]

    def face_cycle(self, face: int) -> List[int]:
        """Half-edges of ``face`` in traversal order (counter-clockwise for inner faces)."""
        start = int(np.flatnonzero(self.he_face == face)[0])
        cycle = [start]
        h = int(self.he_next[start])
        while h != start:
            cycle.append(h)
            h = int(self.he_next[h])
        return cycle

    def face_vertices(self, face: int) -> np.ndarray:
        return self.vertices[self.he_origin[self.face_cycle(face)]]


def _chords(theta, d, radius):
    n = np.stack([-np.sin(theta), np.cos(theta)], axis=1)
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    half = np.sqrt(np.maximum(radius * radius - d * d, 0.0))
    foot = d[:, None] * n
    return foot - half[:, None] * u, foot + half[:, None] * u, half


def _snap(points: np.ndarray, tol: float) -> np.ndarray:
    """Label points so that any two closer than ``tol`` share a label."""
    if len(points) == 0:
        return np.zeros(0, dtype=int)
    pairs = cKDTree(points).query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return np.arange(len(points))
    m = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(points),) * 2)
    _, labels = connected_components(m, directed=False)
    return labels


def _empty_complex(radius: float) -> CellComplex:
    z = np.zeros(0, dtype=int)
    return CellComplex(radius, np.zeros((0, 2)), np.zeros(0, dtype=bool), np.zeros((0, 2), dtype=int),
                       z, z, z, z, np.array([math.pi * radius * radius]), np.array([True]),
                       np.array([0]), -1, 0, np.array([False]))


def build_arrangement(lines, radius: float) -> CellComplex:
    """Subdivide the disk of radius ``radius`` (centred at the origin) by ``lines``.

    ``lines`` is a list of :class:`Line` or a :class:`LineArrays`.  Lines that
    miss the open disk are ignored.
    """
    la = lines if isinstance(lines, LineArrays) else LineArrays.from_lines(list(lines))
    keep = np.abs(la.d) < radius
    theta, d, atom = la.theta[keep], la.d[keep], la.atom[keep]
    m = len(theta)
    if m == 0:
        return _empty_complex(radius)

    tol = SNAP_REL * radius
    start, end, half = _chords(theta, d, radius)

    # pairwise intersections strictly inside the window
    ii, jj = np.triu_indices(m, 1)
    sa, ca = np.sin(theta[ii]), np.cos(theta[ii])
    sb, cb = np.sin(theta[jj]), np.cos(theta[jj])
    det = ca * sb - sa * cb
    ok = (np.abs(det) >= EPS_PARALLEL) & ~((atom[ii] >= 0) & (atom[ii] == atom[jj]))
    ii, jj, sa, ca, sb, cb, det = ii[ok], jj[ok], sa[ok], ca[ok], sb[ok], cb[ok], det[ok]
    x = (d[ii] * cb - ca * d[jj]) / det
    y = (sb * d[ii] - sa * d[jj]) / det
    inside = x * x + y * y < radius * radius
    ii, jj, x, y = ii[inside], jj[inside], x[inside], y[inside]
    pts = np.stack([x, y], axis=1)
    labels = _snap(pts, tol)
    uniq, inv = np.unique(labels, return_inverse=True)
    n_int = len(uniq)
    vx = np.zeros((n_int, 2))
    np.add.at(vx, inv, pts)
    vx /= np.bincount(inv, minlength=n_int)[:, None]

    # circle vertices: two per line
    circ = np.concatenate([start, end])
    circ_line = np.concatenate([np.arange(m), np.arange(m)])
    circ_t = np.concatenate([-half, half])
    circ_id = n_int + np.arange(2 * m)
    vertices = np.concatenate([vx, circ])
    on_circle = np.concatenate([np.zeros(n_int, dtype=bool), np.ones(2 * m, dtype=bool)])

    # events along each line, sorted by arc-length parameter
    ux, uy = np.cos(theta), np.sin(theta)
    ev_line = np.concatenate([ii, jj, circ_line])
    ev_vert = np.concatenate([inv, inv, circ_id])
    ev_pts = np.concatenate([pts, pts])
    ev_t = np.concatenate([ev_pts[:, 0] * ux[ev_line[:2 * len(ii)]] + ev_pts[:, 1] * uy[ev_line[:2 * len(ii)]],
                           circ_t])
    order = np.lexsort((ev_t, ev_line))
    ev_line, ev_vert = ev_line[order], ev_vert[order]
    same = ev_line[1:] == ev_line[:-1]
    distinct = ev_vert[1:] != ev_vert[:-1]
    sel = same & distinct
    line_edges = np.stack([ev_vert[:-1][sel], ev_vert[1:][sel]], axis=1)
    line_edge_id = ev_line[:-1][sel]

    # arcs between consecutive circle vertices (counter-clockwise)
    alpha = np.mod(np.arctan2(circ[:, 1], circ[:, 0]), TWO_PI)
    corder = np.argsort(alpha, kind="stable")
    a_from = corder
    a_to = np.roll(corder, -1)
    span = np.mod(alpha[a_to] - alpha[a_from], TWO_PI)
    span = np.where(span <= 0.0, TWO_PI, span)
    arc_edges = np.stack([circ_id[a_from], circ_id[a_to]], axis=1)

    edges = np.concatenate([line_edges, arc_edges])
    edge_line = np.concatenate([line_edge_id, np.full(len(arc_edges), -1)])
    n_e = len(edges)

    # half-edges: 2e goes along the edge, 2e+1 is its twin
    origin = np.empty(2 * n_e, dtype=int)
    origin[0::2] = edges[:, 0]
    origin[1::2] = edges[:, 1]
    n_le = len(line_edges)
    ang = np.empty(2 * n_e)
    th = theta[line_edge_id]
    ang[0:2 * n_le:2] = th
    ang[1:2 * n_le:2] = th + math.pi
    ang[2 * n_le::2] = alpha[a_from] + 0.5 * math.pi
    ang[2 * n_le + 1::2] = alpha[a_to] - 0.5 * math.pi
    ang = np.mod(ang, TWO_PI)

    # rank of each outgoing half-edge around its origin
    n_v = len(vertices)
    order = np.lexsort((ang, origin))
    count = np.bincount(origin, minlength=n_v)
    first = np.concatenate([[0], np.cumsum(count)[:-1]])
    rank = np.empty(2 * n_e, dtype=int)
    rank[order] = np.arange(2 * n_e) - first[origin[order]]
    twin = np.arange(2 * n_e) ^ 1
    t = twin
    v = origin[t]
    prev_rank = np.mod(rank[t] - 1, count[v])
    nxt = order[first[v] + prev_rank]

    n_h = 2 * n_e
    g = coo_matrix((np.ones(n_h), (np.arange(n_h), nxt)), shape=(n_h, n_h))
    n_f, face = connected_components(g, directed=True, connection="weak")

    # signed areas: shoelace for every half-edge, plus circular segments on arcs
    p0 = vertices[origin]
    p1 = vertices[origin[twin]]
    contrib = 0.5 * (p0[:, 0] * p1[:, 1] - p1[:, 0] * p0[:, 1])
    seg = 0.5 * radius * radius * (span - np.sin(span))
    contrib[2 * n_le::2] += seg
    contrib[2 * n_le + 1::2] -= seg
    area = np.bincount(face, weights=contrib, minlength=n_f)

    is_arc = np.zeros(n_h, dtype=bool)
    is_arc[2 * n_le:] = True
    boundary = np.bincount(face, weights=is_arc, minlength=n_f) > 0
    he_line = np.repeat(edge_line, 2)
    corner = (he_line != he_line[nxt]).astype(float)
    corners = np.rint(np.bincount(face, weights=corner, minlength=n_f)).astype(int)
    outer = int(face[2 * n_le + 1]) if len(arc_edges) else -1

    eps_on = EPS_ON_REL * radius
    vr = np.hypot(vertices[:, 0], vertices[:, 1])
    far = np.zeros(n_f)
    np.maximum.at(far, face, vr[origin])
    interior = ~boundary & (far < radius - eps_on)
    if outer >= 0:
        interior[outer] = False

    return CellComplex(radius, vertices, on_circle, edges, edge_line, origin, nxt, face, area,
                       boundary, corners, outer, m, interior)


def interior_cells(c: CellComplex) -> List[ConvexPolygon]:
    """Faces whose closure stays strictly inside the window, as polygons."""
    return [ConvexPolygon.from_points([tuple(p) for p in c.face_vertices(f)])
            for f in np.flatnonzero(c.interior_mask)]


def euler_check(c: CellComplex) -> bool:
    """V - E + F == 2 on the clipped complex, counting the outer face."""
    if c.n_lines == 0:
        return True
    return len(c.vertices) - len(c.edges) + len(c.face_area) == 2


def area_defect(c: CellComplex) -> float:
    """Relative difference between the summed inner face areas and the disk area."""
    disk = math.pi * c.radius ** 2
    return abs(c.face_area[c.inner_faces()].sum() - disk) / disk


@dataclass
class CellStats:
    n_cells_interior: int
    n_triangles: int
    vertex_count_histogram: Dict[int, int]
    triangle_proportion: float
    mean_vertex_count: float
    areas: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.triangle_proportion <= 1.0:
            raise ValueError("triangle proportion outside [0, 1]")


def _stats(counts: Sequence[int], areas) -> CellStats:
    counts = list(counts)
    n = len(counts)
    hist = dict(sorted(Counter(counts).items()))
    n_tri = hist.get(3, 0)
    return CellStats(n, n_tri, hist, n_tri / n if n else 0.0,
                     float(np.mean(counts)) if n else 0.0, np.asarray(areas, dtype=float))


def cell_statistics(cells) -> CellStats:
    """Statistics of a list of cells, or of the interior cells of a complex."""
    if isinstance(cells, CellComplex):
        mask = cells.interior_mask
        return _stats(cells.face_corners[mask].tolist(), cells.face_area[mask])
    return _stats([len(p) for p in cells], [p.area for p in cells])
