"""Planar primitives: lines in (theta, d) form, convex polygons, clipping.

A line with orientation ``theta`` in [0, pi) and signed offset ``d`` is the
point set ``{(x, y) : -x sin(theta) + y cos(theta) = d}``, so ``d`` is the
coordinate along the left normal of the direction ``(cos theta, sin theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

Point = Tuple[float, float]

EPS_PARALLEL = 1e-12
EPS_COLLINEAR = 1e-9
EPS_ON_REL = 1e-9


class AnchorOnLine(ValueError):
    """The anchor point of a half-plane clip lies on the clipping line."""


class InvalidPolygon(ValueError):
    pass


def normalize_direction(theta: float) -> float:
    """Reduce an orientation angle into [0, pi)."""
    t = math.fmod(theta, math.pi)
    if t < 0.0:
        t += math.pi
    if t >= math.pi:
        t = 0.0
    return t


def unit(angle: float) -> Point:
    return (math.cos(angle), math.sin(angle))


@dataclass(frozen=True)
class Line:
    theta: float
    d: float
    atom: Optional[int] = None  # index of the direction atom for discrete laws

    def __post_init__(self):
        if not 0.0 <= self.theta < math.pi:
            raise ValueError(f"theta must lie in [0, pi), got {self.theta!r}")

    @classmethod
    def through(cls, point: Point, theta: float, atom: Optional[int] = None) -> "Line":
        theta = normalize_direction(theta)
        return cls(theta, -point[0] * math.sin(theta) + point[1] * math.cos(theta), atom)

    @property
    def normal(self) -> Point:
        return (-math.sin(self.theta), math.cos(self.theta))

    def signed_distance(self, p: Point) -> float:
        return -p[0] * math.sin(self.theta) + p[1] * math.cos(self.theta) - self.d


class _Parallel:
    __slots__ = ()

    def __repr__(self):
        return "PARALLEL"

    def __bool__(self):
        return False


PARALLEL = _Parallel()


def intersect_lines(a: Line, b: Line):
    """Intersection point of two lines, or ``PARALLEL``.

    Lines carrying the same direction atom are parallel by construction;
    otherwise parallelism is decided by ``|sin(theta_a - theta_b)| < EPS_PARALLEL``.
    """
    if a.atom is not None and a.atom == b.atom:
        return PARALLEL
    if a.theta == b.theta:
        return PARALLEL
    sa, ca = math.sin(a.theta), math.cos(a.theta)
    sb, cb = math.sin(b.theta), math.cos(b.theta)
    det = ca * sb - sa * cb
    if abs(det) < EPS_PARALLEL:
        return PARALLEL
    x = (a.d * cb - ca * b.d) / det
    y = (sb * a.d - sa * b.d) / det
    return (x, y)


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def signed_area(vertices: Sequence[Point]) -> float:
    n = len(vertices)
    s = 0.0
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _scale(vertices: Sequence[Point]) -> float:
    xs = [v[0] for v in vertices]
    ys = [v[1] for v in vertices]
    return max(max(xs) - min(xs), max(ys) - min(ys))


def cleanup_vertices(vertices: Sequence[Point], rel_tol: float = EPS_COLLINEAR) -> list:
    """Drop repeated points and vertices whose two edges are collinear."""
    pts = list(vertices)
    if len(pts) < 3:
        return pts
    tol = rel_tol * _scale(pts)
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        out = []
        n = len(pts)
        for i in range(n):
            p = pts[i]
            q = out[-1] if out else pts[i - 1]
            if abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol:
                changed = True
                continue
            out.append(p)
        if len(out) >= 2 and abs(out[0][0] - out[-1][0]) <= tol and abs(out[0][1] - out[-1][1]) <= tol:
            out.pop()
            changed = True
        pts = out
        if len(pts) < 3:
            break
        out = []
        n = len(pts)
        for i in range(n):
            prev, cur, nxt = pts[i - 1], pts[i], pts[(i + 1) % n]
            ex, ey = cur[0] - prev[0], cur[1] - prev[1]
            fx, fy = nxt[0] - cur[0], nxt[1] - cur[1]
            if abs(ex * fy - ey * fx) <= rel_tol * math.hypot(ex, ey) * math.hypot(fx, fy):
                changed = True
                continue
            out.append(cur)
        pts = out
    return pts


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon with counter-clockwise vertices and positive area."""

    vertices: Tuple[Point, ...]

    def __post_init__(self):
        vs = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", vs)
        n = len(vs)
        if n < 3:
            raise InvalidPolygon("a polygon needs at least 3 vertices")
        for i in range(n):
            if _cross(vs[i - 1], vs[i], vs[(i + 1) % n]) <= 0.0:
                raise InvalidPolygon("vertices are not strictly convex in counter-clockwise order")
        if signed_area(vs) <= 0.0:
            raise InvalidPolygon("polygon area must be positive")

    @classmethod
    def from_points(cls, points: Sequence[Point]) -> "ConvexPolygon":
        """Build from vertices in either orientation, dropping collinear points."""
        pts = cleanup_vertices([tuple(p) for p in points])
        if len(pts) >= 3 and signed_area(pts) < 0:
            pts.reverse()
        return cls(tuple(pts))

    def __len__(self):
        return len(self.vertices)

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def perimeter(self) -> float:
        vs = self.vertices
        return sum(math.dist(vs[i - 1], vs[i]) for i in range(len(vs)))


def lex_min_vertex(polygon: ConvexPolygon, order: str = "xy") -> Point:
    """Lexicographically smallest vertex.

    ``order="xy"`` compares x first; ``order="yx"`` compares y first, which is
    the lowest-vertex convention used by the typical-cell construction.
    """
    if order == "xy":
        return min(polygon.vertices)
    if order == "yx":
        return min(polygon.vertices, key=lambda v: (v[1], v[0]))
    raise ValueError(f"unknown order {order!r}")


def clip_halfplane(polygon: ConvexPolygon, line: Line, anchor: Point, eps_on: Optional[float] = None):
    """Intersect ``polygon`` with the closed half-plane of ``line`` containing ``anchor``.

    Returns the clipped polygon, the same object when the line misses it, or
    ``None`` when the intersection has no area.
    """
    vs = polygon.vertices
    if eps_on is None:
        eps_on = EPS_ON_REL * max(1.0, _scale(vs), abs(anchor[0]), abs(anchor[1]))
    s = -math.sin(line.theta)
    c = math.cos(line.theta)
    side = s * anchor[0] + c * anchor[1] - line.d
    if abs(side) <= eps_on:
        raise AnchorOnLine(f"anchor {anchor} is on line {line}")
    out = clip_vertices(vs, s, c, line.d, side > 0)
    if out is vs:
        return polygon
    return None if out is None else ConvexPolygon(tuple(out))


def clip_vertices(vs, s: float, c: float, d: float, keep_positive: bool):
    """Clip a counter-clockwise vertex list by ``s*x + c*y - d >= 0`` (or ``<= 0``).

    Returns ``vs`` itself when nothing is cut away and ``None`` when nothing
    with positive area remains.
    """
    sign = 1.0 if keep_positive else -1.0
    dist = [sign * (s * x + c * y - d) for x, y in vs]
    if min(dist) >= 0.0:
        return vs
    if max(dist) <= 0.0:
        return None
    out = []
    n = len(vs)
    for i in range(n):
        p, dp = vs[i], dist[i]
        j = i + 1 if i + 1 < n else 0
        dq = dist[j]
        if dp >= 0.0:
            out.append(p)
        if (dp > 0.0 > dq) or (dp < 0.0 < dq):
            q = vs[j]
            t = dp / (dp - dq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    out = cleanup_vertices(out)
    if len(out) < 3 or signed_area(out) <= 0.0:
        return None
    return out


def projection_width(polygon: ConvexPolygon, theta: float) -> float:
    """Length of the range of offsets ``d`` of direction-``theta`` lines that hit the polygon."""
    theta = normalize_direction(theta)
    s, c = -math.sin(theta), math.cos(theta)
    vals = [s * x + c * y for x, y in polygon.vertices]
    return max(vals) - min(vals)


def projection_range(polygon: ConvexPolygon, theta: float) -> Tuple[float, float]:
    s, c = -math.sin(theta), math.cos(theta)
    vals = [s * x + c * y for x, y in polygon.vertices]
    return min(vals), max(vals)


def line_hits_segment(line: Line, a: Point, b: Point) -> bool:
    return line.signed_distance(a) * line.signed_distance(b) < 0.0


def line_hits_polygon(line: Line, polygon: ConvexPolygon) -> bool:
    dist = [line.signed_distance(v) for v in polygon.vertices]
    return min(dist) < 0.0 < max(dist)


def circumcircle(a: Point, b: Point, c: Point) -> Tuple[Point, float]:
    """Circumscribed circle (centre, radius) of a non-degenerate triangle."""
    ax, ay = a
    bx, by = b[0] - ax, b[1] - ay
    cx, cy = c[0] - ax, c[1] - ay
    d = 2.0 * (bx * cy - by * cx)
    if d == 0.0:
        raise InvalidPolygon("degenerate triangle has no circumcircle")
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return (ax + ux, ay + uy), math.hypot(ux, uy)
