"""Sampling stationary Poisson line processes inside bounded regions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .directional import DirectionalDistribution
from .geometry import ConvexPolygon, Line, Point

EPS_DEGENERATE = 1e-12


class DegenerateTriangle(ValueError):
    pass


@dataclass(frozen=True)
class SimulationConfig:
    gamma: float
    window_radius: float
    seed: int = 0
    replicates: int = 1

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.window_radius > 0:
            raise ValueError(f"window radius must be positive, got {self.window_radius}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")


@dataclass
class LineArrays:
    """Column form of a line list: orientations, offsets and atom ids (-1 if none)."""

    theta: np.ndarray
    d: np.ndarray
    atom: np.ndarray

    def __len__(self):
        return len(self.theta)

    def to_lines(self) -> List[Line]:
        return [Line(float(t), float(d), None if a < 0 else int(a))
                for t, d, a in zip(self.theta, self.d, self.atom)]

    @classmethod
    def from_lines(cls, lines: Sequence[Line]) -> "LineArrays":
        return cls(np.array([l.theta for l in lines], dtype=float),
                   np.array([l.d for l in lines], dtype=float),
                   np.array([-1 if l.atom is None else l.atom for l in lines], dtype=int))


def sample_disk_arrays(g: DirectionalDistribution, gamma: float, radius: float, rng,
                       center: Point = (0.0, 0.0)) -> LineArrays:
    """Lines of a Poisson process with intensity ``gamma`` hitting a disk.

    The count is Poisson(2 gamma radius); each line has theta ~ G and an
    offset uniform over the disk's projection onto the normal.
    """
    n = rng.poisson(2.0 * gamma * radius)
    theta, atoms = g.sample_theta(rng, n)
    theta = np.asarray(theta, dtype=float)
    offset = rng.uniform(-radius, radius, n)
    d = offset - center[0] * np.sin(theta) + center[1] * np.cos(theta)
    atom = np.full(n, -1, dtype=int) if atoms is None else np.asarray(atoms, dtype=int)
    return LineArrays(theta, d, atom)


def sample_lines_hitting_disk(g: DirectionalDistribution, cfg: SimulationConfig, rng) -> List[Line]:
    return sample_disk_arrays(g, cfg.gamma, cfg.window_radius, rng).to_lines()


def _triangle_parts(triangle: ConvexPolygon, edge_index: int):
    """Edges as (start, end); edge ``i`` (1-based) joins vertices ``i`` and ``i+1`` cyclically."""
    if len(triangle) != 3:
        raise DegenerateTriangle("expected a triangle")
    vs = triangle.vertices
    scale = max(math.dist(vs[0], vs[1]), math.dist(vs[1], vs[2]), math.dist(vs[2], vs[0]))
    if triangle.area <= EPS_DEGENERATE * scale * scale:
        raise DegenerateTriangle(f"triangle area {triangle.area} is too small")
    if edge_index not in (1, 2, 3):
        raise ValueError(f"edge_index must be 1, 2 or 3, got {edge_index}")
    edges = [(vs[i], vs[(i + 1) % 3]) for i in range(3)]
    return vs, edges


def mean_hits_excluding_edge(g: DirectionalDistribution, gamma: float, triangle: ConvexPolygon,
                             edge_index: int) -> float:
    """Expected number of lines hitting the triangle but not the given edge.

    Edge ``i`` (1-based) joins the ``i``-th and ``(i+1)``-th vertices of the
    polygon, cyclically.  The value is
    ``gamma/2 * (sum of t_i lambda(theta_i) over the other edges - t_e lambda(theta_e))``;
    a negative result can only come from a degenerate input and raises.
    """
    _, edges = _triangle_parts(triangle, edge_index)
    total = 0.0
    for i, (a, b) in enumerate(edges, start=1):
        length = math.dist(a, b)
        theta = math.atan2(b[1] - a[1], b[0] - a[0]) % math.pi
        term = length * g.lambda_theta(theta)
        total += -term if i == edge_index else term
    mean = 0.5 * gamma * total
    if mean < -1e-12 * max(1.0, abs(total)):
        raise DegenerateTriangle(f"negative mean {mean}: excluded edge outweighs the others")
    return max(mean, 0.0)


def _signed(theta, d, p):
    return -p[0] * np.sin(theta) + p[1] * np.cos(theta) - d


def sample_lines_hitting_triangle_excluding_edge(g: DirectionalDistribution, gamma: float,
                                                 triangle: ConvexPolygon, edge_index: int,
                                                 rng) -> List[Line]:
    return sample_triangle_arrays(g, gamma, triangle, edge_index, rng).to_lines()


def sample_triangle_arrays(g, gamma, triangle: ConvexPolygon, edge_index: int, rng) -> LineArrays:
    """Thin the lines hitting the circumscribed disk down to those that hit the
    triangle but miss the excluded edge."""
    from .geometry import circumcircle
    vs, edges = _triangle_parts(triangle, edge_index)
    center, radius = circumcircle(*vs)
    lines = sample_disk_arrays(g, gamma, radius, rng, center)
    s = np.stack([_signed(lines.theta, lines.d, v) for v in vs])
    hits = (s.min(axis=0) < 0) & (s.max(axis=0) > 0)
    a, b = edge_index - 1, edge_index % 3
    on_edge = s[a] * s[b] < 0
    keep = hits & ~on_edge
    return LineArrays(lines.theta[keep], lines.d[keep], lines.atom[keep])
