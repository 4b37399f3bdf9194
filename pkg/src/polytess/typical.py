"""Typical cell of a Poisson line tessellation, grown from its lowest vertex.

The cell is built from four random quantities: the orientations ``phi0 <
phi1`` of the two lines meeting at the lowest vertex ``v1`` (the origin),
the distance ``z1`` from ``v1`` to the next vertex ``v2`` along the ``phi1``
line, and the direction ``phi2`` in which the boundary leaves ``v2`` after a
clockwise turn.  When ``phi2 < phi0`` the three lines close up into a
triangle; the cell is that triangle cut down by an independent line process
from which every line crossing the segment ``[v1, v2]`` has been removed.
Otherwise the three lines bound an unbounded region which the same process
must close.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from . import rng as rngmod
from .directional import DirectionalDistribution, DiscreteDirections
from .geometry import ConvexPolygon, Point, clip_vertices
from .lines import DegenerateTriangle, sample_disk_arrays, sample_triangle_arrays
from .parallel import map_tasks

WEIGHT_SHARD_SIZE = 1 << 16
CELL_SHARD_SIZE = 2000
MAX_DOUBLINGS = 8
BOX_START_FACTOR = 4.0


class NegativeExponentGuard(ArithmeticError):
    """A survival exponent came out negative, which no valid triangle produces."""


class BoxOverflow(RuntimeError):
    """The bounding box for an open construction kept growing without closing the cell."""


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    standard_error: float
    n_samples: int
    seed: Optional[int] = None

    def z_score(self, value: float) -> float:
        if self.standard_error == 0.0:
            return 0.0 if self.estimate == value else math.inf
        return (self.estimate - value) / self.standard_error

    def agrees_with(self, value: float, sigmas: float = 4.0) -> bool:
        return abs(self.z_score(value)) <= sigmas

    def __str__(self):
        return f"{self.estimate:.6f} +/- {self.standard_error:.6f} (n={self.n_samples})"


def estimate_from_sums(total: float, total_sq: float, n: int, seed=None) -> EstimateResult:
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return EstimateResult(mean, math.sqrt(var / n), n, seed)


@dataclass(frozen=True)
class TypicalTriangleVars:
    phi0: float
    phi1: float
    z1: float
    phi2: float
    z2: float
    z3: float
    phi3: float
    v1: Point
    v2: Point
    v3: Point

    def closure_error(self) -> float:
        """Largest mismatch when walking the three edges from v1 back to v1."""
        steps = ((self.v1, self.z1, self.phi1, self.v2),
                 (self.v2, self.z2, self.phi2, self.v3),
                 (self.v3, self.z3, self.phi3, self.v1))
        err = 0.0
        for a, z, phi, b in steps:
            err = max(err, math.hypot(a[0] + z * math.cos(phi) - b[0], a[1] + z * math.sin(phi) - b[1]))
        return err

    @property
    def polygon(self) -> ConvexPolygon:
        return ConvexPolygon((self.v1, self.v3, self.v2))


@dataclass
class Construction:
    """Batch of construction variables; ``atoms`` holds (i0, i1, i2) for discrete laws."""

    phi0: np.ndarray
    phi1: np.ndarray
    z1: np.ndarray
    phi2: np.ndarray
    lam0: np.ndarray
    lam1: np.ndarray
    lam2: np.ndarray
    atoms: Optional[tuple] = None

    def __len__(self):
        return len(self.phi0)

    @property
    def is_triangle(self) -> np.ndarray:
        return self.phi2 < self.phi0


def sample_construction(g: DirectionalDistribution, rng, n: int, gamma: float = 1.0,
                        fix_phi0: Optional[bool] = None) -> Construction:
    """Draw ``n`` independent (phi0, phi1, z1, phi2) tuples.

    ``fix_phi0`` defaults to ``g.pseudo_isotropic``: for laws invariant under
    the relevant rotations the lower edge is rotated onto angle 0.
    """
    fix = g.pseudo_isotropic if fix_phi0 is None else fix_phi0
    if isinstance(g, DiscreteDirections):
        i0, i1 = g.sample_pair_atoms(rng, n)
        phi0, phi1 = g._theta[i0], g._theta[i1]
        if fix:
            if not g.pseudo_isotropic:
                raise ValueError("phi0 can only be fixed for pseudo-isotropic laws")
            phi1 = phi1 - phi0
            phi0 = np.zeros(n)
            i1 = g.atom_index(phi1)
            i0 = np.zeros(n, dtype=int)
        i2, phi2 = g.sample_phi2_atoms(i1, rng)
        lam = g.atom_lambdas
        lam0, lam1, lam2 = lam[i0], lam[i1], lam[i2]
        atoms = (i0, i1, i2)
    else:
        phi0, phi1 = g.sample_angle_pair(rng, n, fix_phi0=fix)
        phi2 = g.sample_phi2(phi1, rng)
        lam0 = g.lambda_theta(phi0)
        lam1 = g.lambda_theta(phi1)
        lam2 = g.lambda_theta(np.mod(phi2, math.pi))
        atoms = None
    z1 = rng.exponential(1.0, n) / (gamma * lam1)
    return Construction(np.asarray(phi0, float), np.asarray(phi1, float), z1, np.asarray(phi2, float),
                        np.asarray(lam0, float), np.asarray(lam1, float), np.asarray(lam2, float), atoms)


def triangle_sides(phi0, phi1, z1, phi2):
    """Lengths ``(z2, z3)`` of the closing edges, by the law of sines."""
    denom = np.sin(np.subtract(phi0, phi2))
    z2 = z1 * np.sin(np.subtract(phi1, phi0)) / denom
    z3 = z1 * np.sin(np.subtract(phi1, phi2)) / denom
    return z2, z3


def triangle_vars(phi0: float, phi1: float, z1: float, phi2: float) -> Optional[TypicalTriangleVars]:
    """Complete the triangle, or ``None`` if the three lines do not close up."""
    if not phi2 < phi0:
        return None
    z2, z3 = triangle_sides(phi0, phi1, z1, phi2)
    z2, z3 = float(z2), float(z3)
    v2 = (z1 * math.cos(phi1), z1 * math.sin(phi1))
    v3 = (z3 * math.cos(phi0), z3 * math.sin(phi0))
    return TypicalTriangleVars(phi0, phi1, z1, phi2, z2, z3, phi0 - math.pi, (0.0, 0.0), v2, v3)


def sample_typical_triangle_vars(g: DirectionalDistribution, rng, gamma: float = 1.0,
                                 fix_phi0: Optional[bool] = None) -> Optional[TypicalTriangleVars]:
    c = sample_construction(g, rng, 1, gamma, fix_phi0)
    return triangle_vars(float(c.phi0[0]), float(c.phi1[0]), float(c.z1[0]), float(c.phi2[0]))


def survival_exponent(lam0, lam1, lam2, z1, z2, z3, gamma=1.0):
    """Mean number of lines crossing the two closing edges but not the first one."""
    return 0.5 * gamma * (lam2 * z2 + lam0 * z3 - lam1 * z1)


def triangle_weight(g: DirectionalDistribution, t: TypicalTriangleVars, gamma: float = 1.0) -> float:
    """Probability that no further line cuts the closing edges of ``t``."""
    lam1 = g.lambda_theta(math.fmod(t.phi1 + math.pi, math.pi))
    lam2 = g.lambda_theta(math.fmod(t.phi2 + 2 * math.pi, math.pi))
    lam3 = g.lambda_theta(math.fmod(t.phi3 + 2 * math.pi, math.pi))
    expo = survival_exponent(lam3, lam1, lam2, t.z1, t.z2, t.z3, gamma)
    if expo < -1e-9 * max(1.0, lam1 * t.z1):
        raise NegativeExponentGuard(f"survival exponent {expo} < 0 for {t}")
    return math.exp(-max(expo, 0.0))


def construction_weights(c: Construction) -> np.ndarray:
    """Survival weight for triangle configurations and 0 elsewhere (gamma = 1)."""
    tri = c.is_triangle
    w = np.zeros(len(c))
    if tri.any():
        z2, z3 = triangle_sides(c.phi0[tri], c.phi1[tri], c.z1[tri], c.phi2[tri])
        expo = survival_exponent(c.lam0[tri], c.lam1[tri], c.lam2[tri], c.z1[tri], z2, z3)
        if np.any(expo < -1e-9 * np.maximum(1.0, c.lam1[tri] * c.z1[tri])):
            raise NegativeExponentGuard("negative survival exponent in batch")
        w[tri] = np.exp(-np.maximum(expo, 0.0))
    return w


def _weight_shard(task):
    g, size, seed, index = task
    c = sample_construction(g, rngmod.stream(seed, rngmod.WEIGHT_SHARD, index), size)
    w = construction_weights(c)
    return float(w.sum()), float(w @ w)


def estimate_p3_by_weighting(g: DirectionalDistribution, n: int, seed: int, threads: int = 1) -> EstimateResult:
    """Unbiased estimate of the triangle probability.

    Each sample contributes the survival weight of its construction when the
    construction closes into a triangle and 0 otherwise.  Samples are drawn in
    fixed-size shards with their own streams, so the result does not depend
    on ``threads``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    sizes = rngmod.shard_sizes(n, WEIGHT_SHARD_SIZE)
    parts = map_tasks(_weight_shard, [(g, s, seed, i) for i, s in enumerate(sizes)], threads)
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    return estimate_from_sums(total, total_sq, n, seed)


def audit_rows(g: DirectionalDistribution, n: int, seed: int):
    """Per-sample rows of the weighting estimator, drawn from the same streams."""
    k = 0
    for index, size in enumerate(rngmod.shard_sizes(n, WEIGHT_SHARD_SIZE)):
        c = sample_construction(g, rngmod.stream(seed, rngmod.WEIGHT_SHARD, index), size)
        w = construction_weights(c)
        tri = c.is_triangle
        for m in range(size):
            case = "-".join(str(int(a[m])) for a in c.atoms) if c.atoms is not None else "continuous"
            yield (k, case, float(c.phi0[m]), float(c.phi1[m]), float(c.z1[m]), float(c.phi2[m]),
                   float(w[m]), int(tri[m]))
            k += 1


# --- full typical cell --------------------------------------------------------------

def _clip_all(vs, theta, d):
    """Clip ``vs`` by the half-planes of the given lines that contain the origin."""
    order = np.argsort(np.abs(d))
    sin, cos = np.sin(theta), np.cos(theta)
    for m in order.tolist():
        dm = float(d[m])
        vs = clip_vertices(vs, -float(sin[m]), float(cos[m]), dm, dm < 0.0)
        if vs is None:
            raise RuntimeError("cell vanished; the origin must stay inside every half-plane")
    return vs


def _hits_segment(theta, d, a: Point, b: Point):
    sa = -a[0] * np.sin(theta) + a[1] * np.cos(theta) - d
    sb = -b[0] * np.sin(theta) + b[1] * np.cos(theta) - d
    return sa * sb < 0.0


def _open_region(phi0, phi1, phi2, v2, r):
    """The three construction half-planes intersected with the box ``[-r, r]^2``."""
    vs = [(-r, -r), (r, -r), (r, r), (-r, r)]
    u0 = (math.cos(phi0), math.sin(phi0))
    # half-plane bounded by the phi0 line through v1 that contains v2
    s, c = -math.sin(phi0), math.cos(phi0)
    vs = clip_vertices(vs, s, c, 0.0, s * v2[0] + c * v2[1] > 0.0)
    s, c = -math.sin(phi1), math.cos(phi1)
    vs = clip_vertices(vs, s, c, 0.0, s * u0[0] + c * u0[1] > 0.0)
    s, c = -math.sin(phi2), math.cos(phi2)
    d2 = s * v2[0] + c * v2[1]
    return clip_vertices(vs, s, c, d2, -d2 > 0.0)


def _touches_box(vs, r) -> bool:
    lim = r * (1.0 - 1e-12)
    return any(abs(x) >= lim or abs(y) >= lim for x, y in vs)


def grow_cell(g: DirectionalDistribution, gamma: float, phi0: float, phi1: float, z1: float,
              phi2: float, rng) -> ConvexPolygon:
    """Complete a cell from its construction variables using fresh lines from ``rng``."""
    v1 = (0.0, 0.0)
    v2 = (z1 * math.cos(phi1), z1 * math.sin(phi1))
    if phi2 < phi0:
        t = triangle_vars(phi0, phi1, z1, phi2)
        tri = ConvexPolygon((v1, t.v3, v2))
        try:
            la = sample_triangle_arrays(g, gamma, tri, 3, rng)
        except DegenerateTriangle:
            return tri
        if len(la) == 0:
            return tri
        return ConvexPolygon(tuple(_clip_all(list(tri.vertices), la.theta, la.d)))

    # open region: grow a box around v1 until the clipped cell stays inside it
    p3 = (z1 * math.cos(phi0), z1 * math.sin(phi0))
    circ = max(math.dist(v1, v2), math.dist(v1, p3), math.dist(v2, p3)) / math.sqrt(3.0)
    r = BOX_START_FACTOR * max(circ, 1.0 / (gamma * g.lambda_bar))
    lines = sample_disk_arrays(g, gamma, r * math.sqrt(2.0), rng)
    theta, d = lines.theta, lines.d
    keep = ~_hits_segment(theta, d, v1, v2)
    theta, d = theta[keep], d[keep]
    for _ in range(MAX_DOUBLINGS + 1):
        region = _open_region(phi0, phi1, phi2, v2, r)
        vs = _clip_all(region, theta, d)
        if not _touches_box(vs, r):
            return ConvexPolygon(tuple(vs))
        inner = r * math.sqrt(2.0)
        r *= 2.0
        more = sample_disk_arrays(g, gamma, r * math.sqrt(2.0), rng)
        keep = (np.abs(more.d) >= inner) & ~_hits_segment(more.theta, more.d, v1, v2)
        theta = np.concatenate([theta, more.theta[keep]])
        d = np.concatenate([d, more.d[keep]])
    raise BoxOverflow(f"cell did not close after {MAX_DOUBLINGS} box doublings")


def sample_typical_cell(g: DirectionalDistribution, gamma: float, rng,
                        fix_phi0: Optional[bool] = None) -> ConvexPolygon:
    """One realisation of the typical cell, with its lowest vertex at the origin."""
    c = sample_construction(g, rng, 1, gamma, fix_phi0)
    return grow_cell(g, gamma, float(c.phi0[0]), float(c.phi1[0]), float(c.z1[0]), float(c.phi2[0]), rng)


@dataclass
class VertexDistribution:
    histogram: Dict[int, int]
    n_samples: int
    overflow: int = 0
    seed: Optional[int] = None
    mean_vertices: EstimateResult = field(init=False)

    def __post_init__(self):
        n = self.n_samples
        total = sum(k * c for k, c in self.histogram.items())
        total_sq = sum(k * k * c for k, c in self.histogram.items())
        self.mean_vertices = estimate_from_sums(total, total_sq, n, self.seed)

    def share(self, k: int) -> EstimateResult:
        n = self.n_samples
        p = self.histogram.get(k, 0) / n
        return EstimateResult(p, math.sqrt(p * (1.0 - p) / max(n - 1, 1)), n, self.seed)


def _cell_shard(task):
    g, gamma, size, seed, index = task
    rng = rngmod.stream(seed, rngmod.CELL_SHARD, index)
    c = sample_construction(g, rng, size, gamma)
    counts = Counter()
    overflow = 0
    phi0, phi1, z1, phi2 = c.phi0.tolist(), c.phi1.tolist(), c.z1.tolist(), c.phi2.tolist()
    for m in range(size):
        try:
            cell = grow_cell(g, gamma, phi0[m], phi1[m], z1[m], phi2[m], rng)
        except BoxOverflow:
            overflow += 1
            continue
        counts[len(cell)] += 1
    return counts, overflow


def typical_cell_vertex_distribution(g: DirectionalDistribution, gamma: float, n: int, seed: int,
                                     threads: int = 1) -> VertexDistribution:
    """Tabulate vertex counts of ``n`` typical-cell samples; overflowing samples are
    counted separately and left out of the histogram."""
    sizes = rngmod.shard_sizes(n, CELL_SHARD_SIZE)
    parts = map_tasks(_cell_shard, [(g, gamma, s, seed, i) for i, s in enumerate(sizes)], threads)
    hist = Counter()
    overflow = 0
    for counts, over in parts:
        hist.update(counts)
        overflow += over
    return VertexDistribution(dict(sorted(hist.items())), n - overflow, overflow, seed)
