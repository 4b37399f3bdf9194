"""Replicated window simulations: triangle proportion among interior cells."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from . import rng as rngmod
from .arrangement import area_defect, build_arrangement, cell_statistics, euler_check
from .directional import DirectionalDistribution
from .lines import SimulationConfig, sample_disk_arrays
from .parallel import map_tasks
from .typical import EstimateResult

CSV_HEADER = "replicate,seed,R,gamma,n_lines,n_cells,n_triangles,proportion,mean_vertices"


@dataclass(frozen=True)
class ReplicateResult:
    replicate: int
    seed: int
    radius: float
    gamma: float
    n_lines: int
    n_cells: int
    n_triangles: int
    proportion: float
    mean_vertices: float
    euler_ok: bool
    area_defect: float

    def csv_row(self) -> str:
        return (f"{self.replicate},{self.seed},{self.radius!r},{self.gamma!r},{self.n_lines},"
                f"{self.n_cells},{self.n_triangles},{self.proportion:.12g},{self.mean_vertices:.12g}")


def run_replicate(task) -> ReplicateResult:
    g, cfg, r = task
    lines = sample_disk_arrays(g, cfg.gamma, cfg.window_radius, rngmod.replicate_stream(cfg.seed, r))
    c = build_arrangement(lines, cfg.window_radius)
    s = cell_statistics(c)
    return ReplicateResult(r, cfg.seed, cfg.window_radius, cfg.gamma, c.n_lines, s.n_cells_interior,
                           s.n_triangles, s.triangle_proportion, s.mean_vertex_count,
                           euler_check(c), area_defect(c))


def simulate_window(g: DirectionalDistribution, cfg: SimulationConfig, threads: int = 1) -> List[ReplicateResult]:
    return map_tasks(run_replicate, [(g, cfg, r) for r in range(cfg.replicates)], threads)


def pooled_proportion(results: List[ReplicateResult]) -> EstimateResult:
    """Ratio estimate sum(triangles) / sum(cells) with a between-replicate standard error."""
    t = np.array([r.n_triangles for r in results], dtype=float)
    n = np.array([r.n_cells for r in results], dtype=float)
    if n.sum() == 0:
        return EstimateResult(0.0, 0.0, 0, results[0].seed if results else None)
    p = t.sum() / n.sum()
    m = len(results)
    if m > 1:
        resid = t - p * n
        se = math.sqrt((resid @ resid) / (m * (m - 1))) / n.mean()
    else:
        se = math.sqrt(p * (1 - p) / n.sum())
    return EstimateResult(float(p), float(se), int(n.sum()), results[0].seed)
