import math

import numpy as np
import pytest

from polytess import rng as rngmod
from polytess.arrangement import (area_defect, build_arrangement, cell_statistics, euler_check,
                                  interior_cells)
from polytess.directional import discrete, g3, gk, unif
from polytess.geometry import ConvexPolygon, Line, clip_halfplane
from polytess.lines import SimulationConfig, sample_disk_arrays
from polytess.window import pooled_proportion, simulate_window


def check(c):
    assert euler_check(c)
    assert area_defect(c) < 1e-6


def test_two_crossing_lines():
    c = build_arrangement([Line(0, 0), Line(math.pi / 2, 0)], 1.0)
    check(c)
    assert c.n_faces == 4
    assert c.face_boundary[c.inner_faces()].all()
    assert interior_cells(c) == []


def test_three_line_triangle():
    lines = [Line(0, -0.2), Line(math.pi / 3, 0.1), Line(2 * math.pi / 3, 0.1)]
    c = build_arrangement(lines, 5.0)
    check(c)
    assert c.n_faces == 7
    cells = interior_cells(c)
    assert len(cells) == 1 and len(cells[0]) == 3
    # oracle: the triangle cut out by the same three lines, by clipping a box
    box = ConvexPolygon(((-5, -5), (5, -5), (5, 5), (-5, 5)))
    centroid = tuple(np.mean(cells[0].vertices, axis=0))
    for line in lines:
        box = clip_halfplane(box, line, centroid)
    assert cells[0].area == pytest.approx(box.area, rel=1e-12)


def test_no_lines():
    c = build_arrangement([], 2.0)
    assert c.n_faces == 1
    assert interior_cells(c) == []
    assert euler_check(c)
    assert area_defect(c) < 1e-12


def test_triple_point_is_snapped():
    lines = [Line(0, 0), Line(math.pi / 3, 0), Line(2 * math.pi / 3, 0)]
    c = build_arrangement(lines, 1.0)
    check(c)
    assert c.n_faces == 6
    assert len(c.vertices) == 7   # centre plus six chord ends


def test_single_triangle_statistics():
    tri = ConvexPolygon(((0, 0), (1, 0), (0, 1)))
    s = cell_statistics([tri])
    assert s.triangle_proportion == 1.0 and s.n_triangles == 1 and s.mean_vertex_count == 3


def test_general_position_face_count():
    """n lines in general position, all crossings well inside the window:
    (n-1)(n-2)/2 bounded cells, as for an arrangement in the whole plane."""
    rng = np.random.default_rng(5)
    n = 12
    theta = np.sort(rng.uniform(0, math.pi, n))
    lines = [Line(float(t), float(d)) for t, d in zip(theta, rng.uniform(-1, 1, n))]
    c = build_arrangement(lines, 1e4)
    check(c)
    assert len(interior_cells(c)) == (n - 1) * (n - 2) // 2
    assert c.n_faces == n * (n + 1) // 2 + 1


@pytest.mark.parametrize("g", [gk(3), g3(0.2, 0.5), unif()])
def test_cells_match_clipping_oracle(g):
    rng = rngmod.stream(21, rngmod.TEST)
    radius = 8.0
    la = sample_disk_arrays(g, 1.0, radius, rng)
    lines = la.to_lines()
    c = build_arrangement(la, radius)
    check(c)
    cells = interior_cells(c)
    assert cells
    big = ConvexPolygon(((-2 * radius, -2 * radius), (2 * radius, -2 * radius),
                         (2 * radius, 2 * radius), (-2 * radius, 2 * radius)))
    for cell in cells:
        centroid = tuple(np.mean(cell.vertices, axis=0))
        ref = big
        for line in lines:
            ref = clip_halfplane(ref, line, centroid)
        assert len(ref) == len(cell)
        assert ref.area == pytest.approx(cell.area, rel=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_random_complexes_are_consistent(seed):
    for g in (gk(3), gk(6), unif()):
        la = sample_disk_arrays(g, 1.0, 40.0, rngmod.replicate_stream(seed, 0))
        c = build_arrangement(la, 40.0)
        check(c)
        cells = interior_cells(c)   # ConvexPolygon validates convexity and orientation
        assert all(len(p) >= 3 for p in cells)
        assert sorted(len(p) for p in cells) == sorted(c.face_corners[c.interior_mask].tolist())


def test_two_directions_give_parallelograms():
    g = discrete([0.0, 1.5707963268], [0.5, 0.5])
    results = simulate_window(g, SimulationConfig(1.0, 30.0, seed=3, replicates=3))
    for r in results:
        assert r.n_triangles == 0 and r.mean_vertices == 4.0 and r.n_cells > 0


def test_scaling_invariance():
    a = pooled_proportion(simulate_window(gk(3), SimulationConfig(1.0, 40.0, seed=1, replicates=40)))
    b = pooled_proportion(simulate_window(gk(3), SimulationConfig(2.0, 20.0, seed=2, replicates=40)))
    assert abs(a.estimate - b.estimate) < 4 * math.hypot(a.standard_error, b.standard_error)


def test_pseudo_isotropy_rotation():
    k = 4
    rotated = discrete([(l + 0.5) * math.pi / k for l in range(k)], [1 / k] * k)
    a = pooled_proportion(simulate_window(gk(k), SimulationConfig(1.0, 40.0, seed=4, replicates=40)))
    b = pooled_proportion(simulate_window(rotated, SimulationConfig(1.0, 40.0, seed=5, replicates=40)))
    assert abs(a.estimate - b.estimate) < 4 * math.hypot(a.standard_error, b.standard_error)


def test_window_simulation_thread_independent():
    cfg = SimulationConfig(1.0, 20.0, seed=9, replicates=4)
    assert simulate_window(gk(3), cfg, threads=1) == simulate_window(gk(3), cfg, threads=2)
