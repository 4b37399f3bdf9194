"""Stationary Poisson line tessellations with discrete or uniform direction laws."""

from .analytic import (AnalyticValue, DomainError, argmax_p3_g3, iso_integral_reduction_check,
                       limit_integral, p3_discrete, p3_g3, p3_g4, p3_gk, p3_uniform, p4_uniform)
from .arrangement import CellComplex, build_arrangement, cell_statistics, interior_cells
from .directional import (DiscreteDirections, UniformDirections, g3, g4, gk, parse_distribution,
                          unif)
from .geometry import ConvexPolygon, Line, clip_halfplane, intersect_lines
from .lines import SimulationConfig
from .typical import (EstimateResult, estimate_p3_by_weighting, sample_typical_cell,
                      typical_cell_vertex_distribution)

__version__ = "0.1.0"
