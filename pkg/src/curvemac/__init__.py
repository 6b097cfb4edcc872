"""Simplified MAC solver for 2-D incompressible flow on boundary-fitted grids."""

from .boundary import BoundarySpec, Segment, apply_pressure_bc, apply_velocity_bc
from .errors import (ConfigError, CurveMACError, DivergenceError, GeometryError,
                     MeshQualityError, NonConvergenceError, NoVortexError, TopologyError,
                     ZeroChordError)
from .grid import CurvilinearMesh, generate_grid, read_mesh, validate_grid, write_mesh
from .kernels import BACKEND
from .metrics import compute_metrics
from .scenarios import (Scenario, build_lid_cavity, build_parallel_plates, build_stenosis,
                        convergence_study, detect_recirculation, locate_primary_vortex,
                        outlet_profile)
from .solver import FlowState, FluidProps, MACSolver, advance_step, run_to_steady
from .spline import build_spline, evaluate_spline, sample_boundary

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BoundarySpec", "ConfigError", "CurveMACError", "CurvilinearMesh",
    "DivergenceError", "FlowState", "FluidProps", "GeometryError", "MACSolver",
    "MeshQualityError", "NoVortexError", "NonConvergenceError", "Scenario", "Segment",
    "TopologyError", "ZeroChordError", "advance_step", "apply_pressure_bc",
    "apply_velocity_bc", "build_lid_cavity", "build_parallel_plates", "build_spline",
    "build_stenosis", "compute_metrics", "convergence_study", "detect_recirculation",
    "evaluate_spline", "generate_grid", "locate_primary_vortex", "outlet_profile",
    "read_mesh", "run_to_steady", "sample_boundary", "validate_grid", "write_mesh",
]
