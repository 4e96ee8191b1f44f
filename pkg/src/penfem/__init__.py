"""Penalty finite element methods for constrained inequality problems."""

__version__ = "0.1.0"

from .errors import (
    AssemblyError,
    ConfigError,
    CycleDetected,
    EigenNonconvergence,
    EmptyRegionError,
    FixedPointNonconvergence,
    InvalidGeometryError,
    LinearSolveFailure,
    NewtonNonconvergence,
    NoFeasibleSubset,
    PenfemError,
    SmallnessViolation,
    SolverError,
    SweepIncomplete,
    TooManyConstraints,
)
from .mesh import (
    RegionTag,
    TriangulationLevel,
    build_interval_mesh,
    build_rectangle_mesh,
    load_mesh,
    prolongation_matrix,
    refine_uniform,
    save_mesh,
)
