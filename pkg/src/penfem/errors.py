"""Exception types shared across the package."""


class PenfemError(Exception):
    """Base class for all package errors."""


class InvalidGeometryError(PenfemError):
    """Mesh construction input is geometrically invalid."""


class AssemblyError(PenfemError):
    """Finite element assembly failed (degenerate geometry or bad data)."""


class EmptyRegionError(PenfemError):
    """An operation referenced a boundary region with no edges."""


class ConfigError(PenfemError):
    """Experiment configuration could not be parsed or validated."""


class SolverError(PenfemError):
    """Base class for solver failures.

    Never used as a silent partial result: a raised SolverError carries the
    diagnostics accumulated up to the failure point.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class NewtonNonconvergence(SolverError):
    """Inner Newton iteration exhausted its iteration budget."""


class FixedPointNonconvergence(SolverError):
    """Outer fixed-point iteration exhausted its iteration budget."""


class LinearSolveFailure(SolverError):
    """A linear system inside a solver was singular or failed to factorize."""


class SmallnessViolation(SolverError):
    """The uniqueness/contraction condition on the problem constants fails."""


class CycleDetected(SolverError):
    """Active-set iteration revisited a previous working set without converging."""


class TooManyConstraints(SolverError):
    """Exhaustive enumeration requested with too many constrained points."""


class NoFeasibleSubset(SolverError):
    """No active subset produced a feasible KKT point (indicates an assembly bug)."""


class EigenNonconvergence(SolverError):
    """Trace eigenvalue estimation did not converge."""


class SweepIncomplete(PenfemError):
    """A sweep aborted early; the rows completed so far are attached."""

    def __init__(self, message, partial_report=None, cause=None):
        super().__init__(message)
        self.partial_report = partial_report
        self.cause = cause
