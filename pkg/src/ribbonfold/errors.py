"""Exception hierarchy for ribbonfold.

The CLI maps these onto exit codes: configuration problems exit 2, numeric
or geometric failures during a run exit 3.
"""


class RibbonfoldError(Exception):
    """Base class for all ribbonfold errors."""


class ConfigError(RibbonfoldError):
    """Bad configuration text, bad CLI parameters, or a violated config invariant."""


class ContractionBoundError(ConfigError):
    """Grid too coarse for the per-cell fixed point: dsigma * du * max(f) > 0.5."""


class GeometryError(RibbonfoldError):
    """Degenerate or invalid geometry (kappa below the floor, collinear points,
    non-orthonormal frame)."""


class SingularityError(RibbonfoldError):
    """psi too close to a multiple of pi for a cot/csc evaluation with varying width."""


class NumericError(RibbonfoldError):
    """Iteration failed to converge or a numeric invariant drifted out of tolerance."""
