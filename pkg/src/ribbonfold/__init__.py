"""ribbonfold: twist-field evolution and curve reconstruction for ribbons.

The package models a narrow ribbon whose centerline is described by
curvature and torsion. A twist angle psi, measured against the tangent
indicatrix arclength sigma, evolves in a deformation parameter u under a
hyperbolic equation whose constant-width reduction is the sine-Gordon
equation. The main entry points:

* :func:`integrate_frenet` / :func:`estimate_shape` move between
  curvature/torsion samples and embedded space curves.
* :func:`solve_sine_gordon` / :func:`solve_general_pde` march the twist
  field across a characteristic grid.
* :func:`shape_trajectory` / :func:`run_until_contact` turn a solved
  field into a sequence of curves, stopping at self-contact.
* :mod:`ribbonfold.validation` holds the acceptance criteria; run them
  with ``ribbonfold validate``.
"""

from .curve import (
    KAPPA_MIN,
    ArcGrid,
    Contact,
    CurveShape,
    EmbeddedCurve,
    Frame,
    SigmaGrid,
    canonical_frame,
    estimate_shape,
    geodesic_curvature,
    integrate_frenet,
    self_contact,
    sigma_of_s,
)
from .errors import (
    ConfigError,
    ContractionBoundError,
    GeometryError,
    NumericError,
    RibbonfoldError,
    SingularityError,
)
from .evolution import (
    BoundaryData,
    CharacteristicGrid,
    ContactEvent,
    FrameField,
    PsiField2D,
    ShapeTrajectory,
    TimeMap,
    discrete_residual,
    evolve_frames_direct,
    run_until_contact,
    shape_trajectory,
    sine_gordon_cell_residual,
    solve_general_pde,
    solve_sine_gordon,
    time_reparameterize,
)
from .ribbon import (
    PsiField1D,
    Ribbon,
    WidthProfile,
    k_from_psi,
    neighboring_curve,
    nu_vector,
    psi_from_k,
    v_from_psi,
)
from .soliton import (
    AntikinkParams,
    PiecewiseAntikink,
    antikink_psi,
    antikink_residual,
    fit_antikink_to_constant,
    kink_center,
    kink_speed,
    match_piecewise,
)

__version__ = "0.1.0"

__all__ = [
    "KAPPA_MIN",
    "ArcGrid",
    "Contact",
    "CurveShape",
    "EmbeddedCurve",
    "Frame",
    "SigmaGrid",
    "canonical_frame",
    "estimate_shape",
    "geodesic_curvature",
    "integrate_frenet",
    "self_contact",
    "sigma_of_s",
    "ConfigError",
    "ContractionBoundError",
    "GeometryError",
    "NumericError",
    "RibbonfoldError",
    "SingularityError",
    "BoundaryData",
    "CharacteristicGrid",
    "ContactEvent",
    "FrameField",
    "PsiField2D",
    "ShapeTrajectory",
    "TimeMap",
    "discrete_residual",
    "evolve_frames_direct",
    "run_until_contact",
    "shape_trajectory",
    "sine_gordon_cell_residual",
    "solve_general_pde",
    "solve_sine_gordon",
    "time_reparameterize",
    "PsiField1D",
    "Ribbon",
    "WidthProfile",
    "k_from_psi",
    "neighboring_curve",
    "nu_vector",
    "psi_from_k",
    "v_from_psi",
    "AntikinkParams",
    "PiecewiseAntikink",
    "antikink_psi",
    "antikink_residual",
    "fit_antikink_to_constant",
    "kink_center",
    "kink_speed",
    "match_piecewise",
    "__version__",
]
