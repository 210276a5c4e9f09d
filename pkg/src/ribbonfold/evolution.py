"""Characteristic initial-value solves and shape evolution.

The twist field psi(sigma, u) obeys

    [psi_sigma - (f_sigma/f) cot(psi)]_u + [f_sigma csc(psi)]_sigma
        + f sin(psi) = 0

which reduces to the sine-Gordon equation psi_sigma_u = -f sin(psi) when
the width f is constant. Boundary data live on the characteristic lines
u = 0 and sigma = 0, so the solution marches cell by cell: integrating the
equation over one grid cell and applying midpoint/trapezoid quadrature
gives an implicit relation for the cell's upper-right node, solved by
fixed-point iteration. The grid must satisfy dsigma * du * max(f) <= 0.5,
which makes that iteration a contraction with margin.

Marching proceeds along anti-diagonals (all cells whose lower-left corner
is already known), vectorized per diagonal with a fixed iteration order,
so identical inputs give bitwise-identical fields.

Shapes are recovered slice by slice: k = -psi_sigma (plus width terms),
tau = k * kappa with kappa held fixed, then frame integration. A direct
integration of the frame equations in u serves as an independent
cross-check of the whole chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .curve import (
    ArcGrid,
    Contact,
    CurveShape,
    EmbeddedCurve,
    integrate_frenet,
    self_contact,
    sigma_of_s,
)
from .errors import ConfigError, ContractionBoundError, GeometryError, NumericError, SingularityError
from .ribbon import PSI_GUARD, PsiField1D, Ribbon, WidthProfile, k_from_psi

_FP_TOL = 1e-12
_FP_MAXIT = 50

# Corner mismatch up to this size is repaired by averaging; anything larger
# is rejected as inconsistent boundary data.
_CORNER_REPAIR = 1e-9


@dataclass(frozen=True)
class CharacteristicGrid:
    """Uniform grid on [0, K] x [0, U] in characteristic coordinates."""

    K: float
    U: float
    n_sigma: int
    n_u: int

    def __post_init__(self):
        if not (self.K > 0 and self.U > 0):
            raise ConfigError("grid extents K and U must be positive")
        if self.n_sigma < 2 or self.n_u < 2:
            raise ConfigError("grid needs at least 2 nodes per direction")

    @property
    def dsigma(self) -> float:
        return self.K / (self.n_sigma - 1)

    @property
    def du(self) -> float:
        return self.U / (self.n_u - 1)

    def sigma_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.K, self.n_sigma)

    def u_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.U, self.n_u)

    def validate_contraction(self, max_f: float) -> None:
        prod = self.dsigma * self.du * max_f
        if prod > 0.5:
            raise ContractionBoundError(
                f"contraction bound violated: dsigma*du*max(f) = {prod:.6g} > 0.5; "
                "refine the grid or reduce the width"
            )


@dataclass(frozen=True)
class BoundaryData:
    """psi on the characteristic lines u = 0 (bottom) and sigma = 0 (left)."""

    psi_bottom: np.ndarray
    psi_left: np.ndarray

    def __post_init__(self):
        bottom = np.array(self.psi_bottom, dtype=float)
        left = np.array(self.psi_left, dtype=float)
        if bottom.ndim != 1 or left.ndim != 1 or bottom.size < 2 or left.size < 2:
            raise ConfigError("boundary data must be 1-d with at least 2 samples each")
        if not (np.all(np.isfinite(bottom)) and np.all(np.isfinite(left))):
            raise ConfigError("boundary data must be finite")
        gap = abs(bottom[0] - left[0])
        if gap > _CORNER_REPAIR:
            raise ConfigError(
                f"boundary corner mismatch {gap:.3g} exceeds the repairable "
                f"{_CORNER_REPAIR:g}: psi(0,0) must be single-valued"
            )
        if gap != 0.0:
            corner = 0.5 * (bottom[0] + left[0])
            bottom[0] = corner
            left[0] = corner
        object.__setattr__(self, "psi_bottom", bottom)
        object.__setattr__(self, "psi_left", left)


@dataclass(frozen=True)
class PsiField2D:
    """Solved twist field on the full characteristic grid.

    values[i, j] = psi(sigma_i, u_j), unwrapped radians.
    """

    values: np.ndarray
    grid: CharacteristicGrid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid.n_sigma, self.grid.n_u):
            raise GeometryError(
                f"field shape {v.shape} does not match grid "
                f"({self.grid.n_sigma}, {self.grid.n_u})"
            )

    def slice_at(self, j: int) -> PsiField1D:
        return PsiField1D(self.values[:, j], self.grid.dsigma)


def _diagonals(ns: int, nu: int):
    """Index arrays for cell upper-right corners, one anti-diagonal at a time."""
    for d in range(2, ns + nu - 1):
        i0 = max(1, d - (nu - 1))
        i1 = min(ns - 1, d - 1)
        i = np.arange(i0, i1 + 1)
        yield i, d - i


def _march_flat(psi: np.ndarray, cell_c: np.ndarray) -> None:
    """March the sine-Gordon cell rule in place.

    cell_c[i-1] = dsigma * du * f at the sigma-midpoint of cell column i.
    Each unknown node solves

        psi_ij = base - c * sin((psi_ij + rest) / 4)

    with base/rest built from its three known cell corners; the fixed point
    is run until the whole diagonal moves by <= 1e-12.
    """
    ns, nu = psi.shape
    for i, j in _diagonals(ns, nu):
        c = cell_c[i - 1]
        known = psi[i - 1, j] + psi[i, j - 1]
        base = known - psi[i - 1, j - 1]
        rest = known + psi[i - 1, j - 1]
        w = base.copy()
        for _ in range(_FP_MAXIT):
            wn = base - c * np.sin(0.25 * (w + rest))
            delta = np.max(np.abs(wn - w))
            w = wn
            if delta <= _FP_TOL:
                break
        else:
            raise NumericError(
                "cell fixed point did not converge in 50 iterations; the grid is "
                "too coarse for this width"
            )
        psi[i, j] = w


def _guard_angles(*angle_arrays) -> None:
    for ang in angle_arrays:
        dist = np.abs(ang - np.pi * np.round(ang / np.pi))
        if dist.size and np.min(dist) < PSI_GUARD:
            raise SingularityError(
                "psi reached a multiple of pi where cot/csc terms of the "
                "varying-width equation blow up"
            )


def _march_varying(
    psi: np.ndarray,
    dsigma: float,
    du: float,
    f_mid: np.ndarray,
    g_mid: np.ndarray,
    h_node: np.ndarray,
) -> None:
    """March the full varying-width cell rule in place.

    Per cell, with top/bottom edge means for the cot terms, left/right edge
    means for the csc terms and the 4-node mean for f sin(psi):

        [mixed difference] - dsigma * g_mid * (cot(top) - cot(bottom))
            + du * (h_i csc(right) - h_{i-1} csc(left))
            + dsigma * du * f_mid * sin(cell) = 0

    where g = f_sigma/f at cell sigma-midpoints and h = f_sigma at nodes.
    Reduces to the flat rule when g = h = 0 (but that path never evaluates
    cot/csc at all; see solve_general_pde).
    """
    ns, nu = psi.shape
    for i, j in _diagonals(ns, nu):
        c = dsigma * du * f_mid[i - 1]
        gm = dsigma * g_mid[i - 1]
        hr = du * h_node[i]
        hl = du * h_node[i - 1]
        p_tl = psi[i - 1, j]
        p_bl = psi[i - 1, j - 1]
        p_br = psi[i, j - 1]
        base = p_tl + p_br - p_bl
        bot = 0.5 * (p_bl + p_br)
        left = 0.5 * (p_bl + p_tl)
        w = base.copy()
        for _ in range(_FP_MAXIT):
            top = 0.5 * (p_tl + w)
            right = 0.5 * (p_br + w)
            cell = 0.25 * (p_tl + p_bl + p_br + w)
            _guard_angles(top, bot, right, left)
            wn = (
                base
                + gm * (1.0 / np.tan(top) - 1.0 / np.tan(bot))
                - (hr / np.sin(right) - hl / np.sin(left))
                - c * np.sin(cell)
            )
            delta = np.max(np.abs(wn - w))
            w = wn
            if delta <= _FP_TOL:
                break
        else:
            raise NumericError(
                "cell fixed point did not converge in 50 iterations; the grid is "
                "too coarse for this width profile"
            )
        psi[i, j] = w


def _init_field(grid: CharacteristicGrid, boundary: BoundaryData) -> np.ndarray:
    if len(boundary.psi_bottom) != grid.n_sigma or len(boundary.psi_left) != grid.n_u:
        raise ConfigError(
            f"boundary sizes ({len(boundary.psi_bottom)}, {len(boundary.psi_left)}) "
            f"do not match the grid ({grid.n_sigma}, {grid.n_u})"
        )
    psi = np.zeros((grid.n_sigma, grid.n_u))
    psi[:, 0] = boundary.psi_bottom
    psi[0, :] = boundary.psi_left
    return psi


def solve_sine_gordon(
    grid: CharacteristicGrid, f0: float, boundary: BoundaryData
) -> PsiField2D:
    """Solve psi_sigma_u = -f0 sin(psi) with characteristic boundary data."""
    if not f0 > 0:
        raise ConfigError(f"width must be positive, got {f0}")
    grid.validate_contraction(f0)
    psi = _init_field(grid, boundary)
    cell_c = np.full(grid.n_sigma - 1, grid.dsigma * grid.du * f0)
    _march_flat(psi, cell_c)
    return PsiField2D(psi, grid)


def solve_general_pde(
    grid: CharacteristicGrid, width: WidthProfile, boundary: BoundaryData
) -> PsiField2D:
    """Solve the full twist equation for any width profile.

    For flat widths (constant or piecewise constant) f_sigma = 0 kills the
    cot/csc terms and the update is the sine-Gordon cell rule with f taken
    at each cell's sigma-midpoint, so a constant width reproduces
    solve_sine_gordon bitwise. Sampled widths use the full rule and refuse
    fields that reach a multiple of pi.
    """
    grid.validate_contraction(width.max_value())
    psi = _init_field(grid, boundary)
    sig_mid = (np.arange(grid.n_sigma - 1) + 0.5) * grid.dsigma
    f_mid = width.value_at(sig_mid)
    if width.is_flat:
        _march_flat(psi, grid.dsigma * grid.du * f_mid)
    else:
        sig = grid.sigma_nodes()
        fs_mid = width.derivative_at(sig_mid)
        g_mid = fs_mid / f_mid
        h_node = width.derivative_at(sig)
        _march_varying(psi, grid.dsigma, grid.du, f_mid, g_mid, h_node)
    return PsiField2D(psi, grid)


def sine_gordon_cell_residual(values: np.ndarray, dsigma: float, du: float, f) -> float:
    """Max residual of the sine-Gordon cell rule over all cells.

    f may be a scalar or a per-cell-column array of length n_sigma - 1.
    This is the solver's own discrete operator, so a solved field returns
    roughly the fixed-point tolerance and an analytic solution returns its
    truncation error.
    """
    v = np.asarray(values, dtype=float)
    mixed = (v[1:, 1:] - v[1:, :-1] - v[:-1, 1:] + v[:-1, :-1]) / (dsigma * du)
    avg = 0.25 * (v[1:, 1:] + v[1:, :-1] + v[:-1, 1:] + v[:-1, :-1])
    f_col = np.asarray(f, dtype=float)
    if f_col.ndim == 1:
        f_col = f_col[:, None]
    return float(np.max(np.abs(mixed + f_col * np.sin(avg))))


def discrete_residual(field: PsiField2D, width: WidthProfile) -> float:
    """Residual of the solved field under its own discrete operator."""
    grid = field.grid
    sig_mid = (np.arange(grid.n_sigma - 1) + 0.5) * grid.dsigma
    f_mid = width.value_at(sig_mid)
    if width.is_flat:
        return sine_gordon_cell_residual(field.values, grid.dsigma, grid.du, f_mid)
    v = field.values
    sig = grid.sigma_nodes()
    fs_mid = width.derivative_at(sig_mid)
    g_mid = (fs_mid / f_mid)[:, None]
    h = width.derivative_at(sig)[:, None]
    top = 0.5 * (v[:-1, 1:] + v[1:, 1:])
    bot = 0.5 * (v[:-1, :-1] + v[1:, :-1])
    right = 0.5 * (v[1:, :-1] + v[1:, 1:])
    left = 0.5 * (v[:-1, :-1] + v[:-1, 1:])
    cell = 0.25 * (v[1:, 1:] + v[1:, :-1] + v[:-1, 1:] + v[:-1, :-1])
    _guard_angles(top, bot, right, left)
    mixed = (v[1:, 1:] - v[1:, :-1] - v[:-1, 1:] + v[:-1, :-1]) / (grid.dsigma * grid.du)
    res = (
        mixed
        - g_mid * (1.0 / np.tan(top) - 1.0 / np.tan(bot)) / grid.du
        + (h[1:] / np.sin(right) - h[:-1] / np.sin(left)) / grid.dsigma
        + f_mid[:, None] * np.sin(cell)
    )
    return float(np.max(np.abs(res)))


@dataclass(frozen=True)
class FrameField:
    """Frames over the (sigma, u) grid from direct integration of the ansatz."""

    grid: CharacteristicGrid
    e1: np.ndarray  # (n_sigma, n_u, 3)
    e2: np.ndarray
    e3: np.ndarray


def _batch_orthonormalize(E1, E2, E3):
    E1 = E1 / np.linalg.norm(E1, axis=1, keepdims=True)
    E2 = E2 - np.sum(E2 * E1, axis=1, keepdims=True) * E1
    E2 = E2 / np.linalg.norm(E2, axis=1, keepdims=True)
    E3 = np.cross(E1, E2)
    return E1, E2, E3


def evolve_frames_direct(
    ribbon: Ribbon, grid: CharacteristicGrid, psi: PsiField2D
) -> FrameField:
    """Integrate the frame deformation equations directly in u.

    At fixed sigma the triple rotates with body angular velocity
    (v, -f sin(psi), f cos(psi)); each u step applies the exact rotation
    with psi frozen at the step midpoint, then re-orthonormalizes. That
    vector satisfies the zero-curvature condition against the
    sigma-direction rotation vector (k, 0, 1) used in frame integration,
    so when psi solves the twist equation the frames it produces agree
    with the per-slice Frenet frames up to truncation error. This path
    never evaluates the geodesic-curvature relation during the evolution,
    which makes it an independent cross-check of the psi -> k -> shape
    chain.

    Requires the shape's sigma(s) samples to coincide with the grid's
    sigma nodes (automatic for constant kappa with ds * kappa = dsigma),
    and the ribbon's state to be self-consistent: its shape's torsion
    must equal k_from_psi(psi) * kappa, since the u = 0 frames come from
    integrating that shape. An inconsistent pair would silently evolve
    from the wrong frames, so it is rejected.
    """
    shape = ribbon.shape
    width = ribbon.width
    sg = sigma_of_s(shape)
    if shape.grid.n_samples != grid.n_sigma or np.max(
        np.abs(sg.sigma - grid.sigma_nodes())
    ) > 1e-9 * max(1.0, grid.K):
        raise GeometryError(
            "shape's tangent-indicatrix samples must coincide with the grid's "
            "sigma nodes for direct frame evolution"
        )
    if np.max(np.abs(psi.values[:, 0] - ribbon.psi.values)) > 1e-9:
        raise GeometryError("psi field's u=0 row disagrees with the ribbon's twist state")
    tau_expected = k_from_psi(ribbon.psi, width) * shape.kappa
    if np.max(np.abs(shape.tau - tau_expected)) > 1e-9 * max(1.0, float(np.max(np.abs(tau_expected)))):
        raise GeometryError(
            "ribbon state is inconsistent: shape torsion does not equal "
            "k_from_psi(psi) * kappa, so the u = 0 frames would be wrong"
        )

    base = integrate_frenet(shape)
    ns, nu = grid.n_sigma, grid.n_u
    du = grid.du
    sig = grid.sigma_nodes()
    f = width.value_at(sig)
    fs = width.derivative_at(sig)

    E1 = np.empty((ns, nu, 3))
    E2 = np.empty((ns, nu, 3))
    E3 = np.empty((ns, nu, 3))
    e1, e2, e3 = base.e1.copy(), base.e2.copy(), base.e3.copy()
    E1[:, 0], E2[:, 0], E3[:, 0] = e1, e2, e3

    for j in range(nu - 1):
        psi_mid = 0.5 * (psi.values[:, j] + psi.values[:, j + 1])
        if width.is_flat:
            v = np.zeros(ns)
        else:
            _guard_angles(psi_mid)
            v = fs / np.sin(psi_mid)
        # body-frame rotation vector over one u step
        wx = v
        wy = -f * np.sin(psi_mid)
        wz = f * np.cos(psi_mid)
        wnorm = np.sqrt(wx * wx + wy * wy + wz * wz)
        angle = wnorm * du
        ax, ay, az = wx / wnorm, wy / wnorm, wz / wnorm
        ca = np.cos(angle)[:, None]
        sa = np.sin(angle)[:, None]
        axes = np.stack([ax, ay, az], axis=1)

        def rotate(c1, c2, c3):
            # body vector components (c1, c2, c3) rotated by Rodrigues' formula,
            # then mapped back through the current frame
            vb = np.stack([c1, c2, c3], axis=1)
            dot = np.sum(axes * vb, axis=1, keepdims=True)
            vr = ca * vb + sa * np.cross(axes, vb) + (1.0 - ca) * dot * axes
            return vr[:, 0:1] * e1 + vr[:, 1:2] * e2 + vr[:, 2:3] * e3

        one = np.ones(ns)
        zero = np.zeros(ns)
        n1 = rotate(one, zero, zero)
        n2 = rotate(zero, one, zero)
        n3 = rotate(zero, zero, one)
        drift = np.max(
            np.abs(
                np.stack(
                    [
                        np.sum(n1 * n1, axis=1) - 1.0,
                        np.sum(n2 * n2, axis=1) - 1.0,
                        np.sum(n1 * n2, axis=1),
                        np.sum(n1 * n3, axis=1),
                        np.sum(n2 * n3, axis=1),
                    ]
                )
            )
        )
        if drift > 1e-6:
            raise NumericError(
                f"frame drift {drift:.3g} after a u step; inputs are inconsistent"
            )
        e1, e2, e3 = _batch_orthonormalize(n1, n2, n3)
        E1[:, j + 1], E2[:, j + 1], E3[:, j + 1] = e1, e2, e3

    return FrameField(grid, E1, E2, E3)


@dataclass
class ContactEvent:
    """Where a trajectory first became self-proximal."""

    slice_index: int
    u: float
    contact: Contact


@dataclass
class ShapeTrajectory:
    """Curve shapes over the evolution parameter.

    kappa and the arclength grid are shared by every slice (the evolution
    preserves both); only tau varies. curves[k] realizes slice k from the
    canonical frame. u_values[k] is the slice's u coordinate; for
    time-reparameterized trajectories t_values carries the time stamps and
    u_values = g(t).
    """

    grid: ArcGrid
    kappa: np.ndarray
    u_values: np.ndarray
    taus: np.ndarray  # (n_slices, n_samples)
    curves: List[EmbeddedCurve]
    width: WidthProfile
    psi: Optional[PsiField2D] = None
    t_values: Optional[np.ndarray] = field(default=None)

    @property
    def n_slices(self) -> int:
        return len(self.u_values)

    def shape_at(self, k: int) -> CurveShape:
        return CurveShape(self.grid, self.kappa, self.taus[k])

    def curve_at(self, k: int) -> EmbeddedCurve:
        return self.curves[k]


def _tau_slice(
    shape0: CurveShape, sg_sigma: np.ndarray, psi_col: PsiField1D, width: WidthProfile
) -> np.ndarray:
    k_uniform = k_from_psi(psi_col, width)
    k_at_s = np.interp(sg_sigma, psi_col.sigma(), k_uniform)
    return k_at_s * shape0.kappa


def _check_span(shape0: CurveShape, grid: CharacteristicGrid) -> np.ndarray:
    sg = sigma_of_s(shape0)
    if abs(sg.K - grid.K) > 1e-9 * max(1.0, grid.K):
        raise GeometryError(
            f"psi grid spans [0, {grid.K:g}] but the shape's tangent indicatrix "
            f"has length {sg.K:g}"
        )
    return sg.sigma


def shape_trajectory(
    shape0: CurveShape, psi: PsiField2D, width: WidthProfile
) -> ShapeTrajectory:
    """Realize every u slice of a solved field as a curve.

    kappa is copied by reference into every slice; tau comes from
    tau = k * kappa with k = k_from_psi of the slice, interpolated from the
    uniform sigma grid onto the shape's sigma(s) samples.
    """
    sg_sigma = _check_span(shape0, psi.grid)
    n_u = psi.grid.n_u
    taus = np.empty((n_u, shape0.grid.n_samples))
    curves = []
    for j in range(n_u):
        taus[j] = _tau_slice(shape0, sg_sigma, psi.slice_at(j), width)
        curves.append(integrate_frenet(CurveShape(shape0.grid, shape0.kappa, taus[j])))
    return ShapeTrajectory(
        grid=shape0.grid,
        kappa=shape0.kappa,
        u_values=psi.grid.u_nodes(),
        taus=taus,
        curves=curves,
        width=width,
        psi=psi,
    )


def _field_from_source(grid, width, source) -> PsiField2D:
    if isinstance(source, BoundaryData):
        return solve_general_pde(grid, width, source)
    if isinstance(source, PsiField2D):
        return source
    if hasattr(source, "psi"):
        values = source.psi(grid.sigma_nodes()[:, None], grid.u_nodes()[None, :])
        return PsiField2D(np.asarray(values, dtype=float), grid)
    raise ConfigError(
        "field source must be BoundaryData, PsiField2D, or expose psi(sigma, u)"
    )


def run_until_contact(
    shape0: CurveShape,
    width: WidthProfile,
    source,
    grid: CharacteristicGrid,
    threshold: Optional[float] = None,
    exclusion: int = 5,
) -> tuple[ShapeTrajectory, Optional[ContactEvent]]:
    """Evolve slices in increasing u, stopping at the first self-contact.

    source may be BoundaryData (numeric solve with the given width), an
    already-solved PsiField2D, or an analytic object exposing psi(sigma, u)
    such as an antikink. With threshold None no contact check runs and the
    full trajectory is returned. The contact slice itself is included.
    """
    field2d = _field_from_source(grid, width, source)
    sg_sigma = _check_span(shape0, grid)
    u_nodes = grid.u_nodes()
    taus = []
    curves = []
    event = None
    for j in range(grid.n_u):
        tau_j = _tau_slice(shape0, sg_sigma, field2d.slice_at(j), width)
        curve = integrate_frenet(CurveShape(shape0.grid, shape0.kappa, tau_j))
        taus.append(tau_j)
        curves.append(curve)
        if threshold is not None:
            hit = self_contact(curve, threshold, exclusion)
            if hit is not None:
                event = ContactEvent(j, float(u_nodes[j]), hit)
                break
    m = len(curves)
    traj = ShapeTrajectory(
        grid=shape0.grid,
        kappa=shape0.kappa,
        u_values=u_nodes[:m].copy(),
        taus=np.array(taus),
        curves=curves,
        width=width,
        psi=field2d,
    )
    return traj, event


@dataclass(frozen=True)
class TimeMap:
    """Sampled reparameterization gamma(t) with g(t) = int_0^t gamma.

    gamma may touch zero (e.g. linear ramps start at gamma(0) = 0) but g
    must be strictly increasing between consecutive samples, so g is
    invertible on the sampled range.
    """

    t: np.ndarray
    gamma: np.ndarray
    g: np.ndarray = field(init=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        gamma = np.asarray(self.gamma, dtype=float)
        if t.ndim != 1 or t.shape != gamma.shape or t.size < 2:
            raise ConfigError("time map needs matching 1-d t and gamma, len >= 2")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ConfigError("t samples must start at 0 and increase strictly")
        if np.any(gamma < 0):
            raise ConfigError("gamma must be nonnegative")
        g = np.concatenate([[0.0], np.cumsum(0.5 * (gamma[1:] + gamma[:-1]) * np.diff(t))])
        if np.any(np.diff(g) <= 0):
            raise ConfigError("g(t) must be strictly increasing (gamma vanishes on an interval)")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "g", g)

    @staticmethod
    def constant(c: float, t_end: float, n_t: int) -> "TimeMap":
        if not c > 0:
            raise ConfigError("constant gamma must be positive")
        t = np.linspace(0.0, t_end, n_t)
        return TimeMap(t, np.full(n_t, float(c)))

    @staticmethod
    def linear(c: float, t_end: float, n_t: int) -> "TimeMap":
        if not c > 0:
            raise ConfigError("linear gamma needs a positive slope")
        t = np.linspace(0.0, t_end, n_t)
        return TimeMap(t, c * t)

    def g_of(self, t_query) -> np.ndarray:
        t_query = np.asarray(t_query, dtype=float)
        if np.any(t_query < self.t[0]) or np.any(t_query > self.t[-1]):
            raise ConfigError("time query outside the sampled range")
        return np.interp(t_query, self.t, self.g)


def time_reparameterize(traj: ShapeTrajectory, tmap: TimeMap) -> ShapeTrajectory:
    """Resample a u trajectory at u = g(t) for each sampled t.

    psi columns are interpolated linearly in u (psi is the fundamental
    unknown; interpolating positions would break the fixed-kappa
    constraint), then each slice's shape and curve are recomputed.
    """
    if traj.psi is None:
        raise ConfigError("trajectory carries no psi field; cannot reparameterize")
    grid = traj.psi.grid
    u_targets = tmap.g
    if np.any(u_targets < -1e-12) or np.any(u_targets > grid.U * (1.0 + 1e-12)):
        raise ConfigError(
            f"g(t) leaves [0, {grid.U:g}]; shrink t_end or enlarge U"
        )
    u_targets = np.clip(u_targets, 0.0, grid.U)
    shape0 = CurveShape(traj.grid, traj.kappa, traj.taus[0])
    sg_sigma = _check_span(shape0, grid)

    u_nodes = grid.u_nodes()
    du = grid.du
    taus = np.empty((len(u_targets), traj.grid.n_samples))
    curves = []
    for m, ustar in enumerate(u_targets):
        j = int(np.clip(np.searchsorted(u_nodes, ustar) - 1, 0, grid.n_u - 2))
        w = (ustar - u_nodes[j]) / du
        col = (1.0 - w) * traj.psi.values[:, j] + w * traj.psi.values[:, j + 1]
        psi_col = PsiField1D(col, grid.dsigma)
        taus[m] = _tau_slice(shape0, sg_sigma, psi_col, traj.width)
        curves.append(integrate_frenet(CurveShape(traj.grid, traj.kappa, taus[m])))
    return ShapeTrajectory(
        grid=traj.grid,
        kappa=traj.kappa,
        u_values=np.asarray(u_targets),
        taus=taus,
        curves=curves,
        width=traj.width,
        psi=traj.psi,
        t_values=tmap.t.copy(),
    )
