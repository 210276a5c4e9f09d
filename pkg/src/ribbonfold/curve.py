"""Discrete differential geometry of space curves.

A curve is described by sampled curvature kappa(s) and torsion tau(s) on a
uniform arclength grid. Frame integration advances an orthonormal triple
(e1, e2, e3) by the exact rotation of the moving-frame system over each step
(angular velocity frozen at the step midpoint), which is second-order
accurate and never de-normalizes the frame beyond roundoff. Positions are
accumulated with the trapezoidal rule on the tangent e1.

Also here: arclength of the tangent indicatrix sigma(s) with dsigma/ds =
kappa, geodesic curvature k = tau/kappa resampled onto the uniform sigma
grid, a position-only shape estimator used as an independent oracle, and
self-contact detection for polyline curves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import GeometryError

# Non-degeneracy floor for curvature, in units of 1/length. Shapes with
# kappa below this are rejected: the normal direction is not well defined.
KAPPA_MIN = 1e-6

# Tolerance for frame orthonormality checks.
FRAME_TOL = 1e-9


@dataclass(frozen=True)
class ArcGrid:
    """Uniform arclength grid: n_samples nodes spaced ds apart."""

    n_samples: int
    ds: float

    def __post_init__(self):
        if self.n_samples < 2:
            raise GeometryError(f"grid needs at least 2 samples, got {self.n_samples}")
        if not self.ds > 0:
            raise GeometryError(f"arclength step must be positive, got {self.ds}")

    @property
    def length(self) -> float:
        return (self.n_samples - 1) * self.ds

    def s(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.ds


@dataclass(frozen=True)
class CurveShape:
    """Sampled curvature and torsion on an ArcGrid.

    This is the complete shape descriptor: two curves with the same kappa,
    tau arrays are congruent up to a rigid motion.
    """

    grid: ArcGrid
    kappa: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        kappa = np.asarray(self.kappa, dtype=float)
        tau = np.asarray(self.tau, dtype=float)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "tau", tau)
        n = self.grid.n_samples
        if kappa.shape != (n,) or tau.shape != (n,):
            raise GeometryError(
                f"kappa/tau must have exactly {n} entries, got {kappa.shape} and {tau.shape}"
            )
        if not np.all(np.isfinite(kappa)) or not np.all(np.isfinite(tau)):
            raise GeometryError("kappa/tau must be finite")
        if np.min(kappa) < KAPPA_MIN:
            raise GeometryError(
                f"kappa must stay >= {KAPPA_MIN:g} everywhere (min was {np.min(kappa):g})"
            )


@dataclass(frozen=True)
class Frame:
    """Position plus a right-handed orthonormal triple."""

    position: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    def __post_init__(self):
        for name in ("position", "e1", "e2", "e3"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,):
                raise GeometryError(f"{name} must be a 3-vector")
            object.__setattr__(self, name, v)
        R = self.matrix()
        if np.max(np.abs(R.T @ R - np.eye(3))) > FRAME_TOL:
            raise GeometryError("frame vectors are not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > FRAME_TOL:
            raise GeometryError("frame must be right-handed (det = +1)")

    def matrix(self) -> np.ndarray:
        """3x3 matrix with e1, e2, e3 as columns."""
        return np.column_stack([self.e1, self.e2, self.e3])


def canonical_frame() -> Frame:
    """Reference frame used when none is given: origin, axes = identity."""
    return Frame(np.zeros(3), np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]))


@dataclass(frozen=True)
class EmbeddedCurve:
    """A realized curve: positions and frames at every grid node.

    Stored as (n, 3) arrays for the position and each frame vector. sigma
    optionally carries the tangent-indicatrix arclength at each node (filled
    in by integrate_frenet, used by width profiles defined over sigma).
    """

    grid: ArcGrid
    positions: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    sigma: Optional[np.ndarray] = field(default=None)

    @property
    def n(self) -> int:
        return self.grid.n_samples

    def frame(self, i: int) -> Frame:
        return Frame(self.positions[i], self.e1[i], self.e2[i], self.e3[i])

    def reversed(self) -> "EmbeddedCurve":
        sig = None if self.sigma is None else self.sigma[::-1].copy()
        return EmbeddedCurve(
            self.grid,
            self.positions[::-1].copy(),
            self.e1[::-1].copy(),
            self.e2[::-1].copy(),
            self.e3[::-1].copy(),
            sig,
        )


@dataclass(frozen=True)
class SigmaGrid:
    """Sampled map sigma(s) and its total K = sigma(L)."""

    sigma: np.ndarray
    K: float

    def __post_init__(self):
        sig = np.asarray(self.sigma, dtype=float)
        object.__setattr__(self, "sigma", sig)
        if sig[0] != 0.0 or np.any(np.diff(sig) <= 0):
            raise GeometryError("sigma(s) must start at 0 and be strictly increasing")
        if not self.K > 0:
            raise GeometryError("K must be positive")


def _rodrigues(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rotation matrix about a unit axis."""
    K = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def _gram_schmidt(R: np.ndarray) -> np.ndarray:
    e1 = R[:, 0] / np.linalg.norm(R[:, 0])
    e2 = R[:, 1] - (R[:, 1] @ e1) * e1
    e2 /= np.linalg.norm(e2)
    e3 = np.cross(e1, e2)
    return np.column_stack([e1, e2, e3])


def integrate_frenet(shape: CurveShape, initial: Optional[Frame] = None) -> EmbeddedCurve:
    """Integrate the moving-frame system along the curve.

    Each step rotates the frame about the instantaneous rotation axis
    (tau, 0, kappa) in body coordinates, with kappa and tau frozen at the
    step midpoint, then re-orthonormalizes. The position advances by the
    trapezoid of the tangent over the step. Both pieces are second order
    in ds.

    Parameters
    ----------
    shape : CurveShape
    initial : Frame, optional
        Starting frame; defaults to canonical_frame().

    Returns
    -------
    EmbeddedCurve with sigma filled in from sigma_of_s(shape).
    """
    if initial is None:
        initial = canonical_frame()
    kappa, tau, ds = shape.kappa, shape.tau, shape.grid.ds
    n = shape.grid.n_samples

    R = initial.matrix().copy()
    x = initial.position.copy()
    pos = np.empty((n, 3))
    E1 = np.empty((n, 3))
    E2 = np.empty((n, 3))
    E3 = np.empty((n, 3))
    pos[0], E1[0], E2[0], E3[0] = x, R[:, 0], R[:, 1], R[:, 2]

    for i in range(n - 1):
        km = 0.5 * (kappa[i] + kappa[i + 1])
        tm = 0.5 * (tau[i] + tau[i + 1])
        w = np.hypot(km, tm)  # >= KAPPA_MIN, never zero for a valid shape
        Q = _rodrigues(np.array([tm, 0.0, km]) / w, w * ds)
        Rn = _gram_schmidt(R @ Q)
        x = x + 0.5 * ds * (R[:, 0] + Rn[:, 0])
        R = Rn
        pos[i + 1], E1[i + 1], E2[i + 1], E3[i + 1] = x, R[:, 0], R[:, 1], R[:, 2]

    return EmbeddedCurve(shape.grid, pos, E1, E2, E3, sigma=sigma_of_s(shape).sigma)


def estimate_shape(curve: EmbeddedCurve) -> CurveShape:
    """Estimate kappa and tau from positions alone.

    Curvature comes from the circumscribed circle of consecutive point
    triples; torsion from the rotation of the osculating-plane normal
    between neighboring triples, projected on the discrete tangent. Both
    are second-order accurate at interior nodes. Endpoint values copy the
    nearest interior estimate and carry no accuracy claim.

    Deliberately independent of the stored frames so it can serve as a
    round-trip oracle for integrate_frenet.
    """
    pos = curve.positions
    n = curve.n
    ds = curve.grid.ds
    if n < 5:
        raise GeometryError("shape estimation needs at least 5 points")

    u = pos[1:-1] - pos[:-2]
    v = pos[2:] - pos[1:-1]
    w = pos[2:] - pos[:-2]
    cr = np.cross(u, v)
    crn = np.linalg.norm(cr, axis=1)
    un = np.linalg.norm(u, axis=1)
    vn = np.linalg.norm(v, axis=1)
    wn = np.linalg.norm(w, axis=1)
    if np.any(un == 0) or np.any(vn == 0):
        raise GeometryError("coincident consecutive points")

    kap = np.empty(n)
    kap[1:-1] = 2.0 * crn / (un * vn * wn)
    if np.min(kap[1:-1]) < 0.5 * KAPPA_MIN:
        raise GeometryError(
            "collinear point triple: curvature below the non-degeneracy floor"
        )

    nhat = cr / crn[:, None]          # osculating normals at nodes 1..n-2
    T = w / wn[:, None]               # centered tangents at nodes 1..n-2
    tau = np.empty(n)
    # rotation of the osculating normal across two steps, i = 2..n-3
    tau[2:-2] = np.einsum("ij,ij->i", np.cross(nhat[:-2], nhat[2:]), T[1:-1]) / (2.0 * ds)

    kap[0], kap[-1] = kap[1], kap[-2]
    tau[0] = tau[1] = tau[2]
    tau[-1] = tau[-2] = tau[-3]
    # estimates on a barely-curved valid shape may dip below the floor by
    # roundoff; clamp so the result is again a valid CurveShape
    np.maximum(kap, KAPPA_MIN, out=kap)
    return CurveShape(curve.grid, kap, tau)


def sigma_of_s(shape: CurveShape) -> SigmaGrid:
    """Arclength of the tangent indicatrix: cumulative trapezoid of kappa."""
    ds = shape.grid.ds
    k = shape.kappa
    sigma = np.concatenate([[0.0], np.cumsum(0.5 * (k[1:] + k[:-1]) * ds)])
    return SigmaGrid(sigma, float(sigma[-1]))


def geodesic_curvature(shape: CurveShape) -> tuple[np.ndarray, np.ndarray]:
    """Geodesic curvature k = tau/kappa resampled on the uniform sigma grid.

    Returns (sigma_nodes, k_values), both of length n_samples, with
    sigma_nodes uniform over [0, K].
    """
    sg = sigma_of_s(shape)
    k_s = shape.tau / shape.kappa
    sigma_uniform = np.linspace(0.0, sg.K, shape.grid.n_samples)
    return sigma_uniform, np.interp(sigma_uniform, sg.sigma, k_s)


class Contact(NamedTuple):
    i: int
    j: int
    distance: float


def self_contact(
    curve: EmbeddedCurve, threshold: float, exclusion: int = 1
) -> Optional[Contact]:
    """First pair of non-neighboring nodes closer than threshold.

    Scans pairs (i, j) with j - i > exclusion in lexicographic order and
    returns the first hit, which makes the result deterministic. Note the
    scan order is part of the contract: when several pairs qualify, the
    pair returned for the reversed curve is the first hit in the reversed
    order, not necessarily the image of this one.
    """
    if exclusion < 1:
        raise GeometryError("exclusion must be >= 1")
    pos = curve.positions
    n = len(pos)
    for i in range(n - exclusion - 1):
        j0 = i + exclusion + 1
        d = np.linalg.norm(pos[j0:] - pos[i], axis=1)
        hits = np.nonzero(d < threshold)[0]
        if hits.size:
            return Contact(i, j0 + int(hits[0]), float(d[hits[0]]))
    return None
