"""Ribbon state: twist angle psi, width profile f, and their algebra.

A ribbon is the base curve plus a field of tangent planes. The plane at each
point is spanned by the tangent e1 and the vector nu = cos(psi) e2 +
sin(psi) e3; the neighboring curve x + f e2 encodes the offset geometry.
The twist field determines the geodesic curvature of the tangent indicatrix
through k = -psi_sigma + (f_sigma/f) cot(psi), and the companion quantity
v = f_sigma csc(psi).

psi is stored unwrapped (no mod 2*pi reduction): the solitons of interest
sweep psi through a full 2*pi range and psi_sigma must stay well defined
across branch cuts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .curve import CurveShape, EmbeddedCurve, Frame, sigma_of_s
from .errors import ConfigError, GeometryError, SingularityError

# Minimum distance of psi from a multiple of pi before cot/csc evaluation
# with a varying width is refused.
PSI_GUARD = 1e-3


@dataclass(frozen=True)
class WidthProfile:
    """Positive width f over sigma: constant, piecewise constant, or sampled.

    Piecewise profiles are stored as (segment_end, value) pairs: the i-th
    segment covers (end_{i-1}, end_i] with end_0 = 0, so a breakpoint node
    belongs to the segment on its left. Within each piecewise segment
    f_sigma is identically 0; the profile is never differentiated across a
    joint. Sampled profiles carry their own sigma nodes and are the only
    variant with a nonzero derivative.
    """

    kind: str
    f0: float = 0.0
    ends: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    sigma: Optional[np.ndarray] = None

    @staticmethod
    def constant(f0: float) -> "WidthProfile":
        if not f0 > 0:
            raise ConfigError(f"width must be positive, got {f0}")
        return WidthProfile("constant", f0=float(f0))

    @staticmethod
    def piecewise(ends, values) -> "WidthProfile":
        ends = np.asarray(ends, dtype=float)
        values = np.asarray(values, dtype=float)
        if ends.ndim != 1 or ends.shape != values.shape or ends.size == 0:
            raise ConfigError("piecewise width needs matching 1-d ends and values")
        if np.any(np.diff(ends) <= 0) or ends[0] <= 0:
            raise ConfigError("piecewise segment ends must be positive and strictly increasing")
        if np.any(values <= 0):
            raise ConfigError("width must be positive in every segment")
        return WidthProfile("piecewise", ends=ends, values=values)

    @staticmethod
    def sampled(sigma, values) -> "WidthProfile":
        sigma = np.asarray(sigma, dtype=float)
        values = np.asarray(values, dtype=float)
        if sigma.ndim != 1 or sigma.shape != values.shape or sigma.size < 2:
            raise ConfigError("sampled width needs matching 1-d sigma and values, len >= 2")
        if np.any(np.diff(sigma) <= 0):
            raise ConfigError("sampled width sigma nodes must be strictly increasing")
        if np.any(values <= 0):
            raise ConfigError("width must be positive everywhere")
        return WidthProfile("sampled", sigma=sigma, values=values)

    @staticmethod
    def from_spec(text: str) -> "WidthProfile":
        """Parse the config surface form.

        `constant:<f0>` or `piecewise:<s1>:<f1>,<s2>:<f2>,...` where each
        (s_i, f_i) pair is a segment end and the width up to that end.
        """
        head, sep, rest = text.partition(":")
        if not sep:
            raise ConfigError(f"width spec needs a variant prefix, got {text!r}")
        if head == "constant":
            try:
                return WidthProfile.constant(float(rest))
            except ValueError as exc:
                raise ConfigError(f"bad constant width value {rest!r}") from exc
        if head == "piecewise":
            ends, values = [], []
            for pair in rest.split(","):
                bits = pair.split(":")
                if len(bits) != 2:
                    raise ConfigError(f"bad piecewise width pair {pair!r} (want <end>:<f>)")
                try:
                    ends.append(float(bits[0]))
                    values.append(float(bits[1]))
                except ValueError as exc:
                    raise ConfigError(f"bad piecewise width pair {pair!r}") from exc
            return WidthProfile.piecewise(ends, values)
        raise ConfigError(f"unknown width variant {head!r}")

    @property
    def is_flat(self) -> bool:
        """True when f_sigma is identically zero (constant or piecewise)."""
        return self.kind != "sampled"

    def value_at(self, sigma) -> np.ndarray:
        sigma = np.asarray(sigma, dtype=float)
        if self.kind == "constant":
            return np.full(sigma.shape, self.f0)
        if self.kind == "piecewise":
            idx = np.searchsorted(self.ends, sigma, side="left")
            return self.values[np.minimum(idx, len(self.values) - 1)]
        return np.interp(sigma, self.sigma, self.values)

    def derivative_at(self, sigma) -> np.ndarray:
        sigma = np.asarray(sigma, dtype=float)
        if self.is_flat:
            return np.zeros(sigma.shape)
        dfd = np.gradient(self.values, self.sigma, edge_order=2)
        return np.interp(sigma, self.sigma, dfd)

    def max_value(self) -> float:
        if self.kind == "constant":
            return self.f0
        return float(np.max(self.values))


@dataclass(frozen=True)
class PsiField1D:
    """Twist angle sampled on a uniform sigma grid over [0, K]."""

    values: np.ndarray
    dsigma: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.size < 2:
            raise GeometryError("psi field needs at least 2 samples")
        if not np.all(np.isfinite(v)):
            raise GeometryError("psi field must be finite")
        if not self.dsigma > 0:
            raise GeometryError("dsigma must be positive")

    @property
    def K(self) -> float:
        return (len(self.values) - 1) * self.dsigma

    def sigma(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.dsigma


@dataclass(frozen=True)
class Ribbon:
    """Full model state at one evolution parameter value."""

    shape: CurveShape
    psi: PsiField1D
    width: WidthProfile

    def __post_init__(self):
        K_shape = sigma_of_s(self.shape).K
        if abs(self.psi.K - K_shape) > 1e-9 * max(1.0, K_shape):
            raise GeometryError(
                f"psi grid covers [0, {self.psi.K:g}] but the shape's tangent "
                f"indicatrix has length {K_shape:g}"
            )


def nu_vector(frame: Frame, psi: float) -> np.ndarray:
    """Unit vector at angle psi in the (e2, e3) plane."""
    return np.cos(psi) * frame.e2 + np.sin(psi) * frame.e3


def neighboring_curve(curve: EmbeddedCurve, width: WidthProfile) -> np.ndarray:
    """Offset curve x + f e2, evaluated nodewise.

    For non-constant widths the curve must carry its sigma samples (an
    EmbeddedCurve from integrate_frenet always does).
    """
    if width.kind == "constant":
        f = np.full(curve.n, width.f0)
    else:
        if curve.sigma is None:
            raise GeometryError("curve carries no sigma samples; cannot place a varying width")
        f = width.value_at(curve.sigma)
    return curve.positions + f[:, None] * curve.e2


def _guard_psi(values: np.ndarray) -> None:
    dist = np.abs(values - np.pi * np.round(values / np.pi))
    if np.min(dist) < PSI_GUARD:
        raise SingularityError(
            f"psi within {PSI_GUARD:g} of a multiple of pi: cot/csc terms blow up "
            "for a varying width"
        )


def k_from_psi(psi: PsiField1D, width: WidthProfile) -> np.ndarray:
    """Geodesic curvature k = -psi_sigma + (f_sigma/f) cot(psi).

    With a flat width (constant or piecewise constant) the second term is
    identically zero and is not evaluated, so psi may pass through
    multiples of pi freely. Derivatives are central differences, one-sided
    second order at the ends.
    """
    psi_sigma = np.gradient(psi.values, psi.dsigma, edge_order=2)
    if width.is_flat:
        return -psi_sigma
    _guard_psi(psi.values)
    sig = psi.sigma()
    f = width.value_at(sig)
    fs = width.derivative_at(sig)
    return -psi_sigma + (fs / f) / np.tan(psi.values)


def v_from_psi(psi: PsiField1D, width: WidthProfile) -> np.ndarray:
    """Companion coefficient v = f_sigma csc(psi); identically 0 for flat widths."""
    if width.is_flat:
        return np.zeros(len(psi.values))
    _guard_psi(psi.values)
    sig = psi.sigma()
    fs = width.derivative_at(sig)
    return fs / np.sin(psi.values)


def psi_from_k(k: np.ndarray, dsigma: float, psi0: float, width: WidthProfile) -> PsiField1D:
    """Invert k = -psi_sigma for constant width: psi = psi0 - int_0^sigma k.

    The varying-width relation involves cot(psi) and is not inverted here.
    """
    if width.kind != "constant":
        raise GeometryError("psi_from_k is defined for constant width only")
    k = np.asarray(k, dtype=float)
    integral = np.concatenate([[0.0], np.cumsum(0.5 * (k[1:] + k[:-1]) * dsigma)])
    return PsiField1D(psi0 - integral, dsigma)
