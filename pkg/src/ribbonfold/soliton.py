"""Closed-form antikink solutions and their kinematics.

The antikink psi = 4 arctan(exp(sqrt(f) (a u - sigma/a + b))) solves
psi_sigma_u = -f sin(psi) for any a > 0, b. Its level set psi = pi (the
kink center) travels along sigma at speed a^2, carrying a localized bump
of geodesic curvature -psi_sigma = (2 sqrt(f)/a) sech(z). Piecewise
constant widths are handled by matching the antikink argument across each
breakpoint, which fixes the next segment's (a, b) from the previous one.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt, tan

import numpy as np

from .errors import ConfigError
from .evolution import CharacteristicGrid, sine_gordon_cell_residual

TWO_PI = 2.0 * np.pi

# Beyond this argument magnitude exp would overflow or underflow to the
# asymptote anyway; return the exact limit value instead.
_ARG_CUTOFF = 700.0


@dataclass(frozen=True)
class AntikinkParams:
    """Parameters (f, a, b) of one closed-form antikink."""

    f: float
    a: float
    b: float

    def __post_init__(self):
        if not self.f > 0:
            raise ConfigError(f"antikink needs f > 0, got {self.f}")
        if not self.a > 0:
            raise ConfigError(f"antikink needs a > 0, got {self.a}")

    def psi(self, sigma, u):
        return antikink_psi(self, sigma, u)


def antikink_psi(params: AntikinkParams, sigma, u):
    """Evaluate the antikink; broadcasts over sigma and u.

    Arguments beyond +-700 saturate to the exact asymptotes 2*pi and 0.
    """
    sigma = np.asarray(sigma, dtype=float)
    u = np.asarray(u, dtype=float)
    z = np.sqrt(params.f) * (params.a * u - sigma / params.a + params.b)
    out = 4.0 * np.arctan(np.exp(np.clip(z, -_ARG_CUTOFF, _ARG_CUTOFF)))
    out = np.where(z > _ARG_CUTOFF, TWO_PI, out)
    out = np.where(z < -_ARG_CUTOFF, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def antikink_residual(params: AntikinkParams, grid: CharacteristicGrid) -> float:
    """Discrete sine-Gordon residual of the closed form on a grid.

    Applies the solver's own second-order cell rule (mixed difference over
    each characteristic cell plus f sin of the cell average) to the
    analytic field; the result is pure truncation error, O(dsigma * du).
    """
    field = antikink_psi(params, grid.sigma_nodes()[:, None], grid.u_nodes()[None, :])
    return sine_gordon_cell_residual(field, grid.dsigma, grid.du, params.f)


def kink_center(params: AntikinkParams, u: float) -> float:
    """sigma where the antikink argument vanishes (psi = pi)."""
    return params.a ** 2 * u + params.a * params.b


def kink_speed(params: AntikinkParams) -> float:
    """d(sigma_center)/du = a^2, in (sigma, u) coordinates."""
    return params.a ** 2


def fit_antikink_to_constant(
    psi0: float, K: float, flatness_tol: float, f: float
) -> AntikinkParams:
    """Antikink that stays within flatness_tol of psi0 across [0, K] at u = 0.

    b comes from exact inversion at sigma = 0, so psi(0, 0) = psi0. The
    antikink is strictly decreasing in sigma, so the largest deviation on
    [0, K] sits at sigma = K; a is the smallest value keeping that deviation
    within flatness_tol, found by bracket doubling plus bisection (the
    feasible upper endpoint is returned).
    """
    if not 0.0 < psi0 < TWO_PI:
        raise ConfigError(f"psi0 must lie in (0, 2*pi), got {psi0}")
    if not flatness_tol > 0:
        raise ConfigError("flatness_tol must be positive")
    if not (f > 0 and K > 0):
        raise ConfigError("f and K must be positive")

    b = log(tan(psi0 / 4.0)) / sqrt(f)

    def deviation(a: float) -> float:
        return psi0 - antikink_psi(AntikinkParams(f, a, b), K, 0.0)

    a_hi = 1.0
    if deviation(a_hi) > flatness_tol:
        for _ in range(200):
            a_hi *= 2.0
            if deviation(a_hi) <= flatness_tol:
                break
        else:
            raise ConfigError("could not bracket a feasible steepness a")
        a_lo = a_hi / 2.0
    else:
        a_lo = a_hi / 2.0
        for _ in range(200):
            if deviation(a_lo) > flatness_tol:
                break
            a_hi = a_lo
            a_lo /= 2.0
        else:
            # every positive a satisfies the tolerance; keep the last probe
            return AntikinkParams(f, a_hi, b)

    for _ in range(80):
        mid = 0.5 * (a_lo + a_hi)
        if deviation(mid) <= flatness_tol:
            a_hi = mid
        else:
            a_lo = mid
    return AntikinkParams(f, a_hi, b)


def match_piecewise(
    f1: float, a1: float, b1: float, sigma1: float, f2: float
) -> tuple[float, float]:
    """Continue an antikink across a width step at sigma1.

    Solves sqrt(f1)(a1 u - sigma1/a1 + b1) = sqrt(f2)(a2 u - sigma1/a2 + b2)
    as an identity in u: the coefficient gives a2 = a1 sqrt(f1/f2), the
    constant then fixes b2.
    """
    if not (f1 > 0 and f2 > 0 and a1 > 0):
        raise ConfigError("match_piecewise needs positive f1, f2, a1")
    r = sqrt(f1 / f2)
    a2 = a1 * r
    b2 = r * (b1 - sigma1 / a1) + sigma1 / a2
    return a2, b2


@dataclass(frozen=True)
class PiecewiseAntikink:
    """Antikink continued across piecewise-constant width segments.

    segments is an ordered list of (sigma_start, sigma_end, AntikinkParams)
    tiling [0, K]. Breakpoint nodes evaluate with the left segment's
    parameters, matching the width convention.
    """

    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ConfigError("piecewise antikink needs at least one segment")
        if segs[0][0] != 0.0:
            raise ConfigError("first segment must start at sigma = 0")
        for (s0, s1, _) in segs:
            if not s1 > s0:
                raise ConfigError("segments must have positive extent")
        for (_, s1, p), (t0, _, q) in zip(segs[:-1], segs[1:]):
            if t0 != s1:
                raise ConfigError("segments must tile the interval without gaps")
            # the two antikink arguments must agree at the breakpoint for
            # every u: compare the affine coefficient and constant separately
            coef_l = sqrt(p.f) * p.a
            coef_r = sqrt(q.f) * q.a
            const_l = sqrt(p.f) * (p.b - s1 / p.a)
            const_r = sqrt(q.f) * (q.b - s1 / q.a)
            if abs(coef_l - coef_r) > 1e-12 or abs(const_l - const_r) > 1e-12:
                raise ConfigError(
                    f"antikink arguments disagree at breakpoint sigma = {s1:g}"
                )

    @staticmethod
    def from_matching(first: AntikinkParams, breaks, K: float) -> "PiecewiseAntikink":
        """Build matched segments from the first segment's parameters.

        breaks is a sequence of (sigma_end, f_next): the running segment
        ends at sigma_end and the next one takes width f_next with (a, b)
        fixed by the matching identity. The final segment extends to K.
        """
        segs = []
        cur = first
        start = 0.0
        for sigma_end, f_next in breaks:
            if not start < sigma_end < K:
                raise ConfigError(
                    f"breakpoint {sigma_end:g} must lie inside (previous end, K)"
                )
            segs.append((start, float(sigma_end), cur))
            a2, b2 = match_piecewise(cur.f, cur.a, cur.b, float(sigma_end), float(f_next))
            cur = AntikinkParams(float(f_next), a2, b2)
            start = float(sigma_end)
        segs.append((start, float(K), cur))
        return PiecewiseAntikink(tuple(segs))

    @property
    def K(self) -> float:
        return self.segments[-1][1]

    def params_at(self, sigma: float) -> AntikinkParams:
        for (s0, s1, p) in self.segments:
            if sigma <= s1:
                return p
        return self.segments[-1][2]

    def psi(self, sigma, u):
        sigma_b, u_b = np.broadcast_arrays(np.asarray(sigma, float), np.asarray(u, float))
        out = np.empty(sigma_b.shape)
        breaks = np.array([s1 for (_, s1, _) in self.segments[:-1]])
        idx = np.searchsorted(breaks, sigma_b, side="left")
        for m, (_, _, p) in enumerate(self.segments):
            mask = idx == m
            if np.any(mask):
                out[mask] = antikink_psi(p, sigma_b[mask], u_b[mask])
        if out.ndim == 0:
            return float(out)
        return out
