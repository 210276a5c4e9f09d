"""Closed-form antikink: values, kinematics, fitting, piecewise matching."""

import numpy as np
import pytest

from ribbonfold import (
    AntikinkParams,
    CharacteristicGrid,
    PiecewiseAntikink,
    antikink_psi,
    antikink_residual,
    fit_antikink_to_constant,
    kink_center,
    kink_speed,
    match_piecewise,
)
from ribbonfold.errors import ConfigError

TWO_PI = 2.0 * np.pi


class TestAntikinkValues:
    def test_center_value_is_pi(self):
        # z = 0 at (sigma, u) = (0, 0) for b = 0: 4*arctan(1) = pi
        p = AntikinkParams(1.0, 1.0, 0.0)
        assert antikink_psi(p, 0.0, 0.0) == np.pi

    def test_frozen_reference_value(self):
        # psi(-2, 0) = 4*arctan(e^2) for (f, a, b) = (1, 1, 0)
        p = AntikinkParams(1.0, 1.0, 0.0)
        assert abs(antikink_psi(p, -2.0, 0.0) - 5.745113325681824) < 1e-14

    def test_asymptotes_saturate_exactly(self):
        p = AntikinkParams(1.0, 1.0, 0.0)
        assert antikink_psi(p, 1e6, 0.0) == 0.0
        assert antikink_psi(p, -1e6, 0.0) == TWO_PI

    def test_scalar_in_scalar_out(self):
        p = AntikinkParams(2.0, 0.5, 1.0)
        out = antikink_psi(p, 1.0, 2.0)
        assert isinstance(out, float)

    def test_broadcasting(self):
        p = AntikinkParams(1.0, 1.0, 0.0)
        sig = np.linspace(0, 4, 11)
        uu = np.linspace(0, 2, 7)
        out = antikink_psi(p, sig[:, None], uu[None, :])
        assert out.shape == (11, 7)
        for i in (0, 5, 10):
            for j in (0, 3, 6):
                assert out[i, j] == antikink_psi(p, sig[i], uu[j])

    def test_range_and_monotonicity_properties(self):
        rng = np.random.default_rng(3)
        sig = np.linspace(-5, 15, 301)
        for _ in range(10):
            p = AntikinkParams(
                rng.uniform(0.2, 4.0), rng.uniform(0.3, 3.0), rng.uniform(-2, 2)
            )
            vals = antikink_psi(p, sig, rng.uniform(0, 2))
            assert np.all(vals > 0.0) and np.all(vals < TWO_PI)
            assert np.all(np.diff(vals) < 0)  # strictly decreasing in sigma
            up = antikink_psi(p, 1.0, np.linspace(0, 3, 50))
            assert np.all(np.diff(up) > 0)  # increasing in u

    def test_param_validation(self):
        with pytest.raises(ConfigError):
            AntikinkParams(0.0, 1.0, 0.0)
        with pytest.raises(ConfigError):
            AntikinkParams(1.0, -1.0, 0.0)


class TestResidual:
    def test_small_and_second_order(self):
        p = AntikinkParams(1.0, 1.0, 0.0)
        r1 = antikink_residual(p, CharacteristicGrid(4.0, 4.0, 101, 101))
        r2 = antikink_residual(p, CharacteristicGrid(4.0, 4.0, 201, 201))
        assert r1 < 5e-3
        assert 3.5 < r1 / r2 < 4.5

    def test_other_parameters(self):
        for p in (AntikinkParams(4.0, 1.0, 0.0), AntikinkParams(1.0, 2.0, -1.0)):
            r = antikink_residual(p, CharacteristicGrid(4.0, 4.0, 201, 201))
            assert r < 5e-3

    def test_independent_cross_stencil_order(self):
        # node-centered mixed difference as a second, structurally different
        # discrete operator: it must also shrink at second order on the
        # closed form (no absolute bound; its constant is larger)
        p = AntikinkParams(4.0, 1.0, 0.0)

        def cross_residual(n):
            g = CharacteristicGrid(4.0, 4.0, n, n)
            v = antikink_psi(p, g.sigma_nodes()[:, None], g.u_nodes()[None, :])
            mixed = (v[2:, 2:] - v[2:, :-2] - v[:-2, 2:] + v[:-2, :-2]) / (
                4.0 * g.dsigma * g.du
            )
            return float(np.max(np.abs(mixed + p.f * np.sin(v[1:-1, 1:-1]))))

        r1, r2 = cross_residual(201), cross_residual(401)
        assert 3.5 < r1 / r2 < 4.5


class TestKinematics:
    def test_center_tracks_argument_zero(self):
        p = AntikinkParams(2.0, 1.5, 0.5)
        for u in (0.0, 0.7, 2.0):
            c = kink_center(p, u)
            assert c == p.a**2 * u + p.a * p.b
            assert abs(antikink_psi(p, c, u) - np.pi) < 1e-12

    def test_speed(self):
        assert kink_speed(AntikinkParams(1.0, 1.5, 0.0)) == 2.25
        assert kink_speed(AntikinkParams(3.0, 0.5, 1.0)) == 0.25


class TestFit:
    def test_pi_start_gives_zero_b(self):
        p = fit_antikink_to_constant(np.pi, 10.0, 0.01, 1.0)
        assert abs(p.b) < 1e-15
        assert p.f == 1.0

    def test_boundary_value_exact_at_zero(self):
        for psi0 in (0.5, np.pi, 5.0):
            p = fit_antikink_to_constant(psi0, 8.0, 0.05, 2.0)
            assert abs(antikink_psi(p, 0.0, 0.0) - psi0) < 1e-12

    def test_deviation_within_tolerance_on_dense_sample(self):
        psi0, K, tol = np.pi, 10.0, 0.01
        p = fit_antikink_to_constant(psi0, K, tol, 1.0)
        sig = np.linspace(0.0, K, 2001)
        assert np.max(np.abs(antikink_psi(p, sig, 0.0) - psi0)) <= tol

    def test_tighter_tolerance_needs_steeper_a(self):
        fits = [fit_antikink_to_constant(np.pi, 10.0, tol, 1.0) for tol in (0.1, 0.01)]
        assert fits[0].a < fits[1].a
        # deviation scales like 2K/a near psi0 = pi
        assert abs(fits[1].a - 10.0 * fits[0].a) / fits[1].a < 0.05

    def test_doubled_a_still_feasible(self):
        psi0, K, tol = 2.0, 6.0, 0.02
        p = fit_antikink_to_constant(psi0, K, tol, 1.0)
        dev = abs(psi0 - antikink_psi(AntikinkParams(p.f, 2 * p.a, p.b), K, 0.0))
        assert dev <= tol

    def test_validation(self):
        with pytest.raises(ConfigError):
            fit_antikink_to_constant(0.0, 10.0, 0.01, 1.0)
        with pytest.raises(ConfigError):
            fit_antikink_to_constant(TWO_PI, 10.0, 0.01, 1.0)
        with pytest.raises(ConfigError):
            fit_antikink_to_constant(np.pi, 10.0, -0.1, 1.0)


class TestMatching:
    def test_identity_when_width_unchanged(self):
        a2, b2 = match_piecewise(2.0, 1.3, -0.4, 5.0, 2.0)
        assert a2 == 1.3
        assert abs(b2 + 0.4) < 1e-15

    def test_reference_example(self):
        # f 1 -> 4 at sigma = 2 starting from (a, b) = (1, 0)
        a2, b2 = match_piecewise(1.0, 1.0, 0.0, 2.0, 4.0)
        assert a2 == 0.5
        assert abs(b2 - 3.0) < 1e-14

    def test_matched_argument_agrees_for_all_u(self):
        a2, b2 = match_piecewise(1.0, 1.0, 0.0, 2.0, 4.0)
        p1 = AntikinkParams(1.0, 1.0, 0.0)
        p2 = AntikinkParams(4.0, a2, b2)
        for u in (0.0, 0.5, 1.0):
            assert abs(antikink_psi(p1, 2.0, u) - antikink_psi(p2, 2.0, u)) < 1e-12

    def test_validation(self):
        with pytest.raises(ConfigError):
            match_piecewise(-1.0, 1.0, 0.0, 2.0, 4.0)


class TestPiecewiseAntikink:
    def test_from_matching_reference(self):
        pw = PiecewiseAntikink.from_matching(
            AntikinkParams(1.0, 1.0, 0.0), [(2.0, 4.0)], 6.0
        )
        assert len(pw.segments) == 2
        (s0, s1, p1), (t0, t1, p2) = pw.segments
        assert (s0, s1, t0, t1) == (0.0, 2.0, 2.0, 6.0)
        assert (p2.f, p2.a) == (4.0, 0.5)
        assert abs(p2.b - 3.0) < 1e-14
        assert pw.K == 6.0

    def test_three_segment_chain_continuity(self):
        pw = PiecewiseAntikink.from_matching(
            AntikinkParams(1.0, 1.0, 0.0), [(1.5, 2.0), (3.0, 0.5)], 5.0
        )
        assert len(pw.segments) == 3
        for u in (0.0, 0.5, 1.0):
            for brk in (1.5, 3.0):
                left = pw.psi(brk - 1e-12, u)
                right = pw.psi(brk + 1e-12, u)
                assert abs(left - right) < 1e-10

    def test_breakpoint_evaluates_left(self):
        pw = PiecewiseAntikink.from_matching(
            AntikinkParams(1.0, 1.0, 0.0), [(2.0, 4.0)], 6.0
        )
        left_params = pw.segments[0][2]
        assert pw.psi(2.0, 0.3) == antikink_psi(left_params, 2.0, 0.3)
        assert pw.params_at(2.0) is left_params

    def test_psi_broadcasts(self):
        pw = PiecewiseAntikink.from_matching(
            AntikinkParams(1.0, 1.0, 0.0), [(2.0, 4.0)], 6.0
        )
        sig = np.linspace(0, 6, 61)
        uu = np.linspace(0, 1, 5)
        out = pw.psi(sig[:, None], uu[None, :])
        assert out.shape == (61, 5)
        assert np.all(np.diff(out, axis=0) < 0)

    def test_tiling_validation(self):
        p = AntikinkParams(1.0, 1.0, 0.0)
        with pytest.raises(ConfigError, match="start at sigma = 0"):
            PiecewiseAntikink(((1.0, 2.0, p),))
        with pytest.raises(ConfigError, match="gaps"):
            PiecewiseAntikink(((0.0, 1.0, p), (1.5, 2.0, p)))
        with pytest.raises(ConfigError, match="positive extent"):
            PiecewiseAntikink(((0.0, 0.0, p),))

    def test_mismatched_params_rejected(self):
        p = AntikinkParams(1.0, 1.0, 0.0)
        q = AntikinkParams(4.0, 0.7, 3.0)  # not the matched continuation
        with pytest.raises(ConfigError, match="disagree"):
            PiecewiseAntikink(((0.0, 2.0, p), (2.0, 6.0, q)))

    def test_from_matching_break_placement_validated(self):
        p = AntikinkParams(1.0, 1.0, 0.0)
        with pytest.raises(ConfigError, match="breakpoint"):
            PiecewiseAntikink.from_matching(p, [(7.0, 2.0)], 6.0)
        with pytest.raises(ConfigError, match="breakpoint"):
            PiecewiseAntikink.from_matching(p, [(2.0, 2.0), (1.0, 3.0)], 6.0)
