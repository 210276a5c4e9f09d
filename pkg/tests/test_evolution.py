"""Characteristic solves, frame evolution, trajectories, time maps."""

import numpy as np
import pytest

from ribbonfold import (
    AntikinkParams,
    ArcGrid,
    BoundaryData,
    CharacteristicGrid,
    CurveShape,
    PsiField1D,
    PsiField2D,
    Ribbon,
    TimeMap,
    WidthProfile,
    discrete_residual,
    evolve_frames_direct,
    integrate_frenet,
    k_from_psi,
    run_until_contact,
    shape_trajectory,
    sine_gordon_cell_residual,
    solve_general_pde,
    solve_sine_gordon,
    time_reparameterize,
)
from ribbonfold.errors import (
    ConfigError,
    ContractionBoundError,
    GeometryError,
    SingularityError,
)
from ribbonfold.soliton import antikink_psi


def antikink_boundary(p, grid):
    return BoundaryData(
        antikink_psi(p, grid.sigma_nodes(), 0.0), antikink_psi(p, 0.0, grid.u_nodes())
    )


def arc_shape(n=101, ds=0.05, kappa=1.0):
    return CurveShape(ArcGrid(n, ds), np.full(n, kappa), np.zeros(n))


class TestGrid:
    def test_spacing(self):
        g = CharacteristicGrid(5.0, 2.0, 101, 41)
        assert abs(g.dsigma - 0.05) < 1e-15
        assert abs(g.du - 0.05) < 1e-15
        assert len(g.sigma_nodes()) == 101
        assert len(g.u_nodes()) == 41

    def test_contraction_bound(self):
        g = CharacteristicGrid(5.0, 2.0, 3, 3)  # dsigma * du = 2.5
        with pytest.raises(ContractionBoundError, match="contraction"):
            g.validate_contraction(1.0)
        g.validate_contraction(0.1)  # 0.25 <= 0.5 passes

    def test_validation(self):
        with pytest.raises(ConfigError):
            CharacteristicGrid(0.0, 2.0, 10, 10)
        with pytest.raises(ConfigError):
            CharacteristicGrid(5.0, 2.0, 1, 10)


class TestBoundaryData:
    def test_corner_repair_small_gap(self):
        bd = BoundaryData(np.array([1.0 + 1e-10, 2.0]), np.array([1.0, 3.0]))
        assert bd.psi_bottom[0] == bd.psi_left[0]

    def test_corner_mismatch_rejected(self):
        with pytest.raises(ConfigError, match="corner"):
            BoundaryData(np.array([1.0, 2.0]), np.array([1.001, 3.0]))

    def test_non_finite_rejected(self):
        with pytest.raises(ConfigError, match="finite"):
            BoundaryData(np.array([np.nan, 2.0]), np.array([np.nan, 3.0]))


class TestSineGordonSolver:
    def test_zero_boundary_stays_zero(self):
        g = CharacteristicGrid(4.0, 4.0, 51, 51)
        f = solve_sine_gordon(g, 1.0, BoundaryData(np.zeros(51), np.zeros(51)))
        assert np.array_equal(f.values, np.zeros((51, 51)))

    def test_pi_is_a_fixed_point(self):
        g = CharacteristicGrid(4.0, 4.0, 51, 51)
        f = solve_sine_gordon(
            g, 1.0, BoundaryData(np.full(51, np.pi), np.full(51, np.pi))
        )
        assert np.max(np.abs(f.values - np.pi)) < 1e-9

    def test_matches_antikink(self):
        p = AntikinkParams(1.0, 1.0, 0.0)
        g = CharacteristicGrid(4.0, 4.0, 101, 101)
        f = solve_sine_gordon(g, p.f, antikink_boundary(p, g))
        exact = antikink_psi(p, g.sigma_nodes()[:, None], g.u_nodes()[None, :])
        assert np.max(np.abs(f.values - exact)) < 1e-3

    def test_boundary_reproduced_bitwise(self):
        p = AntikinkParams(1.0, 1.0, 0.0)
        g = CharacteristicGrid(4.0, 4.0, 51, 41)
        bd = antikink_boundary(p, g)
        f = solve_sine_gordon(g, p.f, bd)
        assert np.array_equal(f.values[:, 0], bd.psi_bottom)
        assert np.array_equal(f.values[0, :], bd.psi_left)

    def test_deterministic(self):
        p = AntikinkParams(1.0, 1.0, 0.0)
        g = CharacteristicGrid(4.0, 4.0, 81, 81)
        a = solve_sine_gordon(g, p.f, antikink_boundary(p, g))
        b = solve_sine_gordon(g, p.f, antikink_boundary(p, g))
        assert np.array_equal(a.values, b.values)

    def test_solved_field_satisfies_own_operator(self):
        p = AntikinkParams(1.0, 1.0, 0.0)
        g = CharacteristicGrid(4.0, 4.0, 81, 81)
        f = solve_sine_gordon(g, p.f, antikink_boundary(p, g))
        r = sine_gordon_cell_residual(f.values, g.dsigma, g.du, p.f)
        assert r < 1e-8

    def test_contraction_violation_raises(self):
        g = CharacteristicGrid(10.0, 10.0, 5, 5)  # dsigma * du = 6.25
        with pytest.raises(ContractionBoundError):
            solve_sine_gordon(g, 1.0, BoundaryData(np.zeros(5), np.zeros(5)))

    def test_boundary_size_mismatch_raises(self):
        g = CharacteristicGrid(4.0, 4.0, 51, 41)
        with pytest.raises(ConfigError, match="do not match the grid"):
            solve_sine_gordon(g, 1.0, BoundaryData(np.zeros(50), np.zeros(41)))


class TestGeneralPde:
    def test_constant_width_reduction_bitwise(self):
        p = AntikinkParams(1.3, 1.0, 0.0)
        g = CharacteristicGrid(6.0, 6.0, 101, 101)
        bd = antikink_boundary(p, g)
        a = solve_sine_gordon(g, 1.3, bd)
        b = solve_general_pde(g, WidthProfile.constant(1.3), bd)
        assert np.array_equal(a.values, b.values)

    def test_piecewise_left_subdomain_matches_pure_solve(self):
        # cells left of a node-aligned breakpoint only see f1, so the field
        # there must match the plain constant-width solve on that subdomain
        p = AntikinkParams(1.0, 1.0, 0.0)
        g_full = CharacteristicGrid(6.0, 2.0, 121, 41)  # break 2.0 = node 40
        w = WidthProfile.piecewise([2.0, 6.0], [1.0, 4.0])
        full = solve_general_pde(g_full, w, antikink_boundary(p, g_full))
        g_sub = CharacteristicGrid(2.0, 2.0, 41, 41)
        sub = solve_sine_gordon(g_sub, 1.0, antikink_boundary(p, g_sub))
        assert np.max(np.abs(full.values[:41] - sub.values)) < 1e-10

    def test_piecewise_differs_from_constant_on_right(self):
        p = AntikinkParams(1.0, 1.0, 0.0)
        g = CharacteristicGrid(6.0, 2.0, 121, 41)
        bd = antikink_boundary(p, g)
        w = WidthProfile.piecewise([2.0, 6.0], [1.0, 4.0])
        pw_field = solve_general_pde(g, w, bd)
        const_field = solve_general_pde(g, WidthProfile.constant(1.0), bd)
        right = slice(41, None)
        assert np.max(np.abs(pw_field.values[right, 1:] - const_field.values[right, 1:])) > 1e-3

    def test_sampled_width_solves_and_satisfies_operator(self):
        # keep U modest: the width gradient drives psi toward 0, and past
        # u ~ 1 the csc terms stall the cell iteration (by design)
        g = CharacteristicGrid(4.0, 0.5, 81, 21)
        sig = g.sigma_nodes()
        w = WidthProfile.sampled(sig, 1.0 + 0.1 * sig)
        psi0 = np.pi / 2
        bd = BoundaryData(np.full(81, psi0), np.full(21, psi0))
        field = solve_general_pde(g, w, bd)
        assert discrete_residual(field, w) < 1e-8
        # the width gradient forces the field away from the constant state
        assert np.max(np.abs(field.values - psi0)) > 1e-2

    def test_sampled_width_guards_pi(self):
        g = CharacteristicGrid(4.0, 2.0, 81, 41)
        sig = g.sigma_nodes()
        w = WidthProfile.sampled(sig, 1.0 + 0.1 * sig)
        bd = BoundaryData(np.full(81, np.pi), np.full(41, np.pi))
        with pytest.raises(SingularityError):
            solve_general_pde(g, w, bd)

    def test_deterministic(self):
        g = CharacteristicGrid(4.0, 0.5, 81, 21)
        sig = g.sigma_nodes()
        w = WidthProfile.sampled(sig, 1.0 + 0.1 * sig)
        bd = BoundaryData(np.full(81, np.pi / 2), np.full(21, np.pi / 2))
        a = solve_general_pde(g, w, bd)
        b = solve_general_pde(g, w, bd)
        assert np.array_equal(a.values, b.values)


class TestFrameEvolution:
    def consistent_setup(self, n=101, n_u=81):
        ds = 5.0 / (n - 1)
        grid = CharacteristicGrid(5.0, 2.0, n, n_u)
        width = WidthProfile.constant(1.0)
        p = AntikinkParams(1.0, 1.0, 0.0)
        field = solve_sine_gordon(grid, p.f, antikink_boundary(p, grid))
        psi0 = PsiField1D(field.values[:, 0], grid.dsigma)
        kappa = np.ones(n)
        tau0 = k_from_psi(psi0, width) * kappa
        shape = CurveShape(ArcGrid(n, ds), kappa, tau0)
        return Ribbon(shape, psi0, width), grid, field

    def relative_frame_gap(self, ribbon, grid, field):
        ff = evolve_frames_direct(ribbon, grid, field)
        traj = shape_trajectory(ribbon.shape, field, ribbon.width)
        J = grid.n_u - 1
        cv = traj.curves[J]
        R0 = np.column_stack([ff.e1[0, J], ff.e2[0, J], ff.e3[0, J]])
        worst = 0.0
        for i in range(0, grid.n_sigma, max(1, grid.n_sigma // 20)):
            Rd = np.column_stack([ff.e1[i, J], ff.e2[i, J], ff.e3[i, J]])
            Rs = np.column_stack([cv.e1[i], cv.e2[i], cv.e3[i]])
            worst = max(worst, float(np.max(np.abs(R0.T @ Rd - Rs))))
        return worst

    def test_agrees_with_slice_frenet_frames(self):
        # direct u evolution vs the psi -> k -> tau -> frame chain: the two
        # independent paths agree up to truncation
        ribbon, grid, field = self.consistent_setup(201, 161)
        assert self.relative_frame_gap(ribbon, grid, field) < 5e-4

    def test_cross_check_refines_at_second_order(self):
        gaps = [
            self.relative_frame_gap(*self.consistent_setup(n, n_u))
            for n, n_u in ((101, 81), (201, 161))
        ]
        assert 3.0 < gaps[0] / gaps[1] < 5.0

    def test_tiny_width_barely_rotates_frames(self):
        n = 101
        f0 = 1e-6
        grid = CharacteristicGrid(5.0, 2.0, n, 41)
        width = WidthProfile.constant(f0)
        sig = grid.sigma_nodes()
        bottom = np.pi / 2 + 0.4 * np.sin(sig)
        left = np.full(41, bottom[0])
        field = solve_general_pde(grid, width, BoundaryData(bottom, left))
        psi0 = PsiField1D(field.values[:, 0], grid.dsigma)
        kappa = np.ones(n)
        tau0 = k_from_psi(psi0, width) * kappa
        shape = CurveShape(ArcGrid(n, 0.05), kappa, tau0)
        ff = evolve_frames_direct(Ribbon(shape, psi0, width), grid, field)
        move = np.linalg.norm(ff.e1[:, -1] - ff.e1[:, 0], axis=1)
        assert np.max(move) < 4 * f0 * grid.U

    def test_inconsistent_ribbon_rejected(self):
        ribbon, grid, field = self.consistent_setup()
        bad_shape = arc_shape()  # tau = 0 contradicts the antikink twist
        bad = Ribbon(bad_shape, ribbon.psi, ribbon.width)
        with pytest.raises(GeometryError, match="inconsistent"):
            evolve_frames_direct(bad, grid, field)

    def test_misaligned_sigma_grid_rejected(self):
        ribbon, grid, field = self.consistent_setup()
        wrong = CharacteristicGrid(5.0, 2.0, 51, grid.n_u)
        sub = PsiField2D(field.values[::2].copy(), wrong)
        with pytest.raises(GeometryError, match="coincide"):
            evolve_frames_direct(ribbon, wrong, sub)

    def test_mismatched_psi_row_rejected(self):
        ribbon, grid, field = self.consistent_setup()
        shifted = PsiField2D(field.values + 0.1, grid)
        with pytest.raises(GeometryError, match="u=0 row"):
            evolve_frames_direct(ribbon, grid, shifted)


class TestShapeTrajectory:
    def test_u_independent_field_gives_identical_slices(self):
        shape = arc_shape()
        grid = CharacteristicGrid(5.0, 2.0, 101, 11)
        width = WidthProfile.constant(1.0)
        column = np.pi / 2 + 0.3 * np.sin(grid.sigma_nodes())
        field = PsiField2D(np.tile(column[:, None], (1, 11)), grid)
        traj = shape_trajectory(shape, field, width)
        for k in range(1, traj.n_slices):
            assert np.array_equal(traj.taus[k], traj.taus[0])
            assert np.array_equal(
                traj.curves[k].positions, traj.curves[0].positions
            )

    def test_kappa_shared_and_ds_fixed(self):
        shape = arc_shape()
        grid = CharacteristicGrid(5.0, 2.0, 101, 11)
        p = AntikinkParams(1.0, 1.0, 0.0)
        field = solve_sine_gordon(grid, p.f, antikink_boundary(p, grid))
        traj = shape_trajectory(shape, field, WidthProfile.constant(1.0))
        for k in range(traj.n_slices):
            sl = traj.shape_at(k)
            assert sl.kappa is shape.kappa
            assert sl.grid.ds == shape.grid.ds

    def test_torsion_bump_amplitude_and_center(self):
        # tau = -psi_sigma * kappa = (2 sqrt(f)/a) sech(z) for kappa = 1:
        # peak 2*sqrt(f)/a at sigma = a^2 u + a b
        f0, a0 = 1.0, 1.5
        p = AntikinkParams(f0, a0, 2.0 / a0)  # center starts at sigma = 2
        n = 401
        shape = CurveShape(ArcGrid(n, 10.0 / (n - 1)), np.ones(n), np.zeros(n))
        grid = CharacteristicGrid(10.0, 1.0, n, 41)
        sig = grid.sigma_nodes()
        field = PsiField2D(
            antikink_psi(p, sig[:, None], grid.u_nodes()[None, :]), grid
        )
        traj = shape_trajectory(shape, field, WidthProfile.constant(f0))
        for j in (0, 20, 40):
            u = grid.u_nodes()[j]
            tau = traj.taus[j]
            peak = np.argmax(np.abs(tau))
            expected_center = a0**2 * u + a0 * p.b
            assert abs(sig[peak] - expected_center) <= 2 * grid.dsigma
            assert abs(np.max(np.abs(tau)) - 2 * np.sqrt(f0) / a0) < 2e-3

    def test_span_mismatch_rejected(self):
        shape = arc_shape(n=81)  # K = 4
        grid = CharacteristicGrid(5.0, 2.0, 101, 11)
        field = PsiField2D(np.full((101, 11), np.pi / 2), grid)
        with pytest.raises(GeometryError, match="indicatrix"):
            shape_trajectory(shape, field, WidthProfile.constant(1.0))


class TestRunUntilContact:
    def overlapping_circle(self):
        # length 7 > 2*pi: the flat slice overlaps itself near sigma ~ 2*pi
        n = 141
        return CurveShape(ArcGrid(n, 0.05), np.ones(n), np.zeros(n))

    def test_no_threshold_returns_full_trajectory(self):
        shape = arc_shape()
        grid = CharacteristicGrid(5.0, 2.0, 101, 41)
        traj, event = run_until_contact(
            shape, WidthProfile.constant(1.0), AntikinkParams(1, 1, 0), grid
        )
        assert event is None
        assert traj.n_slices == 41

    def test_flat_state_contacts_at_first_slice(self):
        shape = self.overlapping_circle()
        grid = CharacteristicGrid(7.0, 2.0, 141, 41)
        bd = BoundaryData(np.full(141, np.pi), np.full(41, np.pi))
        traj, event = run_until_contact(
            shape, WidthProfile.constant(1.0), bd, grid, threshold=0.05, exclusion=10
        )
        assert event is not None
        assert event.slice_index == 0
        assert event.u == 0.0
        assert traj.n_slices == 1
        assert (event.contact.i, event.contact.j) == (0, 125)

    def test_antikink_twist_prevents_contact(self):
        # the kink's torsion lifts the overlap out of plane immediately
        shape = self.overlapping_circle()
        grid = CharacteristicGrid(7.0, 2.0, 141, 41)
        p = AntikinkParams(1.0, 1.0, 0.0)
        traj, event = run_until_contact(
            shape, WidthProfile.constant(1.0), p, grid, threshold=0.05, exclusion=10
        )
        assert event is None
        assert traj.n_slices == 41

    def test_analytic_source_duck_typing(self):
        shape = arc_shape()
        grid = CharacteristicGrid(5.0, 1.0, 101, 11)
        pw = None
        p = AntikinkParams(1.0, 1.0, 0.0)
        traj_a, _ = run_until_contact(shape, WidthProfile.constant(1.0), p, grid)
        field = PsiField2D(
            antikink_psi(p, grid.sigma_nodes()[:, None], grid.u_nodes()[None, :]), grid
        )
        traj_b, _ = run_until_contact(shape, WidthProfile.constant(1.0), field, grid)
        assert np.array_equal(traj_a.taus, traj_b.taus)
        with pytest.raises(ConfigError, match="source"):
            run_until_contact(shape, WidthProfile.constant(1.0), pw, grid)

    def test_deterministic_event(self):
        shape = self.overlapping_circle()
        grid = CharacteristicGrid(7.0, 2.0, 141, 41)
        bd = BoundaryData(np.full(141, np.pi), np.full(41, np.pi))
        args = (shape, WidthProfile.constant(1.0), bd, grid)
        _, e1 = run_until_contact(*args, threshold=0.05, exclusion=10)
        _, e2 = run_until_contact(*args, threshold=0.05, exclusion=10)
        assert (e1.slice_index, e1.contact) == (e2.slice_index, e2.contact)


class TestTimeMap:
    def test_constant_gamma_is_identity_scaling(self):
        tm = TimeMap.constant(1.0, 2.0, 21)
        assert np.max(np.abs(tm.g - tm.t)) < 1e-15
        assert tm.g_of(1.3) == pytest.approx(1.3, abs=1e-15)

    def test_linear_gamma_integrates_exactly(self):
        # gamma = 2t: trapezoid is exact, g(t) = t^2 at every node
        tm = TimeMap.linear(2.0, 1.5, 4)
        assert np.max(np.abs(tm.g - tm.t**2)) < 1e-15

    def test_gamma_validation(self):
        with pytest.raises(ConfigError, match="nonnegative"):
            TimeMap(np.array([0.0, 1.0]), np.array([-1.0, 1.0]))
        with pytest.raises(ConfigError, match="strictly increasing"):
            TimeMap(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.0, 1.0]))
        with pytest.raises(ConfigError, match="start at 0"):
            TimeMap(np.array([0.5, 1.0]), np.array([1.0, 1.0]))

    def test_query_range_checked(self):
        tm = TimeMap.constant(1.0, 2.0, 21)
        with pytest.raises(ConfigError, match="outside"):
            tm.g_of(2.5)


class TestTimeReparameterize:
    def base_trajectory(self, n_u=21):
        shape = arc_shape()
        grid = CharacteristicGrid(5.0, 2.0, 101, n_u)
        p = AntikinkParams(1.0, 1.0, 0.0)
        field = solve_sine_gordon(grid, p.f, antikink_boundary(p, grid))
        return shape_trajectory(shape, field, WidthProfile.constant(1.0))

    def test_identity_map_reproduces_slices_bitwise(self):
        # 17 nodes over [0, 2] make every step exactly 0.125, so the
        # trapezoid sums land on the u nodes bitwise and every
        # interpolation weight is exactly 0 or 1
        traj = self.base_trajectory(n_u=17)
        tm = TimeMap.constant(1.0, 2.0, 17)
        traj_t = time_reparameterize(traj, tm)
        assert np.array_equal(traj_t.taus, traj.taus)
        for k in (0, 8, 16):
            assert np.array_equal(
                traj_t.curves[k].positions, traj.curves[k].positions
            )
        assert np.array_equal(traj_t.t_values, tm.t)

    def test_kappa_still_shared(self):
        traj = self.base_trajectory()
        traj_t = time_reparameterize(traj, TimeMap.linear(2.0, 1.0, 5))
        assert traj_t.kappa is traj.kappa

    def test_map_beyond_range_rejected(self):
        traj = self.base_trajectory()
        with pytest.raises(ConfigError, match="shrink t_end"):
            time_reparameterize(traj, TimeMap.constant(1.0, 3.0, 7))  # g up to 3 > U=2

    def test_requires_psi(self):
        traj = self.base_trajectory()
        bare = type(traj)(
            grid=traj.grid,
            kappa=traj.kappa,
            u_values=traj.u_values,
            taus=traj.taus,
            curves=traj.curves,
            width=traj.width,
            psi=None,
        )
        with pytest.raises(ConfigError, match="psi"):
            time_reparameterize(bare, TimeMap.constant(1.0, 2.0, 5))
