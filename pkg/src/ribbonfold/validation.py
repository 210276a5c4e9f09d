"""Built-in acceptance checks.

Each check is a self-contained numerical experiment with an analytic or
structural oracle and a fixed tolerance. `ribbonfold validate` runs all of
them and reports one line per criterion; the test suite calls the same
functions, so the CLI report and the tests can never disagree.

The `perturb` flag on the convergence check is a negative control: it
biases the measured field by an O(dsigma) term, which must break both the
error threshold and the observed order. It exists to prove the check can
fail; production solvers have no such hook.
"""

from __future__ import annotations

import os
import tempfile
import time
from dataclasses import dataclass
from math import log2, pi
from typing import Callable, List, Optional

import numpy as np

from .config import parse_config
from .curve import ArcGrid, CurveShape, estimate_shape, integrate_frenet
from .evolution import (
    BoundaryData,
    CharacteristicGrid,
    PsiField2D,
    ShapeTrajectory,
    TimeMap,
    _check_span,
    _tau_slice,
    shape_trajectory,
    solve_general_pde,
    solve_sine_gordon,
    time_reparameterize,
)
from .pipeline import cmd_simulate
from .ribbon import PsiField1D, WidthProfile, k_from_psi
from .soliton import AntikinkParams, antikink_psi, antikink_residual, fit_antikink_to_constant, match_piecewise
from .fileio import fmt


@dataclass
class CheckResult:
    index: int
    name: str
    passed: bool
    measured: str
    threshold: str
    runtime: float
    detail: str = ""


def _antikink_boundary(params: AntikinkParams, grid: CharacteristicGrid) -> BoundaryData:
    return BoundaryData(
        antikink_psi(params, grid.sigma_nodes(), 0.0),
        antikink_psi(params, 0.0, grid.u_nodes()),
    )


def check_antikink_exactness() -> CheckResult:
    """1: closed form satisfies the discrete residual, order 2 under halving."""
    t0 = time.perf_counter()
    param_sets = [AntikinkParams(1, 1, 0), AntikinkParams(4, 1, 0), AntikinkParams(1, 2, -1)]
    worst = 0.0
    ratios = []
    for p in param_sets:
        r1 = antikink_residual(p, CharacteristicGrid(4.0, 4.0, 401, 401))
        r2 = antikink_residual(p, CharacteristicGrid(4.0, 4.0, 801, 801))
        worst = max(worst, r1)
        ratios.append(r1 / r2)
    rt = time.perf_counter() - t0
    ok = worst <= 1e-3 and all(3.5 <= r <= 4.5 for r in ratios) and rt < 5.0
    return CheckResult(
        1,
        "antikink-exactness",
        ok,
        f"max_residual={worst:.3e} ratios={[f'{r:.2f}' for r in ratios]}",
        "residual<=1e-3 at d=0.01, halving ratio in [3.5,4.5], runtime<5s",
        rt,
    )


def check_solver_convergence(perturb: bool = False) -> CheckResult:
    """2: numeric solve matches the closed form at order ~2."""
    t0 = time.perf_counter()
    p = AntikinkParams(1, 1, 0)
    errs = []
    for n in (101, 201, 401):
        grid = CharacteristicGrid(10.0, 10.0, n, n)
        field = solve_sine_gordon(grid, p.f, _antikink_boundary(p, grid))
        exact = antikink_psi(p, grid.sigma_nodes()[:, None], grid.u_nodes()[None, :])
        values = field.values
        if perturb:
            values = values + 0.2 * grid.dsigma
        errs.append(float(np.max(np.abs(values - exact))))
    orders = [log2(errs[0] / errs[1]), log2(errs[1] / errs[2])]
    rt = time.perf_counter() - t0
    ok = errs[-1] <= 1e-3 and all(1.7 <= o <= 2.3 for o in orders) and rt < 30.0
    return CheckResult(
        2,
        "solver-convergence",
        ok,
        f"err@401={errs[-1]:.3e} orders={[f'{o:.2f}' for o in orders]}",
        "err<=1e-3 at 401x401, orders in [1.7,2.3], runtime<30s",
        rt,
        detail=f"errors={[f'{e:.3e}' for e in errs]}",
    )


def check_constant_width_reduction() -> CheckResult:
    """3: general solver equals the sine-Gordon solver for constant width."""
    t0 = time.perf_counter()
    p = AntikinkParams(1.3, 1.0, 0.0)
    grid = CharacteristicGrid(6.0, 6.0, 151, 151)
    boundary = _antikink_boundary(p, grid)
    a = solve_sine_gordon(grid, 1.3, boundary)
    b = solve_general_pde(grid, WidthProfile.constant(1.3), boundary)
    diff = float(np.max(np.abs(a.values - b.values)))
    rt = time.perf_counter() - t0
    return CheckResult(
        3,
        "constant-width-reduction",
        diff <= 1e-12,
        f"max_nodewise_diff={diff:.3e}",
        "<=1e-12",
        rt,
    )


def check_frenet_round_trips() -> CheckResult:
    """4: circle and helix reconstruct and re-estimate kappa, tau."""
    t0 = time.perf_counter()
    ds = 1e-3
    n = int(round(2 * pi / ds)) + 1
    worst_err = 0.0
    worst_drift = 0.0
    for tau0 in (0.0, 1.0):
        shape = CurveShape(ArcGrid(n, ds), np.ones(n), np.full(n, tau0))
        curve = integrate_frenet(shape)
        est = estimate_shape(curve)
        worst_err = max(
            worst_err,
            float(np.max(np.abs(est.kappa[2:-2] - 1.0))),
            float(np.max(np.abs(est.tau[2:-2] - tau0))),
        )
        R = np.stack([curve.e1, curve.e2, curve.e3], axis=2)
        gram = np.einsum("nij,nik->njk", R, R)
        worst_drift = max(worst_drift, float(np.max(np.abs(gram - np.eye(3)))))
    rt = time.perf_counter() - t0
    ok = worst_err <= 1e-3 and worst_drift <= 1e-9
    return CheckResult(
        4,
        "frenet-round-trips",
        ok,
        f"max_shape_err={worst_err:.3e} max_ortho_drift={worst_drift:.3e}",
        "shape err<=1e-3 at ds=1e-3, orthonormality drift<=1e-9",
        rt,
    )


def _standard_run():
    """Shared small run: kappa=1 arc, numeric antikink field."""
    n = 101
    shape = CurveShape(ArcGrid(n, 0.05), np.ones(n), np.zeros(n))
    grid = CharacteristicGrid(5.0, 2.0, n, 41)
    width = WidthProfile.constant(1.0)
    p = AntikinkParams(1, 1, 0)
    field = solve_sine_gordon(grid, p.f, _antikink_boundary(p, grid))
    return shape, grid, width, field


def check_kappa_ds_invariance() -> CheckResult:
    """5: every trajectory slice carries bitwise-identical kappa and ds."""
    t0 = time.perf_counter()
    shape, grid, width, field = _standard_run()
    traj = shape_trajectory(shape, field, width)
    tmap = TimeMap.linear(2.0, 1.0, 21)
    traj_t = time_reparameterize(traj, tmap)
    ref = shape.kappa.tobytes()
    ok = True
    count = 0
    for tr in (traj, traj_t):
        for k in range(tr.n_slices):
            sl = tr.shape_at(k)
            ok = ok and sl.kappa.tobytes() == ref and sl.grid.ds == shape.grid.ds
            count += 1
    rt = time.perf_counter() - t0
    return CheckResult(
        5,
        "kappa-ds-invariance",
        ok,
        f"slices_checked={count} all_bitwise_identical={ok}",
        "kappa and ds bitwise identical in every slice",
        rt,
    )


def check_reparameterization_invariance() -> CheckResult:
    """6: slices at t under gamma(t)=2t match direct slices at u = t^2."""
    t0 = time.perf_counter()
    n = 301
    ds = 0.01
    shape = CurveShape(ArcGrid(n, ds), np.ones(n), np.zeros(n))  # K = 3
    grid = CharacteristicGrid(3.0, 3.0, 301, 401)
    width = WidthProfile.constant(1.0)
    p = AntikinkParams(1, 1, 0)
    sig = grid.sigma_nodes()
    field_vals = antikink_psi(p, sig[:, None], grid.u_nodes()[None, :])
    field = PsiField2D(field_vals, grid)
    sg_sigma = _check_span(shape, grid)
    tau0 = _tau_slice(shape, sg_sigma, field.slice_at(0), width)
    curve0 = integrate_frenet(CurveShape(shape.grid, shape.kappa, tau0))
    seed = ShapeTrajectory(
        grid=shape.grid,
        kappa=shape.kappa,
        u_values=grid.u_nodes()[:1].copy(),
        taus=tau0[None, :],
        curves=[curve0],
        width=width,
        psi=field,
    )
    # t nodes {0, 0.5, 1.0, 1.5}; the trapezoid of a linear gamma is exact,
    # so g(t) = t^2 holds exactly at the nodes
    tmap = TimeMap.linear(2.0, 1.5, 4)
    traj_t = time_reparameterize(seed, tmap)

    worst = 0.0
    for t_val in (0.5, 1.0, 1.5):
        idx = int(round(t_val / 0.5))
        u_star = t_val * t_val
        psi_exact = PsiField1D(antikink_psi(p, sig, u_star), grid.dsigma)
        tau_exact = _tau_slice(shape, sg_sigma, psi_exact, width)
        curve_exact = integrate_frenet(CurveShape(shape.grid, shape.kappa, tau_exact))
        d = np.max(
            np.linalg.norm(traj_t.curves[idx].positions - curve_exact.positions, axis=1)
        )
        worst = max(worst, float(d))
    rt = time.perf_counter() - t0
    return CheckResult(
        6,
        "reparameterization-invariance",
        worst <= 1e-4,
        f"max_position_diff={worst:.3e}",
        "<=1e-4 at t in {0.5, 1.0, 1.5}",
        rt,
    )


def check_piecewise_matching() -> CheckResult:
    """7: matched (a2, b2) = (0.5, 3) and breakpoint continuity to 1e-12."""
    t0 = time.perf_counter()
    a2, b2 = match_piecewise(1.0, 1.0, 0.0, 2.0, 4.0)
    p1 = AntikinkParams(1.0, 1.0, 0.0)
    p2 = AntikinkParams(4.0, a2, b2)
    gap = max(
        abs(antikink_psi(p1, 2.0, u) - antikink_psi(p2, 2.0, u)) for u in (0.0, 0.5, 1.0)
    )
    ok = a2 == 0.5 and abs(b2 - 3.0) <= 1e-14 and gap <= 1e-12
    rt = time.perf_counter() - t0
    return CheckResult(
        7,
        "piecewise-matching",
        ok,
        f"a2={fmt(a2)} b2={fmt(b2)} breakpoint_gap={gap:.3e}",
        "(a2,b2)=(0.5,3), continuity gap<=1e-12 at u in {0,0.5,1}",
        rt,
    )


def check_bump_transport() -> CheckResult:
    """8: the |tau| maximum advances at rate a^2 within 5%."""
    t0 = time.perf_counter()
    p = AntikinkParams(1.0, 1.5, 0.0)
    grid = CharacteristicGrid(10.0, 10.0, 401, 401)
    field = solve_sine_gordon(grid, p.f, _antikink_boundary(p, grid))
    kappa0 = 1.0  # tau = k * kappa with kappa = 1
    width = WidthProfile.constant(p.f)
    sig = grid.sigma_nodes()
    centers = np.empty(grid.n_u)
    for j in range(grid.n_u):
        tau = k_from_psi(field.slice_at(j), width) * kappa0
        centers[j] = sig[int(np.argmax(np.abs(tau)))]
    uu = grid.u_nodes()
    mask = (centers > 0.5) & (centers < grid.K - 0.5)
    slope = float(np.polyfit(uu[mask], centers[mask], 1)[0])
    rel = abs(slope - p.a ** 2) / p.a ** 2
    rt = time.perf_counter() - t0
    return CheckResult(
        8,
        "torsion-bump-transport",
        rel <= 0.05,
        f"fitted_rate={slope:.4f} expected={p.a ** 2} rel_err={rel:.2%}",
        "rate = a^2 within 5%",
        rt,
        detail=f"slices_used={int(np.sum(mask))}",
    )


def check_planarity_speed() -> CheckResult:
    """9: tighter flatness tolerance gives nondecreasing a, hence speed."""
    t0 = time.perf_counter()
    tols = (0.1, 0.01, 0.001)
    fits = [fit_antikink_to_constant(pi, 10.0, tol, 1.0) for tol in tols]
    a_vals = [f.a for f in fits]
    sigma_dense = np.linspace(0.0, 10.0, 2001)
    bounds_ok = all(
        float(np.max(np.abs(antikink_psi(f, sigma_dense, 0.0) - pi))) <= tol
        for f, tol in zip(fits, tols)
    )
    monotone = a_vals[0] <= a_vals[1] <= a_vals[2]
    speeds = [a * a for a in a_vals]
    rt = time.perf_counter() - t0
    return CheckResult(
        9,
        "planarity-speed-monotonicity",
        monotone and bounds_ok,
        f"a={[f'{a:.4g}' for a in a_vals]} speeds={[f'{s:.4g}' for s in speeds]}",
        "a nondecreasing over tolerances (0.1, 0.01, 0.001); each fit within its tolerance",
        rt,
    )


_DETERMINISM_CONFIG = """\
shape = circle:n=101,ds=0.05,kappa=1
width = constant:1
boundary = antikink:f=1,a=1,b=0
U = 2
n_sigma = 101
n_u = 41
contact_threshold = 0.2
contact_exclusion = 10
"""


def check_determinism() -> CheckResult:
    """10: identical configs produce byte-identical psi CSV and trajectory."""
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory() as tmp:
        out_a = f"{tmp}/a"
        out_b = f"{tmp}/b"
        cmd_simulate(parse_config(_DETERMINISM_CONFIG, base_dir=tmp), out_a)
        cmd_simulate(parse_config(_DETERMINISM_CONFIG, base_dir=tmp), out_b)
        same = True
        for name in ("psi_field.csv", "trajectory.xyz"):
            with open(os.path.join(out_a, name), "rb") as fa, open(
                os.path.join(out_b, name), "rb"
            ) as fb:
                same = same and fa.read() == fb.read()
    rt = time.perf_counter() - t0
    return CheckResult(
        10,
        "simulate-determinism",
        same,
        f"byte_identical={same}",
        "psi_field.csv and trajectory.xyz byte-identical across reruns",
        rt,
    )


ALL_CHECKS: List[Callable[[], CheckResult]] = [
    check_antikink_exactness,
    check_solver_convergence,
    check_constant_width_reduction,
    check_frenet_round_trips,
    check_kappa_ds_invariance,
    check_reparameterization_invariance,
    check_piecewise_matching,
    check_bump_transport,
    check_planarity_speed,
    check_determinism,
]


def run_all(perturb: bool = False) -> List[CheckResult]:
    results = []
    for fn in ALL_CHECKS:
        if fn is check_solver_convergence:
            results.append(check_solver_convergence(perturb=perturb))
        else:
            results.append(fn())
    return results


def format_report(results: List[CheckResult]) -> List[str]:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"criterion {r.index:>2} {r.name:<32} {status}  "
            f"measured: {r.measured}  threshold: {r.threshold}  [{r.runtime:.2f}s]"
        )
        if r.detail and not r.passed:
            lines.append(f"             detail: {r.detail}")
    n_pass = sum(1 for r in results if r.passed)
    lines.append(f"{n_pass}/{len(results)} criteria passed")
    return lines
