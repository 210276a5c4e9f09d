"""Readers and writers for the on-disk formats.

All floats are serialized with 9 significant digits (%.9g). That format is
stable under a read/write round trip: parsing a 9-digit decimal and
printing it again reproduces the same bytes, which is what the output
determinism guarantees rest on.

Formats:
  shape file      header `ribbonfold-shape v1`, then `n ds`, then n lines
                  of `kappa tau`
  psi CSV         header `sigma,u,psi`, one row per grid node, row-major
                  with sigma as the outer index
  trajectory XYZ  per slice: node count, `u=<value>`, then `C <x> <y> <z>`
                  per node
  boundary CSV    header `kind,coord,psi`, kind in {bottom, left}; bottom
                  rows ordered by sigma, then left rows ordered by u
"""

from __future__ import annotations

import os
from typing import Iterable, Tuple

import numpy as np

from .curve import ArcGrid, CurveShape, EmbeddedCurve
from .errors import ConfigError, RibbonfoldError
from .evolution import PsiField2D, ShapeTrajectory

SHAPE_HEADER = "ribbonfold-shape v1"


def fmt(x: float) -> str:
    """9-significant-digit float formatting used by every writer."""
    return format(float(x), ".9g")


def write_shape(path, shape: CurveShape) -> None:
    lines = [SHAPE_HEADER, f"{shape.grid.n_samples} {fmt(shape.grid.ds)}"]
    for k, t in zip(shape.kappa, shape.tau):
        lines.append(f"{fmt(k)} {fmt(t)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_shape(path) -> CurveShape:
    try:
        with open(path) as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read shape file {path}: {exc}") from exc
    if not raw or raw[0].strip() != SHAPE_HEADER:
        raise ConfigError(f"{path}: missing `{SHAPE_HEADER}` header")
    if len(raw) < 2:
        raise ConfigError(f"{path}: truncated before the `n ds` line")
    bits = raw[1].split()
    if len(bits) != 2:
        raise ConfigError(f"{path}: line 2 must be `n ds`, got {raw[1]!r}")
    try:
        n = int(bits[0])
        ds = float(bits[1])
    except ValueError as exc:
        raise ConfigError(f"{path}: bad `n ds` line {raw[1]!r}") from exc
    rows = [ln for ln in raw[2:] if ln.strip()]
    if len(rows) != n:
        raise ConfigError(f"{path}: expected {n} kappa/tau rows, found {len(rows)}")
    kappa = np.empty(n)
    tau = np.empty(n)
    for idx, ln in enumerate(rows):
        bits = ln.split()
        if len(bits) != 2:
            raise ConfigError(f"{path}: row {idx + 3} must be `kappa tau`, got {ln!r}")
        try:
            kappa[idx] = float(bits[0])
            tau[idx] = float(bits[1])
        except ValueError as exc:
            raise ConfigError(f"{path}: bad float on row {idx + 3}: {ln!r}") from exc
    try:
        return CurveShape(ArcGrid(n, ds), kappa, tau)
    except RibbonfoldError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def write_psi_csv(path, field: PsiField2D) -> None:
    sig = field.grid.sigma_nodes()
    uu = field.grid.u_nodes()
    out = ["sigma,u,psi"]
    for i in range(field.grid.n_sigma):
        si = fmt(sig[i])
        row = field.values[i]
        for j in range(field.grid.n_u):
            out.append(f"{si},{fmt(uu[j])},{fmt(row[j])}")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def read_psi_csv(path):
    """Read a psi CSV back as (sigma_nodes, u_nodes, values)."""
    try:
        with open(path) as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read psi CSV {path}: {exc}") from exc
    if not raw or raw[0].strip() != "sigma,u,psi":
        raise ConfigError(f"{path}: missing `sigma,u,psi` header")
    rows = [ln for ln in raw[1:] if ln.strip()]
    try:
        data = np.array([[float(x) for x in ln.split(",")] for ln in rows])
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed CSV row") from exc
    if data.ndim != 2 or data.shape[1] != 3:
        raise ConfigError(f"{path}: expected 3 columns")
    u_vals = data[:, 1]
    n_u = 1
    while n_u < len(u_vals) and u_vals[n_u] > u_vals[n_u - 1]:
        n_u += 1
    if len(rows) % n_u != 0:
        raise ConfigError(f"{path}: row count {len(rows)} is not a multiple of n_u={n_u}")
    n_sigma = len(rows) // n_u
    sigma = data[::n_u, 0]
    values = data[:, 2].reshape(n_sigma, n_u)
    return sigma, u_vals[:n_u], values


def _xyz_slice_lines(out: list, positions: np.ndarray, u_value: float) -> None:
    out.append(str(len(positions)))
    out.append(f"u={fmt(u_value)}")
    for p in positions:
        out.append(f"C {fmt(p[0])} {fmt(p[1])} {fmt(p[2])}")


def write_trajectory_xyz(path, traj: ShapeTrajectory) -> None:
    out: list = []
    for k in range(traj.n_slices):
        _xyz_slice_lines(out, traj.curves[k].positions, traj.u_values[k])
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def write_curve_xyz(path, curve: EmbeddedCurve, u_value: float = 0.0) -> None:
    out: list = []
    _xyz_slice_lines(out, curve.positions, u_value)
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def read_boundary_csv(path) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Read boundary data: returns (sigma, psi_bottom, u, psi_left)."""
    try:
        with open(path) as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read boundary file {path}: {exc}") from exc
    if not raw or raw[0].strip() != "kind,coord,psi":
        raise ConfigError(f"{path}: missing `kind,coord,psi` header")
    bottom: list = []
    left: list = []
    for lineno, ln in enumerate(raw[1:], start=2):
        if not ln.strip():
            continue
        bits = ln.split(",")
        if len(bits) != 3 or bits[0] not in ("bottom", "left"):
            raise ConfigError(f"{path}:{lineno}: want `bottom|left,<coord>,<psi>`, got {ln!r}")
        try:
            coord, val = float(bits[1]), float(bits[2])
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad float in {ln!r}") from exc
        (bottom if bits[0] == "bottom" else left).append((coord, val))
    if not bottom or not left:
        raise ConfigError(f"{path}: needs both bottom and left rows")
    b = np.array(bottom)
    l = np.array(left)
    return b[:, 0], b[:, 1], l[:, 0], l[:, 1]


def write_lines(path, lines: Iterable[str]) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def ensure_dir(path) -> None:
    os.makedirs(path, exist_ok=True)
