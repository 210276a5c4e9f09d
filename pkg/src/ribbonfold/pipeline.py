"""End-to-end run orchestration for the CLI.

A simulate run solves the twist field numerically from its boundary data
(the closed form only supplies those boundary rows), realizes the shape
trajectory slice by slice until self-contact, and writes deterministic
outputs: psi_field.csv, trajectory.xyz, summary.txt, and, when a time map
is configured, trajectory_time.xyz. Reruns with the same config produce
byte-identical files: nothing here depends on wall time, hashing order, or
the output directory path.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Optional

from . import fileio
from .config import KNOWN_KEYS, RunConfig, parse_config
from .errors import ConfigError
from .evolution import (
    ContactEvent,
    ShapeTrajectory,
    discrete_residual,
    run_until_contact,
    time_reparameterize,
)
from .fileio import fmt


@dataclass
class SimulateResult:
    trajectory: ShapeTrajectory
    contact: Optional[ContactEvent]
    max_residual: float
    files: List[str]


def _summary_lines(cfg: RunConfig, result: SimulateResult) -> List[str]:
    lines = ["run = simulate"]
    solver = "sine_gordon" if cfg.width.kind == "constant" else "general_pde"
    lines.append(f"solver = {solver}")
    lines.append(f"K = {fmt(cfg.grid.K)}")
    lines.append(f"U = {fmt(cfg.grid.U)}")
    lines.append(f"n_sigma = {cfg.grid.n_sigma}")
    lines.append(f"n_u = {cfg.grid.n_u}")
    lines.append(f"width = {cfg.raw['width']}")
    lines.append(f"boundary = {cfg.raw['boundary']}")
    if cfg.piecewise_antikink is not None:
        for m, (s0, s1, p) in enumerate(cfg.piecewise_antikink.segments, start=1):
            lines.append(
                f"segment_{m} = span=[{fmt(s0)},{fmt(s1)}] "
                f"f={fmt(p.f)} a={fmt(p.a)} b={fmt(p.b)}"
            )
    elif cfg.antikink is not None:
        p = cfg.antikink
        lines.append(f"antikink = f={fmt(p.f)} a={fmt(p.a)} b={fmt(p.b)}")
    lines.append(f"max_residual = {fmt(result.max_residual)}")
    if result.contact is None:
        lines.append("contact = none")
    else:
        ev = result.contact
        lines.append(
            f"contact = slice={ev.slice_index} u={fmt(ev.u)} "
            f"i={ev.contact.i} j={ev.contact.j} distance={fmt(ev.contact.distance)}"
        )
    lines.append(f"slices = {result.trajectory.n_slices}")
    lines.append(f"timemap = {cfg.raw.get('timemap', 'none')}")
    return lines


def cmd_simulate(cfg: RunConfig, outdir: str) -> SimulateResult:
    """Run one configured simulation, writing outputs into outdir."""
    fileio.ensure_dir(outdir)
    traj, event = run_until_contact(
        cfg.shape,
        cfg.width,
        cfg.boundary,
        cfg.grid,
        threshold=cfg.contact_threshold,
        exclusion=cfg.contact_exclusion,
    )
    residual = discrete_residual(traj.psi, cfg.width)
    result = SimulateResult(traj, event, residual, [])

    if cfg.write_psi:
        path = os.path.join(outdir, "psi_field.csv")
        fileio.write_psi_csv(path, traj.psi)
        result.files.append(path)
    if cfg.write_trajectory:
        path = os.path.join(outdir, "trajectory.xyz")
        fileio.write_trajectory_xyz(path, traj)
        result.files.append(path)
    if cfg.timemap is not None:
        traj_t = time_reparameterize(traj, cfg.timemap)
        path = os.path.join(outdir, "trajectory_time.xyz")
        fileio.write_trajectory_xyz(path, traj_t)
        result.files.append(path)

    summary_path = os.path.join(outdir, "summary.txt")
    fileio.write_lines(summary_path, _summary_lines(cfg, result))
    result.files.append(summary_path)
    return result


def _override_line(text: str, key: str, value: str) -> str:
    """Replace `key = ...` in config text (or append it)."""
    out = []
    replaced = False
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        if "=" in body and body.partition("=")[0].strip() == key:
            out.append(f"{key} = {value}")
            replaced = True
        else:
            out.append(line)
    if not replaced:
        out.append(f"{key} = {value}")
    return "\n".join(out) + "\n"


def cmd_sweep(text: str, base_dir: str, key: str, values: List[str], outdir: str) -> List[str]:
    """Run one simulation per value of a single overridden config key.

    Each run writes into <outdir>/<key>=<value>/ and runs independently;
    the run order follows the given value order.
    """
    if not values:
        raise ConfigError("sweep needs at least one value")
    if key not in KNOWN_KEYS:
        raise ConfigError(
            f"sweep key {key!r} is not a config key; choose from {', '.join(KNOWN_KEYS)}"
        )
    subdirs = []
    for value in values:
        sub = os.path.join(outdir, f"{key}={value.replace(os.sep, '_')}")
        cfg = parse_config(_override_line(text, key, value), base_dir=base_dir)
        cmd_simulate(cfg, sub)
        subdirs.append(sub)
    return subdirs
