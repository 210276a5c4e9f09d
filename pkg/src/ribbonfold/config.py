"""Line-based `key = value` run configuration.

Grammar: one `key = value` per line, `#` starts a comment, blank lines are
skipped, no nesting, unknown or duplicate keys are rejected with their line
number. All file paths resolve relative to the config file's directory.

Keys
----
shape       file:<path> | line:n=<n>,ds=<v> | circle:n=<n>,ds=<v>,kappa=<v>
            | helix:n=<n>,ds=<v>,kappa=<v>,tau=<v>        (required)
width       constant:<f0> | piecewise:<s1>:<f1>,<s2>:<f2>,...   (required)
boundary    constant:<psi0> | antikink:f=<v>,a=<v>,b=<v> | file:<path>
            (required)
U           u extent of the run, > 0                       (required)
n_sigma     sigma node count, >= 2                         (required)
n_u         u node count, >= 2                             (required)
contact_threshold   contact distance, > 0                  (optional)
contact_exclusion   skipped chain neighbors, >= 1          (optional, default 5)
timemap     constant:c=<v>,t_end=<v>,n_t=<n>
            | linear:c=<v>,t_end=<v>,n_t=<n>               (optional)
write_psi          true|false                              (optional, default true)
write_trajectory   true|false                              (optional, default true)

The grid must satisfy the contraction bound dsigma * du * max(f) <= 0.5 or
the config is rejected before anything runs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import fileio
from .curve import KAPPA_MIN, ArcGrid, CurveShape, sigma_of_s
from .errors import ConfigError
from .evolution import BoundaryData, CharacteristicGrid, TimeMap
from .ribbon import WidthProfile
from .soliton import AntikinkParams, PiecewiseAntikink, antikink_psi

_KNOWN_KEYS = (
    "shape",
    "width",
    "boundary",
    "U",
    "n_sigma",
    "n_u",
    "contact_threshold",
    "contact_exclusion",
    "timemap",
    "write_psi",
    "write_trajectory",
)

_REQUIRED_KEYS = ("shape", "width", "boundary", "U", "n_sigma", "n_u")

KNOWN_KEYS = _KNOWN_KEYS


@dataclass(frozen=True)
class RunConfig:
    """Validated, fully constructed inputs for one simulate run."""

    shape: CurveShape
    width: WidthProfile
    grid: CharacteristicGrid
    boundary: BoundaryData
    antikink: Optional[AntikinkParams]
    piecewise_antikink: Optional[PiecewiseAntikink]
    contact_threshold: Optional[float]
    contact_exclusion: int
    timemap: Optional[TimeMap]
    write_psi: bool
    write_trajectory: bool
    raw: dict


def _parse_lines(text: str) -> dict:
    """First stage: text -> {key: (value, lineno)} with syntax checking."""
    entries: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line.strip()!r}")
        key, _, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = (value, lineno)
    return entries


def _kvlist(value: str, what: str, lineno: int) -> dict:
    out = {}
    for item in value.split(","):
        k, sep, v = item.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: {what} needs comma-separated k=v pairs, got {item!r}")
        out[k.strip()] = v.strip()
    return out


def _need(d: dict, keys, what: str, lineno: int) -> None:
    missing = [k for k in keys if k not in d]
    extra = [k for k in d if k not in keys]
    if missing or extra:
        raise ConfigError(
            f"line {lineno}: {what} wants exactly {list(keys)}; "
            f"missing {missing}, unknown {extra}"
        )


def _positive_float(s: str, what: str, lineno: int) -> float:
    try:
        v = float(s)
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: {what} must be a number, got {s!r}") from exc
    if not v > 0:
        raise ConfigError(f"line {lineno}: {what} must be positive, got {v}")
    return v


def _int_at_least(s: str, lo: int, what: str, lineno: int) -> int:
    try:
        v = int(s)
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: {what} must be an integer, got {s!r}") from exc
    if v < lo:
        raise ConfigError(f"line {lineno}: {what} must be >= {lo}, got {v}")
    return v


def _build_shape(value: str, lineno: int, base_dir: str) -> CurveShape:
    head, sep, rest = value.partition(":")
    if not sep:
        raise ConfigError(f"line {lineno}: shape spec needs a variant prefix, got {value!r}")
    if head == "file":
        path = rest if os.path.isabs(rest) else os.path.join(base_dir, rest)
        if not os.path.exists(path):
            raise ConfigError(f"line {lineno}: shape file {path} does not exist")
        return fileio.read_shape(path)
    kv = _kvlist(rest, f"shape {head}", lineno)
    if head == "line":
        _need(kv, ("n", "ds"), "shape line", lineno)
        n = _int_at_least(kv["n"], 2, "n", lineno)
        ds = _positive_float(kv["ds"], "ds", lineno)
        return CurveShape(ArcGrid(n, ds), np.full(n, KAPPA_MIN), np.zeros(n))
    if head == "circle":
        _need(kv, ("n", "ds", "kappa"), "shape circle", lineno)
        n = _int_at_least(kv["n"], 2, "n", lineno)
        ds = _positive_float(kv["ds"], "ds", lineno)
        kap = _positive_float(kv["kappa"], "kappa", lineno)
        return CurveShape(ArcGrid(n, ds), np.full(n, kap), np.zeros(n))
    if head == "helix":
        _need(kv, ("n", "ds", "kappa", "tau"), "shape helix", lineno)
        n = _int_at_least(kv["n"], 2, "n", lineno)
        ds = _positive_float(kv["ds"], "ds", lineno)
        kap = _positive_float(kv["kappa"], "kappa", lineno)
        try:
            tau = float(kv["tau"])
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: tau must be a number") from exc
        return CurveShape(ArcGrid(n, ds), np.full(n, kap), np.full(n, tau))
    raise ConfigError(f"line {lineno}: unknown shape variant {head!r}")


def _build_boundary(
    value: str,
    lineno: int,
    base_dir: str,
    grid: CharacteristicGrid,
    width: WidthProfile,
):
    """Returns (BoundaryData, AntikinkParams|None, PiecewiseAntikink|None)."""
    head, sep, rest = value.partition(":")
    if not sep:
        raise ConfigError(f"line {lineno}: boundary spec needs a variant prefix, got {value!r}")
    sig = grid.sigma_nodes()
    uu = grid.u_nodes()
    if head == "constant":
        try:
            psi0 = float(rest)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad constant boundary value {rest!r}") from exc
        return (
            BoundaryData(np.full(grid.n_sigma, psi0), np.full(grid.n_u, psi0)),
            None,
            None,
        )
    if head == "antikink":
        kv = _kvlist(rest, "boundary antikink", lineno)
        _need(kv, ("f", "a", "b"), "boundary antikink", lineno)
        f = _positive_float(kv["f"], "f", lineno)
        a = _positive_float(kv["a"], "a", lineno)
        try:
            b = float(kv["b"])
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: b must be a number") from exc
        params = AntikinkParams(f, a, b)
        if width.kind == "piecewise":
            if abs(f - width.values[0]) > 1e-12:
                raise ConfigError(
                    f"line {lineno}: antikink f = {f:g} must equal the first width "
                    f"segment value {width.values[0]:g}"
                )
            breaks = [
                (float(width.ends[m]), float(width.values[m + 1]))
                for m in range(len(width.ends) - 1)
            ]
            pw = PiecewiseAntikink.from_matching(params, breaks, grid.K)
            boundary = BoundaryData(pw.psi(sig, 0.0), pw.psi(0.0, uu))
            return boundary, params, pw
        boundary = BoundaryData(
            antikink_psi(params, sig, 0.0), antikink_psi(params, 0.0, uu)
        )
        return boundary, params, None
    if head == "file":
        path = rest if os.path.isabs(rest) else os.path.join(base_dir, rest)
        if not os.path.exists(path):
            raise ConfigError(f"line {lineno}: boundary file {path} does not exist")
        bsig, bpsi, bu, lpsi = fileio.read_boundary_csv(path)
        if len(bsig) != grid.n_sigma or len(bu) != grid.n_u:
            raise ConfigError(
                f"line {lineno}: boundary file rows ({len(bsig)} bottom, {len(bu)} left) "
                f"do not match the grid ({grid.n_sigma}, {grid.n_u})"
            )
        if np.max(np.abs(bsig - sig)) > 1e-9 or np.max(np.abs(bu - uu)) > 1e-9:
            raise ConfigError(f"line {lineno}: boundary file coords do not match the grid nodes")
        return BoundaryData(bpsi, lpsi), None, None
    raise ConfigError(f"line {lineno}: unknown boundary variant {head!r}")


def _build_timemap(value: str, lineno: int, U: float) -> TimeMap:
    head, sep, rest = value.partition(":")
    if not sep or head not in ("constant", "linear"):
        raise ConfigError(
            f"line {lineno}: timemap must be constant:... or linear:..., got {value!r}"
        )
    kv = _kvlist(rest, f"timemap {head}", lineno)
    _need(kv, ("c", "t_end", "n_t"), f"timemap {head}", lineno)
    c = _positive_float(kv["c"], "c", lineno)
    t_end = _positive_float(kv["t_end"], "t_end", lineno)
    n_t = _int_at_least(kv["n_t"], 2, "n_t", lineno)
    tmap = TimeMap.constant(c, t_end, n_t) if head == "constant" else TimeMap.linear(c, t_end, n_t)
    if tmap.g[-1] > U * (1.0 + 1e-12):
        raise ConfigError(
            f"line {lineno}: timemap reaches g(t_end) = {tmap.g[-1]:g} beyond U = {U:g}"
        )
    return tmap


def _build_bool(value: str, lineno: int, what: str) -> bool:
    low = value.lower()
    if low not in ("true", "false"):
        raise ConfigError(f"line {lineno}: {what} must be true or false, got {value!r}")
    return low == "true"


def parse_config(text: str, base_dir: str = ".") -> RunConfig:
    """Parse and fully validate a run configuration."""
    entries = _parse_lines(text)
    missing = [k for k in _REQUIRED_KEYS if k not in entries]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    shape = _build_shape(*entries["shape"], base_dir=base_dir)
    K = sigma_of_s(shape).K

    wval, wline = entries["width"]
    try:
        width = WidthProfile.from_spec(wval)
    except ConfigError as exc:
        raise ConfigError(f"line {wline}: {exc}") from exc
    if width.kind == "piecewise" and np.any(width.ends > K * (1.0 + 1e-9)):
        raise ConfigError(f"line {wline}: width segment ends must lie within [0, K={K:g}]")

    U = _positive_float(entries["U"][0], "U", entries["U"][1])
    n_sigma = _int_at_least(entries["n_sigma"][0], 2, "n_sigma", entries["n_sigma"][1])
    n_u = _int_at_least(entries["n_u"][0], 2, "n_u", entries["n_u"][1])
    grid = CharacteristicGrid(K, U, n_sigma, n_u)
    grid.validate_contraction(width.max_value())

    boundary, anti, pw = _build_boundary(*entries["boundary"], base_dir=base_dir, grid=grid, width=width)

    threshold = None
    if "contact_threshold" in entries:
        threshold = _positive_float(
            entries["contact_threshold"][0], "contact_threshold", entries["contact_threshold"][1]
        )
    exclusion = 5
    if "contact_exclusion" in entries:
        exclusion = _int_at_least(
            entries["contact_exclusion"][0], 1, "contact_exclusion", entries["contact_exclusion"][1]
        )

    tmap = None
    if "timemap" in entries and entries["timemap"][0] != "none":
        tmap = _build_timemap(*entries["timemap"], U=U)

    write_psi = True
    if "write_psi" in entries:
        write_psi = _build_bool(*entries["write_psi"], what="write_psi")
    write_traj = True
    if "write_trajectory" in entries:
        write_traj = _build_bool(*entries["write_trajectory"], what="write_trajectory")

    return RunConfig(
        shape=shape,
        width=width,
        grid=grid,
        boundary=boundary,
        antikink=anti,
        piecewise_antikink=pw,
        contact_threshold=threshold,
        contact_exclusion=exclusion,
        timemap=tmap,
        write_psi=write_psi,
        write_trajectory=write_traj,
        raw={k: v for k, (v, _) in entries.items()},
    )
