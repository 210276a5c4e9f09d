"""Command-line interface.

Subcommands:
  simulate <config>           full pipeline from a config file
  antikink <k=v ...> --grid   write a closed-form twist field (no solve)
  reconstruct <shapefile>     realize a curve from kappa/tau samples
  validate                    run the built-in acceptance checks
  sweep <config> --vary       one run per value of one config key

Exit codes: 0 success, 2 configuration error, 3 numeric failure during a
run, 4 validation criteria failed.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

import numpy as np

from . import fileio, validation
from .config import parse_config
from .curve import integrate_frenet
from .errors import ConfigError, RibbonfoldError
from .evolution import CharacteristicGrid, PsiField2D
from .fileio import fmt
from .pipeline import cmd_simulate, cmd_sweep
from .soliton import AntikinkParams, PiecewiseAntikink

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="ribbonfold",
        description="Twist-field folding simulator for ribbon geometries.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a configured simulation")
    p_sim.add_argument("config", help="path to a key = value config file")
    p_sim.add_argument("--outdir", default="out", help="output directory (default: out)")

    p_anti = sub.add_parser("antikink", help="write a closed-form antikink field")
    p_anti.add_argument(
        "params",
        nargs=3,
        metavar="k=v",
        help="f=<v> a=<v> b=<v>",
    )
    p_anti.add_argument(
        "--grid",
        required=True,
        help="K=<v>,U=<v>,n_sigma=<n>,n_u=<n>",
    )
    p_anti.add_argument(
        "--segment",
        action="append",
        nargs=2,
        metavar=("sigma_end=<v>", "f=<v>"),
        default=[],
        help="end the running segment at sigma_end and continue with width f "
        "(repeatable; (a, b) follow from the matching identity)",
    )
    p_anti.add_argument("--out", default="psi_field.csv", help="output CSV path")

    p_rec = sub.add_parser("reconstruct", help="integrate a curve from a shape file")
    p_rec.add_argument("shapefile")
    p_rec.add_argument("--out", default="curve.xyz", help="output XYZ path")

    p_val = sub.add_parser("validate", help="run the acceptance criteria")
    p_val.add_argument(
        "--perturb",
        action="store_true",
        help="negative control: bias the convergence measurement so criterion 2 fails",
    )

    p_sweep = sub.add_parser("sweep", help="run simulate once per value of one key")
    p_sweep.add_argument("config")
    p_sweep.add_argument(
        "--vary", required=True, metavar="key=v1,v2,...", help="config key and values"
    )
    p_sweep.add_argument("--outdir", default="sweep", help="output root (default: sweep)")
    return top


def _parse_kv_tokens(tokens: List[str], wanted: tuple, what: str) -> dict:
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep:
            raise ConfigError(f"{what}: expected key=value, got {tok!r}")
        if key not in wanted:
            raise ConfigError(f"{what}: unknown key {key!r} (want {wanted})")
        if key in out:
            raise ConfigError(f"{what}: duplicate key {key!r}")
        try:
            out[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"{what}: bad number in {tok!r}") from exc
    missing = [k for k in wanted if k not in out]
    if missing:
        raise ConfigError(f"{what}: missing {missing}")
    return out


def _run_antikink(args) -> int:
    kv = _parse_kv_tokens(args.params, ("f", "a", "b"), "antikink params")
    gkv = _parse_kv_tokens(args.grid.split(","), ("K", "U", "n_sigma", "n_u"), "--grid")
    grid = CharacteristicGrid(gkv["K"], gkv["U"], int(gkv["n_sigma"]), int(gkv["n_u"]))
    first = AntikinkParams(kv["f"], kv["a"], kv["b"])
    if args.segment:
        breaks = []
        for pair in args.segment:
            skv = _parse_kv_tokens(list(pair), ("sigma_end", "f"), "--segment")
            breaks.append((skv["sigma_end"], skv["f"]))
        source = PiecewiseAntikink.from_matching(first, breaks, grid.K)
        for m, (s0, s1, p) in enumerate(source.segments, start=1):
            print(
                f"segment_{m} span=[{fmt(s0)},{fmt(s1)}] "
                f"f={fmt(p.f)} a={fmt(p.a)} b={fmt(p.b)}"
            )
    else:
        source = first
    values = source.psi(grid.sigma_nodes()[:, None], grid.u_nodes()[None, :])
    fileio.write_psi_csv(args.out, PsiField2D(np.asarray(values), grid))
    print(f"wrote {args.out}")
    return EXIT_OK


def _run_reconstruct(args) -> int:
    shape = fileio.read_shape(args.shapefile)
    curve = integrate_frenet(shape)
    fileio.write_curve_xyz(args.out, curve)
    end_to_end = float(np.linalg.norm(curve.positions[-1] - curve.positions[0]))
    print(
        f"wrote {args.out}: {curve.n} nodes, length {fmt(shape.grid.length)}, "
        f"end-to-end distance {fmt(end_to_end)}"
    )
    return EXIT_OK


def _run_validate(args) -> int:
    results = validation.run_all(perturb=args.perturb)
    for line in validation.format_report(results):
        print(line)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def _run_simulate(args) -> int:
    with open(args.config) as fh:
        text = fh.read()
    cfg = parse_config(text, base_dir=os.path.dirname(os.path.abspath(args.config)))
    result = cmd_simulate(cfg, args.outdir)
    for path in result.files:
        print(f"wrote {path}")
    if result.contact is not None:
        ev = result.contact
        print(
            f"contact at slice {ev.slice_index} (u={fmt(ev.u)}): nodes "
            f"{ev.contact.i} and {ev.contact.j}, distance {fmt(ev.contact.distance)}"
        )
    else:
        print("no contact; full trajectory written")
    return EXIT_OK


def _run_sweep(args) -> int:
    key, sep, vals = args.vary.partition("=")
    if not sep or not vals:
        raise ConfigError("--vary wants key=v1,v2,...")
    with open(args.config) as fh:
        text = fh.read()
    base_dir = os.path.dirname(os.path.abspath(args.config))
    subdirs = cmd_sweep(text, base_dir, key.strip(), vals.split(","), args.outdir)
    for sub in subdirs:
        print(f"wrote {sub}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _run_simulate(args)
        if args.command == "antikink":
            return _run_antikink(args)
        if args.command == "reconstruct":
            return _run_reconstruct(args)
        if args.command == "validate":
            return _run_validate(args)
        if args.command == "sweep":
            return _run_sweep(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RibbonfoldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
