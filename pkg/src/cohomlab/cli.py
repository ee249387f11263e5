"""Command-line interface: geometry, spectrum, verify, sweep, converge.

Configs are JSON (schema: n, topology, preset, grid, optional solver /
sweep / converge sections).  Outputs are deterministic: JSON uses
sorted keys and shortest round-trip floats, CSV uses comma delimiter,
header row and LF endings, and solver seeds are fixed, so identical
configs give byte-identical files.  Machine-readable output goes to
stdout unless --out is given; a short human summary always goes to
stderr.

Exit codes: 0 success (including HypothesisNotMet verdicts), 1 bound
violation (verify only), 2 config/IO/solver errors (one-line error
JSON on stdout).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from typing import Optional

import numpy as np

from .geometry import orbit_geometry, ricci_profile
from .lab import TheoremReport, check_bound, sweep as run_sweep
from .spectral import (DEFAULT_TOL, ConvergenceError, OperatorKind,
                       convergence_study, solve_smallest)
from .warp import Topology, grid_for, profile_from_config


def canonical_config_text(cfg) -> str:
    """Canonical JSON form: sorted keys, 17-significant-digit floats.

    Canonicalization is idempotent, so configs round-trip through this
    form byte-identically.
    """
    def enc(o):
        if isinstance(o, bool):
            return "true" if o else "false"
        if isinstance(o, dict):
            items = (f"{json.dumps(str(k))}: {enc(o[k])}" for k in sorted(o))
            return "{" + ", ".join(items) + "}"
        if isinstance(o, (list, tuple)):
            return "[" + ", ".join(enc(v) for v in o) + "]"
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return format(o, ".17g")
        if isinstance(o, str):
            return json.dumps(o)
        if o is None:
            return "null"
        raise TypeError(f"non-serializable config entry {o!r}")

    return enc(cfg) + "\n"


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValueError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"config is not valid JSON: {exc}") from None


def _emit_text(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload, out: Optional[str]) -> None:
    _emit_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", out)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _solver_opts(cfg: dict, args) -> tuple:
    solver = cfg.get("solver", {})
    tol = args.tol if getattr(args, "tol", None) is not None \
        else float(solver.get("tol", DEFAULT_TOL))
    richardson = bool(getattr(args, "richardson", False)
                      or solver.get("richardson", False))
    return tol, richardson


def _cmd_geometry(args) -> int:
    cfg = _load_config(args.config)
    profile, grid = profile_from_config(cfg)
    geom = orbit_geometry(profile, grid)
    ricci = ricci_profile(profile, grid)
    payload = {
        "profile": profile.preset_tag,
        "n": profile.n,
        "topology": profile.topology.value,
        "grid_N": grid.N,
        "kappa2": ricci.kappa2,
        "ric_min": ricci.ric_min,
        "argmin_r": ricci.argmin_r,
    }
    if args.csv:
        r = grid.interior if grid.topology is Topology.SPHERE_LIKE \
            else grid.nodes
        w = geom.w_interior
        rows = zip(r, profile.phi(r), geom.H, geom.B2, w,
                   ricci.ric_radial, ricci.ric_tangential)
        _emit_text(_csv_text(
            ["r", "phi", "H", "B2", "w", "ric_radial", "ric_tangential"],
            rows), args.csv)
    _emit_json(payload, args.out)
    _say(f"geometry {profile.preset_tag}: kappa2={ricci.kappa2:.6g} "
         f"ric_min={ricci.ric_min:.6g} at r={ricci.argmin_r:.6g}")
    return 0


def _cmd_spectrum(args) -> int:
    cfg = _load_config(args.config)
    profile, grid = profile_from_config(cfg)
    N = args.grid if args.grid is not None else grid.N
    tol, richardson = _solver_opts(cfg, args)
    kind = (OperatorKind.SCALAR_LAPLACIAN if args.kind == "scalar"
            else OperatorKind.ROUGH_VECTOR)
    result = solve_smallest(profile, kind, N, tol=tol, richardson=richardson)
    payload = {
        "profile": profile.preset_tag,
        "kind": args.kind,
        "lambda": result.lam,
        "lambda_extrapolated": result.extrapolated,
        "grid_N": result.grid_N,
        "residual": result.residual,
        "iterations": result.iterations,
    }
    if args.csv:
        fn = result.eigenfunction
        full_r = fn.grid.nodes
        _emit_text(_csv_text(["r", "f"], zip(full_r, fn.values)), args.csv)
    _emit_json(payload, args.out)
    extra = ("" if result.extrapolated is None
             else f" (richardson {result.extrapolated!r})")
    _say(f"spectrum {args.kind} {profile.preset_tag}: "
         f"lambda={result.lam!r}{extra} in {result.iterations} iterations")
    return 0


def _report_payload(rep: TheoremReport) -> dict:
    payload = asdict(rep)
    payload["verdict"] = rep.verdict.value
    return payload


def _cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    profile, grid = profile_from_config(cfg)
    tol, _ = _solver_opts(cfg, args)
    rep = check_bound(profile, N=grid.N, tol=tol)
    _emit_json(_report_payload(rep), args.out)
    _say(f"verify {profile.preset_tag}: verdict={rep.verdict.value} "
         f"gap={rep.gap:.6g} (tol_disc={rep.tol_disc:.2g})")
    return 0 if rep.bound_holds else 1


def _sweep_values(section: dict) -> list:
    if "values" in section:
        return [float(v) for v in section["values"]]
    try:
        start = float(section["start"])
        stop = float(section["stop"])
        step = float(section["step"])
    except KeyError as exc:
        raise ValueError(
            f"config path 'sweep.{exc.args[0]}': missing (need values "
            f"or start/stop/step)") from None
    if step <= 0 or stop < start:
        raise ValueError("config path 'sweep': need step > 0, stop >= start")
    count = int((stop - start) / step + 1e-9) + 1
    return [start + i * step for i in range(count)]


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    section = cfg.get("sweep")
    if not isinstance(section, dict):
        raise ValueError("config path 'sweep': missing section")
    preset = dict(cfg.get("preset", {}))
    family = section.get("family", preset.pop("type", None))
    if family is None:
        raise ValueError("config path 'sweep.family': missing")
    param = section.get("param")
    values = _sweep_values(section)
    n = int(cfg.get("n", 0)) or 2
    N = int(cfg.get("grid", {}).get("N", 1024))
    tol, _ = _solver_opts(cfg, args)
    base = {k: v for k, v in preset.items() if k != param}
    rows = run_sweep(family, values, n=n, N=N, tol=tol, param=param,
                     base_params=base)
    table = [(r.param, r.kappa2, r.lambda_min, r.gap, r.obata_defect,
              r.verdict.value if r.verdict else "", r.error or "")
             for r in rows]
    _emit_text(_csv_text(
        ["param", "kappa2", "lambda_min", "gap", "obata_defect", "verdict",
         "error"], table), args.out)
    failed = sum(1 for r in rows if r.error)
    _say(f"sweep {family} x{len(rows)} rows"
         + (f" ({failed} failed)" if failed else ""))
    return 0


def _cmd_converge(args) -> int:
    cfg = _load_config(args.config)
    profile, _ = profile_from_config(cfg)
    tol, _ = _solver_opts(cfg, args)
    if args.grids:
        grids = [int(g) for g in args.grids.split(",")]
    else:
        grids = [int(g) for g in cfg.get("converge", {}).get("grids", [])]
    if not grids:
        raise ValueError("config path 'converge.grids': missing "
                         "(or pass --grids)")
    kind = (OperatorKind.SCALAR_LAPLACIAN if args.kind == "scalar"
            else OperatorKind.ROUGH_VECTOR)
    study = convergence_study(profile, kind, grids, tol=tol)
    orders = ["exact" if p is None else p for p in study.orders]
    payload = {
        "profile": profile.preset_tag,
        "kind": args.kind,
        "grids": list(study.grids),
        "lambda": list(study.lambdas),
        "orders": orders,
    }
    _emit_json(payload, args.out)
    _say(f"converge {profile.preset_tag}: orders "
         + ", ".join(o if isinstance(o, str) else f"{o:.3f}" for o in orders))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohomlab",
        description="spectral-gap experiments on warped-product manifolds")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", help="write JSON/CSV here instead of stdout")
        p.add_argument("--tol", type=float, help="solver residual tolerance")

    p = sub.add_parser("geometry", help="curvature and weight profiles")
    common(p)
    p.add_argument("--csv", help="write plot-ready profile CSV here")
    p.set_defaults(func=_cmd_geometry)

    p = sub.add_parser("spectrum", help="extremal eigenvalue")
    common(p)
    p.add_argument("--kind", choices=["vector", "scalar"], default="vector")
    p.add_argument("--grid", type=int, help="override grid N")
    p.add_argument("--richardson", action="store_true",
                   help="extrapolate against the halved grid")
    p.add_argument("--csv", help="write eigenfunction CSV here")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("verify", help="run the bound check with verdict")
    common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep", help="bound check across a preset family")
    common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("converge", help="grid convergence study")
    common(p)
    p.add_argument("--kind", choices=["vector", "scalar"], default="vector")
    p.add_argument("--grids", help="comma-separated grid sizes")
    p.set_defaults(func=_cmd_converge)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(json.dumps({"error": str(exc), "type": "solver",
                          "last_residual": exc.last_residual}))
        return 2
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
