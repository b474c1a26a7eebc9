"""Command-line front end.

Subcommands ``surfaces``, ``classify``, ``propagate``, ``sweep`` and
``boundaries`` read a TOML configuration (optionally seeded from a named
preset), run the corresponding library call and write CSV files with
``#`` header lines plus JSON sidecars. Exit codes: 0 success, 2 bad
configuration, 3 degenerate case without ``--allow-degenerate``,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import config as cfgmod
from .config import ConfigError
from .propagator import IntegrationError, propagate
from .spectrum import DegenerateCaseError, TopologyCase, classify_case, conical_intersections, surface_grid, \
    zero_field_energies
from .sweep import MISSING, boundary_curves, boundary_warnings, efficiency_map, region_prediction

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_NUMERIC = 0, 2, 3, 4
SWEEP_FAILURE_LIMIT = 0.05
PROG = "adiabatic-topology"


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def fmt(x) -> str:
    """Shortest decimal string that parses back to the same double."""
    return repr(float(x))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def _units_line(cfg: dict) -> str:
    u = cfg["units"]
    return (f"# units: frequencies and detunings in units of {u['name']} "
            f"(reference_frequency={fmt(u['reference_frequency'])}), times in its inverse; all values dimensionless")


def _header(command: str, cfg: dict, extra=()) -> list[str]:
    lines = [f"# {PROG} {__version__} {command}", _units_line(cfg),
             "# config: " + json.dumps(_jsonable(cfg), sort_keys=True, separators=(",", ":"))]
    lines += [f"# {e}" for e in extra]
    return lines


def _write_csv(path: str, header: list[str], columns: list[str], rows) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        for line in header:
            fh.write(line + "\n")
        fh.write("# columns: " + ",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _write_json(path: str, command: str, cfg: dict, payload: dict) -> None:
    doc = {"tool": PROG, "version": __version__, "command": command, "config": cfg, **payload}
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(_jsonable(doc), fh, sort_keys=True, indent=2, allow_nan=False)
        fh.write("\n")


def write_pgm(path: str, grid: np.ndarray) -> None:
    """Binary P5 graymap of populations; x runs along the first grid axis, the last axis points up.

    Failed points (negative sentinel) render as black.
    """
    img = np.asarray(grid, dtype=float).T[::-1]
    data = np.clip(np.rint(np.where(img < 0, 0.0, img) * 255), 0, 255).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def _outdir(cfg: dict) -> str:
    d = cfg["output"]["dir"]
    os.makedirs(d, exist_ok=True)
    return d


# --- subcommands ---------------------------------------------------------------------------------

def cmd_surfaces(cfg: dict, allow_degenerate: bool) -> int:
    dp, ds = cfgmod.detunings(cfg)
    ap, as_ = cfgmod.grid_axes(cfg)
    case = classify_case(dp, ds)
    if case is TopologyCase.DEGENERATE and not allow_degenerate:
        raise _Exit(EXIT_DEGENERATE, f"zero-field energies are degenerate for delta_p={dp}, delta_s={ds}; "
                                     "pass --allow-degenerate to compute unlabelled sheets")
    grid = surface_grid(dp, ds, ap, as_, allow_degenerate=allow_degenerate)
    try:
        points = conical_intersections(dp, ds)
    except DegenerateCaseError:
        points = []
    out = _outdir(cfg)
    rows = ([fmt(grid.axis_p[i]), fmt(grid.axis_s[j]), *(fmt(v) for v in grid.sheets[i, j]),
             *(str(int(k)) for k in grid.labels[i, j])]
            for i in range(len(ap)) for j in range(len(as_)))
    _write_csv(os.path.join(out, "surfaces.csv"), _header("surfaces", cfg, [f"case: {case.value}"]),
               ["rabi_p", "rabi_s", "lambda1", "lambda2", "lambda3", "label1", "label2", "label3"], rows)
    _write_json(os.path.join(out, "surfaces.json"), "surfaces", cfg, {
        "case": case.value,
        "delta_p": dp, "delta_s": ds,
        "zero_field_energies": list(zero_field_energies(dp, ds)),
        "intersections": [list(p) for p in points],
        "grid_shape": [len(ap), len(as_)],
    })
    return EXIT_OK


def _ordering(dp: float, ds: float) -> str:
    e = zero_field_energies(dp, ds)
    order = sorted(range(3), key=lambda k: (e[k], k))
    parts = [f"E{order[0] + 1}"]
    for a, b in zip(order, order[1:]):
        parts.append(("= " if e[a] == e[b] else "< ") + f"E{b + 1}")
    return " ".join(parts)


def cmd_classify(cfg: dict) -> int:
    dp, ds = cfgmod.detunings(cfg)
    print(f"{classify_case(dp, ds).value} ({_ordering(dp, ds)})")
    return EXIT_OK


def cmd_propagate(cfg: dict) -> int:
    proto = cfgmod.build_protocol(cfg)
    psi0 = cfgmod.initial_state(cfg, proto.n_levels)
    out = _outdir(cfg)
    summary_path = os.path.join(out, "propagation.json")
    num = cfg["numerics"]
    try:
        res = propagate(proto, psi0, tol=float(num["tol"]), n_samples=int(num["samples"]))
    except IntegrationError as exc:
        _write_json(summary_path, "propagate", cfg, {"status": "failed", "error": str(exc)})
        raise _Exit(EXIT_NUMERIC, f"integration failed: {exc}") from exc
    n = proto.n_levels
    cols = ["t"] + [f"{p}{k}" for k in range(1, n + 1) for p in ("re_c", "im_c")] + \
           [f"p{k}" for k in range(1, n + 1)]
    rows = ([fmt(t)] + [fmt(v) for c in psi for v in (c.real, c.imag)] + [fmt(p) for p in pop]
            for t, psi, pop in zip(res.times, res.states, res.populations))
    _write_csv(os.path.join(out, "propagation.csv"), _header("propagate", cfg), cols, rows)
    final = res.final_state
    _write_json(summary_path, "propagate", cfg, {
        "status": "ok",
        "initial_state": psi0,
        "final_populations": list(res.final_populations),
        "final_state": [[c.real, c.imag] for c in final],
        "adiabaticity_margin": res.adiabaticity_margin,
        "norm_drift": res.norm_drift,
        "n_steps": res.n_steps,
        "span": list(proto.span),
    })
    return EXIT_OK


def _boundary_rows(curves: dict):
    for name in sorted(curves):
        for seg, pts in enumerate(curves[name]):
            for x, y in pts:
                yield [name, str(seg), fmt(x), fmt(y)]


def cmd_sweep(cfg: dict) -> int:
    spec = cfgmod.build_sweep(cfg)
    workers = int(cfg["numerics"]["workers"])
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    result = efficiency_map(spec, workers=workers)
    out = _outdir(cfg)
    ap, as_ = spec.delta_p_axis, spec.delta_s_axis
    axes = [f"rows: delta_p = {','.join(fmt(x) for x in ap)}",
            f"cols: delta_s = {','.join(fmt(x) for x in as_)}",
            f"failed points carry {fmt(MISSING)}"]
    for k, grid in enumerate((result.p1, result.p2, result.p3), start=1):
        _write_csv(os.path.join(out, f"sweep_p{k}.csv"), _header("sweep", cfg, [f"grid: P{k}"] + axes),
                   [fmt(x) for x in as_], ([fmt(v) for v in row] for row in grid))
        if cfg["output"]["pgm"]:
            write_pgm(os.path.join(out, f"sweep_p{k}.pgm"), grid)
    predicted = np.zeros((len(ap), len(as_)), dtype=int)
    for i, dp in enumerate(ap):
        for j, ds in enumerate(as_):
            try:
                predicted[i, j] = region_prediction(dp, ds, spec.omega_max, spec.sequence, spec.initial_state,
                                                    stokes_max=spec.peak_s if spec.peak_s != spec.peak_p else None)
            except (DegenerateCaseError, ValueError):
                predicted[i, j] = 0
    _write_csv(os.path.join(out, "sweep_predicted.csv"),
               _header("sweep", cfg, ["grid: final state predicted by surface topology (0 = undefined)"] + axes),
               [fmt(x) for x in as_], ([str(v) for v in row] for row in predicted))
    warnings = boundary_warnings(spec.omega_max, ap, as_)
    _write_csv(os.path.join(out, "sweep_boundaries.csv"),
               _header("sweep", cfg, [f"omega_max: {fmt(spec.omega_max)}"] + [f"warning: {w}" for w in warnings]),
               ["curve", "segment", "delta_p", "delta_s"], _boundary_rows(result.boundaries))
    frac = result.failed_fraction
    _write_json(os.path.join(out, "sweep.json"), "sweep", cfg, {
        "spec": spec.to_dict(),
        "omega_max": spec.omega_max,
        "failed_fraction": frac,
        "failures": [list(f) for f in result.failures],
        "max_norm_drift": float(np.nanmax(result.norm_drift)) if np.isfinite(result.norm_drift).any() else None,
        "min_adiabaticity_margin": float(np.nanmin(result.margins)) if np.isfinite(result.margins).any() else None,
        "warnings": warnings,
    })
    if frac > SWEEP_FAILURE_LIMIT:
        raise _Exit(EXIT_NUMERIC, f"{len(result.failures)} of {result.p1.size} sweep points failed")
    return EXIT_OK


def cmd_boundaries(cfg: dict) -> int:
    omega_max, ap, as_ = cfgmod.boundary_window(cfg)
    warnings = boundary_warnings(omega_max, ap, as_)
    curves = boundary_curves(omega_max, ap, as_)
    out = _outdir(cfg)
    _write_csv(os.path.join(out, "boundaries.csv"),
               _header("boundaries", cfg, [f"omega_max: {fmt(omega_max)}"] + [f"warning: {w}" for w in warnings]),
               ["curve", "segment", "delta_p", "delta_s"], _boundary_rows(curves))
    return EXIT_OK


# --- argument handling ---------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="TOML configuration file")
    p.add_argument("--preset", default=S, choices=sorted(cfgmod.PRESETS), help="start from a named preset")
    p.add_argument("--out", default=S, help="output directory")
    p.add_argument("--workers", type=int, default=S, help="parallel sweep workers")
    p.add_argument("--tol", type=float, default=S, help="integrator tolerance")
    p.add_argument("--allow-degenerate", action="store_true", default=S,
                   help="compute surfaces even when zero-field energies coincide")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog=PROG, description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("surfaces", parents=[common], help="eigenvalue sheets on a Rabi-frequency grid")
    c = sub.add_parser("classify", parents=[common], help="print the topology case for a detuning pair")
    c.add_argument("--dp", type=float, help="pump one-photon detuning")
    c.add_argument("--ds", type=float, help="Stokes one-photon detuning")
    sub.add_parser("propagate", parents=[common], help="integrate one protocol")
    sub.add_parser("sweep", parents=[common], help="final populations over a detuning grid")
    b = sub.add_parser("boundaries", parents=[common], help="predicted region boundaries in the detuning plane")
    b.add_argument("--omega-max", type=float, help="peak Rabi frequency")
    for name in ("dp-min", "dp-max", "ds-min", "ds-max"):
        b.add_argument(f"--{name}", type=float)
    b.add_argument("--n", type=int, help="samples per axis")
    return parser


def _overrides(args) -> dict:
    over: dict = {}
    if hasattr(args, "out"):
        over.setdefault("output", {})["dir"] = args.out
    if hasattr(args, "workers"):
        over.setdefault("numerics", {})["workers"] = args.workers
    if hasattr(args, "tol"):
        over.setdefault("numerics", {})["tol"] = args.tol
    if args.command == "classify":
        for flag, key in (("dp", "delta_p"), ("ds", "delta_s")):
            if getattr(args, flag) is not None:
                over.setdefault("system", {})[key] = getattr(args, flag)
    return over


def _boundary_defaults(cfg: dict, args) -> dict:
    if args.omega_max is not None:
        cfg.setdefault("boundaries", {})["omega_max"] = args.omega_max
    w = cfg.get("boundaries", {}).get("omega_max")
    if w is None:
        raise ConfigError("boundaries needs omega_max (flag --omega-max or [boundaries] omega_max)")
    if not w > 0:
        raise ConfigError("omega_max must be positive")
    s = cfg.setdefault("sweep", {})
    for flag, key in (("dp_min", "delta_p_min"), ("dp_max", "delta_p_max"),
                      ("ds_min", "delta_s_min"), ("ds_max", "delta_s_max")):
        if getattr(args, flag) is not None:
            s[key] = getattr(args, flag)
        s.setdefault(key, (-1.2 if key.endswith("min") else 1.2) * w)
    for key in ("n_p", "n_s"):
        if args.n is not None:
            s[key] = args.n
        s.setdefault(key, 241)
    return cfgmod.resolve(cfg)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    allow = getattr(args, "allow_degenerate", False)
    try:
        cfg = cfgmod.load(getattr(args, "config", None), getattr(args, "preset", None), _overrides(args))
        if args.command == "surfaces":
            return cmd_surfaces(cfg, allow)
        if args.command == "classify":
            return cmd_classify(cfg)
        if args.command == "propagate":
            return cmd_propagate(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        return cmd_boundaries(_boundary_defaults(cfg, args))
    except ConfigError as exc:
        print(f"{PROG}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateCaseError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except _Exit as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return exc.code


def main(argv=None) -> None:
    sys.exit(run(argv))
