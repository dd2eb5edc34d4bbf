"""Command-line front end: run experiments, check well-balancing, and run
convergence studies, emitting CSV files plus a re-runnable manifest.

Config files are flat `key = value` text (UTF-8, `#` comments).  Every
number needed to reproduce a run appears in the emitted manifest, which is
itself a valid config file.  Velocities in configs are physical; they are
converted to the evolved variable of the chosen model when the run is
built, and the conversion is echoed in the manifest comments.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .model import DomainError, Geometry, ModelKind, ModelSpec
from .schemes import NumericalError, Scheme
from .solver import (
    BumpedInitial,
    ExplicitInitial,
    RunConfig,
    SteadyInitial,
    SteadyShockInitial,
    compute_dt,
    l1_error,
    run,
)
from .presets import CFL, PRESETS
from .schemes import Grid, State, STEPPERS
from .solver import apply_boundary, make_edge_data

__all__ = ["ConfigError", "build_run", "entry", "main", "parse_config"]

_FMT = "%.17g"

_MODEL_KINDS = {k.value: k for k in ModelKind}

_INITIAL_KINDS = (
    "steady",
    "steady-shock",
    "perturbed-steady",
    "perturbed-steady-shock",
    "explicit",
)

# keys allowed in config files / manifests, with their parsers
_KEY_PARSERS = {
    "model": str,
    "eps": float,
    "mass": float,
    "r_max": float,
    "scheme": str,
    "cells": int,
    "cfl": float,
    "t_end": float,
    "snapshot_dt": float,
    "snapshot_steps": int,
    "initial": str,
    "edge_velocity": float,
    "left_velocity": float,
    "right_velocity": float,
    "shock_radius": float,
    "bump_center": float,
    "bump_width": float,
    "bump_amplitude": float,
    "bump_rel_amplitude": float,
    "values": lambda s: tuple(float(x) for x in s.replace(",", " ").split()),
}


class ConfigError(ValueError):
    pass


def parse_config(text: str) -> dict:
    """Parse the flat key = value grammar into a parameter dict."""
    params: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEY_PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            params[key] = _KEY_PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return params


def _require(params: dict, *keys: str):
    missing = [k for k in keys if k not in params]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")


def build_run(params: dict) -> tuple[RunConfig, dict]:
    """Build a RunConfig from flat parameters.

    Returns the config plus the fully resolved parameter set (relative bump
    amplitudes made absolute, defaults filled in) that reproduces the run.
    """
    _require(params, "model", "scheme", "cells", "t_end")
    model_name = params["model"]
    if model_name not in _MODEL_KINDS:
        raise ConfigError(f"unknown model {model_name!r}; choose from {sorted(_MODEL_KINDS)}")
    kind = _MODEL_KINDS[model_name]
    eps = float(params.get("eps", 0.0 if kind is ModelKind.FLAT_CLASSICAL else 1.0))
    mass = float(params.get("mass", 0.0))
    r_max = float(params.get("r_max", 1.0))
    try:
        spec = ModelSpec(kind, eps, Geometry(mass, r_max))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc

    scheme = params["scheme"]
    if scheme not in Scheme.ALL:
        raise ConfigError(f"unknown scheme {scheme!r}; choose from {Scheme.ALL}")
    cfl = float(params.get("cfl", CFL[scheme]))

    initial_kind = params.get("initial", "steady")
    if initial_kind not in _INITIAL_KINDS:
        raise ConfigError(f"unknown initial {initial_kind!r}; choose from {_INITIAL_KINDS}")

    resolved = {
        "model": model_name,
        "eps": eps,
        "mass": mass,
        "r_max": r_max,
        "scheme": scheme,
        "cells": int(params["cells"]),
        "cfl": cfl,
        "t_end": float(params["t_end"]),
        "initial": initial_kind,
    }
    if "snapshot_steps" in params:
        resolved["snapshot_steps"] = int(params["snapshot_steps"])
    else:
        resolved["snapshot_dt"] = float(params.get("snapshot_dt", float(params["t_end"]) / 10.0 or 1.0))

    notes: dict = {}

    def evolved(v: float, label: str) -> float:
        u = float(spec.from_velocity(v))
        if u != v:
            notes[f"{label}_evolved"] = u
        return u

    try:
        if initial_kind == "steady":
            _require(params, "edge_velocity")
            resolved["edge_velocity"] = float(params["edge_velocity"])
            initial = SteadyInitial(evolved(resolved["edge_velocity"], "edge"))
        elif initial_kind == "steady-shock":
            _require(params, "left_velocity", "right_velocity", "shock_radius")
            resolved["left_velocity"] = float(params["left_velocity"])
            resolved["right_velocity"] = float(params["right_velocity"])
            resolved["shock_radius"] = float(params["shock_radius"])
            initial = SteadyShockInitial(
                evolved(resolved["left_velocity"], "left"),
                evolved(resolved["right_velocity"], "right"),
                resolved["shock_radius"],
            )
        elif initial_kind in ("perturbed-steady", "perturbed-steady-shock"):
            _require(params, "bump_center", "bump_width")
            if initial_kind == "perturbed-steady":
                _require(params, "edge_velocity")
                resolved["edge_velocity"] = float(params["edge_velocity"])
                base = SteadyInitial(evolved(resolved["edge_velocity"], "edge"))
            else:
                # stationary pair: opposite branches of one steady invariant
                _require(params, "edge_velocity", "shock_radius")
                resolved["edge_velocity"] = float(params["edge_velocity"])
                resolved["shock_radius"] = float(params["shock_radius"])
                u_edge = evolved(resolved["edge_velocity"], "edge")
                base = SteadyShockInitial(u_edge, -u_edge, resolved["shock_radius"])
            center = float(params["bump_center"])
            width = float(params["bump_width"])
            if "bump_amplitude" in params:
                amplitude = float(params["bump_amplitude"])
            elif "bump_rel_amplitude" in params:
                rel = float(params["bump_rel_amplitude"])
                amplitude = rel * _base_value_at(spec, resolved, base, center)
                notes["bump_rel_amplitude"] = rel
            else:
                raise ConfigError("perturbed initial data needs bump_amplitude or bump_rel_amplitude")
            resolved["bump_center"] = center
            resolved["bump_width"] = width
            resolved["bump_amplitude"] = amplitude
            initial = BumpedInitial(base, center, width, amplitude)
        else:  # explicit
            _require(params, "values")
            vals = tuple(float(x) for x in params["values"])
            if len(vals) != int(params["cells"]):
                raise ConfigError("explicit values length must equal cells")
            resolved["values"] = vals
            initial = ExplicitInitial(vals)

        config = RunConfig(
            spec=spec,
            scheme=scheme,
            n_cells=int(params["cells"]),
            cfl=cfl,
            t_end=float(params["t_end"]),
            initial=initial,
            snapshot_dt=resolved.get("snapshot_dt"),
            snapshot_steps=resolved.get("snapshot_steps"),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    resolved["_notes"] = notes
    return config, resolved


def _base_value_at(spec: ModelSpec, resolved: dict, base, r: float) -> float:
    """Evolved-variable value of the unperturbed profile at radius r."""
    if isinstance(base, SteadyShockInitial):
        edge = base.u_left_edge if r < base.r_jump else base.u_right_edge
        k = float(spec.k_invariant(spec.geometry.r_max, edge))
        return float(spec.steady_value(k, float(np.sign(edge)), r))
    k = float(spec.k_invariant(spec.geometry.r_max, base.u_edge))
    return float(spec.steady_value(k, float(np.sign(base.u_edge)), r))


# ---------------------------------------------------------------------------
# output files

def _manifest_lines(resolved: dict) -> list[str]:
    lines = []
    for key in _KEY_PARSERS:
        if key in resolved:
            val = resolved[key]
            if key == "values":
                lines.append(f"{key} = {', '.join(_FMT % v for v in val)}")
            elif isinstance(val, float):
                lines.append(f"{key} = {_FMT % val}")
            else:
                lines.append(f"{key} = {val}")
    for key, val in resolved.get("_notes", {}).items():
        lines.append(f"# note: {key} = {_FMT % val}")
    return lines


def _manifest_inline(resolved: dict) -> str:
    parts = []
    for line in _manifest_lines(resolved):
        if line.startswith("#"):
            continue
        parts.append(line.replace(" = ", "="))
    return ";".join(parts)


def write_outputs(out_dir: Path, spec: ModelSpec, grid: Grid, snapshots, resolved: dict,
                  status: str = "ok") -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = _manifest_inline(resolved)
    with open(out_dir / "snapshots.csv", "w", newline="\n") as fh:
        fh.write(f"# manifest: {manifest}\n")
        fh.write("t,j,r_center,u,v_physical,K_invariant\n")
        for snap in snapshots:
            v = spec.to_velocity(snap.u)
            for j in range(grid.n_cells):
                fh.write(
                    f"{_FMT % snap.t},{j},{_FMT % grid.centers[j]},"
                    f"{_FMT % snap.u[j]},{_FMT % v[j]},{_FMT % snap.k_field[j]}\n"
                )
    with open(out_dir / "diagnostics.csv", "w", newline="\n") as fh:
        fh.write("t,total_mass,total_variation,l1_to_reference,dt\n")
        for snap in snapshots:
            fh.write(
                f"{_FMT % snap.t},{_FMT % snap.total_mass},{_FMT % snap.total_variation},"
                f"{_FMT % snap.l1_to_reference},{_FMT % snap.dt}\n"
            )
    with open(out_dir / "run_manifest.txt", "w", newline="\n") as fh:
        for line in _manifest_lines(resolved):
            fh.write(line + "\n")
        fh.write(f"# status: {status}\n")


# ---------------------------------------------------------------------------
# subcommands

def cmd_run(args) -> int:
    if bool(args.preset) == bool(args.config):
        print("error: provide exactly one of --preset or --config", file=sys.stderr)
        return 2
    out_root = Path(args.out)

    if args.config:
        try:
            params = parse_config(Path(args.config).read_text())
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
        legs = [(None, params)]
    else:
        if args.preset not in PRESETS:
            names = ", ".join(sorted(PRESETS))
            print(f"error: unknown preset {args.preset!r}; valid presets: {names}", file=sys.stderr)
            return 2
        preset = dict(PRESETS[args.preset])
        preset.pop("description", None)
        schemes = preset.pop("schemes")
        if args.scheme:
            schemes = (args.scheme,)
        legs = []
        for scheme in schemes:
            params = dict(preset)
            params["scheme"] = scheme
            params["cfl"] = CFL[scheme]
            legs.append((scheme, params))

    failures = []
    for leg_name, params in legs:
        if args.scheme:
            params["scheme"] = args.scheme
            params.setdefault("cfl", CFL[args.scheme])
        if args.cells:
            params["cells"] = args.cells
        if args.cfl:
            params["cfl"] = args.cfl
        if args.t_end is not None:
            params["t_end"] = args.t_end
        try:
            config, resolved = build_run(params)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        out_dir = out_root / leg_name if leg_name else out_root
        grid = config.grid()
        try:
            snapshots = run(config)
            status = "ok"
        except NumericalError as exc:
            snapshots = getattr(exc, "snapshots", [])
            status = f"failed: {exc}"
            failures.append((leg_name or "run", exc))
        write_outputs(out_dir, config.spec, grid, snapshots, resolved, status=status)
        label = leg_name or params["scheme"]
        print(f"[{label}] {status}; {len(snapshots)} snapshots -> {out_dir}")
    if failures:
        for name, exc in failures:
            print(f"error: numerical failure in {name}: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_wb_check(args) -> int:
    name = args.model
    if name not in ("geom-relativistic", "geom-pressureless"):
        print("error: wb-check needs a geometric model", file=sys.stderr)
        return 2
    kind = _MODEL_KINDS[name]
    spec = ModelSpec(kind, args.eps, Geometry(args.mass, args.r_max))
    grid = Grid(spec.geometry.r_min, spec.geometry.r_max, args.cells)
    # CLI takes the steady constant K; the pressureless invariant is K^2
    k = args.k * args.k if kind is ModelKind.GEOM_PRESSURELESS else args.k
    try:
        u_edge = float(spec.steady_value(k, float(args.sign), spec.geometry.r_max))
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    initial = SteadyInitial(u_edge)
    u0 = initial.sample(spec, grid)
    boundary = apply_boundary(spec, grid, make_edge_data(spec, grid, initial, u0))

    wb2_total = None
    print(f"well-balance check: {name}, K={args.k}, sign={args.sign:+.0f}, "
          f"{args.cells} cells, {args.steps} steps")
    for scheme in Scheme.ALL:
        step = STEPPERS[scheme]
        state = State(u0.copy(), 0.0)
        per_step = 0.0
        status = "ok"
        done = 0
        try:
            for _ in range(args.steps):
                dt = compute_dt(spec, grid, state, CFL[scheme])
                result = step(spec, grid, state, dt, boundary)
                per_step = max(per_step, float(np.max(np.abs(result.state.u - state.u))))
                state = result.state
                done += 1
        except NumericalError as exc:
            status = f"failed after {done} steps: {exc}"
        total = float(np.max(np.abs(state.u - u0)))
        if scheme == Scheme.WB2:
            wb2_total = total
        print(f"  {scheme}: max per-step drift {per_step:.3e}, total drift {total:.3e}  [{status}]")
    if wb2_total is None or wb2_total > 1e-10:
        print(f"error: wb2 drift {wb2_total:.3e} exceeds 1e-10", file=sys.stderr)
        return 1
    return 0


def _smooth_ramp(x, a=0.2, b=0.8, x0=0.15, x1=0.55):
    s = np.clip((x - x0) / (x1 - x0), 0.0, 1.0)
    return a + (b - a) * (10.0 * s**3 - 15.0 * s**4 + 6.0 * s**5)


def _trace_characteristics(spec: ModelSpec, t: float, x: np.ndarray) -> np.ndarray:
    """Exact smooth solution u(t, x) for flat models with the ramp datum,
    by bisecting the characteristic relation xi + t*speed(u0(xi)) = x."""
    lo = x - t * float(spec.char_speed(0.0, 0.8)) - 1e-9
    hi = x - t * float(spec.char_speed(0.0, 0.2)) + 1e-9
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g = mid + t * spec.char_speed(mid, _smooth_ramp(mid)) - x
        lo = np.where(g < 0.0, mid, lo)
        hi = np.where(g < 0.0, hi, mid)
        if float(np.max(hi - lo)) < 1e-14:
            break
    return _smooth_ramp(0.5 * (lo + hi))


def convergence_table(model: str, scheme: str, levels: int = 4, base_cells: int = 64,
                      k: float = 0.9, t_end: float | None = None) -> list[tuple]:
    """(dr, l1_error, order) rows; order is n/a (nan) on the first row."""
    kind = _MODEL_KINDS[model]
    rows = []
    prev = None
    for lvl in range(levels):
        n = base_cells * 2**lvl
        if kind in (ModelKind.FLAT_CLASSICAL, ModelKind.FLAT_RELATIVISTIC):
            eps = 0.0 if kind is ModelKind.FLAT_CLASSICAL else 1.0
            spec = ModelSpec(kind, eps, Geometry(0.0, 1.0))
            tf = 0.4 if t_end is None else t_end
            grid = Grid(0.0, 1.0, n)
            initial = ExplicitInitial(tuple(_smooth_ramp(grid.centers)))
            config = RunConfig(spec=spec, scheme=scheme, n_cells=n, cfl=CFL[scheme],
                               t_end=tf, initial=initial, snapshot_dt=tf)
            snaps = run(config)
            err = l1_error(grid, snaps[-1].u, _trace_characteristics(spec, tf, grid.centers))
        else:
            spec = ModelSpec(kind, 1.0, Geometry(0.05, 1.0))
            tf = 1.0 if t_end is None else t_end
            kk = k * k if kind is ModelKind.GEOM_PRESSURELESS else k
            initial = SteadyInitial(float(spec.steady_value(kk, 1.0, 1.0)))
            config = RunConfig(spec=spec, scheme=scheme, n_cells=n, cfl=CFL[scheme],
                               t_end=tf, initial=initial, snapshot_dt=tf)
            grid = config.grid()
            snaps = run(config)
            err = l1_error(grid, snaps[-1].u, initial.sample(spec, grid))
        dr = (1.0 - spec.geometry.r_min) / n
        order = math.log2(prev / err) if (prev is not None and err > 0.0) else float("nan")
        rows.append((dr, err, order))
        prev = err
    return rows


def cmd_convergence(args) -> int:
    if args.model not in _MODEL_KINDS:
        print(f"error: unknown model {args.model!r}", file=sys.stderr)
        return 2
    if args.scheme not in Scheme.ALL:
        print(f"error: unknown scheme {args.scheme!r}", file=sys.stderr)
        return 2
    if args.levels < 3:
        print("error: need at least 3 refinement levels", file=sys.stderr)
        return 2
    try:
        rows = convergence_table(args.model, args.scheme, args.levels, args.base_cells)
    except NumericalError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 3
    lines = ["dr,l1_error,order"]
    for dr, err, order in rows:
        order_txt = "n/a" if (math.isnan(order) or err < 1e-13) else f"{order:.3f}"
        lines.append(f"{_FMT % dr},{_FMT % err},{order_txt}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    print(text, end="")
    return 0


def cmd_presets(_args) -> int:
    for name, preset in PRESETS.items():
        print(f"{name}: {preset['description']}")
        keys = ", ".join(
            f"{k}={v}" for k, v in preset.items() if k not in ("description", "schemes")
        )
        print(f"    schemes={','.join(preset['schemes'])}; {keys}")
    return 0


# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="curved-burgers",
        description="Finite-volume runs of Burgers-type flows on flat and "
                    "Schwarzschild backgrounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a preset or a config file")
    p_run.add_argument("--preset")
    p_run.add_argument("--config")
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--scheme", choices=Scheme.ALL)
    p_run.add_argument("--cells", type=int)
    p_run.add_argument("--cfl", type=float)
    p_run.add_argument("--t-end", dest="t_end", type=float)
    p_run.set_defaults(func=cmd_run)

    p_wb = sub.add_parser("wb-check", help="steady-state drift of all three schemes")
    p_wb.add_argument("--model", required=True)
    p_wb.add_argument("--k", type=float, default=0.9)
    p_wb.add_argument("--sign", type=float, default=1.0)
    p_wb.add_argument("--cells", type=int, default=64)
    p_wb.add_argument("--steps", type=int, default=1000)
    p_wb.add_argument("--eps", type=float, default=1.0)
    p_wb.add_argument("--mass", type=float, default=0.05)
    p_wb.add_argument("--r-max", dest="r_max", type=float, default=1.0)
    p_wb.set_defaults(func=cmd_wb_check)

    p_cv = sub.add_parser("convergence", help="refinement study with oracle errors")
    p_cv.add_argument("--model", required=True)
    p_cv.add_argument("--scheme", required=True)
    p_cv.add_argument("--levels", type=int, default=4)
    p_cv.add_argument("--base-cells", dest="base_cells", type=int, default=64)
    p_cv.add_argument("--out")
    p_cv.set_defaults(func=cmd_convergence)

    p_ls = sub.add_parser("presets", help="list experiment presets")
    p_ls.set_defaults(func=cmd_presets)

    args = parser.parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
