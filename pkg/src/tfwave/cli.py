"""Command-line interface: evaluate Mittag-Leffler curves, run forward
simulations, produce long-time reports, invert single-point observations,
and count sign changes across fractional orders.

Every run is reproducible from a single JSON config (flags override
config fields); outputs embed the config hash and package version.
Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
from jsonschema import Draft7Validator

from . import __version__
from .asymptotics import (InconclusiveSignError, detect_sign, fit_decay_rate,
                          leading_term, remainder_norm, sign_change_census)
from .eigensystem import (SpectralField, apply_inverse_A, dirichlet_laplacian_1d,
                          dnorm, evaluate_at, truncation_tail_bound)
from .fileio import read_observation_csv, standard_meta, write_csv, write_json
from .forward import (HomogeneousProblem, PointTrajectory, SeparatedSource,
                      observe, solution_at, solve_homogeneous,
                      solve_inhomogeneous)
from .inverse import deconvolve, duhamel_kernel
from .ml import MLAccuracyError, ml_vec
from .timegrid import TimeGrid


class ConfigError(ValueError):
    pass


_PROVIDER_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"const": "dirichlet_laplacian_1d"},
        "n_modes": {"type": "integer", "minimum": 1},
        "length": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["kind", "n_modes", "length"],
    "additionalProperties": False,
}

_GRID_SCHEMA = {
    "type": "object",
    "properties": {
        "T": {"type": "number", "exclusiveMinimum": 0},
        "nodes": {"type": "integer", "minimum": 8},
        "grading": {"enum": ["uniform", "graded"]},
        "grading_exponent": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["T", "nodes"],
    "additionalProperties": False,
}

_RHO_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["sin", "const", "samples"]},
        "amplitude": {"type": "number"},
        "frequency": {"type": "number"},
        "value": {"type": "number"},
        "values": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_COEFFS = {"type": "array", "items": {"type": "number"}, "minItems": 1}

_SCHEMAS = {
    "simulate": {
        "type": "object",
        "properties": {
            "alpha": {"type": "number", "exclusiveMinimum": 1, "maximum": 2},
            "provider": _PROVIDER_SCHEMA,
            "grid": _GRID_SCHEMA,
            "u0": _COEFFS,
            "u1": _COEFFS,
            "source": {
                "type": "object",
                "properties": {"rho": _RHO_SCHEMA, "f": _COEFFS},
                "required": ["rho", "f"],
                "additionalProperties": False,
            },
            "x0": {"type": "number"},
            "seed": {"type": "integer"},
        },
        "required": ["alpha", "provider", "grid"],
        "additionalProperties": False,
    },
    "asymptotics": {
        "type": "object",
        "properties": {
            "alpha": {"type": "number", "exclusiveMinimum": 1, "exclusiveMaximum": 2},
            "provider": _PROVIDER_SCHEMA,
            "u0": _COEFFS,
            "u1": _COEFFS,
            "x0": {"type": "number"},
            "window": {
                "type": "array", "items": {"type": "number"},
                "minItems": 2, "maxItems": 2,
            },
            "points": {"type": "integer", "minimum": 8},
            "norm_order": {"type": "number", "minimum": -1},
        },
        "required": ["alpha", "provider", "x0"],
        "additionalProperties": False,
    },
    "invert": {
        "type": "object",
        "properties": {
            "alpha": {"type": "number", "exclusiveMinimum": 1, "exclusiveMaximum": 2},
            "provider": _PROVIDER_SCHEMA,
            "grid": _GRID_SCHEMA,
            "f": _COEFFS,
            "x0": {"type": "number"},
            "observation_csv": {"type": "string"},
            "synthetic": {
                "type": "object",
                "properties": {
                    "rho": _RHO_SCHEMA,
                    "noise": {"type": "number", "minimum": 0},
                    "seed": {"type": "integer"},
                },
                "required": ["rho"],
                "additionalProperties": False,
            },
            "reg": {
                "type": "object",
                "properties": {
                    "mode": {"enum": ["exact", "fixed", "auto", "morozov"]},
                    "value": {"type": "number", "minimum": 0},
                    "tau": {"type": "number", "exclusiveMinimum": 0},
                },
                "required": ["mode"],
                "additionalProperties": False,
            },
        },
        "required": ["alpha", "provider", "f", "x0"],
        "additionalProperties": False,
    },
    "census": {
        "type": "object",
        "properties": {
            "alphas": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            "provider": _PROVIDER_SCHEMA,
            "u0": _COEFFS,
            "u1": _COEFFS,
            "x0": {"type": "number"},
            "T": {"type": "number", "exclusiveMinimum": 0},
            "nodes": {"type": "integer", "minimum": 16},
        },
        "required": ["alphas", "provider", "x0", "T"],
        "additionalProperties": False,
    },
}


def _validate(config: dict, command: str) -> None:
    errors = sorted(Draft7Validator(_SCHEMAS[command]).iter_errors(config),
                    key=lambda e: e.json_path)
    if errors:
        msgs = "; ".join(f"{e.json_path}: {e.message}" for e in errors)
        raise ConfigError(f"invalid {command} config: {msgs}")


def _load_config(args, command: str) -> dict:
    config: dict = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    if getattr(args, "alpha", None):
        config["alpha"] = args.alpha[0] if isinstance(args.alpha, list) else args.alpha
    if args.modes is not None:
        config.setdefault("provider", {"kind": "dirichlet_laplacian_1d",
                                       "length": math.pi})["n_modes"] = args.modes
    if args.grid_nodes is not None:
        config.setdefault("grid", {"T": 2.0})["nodes"] = args.grid_nodes
    if args.grid_grading is not None:
        config.setdefault("grid", {"T": 2.0, "nodes": 256})["grading"] = args.grid_grading
    if args.seed is not None:
        if command == "invert":
            config.setdefault("synthetic", {})["seed"] = args.seed
        else:
            config["seed"] = args.seed
    if args.noise is not None and command == "invert":
        config.setdefault("synthetic", {})["noise"] = args.noise
    _validate(config, command)
    return config


def _build_es(config: dict):
    p = config["provider"]
    return dirichlet_laplacian_1d(p["n_modes"], p["length"])


def _build_grid(config: dict) -> TimeGrid:
    g = config["grid"]
    if g.get("grading", "uniform") == "graded":
        return TimeGrid.graded(g["T"], g["nodes"], g.get("grading_exponent", 2.0))
    return TimeGrid.uniform(g["T"], g["nodes"])


def _field(coeffs, n: int) -> SpectralField:
    c = np.zeros(n)
    if coeffs is not None:
        if len(coeffs) > n:
            raise ConfigError(f"{len(coeffs)} coefficients exceed {n} modes")
        c[: len(coeffs)] = coeffs
    return SpectralField(c)


def _rho_samples(spec: dict, grid: TimeGrid) -> np.ndarray:
    t = grid.nodes
    kind = spec["kind"]
    if kind == "sin":
        return spec.get("amplitude", 1.0) * np.sin(spec.get("frequency", 1.0) * t)
    if kind == "const":
        return np.full_like(t, spec.get("value", 1.0))
    values = np.asarray(spec.get("values", []), dtype=float)
    if values.shape != t.shape:
        raise ConfigError(
            f"rho samples ({len(values)}) must match the grid nodes ({len(t)})"
        )
    return values


def _outdir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_ml_eval(args) -> int:
    out = _outdir(args)
    alphas = args.alpha or [1.1, 1.3, 1.5, 1.7, 1.9, 2.0]
    if args.z:
        beta = args.beta if args.beta is not None else 1.0
        for a in alphas:
            vals = ml_vec(a, beta, np.asarray(args.z, dtype=float))
            rows = list(zip(args.z, vals))
            cfg = {"alpha": a, "beta": beta, "z": list(args.z)}
            write_csv(out / f"ml_values_alpha{a:g}.csv", ["z", "ml"], rows,
                      standard_meta(cfg, "ml-eval"))
    else:
        t = np.linspace(0.0, args.t_max, args.num)
        for a in alphas:
            e1 = ml_vec(a, 1.0, -(t**a))
            e2 = t * ml_vec(a, 2.0, -(t**a))
            rows = list(zip(t, e1, e2))
            cfg = {"alpha": a, "t_max": args.t_max, "num": args.num}
            write_csv(out / f"ml_curves_alpha{a:g}.csv",
                      ["t", "ml_alpha_1", "t_ml_alpha_2"], rows,
                      standard_meta(cfg, "ml-eval"))
    return 0


def cmd_simulate(args) -> int:
    config = _load_config(args, "simulate")
    out = _outdir(args)
    es = _build_es(config)
    grid = _build_grid(config)
    alpha = config["alpha"]
    meta = standard_meta(config, "simulate")
    meta["provider"] = config["provider"]["kind"]
    meta["n_modes"] = es.n_modes
    meta["alpha"] = alpha
    meta["grid"] = json.dumps(grid.describe(), sort_keys=True)

    if "source" in config:
        if alpha >= 2.0:
            raise ConfigError("the source solver requires alpha strictly below 2")
        f = _field(config["source"]["f"], es.n_modes)
        rho = _rho_samples(config["source"]["rho"], grid)
        hist = solve_inhomogeneous(SeparatedSource(rho=rho, f=f, grid=grid),
                                   es, alpha, grid)
        meta["tail_bound"] = truncation_tail_bound(f, es)
    else:
        if "u0" not in config and "u1" not in config:
            raise ConfigError("simulate needs initial data (u0/u1) or a source")
        u0 = _field(config.get("u0"), es.n_modes)
        u1 = _field(config.get("u1"), es.n_modes)
        hist = solve_homogeneous(HomogeneousProblem(es, alpha, u0, u1), grid)
        meta["tail_bound"] = max(truncation_tail_bound(u0, es),
                                 truncation_tail_bound(u1, es))

    header = ["t"] + [f"coeff_{n}" for n in range(1, es.n_modes + 1)]
    rows = [[t, *hist.coeffs[k]] for k, t in enumerate(grid.nodes)]
    write_csv(out / "history.csv", header, rows, meta)
    if "x0" in config:
        traj = observe(hist, config["x0"], es)
        write_csv(out / "trajectory.csv", ["t", "value"],
                  list(zip(grid.nodes, traj.values)), meta)
    write_json(out / "meta.json", {"config": config}, meta)
    return 0


def cmd_asymptotics(args) -> int:
    config = _load_config(args, "asymptotics")
    out = _outdir(args)
    es = _build_es(config)
    alpha = config["alpha"]
    x0 = config["x0"]
    lo, hi = config.get("window", [1e2, 1e4])
    if not 0 < lo < hi:
        raise ConfigError("window must satisfy 0 < lo < hi")
    points = config.get("points", 60)
    s = config.get("norm_order", 1.0)
    u0 = _field(config.get("u0"), es.n_modes)
    u1 = _field(config.get("u1"), es.n_modes)
    problem = HomogeneousProblem(es, alpha, u0, u1)

    ts = np.logspace(math.log10(lo), math.log10(hi), points)
    norms = np.array([dnorm(solution_at(problem, t), s, es) for t in ts])
    rems = np.array([remainder_norm(problem, t, s) for t in ts])
    point_vals = np.array([evaluate_at(solution_at(problem, t), x0, es) for t in ts])

    a0 = evaluate_at(apply_inverse_A(u0, es), x0, es)
    a1 = evaluate_at(apply_inverse_A(u1, es), x0, es)
    grid = TimeGrid(np.concatenate([[0.0], ts]))
    traj = PointTrajectory(x0=x0, grid=grid,
                           values=np.concatenate([[0.0], point_vals]))
    report: dict = {"window": [lo, hi], "alpha": alpha, "norm_order": s}
    try:
        rep = detect_sign(traj, a0, a1)
        report.update({
            "sign_onset": rep.sign_onset,
            "stabilized_sign": rep.stabilized_sign,
            "sign_change_count": rep.sign_change_count,
            "predicted_sign": rep.predicted_sign,
            "sign_agrees": rep.sign_agrees,
        })
    except InconclusiveSignError as exc:
        report["sign_status"] = f"inconclusive: {exc}"
    try:
        report["fitted_norm_slope"] = fit_decay_rate(ts, norms, (lo, hi))
        report["fitted_remainder_slope"] = fit_decay_rate(ts, rems, (lo, hi))
    except ValueError as exc:
        report["fit_status"] = str(exc)
    j_star = 1 if np.any(u1.coeffs != 0.0) else 0
    denom = sum(
        dnorm(u, -1.0, es) * ts ** (j - 2.0 * alpha)
        for j, u in ((0, u0), (1, u1))
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(denom > 0, rems / np.where(denom > 0, denom, 1.0), np.nan)
    if np.any(np.isfinite(ratio)):
        report["empirical_constant"] = float(np.nanmax(ratio))
    report["expected_remainder_slope"] = j_star - 2.0 * alpha

    meta = standard_meta(config, "asymptotics")
    write_json(out / "report.json", report, meta)
    write_csv(out / "curves.csv", ["t", "norm", "remainder", "value_at_x0"],
              list(zip(ts, norms, rems, point_vals)), meta)
    return 0


def cmd_invert(args) -> int:
    config = _load_config(args, "invert")
    out = _outdir(args)
    es = _build_es(config)
    alpha = config["alpha"]
    x0 = config["x0"]
    f = _field(config["f"], es.n_modes)
    meta = standard_meta(config, "invert")

    noise_level = None
    rho_true = None
    if "observation_csv" in config:
        ts, vs = read_observation_csv(config["observation_csv"])
        grid = TimeGrid(ts)
        obs = PointTrajectory(x0=x0, grid=grid, values=vs)
    elif "synthetic" in config:
        if "grid" not in config:
            raise ConfigError("synthetic mode needs a grid")
        grid = _build_grid(config)
        rho_true = _rho_samples(config["synthetic"]["rho"], grid)
        hist = solve_inhomogeneous(SeparatedSource(rho=rho_true, f=f, grid=grid),
                                   es, alpha, grid)
        obs = observe(hist, x0, es)
        noise = config["synthetic"].get("noise", 0.0)
        if noise > 0.0:
            rng = np.random.default_rng(config["synthetic"].get("seed", 0))
            scale = float(np.max(np.abs(obs.values)))
            obs = PointTrajectory(
                x0=x0, grid=grid,
                values=obs.values + noise * scale * rng.uniform(-1.0, 1.0, len(obs.values)),
            )
            noise_level = noise * scale / math.sqrt(3.0)
        write_csv(out / "observation.csv", ["t", "value"],
                  list(zip(grid.nodes, obs.values)), meta)
    else:
        raise ConfigError("invert needs observation_csv or synthetic")

    kernel = duhamel_kernel(es, f, x0, grid, alpha)
    reg_cfg = config.get("reg", {"mode": "exact" if noise_level is None else "morozov"})
    mode = reg_cfg["mode"]
    if mode == "morozov":
        if noise_level is None and "value" not in reg_cfg:
            raise ConfigError("morozov needs synthetic noise or a noise value")
        result = deconvolve(kernel, obs,
                            noise_level=reg_cfg.get("value", noise_level),
                            tau=reg_cfg.get("tau", 1.0))
    elif mode == "exact":
        result = deconvolve(kernel, obs, reg_param=0.0)
    elif mode == "auto":
        result = deconvolve(kernel, obs, reg_param=None)
    else:
        result = deconvolve(kernel, obs, reg_param=reg_cfg.get("value", 0.0))

    payload = {
        "residual_l2": result.residual_l2,
        "reg_param": result.reg_param,
        "support_onset_estimate": result.support_onset_estimate,
        "kinv_nonzero_check": kernel.kinv_nonzero_check,
    }
    if rho_true is not None:
        num = np.linalg.norm(result.rho_hat - rho_true[1:])
        den = np.linalg.norm(rho_true[1:])
        payload["relative_l2_error"] = float(num / den) if den > 0 else None
    write_json(out / "result.json", payload, meta)
    write_csv(out / "rho.csv", ["t", "rho_hat"],
              list(zip(grid.nodes[1:], result.rho_hat)), meta)
    return 0


def cmd_census(args) -> int:
    config = _load_config(args, "census")
    out = _outdir(args)
    es = _build_es(config)
    u0 = _field(config.get("u0"), es.n_modes)
    u1 = _field(config.get("u1"), es.n_modes)
    rows = sign_change_census(config["alphas"], es, u0, u1, config["x0"],
                              config["T"], cells=config.get("nodes", 4096))
    meta = standard_meta(config, "census")
    write_csv(out / "census.csv", ["alpha", "sign_changes", "onset_estimate"],
              [[r["alpha"], r["sign_changes"], r["onset_estimate"]] for r in rows],
              meta)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tfwave",
        description="Time-fractional wave toolkit: forward runs, long-time "
                    "reports, and single-point source inversion.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config; flags override its fields")
        p.add_argument("--out", help="output directory (default: cwd)")
        p.add_argument("--alpha", type=float, action="append",
                       help="fractional order (repeatable for ml-eval)")
        p.add_argument("--modes", type=int, help="number of eigenmodes")
        p.add_argument("--grid-nodes", type=int, dest="grid_nodes")
        p.add_argument("--grid-grading", choices=["uniform", "graded"],
                       dest="grid_grading")
        p.add_argument("--seed", type=int)
        p.add_argument("--noise", type=float,
                       help="relative noise level for synthetic inversions")

    p_ml = sub.add_parser("ml-eval", help="tabulate E_{a,1}(-t^a) and t E_{a,2}(-t^a)")
    common(p_ml)
    p_ml.add_argument("--beta", type=float)
    p_ml.add_argument("--z", type=float, action="append",
                      help="explicit arguments instead of the t-range table")
    p_ml.add_argument("--t-max", type=float, default=50.0, dest="t_max")
    p_ml.add_argument("--num", type=int, default=501)
    p_ml.set_defaults(func=cmd_ml_eval)

    for name, fn in (("simulate", cmd_simulate), ("asymptotics", cmd_asymptotics),
                     ("invert", cmd_invert), ("census", cmd_census)):
        p = sub.add_parser(name)
        common(p)
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (MLAccuracyError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
