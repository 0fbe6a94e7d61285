"""Batch front end.

Subcommands:
  run       execute a config file or named preset, emit solution CSVs
  converge  particle-count error study, emit a report CSV
  compare   L^p differences between CSV fields
  presets   list the built-in benchmark setups

Config files are YAML.  Exit codes: 0 success, 2 configuration error,
3 runtime failure.  Environment overrides: RELMC_OUTPUT_DIR (output
directory), RELMC_WORKERS (worker threads for study replications).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np
import yaml

from . import __version__
from .analysis import lp_error
from .errors import ConfigError, RelmcError
from .io import read_csv, write_csv, write_error_report, write_result
from .models import burgers, lwr
from .presets import PRESETS, preset_names, run_preset
from .studies import scalar_error_study

__all__ = ["main"]

_SCALAR_MODELS = {"burgers": burgers, "lwr": lwr}


def _load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return cfg


def _positive(cfg: dict, key: str, kind=float):
    if key not in cfg:
        return None
    try:
        value = kind(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{key}': expected {kind.__name__}") from exc
    if value <= 0:
        raise ConfigError(f"field '{key}': must be positive, got {value}")
    return value


def _epsilon_of(cfg: dict):
    eps = cfg.get("epsilon", "zero")
    if eps in ("zero", "limit", None):
        return None
    eps = float(eps)
    if eps <= 0:
        raise ConfigError(f"field 'epsilon': must be positive or 'zero', got {eps}")
    return eps


def _validate_subcharacteristic(preset, cfg: dict):
    p = PRESETS[preset]
    if p.kind != "scalar":
        return
    x = np.linspace(p.domain[0], p.domain[1], 10001)
    smax = p.scalar_model.max_char_speed(np.asarray(p.scalar_u0(x)))
    a = min(p.speeds)
    if smax >= a:
        raise ConfigError(
            f"preset '{preset}': max |F'(u0)| = {smax} violates the "
            f"subcharacteristic condition for a = {a}"
        )


def _out_dir(cfg: dict, args) -> str:
    return (
        getattr(args, "out", None)
        or cfg.get("output_dir")
        or os.environ.get("RELMC_OUTPUT_DIR")
        or "."
    )


def _cmd_run(args) -> int:
    cfg = _load_config(args.config) if args.config else {}
    if args.preset:
        cfg["preset"] = args.preset
    if args.seed is not None:
        cfg["seed"] = args.seed
    preset = cfg.get("preset")
    if not preset:
        raise ConfigError("field 'preset': required (see 'relmc presets')")
    if preset not in PRESETS:
        raise ConfigError(f"field 'preset': unknown {preset!r}; see 'relmc presets'")
    _validate_subcharacteristic(preset, cfg)

    seed = int(cfg.get("seed", 0))
    result = run_preset(
        preset,
        method=cfg.get("method"),
        seed=seed,
        n=_positive(cfg, "n", int),
        m=_positive(cfg, "m", int),
        dt=_positive(cfg, "dt"),
        t_final=_positive(cfg, "t_final"),
        epsilon=_epsilon_of(cfg),
        snapshot_times=cfg.get("snapshot_times"),
    )
    out = _out_dir(cfg, args)
    label = cfg.get("label", preset)
    names = PRESETS[preset].component_names
    result.params["package_version"] = __version__
    result.params["preset"] = preset
    for t in sorted(result.snapshots):
        suffix = "" if len(result.snapshots) == 1 else f"_t{t:g}"
        write_result(
            os.path.join(out, f"{label}{suffix}_solution.csv"),
            result,
            component_names=names[: result.snapshots[t].shape[0]],
            time=t,
        )
    diag = {
        k: np.asarray(v).ravel()
        for k, v in result.diagnostics.items()
        if np.asarray(v).size > 0
    }
    if diag:
        width = max(v.size for v in diag.values())
        padded = {
            k: np.pad(v.astype(float), (0, width - v.size), constant_values=np.nan)
            for k, v in diag.items()
        }
        write_csv(
            os.path.join(out, f"{label}_diagnostics.csv"), padded, result.params
        )
    print(f"wrote {label} artifacts to {out}")
    return 0


def _cmd_converge(args) -> int:
    cfg = _load_config(args.config)
    ns = cfg.get("ns")
    if not ns:
        raise ConfigError("field 'ns': non-empty list of particle counts required")
    ns = [int(v) for v in ns]

    model_name = cfg.get("model")
    preset = cfg.get("preset")
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"field 'preset': unknown {preset!r}")
        p = PRESETS[preset]
        if p.kind != "scalar":
            raise ConfigError("convergence studies support scalar presets only")
        model, u0, domain = p.scalar_model, p.scalar_u0, p.domain
        a = p.speeds[0]
        dt, t_final = p.dt, p.t_final
    elif model_name:
        if model_name not in _SCALAR_MODELS:
            raise ConfigError(f"field 'model': unknown {model_name!r}")
        model = _SCALAR_MODELS[model_name]()
        u0 = _build_u0(cfg.get("u0"))
        domain = tuple(cfg["domain"])
        a = float(cfg["a"])
        dt = float(cfg["dt"])
        t_final = float(cfg["t_final"])
    else:
        raise ConfigError("either 'preset' or 'model' is required")
    dt = _positive(cfg, "dt") or dt
    t_final = _positive(cfg, "t_final") or t_final

    workers = int(os.environ.get("RELMC_WORKERS", cfg.get("workers", 1)))
    report = scalar_error_study(
        model,
        u0,
        domain,
        a=float(cfg.get("a", a)),
        dt=dt,
        t_final=t_final,
        ns=ns,
        methods=tuple(cfg.get("methods", ("mc", "mc_opt", "gbmc"))),
        runs=int(cfg.get("runs", 5)),
        m_fixed=int(cfg.get("m_fixed", 100)),
        c1=float(cfg.get("c1", 1.0)),
        m_ref=int(cfg.get("m_ref", 2000)),
        p=float(cfg.get("p", 2.0)),
        seed=int(cfg.get("seed", 0)),
        workers=workers,
    )
    out = _out_dir(cfg, args)
    label = cfg.get("label", "convergence")
    path = os.path.join(out, f"{label}_report.csv")
    write_error_report(path, report, {"package_version": __version__})
    for method, slope in report.slopes.items():
        print(f"{method}: slope {slope:.3f}")
    print(f"wrote {path}")
    return 0


def _build_u0(spec):
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError("field 'u0': mapping with a 'type' key required")
    kind = spec["type"]
    if kind == "gaussian":
        mean = float(spec.get("mean", 0.0))
        std = float(spec.get("std", 1.0))
        return lambda x: np.exp(-0.5 * ((np.asarray(x) - mean) / std) ** 2) / (
            std * np.sqrt(2 * np.pi)
        )
    if kind == "sin":
        return lambda x: np.sin(np.asarray(x, dtype=float))
    if kind == "pieces":
        pieces = spec.get("pieces")
        if not pieces:
            raise ConfigError("field 'u0.pieces': non-empty list required")

        def u0(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            for lo, hi, val in pieces:
                out[(x >= lo) & (x <= hi)] = val
            return out

        return u0
    raise ConfigError(f"field 'u0.type': unknown {kind!r}")


def _read_field(path):
    columns, meta = read_csv(path)
    if "x" not in columns:
        raise ConfigError(f"{path}: missing 'x' column")
    names = [k for k in columns if k != "x"]
    return columns["x"], np.stack([columns[k] for k in names]), names


def _cmd_compare(args) -> int:
    xa, fa, names_a = _read_field(args.run_a)
    xb, fb, names_b = _read_field(args.run_b)
    if fa.shape[0] != fb.shape[0]:
        raise ConfigError("component counts differ between the two runs")

    def align(x_from, f_from, x_to):
        if x_from.shape == x_to.shape and np.allclose(x_from, x_to):
            return f_from
        if not args.interp:
            raise ConfigError("grids differ; pass --interp to interpolate")
        return np.stack([np.interp(x_to, x_from, comp) for comp in f_from])

    if args.reference:
        xr, fr, _ = _read_field(args.reference)
        fa_r = align(xa, fa, xr)
        fb_r = align(xb, fb, xr)
        for k, name in enumerate(names_a):
            ea = lp_error(fa_r[k], fr[k], p=args.p)
            eb = lp_error(fb_r[k], fr[k], p=args.p)
            print(f"{name}: errors {ea:.6e} (A) {eb:.6e} (B), ratio {ea / eb:.3f}")
    else:
        fb_a = align(xb, fb, xa)
        for k, name in enumerate(names_a):
            diff = np.abs(fa[k] - fb_a[k])
            loc = xa[int(np.argmax(diff))]
            print(
                f"{name}: L{args.p:g} rel diff "
                f"{lp_error(fa[k], fb_a[k], p=args.p):.6e}, "
                f"max |diff| {diff.max():.6e} at x = {loc:.6g}"
            )
    return 0


def _cmd_presets(_args) -> int:
    width = max(len(n) for n in preset_names())
    for name in preset_names():
        p = PRESETS[name]
        print(f"{name:<{width}}  [{p.method}]  {p.description}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relmc", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a run config or preset")
    run.add_argument("config", nargs="?", help="YAML config file")
    run.add_argument("--preset", help="preset name (overrides config)")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", help="output directory")
    run.set_defaults(fn=_cmd_run)

    conv = sub.add_parser("converge", help="particle-count error study")
    conv.add_argument("config", help="YAML study config")
    conv.add_argument("--out", help="output directory")
    conv.set_defaults(fn=_cmd_converge)

    cmp_ = sub.add_parser("compare", help="L^p differences between CSV fields")
    cmp_.add_argument("run_a")
    cmp_.add_argument("run_b")
    cmp_.add_argument("--reference", help="reference CSV; errors of A and B against it")
    cmp_.add_argument("-p", type=float, default=2.0)
    cmp_.add_argument("--interp", action="store_true", help="interpolate mismatched grids")
    cmp_.set_defaults(fn=_cmd_compare)

    pres = sub.add_parser("presets", help="list built-in setups")
    pres.set_defaults(fn=_cmd_presets)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RelmcError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
