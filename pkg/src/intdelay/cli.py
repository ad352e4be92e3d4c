"""Command-line front end: ``intdelay {check,band,roots,oracle}``.

Config files are JSON::

    {"system": {"n": 1, "n0": 1, "h": 0.5, "N": 2,
                "b_upper": [[[-30, 30]]], "b_lower": [[[-30, 30]]]},
     "tolerances": {"tol_circle": 1e-6, "tol_cluster": 1e-4,
                    "tol_coeff": 1e-12, "tol_v": 1e-9},
     "grid_points": 4096, "cluster": true, "seed": 0}

Coefficient tensors are ``[row][col][knot]``.  Exit codes: 0 robust
stable, 1 unstable, 2 inconclusive, 3 invalid input, 4 analysis error,
5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Sequence, TextIO

import numpy as np

from .cutoff_check import VerdictKind
from .encirclement import TOL_V, PipelineOptions, PipelineResult, base_values, full_pipeline
from .errors import IntDelayError, ParseError, ValidationError
from .freq_transform import build_frequency_model
from .inclusion_band import band_arrays
from .kernel_model import SplineKernelBounds, validate
from .trig_roots import TOL_CIRCLE, TOL_CLUSTER, TOL_COEFF, f_coefficients, roots_in_0_pi

SYSTEM_KEYS = ("n", "n0", "h", "N", "b_upper", "b_lower")
TOP_KEYS = ("system", "tolerances", "grid_points", "cluster", "seed", "output_format")
EXIT_CODES = {
    VerdictKind.ROBUST_STABLE: 0,
    VerdictKind.UNSTABLE: 1,
    VerdictKind.INCONCLUSIVE: 2,
}
EXIT_INVALID, EXIT_ANALYSIS, EXIT_IO = 3, 4, 5


@dataclass(frozen=True)
class Tolerances:
    tol_circle: float = TOL_CIRCLE
    tol_cluster: float = TOL_CLUSTER
    tol_coeff: float = TOL_COEFF
    tol_v: float = TOL_V


@dataclass(frozen=True)
class RunConfig:
    system: SplineKernelBounds
    grid_points: int = 4096
    tolerances: Tolerances = field(default_factory=Tolerances)
    cluster: bool = True
    seed: int = 0
    output_format: str = "text"

    def options(self) -> PipelineOptions:
        t = self.tolerances
        return PipelineOptions(
            grid_points=self.grid_points,
            tol_circle=t.tol_circle,
            tol_cluster=t.tol_cluster,
            tol_coeff=t.tol_coeff,
            tol_v=t.tol_v,
            cluster=self.cluster,
        )


def _check_type(value: Any, kind: type, where: str) -> Any:
    ok = isinstance(value, kind) and not (kind is not bool and isinstance(value, bool))
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    if not ok:
        raise ParseError(f"{where}: expected {kind.__name__}, got {value!r}")
    return value


def config_from_mapping(raw: Mapping[str, Any], source: str = "<config>") -> RunConfig:
    if not isinstance(raw, Mapping):
        raise ParseError(f"{source}: top level must be an object")
    unknown = sorted(set(raw) - set(TOP_KEYS))
    if unknown:
        raise ParseError(f"{source}: unknown key(s) {', '.join(unknown)}")
    if "system" not in raw:
        raise ParseError(f"{source}: missing field 'system'")
    sysraw = raw["system"]
    if not isinstance(sysraw, Mapping):
        raise ParseError(f"{source}: 'system' must be an object")
    extra = sorted(set(sysraw) - set(SYSTEM_KEYS))
    if extra:
        raise ParseError(f"{source}: unknown key(s) in system: {', '.join(extra)}")
    missing = [k for k in SYSTEM_KEYS if k not in sysraw]
    if missing:
        raise ParseError(f"{source}: system is missing field(s) {', '.join(missing)}")
    system = validate(sysraw)

    tol_raw = raw.get("tolerances", {})
    if not isinstance(tol_raw, Mapping):
        raise ParseError(f"{source}: 'tolerances' must be an object")
    bad = sorted(set(tol_raw) - set(Tolerances.__dataclass_fields__))
    if bad:
        raise ParseError(f"{source}: unknown tolerance(s) {', '.join(bad)}")
    tols = Tolerances(**{k: float(_check_type(v, float, f"tolerances.{k}")) for k, v in tol_raw.items()})

    kwargs: dict[str, Any] = {"system": system, "tolerances": tols}
    if "grid_points" in raw:
        kwargs["grid_points"] = _check_type(raw["grid_points"], int, "grid_points")
    if "cluster" in raw:
        kwargs["cluster"] = _check_type(raw["cluster"], bool, "cluster")
    if "seed" in raw:
        kwargs["seed"] = _check_type(raw["seed"], int, "seed")
    if "output_format" in raw:
        kwargs["output_format"] = _check_type(raw["output_format"], str, "output_format")
    return check_config(RunConfig(**kwargs))


def check_config(cfg: RunConfig) -> RunConfig:
    for name, value in asdict(cfg.tolerances).items():
        if not value > 0:
            raise ValidationError(f"tolerance {name} must be positive, got {value}")
    if cfg.grid_points < 64:
        raise ValidationError(f"grid_points must be at least 64, got {cfg.grid_points}")
    if cfg.output_format not in ("text", "structured"):
        raise ValidationError(f"output_format must be 'text' or 'structured', got {cfg.output_format!r}")
    return cfg


def parse_config(source: str | Path | Mapping[str, Any]) -> RunConfig:
    """Read a JSON config file (or an already-decoded mapping)."""
    if isinstance(source, Mapping):
        return config_from_mapping(source)
    path = Path(source)
    text = path.read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return config_from_mapping(raw, str(path))


def serialize(cfg: RunConfig) -> dict[str, Any]:
    return {
        "system": cfg.system.to_dict(),
        "tolerances": asdict(cfg.tolerances),
        "grid_points": cfg.grid_points,
        "cluster": cfg.cluster,
        "seed": cfg.seed,
        "output_format": cfg.output_format,
    }


def _num(v: float) -> str:
    return format(float(v), ".15g")


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


# ------------------------------------------------------------------ commands


def run_check(cfg: RunConfig) -> tuple[int, PipelineResult]:
    res = full_pipeline(cfg.system, cfg.options())
    return EXIT_CODES[res.verdict.kind], res


def format_check(res: PipelineResult) -> str:
    s = res.summary()
    step = f"decided at step {s['decided_at_step']}"
    if s["decided_at_step"] == 5 and s["alpha"] == 0:
        step += " (alpha = 0)"
    lines = [f"verdict: {s['verdict']}"]
    if s["reason"]:
        lines.append(f"reason: {s['reason']}")
    if s["note"]:
        lines.append(f"note: {s['note']}")
    lines.append(step)
    for key in ("zeta", "rho_T", "omega_bar", "min_margin", "trace_M_hat_0", "alpha",
                "zeta_theorem", "zeta_iterative", "step10_updates"):
        val = s[key]
        if val is None:
            continue
        lines.append(f"{key}: {_num(val) if isinstance(val, float) else val}")
    return "\n".join(lines)


def emit_band(cfg: RunConfig, omega_min: float, omega_max: float, samples: int) -> list[dict]:
    fm = build_frequency_model(cfg.system)
    omegas = np.linspace(omega_min, omega_max, samples)
    c, hr, hi = band_arrays(fm, omegas)
    return [
        {"omega": float(w), "re_center": float(z.real), "im_center": float(z.imag),
         "half_width_re": float(a), "half_width_im": float(b)}
        for w, z, a, b in zip(omegas, c, hr, hi)
    ]


def emit_roots(cfg: RunConfig) -> list[dict]:
    fm = build_frequency_model(cfg.system)
    t = cfg.tolerances
    roots = roots_in_0_pi(
        f_coefficients(fm), tol_circle=t.tol_circle, tol_cluster=t.tol_cluster,
        cluster=cfg.cluster, tol_coeff=t.tol_coeff,
    )
    base = dict(zip(roots.xs.tolist(), base_values(fm, roots).tolist()))
    q0 = float(np.trace(fm.m_hat_zero)) / fm.n
    return [
        {"x": r.x, "omega": r.x / fm.h, "multiplicity": r.multiplicity,
         "X": q0 if r.appended else base[r.x], "appended": r.appended}
        for r in roots.roots
    ]


def run_oracle(cfg: RunConfig, samples: int = 200, freqs: int = 50) -> dict:
    from .oracle import nyquist_winding, sample_admissible_kernel, simulate, verify_inclusions

    kernel = sample_admissible_kernel(cfg.system, cfg.seed)
    wind = nyquist_winding(kernel)
    traj = simulate(kernel)
    inc = verify_inclusions(cfg.system, samples, freqs, cfg.seed)
    return {
        "seed": cfg.seed,
        "winding": wind.winding,
        "det_winding": wind.det_winding,
        "min_distance_to_one": wind.min_distance_to_one,
        "growth_rate": traj.growth_rate,
        "square_violations": inc.square_violations,
        "rectangle_violations": inc.rectangle_violations,
        "inclusion_checks": inc.checks,
    }


def write_table(rows: list[dict], out: TextIO, columns: Sequence[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(
            [_num(row[c]) if isinstance(row[c], float) else row[c] for c in columns]
        )


# ------------------------------------------------------------------ entry point


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON config file")
    common.add_argument("--grid-points", type=int, help="grid size for the exclusion check")
    common.add_argument("--no-cluster", action="store_true", help="keep numerically split roots")
    common.add_argument("--seed", type=int, help="oracle seed")
    common.add_argument("--format", choices=("text", "structured"), help="output format")
    common.add_argument("--tol-circle", type=float)
    common.add_argument("--tol-cluster", type=float)
    common.add_argument("--tol-coeff", type=float)
    common.add_argument("--tol-v", type=float)
    common.add_argument("--output", help="write tables here instead of stdout")

    p = argparse.ArgumentParser(prog="intdelay", description="Robust stability of uncertain integral delay systems")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="run the full certification pipeline")
    band = sub.add_parser("band", parents=[common], help="emit the inclusion band as CSV")
    band.add_argument("--omega-min", type=float, default=0.0)
    band.add_argument("--omega-max", type=float, default=None)
    band.add_argument("--samples", type=int, default=600)
    sub.add_parser("roots", parents=[common], help="emit crossover roots and real values")
    orc = sub.add_parser("oracle", parents=[common], help="independent winding/simulation check")
    orc.add_argument("--samples", type=int, default=200)
    orc.add_argument("--freqs", type=int, default=50)
    return p


def _apply_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    tol_updates = {
        k: getattr(args, k) for k in ("tol_circle", "tol_cluster", "tol_coeff", "tol_v")
        if getattr(args, k) is not None
    }
    cfg = replace(cfg, tolerances=replace(cfg.tolerances, **tol_updates))
    if args.grid_points is not None:
        cfg = replace(cfg, grid_points=args.grid_points)
    if args.no_cluster:
        cfg = replace(cfg, cluster=False)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.format is not None:
        cfg = replace(cfg, output_format=args.format)
    return check_config(cfg)


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _apply_flags(parse_config(args.config), args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    structured = cfg.output_format == "structured"
    out: TextIO = sys.stdout
    try:
        if args.output:
            out = open(args.output, "w", newline="")
        if args.command == "check":
            code, res = run_check(cfg)
            if structured:
                out.write(json.dumps(_jsonable(res.summary()), indent=2) + "\n")
            else:
                out.write(format_check(res) + "\n")
            return code
        if args.command == "band":
            w_max = args.omega_max if args.omega_max is not None else 60.0 / cfg.system.tau_bar
            rows = emit_band(cfg, args.omega_min, w_max, args.samples)
            cols = ["omega", "re_center", "im_center", "half_width_re", "half_width_im"]
        elif args.command == "roots":
            rows = emit_roots(cfg)
            cols = ["x", "omega", "multiplicity", "X", "appended"]
        else:
            report = run_oracle(cfg, args.samples, args.freqs)
            if structured:
                out.write(json.dumps(_jsonable(report), indent=2) + "\n")
            else:
                out.write("\n".join(f"{k}: {v}" for k, v in report.items()) + "\n")
            return 0 if report["winding"] == 0 else 1
        if structured:
            out.write(json.dumps(_jsonable(rows), indent=2) + "\n")
        else:
            write_table(rows, out, cols)
        return 0
    except IntDelayError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
