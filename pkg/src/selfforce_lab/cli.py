"""``selfforce-lab`` command-line interface.

Configuration comes from an optional JSON document (``--config``) overlaid by
flags; flags win.  Tables are written as CSV, reports as JSON.  Floats are
printed in shortest round-trip form so identical runs give identical bytes.

Exit codes: 0 ok, 1 oracle check failed, 2 configuration error,
3 numerical failure, 4 physicality violation under ``--strict``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields, replace

from . import __version__
from .kernels import (
    DomainError,
    TestBody,
    geometric_factor_A_hat,
    kernel_f_hat,
    kernel_g_hat,
    rr_force_hat_BR,
)
from .oracles import (
    DEFAULT_TOLERANCE,
    f_hat_momentum_space,
    run_all_sweeps,
)
from .quadrature import QuadratureError, QuadratureSpec
from .study import PhysicalityError, convergence_study, decompose, uncertainty_curves
from .trajectories import RAMP_SHAPES, Trajectory

SCHEMA_VERSION = 1
COMMANDS = ("kernel", "force", "converge", "oracle", "uncertainty")

EXIT_OK, EXIT_ORACLE_FAIL, EXIT_CONFIG, EXIT_NUMERICS, EXIT_STRICT = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    def __init__(self, field_name, message):
        super().__init__(f"field '{field_name}': {message}")
        self.field_name = field_name


@dataclass(frozen=True)
class RunConfig:
    command: str
    kappa: float = 1.0
    kappa_grid: tuple = (0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0)
    delta_t_over_tau: float = 0.01
    ramp_shape: str = "smoothstep"
    Q_over_R: float = 1e-3
    R: float = 1.0
    rho_c: float = 1.0
    hbar: float = 1.0
    speed_limit_fraction: float = 0.1
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    n_steps: int = 4
    chi: float | None = None
    oracle_tolerance: float = DEFAULT_TOLERANCE
    workers: int = 1
    strict: bool = False
    output_path: str | None = None
    output_format: str | None = None

    def validate(self):
        def positive(name):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(name, f"must be a positive finite number, got {value!r}")

        if self.command not in COMMANDS:
            raise ConfigError("command", f"must be one of {COMMANDS}")
        for name in ("kappa", "R", "rho_c", "hbar", "rel_tol", "abs_tol", "oracle_tolerance"):
            positive(name)
        if not 0 < self.delta_t_over_tau <= 0.5:
            raise ConfigError("delta_t_over_tau", "must lie in (0, 0.5]")
        if self.ramp_shape not in RAMP_SHAPES:
            raise ConfigError("ramp_shape", f"must be one of {sorted(RAMP_SHAPES)}")
        if not math.isfinite(self.Q_over_R):
            raise ConfigError("Q_over_R", "must be finite")
        if not 0 < self.speed_limit_fraction <= 1:
            raise ConfigError("speed_limit_fraction", "must lie in (0, 1]")
        if self.output_format not in (None, "csv", "json"):
            raise ConfigError("output_format", "must be 'csv' or 'json'")
        if self.command == "converge" and self.n_steps < 2:
            raise ConfigError("n_steps", "must be >= 2")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        if self.command in ("kernel", "uncertainty"):
            grid = self.kappa_grid
            if len(grid) == 0:
                raise ConfigError("kappa_grid", "must not be empty")
            if any(not math.isfinite(g) or g < 0 for g in grid):
                raise ConfigError("kappa_grid", "entries must be finite and >= 0")
            if self.command == "uncertainty":
                if any(g <= 0 for g in grid):
                    raise ConfigError("kappa_grid", "entries must be > 0")
                if any(b <= a for a, b in zip(grid, grid[1:])):
                    raise ConfigError("kappa_grid", "must be sorted ascending")
        if self.chi is not None and not (math.isfinite(self.chi) and self.chi >= 0):
            raise ConfigError("chi", "must be finite and >= 0")
        return self

    def quadrature_spec(self) -> QuadratureSpec:
        return QuadratureSpec(rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def body(self) -> TestBody:
        return TestBody(self.R, self.rho_c)

    def trajectory(self) -> Trajectory:
        tau = self.kappa * self.R
        return Trajectory(self.Q_over_R * self.R, self.delta_t_over_tau * tau, tau, self.ramp_shape)


_FLAG_TO_FIELD = {
    "kappa": "kappa",
    "grid": "kappa_grid",
    "dt_frac": "delta_t_over_tau",
    "shape": "ramp_shape",
    "q_over_r": "Q_over_R",
    "radius": "R",
    "rho_c": "rho_c",
    "hbar": "hbar",
    "speed_limit": "speed_limit_fraction",
    "rel_tol": "rel_tol",
    "abs_tol": "abs_tol",
    "n_steps": "n_steps",
    "chi": "chi",
    "tolerance": "oracle_tolerance",
    "workers": "workers",
    "out": "output_path",
    "format": "output_format",
}


def _parse_grid(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file; flags override it")
    common.add_argument("--kappa", type=float, help="tau / R")
    common.add_argument("--grid", type=_parse_grid,
                        help="comma-separated argument grid (kernel, uncertainty)")
    common.add_argument("--dt-frac", type=float, help="ramp duration delta_t / tau")
    common.add_argument("--shape", choices=sorted(RAMP_SHAPES))
    common.add_argument("--q-over-r", type=float, help="plateau displacement Q / R")
    common.add_argument("--radius", type=float, help="test body radius R")
    common.add_argument("--rho-c", type=float, help="charge density")
    common.add_argument("--hbar", type=float)
    common.add_argument("--speed-limit", type=float, help="v_max limit as a fraction of c")
    common.add_argument("--rel-tol", type=float)
    common.add_argument("--abs-tol", type=float)
    common.add_argument("--n-steps", type=int, help="length of the shrink sequence (converge)")
    common.add_argument("--chi", type=float, help="single-point oracle comparison")
    common.add_argument("--tolerance", type=float, help="oracle pass tolerance")
    common.add_argument("--workers", type=int, help="threads for sweeps")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--strict", action="store_true", default=None,
                        help="treat physicality violations as fatal")

    parser = argparse.ArgumentParser(
        prog="selfforce-lab",
        description="Averaged self-force of a charged spherical test body.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("kernel", parents=[common], help="tabulate the closed-form kernels")
    sub.add_parser("force", parents=[common], help="force report for one configuration")
    sub.add_parser("converge", parents=[common], help="delta_t -> 0 convergence table")
    sub.add_parser("oracle", parents=[common], help="momentum-space oracle sweeps")
    sub.add_parser("uncertainty", parents=[common], help="minimum field uncertainty curves")
    return parser


def load_config(args) -> RunConfig:
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from None
        if not isinstance(doc, dict):
            raise ConfigError("config", "must be a JSON object")
        known = {f.name for f in fields(RunConfig)} - {"command"}
        for key, value in doc.items():
            if key not in known:
                raise ConfigError(key, "unknown configuration key")
            values[key] = tuple(value) if key == "kappa_grid" else value
    for flag, name in _FLAG_TO_FIELD.items():
        value = getattr(args, flag)
        if value is not None:
            values[name] = value
    if args.strict:
        values["strict"] = True
    try:
        cfg = RunConfig(command=args.command, **values)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from None
    return cfg.validate()


# --- formatting ------------------------------------------------------------------

def fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _json(obj):
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=2, allow_nan=False) + "\n"


def _table(command, header, rows, output_format):
    if output_format == "json":
        return _json({"command": command, "columns": list(header),
                      "rows": [list(r) for r in rows]})
    return _csv(header, rows)


# --- commands ----------------------------------------------------------------------

def cmd_kernel(cfg: RunConfig) -> tuple[str, int]:
    rows = []
    for arg in cfg.kappa_grid:
        positive = arg > 0
        rows.append((
            arg,
            kernel_f_hat(arg),
            kernel_g_hat(arg),
            geometric_factor_A_hat(arg) if positive else None,
            rr_force_hat_BR(arg) if positive else None,
        ))
    header = ("arg", "f_hat", "g_hat", "A_hat", "Frr_hat_BR")
    return _table("kernel", header, rows, cfg.output_format), EXIT_OK


def cmd_force(cfg: RunConfig) -> tuple[str, int]:
    report = decompose(cfg.trajectory(), cfg.body(), cfg.quadrature_spec(),
                       strict=cfg.strict, speed_limit_fraction=cfg.speed_limit_fraction)
    data = report.to_dict()
    if cfg.output_format == "csv":
        data["violations"] = ";".join(data["violations"])
        return _csv(list(data), [list(data.values())]), EXIT_OK
    return _json({"command": "force", **data}), EXIT_OK


def cmd_converge(cfg: RunConfig) -> tuple[str, int]:
    rows = convergence_study(cfg.trajectory(), cfg.body(), cfg.n_steps,
                             cfg.quadrature_spec(), workers=cfg.workers)
    absolute = rows[0].ratio_FRR_to_RRBR is None
    header = ("dt_over_tau", "ratio_F", "ratio_FQ", "Frr_abs" if absolute else "ratio_FRR", "bound15")
    table = [(r.delta_t_over_tau, r.ratio_F_to_BR, r.ratio_FQ_to_QBR,
              r.F_hat_RR if absolute else r.ratio_FRR_to_RRBR, r.bound_15_value) for r in rows]
    return _table("converge", header, table, cfg.output_format), EXIT_OK


def cmd_oracle(cfg: RunConfig) -> tuple[str, int]:
    if cfg.chi is not None:
        closed = kernel_f_hat(cfg.chi)
        oracle = f_hat_momentum_space(cfg.chi)
        diff = oracle - closed
        passed = abs(diff) <= cfg.oracle_tolerance
        if cfg.output_format == "json":
            out = _json({"command": "oracle", "chi": cfg.chi, "closed_form": closed,
                         "momentum_space": oracle, "difference": diff,
                         "tolerance": cfg.oracle_tolerance, "passed": passed})
        else:
            out = _csv(("chi", "closed_form", "momentum_space", "difference", "passed"),
                       [(cfg.chi, closed, oracle, diff, passed)])
        return out, EXIT_OK if passed else EXIT_ORACLE_FAIL

    reports = run_all_sweeps(cfg.oracle_tolerance)
    passed = all(r.passed for r in reports)
    if cfg.output_format == "json":
        out = _json({"command": "oracle", "passed": passed,
                     "reports": [r.to_dict() for r in reports]})
    else:
        out = _csv(("quantity", "n_points", "max_abs_err", "max_rel_err", "tolerance", "passed"),
                   [(r.quantity, len(r.grid), r.max_abs_err, r.max_rel_err, r.tolerance, r.passed)
                    for r in reports])
    return out, EXIT_OK if passed else EXIT_ORACLE_FAIL


def cmd_uncertainty(cfg: RunConfig) -> tuple[str, int]:
    curve = uncertainty_curves(cfg.kappa_grid, cfg.R, cfg.hbar)
    rows = list(zip(curve.kappa_grid, curve.delta_E_full, curve.delta_E_RR_only))
    return _table("uncertainty", ("kappa", "dE_full", "dE_rr_only"), rows,
                  cfg.output_format), EXIT_OK


_HANDLERS = {
    "kernel": cmd_kernel,
    "force": cmd_force,
    "converge": cmd_converge,
    "oracle": cmd_oracle,
    "uncertainty": cmd_uncertainty,
}

_DEFAULT_FORMAT = {"force": "json"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.output_format is None:
        cfg = replace(cfg, output_format=_DEFAULT_FORMAT.get(cfg.command, "csv"))

    try:
        text, code = _HANDLERS[cfg.command](cfg)
    except PhysicalityError as exc:
        print(f"physicality violation: {exc}", file=sys.stderr)
        return EXIT_STRICT
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
