"""Command-line front end.

Usage::

    catlab verify --n 3
    catlab catenoid --n 4 --r 1 --r-max 100
    catlab family --n 2 --a 2 --grid-points 50
    catlab monotone --n 2 --r 1e-3 --r-min 0.1 --r-max 1
    catlab surgery --n 2 --a 1 --r-min 1e-6 --r-max 1e-2 --grid-points 5

Exit status: 0 when every check passes, 1 when some check fails, 2 on a
usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from catlab import catenoid, monotone, revolution, suite, surgery, two_sheet
from catlab.errors import CatlabError, ConfigurationError
from catlab.report import Check, Report, csv_text, dumps, write_table

COMMANDS = ("catenoid", "family", "monotone", "verify", "surgery")
FORMATS = ("csv", "json")

CATENOID_COLUMNS = ("t", "h", "A_norm", "area_cum")
FAMILY_COLUMNS = ("t", "rho", "area", "kappa_mer", "kappa_sph", "ric_min", "dist")
MONOTONE_COLUMNS = ("s", "I", "tau", "F", "I_mod", "tau_mod", "dI_ds", "dtau_ds")
RESIDUAL_COLUMNS = ("rho", "w", "lhs", "rhs", "residual")


@dataclass
class RunConfig:
    command: str
    n: int = 3
    a: float = 1.0
    r: float | None = None
    r_min: float | None = None
    r_max: float | None = None
    grid_points: int | None = None
    out_dir: str = "catlab_out"
    format: str = "csv"
    tol_override: dict = field(default_factory=dict)

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {self.command!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or not 2 <= int(self.n) <= 6:
            raise ConfigurationError(f"--n must be an integer between 2 and 6, got {self.n!r}")
        self.n = int(self.n)
        if not float(self.a) >= 1.0:
            raise ConfigurationError(f"--a must be >= 1, got {self.a!r}")
        if self.format not in FORMATS:
            raise ConfigurationError(f"--format must be one of {FORMATS}")
        if self.r is not None and not self.r > 0:
            raise ConfigurationError("--r must be positive")
        if self.grid_points is not None and self.grid_points < 1:
            raise ConfigurationError("--grid-points must be positive")
        for key in self.tol_override:
            if key not in suite.DEFAULT_TOLERANCES:
                raise ConfigurationError(f"unknown tolerance {key!r}; known: {sorted(suite.DEFAULT_TOLERANCES)}")
        return self

    def grid(self, lo, hi, points, geometric=True):
        lo = self.r_min if self.r_min is not None else lo
        hi = self.r_max if self.r_max is not None else hi
        points = self.grid_points if self.grid_points is not None else points
        if not hi >= lo > 0:
            raise ConfigurationError("grid bounds need 0 < r-min <= r-max")
        if points == 1 or lo == hi:
            return np.array([hi])
        return np.geomspace(lo, hi, points) if geometric else np.linspace(lo, hi, points)


def _parse_tolerance(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected NAME=VALUE")
    try:
        return key.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad tolerance value in {text!r}") from exc


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="hypersurface dimension (2..6)")
    common.add_argument("--a", type=float, help="family parameter a >= 1")
    common.add_argument("--r", type=float, help="neck radius")
    common.add_argument("--r-min", dest="r_min", type=float, help="lower end of the radius grid")
    common.add_argument("--r-max", dest="r_max", type=float, help="upper end of the radius grid")
    common.add_argument("--grid-points", dest="grid_points", type=int, help="number of grid points")
    common.add_argument("--out", dest="out_dir", help="artifact directory")
    common.add_argument("--format", choices=FORMATS, help="table format")
    common.add_argument("--tol-override", dest="tol_override", action="append", type=_parse_tolerance,
                        metavar="NAME=VALUE", help="override a check tolerance (repeatable)")
    common.add_argument("--config", help="JSON file with the same keys; flags take precedence")
    parser = argparse.ArgumentParser(prog="catlab", description="Catenoid and monotonicity verification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(argv=None, environ=None) -> RunConfig:
    """Merge defaults, an optional JSON config file, flags and ``CATLAB_OUT``."""
    environ = os.environ if environ is None else environ
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigurationError(f"cannot read config file {args.config!r}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigurationError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)} | {"out"}
        unknown = set(loaded) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
        if "out" in values:
            values["out_dir"] = values.pop("out")
        values.pop("command", None)
    for key in ("n", "a", "r", "r_min", "r_max", "grid_points", "out_dir", "format"):
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    tols = dict(values.get("tol_override") or {})
    tols.update(dict(args.tol_override or []))
    values["tol_override"] = tols
    if environ.get("CATLAB_OUT"):
        values["out_dir"] = environ["CATLAB_OUT"]
    return RunConfig(command=args.command, **values).validate()


# --- commands -------------------------------------------------------------


def _catenoid_rows(cfg: RunConfig):
    r = cfg.r if cfg.r is not None else 1.0
    t_max = cfg.r_max if cfg.r_max is not None else 100.0 * r
    return catenoid.CatenoidProfile.build(cfg.n, r, t_max).table()


def _family_rows(cfg: RunConfig):
    surface = revolution.RevolutionSurface(cfg.n, float(cfg.a))
    return surface.table(surface.grid(cfg.grid_points or 50))


def _monotone_rows(cfg: RunConfig):
    r = cfg.r if cfg.r is not None else 1e-3
    s_grid = cfg.grid(0.1, 1.0, 20)
    if s_grid[0] < 10 * r:
        raise ConfigurationError("monotone grids must start at s >= 10 r")
    tsc = two_sheet.TwoSheetConfig.catenoid(cfg.n, r, 10.0 * r, 2.0 * float(s_grid[-1]), points=3)
    return monotone.trace(tsc, s_grid).rows()


def _residual_rows(cfg: RunConfig):
    r = cfg.r if cfg.r is not None else 1.0
    tsc = two_sheet.TwoSheetConfig.catenoid(cfg.n, r, 10.0 * r, 1000.0 * r)
    return two_sheet.minimal_graph_residual(tsc).rows()


def _surgery_certificate(cfg: RunConfig):
    r_grid = cfg.grid(1e-6, 1e-2, 5)
    return surgery.certify(cfg.n, float(cfg.a), surgery.NeckRule(), r_grid)


def _artifacts(cfg: RunConfig):
    """Deterministic (name, columns, rows) artifacts of a command."""
    if cfg.command == "catenoid":
        return [(f"catenoid_n{cfg.n}", CATENOID_COLUMNS, _catenoid_rows(cfg))]
    if cfg.command == "family":
        return [(f"family_n{cfg.n}_a{cfg.a:g}", FAMILY_COLUMNS, _family_rows(cfg))]
    if cfg.command == "monotone":
        return [
            (f"monotone_n{cfg.n}", MONOTONE_COLUMNS, _monotone_rows(cfg)),
            (f"residuals_n{cfg.n}", RESIDUAL_COLUMNS, _residual_rows(cfg)),
        ]
    return []


def _command_report(cfg: RunConfig) -> Report:
    tols = cfg.tol_override
    n = cfg.n
    report = Report()
    if cfg.command == "catenoid":
        for check in (suite.check_height_sup, suite.check_flux_limit,
                      suite.check_excess_constant, suite.check_neck_height_budget):
            report.add(check(n, tols))
    elif cfg.command == "family":
        report.add(suite.check_family_geometry(n, float(cfg.a), cfg.grid_points or 50, tols))
    elif cfg.command == "monotone":
        report.add(suite.check_identity_residuals(n, tols))
        report.add(suite.check_graph_estimates(n, tols))
        report.add(suite.check_monotone_bounds(n, cfg.r if cfg.r is not None else 1e-3, tols))
    elif cfg.command == "surgery":
        report.add(suite.check_surgery(n, float(cfg.a), cfg.grid(1e-6, 1e-2, 5), tols, strict=False))
    return report


def _render_tables(cfg):
    return "".join(csv_text(cols, rows) for _, cols, rows in _artifacts(
        RunConfig("catenoid", cfg.n, cfg.a, cfg.r, None, None, None, cfg.out_dir, "csv")))


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one command, write its artifacts and report; returns the exit code."""
    stdout = stdout or sys.stdout
    try:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if cfg.command == "verify":
            report = suite.verify_report(cfg.n, float(cfg.a), cfg.grid(1e-6, 1e-2, 5), cfg.tol_override,
                                         render=lambda: _render_tables(cfg), points=cfg.grid_points or 50)
            for sub in ("catenoid", "family", "monotone"):
                sub_cfg = RunConfig(sub, cfg.n, cfg.a, cfg.r, None, None, None, cfg.out_dir, cfg.format)
                for name, cols, rows in _artifacts(sub_cfg):
                    write_table(out / name, cols, rows, cfg.format)
            cert = _surgery_certificate(cfg)
            (out / f"surgery_n{cfg.n}.json").write_text(dumps(cert.to_json()))
        else:
            for name, cols, rows in _artifacts(cfg):
                write_table(out / name, cols, rows, cfg.format)
            if cfg.command == "surgery":
                cert = _surgery_certificate(cfg)
                (out / f"surgery_n{cfg.n}.json").write_text(dumps(cert.to_json()))
            report = _command_report(cfg)
    except OSError as exc:
        print(f"catlab: cannot write artifacts: {exc}", file=sys.stderr)
        return 2
    except ConfigurationError as exc:
        print(f"catlab: {exc}", file=sys.stderr)
        return 2
    except CatlabError as exc:
        report = Report([Check(cfg.command, "run", None, None, False, {"error": str(exc)})])
    (out / "report.json").write_text(report.to_json())
    for line in report.lines():
        print(line, file=stdout)
    return 0 if report.ok else 1


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if exc.code is not None else 2
    except CatlabError as exc:
        print(f"catlab: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
