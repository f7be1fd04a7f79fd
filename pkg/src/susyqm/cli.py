"""Command-line front end: figure tables, spectra and self-verification.

Usage:
  susyqm table --model ho --n 0 --C 1 --k 0,1,2 --out fig1.csv
  susyqm spectrum --model cprs --n 3 --C 21.5 --out spectrum.json
  susyqm verify --all
  susyqm verify --suite cprs-identities

Settings may also come from a TOML file (``--config run.toml``) whose keys
match the long flag names; flags given on the command line win.

Exit codes: 0 success, 1 failed verification, 2 invalid configuration,
3 eigensolver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle, verify
from .errors import ConvergenceFailure, InvalidIndex, SingularFamily
from .models import Kind, Model, get_model
from .susy import PartnerFamily

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3

DEFAULTS = {
    "model": "ho",
    "n": 0,
    "C": None,
    "k": None,
    "L": None,
    "N": 4000,
    "out": None,
    "format": None,
    "xmin": -5.0,
    "xmax": 5.0,
    "points": 1001,
}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    model: Model
    n: int
    C: float
    k: list = field(default_factory=list)
    L: float = 10.0
    N: int = 4000
    out: Path | None = None
    format: str = "csv"
    xmin: float = -5.0
    xmax: float = 5.0
    points: int = 1001

    def family(self) -> PartnerFamily:
        return PartnerFamily(self.model, self.n, self.C)


def fmt(value) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(value), ".17g")


def _parse_k(value) -> list:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(v) for v in str(value).split(",") if v.strip()]


def build_config(args, default_format: str) -> RunConfig:
    """Merge flags over the TOML file over defaults, then validate."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, "rb") as fh:
                merged.update(tomllib.load(fh))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value

    try:
        model = get_model(str(merged["model"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if merged["C"] is None:
        raise ConfigError("--C is required")
    try:
        n = int(merged["n"])
        C = float(merged["C"])
        ks = _parse_k(merged["k"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed numeric option: {exc}") from exc
    if not model.is_valid(n):
        raise ConfigError(f"n={n} is not a level of the {model.name} model")
    bad = [k for k in ks if not model.is_valid(k)]
    if bad:
        raise ConfigError(f"k={bad} not in the {model.name} index set")
    threshold = model.half_line_norm(n)
    if not abs(C) > threshold:
        raise ConfigError(
            f"|C| = {abs(C):g} is below the singularity threshold {threshold:.17g}"
        )
    fmt_name = merged["format"] or default_format
    if fmt_name not in ("csv", "json"):
        raise ConfigError(f"unknown format {fmt_name!r}")
    L = float(merged["L"]) if merged["L"] is not None else model.default_half_width
    N = int(merged["N"])
    points = int(merged["points"])
    if N < 3 or L <= 0 or points < 2 or not merged["xmin"] < merged["xmax"]:
        raise ConfigError("grid options must satisfy N >= 3, L > 0, points >= 2, xmin < xmax")
    return RunConfig(
        model=model,
        n=n,
        C=C,
        k=ks,
        L=L,
        N=N,
        out=Path(merged["out"]) if merged["out"] else None,
        format=fmt_name,
        xmin=float(merged["xmin"]),
        xmax=float(merged["xmax"]),
        points=points,
    )


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


# -- table --------------------------------------------------------------------


def table_data(cfg: RunConfig) -> dict:
    """Columns for the figure: potentials and energy-offset densities."""
    fam = cfg.family()
    x = np.linspace(cfg.xmin, cfg.xmax, cfg.points)
    cols = {
        "x": x,
        "V_base": fam.model.base_potential(fam.n, x),
        "V_tilde": fam.partner_potential(x),
    }
    ks = cfg.k or fam.model.indices(3)
    for k in ks:
        cols[f"density_k{k}"] = fam.unnormalized_state(k, x) ** 2 + fam.energy(k)
    return cols


def cmd_table(cfg: RunConfig) -> str:
    cols = table_data(cfg)
    names = list(cols)
    if cfg.format == "json":
        payload = {name: [float(v) for v in cols[name]] for name in names}
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in zip(*(cols[name] for name in names)):
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


# -- spectrum -------------------------------------------------------------------


def spectrum_report(cfg: RunConfig) -> dict:
    fam = cfg.family()
    count = len(cfg.k) if cfg.k else 4
    levels = fam.model.indices(count)
    analytic = [fam.energy(k) for k in levels]
    grid = oracle.Grid(cfg.L, cfg.N)
    spec = oracle.eigen_lowest(oracle.discretize(fam.partner_potential, grid), count)
    fine = oracle.eigenvalues_lowest(oracle.discretize(fam.partner_potential, grid.refined()), count)
    extrapolated = oracle.richardson(spec.energies, fine)
    deltas = extrapolated - np.array(analytic)
    absent = []
    if fam.model.kind is Kind.CPRS:
        for k in (1, 2):
            e = 2.0 * (k - fam.n)
            absent.append(
                {"energy": e, "absent": bool(np.all(np.abs(extrapolated - e) > 0.5))}
            )
    return {
        "model": fam.model.name,
        "n": fam.n,
        "C": fam.C,
        "L": cfg.L,
        "N": cfg.N,
        "levels": levels,
        "analytic": analytic,
        "oracle": [float(e) for e in spec.energies],
        "richardson": [float(e) for e in extrapolated],
        "delta": [float(d) for d in deltas],
        "max_abs_delta": float(np.max(np.abs(deltas))),
        "node_counts": list(spec.node_counts),
        "absent_levels": absent,
    }


def cmd_spectrum(cfg: RunConfig) -> str:
    report = spectrum_report(cfg)
    if cfg.format == "json":
        return json.dumps(report, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["level", "analytic", "oracle", "richardson", "delta", "nodes"])
    for row in zip(
        report["levels"],
        report["analytic"],
        report["oracle"],
        report["richardson"],
        report["delta"],
        report["node_counts"],
    ):
        writer.writerow([row[0], *(fmt(v) for v in row[1:5]), row[5]])
    return buf.getvalue()


# -- verify ---------------------------------------------------------------------


def cmd_verify(args) -> int:
    suites = None if args.all or not args.suite else args.suite
    report = verify.run(suites)
    payload = json.dumps(report.as_dict(), indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(payload)
    else:
        for c in report.checks:
            print(f"{c.status.upper():4s}  {c.name}: {c.measured:.3e} (tol {c.tolerance:g})")
        print("ALL PASS" if report.passed else "FAILURES PRESENT")
    return EXIT_OK if report.passed else EXIT_FAILED


# -- entry point ------------------------------------------------------------------


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=[k.value for k in Kind], help="base model")
    p.add_argument("--n", type=int, help="seed level")
    p.add_argument("--C", type=float, help="integration constant, |C| above threshold")
    p.add_argument("--k", help="comma-separated levels, e.g. 0,1,2")
    p.add_argument("--L", type=float, help="eigensolver box half-width")
    p.add_argument("--N", type=int, help="eigensolver interior points")
    p.add_argument("--xmin", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--points", type=int, help="table rows")
    p.add_argument("--out", help="output file (stdout when omitted)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--config", help="TOML file with the same keys as the flags")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="susyqm", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_options(sub.add_parser("table", help="figure data as CSV/JSON"))
    _add_run_options(sub.add_parser("spectrum", help="oracle spectrum vs analytic levels"))
    pv = sub.add_parser("verify", help="run self-check suites")
    pv.add_argument("--all", action="store_true", help="run every suite (default)")
    pv.add_argument("--suite", action="append", choices=list(verify.SUITES))
    pv.add_argument("--out", help="write the JSON report here")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    default_format = "csv" if args.command == "table" else "json"
    try:
        cfg = build_config(args, default_format)
        text = cmd_table(cfg) if args.command == "table" else cmd_spectrum(cfg)
    except (ConfigError, InvalidIndex, SingularFamily) as exc:
        print(f"susyqm: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceFailure as exc:
        print(f"susyqm: eigensolver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _emit(text, cfg.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
