"""Command-line front end: expand | evaluate | diagnose | verify.

Configuration comes from flags plus an optional JSON config file (flags
override the file).  All outputs are plot-ready CSV plus JSON sidecars that
echo the full configuration, and every command is deterministic for a fixed
configuration.  Exit codes: 0 success, 1 config error, 2 computation error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import diagnostics as diag
from .evaluate import (DEFAULT_GRID, GridSpec, NormalizationError, eval_field,
                       write_field_csv, write_field_sidecar)
from .parser import ParseError
from .potentials import resolve_potential
from .ring import RingElem, RingError
from .seeds import (BracketError, QuadratureError, SeedDomainError,
                    parse_seed_spec)
from .series import CONVENTIONS, TermBudgetError, WignerSeries, build_series
from .verify import SymbolicResidualError, residual_numeric, residual_symbolic


class ConfigError(ValueError):
    """Invalid run configuration; message aggregates all problems."""


@dataclass
class RunConfig:
    command: str
    potential_text: str = ""
    potential: RingElem | None = None
    order: int = 2
    convention: str = "paper"
    seed_spec: str = "fd:z=1"
    seed: object = None
    hbar: float | None = None
    hbar_list: list[float] = field(default_factory=list)
    grid: GridSpec = DEFAULT_GRID
    out_dir: Path = Path("out")
    series_file: Path | None = None
    mode: str = "auto"
    samples: int = 48
    j_max: int | None = None
    no_normalize: bool = False

    def provenance(self) -> dict:
        return {
            "command": self.command,
            "potential": self.potential_text,
            "order": self.order,
            "convention": self.convention,
            "seed": self.seed_spec,
            "hbar": self.hbar,
            "hbar_list": self.hbar_list,
            "grid": self.grid.to_json_dict(),
        }


def _parse_range(text: str, name: str, errors: list) -> tuple | None:
    parts = text.split(",")
    if len(parts) != 3:
        errors.append(f"--{name} expects a,b,n")
        return None
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        errors.append(f"--{name}: could not parse {text!r}")
        return None


def build_config(args: argparse.Namespace) -> RunConfig:
    errors: list[str] = []
    file_values = {}
    if args.config:
        try:
            file_values = json.loads(Path(args.config).read_text())
            if not isinstance(file_values, dict):
                errors.append("config file must hold a JSON object")
                file_values = {}
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None

    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            return file_values[key]
        return default

    cfg = RunConfig(command=args.command)
    cfg.potential_text = str(pick(args.potential, "potential", ""))
    order = pick(args.order, "order", 2)
    try:
        cfg.order = int(order)
        if cfg.order < 0:
            errors.append("--order must be nonnegative")
    except (TypeError, ValueError):
        errors.append(f"--order: bad value {order!r}")
    cfg.convention = str(pick(args.convention, "convention", "paper"))
    if cfg.convention not in CONVENTIONS:
        errors.append(f"--convention must be one of {CONVENTIONS}")
    cfg.seed_spec = str(pick(args.seed, "seed", "fd:z=1"))
    hbar = pick(args.hbar, "hbar", None)
    if hbar is not None:
        try:
            cfg.hbar = float(hbar)
            if cfg.hbar < 0:
                errors.append("--hbar must be nonnegative")
        except (TypeError, ValueError):
            errors.append(f"--hbar: bad value {hbar!r}")
    hbar_list = pick(args.hbar_list, "hbar_list", None)
    if hbar_list is not None:
        if isinstance(hbar_list, str):
            hbar_list = hbar_list.split(",")
        try:
            cfg.hbar_list = [float(v) for v in hbar_list]
        except (TypeError, ValueError):
            errors.append(f"--hbar-list: bad value {hbar_list!r}")
    grid_kw = DEFAULT_GRID.to_json_dict()
    if "grid" in file_values:
        grid_kw.update(file_values["grid"])
    for flag, name in ((args.qrange, "qrange"), (args.prange, "prange")):
        if flag is None and name in file_values:
            flag = file_values[name]
        if flag is not None:
            parsed = _parse_range(str(flag), name, errors)
            if parsed:
                axis = "q" if name == "qrange" else "p"
                grid_kw[f"{axis}_min"], grid_kw[f"{axis}_max"] = parsed[0], parsed[1]
                grid_kw[f"n_{axis}"] = parsed[2]
    try:
        cfg.grid = GridSpec.from_json_dict(grid_kw)
    except (ValueError, KeyError) as exc:
        errors.append(f"bad grid: {exc}")
    cfg.out_dir = Path(pick(args.out, "out", "out"))
    series_file = pick(getattr(args, "series", None), "series", None)
    cfg.series_file = Path(series_file) if series_file else None
    cfg.mode = pick(getattr(args, "mode", None), "mode", "auto")
    if cfg.mode not in ("auto", "symbolic", "numeric"):
        errors.append("--mode must be auto, symbolic or numeric")
    samples = pick(getattr(args, "samples", None), "samples", 48)
    try:
        cfg.samples = int(samples)
    except (TypeError, ValueError):
        errors.append(f"--samples: bad value {samples!r}")
    j_max = pick(getattr(args, "j_max", None), "j_max", None)
    if j_max is not None:
        try:
            cfg.j_max = int(j_max)
        except (TypeError, ValueError):
            errors.append(f"--j-max: bad value {j_max!r}")
    cfg.no_normalize = bool(pick(getattr(args, "no_normalize", None) or None,
                                 "no_normalize", False))

    needs_potential = cfg.series_file is None
    if needs_potential and not cfg.potential_text:
        errors.append("--potential is required")
    if cfg.potential_text:
        try:
            cfg.potential = resolve_potential(cfg.potential_text)
        except ParseError as exc:
            errors.append(f"potential: {exc}")
    if args.command in ("evaluate", "diagnose") or (
            args.command == "verify" and cfg.mode != "symbolic"):
        try:
            cfg.seed = parse_seed_spec(cfg.seed_spec)
        except (ValueError, BracketError, QuadratureError) as exc:
            errors.append(f"seed: {exc}")
    if args.command == "evaluate" and cfg.hbar is None:
        errors.append("evaluate needs --hbar")
    if args.command == "diagnose" and cfg.hbar is None and not cfg.hbar_list:
        errors.append("diagnose needs --hbar or --hbar-list")
    if errors:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
    return cfg


def _write_json(path: Path, data: dict) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def _load_or_build_series(cfg: RunConfig) -> WignerSeries:
    if cfg.series_file is not None:
        series = WignerSeries.from_json(cfg.series_file.read_text())
        return series
    return build_series(cfg.potential, cfg.order, cfg.convention)


def _series_listing(series: WignerSeries) -> str:
    lines = [f"potential: {series.potential}",
             f"order: {series.order}  convention: {series.convention}"]
    for l, term in enumerate(series.terms):
        lines.append(f"f_{l}:")
        if term.is_zero():
            lines.append("  0")
            continue
        for (m, j), c in term.cells():
            h_part = "" if m == 0 else (" * H" if m == 1 else f" * H^{m}")
            lines.append(f"  [f0^({j}){h_part}]  {c}")
    return "\n".join(lines) + "\n"


def cmd_expand(cfg: RunConfig) -> int:
    series = build_series(cfg.potential, cfg.order, cfg.convention)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    doc = series.to_json_dict()
    doc["config"] = cfg.provenance()
    _write_json(cfg.out_dir / "series.json", doc)
    listing = _series_listing(series)
    (cfg.out_dir / "series.txt").write_text(listing)
    sys.stdout.write(listing)
    print(f"wrote {cfg.out_dir / 'series.json'}")
    return 0


def cmd_evaluate(cfg: RunConfig) -> int:
    series = _load_or_build_series(cfg)
    field_ = eval_field(series, cfg.seed, cfg.hbar, cfg.grid,
                        normalize=not cfg.no_normalize, seed_spec=cfg.seed_spec,
                        series_meta={"order": series.order,
                                     "convention": series.convention,
                                     "potential": str(series.potential)})
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    write_field_csv(field_, cfg.out_dir / "field.csv")
    write_field_sidecar(field_, cfg.out_dir / "field.json", cfg.provenance())
    print(f"min f = {field_.values.min():.6e}  max f = {field_.values.max():.6e}  "
          f"norm constant = {field_.norm_constant:.6e}")
    print(f"wrote {cfg.out_dir / 'field.csv'}")
    return 0


def cmd_diagnose(cfg: RunConfig) -> int:
    series = _load_or_build_series(cfg)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.hbar_list:
        rows = []
        for hbar in cfg.hbar_list:
            field_ = eval_field(series, cfg.seed, hbar, cfg.grid,
                                seed_spec=cfg.seed_spec)
            q_value, bound, verdict = diag.q_functional(field_)
            rows.append((hbar, q_value, bound, verdict))
        sweep_path = cfg.out_dir / "qsweep.csv"
        with open(sweep_path, "w") as fh:
            fh.write("hbar,Q,two_pi_hbar_Q\n")
            for hbar, q_value, bound, _ in rows:
                fh.write(f"{hbar!r},{q_value!r},{bound!r}\n")
        _write_json(cfg.out_dir / "qsweep.json", {
            "rows": [{"hbar": h, "Q": qv, "two_pi_hbar_Q": b,
                      "uncertainty_ok": v} for h, qv, b, v in rows],
            "config": cfg.provenance(),
        })
        for hbar, _, bound, verdict in rows:
            print(f"hbar = {hbar:g}: 2*pi*hbar*Q = {bound:.6f}  "
                  f"ok = {verdict}")
        print(f"wrote {sweep_path}")
        return 0
    field_ = eval_field(series, cfg.seed, cfg.hbar, cfg.grid,
                        seed_spec=cfg.seed_spec)
    report = diag.diagnose(field_)
    doc = report.to_json_dict()
    doc["config"] = cfg.provenance()
    _write_json(cfg.out_dir / "diagnostics.json", doc)
    diag.write_marginal_csv(report.q, report.p_q, "q,P_q",
                            cfg.out_dir / "marginal_q.csv")
    diag.write_marginal_csv(report.p, report.p_p, "p,P_p",
                            cfg.out_dir / "marginal_p.csv")
    verdict = ("not applicable" if report.uncertainty_ok is None
               else str(report.uncertainty_ok))
    print(f"min f = {report.min_f:.6e} at {report.argmin_f}")
    print(f"min P_q = {report.min_pq:.6e}  min P_p = {report.min_pp:.6e}")
    print(f"2*pi*hbar*Q = {report.bound_2pi_hbar_q:.6f}  within bound: {verdict}")
    print(f"wrote {cfg.out_dir / 'diagnostics.json'}")
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    series = _load_or_build_series(cfg)
    mode = cfg.mode
    if mode == "auto":
        mode = "numeric" if series.potential.has_trig() else "symbolic"
    if mode == "symbolic":
        report = residual_symbolic(series)
    else:
        hbars = cfg.hbar_list or [0.05, 0.0707, 0.1, 0.141, 0.2]
        if cfg.seed is None:
            cfg.seed = parse_seed_spec(cfg.seed_spec)
        report = residual_numeric(series, cfg.seed, hbars,
                                  samples=cfg.samples,
                                  j_max=cfg.j_max or series.order + 1)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    doc = report.to_json_dict()
    doc["config"] = cfg.provenance()
    _write_json(cfg.out_dir / "residual.json", doc)
    print(f"mode: {report.mode}   claimed order: {report.claimed_order}")
    if report.mode == "symbolic":
        shown = "zero residual" if report.observed_order is None \
            else str(report.observed_order)
        print(f"observed order: {shown}")
    elif report.slope is None:
        print("residuals at roundoff floor (numerically zero)")
    else:
        print(f"fitted slope: {report.slope:.3f} +- {report.slope_stderr:.3f}")
    print(f"passed: {report.passed}")
    print(f"wrote {cfg.out_dir / 'residual.json'}")
    return 0 if report.passed else 3


_COMMANDS = {
    "expand": cmd_expand,
    "evaluate": cmd_evaluate,
    "diagnose": cmd_diagnose,
    "verify": cmd_verify,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qvlasov",
        description="Semiclassical expansion of the stationary quantum "
                    "Vlasov equation: build, evaluate, diagnose, verify.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("expand", "build the expansion and write it as JSON + listing"),
            ("evaluate", "evaluate the Wigner function on a grid (CSV)"),
            ("diagnose", "marginals, spikiness bound and negativity report"),
            ("verify", "residual-order check of a built expansion")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--potential", help="expression in q, or preset name")
        cmd.add_argument("--order", type=int, default=None,
                         help="truncation order L (keeps powers through hbar^(2L))")
        cmd.add_argument("--convention", choices=CONVENTIONS, default=None)
        cmd.add_argument("--seed", default=None,
                         help="mb | fd:z=<r> | be:z=<r> | fd:chi=<r>")
        cmd.add_argument("--hbar", type=float, default=None)
        cmd.add_argument("--hbar-list", dest="hbar_list", default=None,
                         help="comma-separated hbar values")
        cmd.add_argument("--qrange", default=None, help="a,b,n for the q grid")
        cmd.add_argument("--prange", default=None, help="a,b,n for the p grid")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--config", default=None, help="JSON config file")
        if name == "evaluate":
            cmd.add_argument("--no-normalize", action="store_true", default=None)
        if name == "verify":
            cmd.add_argument("--series", default=None,
                             help="series JSON produced by expand")
            cmd.add_argument("--mode", choices=("auto", "symbolic", "numeric"),
                             default=None)
            cmd.add_argument("--samples", type=int, default=None)
            cmd.add_argument("--j-max", dest="j_max", type=int, default=None)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    for attr in ("no_normalize", "series", "mode", "samples", "j_max"):
        if not hasattr(args, attr):
            setattr(args, attr, None)
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](cfg)
    except (RingError, ParseError, SeedDomainError, QuadratureError,
            BracketError, NormalizationError, diag.DegenerateFieldError,
            TermBudgetError, SymbolicResidualError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
