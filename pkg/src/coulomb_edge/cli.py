"""Command-line front end: ``coulomb-edge <command> --config cfg.json``.

Every command writes a CSV (or JSON with ``--format json``) whose first line
is a ``#``-prefixed metadata line naming the tool version.  Exit codes: 0 pass,
1 acceptance-check failure, 2 configuration error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__, edge, fluct, opkernel
from .errors import CoulombEdgeError, DomainError, DropletError, MisuseError, NumericError, OracleError
from .potential import (EllipticGinibrePotential, RadialPotential, droplet_radius, potential_from_spec)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(CoulombEdgeError):
    pass


@dataclass
class RunConfig:
    potential: RadialPotential | EllipticGinibrePotential
    n_list: list[int]
    t_min: float = -2.5
    t_max: float = 2.5
    t_step: float = 0.25
    M: float = 1.0
    C: float = 3.0
    r_grid: list[float] = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5])
    test_function: fluct.TestFunction | None = None
    tolerances: dict[str, float] = field(default_factory=dict)
    seed: int | None = None  # reserved; every computation is deterministic

    @property
    def t_grid(self) -> np.ndarray:
        return edge.default_t_grid(self.t_min, self.t_max, self.t_step)


_DEFAULT_N = {"density": [64], "edge-check": [256, 1024, 4096], "fluct-check": [256, 4096],
              "convergence": [256, 1024, 4096], "oracle-verify": [2, 4, 8]}


def load_config(path: str | None, command: str, args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    pot_spec = raw.get("potential", raw if "type" in raw else {"type": "radial-poly", "coeffs": [[1, 2]]})
    try:
        pot = potential_from_spec(pot_spec)
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    n_list = args.n if args.n else raw.get("n", _DEFAULT_N[command])
    if isinstance(n_list, int):
        n_list = [n_list]
    try:
        n_list = [int(v) for v in n_list]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid n list {n_list!r}") from exc
    if not n_list or any(v < 1 for v in n_list):
        raise ConfigError(f"n values must be positive integers, got {n_list!r}")
    cfg = RunConfig(potential=pot, n_list=sorted(set(n_list)))
    for key, attr in (("t_min", "t_min"), ("t_max", "t_max"), ("t_step", "t_step"), ("M", "M"), ("C", "C")):
        if key in raw:
            setattr(cfg, attr, float(raw[key]))
        cli_val = getattr(args, attr, None)
        if cli_val is not None:
            setattr(cfg, attr, float(cli_val))
    if cfg.t_step <= 0 or cfg.t_max < cfg.t_min:
        raise ConfigError("t grid needs t_step > 0 and t_max >= t_min")
    if "r_grid" in raw:
        cfg.r_grid = _parse_grid(raw["r_grid"])
    if "test_function" in raw:
        tf = raw["test_function"]
        try:
            cfg.test_function = fluct.TestFunction.from_coeffs(tf["coeffs"], label=tf.get("label"))
        except (MisuseError, DomainError, KeyError, TypeError) as exc:
            raise ConfigError(f"invalid test function: {exc}") from exc
    cfg.tolerances = {k: float(v) for k, v in raw.get("tolerances", {}).items()}
    cfg.seed = raw.get("seed")
    return cfg


def _parse_grid(spec) -> list[float]:
    if isinstance(spec, list):
        return [float(v) for v in spec]
    if isinstance(spec, dict) and {"min", "max", "step"} <= spec.keys():
        count = int(round((spec["max"] - spec["min"]) / spec["step"])) + 1
        return [float(spec["min"] + k * spec["step"]) for k in range(count)]
    raise ConfigError(f"invalid r_grid {spec!r}")


class Table:
    """Column-ordered result table rendered as CSV or JSON."""

    def __init__(self, name: str, columns: Sequence[str]):
        self.name = name
        self.columns = list(columns)
        self.rows: list[list] = []
        self.notes: list[str] = []

    def add(self, *values):
        self.rows.append(list(values))

    @staticmethod
    def _fmt(v):
        if isinstance(v, float):
            return format(v, ".17g")
        return str(v)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            payload = {"meta": {"tool": "coulomb-edge", "version": __version__, "table": self.name},
                       "columns": self.columns, "rows": self.rows, "notes": self.notes}
            return json.dumps(payload, indent=2, sort_keys=True) + "\n"
        buf = io.StringIO()
        buf.write(f"# coulomb-edge {__version__}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([self._fmt(v) for v in row])
        return buf.getvalue()


def _need_radial(cfg: RunConfig, command: str) -> RadialPotential:
    if not isinstance(cfg.potential, RadialPotential):
        raise ConfigError(f"{command} needs a radial potential")
    return cfg.potential


def cmd_density(cfg: RunConfig) -> tuple[Table, int]:
    """Columns ``r, R_n``; trailing rows ``mass`` and ``mass_rel_err``."""
    n = cfg.n_list[0]
    table = Table("density", ["r", "R_n"])
    r = np.asarray(cfg.r_grid, dtype=float)
    if isinstance(cfg.potential, EllipticGinibrePotential):
        vals = opkernel.elliptic_density(cfg.potential.tau, n, r.astype(complex))
        mass = opkernel.elliptic_mass(cfg.potential.tau, n)
    else:
        basis = opkernel.radial_norms(cfg.potential, n)
        vals = opkernel.density_radial(basis, cfg.potential, r)
        mass = opkernel.radial_mass(basis, cfg.potential)
    for ri, v in zip(r, np.atleast_1d(vals)):
        table.add(float(ri), float(v))
    rel = abs(mass - n) / n
    table.add("mass", float(mass))
    table.add("mass_rel_err", float(rel))
    tol = cfg.tolerances.get("mass", 1e-8)
    return table, EXIT_OK if rel <= tol else EXIT_FAIL


def cmd_edge_check(cfg: RunConfig) -> tuple[Table, int]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", edge.OutOfWindowWarning)
        study = edge.residual_study(cfg.potential, cfg.n_list, cfg.t_grid, M=cfg.M)
    table = Table("edge-check", edge.PROFILE_COLUMNS)
    for n in sorted(study.profiles):
        for row in study.profiles[n].rows():
            table.add(*row)
    table.notes = study.report().splitlines()
    if study.decay is None:
        return table, EXIT_OK
    return table, EXIT_OK if study.decay else EXIT_FAIL


def cmd_convergence(cfg: RunConfig) -> tuple[Table, int]:
    """``D_n(0)``, ``C(0)`` and ``max_t |D_n - C|`` per ``n``.

    Passes when ``|D_n(0) - C(0)|`` strictly decreases in ``n`` and is at most
    ``tolerances["edge_constant"]`` (default 0.02) at the largest ``n``.
    """
    grid = cfg.t_grid
    if not np.any(np.isclose(grid, 0.0)):
        grid = np.sort(np.append(grid, 0.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", edge.OutOfWindowWarning)
        study = edge.residual_study(cfg.potential, cfg.n_list, grid, M=cfg.M)
    table = Table("convergence", ["n", "D_n_0", "C_0", "abs_D_minus_C_0", "max_abs_D_minus_C"])
    gaps = []
    for n in sorted(study.profiles):
        prof = study.profiles[n]
        i0 = int(np.argmin(np.abs(prof.t_values)))
        gap = abs(float(prof.D_minus_C[i0]))
        gaps.append(gap)
        table.add(n, float(prof.D_n[i0]), float(prof.C[i0]), gap, study.max_deviation[n])
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    close = gaps[-1] <= cfg.tolerances.get("edge_constant", 0.02)
    return table, EXIT_OK if monotone and close else EXIT_FAIL


def cmd_fluct_check(cfg: RunConfig) -> tuple[Table, int]:
    pot = _need_radial(cfg, "fluct-check")
    if cfg.test_function is None:
        raise ConfigError("fluct-check needs a 'test_function' entry")
    f = cfg.test_function
    table = Table("fluct-check", fluct.FLUCT_COLUMNS)
    if len(cfg.n_list) >= 2 and cfg.n_list[-1] / cfg.n_list[0] >= 16:
        rep = fluct.fluct_convergence(pot, f, cfg.n_list)
        rows, ok = rep.rows, rep.decay
    else:
        rho = fluct.rho_half(pot, f)
        rows = [(n, ef, rho, abs(ef - rho)) for n in cfg.n_list for ef in [fluct.expected_fluct(pot, f, n)]]
        ok = True
        table.notes.append("no decay comparison (need max/min >= 16)")
    for n, ef, rho, gap in rows:
        table.add(pot.label, f.label, n, float(ef), float(rho), float(gap))
    return table, EXIT_OK if ok else EXIT_FAIL


def cmd_oracle_verify(cfg: RunConfig, corrupt_norm: int | None = None) -> tuple[Table, int]:
    table = Table("oracle-verify", ["suite", "n", "point", "fast", "oracle", "rel_err"])
    pot = cfg.potential
    ok = True
    if isinstance(pot, EllipticGinibrePotential):
        tol = cfg.tolerances.get("elliptic", 1e-7)
        pts = np.array([0.0, 0.4 + 0.1j, -0.8 + 0.2j, 1.0 + pot.tau, 0.2 - 0.5j, 1.3 + 0.3j])
        for n in cfg.n_list:
            oracle = opkernel.gram_oracle(pot, n, droplet_radius=1.0 + pot.tau)
            ref = oracle(pts)
            got = opkernel.elliptic_density(pot.tau, n, pts, validate=False)
            for p, g, o in zip(pts, got, ref):
                rel = abs(g - o) / o
                ok &= rel <= tol
                table.add("elliptic", n, str(complex(p)), float(g), float(o), float(rel))
        return table, EXIT_OK if ok else EXIT_FAIL
    tol = cfg.tolerances.get("radial", 1e-8)
    R = droplet_radius(pot)
    radii = np.array([0.0, 0.3, 0.6, 0.9, 1.1, 1.4]) * R
    for n in cfg.n_list:
        basis = opkernel.radial_norms(pot, n)
        if corrupt_norm is not None and corrupt_norm < n:
            log_h = basis.log_h.copy()
            log_h[corrupt_norm] += 1e-3
            basis = opkernel.OrthoBasis(n=n, log_h=log_h, label=basis.label)
        oracle = opkernel.gram_oracle(pot, n, droplet_radius=R)
        fast = opkernel.density_radial(basis, pot, radii)
        ref = oracle(radii.astype(complex))
        for r, g, o in zip(radii, fast, ref):
            rel = abs(g - o) / o
            ok &= rel <= tol
            table.add("radial", n, float(r), float(g), float(o), float(rel))
    return table, EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "density": cmd_density,
    "edge-check": cmd_edge_check,
    "fluct-check": cmd_fluct_check,
    "convergence": cmd_convergence,
    "oracle-verify": cmd_oracle_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coulomb-edge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"coulomb-edge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON config file")
        s.add_argument("--out", help="output path (default: stdout)")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
        s.add_argument("--n", type=int, nargs="+")
        s.add_argument("--t-min", dest="t_min", type=float)
        s.add_argument("--t-max", dest="t_max", type=float)
        s.add_argument("--t-step", dest="t_step", type=float)
        s.add_argument("--M", dest="M", type=float)
        s.add_argument("--C", dest="C", type=float)
        if name == "oracle-verify":
            s.add_argument("--corrupt-norm", type=int, help=argparse.SUPPRESS)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.command, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "oracle-verify":
            table, code = cmd_oracle_verify(cfg, corrupt_norm=args.corrupt_norm)
        else:
            table, code = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OracleError as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (NumericError, DropletError, CoulombEdgeError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = table.render(args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for note in table.notes:
        print(note, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
