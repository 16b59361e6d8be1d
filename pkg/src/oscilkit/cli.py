"""Command-line front end: ``oscilkit <command> [options]``.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .abraham_lorentz import ALInitialState
from .audit import run_audit
from .cross_sections import PhysicalConstants
from .errors import ConvergenceError, DomainError, GrowthBoundError
from .figures import (
    FigureTable,
    cross_section_table,
    fig1_roots_sweep,
    fig2_kk_check,
    fig3_error_map,
    make_grid,
    stark_table,
    sum_rule_table,
    trajectory_table,
)

COMMANDS = ("fig1", "fig2", "fig3", "cross-sections", "sum-rule", "trajectory", "stark", "audit")

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

# command -> (tau*omega0, grid) defaults
DEFAULTS = {
    "fig1": (None, "1e-8:3:200:log"),
    "fig2": (2.0, "0:3:301"),
    "fig3": (1e-8, "0.5:1.5:1001"),
    "cross-sections": (1e-8, "1e-3:1e3:601:log"),
    "sum-rule": (1e-8, None),
    "trajectory": (0.1, None),
    "stark": (1e-8, "0:3:301"),
    "audit": (None, None),
}


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    count: int
    log: bool = False

    def values(self) -> np.ndarray:
        return make_grid(self.lo, self.hi, self.count, self.log)


@dataclass(frozen=True)
class RunConfig:
    command: str
    tau_omega0: Optional[float]
    gamma_prime: Optional[float]
    grid: Optional[Grid]
    si_electron: bool
    omega0: Optional[float]
    format: str
    out_path: Optional[str]


def parse_grid(text: str) -> Grid:
    """``min:max:n`` with an optional ``:log`` suffix."""
    parts = text.split(":")
    log = False
    if len(parts) == 4 and parts[3] == "log":
        log = True
        parts = parts[:3]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be min:max:n[:log], got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None
    if n < 2:
        raise argparse.ArgumentTypeError("grid count must be at least 2")
    if not hi > lo:
        raise argparse.ArgumentTypeError("grid max must exceed min")
    if log and lo <= 0:
        raise argparse.ArgumentTypeError("log grid needs a positive minimum")
    return Grid(lo, hi, n, log)


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _nonneg(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return v


def _triple(text: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x0,v0,b0, got {text!r}") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected x0,v0,b0, got {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="oscilkit",
        description="Regenerate oscillator / radiation-reaction data tables and run the self-audit.",
        epilog=(
            "Transition tables for the quantum module are JSON documents "
            '{"mass": m, "charge": e, "transitions": [{"omega": w, "dipole_sq": d2, "gamma": g}]} in SI units.'
        ),
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--tau-omega0", type=_positive, help="dimensionless tau*omega0 (command-specific default)")
    p.add_argument("--gamma-prime", type=_nonneg, help="non-radiative damping, in the units of omega0")
    p.add_argument("--grid", type=parse_grid, help="frequency/parameter grid min:max:n[:log]")
    p.add_argument("--si-electron", action="store_true", help="use SI electron constants (needs --omega0)")
    p.add_argument("--omega0", type=_positive, help="resonance frequency in rad/s for --si-electron")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--t-end", type=_positive, default=60.0, help="trajectory: end time in units of 1/omega0")
    p.add_argument("--init", type=_triple, default=(1.0, 0.0, 0.0), help="trajectory: x0,v0,b0")
    p.add_argument("--project-bounded", action="store_true", help="trajectory: stay on the bounded manifold")
    p.add_argument("--e0", type=_positive, default=1.0, help="stark: field amplitude")
    p.add_argument("--inject-jackson", action="store_true", help="audit: use an omega-dependent total width in the sum-rule check")
    return p


def _constants(cfg: RunConfig, tau_omega0: float):
    """Constants and omega0 for the chosen unit system."""
    if cfg.si_electron:
        return PhysicalConstants.si_electron(), cfg.omega0
    return PhysicalConstants.dimensionless(tau=tau_omega0), 1.0


def _table(cfg: RunConfig, args) -> FigureTable:
    tau_default, grid_default = DEFAULTS[cfg.command]
    tau = cfg.tau_omega0 if cfg.tau_omega0 is not None else tau_default
    grid = cfg.grid or (parse_grid(grid_default) if grid_default else None)

    if cfg.command == "fig1":
        return fig1_roots_sweep(grid.values())
    if cfg.command == "fig2":
        return fig2_kk_check(tau, grid.values())
    if cfg.command == "fig3":
        return fig3_error_map(tau, grid.values())
    if cfg.command == "cross-sections":
        K, w0 = _constants(cfg, tau)
        return cross_section_table(w0, cfg.gamma_prime or 0.0, K, grid.values())
    if cfg.command == "sum-rule":
        K, w0 = _constants(cfg, tau)
        G = K.gamma_rad(w0)
        gps = [cfg.gamma_prime] if cfg.gamma_prime is not None else [0.0, G, 10 * G]
        return sum_rule_table(w0, K, gps)
    if cfg.command == "trajectory":
        return trajectory_table(tau, ALInitialState(*args.init), args.t_end, project_bounded=args.project_bounded)
    if cfg.command == "stark":
        K, w0 = _constants(cfg, tau)
        return stark_table(w0, K, args.e0, grid.values())
    raise AssertionError(cfg.command)


def _emit(text: str, out_path: Optional[str]):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _audit(cfg: RunConfig, args) -> int:
    t0 = time.perf_counter()
    rep = run_audit(inject_jackson=args.inject_jackson)
    elapsed = time.perf_counter() - t0
    if cfg.format == "json":
        text = json.dumps(rep.as_dict(), indent=2) + "\n"
    else:
        tab = FigureTable("audit", ("id", "name", "value", "bound", "passed", "detail"), metadata={"inject_jackson": args.inject_jackson})
        for c in rep.checks:
            tab.add(c.id, c.name, c.value, c.bound, c.passed, c.detail)
        text = tab.to_csv()
    _emit(text, cfg.out_path)
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} [{c.id}] {c.name}: {c.value:.4g} (bound {c.bound:.4g})", file=sys.stderr)
    print(f"audit finished in {elapsed:.1f} s", file=sys.stderr)
    return EXIT_OK if rep.all_passed else EXIT_CHECK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.si_electron and args.omega0 is None:
        parser.error("--si-electron needs --omega0")
    if args.omega0 is not None and not args.si_electron:
        parser.error("--omega0 only applies with --si-electron")
    cfg = RunConfig(
        command=args.command,
        tau_omega0=args.tau_omega0,
        gamma_prime=args.gamma_prime,
        grid=args.grid,
        si_electron=args.si_electron,
        omega0=args.omega0,
        format=args.format,
        out_path=args.out,
    )
    try:
        if cfg.command == "audit":
            return _audit(cfg, args)
        table = _table(cfg, args)
        _emit(table.render(cfg.format), cfg.out_path)
        return EXIT_OK
    except (ConvergenceError, GrowthBoundError, FloatingPointError) as exc:
        print(f"oscilkit: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, ValueError, OSError) as exc:
        print(f"oscilkit: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
