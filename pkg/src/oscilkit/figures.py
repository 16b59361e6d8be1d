"""Data tables behind the figures and the other CLI commands.

Every builder returns a :class:`FigureTable` whose metadata block carries
all parameters and tolerances needed to regenerate it.  Output formatting is
fixed (17 significant digits, no timestamps), so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy import optimize

from . import __version__
from .abraham_lorentz import (
    ALInitialState,
    ALParams,
    char_roots,
    cubic_residuals,
    effective_oscillator,
    faulty_susceptibility,
    susceptibility_error_ratios,
)
from .cross_sections import (
    DampingSplit,
    PhysicalConstants,
    dipole_potential_and_ratio,
    f_sum_check,
    ratio_closed_form,
    resonant_decomposition,
    sigma_abs,
    sigma_sc,
    sigma_thomson,
)
from .dispersion import QuadratureConfig, kk_transform
from .errors import ConvergenceError
from .ode_oracle import IntegratorConfig, integrate_al
from .oscillator import OscillatorParams, susceptibility
from .quantum import (
    QuantumOscillatorModel,
    ac_stark_shift,
    chi_dd_susceptibility,
    oscillator_table,
    stark_first_order,
    stark_second_order,
)

__all__ = [
    "FigureTable",
    "make_grid",
    "fig1_roots_sweep",
    "fig2_kk_check",
    "fig3_error_map",
    "cross_section_table",
    "sum_rule_table",
    "trajectory_table",
    "stark_table",
    "faulty_peak_frequency",
]


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _jsonable(v: Any):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class FigureTable:
    name: str
    columns: tuple
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.metadata = {"table": self.name, "code_version": __version__, **self.metadata}

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"{self.name}: expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(tuple(values))

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        out = io.StringIO()
        for k, v in self.metadata.items():
            out.write(f"# {k}: {_fmt(v)}\n")
        out.write(",".join(self.columns) + "\n")
        for r in self.rows:
            out.write(",".join(_fmt(v) for v in r) + "\n")
        return out.getvalue()

    def to_json(self) -> str:
        doc = {
            "metadata": {k: _jsonable(v) for k, v in self.metadata.items()},
            "columns": list(self.columns),
            "rows": [[_jsonable(v) for v in r] for r in self.rows],
        }
        return json.dumps(doc, indent=2) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()


def make_grid(lo: float, hi: float, n: int, log: bool = False) -> np.ndarray:
    if n < 2:
        raise ValueError("grid count must be at least 2")
    if log:
        if not (lo > 0 and hi > 0):
            raise ValueError("log grid needs positive bounds")
        return np.logspace(math.log10(lo), math.log10(hi), n)
    return np.linspace(lo, hi, n)


def _grid_meta(grid):
    return {"grid_min": float(grid[0]), "grid_max": float(grid[-1]), "grid_count": int(len(grid))}


# ---- roots sweep ---------------------------------------------------------


def fig1_roots_sweep(grid: Sequence[float]) -> FigureTable:
    """Roots of the AL characteristic polynomial against tau*omega0 (omega0 = 1).

    Asymptotes are the truncated small-tau series ``u = -(p/2 - p^3)`` and
    ``v = 1 - 5 p^2 / 8``.
    """
    grid = np.asarray(grid, dtype=float)
    t = FigureTable(
        "fig1",
        ("tau_w0", "u_over_w0", "v_over_w0", "zeta2_over_w0", "u_asymptote", "v_asymptote", "cubic_residual", "method"),
        metadata={**_grid_meta(grid), "omega0": 1.0, "root_rtol": 1e-12},
    )
    for p in grid:
        al = ALParams.from_tau_omega0(float(p))
        r = char_roots(al)
        res = float(np.max(cubic_residuals(al, r)))
        t.add(float(p), r.u, r.v, r.zeta2, -(p / 2 - p**3), 1 - 5 * p * p / 8, res, r.method)
    return t


# ---- Kramers-Kronig check ------------------------------------------------


def faulty_peak_frequency(al: ALParams) -> float:
    """Frequency of the maximum of ``omega Im X(omega)``."""
    f = lambda w: -w * float(np.imag(faulty_susceptibility(al, w)))
    ws = np.linspace(1e-3, 3.0, 3001) * al.omega0
    k = int(np.argmin([f(w) for w in ws]))
    lo, hi = ws[max(k - 1, 0)], ws[min(k + 1, len(ws) - 1)]
    res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12 * al.omega0})
    return float(res.x)


def fig2_kk_check(tau_omega0: float, grid: Sequence[float], cfg: QuadratureConfig | None = None) -> FigureTable:
    """Reactive parts next to the Hilbert transforms of the dissipative parts.

    chi columns are divided by ``chi0 = 1/(m Omega^2)``, X columns by
    ``X0 = 1/(m omega0^2)``; omega is in units of omega0.
    """
    cfg = cfg or QuadratureConfig(truncation=1e4)
    grid = np.asarray(grid, dtype=float)
    al = ALParams.from_tau_omega0(tau_omega0)
    P = effective_oscillator(al).params
    chi0 = P.static_susceptibility
    X0 = 1.0 / (al.mass * al.omega0**2)
    chi_im = lambda w: float(susceptibility(P, w)[1])
    X_im = lambda w: float(np.imag(faulty_susceptibility(al, w)))
    wm = faulty_peak_frequency(al)
    t = FigureTable(
        "fig2",
        ("omega", "chi_re", "omega_chi_im", "X_re", "omega_X_im", "kk_of_chi_im", "kk_of_X_im", "flag"),
        metadata={
            **_grid_meta(grid),
            "tau_w0": tau_omega0,
            "Omega": P.omega,
            "Gamma": P.gamma,
            "omega_m_X": wm,
            "omega0": al.omega0,
            "grid_lines_ordered": bool(P.omega < wm < al.omega0),
            "chi0": chi0,
            "X0": X0,
            "kk_truncation": cfg.truncation,
            "kk_excision": cfg.excision_halfwidth,
            "kk_rel_tol": cfg.rel_tol,
        },
    )
    for w in grid:
        w = float(w)
        re, im = susceptibility(P, w)
        X = complex(faulty_susceptibility(al, w))
        flag = 0
        try:
            kc = kk_transform(chi_im, w, cfg, scale=P.omega, points=(P.omega, -P.omega)) / chi0
            kx = kk_transform(X_im, w, cfg, scale=al.omega0, points=(al.omega0, -al.omega0)) / X0
        except ConvergenceError:
            kc = kx = math.nan
            flag = 1
        t.add(w, float(re) / chi0, w * float(im) / chi0, X.real / X0, w * X.imag / X0, kc, kx, flag)
    return t


# ---- error map -----------------------------------------------------------


def fig3_error_map(tau_omega0: float, grid: Sequence[float]) -> FigureTable:
    """Relative errors of the faulty susceptibility against the true one.

    ``re_ratio_err = Re X / chi' - 1`` and ``im_ratio_err = Im X / chi'' - 1``.
    Values are unscaled; the plotting scalings go into the metadata.
    """
    grid = np.asarray(grid, dtype=float)
    al = ALParams.from_tau_omega0(tau_omega0)
    P = effective_oscillator(al).params
    chi0 = P.static_susceptibility
    t = FigureTable(
        "fig3",
        ("omega_over_w0", "chi_re", "chi_im", "re_ratio_err", "im_ratio_err", "in_validity_range", "singular"),
        metadata={
            **_grid_meta(grid),
            "tau_w0": tau_omega0,
            "chi_normalization": "chi0 = 1/(m Omega^2)",
            "plot_scale_chi_im": 1e6,
            "plot_scale_re_ratio_err": 1e8,
            "plot_scale_im_ratio_err": 1e2,
        },
    )
    for x in grid:
        w = float(x) * al.omega0
        re, im = susceptibility(P, w)
        er = susceptibility_error_ratios(al, w)
        t.add(float(x), float(re) / chi0, float(im) / chi0, er.re_ratio - 1, er.im_ratio - 1, er.in_validity_range, er.singular)
    return t


# ---- cross sections ------------------------------------------------------


def cross_section_table(omega0: float, gamma_prime: float, consts: PhysicalConstants, grid_over_w0: Sequence[float]) -> FigureTable:
    """Absorption and scattering cross sections with regime labels and resonant forms."""
    split = DampingSplit.from_constants(consts, omega0, gamma_prime)
    lb0 = consts.lambdabar0(omega0)
    unit_abs = 6 * math.pi * lb0**2
    unit_sc = sigma_thomson(consts)
    t = FigureTable(
        "cross-sections",
        (
            "omega_over_w0",
            "sigma_abs",
            "sigma_sc",
            "sigma_abs_over_6pi_lb0sq",
            "sigma_sc_over_thomson",
            "regime",
            "sigma_abs_L",
            "sigma_sc_L",
            "sigma_r_L",
            "resonant_valid",
        ),
        metadata={
            **_grid_meta(np.asarray(grid_over_w0, dtype=float)),
            "omega0": omega0,
            "tau": consts.tau,
            "tau_w0": consts.tau * omega0,
            "gamma": split.gamma_rad,
            "gamma_prime": split.gamma_prime,
            "gamma_total": split.gamma_total,
            "lambdabar0": lb0,
            "thomson": unit_sc,
        },
    )
    for x in grid_over_w0:
        w = float(x) * omega0
        sa = float(sigma_abs(w, omega0, split, lb0))
        ss, regime = sigma_sc(w, omega0, split, consts)
        rd = resonant_decomposition(w, omega0, split, consts)
        t.add(float(x), sa, ss, sa / unit_abs, ss / unit_sc, regime or "", rd.sigma_abs_L, rd.sigma_sc_L, rd.sigma_r_L, rd.valid)
    return t


def sum_rule_table(omega0: float, consts: PhysicalConstants, gamma_primes: Sequence[float], cfg: QuadratureConfig | None = None, tol: float = 5e-3) -> FigureTable:
    """Integrated absorption against the sum-rule value, constant and faulty widths."""
    cfg = cfg or QuadratureConfig()
    G = consts.gamma_rad(omega0)
    t = FigureTable(
        "sum-rule",
        ("gamma_prime_over_gamma", "width_model", "numeric", "analytic", "ratio", "passed"),
        metadata={"omega0": omega0, "gamma": G, "tau": consts.tau, "tolerance": tol, "quad_rel_tol": cfg.rel_tol, "cutoff_factor": 1e4},
    )
    for gp in gamma_primes:
        split = DampingSplit(G, float(gp))
        for jackson in (False, True):
            r = f_sum_check(omega0, split, consts, cfg, jackson=jackson)
            ratio = r.numeric / r.analytic
            t.add(float(gp) / G if G > 0 else math.nan, "omega_dependent" if jackson else "constant", r.numeric, r.analytic, ratio, abs(ratio - 1) <= tol)
    return t


def trajectory_table(tau_omega0: float, init: ALInitialState, t_end: float, cfg: IntegratorConfig | None = None, project_bounded: bool = False) -> FigureTable:
    """Free AL motion from ``init`` (omega0 = m = 1), stopped at divergence."""
    cfg = cfg or IntegratorConfig()
    al = ALParams.from_tau_omega0(tau_omega0)
    tr = integrate_al(al, None, init, (0.0, t_end), cfg, project_bounded=project_bounded)
    t = FigureTable(
        "trajectory",
        ("t", "x", "v", "b"),
        metadata={
            "tau_w0": tau_omega0,
            "x0": init.x0,
            "v0": init.v0,
            "b0": init.b0,
            "t_end": t_end,
            "rel_tol": cfg.rel_tol,
            "abs_tol": cfg.abs_tol,
            "project_bounded": project_bounded,
            "zeta2": char_roots(al).zeta2,
            "diverged_at": tr.diverged_at,
            "exhausted": tr.exhausted,
        },
    )
    for time, y in zip(tr.times, tr.states):
        t.add(float(time), *map(float, y))
    return t


def stark_table(omega_10: float, consts: PhysicalConstants, E0: float, grid_over_w10: Sequence[float]) -> FigureTable:
    """ac-Stark shift of the quantum oscillator and the rate/potential ratio."""
    model = QuantumOscillatorModel.from_constants(omega_10, consts)
    table = oscillator_table(model, consts)
    tr = table.transitions[0]
    P = OscillatorParams(model.mass, math.sqrt(tr.omega_sq), tr.gamma_n)
    t = FigureTable(
        "stark",
        ("omega_over_w10", "chi_re", "delta_eps", "first_order", "second_order", "u_dip", "ratio", "ratio_closed_form", "pole"),
        metadata={"omega_10": omega_10, "gamma_1": tr.gamma_n, "E0": E0, "hbar": consts.hbar, "e": consts.e, "m": consts.m_e},
    )
    for x in grid_over_w10:
        w = float(x) * omega_10
        chi = complex(chi_dd_susceptibility(table, w, consts.hbar))
        d = dipole_potential_and_ratio(w, E0, P, consts)
        t.add(
            float(x),
            chi.real,
            float(ac_stark_shift(chi.real, E0)),
            stark_first_order(chi, E0),
            stark_second_order(chi.real, E0),
            d.u_dip,
            d.ratio,
            ratio_closed_form(w, P),
            d.pole,
        )
    return t
