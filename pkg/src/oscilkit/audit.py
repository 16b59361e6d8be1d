"""Self-audit: every headline check, run at its stated tolerance.

Each check returns a :class:`CheckResult`; failures are report entries, not
exceptions.  :data:`AUDIT_SCHEMA` documents the JSON report.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .abraham_lorentz import (
    ALInitialState,
    ALParams,
    char_roots,
    cubic_residuals,
    effective_oscillator,
    homogeneous_solution,
    project_to_manifold,
    susceptibility_error_ratios,
)
from .cross_sections import (
    DampingSplit,
    PhysicalConstants,
    dipole_potential_and_ratio,
    f_sum_check,
    quest_comparison,
    ratio_closed_form,
    resonant_decomposition,
    sigma_sc,
    sigma_thomson,
)
from .figures import fig2_kk_check, make_grid
from .ode_oracle import Trajectory, compare, growth_rate, integrate_al, integrate_forced
from .oscillator import (
    DriveField,
    OscillatorParams,
    response_relaxation,
    steady_state,
    steady_state_form,
    susceptibility,
)
from .quantum import (
    QuantumOscillatorModel,
    ac_stark_shift,
    chi_dd,
    chi_dd_susceptibility,
    classical_identification,
    oscillator_table,
    stark_first_order,
    stark_second_order,
)

__all__ = ["CheckResult", "AuditReport", "AUDIT_SCHEMA", "CHECKS", "run_audit"]


AUDIT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "all_passed", "n_passed", "n_failed", "checks"],
    "properties": {
        "schema": {"const": "oscilkit-audit/1"},
        "all_passed": {"type": "boolean"},
        "n_passed": {"type": "integer", "minimum": 0},
        "n_failed": {"type": "integer", "minimum": 0},
        "options": {"type": "object"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "name", "value", "bound", "passed"],
                "properties": {
                    "id": {"type": "string"},
                    "name": {"type": "string"},
                    "value": {"type": ["number", "null"]},
                    "bound": {"type": ["number", "null"]},
                    "passed": {"type": "boolean"},
                    "detail": {"type": "string"},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class CheckResult:
    """``value`` is compared against ``bound``; ``detail`` says how."""

    id: str
    name: str
    value: float
    bound: float
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        def clean(v):
            v = float(v)
            return v if math.isfinite(v) else None

        return {
            "id": self.id,
            "name": self.name,
            "value": clean(self.value),
            "bound": clean(self.bound),
            "passed": bool(self.passed),
            "detail": self.detail,
        }


def _le(id_, name, value, bound, detail):
    value = float(value)
    return CheckResult(id_, name, value, bound, bool(value <= bound), detail)


# ---- roots ---------------------------------------------------------------

SWEEP = make_grid(1e-8, 3.0, 200, log=True)
# asymptote bounds below this level are under double rounding and cannot be resolved
RESOLVABLE = 1e-12


def check_roots():
    out = []
    r = char_roots(ALParams.from_tau_omega0(2.0))
    out.append(_le("1a", "u/w0 at tau*w0=2 equals -1/4", abs(r.u + 0.25), 1e-9, "|u/w0 + 0.25|"))
    res = max(float(np.max(cubic_residuals(ALParams.from_tau_omega0(p), char_roots(ALParams.from_tau_omega0(p))))) for p in SWEEP)
    out.append(_le("1b", "cubic residual over 200 log-spaced tau*w0 in [1e-8, 3]", res, 1e-12, "max relative residual"))
    worst_v = worst_u = 0.0
    for p in SWEEP:
        bound = 5 * p**4
        if p > 0.1 or bound < RESOLVABLE:
            continue
        rr = char_roots(ALParams.from_tau_omega0(p))
        worst_v = max(worst_v, abs(rr.v / (1 - 5 * p * p / 8) - 1) / bound)
        worst_u = max(worst_u, abs(rr.u / -(p / 2 - p**3) - 1) / bound)
    out.append(_le("1c", "v/w0 matches 1 - 5p^2/8 within 5p^4 relative", worst_v, 1.0, "max rel. error / 5p^4 over resolvable p <= 0.1"))
    out.append(_le("1d", "u/w0 matches -(p/2 - p^3) within 5p^4 relative", worst_u, 1.0, "max rel. error / 5p^4 over resolvable p <= 0.1"))
    return out


def check_vieta_identity():
    worst = 0.0
    for p in SWEEP:
        al = ALParams.from_tau_omega0(p)
        r = char_roots(al)
        # Omega^2 from the complex pair versus gamma^2 + gamma/tau with gamma = -2u
        lhs = r.u**2 + r.v**2
        g = -2 * r.u
        rhs = g * g + g / al.tau
        worst = max(worst, abs(lhs / rhs - 1))
    return [_le("2", "Omega^2 = Gamma^2 + Gamma/tau across the sweep", worst, 1e-12, "max relative difference")]


# ---- Kramers-Kronig -------------------------------------------------------


def check_kk():
    t0 = time.perf_counter()
    tab = fig2_kk_check(2.0, make_grid(0.0, 3.0, 301))
    elapsed = time.perf_counter() - t0
    dev = np.abs(tab.column("kk_of_chi_im") - tab.column("chi_re"))
    dev = np.where(np.isfinite(dev), dev, np.inf)
    kx0 = tab.column("kk_of_X_im")[0]
    rx0 = tab.column("X_re")[0]
    return [
        _le("3a", "KK[chi''] reproduces chi' on [0, 3 w0] (tau*w0=2)", dev.max(), 1e-3, "max |KK[chi''] - chi'| / chi0"),
        _le("3b", "KK[Im X](0)/X0 = 0.50 +- 0.05", abs(kx0 - 0.5), 0.05, f"KK[Im X](0)/X0 = {kx0:.12g}"),
        _le("3c", "Re X(0)/X0 = 1 and differs from KK[Im X](0) by >= 40%", abs(rx0 - 1) + max(0.0, 0.4 - abs(rx0 - kx0)), 1e-12, f"Re X(0)/X0 = {rx0:.12g}"),
        _le("3d", "KK table runtime under 60 s", elapsed, 60.0, "seconds"),
    ]


# ---- sum rule --------------------------------------------------------------

SUM_RULE_OMEGA0 = 1e15


def check_sum_rule(inject_jackson: bool = False):
    K = PhysicalConstants.si_electron()
    G = K.gamma_rad(SUM_RULE_OMEGA0)
    out = []
    worst = 0.0
    for gp in (0.0, G, 10 * G):
        r = f_sum_check(SUM_RULE_OMEGA0, DampingSplit(G, gp), K, jackson=inject_jackson)
        worst = max(worst, abs(r.numeric / r.analytic - 1))
    label = "omega-dependent width (injected)" if inject_jackson else "constant width"
    out.append(_le("4a", f"f-sum rule numeric/analytic = 1 +- 5e-3, G' in {{0, G, 10G}}, {label}", worst, 5e-3, "max |ratio - 1|"))
    rj = f_sum_check(SUM_RULE_OMEGA0, DampingSplit(G, 0.0), K, jackson=True)
    dev = abs(rj.numeric / rj.analytic - 1)
    out.append(CheckResult("4b", "omega-dependent total width violates the sum rule", dev, 5e-3, bool(dev > 5e-3), "|ratio - 1| must exceed the bound"))
    return out


# ---- cross sections --------------------------------------------------------


def check_cross_sections():
    K = PhysicalConstants.si_electron()
    w0 = SUM_RULE_OMEGA0
    s0 = DampingSplit.from_constants(K, w0)
    th = sigma_thomson(K)
    out = [_le("5a", "sigma_sc(100 w0) / Thomson = 1 +- 2e-3", abs(sigma_sc(100 * w0, w0, s0, K)[0] / th - 1), 2e-3, "|ratio - 1|")]
    worst = 0.0
    for gp in (0.0, s0.gamma_rad, 10 * s0.gamma_rad):
        s = DampingSplit(s0.gamma_rad, gp)
        peak = 6 * math.pi * K.lambdabar0(w0) ** 2 * (s.gamma_rad / s.gamma_total) ** 2
        worst = max(worst, abs(sigma_sc(w0, w0, s, K)[0] / peak - 1))
    out.append(_le("5b", "sigma_sc(w0) = 6 pi lb0^2 (G/Gt)^2", worst, 1e-12, "max relative difference"))
    ray = sigma_sc(0.01 * w0, w0, s0, K)[0] / th / 0.01**4
    out.append(_le("5c", "Rayleigh ratio (w/w0)^4 at w = 0.01 w0 within 1%", abs(ray - 1), 1e-2, "|ratio - 1|"))
    worst = 0.0
    for gp in (0.0, s0.gamma_rad, 10 * s0.gamma_rad):
        s = DampingSplit(s0.gamma_rad, gp)
        for dw in np.linspace(-20, 20, 41) * s.gamma_total:
            rd = resonant_decomposition(w0 + dw, w0, s, K)
            worst = max(worst, abs(rd.sigma_abs_L - rd.sigma_sc_L - rd.sigma_r_L) / rd.sigma_abs_L)
    out.append(_le("5d", "resonant additivity sigma_abs = sigma_sc + sigma_r", worst, 1e-14, "max relative residual"))
    return out


# ---- error map -------------------------------------------------------------


def check_error_map():
    al = ALParams.from_tau_omega0(1e-8)
    w0 = al.omega0
    a = susceptibility_error_ratios(al, 0.9 * w0).im_ratio
    b = susceptibility_error_ratios(al, 1.1 * w0).im_ratio
    worst = 0.0
    for x in make_grid(0.5, 1.5, 1001):
        if abs(x - 1) > 0.005:
            worst = max(worst, abs(susceptibility_error_ratios(al, x * w0).re_ratio - 1))
    return [
        _le("6a", "Im X / chi'' at 0.9 w0 = 0.81 +- 1e-4", abs(a - 0.81), 1e-4, f"ratio = {a:.12g}"),
        _le("6b", "Im X / chi'' at 1.1 w0 = 1.21 +- 1e-4", abs(b - 1.21), 1e-4, f"ratio = {b:.12g}"),
        _le("6c", "|Re X / chi' - 1| < 3e-7 for |w/w0 - 1| > 0.005", worst, 3e-7, "max over [0.5, 1.5]"),
    ]


# ---- run-away --------------------------------------------------------------


def runaway_runs(tau_omega0: float = 0.1):
    """Shared trajectories: generic start, and a start on the bounded manifold."""
    al = ALParams.from_tau_omega0(tau_omega0)
    init = ALInitialState(1.0, 0.0, 0.0)
    generic = integrate_al(al, None, init, (0.0, 60.0 / al.omega0))
    on = ALInitialState(*project_to_manifold(al, init.as_array()))
    bounded = integrate_al(al, None, on, (0.0, 50.0 / al.omega0), project_bounded=True)
    return al, init, generic, on, bounded


def check_runaway():
    al, init, generic, on, bounded = runaway_runs()
    keep = np.abs(generic.x) <= 1e6 * abs(init.x0)
    sub = Trajectory(generic.times[keep], generic.states[keep])
    _, rel = compare(sub, lambda t: homogeneous_solution(al, init, t))
    rate = growth_rate(sub.times, sub.x)
    zeta2 = char_roots(al).zeta2
    P = effective_oscillator(al).params
    wt = math.sqrt(P.detuning_sq)
    amp = math.hypot(on.x0, (on.v0 + 0.5 * P.gamma * on.x0) / wt)
    env = np.max(np.abs(bounded.x) * np.exp(0.5 * P.gamma * bounded.times)) / amp
    return [
        _le("7a", "AL integration matches the analytic solution until |x| = 1e6 |x0|", rel, 1e-6, "max relative deviation (running envelope)"),
        _le("7b", "fitted run-away rate = zeta2 +- 1e-3", abs(rate - zeta2), 1e-3, f"rate = {rate:.10g}, zeta2 = {zeta2:.10g}"),
        _le("7c", "start on the bounded manifold stays inside exp(-G t/2) envelope (x1.01)", env, 1.01, "max |x| e^{G t/2} / amplitude over [0, 50/w0]"),
    ]


# ---- steady state ----------------------------------------------------------


def check_steady_state():
    P = OscillatorParams(1.0, 1.0, 0.1)
    drive = DriveField(1.0, 0.8)
    burn = 20.0 / P.gamma
    tr = integrate_forced(P, drive, (1.0, 0.0), (0.0, 2 * burn))
    keep = tr.times > burn
    A = steady_state_form(P, drive).amplitude
    dev = np.max(np.abs(tr.x[keep] - steady_state(P, drive, tr.times[keep]))) / A
    return [_le("8", "forced integration from (1, 0) agrees with the steady state after t > 20/G", dev, 1e-6, "max |x - xi| / A")]


# ---- quantum ---------------------------------------------------------------


def check_quantum():
    K = PhysicalConstants.si_electron()
    model = QuantumOscillatorModel.from_constants(1e15, K)
    table = oscillator_table(model, K)
    ci = classical_identification(model, K)
    w10 = model.omega_10
    g1 = table.transitions[0].gamma_n
    t = np.linspace(-20.0, 20.0, 100) / w10
    q = chi_dd(table, t, K.hbar)
    c = K.e**2 * response_relaxation(ci.params, t)[0]
    env = K.e**2 / (model.mass * w10) * np.exp(-0.5 * g1 * np.abs(t))
    td = float(np.max(np.abs(q - c) / env))
    w = np.linspace(0.0, 5.0, 1001) * w10
    qs = chi_dd_susceptibility(table, w, K.hbar)
    re, im = susceptibility(ci.params, w)
    cs = K.e**2 * (re + 1j * im)
    fd = float(np.max(np.abs(qs - cs) / np.abs(cs)))
    gam = abs(g1 / (K.tau * w10**2) - 1)
    tau_dev = abs(ci.tau / 6.3e-24 - 1)
    return [
        _le("9a", "chi_DD(t) = e^2 chi(t) at 100 times", td, 1e-12, "max deviation / envelope e^2 exp(-G|t|/2)/(m w10)"),
        _le("9b", "susceptibilities agree over [0, 5 w10]", fd, 1e-12, "max relative deviation"),
        _le("9c", "Gamma_1 = tau w10^2", gam, 1e-12, "relative difference"),
        _le("9d", "tau within 1% of 6.3e-24 s (SI constants)", tau_dev, 1e-2, f"tau = {ci.tau:.6g} s"),
    ]


# ---- ac-Stark and ratio ----------------------------------------------------


def check_stark_ratio():
    K = PhysicalConstants.si_electron()
    model = QuantumOscillatorModel.from_constants(1e15, K)
    table = oscillator_table(model, K)
    ci = classical_identification(model, K)
    E0 = 1e5
    chi0 = complex(chi_dd_susceptibility(table, 0.0, K.hbar))
    static = ci.params.static_susceptibility
    expected = -0.25 * static * K.e**2 * E0**2
    shift = float(ac_stark_shift(chi0.real, E0))
    parts = stark_first_order(chi0, E0) + stark_second_order(chi0.real, E0)
    d0 = max(abs(shift / expected - 1), abs(parts / expected - 1))

    P = ci.params
    worst = 0.0
    for x in make_grid(0.0, 3.0, 301):
        w = x * P.omega
        d = dipole_potential_and_ratio(w, E0, P, K)
        if d.pole:
            continue
        cf = ratio_closed_form(w, P)
        worst = max(worst, abs(d.ratio - cf) / max(abs(cf), 1e-300) if cf != 0 else abs(d.ratio))

    al = ALParams.from_tau_omega0(1e-8)
    Pal = effective_oscillator(al).params
    qc = quest_comparison(0.1 * Pal.omega, al, PhysicalConstants.dimensionless())
    infl = abs(qc.inflation / (1 / 0.1) ** 2 - 1)
    return [
        _le("10a", "ac-Stark shift at w = 0 equals -chi0 e^2 E0^2 / 4", d0, 4 * np.finfo(float).eps, "relative difference (both routes)"),
        _le("10b", "hbar Gamma_abs / U_dip matches 2 w G / (w^2 - W^2)", worst, 1e-12, "max relative difference on [0, 3W]"),
        _le("10c", "faulty X deflates Gamma_abs by (W/w)^2 at w = 0.1 W", infl, 1e-3, f"inflation = {qc.inflation:.10g}, ratio under-estimate = {qc.underestimate:.4f}"),
    ]


CHECKS: tuple[Callable[..., list], ...] = (
    check_roots,
    check_vieta_identity,
    check_kk,
    check_sum_rule,
    check_cross_sections,
    check_error_map,
    check_runaway,
    check_steady_state,
    check_quantum,
    check_stark_ratio,
)


@dataclass
class AuditReport:
    checks: list = field(default_factory=list)
    options: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        n_pass = sum(c.passed for c in self.checks)
        return {
            "schema": "oscilkit-audit/1",
            "all_passed": self.all_passed,
            "n_passed": n_pass,
            "n_failed": len(self.checks) - n_pass,
            "options": dict(self.options),
            "checks": [c.as_dict() for c in self.checks],
        }


def run_audit(inject_jackson: bool = False) -> AuditReport:
    """Run every check in a fixed order."""
    rep = AuditReport(options={"inject_jackson": inject_jackson})
    for fn in CHECKS:
        if fn is check_sum_rule:
            rep.checks.extend(fn(inject_jackson=inject_jackson))
        else:
            rep.checks.extend(fn())
    return rep
