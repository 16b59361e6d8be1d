"""Physical constants and the optical observables of a damped Lorentz atom.

Absorption and scattering cross sections, the f-sum rule, the photon
absorption rate and the optical dipole potential.  Constants are injected
through :class:`PhysicalConstants` so that SI and dimensionless runs share
one code path.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import constants as _codata
from scipy import integrate

from .abraham_lorentz import ALParams, effective_oscillator, faulty_susceptibility
from .dispersion import QuadratureConfig
from .errors import ConvergenceError, DomainError
from .oscillator import DriveField, OscillatorParams, absorbed_power, susceptibility

__all__ = [
    "PhysicalConstants",
    "DampingSplit",
    "sigma_abs",
    "sigma_abs_from_power",
    "jackson_gamma_total",
    "SumRuleResult",
    "f_sum_check",
    "gamma_abs",
    "sigma_thomson",
    "sigma_sc",
    "ResonantDecomposition",
    "resonant_decomposition",
    "DipoleRatio",
    "ratio_closed_form",
    "dipole_potential_and_ratio",
    "QuestComparison",
    "quest_comparison",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Charge, mass, light speed, vacuum permittivity and reduced Planck constant."""

    e: float
    m_e: float
    c: float
    eps0: float
    hbar: float

    def __post_init__(self):
        for name in ("e", "m_e", "c", "eps0", "hbar"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v}")

    @classmethod
    def si_electron(cls) -> "PhysicalConstants":
        # CODATA values as shipped with scipy.constants
        return cls(
            e=_codata.e,
            m_e=_codata.m_e,
            c=_codata.c,
            eps0=_codata.epsilon_0,
            hbar=_codata.hbar,
        )

    @classmethod
    def dimensionless(cls, tau: float | None = None) -> "PhysicalConstants":
        """Units with e = m = eps0 = hbar = 1.

        ``c`` is 1 unless ``tau`` is given, in which case c is chosen so that
        ``e^2 / (6 pi eps0 m c^3)`` equals ``tau``.
        """
        if tau is None:
            return cls(e=1.0, m_e=1.0, c=1.0, eps0=1.0, hbar=1.0)
        if not tau > 0:
            raise DomainError("tau must be positive")
        return cls(e=1.0, m_e=1.0, c=(1.0 / (6 * math.pi * tau)) ** (1.0 / 3.0), eps0=1.0, hbar=1.0)

    @property
    def alpha_fs(self) -> float:
        return self.e**2 / (4 * math.pi * self.eps0 * self.hbar * self.c)

    @property
    def tau(self) -> float:
        """Radiation-reaction time ``e^2 / (6 pi eps0 m c^3)``."""
        return self.e**2 / (6 * math.pi * self.eps0 * self.m_e * self.c**3)

    @property
    def R(self) -> float:
        """Classical radius ``e^2 / (4 pi eps0 m c^2)``."""
        return self.e**2 / (4 * math.pi * self.eps0 * self.m_e * self.c**2)

    def lambdabar0(self, omega0: float) -> float:
        if not omega0 > 0:
            raise DomainError("omega0 must be positive")
        return self.c / omega0

    def gamma_rad(self, omega0: float) -> float:
        """Radiative damping ``tau omega0^2``."""
        return self.tau * omega0**2


@dataclass(frozen=True)
class DampingSplit:
    """Radiative damping, extra non-radiative damping and their (constant) sum."""

    gamma_rad: float
    gamma_prime: float = 0.0

    def __post_init__(self):
        for name in ("gamma_rad", "gamma_prime"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be non-negative and finite, got {v}")

    @property
    def gamma_total(self) -> float:
        return self.gamma_rad + self.gamma_prime

    @classmethod
    def from_constants(cls, consts: PhysicalConstants, omega0: float, gamma_prime: float = 0.0):
        return cls(consts.gamma_rad(omega0), gamma_prime)


def _lorentz_den(omega, omega0, gamma_t):
    return (omega0**2 - omega**2) ** 2 + (omega * gamma_t) ** 2


def sigma_abs(omega, omega0: float, split: DampingSplit, lambdabar0: float):
    """Absorption cross section ``6 pi lb0^2 G Gt w^2 / [(w0^2-w^2)^2 + (w Gt)^2]``."""
    if not omega0 > 0:
        raise DomainError("omega0 must be positive")
    w = np.asarray(omega, dtype=float)
    Gt = split.gamma_total
    out = 6 * math.pi * lambdabar0**2 * split.gamma_rad * Gt * w**2 / _lorentz_den(w, omega0, Gt)
    return out[()] if out.ndim == 0 else out


def sigma_abs_from_power(omega: float, omega0: float, split: DampingSplit, consts: PhysicalConstants, E0: float = 1.0) -> float:
    """Absorption cross section as absorbed power over incident intensity.

    Independent of :func:`sigma_abs`; the two agree when ``gamma_rad`` equals
    ``consts.tau * omega0**2``.
    """
    params = OscillatorParams(consts.m_e, omega0, split.gamma_total)
    P = absorbed_power(params, DriveField(consts.e * E0, omega))
    return P / (0.5 * consts.eps0 * consts.c * E0**2)


def jackson_gamma_total(omega, omega0: float, split: DampingSplit):
    """Frequency-dependent total width ``G' + (w/w0)^2 G`` (the faulty variant)."""
    w = np.asarray(omega, dtype=float)
    return split.gamma_prime + (w / omega0) ** 2 * split.gamma_rad


@dataclass(frozen=True)
class SumRuleResult:
    numeric: float
    analytic: float
    rel_err: float
    cutoff: float
    tail: float
    jackson: bool


def _quad_panels(fn, edges, cfg: QuadratureConfig):
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, _ = integrate.quad(fn, a, b, epsabs=0.0, epsrel=cfg.rel_tol, limit=cfg.max_subdivisions)
            except integrate.IntegrationWarning as exc:
                raise ConvergenceError(f"quadrature failed on [{a}, {b}]: {exc}", estimate=total) from exc
        total += val
    return total


def _peak_edges(omega0, width, upper):
    """Panel edges on [0, upper] that resolve a line of given width at omega0."""
    edges = {0.0, upper}
    k = 0.5 * width
    while k < max(omega0, upper):
        for e in (omega0 - k, omega0 + k):
            if 0.0 < e < upper:
                edges.add(e)
        k *= 4.0
    e = 2.0 * omega0
    while e < upper:
        edges.add(e)
        e *= 4.0
    if 0.0 < omega0 < upper:
        edges.add(omega0)
    return np.array(sorted(edges))


def f_sum_check(
    omega0: float,
    split: DampingSplit,
    consts: PhysicalConstants,
    cfg: Optional[QuadratureConfig] = None,
    *,
    jackson: bool = False,
    cutoff_factor: float = 1e4,
) -> SumRuleResult:
    """Integrate the absorption cross section over all positive frequencies.

    The integral runs in peak-aware panels up to ``cutoff_factor *
    max(omega0, Gt)``; the remainder is added in closed form (constant
    width) or by quadrature to infinity (``jackson=True``, whose integrand
    only starts to fall off near ``omega0^2 / G``).  The analytic value is
    ``pi e^2 / (2 eps0 c m)``.
    """
    cfg = cfg or QuadratureConfig()
    if not omega0 > 0:
        raise DomainError("omega0 must be positive")
    lb0 = consts.lambdabar0(omega0)
    Gt = split.gamma_total
    G = split.gamma_rad
    cutoff = cutoff_factor * max(omega0, Gt)
    analytic = math.pi * consts.e**2 / (2 * consts.eps0 * consts.c * consts.m_e)

    # integrate sigma / (6 pi lb0^2), which peaks at G/Gt, in the detuning
    # d = w - w0 with w0^2 - w^2 = -d (2 w0 + d) so the line stays resolved
    # even when Gt/w0 is near machine epsilon
    width = jackson_gamma_total if jackson else (lambda w, *_: Gt)

    def fn(d):
        w = omega0 + d
        gt = float(width(w, omega0, split))
        return G * gt * w * w / ((d * (2 * omega0 + d)) ** 2 + (w * gt) ** 2)

    edges = _peak_edges(omega0, max(Gt, 1e-300), cutoff) - omega0
    edges[np.argmin(np.abs(edges))] = 0.0
    body = _quad_panels(fn, edges, cfg)

    if not jackson:
        # int_L^inf G Gt / w^2 [1 - (Gt^2 - 2 w0^2)/w^2 + ...] dw
        tail = G * Gt / cutoff * (1.0 - (Gt**2 - 2 * omega0**2) / (3 * cutoff**2))
    else:
        knee = omega0**2 / G if G > 0 else cutoff
        tail_edges = [cutoff]
        while tail_edges[-1] < 1e4 * max(knee, cutoff):
            tail_edges.append(tail_edges[-1] * 10.0)
        tail = _quad_panels(fn, np.array(tail_edges) - omega0, cfg)
        # far beyond the knee the integrand is w0^2/w^2 up to O((knee/w)^2)
        far = omega0**2 / tail_edges[-1]
        tail += far

    scale = 6 * math.pi * lb0**2
    numeric = scale * (body + tail)
    return SumRuleResult(
        numeric=numeric,
        analytic=analytic,
        rel_err=numeric / analytic - 1.0,
        cutoff=cutoff,
        tail=scale * tail,
        jackson=jackson,
    )


def gamma_abs(omega, E0: float, chi_im, consts: PhysicalConstants):
    """Photon absorption rate ``chi'' e^2 E0^2 / (2 hbar)`` for w > 0, zero otherwise."""
    w = np.asarray(omega, dtype=float)
    rate = np.where(w > 0, np.asarray(chi_im, dtype=float) * consts.e**2 * E0**2 / (2 * consts.hbar), 0.0)
    return rate[()] if rate.ndim == 0 else rate


def sigma_thomson(consts: PhysicalConstants) -> float:
    return 8 * math.pi / 3 * consts.R**2


# regime thresholds (artifact choices; only asymptotic statements exist)
RAYLEIGH_MAX = 0.1
RESONANT_WIDTHS = 10.0
THOMSON_MIN = 10.0


def _regime(w, omega0, gamma_t):
    if w < RAYLEIGH_MAX * omega0:
        return "Rayleigh"
    if abs(w - omega0) < RESONANT_WIDTHS * gamma_t:
        return "Resonant"
    if w > THOMSON_MIN * omega0:
        return "Thomson"
    return None


def sigma_sc(omega: float, omega0: float, split: DampingSplit, consts: PhysicalConstants):
    """Scattering cross section and its regime label.

    ``(8 pi/3) R^2 w^4 / [(w0^2-w^2)^2 + (w Gt)^2]`` with resonance at
    ``omega0``.  The label is one of ``"Rayleigh"``, ``"Resonant"``,
    ``"Thomson"`` or None between regimes.
    """
    if not omega0 > 0:
        raise DomainError("omega0 must be positive")
    w = float(omega)
    Gt = split.gamma_total
    value = sigma_thomson(consts) * w**4 / _lorentz_den(w, omega0, Gt)
    return float(value), _regime(abs(w), omega0, Gt)


@dataclass(frozen=True)
class ResonantDecomposition:
    sigma_abs_L: float
    sigma_sc_L: float
    sigma_r_L: float
    valid: bool


# |w - w0| below this fraction of w0 counts as near resonance
RESONANT_VALIDITY = 0.1


def resonant_decomposition(omega: float, omega0: float, split: DampingSplit, consts: PhysicalConstants) -> ResonantDecomposition:
    """Near-resonance Lorentz forms of the absorption, scattering and reaction cross sections.

    All share ``6 pi lb0^2 / 4 / [(w-w0)^2 + (Gt/2)^2]`` and carry the
    numerators ``G Gt``, ``G^2`` and ``G G'``.
    """
    lb0 = consts.lambdabar0(omega0)
    G, Gp, Gt = split.gamma_rad, split.gamma_prime, split.gamma_total
    base = 6 * math.pi * lb0**2 / 4 / ((omega - omega0) ** 2 + (0.5 * Gt) ** 2)
    return ResonantDecomposition(
        sigma_abs_L=base * G * Gt,
        sigma_sc_L=base * G * G,
        sigma_r_L=base * G * Gp,
        valid=abs(omega - omega0) < RESONANT_VALIDITY * omega0,
    )


@dataclass(frozen=True)
class DipoleRatio:
    u_dip: float
    gamma_abs: float
    ratio: float
    pole: bool
    low_frequency: float
    near_resonance: float


def ratio_closed_form(omega: float, oscillator: OscillatorParams) -> float:
    """``hbar Gamma_abs / U_dip = 2 w G / (w^2 - W^2)``."""
    W2 = oscillator.omega**2
    den = omega * omega - W2
    if den == 0:
        return math.nan
    return 2 * omega * oscillator.gamma / den


def dipole_potential_and_ratio(omega: float, E0: float, oscillator: OscillatorParams, consts: PhysicalConstants) -> DipoleRatio:
    """Optical dipole potential ``-chi' e^2 E0^2 / 4`` and the rate/potential ratio.

    The ratio is formed from the two observables, not from the closed form.
    ``low_frequency`` is ``-2 w G / W^2`` and ``near_resonance`` is ``G / (w - W)``.
    """
    if omega < 0:
        raise DomainError("omega must be non-negative")
    re, im = susceptibility(oscillator, omega)
    u = -float(re) * consts.e**2 * E0**2 / 4
    g = float(gamma_abs(omega, E0, im, consts))
    W = oscillator.omega
    pole = u == 0 or abs(omega - W) <= 1e-12 * W
    ratio = math.nan if pole else consts.hbar * g / u
    near = math.nan if omega == W else oscillator.gamma / (omega - W)
    return DipoleRatio(
        u_dip=u,
        gamma_abs=g,
        ratio=ratio,
        pole=pole,
        low_frequency=-2 * omega * oscillator.gamma / W**2,
        near_resonance=near,
    )


@dataclass(frozen=True)
class QuestComparison:
    omega: float
    gamma_abs_true: float
    gamma_abs_faulty: float
    ratio_true: float
    ratio_faulty: float
    inflation: float
    underestimate: float


def quest_comparison(omega: float, al: ALParams, consts: PhysicalConstants, E0: float = 1.0) -> QuestComparison:
    """Compare rate and rate/potential ratio from the true and the faulty susceptibility.

    ``inflation`` is ``Gamma_abs(true) / Gamma_abs(faulty)``, close to
    ``(W/w)^2`` for w well below resonance; ``underestimate`` is the fraction
    by which the faulty ratio falls short of the true one.
    """
    eff = effective_oscillator(al)
    P = eff.params
    re, im = susceptibility(P, omega)
    X = faulty_susceptibility(al, omega)
    gt = float(gamma_abs(omega, E0, im, consts))
    gf = float(gamma_abs(omega, E0, X.imag, consts))
    r_true = -2 * float(im) / float(re)
    r_faulty = float(-2 * X.imag / X.real)
    return QuestComparison(
        omega=omega,
        gamma_abs_true=gt,
        gamma_abs_faulty=gf,
        ratio_true=r_true,
        ratio_faulty=r_faulty,
        inflation=gt / gf if gf != 0 else math.inf,
        underestimate=1.0 - r_faulty / r_true if r_true != 0 else math.nan,
    )
