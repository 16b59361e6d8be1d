"""Classical forced oscillator  x'' + G x' + W^2 x = f(t)/m.

Closed forms for the response and relaxation functions, the dynamical
susceptibility, the steady-state elongation under a sinusoidal force and the
average absorbed power.

Response functions are kept in real arithmetic through the surrogate
``C(t) = i m chi(t)``, which is real and odd in t.  ``chi(t)`` itself is
purely imaginary; :func:`response_relaxation` re-attaches the ``1/(i m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "OscillatorParams",
    "DerivedFreqs",
    "DriveField",
    "SteadyStateForm",
    "characteristic_freqs",
    "response_surrogate",
    "relaxation",
    "response_relaxation",
    "susceptibility",
    "susceptibility_z",
    "relaxation_z",
    "steady_state",
    "steady_state_derivatives",
    "steady_state_form",
    "absorbed_power",
]

# |G - 2W| below this fraction of W is treated as critical damping
DEGENERATE_RTOL = 1e-8


@dataclass(frozen=True)
class OscillatorParams:
    """Mass, resonance frequency ``omega`` and damping ``gamma``."""

    mass: float
    omega: float
    gamma: float

    def __post_init__(self):
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise DomainError(f"mass must be positive and finite, got {self.mass}")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise DomainError(f"omega must be positive and finite, got {self.omega}")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be non-negative and finite, got {self.gamma}")

    @property
    def static_susceptibility(self) -> float:
        """``1/(m W^2)``, the zero-frequency elongation per unit force."""
        return 1.0 / (self.mass * self.omega**2)

    @property
    def detuning_sq(self) -> float:
        """Signed ``W^2 - (G/2)^2``; negative in the overdamped regime."""
        return self.omega**2 - 0.25 * self.gamma**2

    @property
    def regime(self) -> str:
        if abs(self.gamma - 2 * self.omega) < DEGENERATE_RTOL * self.omega:
            return "critical"
        return "underdamped" if self.gamma < 2 * self.omega else "overdamped"


@dataclass(frozen=True)
class DerivedFreqs:
    omega_tilde: complex
    theta: float
    zeta1: complex
    zeta2: complex
    omega_r: float
    omega_m: float


@dataclass(frozen=True)
class DriveField:
    """Force ``f0 cos(omega t)``."""

    f0: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.f0) and math.isfinite(self.omega)):
            raise DomainError("drive amplitude and frequency must be finite")

    def __call__(self, t):
        return self.f0 * np.cos(self.omega * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class SteadyStateForm:
    amplitude: float
    phase_lag: float
    chi_re: float
    chi_im: float


def characteristic_freqs(params: OscillatorParams) -> DerivedFreqs:
    """Frequencies derived from (W, G).

    ``omega_tilde`` is real below critical damping and purely imaginary above
    it.  ``theta`` is ``arctan(G / 2 omega_tilde)``; it is ``pi/2`` at critical
    damping and NaN in the overdamped regime where no real phase exists.
    ``omega_m`` is 0 when ``G^2 > 2 W^2`` (amplitude decreases monotonically).
    """
    W, G = params.omega, params.gamma
    d = params.detuning_sq
    if d > 0:
        omega_tilde = complex(math.sqrt(d), 0.0)
    else:
        omega_tilde = complex(0.0, math.sqrt(-d))

    regime = params.regime
    if regime == "underdamped":
        theta = math.atan2(G, 2 * omega_tilde.real)
    elif regime == "critical":
        theta = math.pi / 2
    else:
        theta = math.nan

    # roots of z^2 + G z + W^2, written to avoid cancellation
    disc = np.sqrt(complex(0.25 * G * G - W * W))
    if G > 0:
        z1 = -0.5 * G - disc if disc.real >= 0 else -0.5 * G + disc
        z2 = W * W / z1
        zeta1, zeta2 = sorted((complex(z1), complex(z2)), key=lambda z: (-z.imag, -z.real))
    else:
        zeta1, zeta2 = complex(0, W), complex(0, -W)

    radicand = 1.0 - G * G / (2 * W * W)
    omega_m = W * math.sqrt(radicand) if radicand > 0 else 0.0
    return DerivedFreqs(
        omega_tilde=omega_tilde,
        theta=theta,
        zeta1=zeta1,
        zeta2=zeta2,
        omega_r=W,
        omega_m=omega_m,
    )


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("time arguments must be finite")
    return t


def _kernels(params: OscillatorParams, t):
    """Return ``(C(t), phi(t))`` with the even/odd extension to t < 0."""
    G = params.gamma
    d = params.detuning_sq
    a = np.abs(t)
    half = 0.5 * G
    # sin(wt a)/wt and expm1(-2ka)/2k stay accurate as wt, k -> 0, so only the
    # exactly degenerate case needs the confluent t e^{-Gt/2} form
    if d == 0.0:
        decay = np.exp(-half * a)
        c_abs = a * decay
        cos_part = decay
    elif d > 0:
        wt = math.sqrt(d)
        decay = np.exp(-half * a)
        c_abs = decay * np.sin(wt * a) / wt
        cos_part = decay * np.cos(wt * a)
    else:
        k = math.sqrt(-d)
        slow = np.exp(-(half - k) * a)
        # (e^{ka} - e^{-ka}) e^{-Ga/2} / 2k without overflow or cancellation
        c_abs = -slow * np.expm1(-2 * k * a) / (2 * k)
        cos_part = 0.5 * (slow + np.exp(-(half + k) * a))
    C = np.sign(t) * c_abs
    phi = cos_part + half * c_abs
    return C, phi


def response_surrogate(params: OscillatorParams, t):
    """Real surrogate ``C(t) = i m chi(t)``; odd in t, ``C(0)=0``, ``C'(0)=1``."""
    t = _check_time(t)
    C, _ = _kernels(params, t)
    return C[()] if C.ndim == 0 else C


def relaxation(params: OscillatorParams, t):
    """Normalized relaxation function ``phi(t)``; even in t, ``phi(0)=1``."""
    t = _check_time(t)
    _, phi = _kernels(params, t)
    return phi[()] if phi.ndim == 0 else phi


def response_relaxation(params: OscillatorParams, t):
    """Response function ``chi(t)`` (purely imaginary) and relaxation ``phi(t)``.

    Both are extended to negative times by ``chi(-t) = -chi(t)`` and
    ``phi(-t) = phi(t)``.
    """
    t = _check_time(t)
    C, phi = _kernels(params, t)
    chi = C / (1j * params.mass)
    if chi.ndim == 0:
        return chi[()], phi[()]
    return chi, phi


def susceptibility(params: OscillatorParams, omega):
    """Reactive and dissipative parts ``(chi', chi'')`` at real frequency.

    This is the boundary value of the Fourier-Laplace transform at
    ``omega + i0``.
    """
    w = np.asarray(omega, dtype=float)
    W2 = params.omega**2
    G = params.gamma
    det = W2 - w * w
    den = det * det + (w * G) ** 2
    chi0 = params.static_susceptibility
    with np.errstate(divide="ignore", invalid="ignore"):
        re = det * W2 / den * chi0
        im = w * G * W2 / den * chi0
    re, im = re[()], im[()]
    return re, im


def susceptibility_z(params: OscillatorParams, z: complex) -> complex:
    """Fourier-Laplace transform of ``chi(t)`` at complex ``z`` off the real axis."""
    z = complex(z)
    if z.imag == 0:
        raise DomainError("z must be off the real axis; use susceptibility() for omega +- i0")
    s = 1.0 if z.imag > 0 else -1.0
    return (1.0 / params.mass) / (params.omega**2 - z * (z + s * 1j * params.gamma))


def relaxation_z(params: OscillatorParams, z: complex) -> complex:
    """Fourier-Laplace transform of ``phi(t)`` at complex ``z`` off the real axis."""
    z = complex(z)
    if z.imag == 0:
        raise DomainError("z must be off the real axis")
    s = 1.0 if z.imag > 0 else -1.0
    return (z + s * 1j * params.gamma) / (params.omega**2 - z * (z + s * 1j * params.gamma))


def steady_state(params: OscillatorParams, drive: DriveField, t):
    """Steady-state elongation ``f0 [chi' cos(wt) + chi'' sin(wt)]``."""
    t = np.asarray(t, dtype=float)
    re, im = susceptibility(params, drive.omega)
    wt = drive.omega * t
    x = drive.f0 * (re * np.cos(wt) + im * np.sin(wt))
    return x[()] if np.ndim(x) == 0 else x


def steady_state_derivatives(params: OscillatorParams, drive: DriveField, t):
    """Analytic ``(xi, xi', xi'')`` of the steady state."""
    t = np.asarray(t, dtype=float)
    re, im = susceptibility(params, drive.omega)
    w = drive.omega
    c, s = np.cos(w * t), np.sin(w * t)
    x = drive.f0 * (re * c + im * s)
    dx = drive.f0 * w * (-re * s + im * c)
    ddx = -w * w * x
    return x, dx, ddx


def steady_state_form(params: OscillatorParams, drive: DriveField) -> SteadyStateForm:
    """Amplitude and phase lag of ``xi(t) = A cos(|w| t - phi)``, phi in [0, pi]."""
    W2 = params.omega**2
    w = abs(drive.omega)
    G = params.gamma
    re, im = susceptibility(params, w)
    A = W2 * params.static_susceptibility * abs(drive.f0) / math.hypot(W2 - w * w, w * G)
    # atan2 covers the resonance (pi/2) and the blue side (phi -> pi) in one call
    phase = math.atan2(w * G, W2 - w * w)
    return SteadyStateForm(amplitude=A, phase_lag=phase, chi_re=float(re), chi_im=float(im))


def absorbed_power(params: OscillatorParams, drive: DriveField) -> float:
    """Period-averaged absorbed power ``omega chi''(omega) f0^2 / 2`` (never negative)."""
    _, im = susceptibility(params, drive.omega)
    return 0.5 * drive.omega * float(im) * drive.f0**2
