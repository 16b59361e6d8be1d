"""Dipole response of a quantum system in its ground state.

Damped dipole-dipole response function and susceptibility for a table of
transitions, natural linewidths from spontaneous emission, the harmonic
oscillator as a one-transition table, absorbed power and the ac-Stark shift.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cross_sections import PhysicalConstants
from .errors import DomainError
from .oscillator import OscillatorParams

__all__ = [
    "Transition",
    "TransitionTable",
    "QuantumOscillatorModel",
    "ClassicalIdentification",
    "chi_dd",
    "chi_dd_susceptibility",
    "general_dipole_susceptibility",
    "memoryless_kernel",
    "natural_linewidth",
    "oscillator_table",
    "classical_identification",
    "absorbed_power_qm",
    "ac_stark_shift",
    "stark_first_order",
    "stark_second_order",
]


@dataclass(frozen=True)
class Transition:
    """Excitation frequency, squared dipole matrix element and linewidth of ``|0> -> |n>``."""

    omega_n0: float
    dipole_sq: float
    gamma_n: float = 0.0

    def __post_init__(self):
        if not (self.omega_n0 > 0 and math.isfinite(self.omega_n0)):
            raise DomainError(f"omega_n0 must be positive and finite, got {self.omega_n0}")
        if not (self.dipole_sq >= 0 and math.isfinite(self.dipole_sq)):
            raise DomainError(f"dipole_sq must be non-negative, got {self.dipole_sq}")
        if not (self.gamma_n >= 0 and math.isfinite(self.gamma_n)):
            raise DomainError(f"gamma_n must be non-negative, got {self.gamma_n}")

    @property
    def omega_sq(self) -> float:
        """Resonance ``Omega_n^2 = omega_n0^2 + (gamma_n/2)^2``."""
        return self.omega_n0**2 + 0.25 * self.gamma_n**2

    def static_polarizability(self, charge: float, mass: float) -> float:
        """Partial static value ``e^2 / (m Omega_n^2)``."""
        return charge**2 / (mass * self.omega_sq)


@dataclass(frozen=True)
class TransitionTable:
    transitions: tuple
    mass: float
    charge: float

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if not self.transitions:
            raise DomainError("a transition table needs at least one transition")
        freqs = [tr.omega_n0 for tr in self.transitions]
        if len(set(freqs)) != len(freqs):
            raise DomainError("transition frequencies must be distinct")
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise DomainError("mass must be positive and finite")
        if not (self.charge != 0 and math.isfinite(self.charge)):
            raise DomainError("charge must be non-zero and finite")

    @classmethod
    def from_dict(cls, doc: dict) -> "TransitionTable":
        try:
            trs = [Transition(float(t["omega"]), float(t["dipole_sq"]), float(t.get("gamma", 0.0))) for t in doc["transitions"]]
            return cls(trs, float(doc["mass"]), float(doc["charge"]))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed transition table: {exc!r}") from exc

    @classmethod
    def from_json(cls, source) -> "TransitionTable":
        """Read ``{"mass", "charge", "transitions": [{"omega", "dipole_sq", "gamma"}]}`` (SI units).

        ``source`` is a JSON string, a path or an open file.
        """
        if hasattr(source, "read"):
            doc = json.load(source)
        elif isinstance(source, (str, os.PathLike)) and os.path.exists(source):
            with open(source) as fh:
                doc = json.load(fh)
        else:
            doc = json.loads(source)
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return {
            "mass": self.mass,
            "charge": self.charge,
            "transitions": [{"omega": t.omega_n0, "dipole_sq": t.dipole_sq, "gamma": t.gamma_n} for t in self.transitions],
        }


@dataclass(frozen=True)
class QuantumOscillatorModel:
    """Harmonic oscillator with level spacing ``hbar omega_10`` and length ``sqrt(hbar / 2 m omega_10)``."""

    omega_10: float
    mass: float
    oscillator_length: float

    def __post_init__(self):
        for name in ("omega_10", "mass", "oscillator_length"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v}")

    @classmethod
    def from_constants(cls, omega_10: float, consts: PhysicalConstants) -> "QuantumOscillatorModel":
        if not omega_10 > 0:
            raise DomainError("omega_10 must be positive")
        return cls(omega_10, consts.m_e, math.sqrt(consts.hbar / (2 * consts.m_e * omega_10)))


@dataclass(frozen=True)
class ClassicalIdentification:
    omega_tilde: float
    gamma: float
    tau: float
    params: OscillatorParams


def chi_dd(table: TransitionTable, t, hbar: float = 1.0):
    """Damped response ``(2/i hbar) sum |D_n0|^2 sin(omega_n0 t) exp(-gamma_n |t|/2)``.

    Purely imaginary and odd in t.
    """
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("time arguments must be finite")
    acc = np.zeros_like(t)
    for tr in table.transitions:
        acc = acc + tr.dipole_sq * np.sin(tr.omega_n0 * t) * np.exp(-0.5 * tr.gamma_n * np.abs(t))
    out = np.asarray((2.0 / (1j * hbar)) * acc)
    return out[()] if out.ndim == 0 else out


def chi_dd_susceptibility(table: TransitionTable, omega, hbar: float = 1.0):
    """Boundary value at ``omega + i0`` of the transformed damped response.

    Each transition contributes
    ``(2 m omega_n0 / hbar e^2) |D_n0|^2 Omega_n^2 chi_n / (Omega_n^2 - w^2 - i gamma_n w)``
    with ``chi_n = e^2 / (m Omega_n^2)``.
    """
    w = np.asarray(omega, dtype=float)
    m, e = table.mass, table.charge
    acc = np.zeros(w.shape, dtype=complex)
    for tr in table.transitions:
        W2 = tr.omega_sq
        pref = 2 * m * tr.omega_n0 / (hbar * e * e) * tr.dipole_sq
        acc = acc + pref * W2 * tr.static_polarizability(e, m) / (W2 - w * w - 1j * tr.gamma_n * w)
    return acc[()] if acc.ndim == 0 else acc


def memoryless_kernel(gamma: float) -> Callable[[complex], complex]:
    """Relaxation kernel ``K(z) = s i gamma`` of a memoryless (white) damping."""

    def K(z):
        z = complex(z)
        return (1j if z.imag >= 0 else -1j) * gamma

    return K


def general_dipole_susceptibility(z, omega_d: float, static: float, kernel: Callable[[complex], complex]) -> complex:
    """``Omega_D^2 chi(i0) / (Omega_D^2 - z^2 - z K(z))`` for a supplied relaxation kernel."""
    z = complex(z)
    W2 = omega_d**2
    return W2 * static / (W2 - z * z - z * kernel(z))


def natural_linewidth(levels: Sequence[tuple], n: int, consts: PhysicalConstants) -> float:
    """Spontaneous-emission rate of level ``n``.

    ``levels`` lists ``(energy, r_sq)`` sorted by energy, where ``r_sq`` is the
    squared position matrix element between that level and level ``n`` (the
    entry for ``n`` itself is ignored).  The rate is
    ``(4 alpha / 3 c^2) sum_{lower} omega_{nn'}^3 r_sq``; the ground state has none.
    """
    energies = [float(lv[0]) for lv in levels]
    if any(b < a for a, b in zip(energies, energies[1:])):
        raise DomainError("levels must be sorted by energy")
    if not 0 <= n < len(levels):
        raise DomainError(f"level index {n} out of range")
    En = energies[n]
    total = 0.0
    for k, (E, r_sq) in enumerate(levels):
        if k == n or E >= En:
            continue
        w = (En - E) / consts.hbar
        total += w**3 * float(r_sq)
    return 4 * consts.alpha_fs / (3 * consts.c**2) * total


def _oscillator_levels(model: QuantumOscillatorModel, consts: PhysicalConstants):
    hw = consts.hbar * model.omega_10
    # only <0|x|1> = x0 connects level 1 downwards
    return [(0.5 * hw, model.oscillator_length**2), (1.5 * hw, 0.0)]


def oscillator_table(model: QuantumOscillatorModel, consts: PhysicalConstants) -> TransitionTable:
    """Single transition ``|D_10|^2 = e^2 x0^2`` with its natural linewidth."""
    g1 = natural_linewidth(_oscillator_levels(model, consts), 1, consts)
    tr = Transition(model.omega_10, consts.e**2 * model.oscillator_length**2, g1)
    return TransitionTable((tr,), model.mass, consts.e)


def classical_identification(model: QuantumOscillatorModel, consts: PhysicalConstants) -> ClassicalIdentification:
    """Classical oscillator with ``omega_tilde = omega_10`` and ``gamma = Gamma_1``.

    ``tau`` is ``Gamma_1 / omega_10^2``, which equals ``2 alpha hbar / 3 m c^2``.
    """
    g1 = natural_linewidth(_oscillator_levels(model, consts), 1, consts)
    W = math.sqrt(model.omega_10**2 + 0.25 * g1**2)
    return ClassicalIdentification(
        omega_tilde=model.omega_10,
        gamma=g1,
        tau=g1 / model.omega_10**2,
        params=OscillatorParams(model.mass, W, g1),
    )


def absorbed_power_qm(table: TransitionTable, E0: float, omega, hbar: float = 1.0):
    """Period-averaged absorbed power ``omega Im chi_DD(omega) E0^2 / 2``."""
    w = np.asarray(omega, dtype=float)
    P = 0.5 * w * np.imag(chi_dd_susceptibility(table, w, hbar)) * E0**2
    return P[()] if np.ndim(P) == 0 else P


def ac_stark_shift(chi_re, E0: float):
    """Time-averaged level shift ``-chi' E0^2 / 4``."""
    return -0.25 * np.asarray(chi_re, dtype=float)[()] * E0**2


def stark_first_order(chi: complex, E0: float, samples: int = 64) -> float:
    """Average of ``-E0 d(t) cos(omega t)`` over one period, ``d(t) = Re[chi E0 e^{-i omega t}]``.

    Averaged numerically over the phase ``omega t`` on a uniform grid, which
    is exact for these trigonometric polynomials; the closed form is
    ``-chi' E0^2 / 2``.
    """
    # the average over one period does not depend on omega, and omega -> 0+
    # is the static limit
    phase = 2 * math.pi * np.arange(samples) / samples
    d = np.real(complex(chi) * E0 * np.exp(-1j * phase))
    return float(np.mean(-E0 * d * np.cos(phase)))


def stark_second_order(chi_re: float, E0: float) -> float:
    """Second-order energy term ``+chi' E0^2 / 4``."""
    return 0.5 * float(chi_re) * E0**2 / 2
