"""Abraham-Lorentz (AL) equation  x'' - tau x''' + w0^2 x = f(t)/m.

Characteristic roots, the effective forced-oscillator parameters they imply,
the unique solution for given (x0, v0, b0), detection of the run-away
component, and the oscillating particular solution with its (faulty)
"susceptibility" X(omega).

Notation: ``p = tau * omega0`` is the only dimensionless parameter.  The
roots are ``zeta1 = u + iv``, ``zeta2 = 1/tau - 2u > 0`` (run-away) and
``zeta3 = u - iv``; the effective oscillator has ``gamma = -2u`` and
``omega^2 = u^2 + v^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, GrowthBoundError
from .oscillator import DriveField, OscillatorParams, relaxation, response_surrogate

__all__ = [
    "ALParams",
    "ALRoots",
    "ALInitialState",
    "EffectiveOscillator",
    "ErrorRatios",
    "char_roots",
    "cubic_residuals",
    "effective_oscillator",
    "series_parameters",
    "runaway_coefficient",
    "unique_solution",
    "homogeneous_solution",
    "particular_solution",
    "bounded_condition",
    "project_to_manifold",
    "oscillatory_particular",
    "oscillatory_particular_derivatives",
    "faulty_susceptibility",
    "susceptibility_error_ratios",
]

# below SERIES_MAX the closed form loses digits in (w - 1)^2
SERIES_MAX = 1e-4
NEWTON_MAX = 1e-2
# exp(709.78) overflows a double
GROWTH_LIMIT = 700.0
ROOT_RTOL = 1e-12

# x = tau*Gamma solves x (1 + x)^2 = p^2; coefficients of x in powers of q = p^2
_X_SERIES = (1.0, -2.0, 7.0, -30.0, 143.0, -728.0)


@dataclass(frozen=True)
class ALParams:
    mass: float
    tau: float
    omega0: float

    def __post_init__(self):
        for name in ("mass", "tau", "omega0"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise DomainError(f"{name} must be positive and finite, got {val}")
        if not math.isfinite(self.tau * self.omega0):
            raise DomainError("tau*omega0 overflows")

    @classmethod
    def from_tau_omega0(cls, tau_omega0: float, omega0: float = 1.0, mass: float = 1.0):
        return cls(mass=mass, tau=tau_omega0 / omega0, omega0=omega0)

    @property
    def tau_omega0(self) -> float:
        return self.tau * self.omega0


@dataclass(frozen=True)
class ALRoots:
    w: float
    u: float
    v: float
    zeta1: complex
    zeta2: float
    zeta3: complex
    method: str

    def as_tuple(self):
        return (self.zeta1, complex(self.zeta2), self.zeta3)


@dataclass(frozen=True)
class ALInitialState:
    x0: float
    v0: float
    b0: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x0, self.v0, self.b0)):
            raise DomainError("initial values must be finite")

    def as_array(self):
        return np.array([self.x0, self.v0, self.b0], dtype=float)


@dataclass(frozen=True)
class EffectiveOscillator:
    params: OscillatorParams
    omega_tilde: float


class ErrorRatios(NamedTuple):
    re_ratio: float
    im_ratio: float
    in_validity_range: bool
    singular: bool


def _w_closed_form(p: float) -> float:
    # 1 + 3p/2 (9p - sqrt(12 + 81p^2)) rationalized twice; positive for all p
    s = math.sqrt(12.0 + 81.0 * p * p)
    return float(np.cbrt(12.0) / np.cbrt((9.0 * p + s) ** 2))


def _x_series(p: float) -> float:
    q = p * p
    acc = 0.0
    for c in reversed(_X_SERIES):
        acc = acc * q + c
    return acc * q


def _roots_from_x(al: ALParams, x: float, w: float, method: str) -> ALRoots:
    tau = al.tau
    u = -0.5 * x / tau
    v = math.sqrt(x * (1.0 + 0.75 * x)) / tau
    return ALRoots(
        w=w,
        u=u,
        v=v,
        zeta1=complex(u, v),
        zeta2=(1.0 + x) / tau,
        zeta3=complex(u, -v),
        method=method,
    )


def cubic_residuals(al: ALParams, roots: ALRoots) -> np.ndarray:
    """Relative residuals of ``zeta^2 - tau zeta^3 + omega0^2`` for the three roots."""
    out = []
    for z in roots.as_tuple():
        val = z * z - al.tau * z**3 + al.omega0**2
        scale = abs(z) ** 2 + al.tau * abs(z) ** 3 + al.omega0**2
        out.append(abs(val) / scale)
    return np.array(out)


def char_roots(al: ALParams, method: str = "auto") -> ALRoots:
    """Roots of the AL characteristic polynomial ``zeta^2 - tau zeta^3 + omega0^2``.

    ``method`` selects the evaluation path: ``"series"`` (small tau*omega0
    expansion), ``"closed"`` (cube-root formula), ``"newton"`` (closed form
    plus one Newton step), or ``"auto"`` which picks series below 1e-4,
    Newton-refined closed form up to 1e-2 and the plain closed form above.

    Raises
    ------
    ConvergenceError
        if the relative cubic residual of any root exceeds 1e-12.
    """
    p = al.tau_omega0
    if method == "auto":
        method = "series" if p < SERIES_MAX else ("newton" if p <= NEWTON_MAX else "closed")

    w = _w_closed_form(p)
    if not (w > 0 and math.isfinite(w)):
        raise ConvergenceError(
            f"cube-root auxiliary w={w!r} under/overflows at tau*omega0={p:.6g}",
            estimate=None,
            error=math.inf,
        )
    if method == "series":
        roots = _roots_from_x(al, _x_series(p), w, method)
    elif method in ("closed", "newton"):
        tau = al.tau
        u = -((w - 1.0) ** 2) / (6.0 * tau * w)
        v = (1.0 - w * w) / (2.0 * tau * w * math.sqrt(3.0))
        if method == "closed":
            roots = ALRoots(
                w=w, u=u, v=v, zeta1=complex(u, v), zeta2=1.0 / tau - 2.0 * u,
                zeta3=complex(u, -v), method=method,
            )
        else:
            x = -2.0 * u * tau
            x -= (x * (1.0 + x) ** 2 - p * p) / ((1.0 + x) * (1.0 + 3.0 * x))
            roots = _roots_from_x(al, x, w, method)
    else:
        raise ValueError(f"unknown method {method!r}")

    res = cubic_residuals(al, roots)
    if not np.all(res < ROOT_RTOL):
        raise ConvergenceError(
            f"cubic residual {res.max():.3e} exceeds {ROOT_RTOL} at tau*omega0={p:.6g} "
            f"(method={method}, w={w:.17g})",
            estimate=roots,
            error=float(res.max()),
        )
    return roots


def effective_oscillator(al: ALParams, method: str = "auto") -> EffectiveOscillator:
    """Forced-oscillator parameters ``gamma = -2u``, ``omega = sqrt(u^2 + v^2)``."""
    r = char_roots(al, method)
    omega = math.hypot(r.u, r.v)
    return EffectiveOscillator(
        params=OscillatorParams(mass=al.mass, omega=omega, gamma=-2.0 * r.u),
        omega_tilde=r.v,
    )


def series_parameters(al: ALParams) -> tuple[float, float]:
    """Truncated expansions ``(gamma, omega)`` to second order in tau*omega0."""
    p = al.tau_omega0
    gamma = al.tau * al.omega0**2 * (1.0 - 2.0 * p * p)
    omega = al.omega0 * (1.0 - 0.5 * p * p)
    return gamma, omega


def _common(al: ALParams):
    eff = effective_oscillator(al)
    G = eff.params.gamma
    zeta2 = G + 1.0 / al.tau
    # tau^2 / (1 + 4 omega_tilde^2 tau^2)
    t1sq = al.tau**2 / (1.0 + 4.0 * eff.omega_tilde**2 * al.tau**2)
    return eff, zeta2, t1sq


def runaway_coefficient(al: ALParams, init: ALInitialState) -> float:
    """Amplitude multiplying ``exp(zeta2 (t - t0))`` in the homogeneous solution."""
    eff, _, t1sq = _common(al)
    P = eff.params
    return (init.b0 + P.gamma * init.v0 + P.omega**2 * init.x0) * t1sq


def _growth_guard(zeta2, span):
    if zeta2 * span > GROWTH_LIMIT:
        raise GrowthBoundError(
            f"zeta2*(t-t0) = {zeta2 * span:.4g} exceeds {GROWTH_LIMIT}; "
            "use ode_oracle.integrate_al with renormalization for longer horizons"
        )


def homogeneous_solution(al: ALParams, init: ALInitialState, t, t0: float = 0.0):
    """Homogeneous part of the unique solution for initial values at ``t0``."""
    eff, zeta2, t1sq = _common(al)
    P = eff.params
    s = np.asarray(t, dtype=float) - t0
    if np.any(s < 0):
        raise DomainError("t must not precede t0")
    _growth_guard(zeta2, float(np.max(s)))
    phi = relaxation(P, s)
    C = response_surrogate(P, s)
    r = init.b0 + P.gamma * init.v0 + P.omega**2 * init.x0
    x = phi * init.x0 + C * init.v0 - r * t1sq * (-np.exp(zeta2 * s) + phi + zeta2 * C)
    return x


def _kernel_exponentials(al: ALParams):
    """Kernel of the particular solution as ``sum_k c_k exp(lam_k s)`` (times prefactor)."""
    eff, zeta2, t1sq = _common(al)
    r = char_roots(al)
    z1, z3 = r.zeta1, r.zeta3
    d = z1 - z3
    # phi(s) = (z1 e^{z3 s} - z3 e^{z1 s})/d,  C(s) = (e^{z1 s} - e^{z3 s})/d
    lams = (z1, z3, complex(zeta2))
    coefs = ((-z3 + zeta2) / d, (z1 - zeta2) / d, -1.0 + 0j)
    pref = t1sq / (al.tau * al.mass)
    return lams, coefs, pref, eff, zeta2


def particular_solution(
    al: ALParams,
    force: Callable | DriveField,
    t: float,
    t0: float = 0.0,
    rel_tol: float = 1e-10,
    max_subdivisions: int = 200,
    method: str = "auto",
) -> float:
    """Particular part ``int_0^{t-t0} K(s) f(t - s) ds`` of the unique solution.

    ``method="auto"`` uses the closed form for a :class:`DriveField` and
    adaptive quadrature otherwise; ``"quad"`` forces quadrature.
    """
    T = float(t) - t0
    if T < 0:
        raise DomainError("t must not precede t0")
    lams, coefs, pref, eff, zeta2 = _kernel_exponentials(al)
    _growth_guard(zeta2, T)
    if T == 0:
        return 0.0

    if method == "auto" and isinstance(force, DriveField):
        w = force.omega
        total = 0j
        for lam, c in zip(lams, coefs):
            a = lam - 1j * w
            total += c * np.expm1(a * T) / a
        return float(pref * force.f0 * (np.exp(1j * w * t) * total).real)

    P = eff.params
    # bounded part: phi(s) + zeta2 C(s)
    def bounded(s):
        return (relaxation(P, s) + zeta2 * response_surrogate(P, s)) * force(t - s)

    # run-away part with exp(zeta2 s) factored out: e^{zeta2 T} int_0^T e^{-zeta2 r} f(t0 + r) dr
    def decaying(r):
        return math.exp(-zeta2 * r) * force(t0 + r)

    period = 2 * math.pi / max(eff.omega_tilde, 1e-300)
    edges_b = np.linspace(0.0, T, max(2, int(math.ceil(T / period)) + 1))
    edges_d = np.unique(np.clip([0.0, 1.0 / zeta2, 10.0 / zeta2, 50.0 / zeta2, T], 0.0, T))

    def panels(fn, edges):
        acc, err = 0.0, 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            with warnings.catch_warnings():
                warnings.simplefilter("error", integrate.IntegrationWarning)
                try:
                    val, e = integrate.quad(fn, a, b, epsabs=0.0, epsrel=rel_tol, limit=max_subdivisions)
                except integrate.IntegrationWarning as exc:
                    raise ConvergenceError(
                        f"quadrature of particular solution failed on [{a}, {b}]: {exc}",
                        estimate=acc,
                    ) from exc
            acc += val
            err += e
        return acc

    I_bounded = panels(bounded, edges_b)
    I_run = math.exp(zeta2 * T) * panels(decaying, edges_d)
    return pref * (I_bounded - I_run)


def unique_solution(
    al: ALParams,
    init: ALInitialState,
    force: Callable | DriveField | None,
    t: float,
    t0: float = 0.0,
    **quad_kw,
) -> float:
    """Unique AL solution ``x(t; t0)`` for initial values ``(x0, v0, b0)`` at ``t0``.

    ``force=None`` means f = 0.

    Raises
    ------
    GrowthBoundError
        if ``zeta2 (t - t0) > 700``.
    ConvergenceError
        if the quadrature of the particular part does not converge.
    """
    xh = float(homogeneous_solution(al, init, t, t0))
    if force is None:
        return xh
    return xh + particular_solution(al, force, t, t0, **quad_kw)


def bounded_condition(al: ALParams, state: ALInitialState, tol: float = 1e-12):
    """Residual ``b0 + gamma v0 + omega^2 x0`` and whether the state is on the bounded manifold."""
    P = effective_oscillator(al).params
    O2 = P.omega**2
    residual = state.b0 + P.gamma * state.v0 + O2 * state.x0
    scale = abs(state.b0) + P.gamma * abs(state.v0) + O2 * abs(state.x0) + np.finfo(float).tiny
    return residual, bool(abs(residual) <= tol * scale)


def project_to_manifold(al: ALParams, state) -> np.ndarray:
    """Remove the run-away eigencomponent from a state vector ``(x, v, b)``.

    The projection is along the run-away eigenvector ``(1, zeta2, zeta2^2)``,
    so the bounded part of the motion is left untouched.
    """
    eff, zeta2, t1sq = _common(al)
    P = eff.params
    y = np.asarray(state, dtype=float)
    r = y[2] + P.gamma * y[1] + P.omega**2 * y[0]
    # zeta2^2 + gamma zeta2 + omega^2 = 1/t1sq
    c = r * t1sq
    return y - c * np.array([1.0, zeta2, zeta2 * zeta2])


def _osc_coeffs(al: ALParams, drive: DriveField):
    w = drive.omega
    a = al.omega0**2 - w * w
    b = al.tau * w**3
    den = a * a + b * b
    k = drive.f0 / al.mass / den
    return a * k, b * k, w


def oscillatory_particular(al: ALParams, drive: DriveField, t):
    """Particular solution oscillating at the drive frequency (not a steady state)."""
    A, B, w = _osc_coeffs(al, drive)
    t = np.asarray(t, dtype=float)
    x = A * np.cos(w * t) + B * np.sin(w * t)
    return x[()] if x.ndim == 0 else x


def oscillatory_particular_derivatives(al: ALParams, drive: DriveField, t):
    """``(x, x', x'', x''')`` of :func:`oscillatory_particular`, analytically."""
    A, B, w = _osc_coeffs(al, drive)
    t = np.asarray(t, dtype=float)
    c, s = np.cos(w * t), np.sin(w * t)
    x = A * c + B * s
    dx = w * (-A * s + B * c)
    return x, dx, -w * w * x, -w * w * dx


def faulty_susceptibility(al: ALParams, omega):
    """``X(omega) = omega0^2 X0 / (omega0^2 - omega^2 - i tau omega^3)``, ``X0 = 1/(m omega0^2)``.

    Read off the oscillating particular solution.  It is not the transform of
    a causal response function and violates the Kramers-Kronig relations;
    provided for error analysis only.
    """
    w = np.asarray(omega, dtype=float)
    X0 = 1.0 / (al.mass * al.omega0**2)
    X = al.omega0**2 * X0 / (al.omega0**2 - w * w - 1j * al.tau * w**3)
    return X[()] if X.ndim == 0 else X


def susceptibility_error_ratios(
    al: ALParams, omega: float, margin_far: float = 10.0, margin_near: float = 10.0
) -> ErrorRatios:
    """``Re X / chi'`` and ``Im X / chi''`` with exact (gamma, omega) from the roots.

    ``in_validity_range`` tests ``1 >> |1 - omega^2/omega0^2| >> (tau omega0)^2``
    with ">>" meaning a factor of at least ``margin_far`` / ``margin_near``.
    A vanishing ``chi'`` or ``chi''`` yields an infinite ratio and
    ``singular=True``.
    """
    P = effective_oscillator(al).params
    W2, G, w = P.omega**2, P.gamma, float(omega)
    det = W2 - w * w
    den = det * det + (w * G) ** 2
    chi0 = P.static_susceptibility
    chi_re = det * W2 / den * chi0
    chi_im = w * G * W2 / den * chi0
    X = complex(faulty_susceptibility(al, w))

    singular = False

    def ratio(num, d):
        nonlocal singular
        if d == 0:
            singular = True
            return math.inf if num != 0 else math.nan
        return num / d

    re_ratio = ratio(X.real, chi_re)
    im_ratio = ratio(X.imag, chi_im)
    detune = abs(1.0 - w * w / al.omega0**2)
    valid = (margin_far * detune <= 1.0) and (detune >= margin_near * al.tau_omega0**2)
    return ErrorRatios(re_ratio, im_ratio, bool(valid), singular)
