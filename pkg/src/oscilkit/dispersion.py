"""Fourier-Laplace transforms and Kramers-Kronig (principal-value Hilbert) checks.

Conventions follow the half-axis transform

    F(z) = int dt exp(i t z) i s Theta(s t) f(t),   s = sign Im z,

whose boundary values ``F(omega +- i0) = f'(omega) +- i f''(omega)`` define
the reactive part ``f'`` and the spectral (dissipative) part ``f''``.  For a
causal, bounded response the pair obeys

    f'(omega) = (1/pi) PV int f''(w) / (w - omega) dw.

All panel sums run in a fixed order, so results do not depend on scheduling.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import ConvergenceError, DomainError

__all__ = [
    "QuadratureConfig",
    "SampledSpectrum",
    "KKReport",
    "kk_transform",
    "kk_check",
    "numeric_flt",
    "boundary_value",
    "spectral_parts",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings for the principal-value and transform quadratures.

    ``truncation`` is the frequency cutoff; ``None`` picks
    ``100 * max(scale, |omega|)`` per evaluation.
    """

    excision_halfwidth: float = 1e-2
    truncation: float | None = None
    rel_tol: float = 1e-10
    max_subdivisions: int = 500

    def __post_init__(self):
        if not self.excision_halfwidth > 0:
            raise DomainError("excision_halfwidth must be positive")
        if self.truncation is not None and not self.truncation > 0:
            raise DomainError("truncation must be positive")
        if not (0 < self.rel_tol <= 1e-2):
            raise DomainError("rel_tol must lie in (0, 1e-2]")
        if not self.max_subdivisions >= 1:
            raise DomainError("max_subdivisions must be positive")


@dataclass(frozen=True)
class SampledSpectrum:
    """Spectrum sampled on a strictly increasing grid.

    Used as a callable it interpolates with a monotone piecewise cubic
    (PCHIP) and returns 0 outside the grid.
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if g.ndim != 1 or g.size < 2 or v.shape != g.shape:
            raise DomainError("grid and values must be 1-d of equal length >= 2")
        if not np.all(np.diff(g) > 0):
            raise DomainError("grid must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise DomainError("values must be finite")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0))

    def _interp(self, kind):
        re = kind(self.grid, self.values.real)
        im = None if self.is_real else kind(self.grid, self.values.imag)
        return re, im

    def __call__(self, w):
        re, im = self._interp(PchipInterpolator)
        w = np.asarray(w, dtype=float)
        inside = (w >= self.grid[0]) & (w <= self.grid[-1])
        out = np.where(inside, re(w), 0.0)
        if im is not None:
            out = out + 1j * np.where(inside, im(w), 0.0)
        return out[()] if out.ndim == 0 else out

    def interpolation_error(self) -> float:
        """Rough interpolation error: max PCHIP vs cubic-spline gap at midpoints."""
        mid = 0.5 * (self.grid[:-1] + self.grid[1:])
        p_re, p_im = self._interp(PchipInterpolator)
        c_re, c_im = self._interp(CubicSpline)
        gap = np.abs(p_re(mid) - c_re(mid))
        if p_im is not None:
            gap = np.hypot(gap, p_im(mid) - c_im(mid))
        return float(gap.max())


@dataclass(frozen=True)
class KKReport:
    max_abs_dev: float
    max_rel_dev: float
    worst_omega: float
    passed: bool
    threshold: float
    scale: float
    grid: np.ndarray = field(repr=False, compare=False)
    re_values: np.ndarray = field(repr=False, compare=False)
    kk_values: np.ndarray = field(repr=False, compare=False)
    kk_errors: np.ndarray = field(repr=False, compare=False)


def _quad(fn, a, b, cfg: QuadratureConfig, points=None, epsabs: float = 0.0):
    if b <= a:
        return 0.0, 0.0
    pts = None
    if points:
        pts = sorted(p for p in points if a < p < b) or None
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                fn, a, b, epsabs=epsabs, epsrel=cfg.rel_tol, limit=cfg.max_subdivisions, points=pts
            )
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"quadrature on [{a:.6g}, {b:.6g}] did not converge: {exc}") from exc
    return val, err


def kk_transform(
    spectral: Callable,
    omega: float,
    cfg: QuadratureConfig | None = None,
    *,
    scale: float = 1.0,
    points: Sequence[float] = (),
    full_output: bool = False,
):
    """``(1/pi) PV int spectral(w) / (w - omega) dw`` over the real line.

    The window ``|w - omega| < delta`` is handled by singularity subtraction;
    with a symmetric window the subtracted log term vanishes and the window
    integral becomes ``int_0^delta [g(omega+s) - g(omega-s)]/s ds``.  Outside
    it, adaptive panels cover ``[-L, L]`` with ``L`` the truncation; the
    neglected tails are bounded assuming ``|g| = O(1/w)`` and added to the
    reported error.

    Parameters
    ----------
    spectral : callable
        Real spectral function, ``O(1/|w|)`` or faster at large ``|w|``.
    scale : float
        Frequency scale of the spectrum; sets the default truncation.
    points : sequence of float
        Extra breakpoints for the outer panels, e.g. resonance positions.
    full_output : bool
        Also return ``{"error", "tail_bound", "truncation"}``.
    """
    cfg = cfg or QuadratureConfig()
    w0 = float(omega)
    L = cfg.truncation if cfg.truncation is not None else 100.0 * max(scale, abs(w0))
    d = cfg.excision_halfwidth
    if L <= abs(w0) + d:
        raise DomainError(f"truncation {L} must exceed |omega| + excision ({abs(w0) + d})")

    g = spectral
    inner, e_in = _quad(lambda s: (g(w0 + s) - g(w0 - s)) / s, 0.0, d, cfg)
    # geometric breakpoints keep each panel within a few decades of |w|
    brk = list(points) + [0.0]
    k = scale
    while k < L:
        brk += [-k, k]
        k *= 10.0
    brk += [w0 - 10 * d, w0 + 10 * d]
    left, e_l = _quad(lambda w: g(w) / (w - w0), -L, w0 - d, cfg, brk)
    right, e_r = _quad(lambda w: g(w) / (w - w0), w0 + d, L, cfg, brk)

    tail = (abs(g(L)) + abs(g(-L))) * L / (L - abs(w0))
    value = (inner + left + right) / math.pi
    if full_output:
        info = {
            "error": (e_in + e_l + e_r + tail) / math.pi,
            "tail_bound": tail / math.pi,
            "truncation": L,
        }
        return value, info
    return value


def kk_check(
    re_part: Callable,
    im_part: Callable,
    grid: Sequence[float],
    cfg: QuadratureConfig | None = None,
    threshold: float = 1e-3,
    *,
    scale_value: float | None = None,
    freq_scale: float = 1.0,
    points: Sequence[float] = (),
) -> KKReport:
    """Compare ``re_part`` with the Hilbert transform of ``im_part`` on ``grid``.

    Deviations are normalized by ``scale_value`` (default: ``max |re_part|``
    over the grid), since pointwise ratios blow up at zeros of ``re_part``.
    ``passed`` is ``max_rel_dev <= threshold``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("grid must be non-empty")
    re_vals = np.array([float(re_part(w)) for w in grid])
    kk_vals = np.empty_like(re_vals)
    kk_errs = np.empty_like(re_vals)
    for i, w in enumerate(grid):
        kk_vals[i], info = kk_transform(im_part, w, cfg, scale=freq_scale, points=points, full_output=True)
        kk_errs[i] = info["error"]
    dev = np.abs(kk_vals - re_vals)
    scale = float(np.max(np.abs(re_vals))) if scale_value is None else float(scale_value)
    max_abs = float(dev.max())
    if scale > 0:
        max_rel = max_abs / scale
    else:
        max_rel = 0.0 if max_abs == 0 else math.inf
    worst = float(grid[int(np.argmax(dev))])
    return KKReport(
        max_abs_dev=max_abs,
        max_rel_dev=max_rel,
        worst_omega=worst,
        passed=bool(max_rel <= threshold),
        threshold=threshold,
        scale=scale,
        grid=grid,
        re_values=re_vals,
        kk_values=kk_vals,
        kk_errors=kk_errs,
    )


def numeric_flt(
    f: Callable,
    z: complex,
    cfg: QuadratureConfig | None = None,
    *,
    t_max: float | None = None,
) -> complex:
    """Half-axis Fourier-Laplace transform of a bounded function by quadrature.

    Integrates ``i s exp(i t z) f(t)`` over ``[0, s*T]`` in panels.  Without
    ``t_max`` the cutoff is chosen so that ``exp(-|Im z| T)`` is far below
    ``rel_tol``; pass ``t_max`` when ``f`` itself decays faster.

    Raises
    ------
    DomainError
        if ``Im z == 0``.
    ConvergenceError
        if the estimated truncation remainder exceeds ``rel_tol``.
    """
    cfg = cfg or QuadratureConfig()
    z = complex(z)
    if z.imag == 0:
        raise DomainError("numeric_flt requires Im z != 0")
    s = 1.0 if z.imag > 0 else -1.0
    eta = abs(z.imag)
    if t_max is None:
        t_max = math.log(1.0 / (cfg.rel_tol * 1e-3)) / eta
    T = float(t_max)

    def integrand(r):
        return np.exp(1j * s * r * z) * f(s * r)

    width = T
    if z.real != 0:
        width = min(width, 2 * math.pi / abs(z.real))
    width = min(width, 2.0 / eta)
    n = min(max(1, int(math.ceil(T / width))), 100_000)
    edges = np.linspace(0.0, T, n + 1)

    total = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        # late panels only need accuracy relative to what is already summed
        floor = 1e-3 * cfg.rel_tol * abs(total)
        re, _ = _quad(lambda r: complex(integrand(r)).real, a, b, cfg, epsabs=floor)
        im, _ = _quad(lambda r: complex(integrand(r)).imag, a, b, cfg, epsabs=floor)
        total += complex(re, im)
    value = 1j * s * total

    # remainder beyond T, assuming |f| does not grow past its last-panel size
    tail_r = np.linspace(edges[-2], T, 16)
    f_end = max(abs(complex(f(s * r))) for r in tail_r)
    remainder = f_end * math.exp(-eta * T) * min(1.0 / eta, max(T, 1.0))
    if remainder > cfg.rel_tol * max(abs(value), 1e-300) and remainder > 1e-300:
        raise ConvergenceError(
            f"truncation remainder {remainder:.3e} at T={T:.6g} exceeds tolerance",
            estimate=value,
            error=remainder,
        )
    return value


def boundary_value(
    f: Callable,
    omega: float,
    side: int = +1,
    cfg: QuadratureConfig | None = None,
    *,
    eta: float = 1e-4,
    t_max: float | None = None,
) -> complex:
    """``F(omega +- i0)`` from :func:`numeric_flt` by Richardson extrapolation in ``eta``."""
    if side not in (1, -1):
        raise DomainError("side must be +1 or -1")
    f1 = numeric_flt(f, complex(omega, side * eta), cfg, t_max=t_max)
    f2 = numeric_flt(f, complex(omega, side * eta / 2), cfg, t_max=t_max)
    return 2 * f2 - f1


def spectral_parts(flt: Callable[[complex], complex], omega: float, eta: float = 1e-200):
    """Reactive and spectral parts ``(f', f'')`` of a transform known off the axis.

    ``f' = [F(w+i0) + F(w-i0)]/2``, ``f'' = [F(w+i0) - F(w-i0)]/(2i)``.
    """
    plus = complex(flt(complex(omega, eta)))
    minus = complex(flt(complex(omega, -eta)))
    return 0.5 * (plus + minus), (plus - minus) / 2j
