"""Brute-force ODE integration of the forced-oscillator and AL equations.

An embedded Dormand-Prince 5(4) pair with standard error-per-step control.
It shares no code with the closed forms it is meant to check.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .abraham_lorentz import ALInitialState, ALParams, project_to_manifold
from .errors import DomainError
from .oscillator import OscillatorParams

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "dopri5",
    "integrate_forced",
    "integrate_al",
    "compare",
    "growth_rate",
]

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and limits.  ``adaptive=False`` takes fixed steps of ``max_step``."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_steps: int = 2_000_000
    adaptive: bool = True

    def __post_init__(self):
        if not (0 < self.rel_tol <= 1e-2 and 0 < self.abs_tol <= 1e-2):
            raise DomainError("rel_tol and abs_tol must lie in (0, 1e-2]")
        if not self.max_step > 0:
            raise DomainError("max_step must be positive")
        if not self.adaptive and not math.isfinite(self.max_step):
            raise DomainError("fixed-step mode needs a finite max_step")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    diverged_at: float | None = None
    exhausted: bool = False
    columns: tuple = field(default=("t", "x", "v"))

    @property
    def x(self):
        return self.states[:, 0]

    def until(self, t_end: float) -> "Trajectory":
        keep = self.times <= t_end
        return Trajectory(self.times[keep], self.states[keep], self.diverged_at, self.exhausted, self.columns)

    def write_csv(self, fh) -> None:
        """Columns ``t,x,v[,b]`` with 17 significant digits."""
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.columns)
        for t, y in zip(self.times, self.states):
            w.writerow([f"{t:.17g}"] + [f"{c:.17g}" for c in y])


def _initial_step(fun, t0, y0, f0, direction, cfg):
    scale = cfg.abs_tol + np.abs(y0) * cfg.rel_tol
    d0 = np.linalg.norm(y0 / scale) / math.sqrt(y0.size)
    d1 = np.linalg.norm(f0 / scale) / math.sqrt(y0.size)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    y1 = y0 + direction * h0 * f0
    f1 = fun(t0 + direction * h0, y1)
    d2 = np.linalg.norm((f1 - f0) / scale) / math.sqrt(y0.size) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, cfg.max_step)


def dopri5(
    fun: Callable,
    span: tuple[float, float],
    y0: Sequence[float],
    cfg: IntegratorConfig | None = None,
    *,
    stop: Callable | None = None,
    project: Callable | None = None,
) -> Trajectory:
    """Integrate ``y' = fun(t, y)`` over ``span`` (either direction).

    ``stop(t, y)`` returning True ends the run and records ``diverged_at``;
    ``project(y)`` is applied to every accepted state.
    """
    cfg = cfg or IntegratorConfig()
    t0, t1 = map(float, span)
    y = np.array(y0, dtype=float)
    if project is not None:
        y = project(y)
    direction = 1.0 if t1 >= t0 else -1.0
    times = [t0]
    states = [y.copy()]
    if t1 == t0:
        return Trajectory(np.array(times), np.array(states))

    t = t0
    f = fun(t, y)
    h = cfg.max_step if not cfg.adaptive else _initial_step(fun, t0, y, f, direction, cfg)
    K = np.empty((7, y.size))
    steps = 0
    diverged_at = None
    exhausted = False
    while direction * (t1 - t) > 0:
        if steps >= cfg.max_steps:
            exhausted = True
            break
        h = min(h, abs(t1 - t), cfg.max_step)
        dt = direction * h
        K[0] = f
        for i in range(1, 7):
            K[i] = fun(t + _C[i] * dt, y + dt * (np.asarray(_A[i]) @ K[:i]))
        y_new = y + dt * (_B5[:6] @ K[:6])
        steps += 1
        if cfg.adaptive:
            err_vec = dt * (_E @ K)
            sc = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err = math.sqrt(float(np.mean((err_vec / sc) ** 2)))
            if not math.isfinite(err):
                h *= 0.2
                continue
            factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** (-0.2)))
            if err > 1.0:
                h *= factor
                continue
        else:
            factor = 1.0
        t = t + dt
        if project is not None:
            y_new = project(y_new)
        y = y_new
        # last stage is evaluated at y_new (FSAL) unless projection moved it
        f = fun(t, y) if project is not None else K[6].copy()
        times.append(t)
        states.append(y.copy())
        if stop is not None and stop(t, y):
            diverged_at = t
            break
        if not np.all(np.isfinite(y)):
            diverged_at = t
            break
        h *= factor
    return Trajectory(np.array(times), np.array(states), diverged_at, exhausted)


def integrate_forced(
    params: OscillatorParams,
    force: Callable | None,
    init: tuple[float, float],
    span: tuple[float, float],
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Integrate ``x'' + G x' + W^2 x = f(t)/m`` as the system ``(x, v)``."""
    m, W2, G = params.mass, params.omega**2, params.gamma

    if force is None:
        def rhs(t, y):
            return np.array([y[1], -G * y[1] - W2 * y[0]])
    else:
        def rhs(t, y):
            return np.array([y[1], force(t) / m - G * y[1] - W2 * y[0]])

    return dopri5(rhs, span, init, cfg)


def integrate_al(
    al: ALParams,
    force: Callable | None,
    init: ALInitialState,
    span: tuple[float, float],
    cfg: IntegratorConfig | None = None,
    *,
    divergence_factor: float = 1e9,
    project_bounded: bool = False,
) -> Trajectory:
    """Integrate ``x'' - tau x''' + w0^2 x = f/m`` as the system ``(x, v, b)``.

    The run stops with ``diverged_at`` set once ``|x| > divergence_factor *
    (|x0| + 1)``; divergence is an expected outcome for generic initial data.

    With ``project_bounded=True`` each accepted state is projected onto the
    bounded manifold ``b + G v + W^2 x = 0``.  Forward integration otherwise
    cannot follow a bounded solution for long: rounding errors seed the
    run-away mode, which then grows like ``exp(zeta2 t)``.
    """
    tau, w02, m = al.tau, al.omega0**2, al.mass
    if force is None:
        def rhs(t, y):
            return np.array([y[1], y[2], (y[2] + w02 * y[0]) / tau])
    else:
        def rhs(t, y):
            return np.array([y[1], y[2], (y[2] + w02 * y[0] - force(t) / m) / tau])

    cfg = cfg or IntegratorConfig()
    if cfg.adaptive and cfg.max_step > 0.1 * tau:
        # the run-away rate ~1/tau sets the step scale
        cfg = replace(cfg, max_step=0.1 * tau)
    limit = divergence_factor * (abs(init.x0) + 1.0)
    proj = (lambda y: project_to_manifold(al, y)) if project_bounded else None
    traj = dopri5(rhs, span, init.as_array(), cfg, stop=lambda t, y: abs(y[0]) > limit, project=proj)
    traj.columns = ("t", "x", "v", "b")
    return traj


def compare(trajectory: Trajectory, analytic: Callable, component: int = 0) -> tuple[float, float]:
    """Max absolute and relative deviation from ``analytic(times)``.

    The relative deviation at each time is taken against the running maximum
    of ``|analytic|`` up to that time, so zero crossings do not blow it up.
    """
    ref = np.asarray(analytic(trajectory.times), dtype=float)
    got = trajectory.states[:, component]
    dev = np.abs(got - ref)
    env = np.maximum.accumulate(np.abs(ref))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(env > 0, dev / env, np.where(dev > 0, np.inf, 0.0))
    return float(dev.max()), float(rel.max())


def growth_rate(times, values, decades: float = 3.0) -> float:
    """Least-squares slope of ``log|values|`` against time.

    Only samples within ``decades`` of the largest ``|value|`` enter the fit,
    so decaying transients at early times do not bias the rate.
    """
    t = np.asarray(times, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    keep = v >= v.max() * 10.0 ** (-decades)
    if keep.sum() < 2:
        raise DomainError("need at least two samples for a growth-rate fit")
    slope, _ = np.polyfit(t[keep], np.log(v[keep]), 1)
    return float(slope)
