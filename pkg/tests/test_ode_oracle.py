import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscilkit.abraham_lorentz import (
    ALInitialState,
    ALParams,
    char_roots,
    effective_oscillator,
    homogeneous_solution,
    project_to_manifold,
)
from oscilkit.errors import DomainError
from oscilkit.ode_oracle import (
    IntegratorConfig,
    Trajectory,
    compare,
    dopri5,
    growth_rate,
    integrate_al,
    integrate_forced,
)
from oscilkit.oscillator import (
    DriveField,
    OscillatorParams,
    relaxation,
    response_surrogate,
    steady_state,
)

P = OscillatorParams(1.0, 1.0, 0.5)
AL01 = ALParams.from_tau_omega0(0.1)


def test_config_validation():
    with pytest.raises(DomainError):
        IntegratorConfig(rel_tol=0.0)
    with pytest.raises(DomainError):
        IntegratorConfig(abs_tol=0.5)
    with pytest.raises(DomainError):
        IntegratorConfig(max_step=0.0)
    with pytest.raises(DomainError):
        IntegratorConfig(adaptive=False)


def test_relaxation_and_response_columns():
    t_end = 20.0
    phi_run = integrate_forced(P, None, (1.0, 0.0), (0.0, t_end))
    chi_run = integrate_forced(P, None, (0.0, 1.0 / P.mass), (0.0, t_end))
    assert np.max(np.abs(phi_run.x - relaxation(P, phi_run.times))) < 1e-8
    assert np.max(np.abs(chi_run.x - response_surrogate(P, chi_run.times))) < 1e-8


def test_exponential_decay_exact_solution():
    run = dopri5(lambda t, y: -y, (0.0, 5.0), [1.0])
    assert run.states[-1, 0] == pytest.approx(math.exp(-5.0), rel=1e-9)


def test_time_reversal():
    fwd = integrate_forced(P, None, (1.0, 0.0), (0.0, 5.0))
    back = integrate_forced(P, None, tuple(fwd.states[-1]), (5.0, 0.0))
    assert back.times[-1] == 0.0
    assert np.allclose(back.states[-1], [1.0, 0.0], atol=1e-8)


def test_zero_span():
    run = dopri5(lambda t, y: y, (1.0, 1.0), [2.0])
    assert run.times.tolist() == [1.0] and run.states[0, 0] == 2.0


def test_error_shrinks_with_tolerance():
    # error per step control makes the global error roughly proportional to rel_tol
    errs = []
    for tol in (1.6e-6, 1e-7):
        run = integrate_forced(P, None, (1.0, 0.0), (0.0, 20.0), IntegratorConfig(rel_tol=tol, abs_tol=tol * 1e-2))
        errs.append(np.max(np.abs(run.x - relaxation(P, run.times))))
    assert errs[0] / errs[1] >= 4.0


def test_fixed_step_mode_converges_at_fifth_order():
    errs = []
    for h in (0.1, 0.05, 0.025):
        run = integrate_forced(P, None, (1.0, 0.0), (0.0, 10.0), IntegratorConfig(max_step=h, adaptive=False))
        errs.append(np.max(np.abs(run.x - relaxation(P, run.times))))
    assert errs[0] / errs[1] == pytest.approx(32, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(32, rel=0.1)


def test_step_exhaustion_flag():
    run = integrate_forced(P, None, (1.0, 0.0), (0.0, 100.0), IntegratorConfig(max_steps=10))
    assert run.exhausted and run.times[-1] < 100.0


def test_steady_state_after_burn_in():
    drive = DriveField(1.0, 0.8)
    Q = OscillatorParams(1.0, 1.0, 0.5)
    burn = 40.0 / Q.gamma
    run = integrate_forced(Q, drive, (1.0, 0.0), (0.0, burn + 30.0))
    keep = run.times > burn
    assert np.max(np.abs(run.x[keep] - steady_state(Q, drive, run.times[keep]))) < 1e-6


def test_forced_run_against_closed_form():
    run = integrate_forced(P, None, (0.3, -0.7), (0.0, 30.0))
    _, rel = compare(run, lambda t: 0.3 * relaxation(P, t) - 0.7 * response_surrogate(P, t))
    assert rel < 1e-6


def test_compare_with_itself():
    run = integrate_forced(P, None, (1.0, 0.0), (0.0, 3.0))
    assert compare(run, lambda t: np.interp(t, run.times, run.x)) == (0.0, 0.0)


def test_runaway_matches_analytic_solution():
    init = ALInitialState(1.0, 0.0, 0.0)
    run = integrate_al(AL01, None, init, (0.0, 60.0))
    assert run.diverged_at is not None
    sub = run.until(run.times[np.argmax(np.abs(run.x) > 1e6)])
    _, rel = compare(sub, lambda t: homogeneous_solution(AL01, init, t))
    assert rel < 1e-6
    assert growth_rate(sub.times, sub.x) == pytest.approx(char_roots(AL01).zeta2, abs=1e-3)


def test_bounded_start_needs_projection():
    on = ALInitialState(*project_to_manifold(AL01, [1.0, 0.0, 0.0]))
    plain = integrate_al(AL01, None, on, (0.0, 50.0))
    assert plain.diverged_at is not None
    kept = integrate_al(AL01, None, on, (0.0, 50.0), project_bounded=True)
    assert kept.diverged_at is None
    P_eff = effective_oscillator(AL01).params
    expected = relaxation(P_eff, kept.times) * on.x0 + response_surrogate(P_eff, kept.times) * on.v0
    assert np.max(np.abs(kept.x - expected)) < 1e-8


def test_fixed_step_too_coarse_for_runaway_scale():
    # steps longer than tau cannot resolve the exp(zeta2 t) mode
    init = ALInitialState(1.0, 0.0, 0.0)
    run = integrate_al(AL01, None, init, (0.0, 60.0), IntegratorConfig(max_step=0.15, adaptive=False))
    sub = run.until(run.times[np.argmax(np.abs(run.x) > 1e6)])
    _, rel = compare(sub, lambda t: homogeneous_solution(AL01, init, t))
    assert rel > 1e-3


def test_growth_rate_fit():
    t = np.linspace(0, 10, 101)
    assert growth_rate(t, 3 * np.exp(2.5 * t)) == pytest.approx(2.5, rel=1e-12)
    with pytest.raises(DomainError):
        growth_rate([0.0, 1.0], [1.0, 1e-9])


def test_csv_export():
    run = integrate_al(AL01, None, ALInitialState(1.0, 0.0, 0.0), (0.0, 0.5))
    buf = io.StringIO()
    run.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,x,v,b"
    assert len(lines) == run.times.size + 1
    first = [float(c) for c in lines[1].split(",")]
    assert first == [0.0, 1.0, 0.0, 0.0]
    last = np.array([float(c) for c in lines[-1].split(",")])
    assert np.array_equal(last[1:], run.states[-1])


@given(st.floats(0.05, 3.0), st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=20, deadline=None)
def test_linear_superposition(gamma, x0, v0):
    Q = OscillatorParams(1.0, 1.0, gamma)
    a = integrate_forced(Q, None, (x0, v0), (0.0, 5.0))
    ref = x0 * relaxation(Q, a.times) + v0 * response_surrogate(Q, a.times)
    assert np.max(np.abs(a.x - ref)) <= 1e-8 * (1 + abs(x0) + abs(v0))


def test_trajectory_until():
    tr = Trajectory(np.array([0.0, 1.0, 2.0]), np.zeros((3, 2)))
    assert tr.until(1.0).times.tolist() == [0.0, 1.0]
