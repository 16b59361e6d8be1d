import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from oscilkit.dispersion import numeric_flt
from oscilkit.errors import DomainError
from oscilkit.ode_oracle import IntegratorConfig, integrate_forced
from oscilkit.oscillator import (
    DriveField,
    OscillatorParams,
    absorbed_power,
    characteristic_freqs,
    relaxation,
    relaxation_z,
    response_relaxation,
    response_surrogate,
    steady_state,
    steady_state_derivatives,
    steady_state_form,
    susceptibility,
    susceptibility_z,
)

P01 = OscillatorParams(1.0, 1.0, 0.1)
P05 = OscillatorParams(1.0, 1.0, 0.5)

params_st = st.builds(
    OscillatorParams,
    mass=st.floats(0.1, 10.0),
    omega=st.floats(0.1, 10.0),
    gamma=st.floats(0.0, 25.0),
)
# strictly damped, so the real-axis response has no pole
damped_st = st.builds(
    OscillatorParams,
    mass=st.floats(0.1, 10.0),
    omega=st.floats(0.1, 10.0),
    gamma=st.floats(0.01, 25.0),
)


def test_params_validation():
    with pytest.raises(DomainError):
        OscillatorParams(0.0, 1.0, 0.1)
    with pytest.raises(DomainError):
        OscillatorParams(1.0, -1.0, 0.1)
    with pytest.raises(DomainError):
        OscillatorParams(1.0, 1.0, -0.1)
    with pytest.raises(DomainError):
        DriveField(math.inf, 1.0)


def test_initial_values():
    chi, phi = response_relaxation(P01, 0.0)
    assert chi == 0
    assert phi == 1


def test_non_finite_time_rejected():
    with pytest.raises(DomainError):
        relaxation(P01, math.nan)


@given(params_st, st.floats(0.0, 50.0))
@settings(max_examples=200)
def test_parity(p, t):
    assert response_surrogate(p, -t) == pytest.approx(-response_surrogate(p, t), abs=1e-14)
    assert relaxation(p, -t) == pytest.approx(relaxation(p, t), abs=1e-14)


def test_chi_is_imaginary():
    chi, _ = response_relaxation(P01, np.linspace(-5, 5, 11))
    assert np.all(np.real(chi) == 0)
    assert np.allclose(np.imag(chi) * -1, response_surrogate(P01, np.linspace(-5, 5, 11)))


def test_kernels_match_ode_oracle():
    t_end = 2.0
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    phi_run = integrate_forced(P05, None, (1.0, 0.0), (0.0, t_end), cfg)
    chi_run = integrate_forced(P05, None, (0.0, 1.0 / P05.mass), (0.0, t_end), cfg)
    assert phi_run.x[-1] == pytest.approx(relaxation(P05, t_end), abs=1e-9)
    assert chi_run.x[-1] == pytest.approx(response_surrogate(P05, t_end), abs=1e-9)


@given(params_st, st.floats(0.01, 20.0))
@settings(max_examples=100)
def test_kubo_identity(p, t):
    # chi = i dphi/dt / (m W^2), i.e. C = -dphi/dt / W^2
    h = 1e-5
    dphi = (relaxation(p, t + h) - relaxation(p, t - h)) / (2 * h)
    scale = (p.omega + p.gamma) ** 3 / p.omega**2
    assert -dphi / p.omega**2 == pytest.approx(response_surrogate(p, t), abs=1e-8 * scale)


@given(damped_st, st.floats(0.01, 20.0))
@settings(max_examples=100)
def test_kubo_spectral_identity(p, w):
    _, im = susceptibility(p, w)
    phi_im = relaxation_z(p, complex(w, 1e-300)).imag
    assert im == pytest.approx(w * phi_im / (p.mass * p.omega**2), rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("gamma", [0.5, 2.0, 3.0])
def test_kernels_solve_homogeneous_equation(gamma):
    p = OscillatorParams(1.0, 1.0, gamma)
    t = np.linspace(0.1, 10, 50)
    h = 1e-4
    for fn in (relaxation, response_surrogate):
        x = fn(p, t)
        dx = (fn(p, t + h) - fn(p, t - h)) / (2 * h)
        ddx = (fn(p, t + h) - 2 * x + fn(p, t - h)) / h**2
        assert np.max(np.abs(ddx + gamma * dx + x)) < 1e-6


def test_susceptibility_examples():
    assert susceptibility(P01, 0.0) == pytest.approx((1.0, 0.0))
    re, im = susceptibility(P01, 1.0)
    assert re == pytest.approx(0.0, abs=1e-15)
    assert im == pytest.approx(10.0, rel=1e-14)


def test_susceptibility_matches_numeric_transform():
    w = 0.7
    re, im = susceptibility(P05, w)
    # chi(t) = C(t)/(i m); the kernel decays like exp(-G t/2), so 150 time units suffice
    chi_t = lambda t: response_surrogate(P05, t) / (1j * P05.mass)
    num = numeric_flt(chi_t, complex(w, 1e-12), t_max=150.0)
    assert num.real == pytest.approx(re, abs=1e-7)
    assert num.imag == pytest.approx(im, abs=1e-7)


def test_complex_overload_rejects_real_axis():
    with pytest.raises(DomainError):
        susceptibility_z(P01, 1.0 + 0j)
    with pytest.raises(DomainError):
        relaxation_z(P01, 1.0 + 0j)


@given(damped_st, st.floats(0.0, 30.0))
@settings(max_examples=200)
def test_susceptibility_symmetry_and_sign(p, w):
    re_p, im_p = susceptibility(p, w)
    re_m, im_m = susceptibility(p, -w)
    assert re_m == pytest.approx(re_p, rel=1e-12, abs=1e-300)
    assert im_m == pytest.approx(-im_p, rel=1e-12, abs=1e-300)
    assert im_p >= 0


@given(damped_st, st.floats(0.0, 10.0))
@settings(max_examples=100)
def test_complex_overload_limits_to_real_axis(p, w):
    z = susceptibility_z(p, complex(w, 1e-10))
    re, im = susceptibility(p, w)
    scale = p.static_susceptibility * (1 + p.omega / max(p.gamma, 1e-3))
    assert z.real == pytest.approx(re, abs=1e-6 * scale)
    assert z.imag == pytest.approx(im, abs=1e-6 * scale)


def test_first_moment_of_absorption():
    # int_0^inf w chi''(w) dw = pi/(2m)
    for p in (P01, P05, OscillatorParams(2.0, 1.5, 0.3)):
        val, _ = quad(lambda w: w * susceptibility(p, w)[1], 0, np.inf, limit=500, points=None)
        assert val == pytest.approx(math.pi / (2 * p.mass), rel=5e-3)


def test_characteristic_freqs():
    d = characteristic_freqs(OscillatorParams(1.0, 1.0, 0.0))
    assert d.omega_tilde == 1
    assert d.theta == 0
    assert d.omega_m == d.omega_r == 1

    d = characteristic_freqs(P05)
    assert d.omega_m == pytest.approx(math.sqrt(1 - 0.125), rel=1e-14)
    assert d.omega_tilde.real == pytest.approx(math.sqrt(1 - 0.0625), rel=1e-14)
    assert d.omega_m < d.omega_tilde.real < d.omega_r

    d = characteristic_freqs(OscillatorParams(1.0, 1.0, 3.0))
    assert d.omega_tilde.real == 0 and d.omega_tilde.imag > 0
    assert math.isnan(d.theta)


@given(params_st)
@settings(max_examples=200)
def test_roots_satisfy_vieta(p):
    d = characteristic_freqs(p)
    assert abs(d.zeta1 + d.zeta2 + p.gamma) <= 1e-12 * (p.gamma + p.omega)
    assert abs(d.zeta1 * d.zeta2 - p.omega**2) <= 1e-12 * p.omega**2


def test_steady_state_examples():
    xi = steady_state(P01, DriveField(1.0, 0.0), np.linspace(0, 10, 5))
    assert np.allclose(xi, 1.0)
    form = steady_state_form(P01, DriveField(1.0, 1.0))
    assert form.amplitude == pytest.approx(10.0, rel=1e-14)
    assert form.phase_lag == pytest.approx(math.pi / 2, rel=1e-14)


@given(damped_st, st.floats(-5.0, 5.0), st.floats(0.1, 3.0))
@settings(max_examples=100)
def test_steady_state_solves_forced_equation(p, w, f0):
    drive = DriveField(f0, w)
    t = np.linspace(0, 10, 7)
    x, dx, ddx = steady_state_derivatives(p, drive, t)
    terms = (ddx, p.gamma * dx, p.omega**2 * x, drive(t) / p.mass)
    res = sum(terms[:3]) - terms[3]
    scale = max(np.max(np.abs(term)) for term in terms)
    assert np.max(np.abs(res)) <= 1e-12 * scale


def test_steady_state_matches_long_burn_in():
    drive = DriveField(2.0, 1.3)
    run = integrate_forced(P05, drive, (0.7, -1.2), (-200.0, 100.0))
    keep = run.times >= 0.0
    dev = np.max(np.abs(run.x[keep] - steady_state(P05, drive, run.times[keep])))
    assert dev < 1e-6


def test_absorbed_power_examples():
    assert absorbed_power(P05, DriveField(1.0, 0.0)) == 0
    assert absorbed_power(P01, DriveField(1.0, 1.0)) == pytest.approx(5.0, rel=1e-14)


def test_absorbed_power_peak_and_time_average():
    grid = np.linspace(0.0, 3.0, 3001)
    P = np.array([absorbed_power(P05, DriveField(1.0, w)) for w in grid])
    step = grid[1] - grid[0]
    assert abs(grid[np.argmax(P)] - 1.0) <= step
    for w in (0.4, 1.0, 1.7):
        drive = DriveField(1.0, w)
        T = 2 * math.pi / w

        def power(t):
            _, dx, _ = steady_state_derivatives(P05, drive, t)
            return float(dx) * float(drive(t))

        avg, _ = quad(power, 0.0, T, epsabs=1e-13, epsrel=1e-13)
        assert avg / T == pytest.approx(absorbed_power(P05, drive), abs=1e-8)


@given(params_st, st.floats(0.0, 20.0))
@settings(max_examples=100)
def test_absorbed_power_non_negative(p, w):
    assert absorbed_power(p, DriveField(1.0, w)) >= 0
