import numpy as np
import pytest

from relmc.errors import CflViolation, NonConvergence
from relmc.models import RelaxationConfig, burgers, lwr, scalar_as_system, swe_system
from relmc.reference import (
    godunov_flux,
    godunov_scalar,
    relaxation_fv_system,
    swe_exact_riemann,
)


def gaussian(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x**2) / np.sqrt(2.0 * np.pi)


def test_godunov_flux_oracles():
    model = burgers()
    # transonic rarefaction: minimum attained at the sonic point u = 0
    assert godunov_flux(model, np.array([-1.0]), np.array([1.0]))[0] == 0.0
    # shock between 1 and -1: maximum of u^2/2 over the interval
    assert godunov_flux(model, np.array([1.0]), np.array([-1.0]))[0] == 0.5
    # monotone states: upwind value
    assert godunov_flux(model, np.array([0.2]), np.array([0.8]))[0] == pytest.approx(0.02)


def test_godunov_flux_concave_model():
    model = lwr()
    # transonic with concave flux: maximum attained at the sonic point 0.5
    assert godunov_flux(model, np.array([0.8]), np.array([0.2]))[0] == pytest.approx(0.25)


def test_godunov_shock_position():
    model = burgers()

    def rp(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0.0, 1.0, 0.0)

    t_final = 2.0
    res = godunov_scalar(model, rp, (-2.0, 4.0), 600, t_final)
    u = res.final[0]
    # shock travels at speed 1/2; locate the half-height crossing
    cross = res.x[np.argmin(np.abs(u - 0.5))]
    assert cross == pytest.approx(0.5 * t_final, abs=0.05)


def test_godunov_mass_conservation():
    res = godunov_scalar(burgers(), gaussian, (-10.0, 10.0), 200, 1.0)
    dx = res.x[1] - res.x[0]
    mass0 = float(np.sum(gaussian(res.x)) * dx)
    mass1 = float(np.sum(res.final[0]) * dx)
    assert abs(mass1 - mass0) < 1e-12


def test_relaxation_fv_mass_and_cfl():
    model = scalar_as_system(burgers())
    config = RelaxationConfig(speeds=(0.5,), dt=0.1)
    res = relaxation_fv_system(model, lambda x: gaussian(x), (-10.0, 10.0), 100,
                               config, 1.0)
    dx = res.x[1] - res.x[0]
    mass0 = float(np.sum(gaussian(res.x)) * dx)
    mass1 = float(np.sum(res.final[0]) * dx)
    assert abs(mass1 - mass0) < 1e-12
    bad = RelaxationConfig(speeds=(0.5,), dt=1.0)  # a dt = 0.5 > dx = 0.2
    with pytest.raises(CflViolation):
        relaxation_fv_system(model, lambda x: gaussian(x), (-10.0, 10.0), 100,
                             bad, 1.0)


def test_relaxation_fv_single_step_oracle():
    # one step at CFL 1 reduces to the two-point average flux update; check
    # a hand-computed three-cell interior value
    model = scalar_as_system(burgers())
    m = 10
    domain = (0.0, 1.0)
    dx = 0.1
    a = 1.0
    config = RelaxationConfig(speeds=(a,), dt=dx / a)
    u0_vals = np.linspace(0.1, 1.0, m)

    def u0(x):
        return np.interp(x, np.linspace(0.05, 0.95, m), u0_vals)

    res = relaxation_fv_system(model, u0, domain, m, config, dx / a)
    j = 5
    f = 0.5 * u0_vals**2
    g_right = 0.5 * (f[j] + f[j + 1]) - 0.5 * a * (u0_vals[j + 1] - u0_vals[j])
    g_left = 0.5 * (f[j - 1] + f[j]) - 0.5 * a * (u0_vals[j] - u0_vals[j - 1])
    expected = u0_vals[j] - (config.dt / dx) * (g_right - g_left)
    assert res.final[0][j] == pytest.approx(expected, abs=1e-12)


# ---------------------------------------------------------------------------
# shallow-water exact solution

def test_swe_riemann_star_state_oracle():
    sample = swe_exact_riemann(1.0, 0.0, 2.0, 0.0)
    assert sample.h_star == pytest.approx(1.453840892375, abs=1e-9)
    assert sample.u_star == pytest.approx(-1.305168020917, abs=1e-9)


def test_swe_riemann_symmetric_collision():
    sample = swe_exact_riemann(1.0, 1.0, 1.0, -1.0)
    assert sample.h_star == pytest.approx(1.341965579477, abs=1e-9)
    assert sample.u_star == pytest.approx(0.0, abs=1e-12)


def test_swe_riemann_far_field_states():
    sample = swe_exact_riemann(1.0, 0.0, 2.0, 0.0)
    h, u = sample(np.array([-100.0, 100.0]))
    np.testing.assert_allclose(h, [1.0, 2.0], atol=1e-12)
    np.testing.assert_allclose(u, [0.0, 0.0], atol=1e-12)


def test_swe_riemann_constant_data():
    sample = swe_exact_riemann(1.5, 0.3, 1.5, 0.3)
    h, u = sample(np.linspace(-5, 5, 11))
    np.testing.assert_allclose(h, 1.5, atol=1e-9)
    np.testing.assert_allclose(u, 0.3, atol=1e-9)


def test_swe_riemann_rarefaction_fan_is_continuous():
    sample = swe_exact_riemann(2.0, 0.0, 0.5, 0.0)
    xi = np.linspace(-6, 6, 2001)
    h, _ = sample(xi)
    # left rarefaction plus right shock: depth profile has no spurious jumps
    jumps = np.abs(np.diff(h))
    assert np.count_nonzero(jumps > 0.05) <= 1  # only the shock


def test_swe_riemann_dry_bed_raises():
    with pytest.raises(NonConvergence):
        swe_exact_riemann(1.0, -10.0, 1.0, 10.0)
