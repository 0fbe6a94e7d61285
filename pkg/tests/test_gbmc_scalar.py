import numpy as np
import pytest

from relmc.errors import SubcharacteristicViolation
from relmc.analysis import lp_error
from relmc.gbmc_scalar import GbmcState, derivative_histogram, gbmc_step, run_gbmc
from relmc.models import RelaxationConfig, burgers
from relmc.particles import make_rng, sample_gbmc_initial
from relmc.reconstruct import Grid
from relmc.reference import godunov_scalar


def gaussian(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x**2) / np.sqrt(2.0 * np.pi)


def test_initial_reconstruction_matches_datum():
    res = run_gbmc(burgers(), np.sin, (0.0, 2.0 * np.pi),
                   RelaxationConfig(speeds=(1.5,), dt=0.01), 20_000, 0.01, seed=0,
                   snapshot_times=[0.0])
    np.testing.assert_allclose(res.snapshots[0.0][0], np.sin(res.x), atol=0.05)


def test_masses_never_change():
    config = RelaxationConfig(speeds=(0.6,), dt=0.01)
    rng = make_rng(1)
    ens = sample_gbmc_initial(gaussian, (-6.0, 6.0), 2000, rng,
                              model=burgers(), a=0.6)
    m0 = ens.m.copy()
    state = GbmcState(ens, config, burgers(), u_left=0.0, u_right=0.0)
    for _ in range(50):
        gbmc_step(state, rng)
    np.testing.assert_array_equal(state.ensemble.m, m0)


def test_short_run_tracks_godunov():
    config = RelaxationConfig(speeds=(0.5,), dt=0.01)
    res = run_gbmc(burgers(), gaussian, (-6.0, 6.0), config, 20_000, 1.0, seed=2)
    ref = godunov_scalar(burgers(), gaussian, (-6.0, 6.0), 2000, 1.0)
    ref_u = np.interp(res.x, ref.x, ref.final[0])
    assert lp_error(res.final[0], ref_u, p=2.0) < 0.05


def test_matched_seeds_reproduce_bitwise():
    config = RelaxationConfig(speeds=(0.5,), dt=0.05)
    a = run_gbmc(burgers(), gaussian, (-6.0, 6.0), config, 3000, 0.5, seed=3)
    b = run_gbmc(burgers(), gaussian, (-6.0, 6.0), config, 3000, 0.5, seed=3)
    np.testing.assert_array_equal(a.final, b.final)


def test_subcharacteristic_violation_detected():
    # a = 0.2 < max |u0| = 1: the velocity redraw probabilities are invalid
    config = RelaxationConfig(speeds=(0.2,), dt=0.01)
    with pytest.raises(SubcharacteristicViolation):
        run_gbmc(burgers(), np.sin, (0.0, 2.0 * np.pi), config, 2000, 0.05, seed=4)


def test_derivative_histogram_sign_structure():
    config = RelaxationConfig(speeds=(0.5,), dt=0.01)
    rng = make_rng(5)
    ens = sample_gbmc_initial(gaussian, (-6.0, 6.0), 50_000, rng,
                              model=burgers(), a=0.5)
    state = GbmcState(ens, config, burgers(), u_left=0.0, u_right=0.0)
    w = derivative_histogram(state, Grid(-6.0, 6.0, 60)).values
    x = Grid(-6.0, 6.0, 60).centers()
    assert np.all(w[(x > -4) & (x < -0.5)] >= 0)
    assert np.all(w[(x > 0.5) & (x < 4)] <= 0)


def test_output_points_do_not_affect_dynamics():
    config = RelaxationConfig(speeds=(0.5,), dt=0.05)
    coarse = run_gbmc(burgers(), gaussian, (-6.0, 6.0), config, 2000, 0.5, seed=6,
                      output_points=np.linspace(-6, 6, 101))
    fine = run_gbmc(burgers(), gaussian, (-6.0, 6.0), config, 2000, 0.5, seed=6,
                    output_points=np.linspace(-6, 6, 1001))
    np.testing.assert_allclose(coarse.final[0], fine.final[0][::10], atol=1e-12)
