import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relmc.errors import ZeroMass, ZeroVariation
from relmc.models import burgers
from relmc.particles import (
    ParticleEnsemble,
    make_rng,
    sample_gbmc_initial,
    sample_mc_initial,
    stochastic_round,
    transport,
)


def gaussian(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x**2) / np.sqrt(2.0 * np.pi)


def square(x):
    x = np.asarray(x, dtype=float)
    return np.where((x >= -2.0) & (x <= 2.0), 0.4, 0.0)


def test_make_rng_reproducible_and_stream_separated():
    a = make_rng(7).random(5)
    b = make_rng(7).random(5)
    c = make_rng(7, stream=1).random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_stochastic_round_exact_on_integers():
    rng = make_rng(0)
    assert stochastic_round(3.0, rng) == 3
    np.testing.assert_array_equal(stochastic_round(np.array([0.0, 5.0]), rng), [0, 5])


def test_stochastic_round_unbiased():
    rng = make_rng(1)
    vals = stochastic_round(np.full(200_000, 2.3), rng)
    assert set(np.unique(vals)) <= {2, 3}
    assert np.mean(vals) == pytest.approx(2.3, abs=0.01)


def test_stochastic_round_rejects_negative():
    with pytest.raises(ValueError):
        stochastic_round(-0.1, make_rng(0))


@given(st.floats(0.0, 50.0))
def test_stochastic_round_bracketing(x):
    out = stochastic_round(x, make_rng(3))
    assert np.floor(x) <= out <= np.ceil(x)


def test_ensemble_total_mass():
    ens = ParticleEnsemble(np.zeros(4), np.ones(4), np.array([1.0, -1.0, 2.0, 2.0]),
                           a=1.0, n_sample=4)
    assert ens.total_mass() == pytest.approx(1.0)
    assert ens.n == 4


def test_sample_mc_initial_mass_and_signs():
    rng = make_rng(5)
    ens = sample_mc_initial(gaussian, (-10.0, 10.0), 20_000, burgers(), 0.5, rng)
    # integral of the standard Gaussian bump over the window is one
    assert ens.total_mass() == pytest.approx(1.0, abs=1e-6)
    assert np.all(ens.m > 0)
    assert set(np.unique(ens.v)) <= {-0.5, 0.5}
    # positions concentrate where the density is large
    assert np.mean(np.abs(ens.x) < 2.0) > 0.9


def test_sample_mc_initial_signed_datum():
    rng = make_rng(6)
    ens = sample_mc_initial(np.sin, (0.0, 2.0 * np.pi), 20_000, burgers(), 1.5, rng)
    # masses carry the local sign of the datum
    assert np.all(ens.m[ens.x < np.pi] > 0)
    assert np.all(ens.m[ens.x > np.pi] < 0)
    assert ens.total_mass() == pytest.approx(0.0, abs=0.05)


def test_sample_mc_initial_zero_mass_raises():
    with pytest.raises(ZeroMass):
        sample_mc_initial(lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                          (0.0, 1.0), 10, burgers(), 1.0, make_rng(0))


def test_sample_gbmc_initial_jump_localization():
    rng = make_rng(7)
    ens = sample_gbmc_initial(square, (-4.0, 6.0), 5000, rng, model=burgers(), a=0.6)
    # derivative measure of the square wave: +0.4 at -2, -0.4 at +2
    tol = 10.0 / 100_000 + 1e-12
    near = np.minimum(np.abs(ens.x + 2.0), np.abs(ens.x - 2.0))
    assert np.all(near <= tol)
    assert np.all(np.sign(ens.m[np.abs(ens.x + 2.0) <= tol]) > 0)
    assert np.all(np.sign(ens.m[np.abs(ens.x - 2.0) <= tol]) < 0)
    # total signed mass is the net jump, zero; |m| is the total variation
    assert ens.total_mass() == pytest.approx(0.0, abs=0.02)
    assert np.abs(ens.m[0]) == pytest.approx(0.8, rel=1e-10)


def test_sample_gbmc_initial_zero_variation_raises():
    with pytest.raises(ZeroVariation):
        sample_gbmc_initial(lambda x: np.ones_like(np.asarray(x, dtype=float)),
                            (0.0, 1.0), 10, make_rng(0))


def test_transport_exact():
    ens = ParticleEnsemble(np.array([0.0, 1.0]), np.array([1.0, -2.0]),
                           np.ones(2), a=2.0, n_sample=2)
    transport(ens, 0.25)
    np.testing.assert_allclose(ens.x, [0.25, 0.5])
    with pytest.raises(ValueError):
        transport(ens, -0.1)
