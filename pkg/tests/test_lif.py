import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import lif_oracle, matvec_drive
from uwbsnn.encoding import SpikeTrain
from uwbsnn.errors import ConfigError, NumericError, ShapeError
from uwbsnn.lif import LifParams, LifPopulation, advance, integrate, lif_step, run_population


def oracle(drive, tau, v_rest, theta, hard=False):
    return np.array(lif_oracle(drive.tolist(), tau, v_rest, theta, hard), dtype=bool).reshape(drive.shape)


def test_first_spike_under_constant_drive():
    # V <- 0.9 V + 0.15 first reaches 1 on step 11
    v, t = 0.0, 0
    while v < 1.0:
        v, t = 0.9 * v + 0.15, t + 1
    assert t == 11
    out = integrate(np.full((20, 1), 0.15), LifParams(tau_m=10.0))
    assert np.flatnonzero(out[:, 0])[0] == 10


def test_hundred_random_instances_match_oracle():
    rng = np.random.default_rng(42)
    for _ in range(100):
        steps, n = rng.integers(1, 60), rng.integers(1, 8)
        tau = float(rng.uniform(1, 50))
        v_rest = float(rng.uniform(-1, 0.5))
        theta = v_rest + float(rng.uniform(0.1, 2))
        hard = bool(rng.integers(2))
        drive = rng.normal(0.1, 0.4, (steps, n))
        p = LifParams(tau, v_rest, theta, "hard" if hard else "soft")
        expected = oracle(drive, tau, v_rest, theta, hard)
        np.testing.assert_array_equal(integrate(drive, p), expected)
        pop = LifPopulation(p, n)
        stepped = np.array([lif_step(pop, d)[1] for d in drive])
        np.testing.assert_array_equal(stepped, expected)


def test_rest_is_a_fixed_point():
    p = LifParams(tau_m=7.0, v_rest=-0.3, theta=0.5)
    v, s = advance(np.full(4, -0.3), np.zeros(4), p)
    np.testing.assert_array_equal(v, np.full(4, -0.3))
    assert not s.any()


@settings(max_examples=100, deadline=None)
@given(st.floats(1, 100), st.floats(-2, 0.9), st.floats(-5, 0.99))
def test_leak_contracts_toward_rest(tau, v_rest, frac):
    p = LifParams(tau_m=tau, v_rest=v_rest, theta=1.0)
    v0 = v_rest + frac * (1.0 - v_rest) if frac > 0 else v_rest + frac
    v1, s = advance(np.array([v0]), np.zeros(1), p)
    assert not s[0]
    assert v1[0] - v_rest == pytest.approx((1 - 1 / tau) * (v0 - v_rest), rel=1e-12, abs=1e-15)
    assert abs(v1[0] - v_rest) <= abs(v0 - v_rest)


def test_soft_reset_keeps_overshoot():
    v, s = advance(np.array([0.0]), np.array([1.7]), LifParams())
    assert s[0] and v[0] == pytest.approx(0.7)
    v, s = advance(np.array([0.0]), np.array([1.7]), LifParams(reset_mode="hard"))
    assert s[0] and v[0] == 0.0


def test_more_drive_never_fewer_spikes():
    rng = np.random.default_rng(3)
    base = rng.uniform(0, 0.2, (200, 5))
    counts = [integrate(base * k, LifParams()).sum(axis=0) for k in (1.0, 1.5, 2.0)]
    assert np.all(counts[0] <= counts[1]) and np.all(counts[1] <= counts[2])


def test_integrate_from_state_matches_kernel():
    rng = np.random.default_rng(5)
    drive = rng.normal(0.1, 0.3, (50, 6))
    p = LifParams()
    np.testing.assert_array_equal(integrate(drive, p, v0=np.zeros(6)), integrate(drive, p))


def test_run_population_matches_oracle_on_random_instances():
    rng = np.random.default_rng(8)
    for _ in range(100):
        n, n_in, steps = rng.integers(1, 9), rng.integers(1, 6), rng.integers(1, 65)
        raster = rng.random((steps, n_in)) < 0.3
        w = rng.normal(0.2, 0.5, (n, n_in))
        out = run_population(LifPopulation(LifParams(), n), SpikeTrain(raster), w)
        expected = lif_oracle(matvec_drive(raster.tolist(), w.tolist()), 20.0, 0.0, 1.0)
        np.testing.assert_array_equal(out.raster, np.array(expected, dtype=bool).reshape(steps, n))


def test_run_population_uses_weights():
    raster = np.zeros((30, 2), dtype=bool)
    raster[:, 0] = True
    pop = LifPopulation(LifParams(), 2)
    out = run_population(pop, SpikeTrain(raster), [[0.1, 0.0], [0.0, 5.0]])
    assert out.counts()[1] == 0 and out.counts()[0] > 0
    np.testing.assert_array_equal(out.raster, oracle(raster @ np.array([[0.1, 0.0], [0.0, 5.0]]).T, 20, 0, 1))


def test_validation():
    pop = LifPopulation(LifParams(), 3)
    with pytest.raises(ShapeError):
        lif_step(pop, np.zeros(2))
    with pytest.raises(NumericError):
        lif_step(pop, [0.0, np.inf, 0.0])
    with pytest.raises(ConfigError):
        LifParams(tau_m=0.5)
    with pytest.raises(ConfigError):
        LifParams(theta=0.0)
    with pytest.raises(ConfigError):
        LifParams(reset_mode="none")
