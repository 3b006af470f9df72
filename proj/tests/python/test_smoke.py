import math

import numpy as np
import pytest

import semimarkov as sm

H = [[0.0, 0.3, 0.7], [0.5, 0.0, 0.5], [0.6, 0.4, 0.0]]
RATES = [1.0, 2.0, 0.5]


def test_mittag_leffler_closed_forms():
    z = np.array([0.0, -0.5, -3.0])
    np.testing.assert_allclose(sm.mittag_leffler(1.0, z), np.exp(z), rtol=1e-13)
    assert sm.ml_survival(0.5, 1.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        sm.mittag_leffler(0.5, 1.0)


def test_model_round_trip_and_validation():
    m = sm.Model.mittag_leffler(H, RATES, [0.5, 0.7, 0.9])
    assert m.n_states == 3
    assert m.violations() == []
    back = sm.Model.from_json(m.to_json())
    np.testing.assert_array_equal(back.h, m.h)
    np.testing.assert_allclose(m.generator().sum(axis=1), 0.0, atol=1e-15)
    with pytest.raises(sm.ValidationError):
        sm.Model.from_json('{"n_states": 1}')


def test_solvers_agree_with_laplace():
    m = sm.Model.mittag_leffler(H, RATES, [0.5, 0.7, 0.9])
    t, p = sm.solve(m, "renewal", dt=1e-2, horizon=1.0)
    assert p.shape == (101, 3, 3)
    np.testing.assert_allclose(p.sum(axis=2), 1.0, atol=1e-10)
    _, ref = sm.invert_laplace(m, t[1:])
    assert np.abs(p[1:] - ref).max() < 1e-2
    with pytest.raises(sm.HypothesisError):
        sm.expm_grid(m, [1.0])


def test_markov_reduction():
    m = sm.Model.exponential(H, RATES)
    t, p = sm.solve(m, "backward_caputo", dt=1e-3, horizon=1.0)
    _, e = sm.expm_grid(m, [t[-1]])
    assert np.abs(p[-1] - e[0]).max() < 1e-5


def test_monte_carlo_matches_laplace():
    m = sm.Model.birth_chain(1.0, [0.6, 0.9, 0.6, 0.9])
    p_hat, se = sm.monte_carlo(m, [1.0], n_paths=20000, seed=3)
    _, ref = sm.invert_laplace(m, [1.0])
    assert np.all(np.abs(p_hat - ref) <= np.maximum(4 * se, 5e-3))


def test_heat_equation_reduces_to_gaussian():
    t, y, p, mass = sm.heat_forward(-4.0, 4.0, 0.05, sm.constant(1.0), sm.constant(1.0), horizon=0.5)
    g = np.exp(-y**2 / (2 * 0.5)) / math.sqrt(2 * math.pi * 0.5)
    assert np.abs(p[-1] - g).max() < 5e-3
    np.testing.assert_allclose(mass, 1.0, atol=1e-10)
    _, _, q, _ = sm.heat_forward(-2.0, 2.0, 0.1, sm.two_region(0.5, 0.9), sm.constant(1.0), horizon=0.2)
    assert q.min() > -1e-8
