import numpy as np

import integrators


def test_rk4_flow_of_linear_growth():
    x = integrators.flow(lambda x: x, np.array([1.0]), 1.0, steps=100)
    assert abs(x[0] - np.e) < 1e-9


def test_commutator_of_commuting_fields_vanishes():
    F = lambda x: np.array([1.0, 0.0])
    G = lambda x: np.array([0.0, 1.0])
    est = integrators.richardson_commutator(F, G, np.array([0.3, -0.2]), 1e-3, np.linalg.norm)
    assert np.linalg.norm(est.value) < 1e-9


def test_commutator_of_heisenberg_fields():
    # [d/dx, x d/dy] = d/dy
    F = lambda x: np.array([1.0, 0.0])
    G = lambda x: np.array([0.0, x[0]])
    est = integrators.richardson_commutator(F, G, np.array([0.5, 0.5]), 1e-2, np.linalg.norm)
    assert np.allclose(est.value, [0.0, 1.0], atol=1e-9)
    assert est.accepted


def test_richardson_ratio_rejects_large_steps():
    # [d/dx, x^2 d/dy] = 2x d/dy; the flow-composition estimate is exactly 2x + h
    F = lambda x: np.array([1.0, 0.0])
    G = lambda x: np.array([0.0, x[0] ** 2])
    at_one = np.array([1.0, 0.0])
    est = integrators.richardson_commutator(F, G, at_one, 0.02, np.linalg.norm)
    assert abs(est.ratio - 2.02 / 2.01) < 1e-9
    assert est.accepted
    assert np.allclose(est.value, [0.0, 2.0], atol=1e-9)
    est = integrators.richardson_commutator(F, G, at_one, 0.4, np.linalg.norm)
    assert abs(est.ratio - 2.4 / 2.2) < 1e-9
    assert not est.accepted
    # the bracket vanishes at the origin, every estimate is pure O(h) error
    est = integrators.richardson_commutator(F, G, np.zeros(2), 1e-3, np.linalg.norm)
    assert abs(est.ratio - 2.0) < 1e-9
    assert not est.accepted
    assert np.linalg.norm(est.value) < 1e-9


def test_ratio_window_bounds():
    assert integrators.ratio_accepted(1.0)
    assert integrators.ratio_accepted(0.95) and integrators.ratio_accepted(1.05)
    assert not integrators.ratio_accepted(1.06)
    assert not integrators.ratio_accepted(float('nan'))
