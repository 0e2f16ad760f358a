import numpy as np
import pytest
from hypothesis import given, settings

from bigon_space import (BigonState, BigonTangent, bigon_commutators, bigon_in_positive_cone, closed_form_brackets,
                         form_values, from_endpoints, generator_fields, read_path_csv, singular_curve_test, to_endpoints,
                         write_path_csv)
from geom_core import framing_residual
from errors import MalformedInstance, NotHorizontal, SingularAngle, StepTooLarge
from strategies import bigon_states


def test_commutators_at_the_reference_state():
    s = BigonState(0.0, 0.0, 1.0, np.pi / 4, 0.0)
    cert = bigon_commutators(s)
    assert np.allclose(cert.nu_xi, [0.0, 2.0, 0.0, 0.0, 0.0], atol=1e-6)
    assert np.allclose(cert.nu_eta, [2.0, 0.0, 0.0, 0.0, 0.0], atol=1e-6)
    assert cert.rank == 5
    assert max(cert.relative_errors) < 1e-5


@settings(max_examples=20, deadline=None)
@given(bigon_states())
def test_bigon_distribution_is_bracket_generating(s):
    cert = bigon_commutators(s)
    assert cert.rank == 5
    assert max(cert.relative_errors) < 1e-4


@settings(max_examples=30, deadline=None)
@given(bigon_states())
def test_generators_annihilate_both_forms(s):
    for g in generator_fields(s):
        assert np.max(np.abs(form_values(s, g))) < 1e-12 * max(1.0, np.max(np.abs(g.rates)))


@settings(max_examples=30, deadline=None)
@given(bigon_states())
def test_endpoints_satisfy_the_framing_condition(s):
    b1, u1, b2, u2 = to_endpoints(s)
    assert abs(np.linalg.norm(b2 - b1) - 2 * s.r) < 1e-12
    assert abs(framing_residual(b1, u1, b2, u2)) < 1e-12


def test_endpoints_round_trip():
    s = BigonState(0.3, -0.2, 0.7, 1.0, 0.4)
    back = from_endpoints(*to_endpoints(s))
    assert np.allclose(back.vector(), s.vector(), atol=1e-12)


def test_closed_forms():
    nu_xi, nu_eta = closed_form_brackets(BigonState(0.5, 1.0, 3.0, np.pi / 6, 0.0))
    assert np.allclose(nu_xi, [0.0, 12.0, 0.0, 0.0, 0.0])
    assert np.allclose(nu_eta, [4.0 / 3.0, 0.0, 0.0, 0.0, 0.0])


def test_singular_angles_are_rejected():
    with pytest.raises(SingularAngle):
        generator_fields(BigonState(0.0, 0.0, 1.0, np.pi / 2, 0.0))
    with pytest.raises(SingularAngle):
        bigon_commutators(BigonState(0.0, 0.0, 1.0, np.pi, 0.0))


def circling_path(amplitude=0.3, count=200):
    """Horizontal path whose chord turns at unit speed."""
    t = np.linspace(0.0, 2 * np.pi, count)
    states = np.column_stack([1 + amplitude * np.cos(t), amplitude * np.sin(t), np.ones_like(t),
                              np.full_like(t, np.pi / 4), t])
    velocities = np.column_stack([-amplitude * np.sin(t), amplitude * np.cos(t), np.zeros_like(t),
                                  np.zeros_like(t), np.ones_like(t)])
    return t, states, velocities


def shrinking_path(count=50):
    """Flow line of eta: the chord shrinks along its own line."""
    t = np.linspace(0.0, 0.5, count)
    states = np.column_stack([0.2 + t, np.full_like(t, -0.1), 1 - t, np.full_like(t, np.pi / 4),
                              np.full_like(t, 0.3)])
    return t, states


def test_turning_chord_is_regular():
    t, states, velocities = circling_path()
    verdict = singular_curve_test(t, states, velocities)
    assert verdict.verdict == 'REGULAR'
    assert not verdict.singular_candidate
    assert verdict.max_form_residual < 1e-12


def test_non_turning_chord_is_singular_candidate():
    t, states = shrinking_path()
    verdict = singular_curve_test(t, states, full_check=True)
    assert verdict.singular_candidate
    assert verdict.max_phi_rate < 1e-12
    assert verdict.kernel_condition in (True, False)


def test_non_horizontal_paths_are_rejected():
    t = np.linspace(0.0, 1.0, 20)
    states = np.column_stack([t, np.zeros_like(t), np.ones_like(t), np.full_like(t, np.pi / 4), np.zeros_like(t)])
    with pytest.raises(NotHorizontal):
        singular_curve_test(t, states)
    with pytest.raises(MalformedInstance):
        singular_curve_test(t[:2], states[:2])


def test_path_csv_round_trip(tmp_path):
    t, states = shrinking_path(count=5)
    path = str(tmp_path / "path.csv")
    write_path_csv(path, t, states)
    times, back = read_path_csv(path)
    assert np.array_equal(times, t)
    assert np.array_equal(back, states)


def test_path_csv_with_wrong_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,1,2\n1,2,3\n")
    with pytest.raises(MalformedInstance):
        read_path_csv(str(path))


def test_large_commutator_step_is_rejected():
    s = BigonState(0.0, 0.0, 1.0, np.pi / 4, 0.0)
    assert bigon_commutators(s).validated
    with pytest.raises(StepTooLarge):
        bigon_commutators(s, h=0.5)
    # [nu, eta] is estimated by (tan(alpha + h) - tan(alpha)) / h, far from linear at h = 0.5
    loose = bigon_commutators(s, h=0.5, strict=False)
    assert not loose.validated
    assert loose.to_dict()["ratios"][1] > 1.5


def test_positive_cone_at_the_reference_state():
    s = BigonState(0.0, 0.0, 1.0, np.pi / 4, 0.0)
    nu, xi, eta = generator_fields(s)
    # nu only turns the framing, xi moves B1 by (1, -1) and B2 by (1, 1)
    assert bigon_in_positive_cone(s, nu)
    assert bigon_in_positive_cone(s, xi)
    assert not bigon_in_positive_cone(s, BigonTangent(-xi.rates))
    # eta moves B2 against u2
    assert not bigon_in_positive_cone(s, eta)
    assert not bigon_in_positive_cone(s, BigonTangent(-eta.rates))
