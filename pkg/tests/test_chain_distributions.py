import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import integrators
from chain_distributions import (ChainField, ChainTangent, birkhoff_direction, chain_side_tangent, edge_speeds,
                                 eta_generator, framed_frame_residuals, in_positive_cone, jacobian_bracket,
                                 kernel_field, lie_bracket, lie_bracket_estimate, nu_generator, obstruction_after_step,
                                 pushforward_D, rank_certificate, tangent_angle, v_field, v_rank, w_field)
from circle_chains import OrientedChain, ZeroLengthPolygon, add_constant, chain_to_framed, random_generic_chain
from framed_polygons import Polygon, compute_framing_odd, framing_obstruction_even, random_convex_polygon
from geom_core import angle_between
from errors import DegeneratePolygon, NonGenericChain, NonGenericFramedPolygon, StepTooLarge
from strategies import generic_chains


def four_chain() -> OrientedChain:
    return OrientedChain([[0.0, 0.0], [3.0, 0.0], [0.0, 4.0], [np.sqrt(3.75), 0.5]], [1.0, -2.0, 3.0, -1.0])


@settings(max_examples=15, deadline=None)
@given(generic_chains())
def test_generators_are_tangent_to_chain_space(chain):
    for i in range(chain.n):
        assert np.max(np.abs(v_field(chain, i).constraint_residuals(chain))) < 1e-9
        w = w_field(chain, i)
        assert np.max(np.abs(w.constraint_residuals(chain))) < 1e-9 * max(1.0, np.max(np.abs(w.vector())))


def test_kernel_field_only_shrinks_radii():
    chain = four_chain()
    k = kernel_field(chain)
    assert np.allclose(k.vertex_velocities, 0.0, atol=1e-8)
    assert np.allclose(k.radius_rates, -2.0, atol=1e-8)
    assert np.max(np.abs(edge_speeds(chain, k))) < 1e-8


def test_v_fields_are_independent():
    assert v_rank(four_chain()) == 4


def test_flow_bracket_matches_jacobian_bracket():
    chain = four_chain()
    F, G = ChainField('v', 0), ChainField('v', 1)
    exact = jacobian_bracket(chain, F, G)
    numeric = lie_bracket(chain, F, G)
    assert tangent_angle(exact, numeric) < 1e-5
    assert np.linalg.norm(numeric.vector() - exact.vector()) < 1e-5 * np.linalg.norm(exact.vector())


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_brackets_span_the_chain_space(n):
    rng = np.random.RandomState(n)
    for _ in range(50):
        cert = rank_certificate(random_generic_chain(n, rng))
        assert cert.rank == 2 * n
        assert cert.validated
        assert len(cert.singular_values) == 2 * n
    d = cert.to_dict()
    assert len(d["ratios"]) == n and d["validated"]


def test_large_bracket_step_is_rejected():
    with pytest.raises(StepTooLarge):
        rank_certificate(four_chain(), h=1.0)


def test_three_chains_are_rejected():
    chain = OrientedChain([[0.0, 0.0], [3.0, 0.0], [-4.0, 0.0]], [1.0, -2.0, 5.0])
    with pytest.raises(NonGenericChain):
        rank_certificate(chain)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_circle_motion_matches_nu_generator(m):
    chain = four_chain()
    FP = chain_to_framed(chain)
    moved = chain_side_tangent(chain, m)
    nu = nu_generator(FP, m)
    a, b = moved.vector(), nu.vector()
    cosine = abs(np.dot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    assert cosine > 1 - 1e-6
    assert np.max(np.abs(framed_frame_residuals(FP, nu))) < 1e-12
    assert np.max(np.abs(framed_frame_residuals(FP, moved))) < 1e-6


def test_nu_generator_keeps_the_obstruction():
    FP = chain_to_framed(four_chain())
    assert abs(framing_obstruction_even(FP.polygon)) < 1e-9
    nu = nu_generator(FP, 1)
    assert abs(obstruction_after_step(FP, nu, 1e-4)) < 1e-6


def test_eta_generators_of_odd_polygons():
    P = random_convex_polygon(5, np.random.RandomState(2))
    FP = compute_framing_odd(P)
    for k in range(5):
        eta = eta_generator(FP, k)
        assert np.max(np.abs(framed_frame_residuals(FP, eta))) < 1e-12
        assert in_positive_cone(FP, eta)
    with pytest.raises(ValueError):
        eta_generator(chain_to_framed(four_chain()), 0)


def test_birkhoff_direction_bisects_the_corner():
    P = Polygon([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    assert np.allclose(birkhoff_direction(P, 1), [1.0, 1.0])


@settings(max_examples=8, deadline=None)
@given(generic_chains())
def test_adjacent_brackets_point_along_w(chain):
    n = chain.n
    for j in range(n):
        est = lie_bracket_estimate(chain, ChainField('v', j), ChainField('v', (j + 1) % n))
        assert integrators.ratio_accepted(est.ratio)
        assert tangent_angle(ChainTangent.from_vector(est.value), w_field(chain, j)) < 1e-4


@settings(max_examples=8, deadline=None)
@given(generic_chains())
def test_brackets_of_distant_circles_vanish(chain):
    n = chain.n
    near = np.linalg.norm(lie_bracket(chain, ChainField('v', 0), ChainField('v', 1)).vector())
    for j in range(2, n - 1):
        far = lie_bracket(chain, ChainField('v', 0), ChainField('v', j))
        assert np.linalg.norm(far.vector()) < 1e-3 * near


@settings(max_examples=30, deadline=None)
@given(generic_chains())
def test_kernel_field_on_random_chains(chain):
    k = kernel_field(chain)
    assert np.max(np.abs(edge_speeds(chain, k))) < 1e-8
    assert np.max(np.abs(k.vertex_velocities)) < 1e-8
    assert np.max(np.abs(k.radius_rates + 2.0)) < 1e-8


@settings(max_examples=20, deadline=None)
@given(generic_chains(), st.floats(min_value=-2.0, max_value=2.0))
def test_kernel_field_ignores_added_constants(chain, c):
    a = kernel_field(chain).vector()
    b = kernel_field(add_constant(chain, c)).vector()
    assert np.allclose(a, b, atol=1e-12)


def _signed_perimeter_after(chain, tangent, h):
    E = ZeroLengthPolygon(chain.centers + h * tangent.vertex_velocities, chain.edge_orientations())
    return E.signed_perimeter()


@settings(max_examples=15, deadline=None)
@given(generic_chains())
def test_generators_keep_zero_signed_perimeter_to_first_order(chain):
    h = 1e-6
    base = ZeroLengthPolygon(chain.centers, chain.edge_orientations()).signed_perimeter()
    lengths = np.linalg.norm(chain.edges(), axis=1)
    for i in range(chain.n):
        for t in (v_field(chain, i), w_field(chain, i)):
            dv = np.linalg.norm(np.roll(t.vertex_velocities, -1, axis=0) - t.vertex_velocities, axis=1)
            second_order = np.sum(dv ** 2 / lengths)
            change = abs(_signed_perimeter_after(chain, t, h) - base)
            assert change <= second_order * h * h + 1e-12


def test_distribution_generators_follow_parity():
    P = random_convex_polygon(5, np.random.RandomState(2))
    odd = compute_framing_odd(P)
    for k in range(5):
        assert np.array_equal(pushforward_D(odd, k).vector(), eta_generator(odd, k).vector())
    even = chain_to_framed(four_chain())
    for m in range(4):
        assert np.array_equal(pushforward_D(even, m).vector(), nu_generator(even, m).vector())


def test_distribution_needs_a_generic_polygon():
    triangle = compute_framing_odd(Polygon([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(NonGenericFramedPolygon):
        pushforward_D(triangle, 0)


def test_birkhoff_direction_on_a_line():
    P = Polygon([[0.0, 0.0], [1.0, 0.0], [3.0, 0.0], [3.0, 1.0]])
    assert np.allclose(birkhoff_direction(P, 1), [2.0, 0.0])
    with pytest.raises(DegeneratePolygon):
        birkhoff_direction(Polygon([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]), 1)


def test_birkhoff_direction_bisects_every_corner():
    P = random_convex_polygon(7, np.random.RandomState(5))
    v = P.vertices
    for i in range(7):
        d = birkhoff_direction(P, i)
        incoming = v[i] - v[i - 1]
        outgoing = v[(i + 1) % 7] - v[i]
        assert abs(angle_between(incoming, d) - angle_between(d, outgoing)) < 1e-12
