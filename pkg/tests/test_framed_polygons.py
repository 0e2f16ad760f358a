import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from framed_polygons import (FramedPolygon, Polygon, compute_framing_odd, framing_family_even, framing_obstruction_even,
                             framing_residual_max, is_generic, random_cyclic_polygon, side_data)
from geom_core import circle_through_three_points, circular_distance
from errors import DegeneratePolygon, EvenOrder, NoFraming, OddOrder
from strategies import cyclic_quadrilaterals, non_cyclic_quadrilaterals, odd_polygons


@settings(max_examples=30, deadline=None)
@given(odd_polygons())
def test_odd_polygons_have_a_framing(P):
    FP = compute_framing_odd(P)
    assert FP.is_valid()
    assert framing_residual_max(FP) < 1e-9
    # flipping every framing vector keeps the condition
    assert FP.flip().residual_max() < 1e-9


def test_odd_cyclic_polygon_is_framed_by_its_circle():
    P = random_cyclic_polygon(5, np.random.RandomState(3), radius=2.0, center=(0.5, -1.0))
    FP = compute_framing_odd(P)
    radial = (P.vertices - np.array([0.5, -1.0])) / 2.0
    assert np.max(np.abs(np.sum(radial * FP.framings, axis=1))) < 1e-9
    assert not is_generic(FP)


@settings(max_examples=30, deadline=None)
@given(cyclic_quadrilaterals(), st.floats(min_value=-1.0, max_value=1.0))
def test_cyclic_quadrilateral_has_a_framing_family(P, s):
    assert abs(framing_obstruction_even(P)) < 1e-9
    FP = framing_family_even(P, s)
    assert FP.residual_max() < 1e-9


@settings(max_examples=20, deadline=None)
@given(cyclic_quadrilaterals())
def test_base_framing_of_cyclic_quadrilateral_is_tangent_to_circumcircle(P):
    FP = framing_family_even(P, 0.0)
    v = P.vertices
    # the circumcenter is the point equidistant from all vertices
    A = 2.0 * (v[1:] - v[0])
    b = np.sum(v[1:] ** 2, axis=1) - np.sum(v[0] ** 2)
    center = np.linalg.lstsq(A, b, rcond=None)[0]
    radial = v - center
    radial /= np.linalg.norm(radial, axis=1)[:, None]
    assert np.max(np.abs(np.sum(radial * FP.framings, axis=1))) < 1e-7


@settings(max_examples=30, deadline=None)
@given(non_cyclic_quadrilaterals())
def test_non_cyclic_quadrilateral_has_no_framing(P):
    assert abs(framing_obstruction_even(P)) > 1e-6
    with pytest.raises(NoFraming):
        framing_family_even(P, 0.0)


def test_family_parameter_shifts_alternate_vertices():
    P = random_cyclic_polygon(6, np.random.RandomState(11))
    base = framing_family_even(P, 0.0)
    moved = framing_family_even(P, 0.3)
    diff = moved.framing_directions - base.framing_directions
    expected = np.array([-0.3, 0.3, -0.3, 0.3, -0.3, 0.3])
    assert np.max(circular_distance(diff, expected)) < 1e-12


def test_square_obstruction_and_exterior_angles():
    P = Polygon([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    phi, theta = side_data(P)
    assert np.allclose(phi, [0.0, np.pi / 2, np.pi, 3 * np.pi / 2])
    assert np.allclose(theta, np.pi / 2)
    assert abs(framing_obstruction_even(P)) < 1e-12


def test_parity_and_degeneracy_errors():
    square = Polygon([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    triangle = Polygon([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(EvenOrder):
        compute_framing_odd(square)
    with pytest.raises(OddOrder):
        framing_obstruction_even(triangle)
    with pytest.raises(OddOrder):
        framing_family_even(triangle, 0.0)
    with pytest.raises(DegeneratePolygon):
        compute_framing_odd(Polygon([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]))
    with pytest.raises(DegeneratePolygon):
        Polygon([[0.0, 0.0]])


def test_framed_polygon_needs_one_direction_per_vertex():
    with pytest.raises(ValueError):
        FramedPolygon(Polygon([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), [0.0, 1.0])


def test_non_cyclic_quadrilateral_obstruction_value():
    P = Polygon([[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 2.0]])
    # theta_0 + theta_2 = pi/2 + (pi/2 - atan(1/2)), reduced mod pi
    assert abs(framing_obstruction_even(P) + np.arctan(0.5)) < 1e-12
    with pytest.raises(NoFraming):
        framing_family_even(P, 0.0)


@settings(max_examples=30, deadline=None)
@given(odd_polygons(sizes=(3,)))
def test_triangle_framing_is_tangent_to_the_circumcircle(P):
    FP = compute_framing_odd(P)
    c = circle_through_three_points(*P.vertices)
    radial = (P.vertices - c.center) / c.radius
    assert np.max(np.abs(np.sum(radial * FP.framings, axis=1))) < 1e-9


@settings(max_examples=20, deadline=None)
@given(odd_polygons(), st.floats(min_value=0.01, max_value=1.0), st.integers(min_value=0, max_value=8))
def test_odd_framing_is_unique(P, delta, k):
    FP = compute_framing_odd(P)
    alpha = FP.framing_directions.copy()
    alpha[k % P.n] += delta
    # both sides at the moved vertex now fail by delta
    assert FramedPolygon(P, alpha).residual_max() > 0.5 * delta
