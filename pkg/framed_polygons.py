"""
    Framed polygons: polygons with unit vectors at the vertices that make equal
    angles with every side from both of its ends.

    Framings are stored as directions alpha_i. The condition on side i reads
    alpha_i + alpha_{i+1} = 2 phi_i (mod 2*pi), phi_i being the side direction.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

import geom_core
from geom_core import TWO_PI, circle_through_three_points, cross, direction, get_tolerance, reduce_angle, unit, wrap_angle
from errors import DegeneratePolygon, EvenOrder, NoFraming, OddOrder

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Polygon:
    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise DegeneratePolygon('Polygon needs an (n, 2) vertex array with n >= 2, got shape {}'.format(v.shape))
        if not np.all(np.isfinite(v)):
            raise DegeneratePolygon('Polygon vertices must be finite')
        object.__setattr__(self, 'vertices', v)

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    def sides(self) -> np.ndarray:
        """Side vectors B_{i+1} - B_i."""
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    def to_dict(self) -> dict:
        return {"vertices": self.vertices.tolist()}


@dataclass(frozen=True)
class FramedPolygon:
    polygon: Polygon
    framing_directions: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.framing_directions, dtype=np.float64)
        if a.shape != (self.polygon.n,):
            raise ValueError('Need one framing direction per vertex')
        object.__setattr__(self, 'framing_directions', reduce_angle(a))

    @property
    def n(self) -> int:
        return self.polygon.n

    @property
    def vertices(self) -> np.ndarray:
        return self.polygon.vertices

    @property
    def framings(self) -> np.ndarray:
        return unit(self.framing_directions)

    def residuals(self) -> np.ndarray:
        phi, _ = side_data(self.polygon)
        a = self.framing_directions
        return wrap_angle(a + np.roll(a, -1) - 2.0 * phi)

    def residual_max(self) -> float:
        return float(np.max(np.abs(self.residuals())))

    def is_valid(self, tol: Optional[float] = None) -> bool:
        return self.residual_max() < get_tolerance(tol)

    def flip(self) -> 'FramedPolygon':
        return FramedPolygon(self.polygon, self.framing_directions + np.pi)

    def to_dict(self) -> dict:
        return {"vertices": self.vertices.tolist(),
                "framing_directions": self.framing_directions.tolist()}


def side_data(P: Polygon, tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Side directions phi_i in [0, 2*pi) and exterior angles theta_i = phi_i - phi_{i-1} in (-pi, pi]."""
    sides = P.sides()
    lengths = np.linalg.norm(sides, axis=1)
    scale = max(1.0, float(np.max(np.abs(P.vertices))))
    bad = np.nonzero(lengths <= get_tolerance(tol) * scale)[0]
    if len(bad) > 0:
        raise DegeneratePolygon('Consecutive vertices {} and {} coincide'.format(bad[0], (bad[0] + 1) % P.n))
    phi = reduce_angle(direction(sides))
    theta = wrap_angle(phi - np.roll(phi, 1))
    return phi, theta


def compute_framing_odd(P: Polygon, tol: Optional[float] = None) -> FramedPolygon:
    """The unique framing of an odd polygon, alpha_i = sum_j (-1)^j phi_{i+j}."""
    n = P.n
    if n % 2 == 0:
        raise EvenOrder('Unique framing exists only for odd n, got n={}'.format(n))
    phi, _ = side_data(P, tol)
    signs = (-1.0) ** np.arange(n)
    alpha = np.array([np.dot(signs, np.roll(phi, -i)) for i in range(n)])
    return FramedPolygon(P, alpha)


def framing_obstruction_even(P: Polygon, tol: Optional[float] = None) -> float:
    """Residue of the sum of exterior angles at alternate vertices mod pi, in [-pi/2, pi/2)."""
    if P.n % 2 == 1:
        raise OddOrder('Obstruction is defined for even n, got n={}'.format(P.n))
    _, theta = side_data(P, tol)
    s = np.sum(theta[0::2])
    return float(np.mod(s + np.pi / 2, np.pi) - np.pi / 2)


def _base_direction_even(P: Polygon, tol: Optional[float] = None) -> float:
    """Framing direction at B_0 of the base solution: tangent of the circle through B_{n-1}, B_0, B_1."""
    v = P.vertices
    if P.n > 2:
        c = circle_through_three_points(v[-1], v[0], v[1], tol)
        if c is not None:
            return float(direction(geom_core.rotate90(v[0] - c.center)))
    phi0 = direction(v[1] - v[0])
    return float(phi0 - np.pi / 2)


def framing_family_even(P: Polygon, s: float, tol: Optional[float] = None) -> FramedPolygon:
    """Framing at family parameter s of an even polygon.

    The base solution (s=0) uses the tangent of the circle through B_{n-1}, B_0, B_1 at B_0,
    so cyclic polygons get their circumcircle tangents. Parameter s adds s at 1-based even
    vertices (0-based odd indices) and subtracts it at the others.
    """
    n = P.n
    if n % 2 == 1:
        raise OddOrder('Framing family is defined for even n, got n={}'.format(n))
    tol = get_tolerance(tol)
    phi, _ = side_data(P, tol)
    if n > 2:
        obstruction = framing_obstruction_even(P, tol)
        if abs(obstruction) > tol:
            raise NoFraming('Framing obstruction {:.3e} is not zero'.format(obstruction), residual=obstruction)
    alpha = np.empty(n)
    alpha[0] = _base_direction_even(P, tol)
    for i in range(n - 1):
        alpha[i + 1] = 2.0 * phi[i] - alpha[i]
    shift = np.where(np.arange(n) % 2 == 1, s, -s)
    return FramedPolygon(P, alpha + shift)


def framing_residual_max(FP: FramedPolygon) -> float:
    return FP.residual_max()


def is_generic(FP: FramedPolygon, tol: Optional[float] = None) -> bool:
    """False when some three consecutive framing vectors are tangent to the circle through their vertices."""
    tol = max(get_tolerance(tol), 1e-8)
    n = FP.n
    if n < 3:
        return False
    v = FP.vertices
    u = FP.framings
    for i in range(n):
        idx = [(i - 1) % n, i, (i + 1) % n]
        c = circle_through_three_points(v[idx[0]], v[idx[1]], v[idx[2]])
        if c is None:
            # collinear: tangency to the line means parallel to it
            d = v[idx[2]] - v[idx[0]]
            d = d / np.linalg.norm(d)
            tangent = [abs(cross(u[k], d)) < tol for k in idx]
        else:
            tangent = [abs(np.dot(u[k], (v[k] - c.center) / c.radius)) < tol for k in idx]
        if all(tangent):
            logger.debug('Framing vectors at %s are tangent to one circle', idx)
            return False
    return True


def random_convex_polygon(n: int, rng: np.random.RandomState, jitter: float = 0.6) -> Polygon:
    """Convex polygon with vertices on perturbed radii at sorted random angles."""
    while True:
        angles = np.sort(rng.uniform(0.0, TWO_PI, n))
        gaps = np.diff(np.append(angles, angles[0] + TWO_PI))
        if np.min(gaps) < 0.2 * TWO_PI / n:
            continue
        radii = 1.0 + jitter * rng.uniform(-0.25, 0.25, n)
        P = Polygon(unit(angles) * radii[:, None])
        _, theta = side_data(P)
        if np.all(theta > 1e-3):
            return P


def random_cyclic_polygon(n: int, rng: np.random.RandomState, radius: float = 1.0,
                          center=(0.0, 0.0)) -> Polygon:
    while True:
        angles = np.sort(rng.uniform(0.0, TWO_PI, n))
        gaps = np.diff(np.append(angles, angles[0] + TWO_PI))
        if np.min(gaps) > 0.2 * TWO_PI / n:
            return Polygon(np.asarray(center) + radius * unit(angles))


def perturbed_quadrilateral(rng: np.random.RandomState, push: float = 0.05) -> Polygon:
    """Cyclic quadrilateral with one vertex pushed radially off the circle through the other three."""
    P = random_cyclic_polygon(4, rng)
    v = P.vertices.copy()
    sign = 1.0 if rng.uniform() < 0.5 else -1.0
    v[3] = v[3] * (1.0 + sign * push)
    return Polygon(v)
