"""
    Plane geometry primitives shared by the other modules.

    Points and vectors are numpy arrays of shape (2,). Directions are plain floats
    (radians); directed angles are reduced to [0, 2*pi).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from errors import DegenerateCircle, FramingViolated

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

# Absolute tolerance for geometric residuals
DEFAULT_TOL = 1e-9


def set_tolerance(tol: float):
    global DEFAULT_TOL
    if not tol > 0:
        raise ValueError('Tolerance must be positive, got {}'.format(tol))
    DEFAULT_TOL = float(tol)
    logger.debug('Default tolerance set to %g', DEFAULT_TOL)


def get_tolerance(tol: Optional[float] = None) -> float:
    return DEFAULT_TOL if tol is None else tol


def point(x: float, y: float) -> np.ndarray:
    return np.array([x, y], dtype=np.float64)


def unit(angle) -> np.ndarray:
    """Unit vector(s) at the given direction(s). Vectorized over the last axis."""
    angle = np.asarray(angle, dtype=np.float64)
    return np.stack([np.cos(angle), np.sin(angle)], axis=-1)


def direction(v) -> float:
    v = np.asarray(v, dtype=np.float64)
    return np.arctan2(v[..., 1], v[..., 0])


def reduce_angle(a):
    """Reduce to [0, 2*pi)."""
    r = np.mod(a, TWO_PI)
    # np.mod can return 2*pi for tiny negative inputs
    return np.where(r >= TWO_PI, 0.0, r) if isinstance(r, np.ndarray) else (0.0 if r >= TWO_PI else float(r))


def wrap_angle(a):
    """Reduce to (-pi, pi]."""
    r = np.pi - np.mod(np.pi - np.asarray(a, dtype=np.float64), TWO_PI)
    return float(r) if r.ndim == 0 else r


def circular_distance(a, b, period: float = TWO_PI):
    d = np.mod(np.asarray(a) - np.asarray(b), period)
    return np.minimum(d, period - d)


def cross(u, v):
    u = np.asarray(u)
    v = np.asarray(v)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def rotate90(v) -> np.ndarray:
    """J v = (-v_y, v_x)."""
    v = np.asarray(v, dtype=np.float64)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def angle_between(u, v) -> float:
    """Counterclockwise rotation taking u to v, in [0, 2*pi)."""
    return reduce_angle(np.arctan2(cross(u, v), np.dot(u, v)))


@dataclass(frozen=True)
class Circle:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, 'center', np.asarray(self.center, dtype=np.float64))
        if not self.radius > 0:
            raise DegenerateCircle('Circle radius must be positive, got {}'.format(self.radius))

    def power(self, x) -> float:
        return float(np.sum((np.asarray(x) - self.center) ** 2) - self.radius ** 2)

    def contains(self, x, tol: Optional[float] = None) -> bool:
        return self.power(x) < -get_tolerance(tol)


@dataclass(frozen=True)
class Line:
    """Line through `origin` with unit direction `direction`."""
    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=np.float64)
        object.__setattr__(self, 'origin', np.asarray(self.origin, dtype=np.float64))
        object.__setattr__(self, 'direction', d / np.linalg.norm(d))

    def at(self, s) -> np.ndarray:
        return self.origin + np.multiply.outer(s, self.direction)

    def distance(self, x) -> float:
        return float(abs(cross(self.direction, np.asarray(x) - self.origin)))


def line_intersection(a: Line, b: Line, tol: Optional[float] = None) -> Optional[np.ndarray]:
    den = cross(a.direction, b.direction)
    if abs(den) < get_tolerance(tol):
        return None
    s = cross(b.origin - a.origin, b.direction) / den
    return a.at(s)


def power_of_point(c: Circle, x) -> float:
    return c.power(x)


def circle_through_three_points(p, q, r, tol: Optional[float] = None) -> Optional[Circle]:
    """Circumcircle of three points, None when they are collinear."""
    p, q, r = (np.asarray(t, dtype=np.float64) for t in (p, q, r))
    b = q - p
    c = r - p
    d = 2.0 * cross(b, c)
    scale = max(np.dot(b, b), np.dot(c, c))
    if abs(d) <= get_tolerance(tol) * scale:
        return None
    ux = (c[1] * np.dot(b, b) - b[1] * np.dot(c, c)) / d
    uy = (b[0] * np.dot(c, c) - c[0] * np.dot(b, b)) / d
    center = p + np.array([ux, uy])
    return Circle(center, float(np.hypot(ux, uy)))


def framing_residual(b1, u1, b2, u2) -> float:
    """Residual of angle(u1, B1B2) = angle(B1B2, u2) mod 2*pi, in (-pi, pi]."""
    phi = direction(np.asarray(b2) - np.asarray(b1))
    return wrap_angle(direction(u1) + direction(u2) - 2.0 * phi)


def circle_through_point_pair_tangent_to_directions(b1, u1, b2, u2,
                                                    tol: Optional[float] = None) -> Tuple[Circle, int]:
    """Circle through B1 and B2 tangent to u1 at B1 and to u2 at B2.

    Returns the circle and the orientation sign: +1 when the framing vectors are
    counterclockwise tangents of the circle, -1 otherwise.
    """
    tol = get_tolerance(tol)
    b1 = np.asarray(b1, dtype=np.float64)
    b2 = np.asarray(b2, dtype=np.float64)
    u1 = np.asarray(u1, dtype=np.float64)
    u2 = np.asarray(u2, dtype=np.float64)
    chord = b2 - b1
    length = np.linalg.norm(chord)
    if length <= tol:
        raise DegenerateCircle('Coincident points, the circle is undefined')
    res = framing_residual(b1, u1, b2, u2)
    if abs(res) > max(tol, 1e-12):
        raise FramingViolated('Framing condition fails by {:.3e}'.format(res), residual=res)
    sin_a = cross(u1, chord) / length
    if abs(sin_a) <= tol:
        raise DegenerateCircle('Framing vector is parallel to the chord (infinite radius)')
    # Normal to u1 at B1 meets the perpendicular bisector of the chord.
    # center = B1 + s J u1 with |center - B2| = |center - B1|  =>  s = |chord|^2 / (2 chord . J u1)
    n1 = rotate90(u1)
    s = np.dot(chord, chord) / (2.0 * np.dot(chord, n1))
    center = b1 + s * n1
    radius = abs(s)
    # u1 = sign * J(B1 - center) / radius
    sign = 1 if np.dot(rotate90(b1 - center), u1) > 0 else -1
    tangency = abs(np.dot(b2 - center, u2)) / radius
    if tangency > max(tol, 1e-10) * max(1.0, radius):
        raise FramingViolated('Circle is not tangent to u2 (residual {:.3e})'.format(tangency), residual=tangency)
    return Circle(center, radius), sign
