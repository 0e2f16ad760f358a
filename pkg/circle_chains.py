"""
    Oriented chains of tangent circles.

    Circle i has center O_i and signed radius r_i; circles i and i+1 are tangent.
    Edge i joins O_i to O_{i+1} and is oriented toward the larger signed radius, so
    O_{i+1} - O_i = (r_{i+1} - r_i) u_i with u_i the unit orientation vector.
    Tangency point B_i of circles i and i+1 is O_i - r_i u_i = O_{i+1} - r_{i+1} u_i.
    A positive sign means the circle rotates counterclockwise when the chain turns like gears.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from geom_core import TWO_PI, circle_through_point_pair_tangent_to_directions, direction, get_tolerance, rotate90, unit
from framed_polygons import FramedPolygon, Polygon, is_generic
from errors import EqualSignedRadii, InconsistentClosure, InvalidChain, NonGenericChain, NonGenericFramedPolygon, OrientationObstruction

logger = logging.getLogger(__name__)

# Coincident tangency points: distance below this fraction of the chain diameter
COINCIDENCE_REL_TOL = 1e-7


@dataclass(frozen=True)
class OrientedChain:
    centers: np.ndarray
    signed_radii: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=np.float64)
        r = np.asarray(self.signed_radii, dtype=np.float64)
        if c.ndim != 2 or c.shape[1] != 2 or r.shape != (c.shape[0],) or c.shape[0] < 2:
            raise InvalidChain('Chain needs n >= 2 centers and as many signed radii')
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(r))):
            raise InvalidChain('Chain data must be finite')
        object.__setattr__(self, 'centers', c)
        object.__setattr__(self, 'signed_radii', r)
        residual = self.tangency_residuals()
        scale = self.diameter()
        if np.max(np.abs(residual)) > max(get_tolerance(), 1e-9) * max(1.0, scale):
            raise InvalidChain('Consecutive circles are not tangent (residual {:.3e})'.format(np.max(np.abs(residual))),
                               residual=float(np.max(np.abs(residual))))
        dr = np.roll(r, -1) - r
        if np.any(np.abs(dr) <= COINCIDENCE_REL_TOL * max(1.0, scale)):
            # tangency forces equal centers as well
            raise InvalidChain('Consecutive circles coincide')

    @property
    def n(self) -> int:
        return self.centers.shape[0]

    def edges(self) -> np.ndarray:
        return np.roll(self.centers, -1, axis=0) - self.centers

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.edges(), axis=1)

    def tangency_residuals(self) -> np.ndarray:
        r = self.signed_radii
        return self.edge_lengths() - np.abs(np.roll(r, -1) - r)

    def diameter(self) -> float:
        c = self.centers
        ext = np.abs(self.signed_radii)[:, None]
        lo = np.min(c - ext, axis=0)
        hi = np.max(c + ext, axis=0)
        return float(np.linalg.norm(hi - lo))

    def edge_orientations(self) -> np.ndarray:
        r = self.signed_radii
        return np.where(np.roll(r, -1) > r, 1.0, -1.0)

    def edge_units(self) -> np.ndarray:
        """u_i, the unit vector of edge i pointing toward the larger signed radius."""
        e = self.edges()
        return self.edge_orientations()[:, None] * e / np.linalg.norm(e, axis=1)[:, None]

    def flip(self) -> 'OrientedChain':
        return OrientedChain(self.centers, -self.signed_radii)

    def state(self) -> np.ndarray:
        """Flat ambient coordinates [O_0x, O_0y, ..., O_{n-1}y, r_0, ..., r_{n-1}]."""
        return np.concatenate([self.centers.ravel(), self.signed_radii])

    @classmethod
    def from_state(cls, x) -> 'OrientedChain':
        x = np.asarray(x, dtype=np.float64)
        n = len(x) // 3
        return cls(x[:2 * n].reshape(n, 2), x[2 * n:])

    def to_dict(self) -> dict:
        return {"centers": self.centers.tolist(), "signed_radii": self.signed_radii.tolist()}


@dataclass(frozen=True)
class ZeroLengthPolygon:
    vertices: np.ndarray
    edge_orientations: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'vertices', np.asarray(self.vertices, dtype=np.float64))
        object.__setattr__(self, 'edge_orientations', np.asarray(self.edge_orientations, dtype=np.float64))

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.roll(self.vertices, -1, axis=0) - self.vertices, axis=1)

    def signed_perimeter(self) -> float:
        return float(np.dot(self.edge_orientations, self.edge_lengths()))


@dataclass(frozen=True)
class TangencyPoint:
    point: np.ndarray
    # tangency of circles `index` and `index + 1`
    index: int


def canonical(chain: OrientedChain) -> OrientedChain:
    return chain if chain.signed_radii[0] > 0 else chain.flip()


def add_constant(chain: OrientedChain, c: float) -> OrientedChain:
    return OrientedChain(chain.centers, chain.signed_radii + c)


def centers_polygon(chain: OrientedChain) -> ZeroLengthPolygon:
    r = chain.signed_radii
    if np.any(np.roll(r, -1) == r):
        raise EqualSignedRadii('Edge orientation is undefined for equal signed radii')
    return ZeroLengthPolygon(chain.centers, chain.edge_orientations())


def lift_polygon(E: ZeroLengthPolygon, r1: float, tol: Optional[float] = None) -> OrientedChain:
    """Signed radii propagated from r1 along the oriented edges."""
    tol = get_tolerance(tol)
    steps = E.edge_orientations * E.edge_lengths()
    closure = float(np.sum(steps))
    scale = max(1.0, float(np.sum(E.edge_lengths())))
    if abs(closure) > tol * scale:
        raise InconsistentClosure('Signed perimeter {:.3e} is not zero'.format(closure), residual=closure)
    r = r1 + np.concatenate([[0.0], np.cumsum(steps[:-1])])
    return OrientedChain(E.vertices, r)


def tangency_points(chain: OrientedChain) -> List[TangencyPoint]:
    r = chain.signed_radii
    if np.any(np.roll(r, -1) == r):
        raise EqualSignedRadii('Tangency point is undefined for coinciding circles')
    b = chain.centers - r[:, None] * chain.edge_units()
    return [TangencyPoint(b[i], i) for i in range(chain.n)]


def tangency_array(chain: OrientedChain) -> np.ndarray:
    return np.array([t.point for t in tangency_points(chain)])


def is_generic_chain(chain: OrientedChain) -> bool:
    b = tangency_array(chain)
    gaps = np.linalg.norm(np.roll(b, -1, axis=0) - b, axis=1)
    return bool(np.all(gaps > COINCIDENCE_REL_TOL * chain.diameter()))


def chain_to_framed(chain: OrientedChain) -> FramedPolygon:
    """Tangency points framed by the velocity of the gear rotation, -J u_i."""
    if not is_generic_chain(chain):
        raise NonGenericChain('Consecutive tangency points coincide')
    b = tangency_array(chain)
    u = chain.edge_units()
    alpha = direction(-rotate90(u))
    return FramedPolygon(Polygon(b), alpha)


def framed_to_chain(FP: FramedPolygon, tol: Optional[float] = None) -> OrientedChain:
    """Circle i passes through B_{i-1} and B_i tangent to the framing there."""
    tol = get_tolerance(tol)
    if not is_generic(FP, tol):
        raise NonGenericFramedPolygon('Framed polygon is not generic')
    n = FP.n
    v = FP.vertices
    u = FP.framings
    centers = np.empty((n, 2))
    radii = np.empty(n)
    for i in range(n):
        j = (i - 1) % n
        circle, _ = circle_through_point_pair_tangent_to_directions(v[j], u[j], v[i], u[i], tol=max(tol, 1e-9))
        centers[i] = circle.center
        # the framing is the rotation velocity J(B - O)/r of circle i
        r_from_first = float(np.dot(rotate90(v[j] - circle.center), u[j]))
        r_from_second = float(np.dot(rotate90(v[i] - circle.center), u[i]))
        if abs(r_from_first - r_from_second) > 1e-6 * max(1.0, circle.radius):
            raise OrientationObstruction('Rotation senses disagree on circle {}'.format(i),
                                         residual=r_from_first - r_from_second)
        radii[i] = r_from_first
    return OrientedChain(centers, radii)


def _solve_on_conic(f1, f2, eps_a: float, eps_b: float, k: float, omega: float) -> Optional[np.ndarray]:
    """Point X on the ray from f1 at angle omega with eps_a |f1 X| + eps_b |X f2| = k."""
    d = f1 - f2
    u = unit(omega)
    den = 2.0 * (np.dot(d, u) + eps_a * k)
    if abs(den) < 1e-12:
        return None
    rho = (k * k - np.dot(d, d)) / den
    if rho <= 0 or eps_b * (k - eps_a * rho) < 0:
        return None
    return f1 + rho * u


def random_generic_chain(n: int, rng: np.random.RandomState, sine_margin: float = 0.2,
                         radius_margin: float = 0.05, max_tries: int = 10000) -> OrientedChain:
    """Generic oriented chain of n >= 4 circles.

    Samples a closed polygon, moves its last vertex onto the conic that makes the signed
    perimeter vanish, lifts with a random r_0 and rejects samples that come too close to the
    degenerate strata (small |sin theta|, small radii, coincident tangency points).
    """
    for _ in range(max_tries):
        eps = np.where(rng.uniform(size=n) < 0.5, 1.0, -1.0)
        if np.all(eps == eps[0]):
            continue
        angles = np.sort(rng.uniform(0.0, TWO_PI, n))
        pts = unit(angles) * rng.uniform(0.6, 1.4, n)[:, None]
        lengths = np.linalg.norm(np.diff(pts[:n - 1], axis=0), axis=1)
        k = -float(np.dot(eps[:n - 2], lengths))
        x = _solve_on_conic(pts[n - 2], pts[0], eps[n - 2], eps[n - 1], k, rng.uniform(0.0, TWO_PI))
        if x is None:
            continue
        pts[n - 1] = x
        E = ZeroLengthPolygon(pts, eps)
        if np.min(E.edge_lengths()) < 0.1:
            continue
        try:
            chain = lift_polygon(E, rng.uniform(-1.0, 1.0), tol=1e-9)
        except (InconsistentClosure, InvalidChain):
            continue
        if np.any(chain.edge_orientations() != eps):
            continue
        if np.min(np.abs(chain.signed_radii)) < radius_margin:
            continue
        u = chain.edge_units()
        cos2 = np.sum(np.roll(u, 1, axis=0) * u, axis=1)
        sin_sq = (1.0 - cos2) / 2.0
        if np.min(sin_sq) < sine_margin ** 2:
            continue
        if not is_generic_chain(chain):
            continue
        b = tangency_array(chain)
        gaps = np.linalg.norm(np.roll(b, -1, axis=0) - b, axis=1)
        if np.min(gaps) < 0.05:
            continue
        return chain
    raise RuntimeError('No generic chain found in {} tries'.format(max_tries))
