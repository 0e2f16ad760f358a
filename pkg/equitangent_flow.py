"""
    Equitangent flow on polygons inscribed in the unit circle.

    Vertex A_i = (cos psi_i, sin psi_i). The tangent lengths x_i solve x_i + x_{i+1} = |A_i A_{i+1}|;
    for odd n the solution is unique and the flow moves each vertex with d psi_i / dt = x_i.
    Bicentric (Poncelet) polygons, the circulant linearization at the regular polygon and its
    spectrum live here as well.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import circulant, eigvals
from scipy.optimize import brentq

import integrators
from geom_core import TWO_PI, get_tolerance, unit, wrap_angle
from errors import (EvenOrder, InvariantLost, MalformedInstance, NoReturn, NoTangent, NonGeometric, OddOrder,
                    StepTooLarge, UnsupportedN)

logger = logging.getLogger(__name__)

CLOCKS = ('reparameterized', 'unit')
DEFAULT_STEPS_PER_PERIOD = 10000
# endpoint change under step halving that is still accepted
HALVING_TOL = 1e-7


@dataclass(frozen=True)
class InscribedPolygon:
    psi: np.ndarray
    allow_star: bool = False

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=np.float64)
        if psi.ndim != 1 or len(psi) < 3:
            raise MalformedInstance('Inscribed polygon needs at least 3 vertex angles')
        object.__setattr__(self, 'psi', psi)
        gaps = self.gaps()
        if np.any(gaps <= 0):
            raise InvariantLost('Consecutive vertices coincide')
        if not self.allow_star and abs(np.sum(gaps) - TWO_PI) > 1e-9:
            raise InvariantLost('Vertices are not in counterclockwise convex position')

    @property
    def n(self) -> int:
        return len(self.psi)

    def gaps(self) -> np.ndarray:
        return np.mod(np.roll(self.psi, -1) - self.psi, TWO_PI)

    def vertices(self) -> np.ndarray:
        return unit(self.psi)

    def side_lengths(self) -> np.ndarray:
        return 2.0 * np.sin(self.gaps() / 2.0)

    def lifted(self) -> np.ndarray:
        """Angles made increasing over one turn starting from psi_0."""
        return self.psi[0] + np.concatenate([[0.0], np.cumsum(self.gaps()[:-1])])

    def to_dict(self) -> dict:
        return {"psi": self.psi.tolist()}


def regular_polygon(n: int, phase: float = 0.0) -> InscribedPolygon:
    return InscribedPolygon(phase + TWO_PI * np.arange(n) / n)


def random_convex_inscribed(n: int, rng: np.random.RandomState, spread: float = 0.35) -> InscribedPolygon:
    """Perturbation of the regular polygon keeping the cyclic order."""
    base = TWO_PI * np.arange(n) / n
    return InscribedPolygon(base + rng.uniform(-spread, spread, n) * np.pi / n)


@dataclass
class TangentLengths:
    x: np.ndarray
    sides: np.ndarray
    geometric: bool

    def residuals(self) -> np.ndarray:
        return self.x + np.roll(self.x, -1) - self.sides


def _alternating_lengths(gaps: np.ndarray) -> np.ndarray:
    n = len(gaps)
    half = np.sin(gaps / 2.0)
    signs = (-1.0) ** np.arange(n)
    return np.array([np.dot(signs, np.roll(half, -i)) for i in range(n)])


def _is_geometric(x: np.ndarray, tol: float) -> bool:
    # x_i <= |A_i A_{i+1}| is the same as x_{i+1} >= 0
    return bool(np.all(x >= -tol))


def tangent_lengths(A: InscribedPolygon, tol: Optional[float] = None) -> TangentLengths:
    if A.n % 2 == 0:
        raise EvenOrder('Tangent lengths are unique only for odd n; use tangent_lengths_family')
    x = _alternating_lengths(A.gaps())
    return TangentLengths(x, A.side_lengths(), _is_geometric(x, get_tolerance(tol)))


def even_consistency(A: InscribedPolygon) -> float:
    if A.n % 2 == 1:
        raise OddOrder('Alternating side sum is a condition for even n')
    return float(np.dot((-1.0) ** np.arange(A.n), A.side_lengths()))


def tangent_lengths_family(A: InscribedPolygon, x1: float, tol: Optional[float] = None) -> TangentLengths:
    """Even n: the solution with x_0 = x1, defined when the alternating side sum vanishes."""
    tol = get_tolerance(tol)
    consistency = even_consistency(A)
    if abs(consistency) > tol:
        raise NonGeometric('Alternating side sum {:.3e} is not zero'.format(consistency), residual=consistency)
    sides = A.side_lengths()
    x = np.empty(A.n)
    x[0] = x1
    for i in range(A.n - 1):
        x[i + 1] = sides[i] - x[i]
    return TangentLengths(x, sides, _is_geometric(x, tol))


def _rates(psi: np.ndarray, clock: str) -> np.ndarray:
    x = _alternating_lengths(np.mod(np.roll(psi, -1) - psi, TWO_PI))
    if clock == 'unit':
        return x / x[0]
    return x


def flow_rhs(A: InscribedPolygon, clock: str = 'reparameterized') -> np.ndarray:
    """d psi / dt. The reparameterized clock gives x_i, the unit clock x_i / x_0 (A_0 at unit speed)."""
    if A.n % 2 == 0:
        raise EvenOrder('The equitangent field is defined for odd n')
    if clock not in CLOCKS:
        raise ValueError('Unknown clock {}'.format(clock))
    return _rates(A.psi, clock)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    clock: str = 'reparameterized'
    halving_defect: Optional[float] = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def polygon(self, k: int) -> InscribedPolygon:
        return InscribedPolygon(self.states[k])

    def write_csv(self, path: str, name: str = 'psi'):
        n = self.states.shape[1]
        header = ','.join(['t'] + ['{}_{}'.format(name, i + 1) for i in range(n)])
        np.savetxt(path, np.column_stack([self.times, self.states]), delimiter=',',
                   header=header, comments='', fmt='%.17g')


def _check_state(psi: np.ndarray, tol: float, t: float):
    gaps = np.mod(np.roll(psi, -1) - psi, TWO_PI)
    if np.any(gaps <= 0) or abs(np.sum(gaps) - TWO_PI) > 1e-7:
        raise InvariantLost('Polygon lost convexity at t={:.6g}'.format(t))
    x = _alternating_lengths(gaps)
    if not _is_geometric(x, tol):
        raise NonGeometric('Tangent length {:.3e} left the side at t={:.6g}'.format(float(np.min(x)), t),
                           residual=float(np.min(x)))


def _integrate(psi0: np.ndarray, T: float, steps: int, clock: str, tol: float, check: bool) -> np.ndarray:
    h = T / steps
    f = lambda psi: _rates(psi, clock)
    out = np.empty((steps + 1, len(psi0)))
    out[0] = psi0
    psi = psi0
    for k in range(steps):
        psi = integrators.rk4_step(f, psi, h)
        if check:
            _check_state(psi, tol, (k + 1) * h)
        out[k + 1] = psi
    return out


def integrate_flow(A0: InscribedPolygon, T: float, steps: int, clock: str = 'reparameterized',
                   halving_check: bool = False, tol: Optional[float] = None) -> Trajectory:
    """Fixed-step RK4 trajectory of the equitangent flow with per-step invariant monitoring."""
    flow_rhs(A0, clock)
    if steps < 1:
        raise ValueError('steps must be >= 1')
    tol = get_tolerance(tol)
    psi0 = A0.lifted()
    states = _integrate(psi0, T, steps, clock, tol, check=True)
    defect = None
    if halving_check:
        fine = _integrate(psi0, T, 2 * steps, clock, tol, check=False)
        defect = float(np.max(np.abs(fine[-1] - states[-1])))
        if defect > HALVING_TOL:
            raise StepTooLarge('Step halving moves the endpoint by {:.3e}'.format(defect), residual=defect)
    return Trajectory(np.linspace(0.0, T, steps + 1), states, clock, defect)


def regular_period(n: int) -> float:
    """T_0 = 2 pi / sin(pi / n)."""
    return TWO_PI / np.sin(np.pi / n)


def _shift_target(psi0: np.ndarray, shift: int) -> np.ndarray:
    n = len(psi0)
    idx = np.arange(n) + shift
    return psi0[idx % n] + TWO_PI * (idx // n)


def monodromy_defect(A0: InscribedPolygon, max_T: float, shift: int = 1, clock: str = 'reparameterized',
                     steps_per_period: int = DEFAULT_STEPS_PER_PERIOD) -> Tuple[float, float]:
    """First time tau at which every psi_i reaches psi_{i+shift}(0), and the max-norm mismatch there.

    The mean mismatch grows strictly along the flow, so the grid is scanned for its sign change
    and the crossing is refined with Brent's method.
    """
    flow_rhs(A0, clock)
    psi0 = A0.lifted()
    target = _shift_target(psi0, shift)
    rate = float(np.mean(_rates(psi0, clock)))
    h = (TWO_PI / rate) / steps_per_period
    f = lambda psi: _rates(psi, clock)
    g = lambda psi: float(np.mean(psi - target))
    t, psi = 0.0, psi0
    while g(psi) < 0:
        if t > max_T:
            raise NoReturn('No return to the shifted polygon within T={:.6g}'.format(max_T))
        nxt = integrators.rk4_step(f, psi, h)
        if g(nxt) >= 0:
            base = psi
            s = brentq(lambda s: g(integrators.rk4_step(f, base, s)), 0.0, h, xtol=1e-15)
            psi_tau = integrators.rk4_step(f, base, s)
            return t + s, float(np.max(np.abs(psi_tau - target)))
        t, psi = t + h, nxt
    return 0.0, float(np.max(np.abs(psi - target)))


def envelope_points(A: InscribedPolygon, tol: Optional[float] = None) -> np.ndarray:
    """B_i = A_i + x_i unit(A_{i+1} - A_i), the tangency points on side i."""
    tl = tangent_lengths(A, tol)
    if not tl.geometric:
        raise NonGeometric('Tangent lengths are not geometric')
    a = A.vertices()
    d = np.roll(a, -1, axis=0) - a
    return a + tl.x[:, None] * d / np.linalg.norm(d, axis=1)[:, None]


def triangle_incircle(points: np.ndarray) -> Tuple[np.ndarray, float]:
    p = np.asarray(points, dtype=np.float64)
    a = np.linalg.norm(p[1] - p[2])
    b = np.linalg.norm(p[2] - p[0])
    c = np.linalg.norm(p[0] - p[1])
    s = (a + b + c) / 2
    center = (a * p[0] + b * p[1] + c * p[2]) / (2 * s)
    area = abs((p[1, 0] - p[0, 0]) * (p[2, 1] - p[0, 1]) - (p[2, 0] - p[0, 0]) * (p[1, 1] - p[0, 1])) / 2
    return center, area / s


@dataclass(frozen=True)
class BicentricConfig:
    n: int
    R: float
    r: float
    d: float

    def __post_init__(self):
        if not (self.n >= 3 and self.r > 0 and self.d >= 0 and self.r + self.d < self.R):
            raise MalformedInstance('Bicentric configuration needs n >= 3, r > 0, d >= 0 and r + d < R')

    def to_dict(self) -> dict:
        return {"n": self.n, "R": self.R, "r": self.r, "d": self.d}


def euler_fuss_residual(cfg: BicentricConfig) -> float:
    R, r, d = cfg.R, cfg.r, cfg.d
    if cfg.n == 3:
        return R * R - (d * d + 2 * r * R)
    if cfg.n == 4:
        return (R * R - d * d) ** 2 - 2 * r * r * (R * R + d * d)
    raise UnsupportedN('Closed-form relation known here only for n = 3, 4; use poncelet_closure')


@dataclass
class PonceletResult:
    closure_defect: float
    polygon: InscribedPolygon
    advance: float = field(default=0.0)

    @property
    def winding(self) -> int:
        return int(round(self.advance / TWO_PI))


def _poncelet_steps(cfg: BicentricConfig, start: float):
    c = np.array([cfg.d, 0.0])
    p = cfg.R * unit(start)
    angles = [start]
    advance = 0.0
    for _ in range(cfg.n):
        w = c - p
        dist = np.linalg.norm(w)
        if dist <= cfg.r:
            raise NoTangent('Point lies inside the inner circle')
        beta = np.arcsin(cfg.r / dist)
        # forward tangent keeps the inner circle on its left
        t = unit(np.arctan2(w[1], w[0]) - beta)
        q = p - 2.0 * np.dot(p, t) * t
        step = np.mod(np.arctan2(q[1], q[0]) - np.arctan2(p[1], p[0]), TWO_PI)
        advance += step
        angles.append(angles[-1] + step)
        p = q
    return np.array(angles), advance


def poncelet_closure(cfg: BicentricConfig, start: float = 0.0) -> PonceletResult:
    """Iterate the tangent-line map n times from the outer point at angle `start`."""
    angles, advance = _poncelet_steps(cfg, start)
    defect = wrap_angle(angles[-1] - angles[0])
    polygon = InscribedPolygon(angles[:-1], allow_star=True)
    return PonceletResult(float(defect), polygon, float(advance))


def poncelet_polygon(cfg: BicentricConfig, start: float = 0.0) -> InscribedPolygon:
    """The Poncelet polygon on the outer circle rescaled to the unit circle (convex case)."""
    res = poncelet_closure(cfg, start)
    return InscribedPolygon(res.polygon.psi)


def solve_bicentric_radius(n: int, d: float, R: float = 1.0, winding: int = 1) -> float:
    """Inner radius for which the Poncelet n-gon with the given winding closes."""
    if n < 3 or not 0 <= d < R:
        raise MalformedInstance('Need n >= 3 and 0 <= d < R')
    eps = 1e-9 * R

    def excess(r):
        _, advance = _poncelet_steps(BicentricConfig(n, R, r, d), 0.0)
        return advance - TWO_PI * winding

    lo, hi = eps, R - d - eps
    if excess(lo) * excess(hi) > 0:
        raise NoReturn('No closing inner radius for n={} winding={}'.format(n, winding))
    return float(brentq(excess, lo, hi, xtol=1e-15))


def solve_bicentric_outer(n: int, r: float, d: float, winding: int = 1) -> float:
    """Outer radius R making (n, R, r, d) bicentric: Euler and Fuss in closed form, Brent's method beyond."""
    if n < 3 or not (r > 0 and d >= 0):
        raise MalformedInstance('Need n >= 3, r > 0 and d >= 0')
    if n == 3 and winding == 1:
        return float(r + np.sqrt(r * r + d * d))
    if n == 4 and winding == 1:
        return float(np.sqrt(d * d + r * r + r * np.sqrt(r * r + 4 * d * d)))

    def excess(R):
        _, advance = _poncelet_steps(BicentricConfig(n, R, r, d), 0.0)
        return advance - TWO_PI * winding

    lo = (r + d) * (1 + 1e-9)
    hi = 2.0 * (r + d)
    while excess(hi) < 0:
        hi *= 2.0
        if hi > 1e6 * (r + d):
            raise NoReturn('No closing outer radius for n={} winding={}'.format(n, winding))
    if excess(lo) > 0:
        raise NoReturn('No closing outer radius for n={} winding={}'.format(n, winding))
    return float(brentq(excess, lo, hi, xtol=1e-15))


def linearized_matrix(n: int) -> np.ndarray:
    """M_n = cos(pi/n) times the circulant matrix with first row (0, 1, -1, 1, ..., -1)."""
    if n % 2 == 0 or n < 3:
        raise EvenOrder('Linearization is defined for odd n >= 3')
    row = np.array([0.0] + [(-1.0) ** (k - 1) for k in range(1, n)])
    # scipy builds circulants from the first column
    return np.cos(np.pi / n) * circulant(row).T


def spectrum(n: int) -> np.ndarray:
    """|lambda_j| = cos(pi/n) tan(pi j/n), j = 1..(n-1)/2."""
    if n % 2 == 0 or n < 3:
        raise EvenOrder('Spectrum is defined for odd n >= 3')
    j = np.arange(1, (n - 1) // 2 + 1)
    return np.cos(np.pi / n) * np.tan(np.pi * j / n)


def spectrum_eigensolver(n: int) -> np.ndarray:
    ev = eigvals(linearized_matrix(n))
    return np.sort(ev.imag[ev.imag > 1e-12])


def independence_scan(n: int, coeff_bound: int, threshold: float = 1e-10) -> List[Tuple[int, ...]]:
    """Integer vectors c with |c_j| <= bound, first nonzero entry positive, and |sum c_j |lambda_j|| < threshold."""
    if n % 2 == 0 or n < 5:
        raise UnsupportedN('Scan needs odd n >= 5 (at least two eigenvalue magnitudes)')
    if coeff_bound < 1:
        raise ValueError('coeff_bound must be >= 1')
    lam = spectrum(n)
    m = len(lam)
    last = np.arange(-coeff_bound, coeff_bound + 1)
    found = []
    for head in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=m - 1):
        partial = float(np.dot(head, lam[:-1]))
        hits = np.nonzero(np.abs(partial + last * lam[-1]) < threshold)[0]
        for k in hits:
            c = tuple(int(t) for t in head) + (int(last[k]),)
            nonzero = [t for t in c if t != 0]
            if nonzero and nonzero[0] > 0:
                found.append(c)
    logger.debug('n=%d bound=%d: %d relations', n, coeff_bound, len(found))
    return found


@dataclass(frozen=True)
class LinearizedState:
    beta: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.beta, dtype=np.float64)
        # adding a constant to all beta_i only rotates the polygon
        object.__setattr__(self, 'beta', b - np.mean(b))


def linearized_flow(beta0: LinearizedState, n: int, T: float, steps: int) -> Trajectory:
    M = linearized_matrix(n)
    if len(beta0.beta) != n:
        raise MalformedInstance('beta must have n entries')
    h = T / steps
    f = lambda b: M @ b
    out = np.empty((steps + 1, n))
    out[0] = beta = beta0.beta
    for k in range(steps):
        beta = integrators.rk4_step(f, beta, h)
        out[k + 1] = beta
    return Trajectory(np.linspace(0.0, T, steps + 1), out, 'reparameterized')


def eigenplane_basis(n: int, j: int) -> np.ndarray:
    """Orthonormal rows spanning the real invariant plane of lambda_j."""
    k = np.arange(n)
    e = np.stack([np.cos(TWO_PI * j * k / n), np.sin(TWO_PI * j * k / n)])
    return e / np.linalg.norm(e, axis=1)[:, None]


def eigenplane_period(trajectory: Trajectory, n: int, j: int) -> float:
    """Period of the rotation of the trajectory's projection onto the j-th eigenplane."""
    basis = eigenplane_basis(n, j)
    coords = trajectory.states @ basis.T
    angle = np.unwrap(np.arctan2(coords[:, 1], coords[:, 0]))
    slope = np.polyfit(trajectory.times, angle, 1)[0]
    return float(TWO_PI / abs(slope))


def return_distance(trajectory: Trajectory, t_min: float) -> float:
    mask = trajectory.times >= t_min
    return float(np.min(np.linalg.norm(trajectory.states[mask] - trajectory.states[0], axis=1)))
