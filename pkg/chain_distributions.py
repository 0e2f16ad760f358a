"""
    Distributions on the space of oriented chains and on framed polygons.

    Chain fields are torch functions of the flat state
    x = [O_0x, O_0y, ..., O_{n-1}x, O_{n-1}y, r_0, ..., r_{n-1}] (float64), so the
    flow-composition bracket and the autograd Jacobian bracket share one implementation.

    Indexing: v_i moves circle i. w_j belongs to edge j, the edge joining O_j and O_{j+1}.
    At vertex i the incoming edge is i-1 and the outgoing edge is i, and
    2 theta_i is the angle from u_{i-1} to u_i.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import torch

import integrators
from geom_core import cross, get_tolerance, wrap_angle
from circle_chains import OrientedChain, chain_to_framed, is_generic_chain
from framed_polygons import FramedPolygon, Polygon, framing_obstruction_even, is_generic
from errors import DegeneratePolygon, EqualSignedRadii, NonGenericChain, NonGenericFramedPolygon, StepTooLarge, VanishingSine

logger = logging.getLogger(__name__)

DEFAULT_BRACKET_STEP = 1e-4
# singular values below this fraction of the largest count as zero
RANK_REL_THRESHOLD = 1e-6
# |sin theta| below this makes w_j and the kernel field blow up
SINE_TOL = 1e-6


@dataclass
class ChainTangent:
    vertex_velocities: np.ndarray
    radius_rates: np.ndarray

    @property
    def n(self) -> int:
        return len(self.radius_rates)

    def vector(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.vertex_velocities).ravel(), self.radius_rates])

    @classmethod
    def from_vector(cls, y) -> 'ChainTangent':
        y = y.detach().cpu().numpy() if isinstance(y, torch.Tensor) else np.asarray(y, dtype=np.float64)
        n = len(y) // 3
        return cls(y[:2 * n].reshape(n, 2), y[2 * n:].copy())

    def constraint_residuals(self, chain: OrientedChain) -> np.ndarray:
        """u_j . (dO_{j+1} - dO_j) - (dr_{j+1} - dr_j) per edge, zero for tangents to chain space."""
        u = chain.edge_units()
        dv = np.roll(self.vertex_velocities, -1, axis=0) - self.vertex_velocities
        dr = np.roll(self.radius_rates, -1) - self.radius_rates
        return np.sum(u * dv, axis=1) - dr


@dataclass
class EdgeAngles:
    half_angles: np.ndarray

    @classmethod
    def of(cls, chain: OrientedChain) -> 'EdgeAngles':
        u = chain.edge_units()
        u_prev = np.roll(u, 1, axis=0)
        return cls(np.arctan2(cross(u_prev, u), np.sum(u_prev * u, axis=1)))


def _to_state(chain: OrientedChain) -> torch.Tensor:
    return torch.from_numpy(chain.state()).to(torch.float64)


def _edge_data(x: torch.Tensor):
    n = x.shape[0] // 3
    O = x[:2 * n].reshape(n, 2)
    r = x[2 * n:]
    e = torch.roll(O, -1, 0) - O
    length = torch.linalg.norm(e, dim=1)
    s = torch.sign(torch.roll(r, -1) - r)
    u = s[:, None] * e / length[:, None]
    u_prev = torch.roll(u, 1, 0)
    cos2 = (u_prev * u).sum(1)
    sin2 = u_prev[:, 0] * u[:, 1] - u_prev[:, 1] * u[:, 0]
    return n, u, u_prev, cos2, sin2


def _rot(v: torch.Tensor) -> torch.Tensor:
    return torch.stack([-v[..., 1], v[..., 0]], dim=-1)


def _pack(velocities: torch.Tensor, rates: torch.Tensor) -> torch.Tensor:
    return torch.cat([velocities.reshape(-1), rates])


def v_vector(x: torch.Tensor, i: int) -> torch.Tensor:
    n, u, u_prev, cos2, sin2 = _edge_data(x)
    vel = torch.zeros((n, 2), dtype=x.dtype)
    rates = torch.zeros(n, dtype=x.dtype)
    vel[i] = _rot(u[i] - u_prev[i])
    rates[i] = -sin2[i]
    return _pack(vel, rates)


def w_vector(x: torch.Tensor, j: int) -> torch.Tensor:
    n, u, u_prev, cos2, sin2 = _edge_data(x)
    a, b = j % n, (j + 1) % n
    sin_sq = (1.0 - cos2) / 2.0
    if float(torch.min(sin_sq[[a, b]])) < SINE_TOL ** 2:
        raise VanishingSine('sin(theta) vanishes next to edge {}'.format(j))
    vel = torch.zeros((n, 2), dtype=x.dtype)
    rates = torch.zeros(n, dtype=x.dtype)
    vel[a] = u[a] / sin_sq[a]
    vel[b] = u[a] / sin_sq[b]
    rates[a] = cos2[a] / sin_sq[a]
    rates[b] = cos2[b] / sin_sq[b]
    return _pack(vel, rates)


def kernel_vector(x: torch.Tensor) -> torch.Tensor:
    n, u, u_prev, cos2, sin2 = _edge_data(x)
    one_minus = 1.0 - cos2
    if float(torch.min(one_minus)) < 2 * SINE_TOL ** 2:
        raise VanishingSine('sin(theta) vanishes at some vertex')
    out = sum(w_vector(x, j) for j in range(n))
    # cos(theta) / sin(theta)^3 written through the doubled angle
    coeff = 2.0 * sin2 / one_minus ** 2
    for i in range(n):
        out = out + coeff[i] * v_vector(x, i)
    return out


class ChainField:
    """Selector of a named field on chain space, callable on flat torch states."""

    def __init__(self, kind: str, index: Optional[int] = None):
        if kind not in ('v', 'w', 'kernel'):
            raise ValueError('Unknown chain field {}'.format(kind))
        self.kind = kind
        self.index = index

    def __call__(self, x: torch.Tensor) -> torch.Tensor:
        if self.kind == 'v':
            return v_vector(x, self.index)
        if self.kind == 'w':
            return w_vector(x, self.index)
        return kernel_vector(x)

    def __repr__(self) -> str:
        return '{}_{}'.format(self.kind, self.index) if self.index is not None else self.kind


FieldSelector = Union[ChainField, Callable[[torch.Tensor], torch.Tensor]]


def _check_orientations(chain: OrientedChain):
    r = chain.signed_radii
    if np.any(np.roll(r, -1) == r):
        raise EqualSignedRadii('Edge orientation is undefined for equal signed radii')


def v_field(chain: OrientedChain, i: int) -> ChainTangent:
    _check_orientations(chain)
    return ChainTangent.from_vector(v_vector(_to_state(chain), i % chain.n))


def w_field(chain: OrientedChain, j: int) -> ChainTangent:
    """w at edge j, i.e. between circles j and j+1."""
    _check_orientations(chain)
    return ChainTangent.from_vector(w_vector(_to_state(chain), j % chain.n))


def kernel_field(chain: OrientedChain) -> ChainTangent:
    _check_orientations(chain)
    return ChainTangent.from_vector(kernel_vector(_to_state(chain)))


def edge_speeds(chain: OrientedChain, tangent: ChainTangent) -> np.ndarray:
    """Rates of change of the edge lengths |O_j O_{j+1}|."""
    e = chain.edges()
    dv = np.roll(tangent.vertex_velocities, -1, axis=0) - tangent.vertex_velocities
    return np.sum(e * dv, axis=1) / np.linalg.norm(e, axis=1)


def lie_bracket_estimate(chain: OrientedChain, F: FieldSelector, G: FieldSelector,
                         h: float = DEFAULT_BRACKET_STEP) -> integrators.BracketEstimate:
    if not h > 0:
        raise ValueError('Bracket step must be positive')
    _check_orientations(chain)
    x = _to_state(chain)
    est = integrators.richardson_commutator(F, G, x, h, norm=lambda t: torch.linalg.norm(t))
    end = est.endpoint.detach().numpy()
    n = chain.n
    centers = end[:2 * n].reshape(n, 2)
    r = end[2 * n:]
    residual = np.linalg.norm(np.roll(centers, -1, axis=0) - centers, axis=1) - np.abs(np.roll(r, -1) - r)
    if np.max(np.abs(residual)) > 1e-6 * max(1.0, chain.diameter()):
        raise StepTooLarge('Composed flows leave chain space (residual {:.3e})'.format(np.max(np.abs(residual))),
                           residual=float(np.max(np.abs(residual))))
    if np.any(np.sign(np.roll(r, -1) - r) != chain.edge_orientations()):
        raise StepTooLarge('Composed flows change an edge orientation')
    return est


def lie_bracket(chain: OrientedChain, F: FieldSelector, G: FieldSelector,
                h: float = DEFAULT_BRACKET_STEP) -> ChainTangent:
    """[F, G] = DG.F - DF.G by flow composition with Richardson extrapolation."""
    return ChainTangent.from_vector(lie_bracket_estimate(chain, F, G, h).value)


def jacobian_bracket(chain: OrientedChain, F: FieldSelector, G: FieldSelector) -> ChainTangent:
    """Exact bracket DG.F - DF.G through autograd Jacobians."""
    _check_orientations(chain)
    x = _to_state(chain)
    jf = torch.autograd.functional.jacobian(F, x)
    jg = torch.autograd.functional.jacobian(G, x)
    return ChainTangent.from_vector(jg @ F(x) - jf @ G(x))


def tangent_angle(a, b) -> float:
    """Angle between the lines spanned by two tangents (sign ignored)."""
    a = a.vector() if hasattr(a, 'vector') else np.asarray(a, dtype=np.float64)
    b = b.vector() if hasattr(b, 'vector') else np.asarray(b, dtype=np.float64)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    if np.dot(a, b) < 0:
        b = -b
    # chord formula, arccos loses precision near 1
    return float(2.0 * np.arcsin(min(1.0, np.linalg.norm(a - b) / 2.0)))


@dataclass
class RankCertificate:
    n: int
    rank: int
    singular_values: List[float]
    h: float
    ratios: List[float]

    @property
    def validated(self) -> bool:
        """Every bracket estimate passed the Richardson ratio test."""
        return all(integrators.ratio_accepted(r) for r in self.ratios)

    def to_dict(self) -> dict:
        return {"n": self.n, "rank": self.rank, "singular_values": self.singular_values, "h": self.h,
                "ratios": self.ratios, "validated": self.validated}


def _svd_rank(rows: List[torch.Tensor]) -> Tuple[int, List[float]]:
    s = torch.linalg.svdvals(torch.stack(rows))
    rank = int(torch.sum(s > RANK_REL_THRESHOLD * s[0]))
    return rank, [float(t) for t in s]


def v_rank(chain: OrientedChain) -> int:
    x = _to_state(chain)
    return _svd_rank([v_vector(x, i) for i in range(chain.n)])[0]


def rank_certificate(chain: OrientedChain, h: float = DEFAULT_BRACKET_STEP, strict: bool = True) -> RankCertificate:
    """Rank of the v_i and the brackets [v_j, v_{j+1}].

    With strict set, a bracket whose Richardson ratio leaves the acceptance window raises
    StepTooLarge; otherwise the certificate comes back with validated False.
    """
    if chain.n < 4:
        raise NonGenericChain('Rank certification needs n >= 4 (three-circle chains have collinear centers)')
    if not is_generic_chain(chain):
        raise NonGenericChain('Consecutive tangency points coincide')
    _check_orientations(chain)
    x = _to_state(chain)
    n = chain.n
    rows = [v_vector(x, i) for i in range(n)]
    ratios = []
    for j in range(n):
        est = lie_bracket_estimate(chain, ChainField('v', j), ChainField('v', (j + 1) % n), h)
        ratios.append(est.ratio)
        rows.append(est.value)
    rank, sv = _svd_rank(rows)
    logger.debug('n=%d rank=%d smallest singular value %.3e', n, rank, sv[-1])
    cert = RankCertificate(n, rank, sv, h, ratios)
    if strict and not cert.validated:
        worst = max(ratios, key=lambda t: abs(t - 1.0))
        raise StepTooLarge('Richardson ratio {:.4f} outside {} at h={:g}'.format(worst, integrators.RICHARDSON_WINDOW, h),
                           residual=abs(worst - 1.0))
    return cert


def bracket_rank(chain: OrientedChain, h: float = DEFAULT_BRACKET_STEP) -> int:
    return rank_certificate(chain, h).rank


def birkhoff_direction(P: Polygon, i: int, tol: Optional[float] = None) -> np.ndarray:
    """Sum of the incoming and outgoing unit vectors at vertex i (billiard reflection)."""
    v = P.vertices
    n = P.n
    incoming = v[i % n] - v[(i - 1) % n]
    outgoing = v[(i + 1) % n] - v[i % n]
    li, lo = np.linalg.norm(incoming), np.linalg.norm(outgoing)
    if min(li, lo) <= get_tolerance(tol):
        raise DegeneratePolygon('Consecutive vertices coincide at vertex {}'.format(i))
    return incoming / li + outgoing / lo


@dataclass
class FramedTangent:
    vertex_velocities: np.ndarray
    framing_rates: np.ndarray

    def vector(self) -> np.ndarray:
        return np.concatenate([self.vertex_velocities.ravel(), self.framing_rates])


def _side_rates(FP: FramedPolygon, velocities: np.ndarray) -> np.ndarray:
    """Rates of the side directions phi_m under the vertex velocities."""
    d = FP.polygon.sides()
    dd = np.roll(velocities, -1, axis=0) - velocities
    return cross(d, dd) / np.sum(d * d, axis=1)


def eta_generator(FP: FramedPolygon, k: int) -> FramedTangent:
    """Odd n: B_k moves along u_k, the framing follows the alternating-sum formula."""
    n = FP.n
    if n % 2 == 0:
        raise ValueError('eta generators are defined for odd n')
    vel = np.zeros((n, 2))
    vel[k % n] = FP.framings[k % n]
    phi_dot = _side_rates(FP, vel)
    signs = (-1.0) ** np.arange(n)
    alpha_dot = np.array([np.dot(signs, np.roll(phi_dot, -i)) for i in range(n)])
    return FramedTangent(vel, alpha_dot)


def nu_generator(FP: FramedPolygon, m: int) -> FramedTangent:
    """Motion of circle m: B_{m-1} and B_m slide along their framing vectors, every other
    vertex and framing vector stays, and the framing condition holds to first order."""
    n = FP.n
    if n < 3:
        raise ValueError('nu generators need n >= 3')
    v = FP.vertices
    u = FP.framings
    p, q = (m - 1) % n, m % n
    d_before = v[p] - v[(p - 1) % n]
    d_mid = v[q] - v[p]
    d_after = v[(q + 1) % n] - v[q]
    p1 = cross(d_before, u[p]) / np.dot(d_before, d_before)
    p2 = cross(d_mid, u[p]) / np.dot(d_mid, d_mid)
    q2 = cross(d_mid, u[q]) / np.dot(d_mid, d_mid)
    q1 = -cross(d_after, u[q]) / np.dot(d_after, d_after)
    a, b = q2 - q1, p1 + p2
    norm = np.hypot(a, b)
    if norm == 0:
        raise NonGenericFramedPolygon('nu generator vanishes at circle {}'.format(m))
    a, b = a / norm, b / norm
    if a < 0 or (a == 0 and b < 0):
        a, b = -a, -b
    vel = np.zeros((n, 2))
    rates = np.zeros(n)
    vel[p] = a * u[p]
    vel[q] = b * u[q]
    rates[p] = 2.0 * a * p1
    rates[q] = 2.0 * b * q1
    return FramedTangent(vel, rates)


def pushforward_D(FP: FramedPolygon, index: int) -> FramedTangent:
    """Generator of the distribution D: eta_index for odd n, nu_index for even n.

    D is the image of the chain distribution, so the polygon must be generic.
    """
    if not is_generic(FP):
        raise NonGenericFramedPolygon('Framed polygon is not generic')
    if FP.n % 2 == 1:
        return eta_generator(FP, index)
    return nu_generator(FP, index)


def framed_frame_residuals(FP: FramedPolygon, tangent: FramedTangent) -> np.ndarray:
    """Linearized framing condition alpha_i + alpha_{i+1} - 2 phi_i along the tangent."""
    phi_dot = _side_rates(FP, tangent.vertex_velocities)
    a = tangent.framing_rates
    return a + np.roll(a, -1) - 2.0 * phi_dot


def chain_side_tangent(chain: OrientedChain, m: int, h: float = 1e-5) -> FramedTangent:
    """v_m transported through chain_to_framed by central differences of the RK4 flow."""
    field = ChainField('v', m % chain.n)
    x = _to_state(chain)
    plus = chain_to_framed(OrientedChain.from_state(integrators.flow(field, x, h).numpy()))
    minus = chain_to_framed(OrientedChain.from_state(integrators.flow(field, x, -h).numpy()))
    vel = (plus.vertices - minus.vertices) / (2 * h)
    rates = wrap_angle(plus.framing_directions - minus.framing_directions) / (2 * h)
    return FramedTangent(vel, rates)


def in_positive_cone(FP: FramedPolygon, tangent: FramedTangent, tol: Optional[float] = None) -> bool:
    """Every vertex velocity is a non-negative multiple of its framing vector."""
    tol = max(get_tolerance(tol), 1e-9)
    u = FP.framings
    vel = tangent.vertex_velocities
    along = np.sum(u * vel, axis=1)
    across = np.abs(cross(u, vel))
    scale = max(1.0, float(np.max(np.linalg.norm(vel, axis=1))))
    return bool(np.all(along >= -tol * scale) and np.all(across <= tol * scale))


def obstruction_after_step(FP: FramedPolygon, tangent: FramedTangent, h: float) -> float:
    """Alternate exterior-angle sum after moving the vertices by h times the tangent."""
    return framing_obstruction_even(Polygon(FP.vertices + h * tangent.vertex_velocities))
