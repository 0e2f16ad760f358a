"""
    Piecewise circular curves, their tangent segments and the equitangent locus.

    A smoothed regular n-gon replaces every vertex by a small circular arc and every side
    by an arc of a large circle, spliced C^1. Because the locus of points with equal tangent
    lengths to two circles is their radical axis, the outer curve traced by the rotating
    chord is a closed polyline whose vertices are radical centers of consecutive arc triples.
"""
import logging
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np
from matplotlib.path import Path

from geom_core import TWO_PI, Circle, Line, direction, get_tolerance, line_intersection, rotate90, unit, wrap_angle
from framed_polygons import Polygon
from errors import ConcentricCircles, InfeasibleRadii, InvariantLost, PointInside, UnsupportedN

logger = logging.getLogger(__name__)

DEFAULT_CORNER_RADIUS = 0.02
DEFAULT_SIDE_RADIUS = 100.0
MIN_SMOOTHED_N = 7


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc center + radius * unit(t) for t in [start, end]."""
    center: np.ndarray
    radius: float
    start: float
    end: float

    def __post_init__(self):
        object.__setattr__(self, 'center', np.asarray(self.center, dtype=np.float64))
        if not self.radius > 0:
            raise InfeasibleRadii('Arc radius must be positive, got {}'.format(self.radius))
        if not 0 < self.end - self.start <= TWO_PI + 1e-12:
            raise InfeasibleRadii('Arc span must lie in (0, 2 pi]')

    @property
    def span(self) -> float:
        return self.end - self.start

    @property
    def circle(self) -> Circle:
        return Circle(self.center, self.radius)

    def length(self) -> float:
        return self.radius * self.span

    def at(self, t) -> np.ndarray:
        return self.center + self.radius * unit(t)

    def outside_length(self, t: float) -> float:
        """Arc-length distance from angle t to the arc, 0 inside."""
        if self.span >= TWO_PI - 1e-12:
            return 0.0
        rel = np.mod(t - self.start, TWO_PI)
        if rel <= self.span:
            return 0.0
        return self.radius * min(rel - self.span, TWO_PI - rel)

    def joint_length(self, t: float) -> float:
        """Arc-length distance from angle t to the nearer end point."""
        if self.span >= TWO_PI - 1e-12:
            return np.inf
        rel = np.mod(t - self.start, TWO_PI)
        return self.radius * min(rel, abs(self.span - rel), TWO_PI - rel)

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "radius": self.radius, "start": self.start, "end": self.end}


@dataclass(frozen=True)
class PiecewiseCircularCurve:
    arcs: Tuple[Arc, ...]
    # order of the dihedral symmetry, when the curve comes from a regular polygon
    symmetry: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.arcs)

    def arc(self, i: int) -> Arc:
        return self.arcs[i % len(self.arcs)]

    def length(self) -> float:
        return float(sum(a.length() for a in self.arcs))

    def to_dict(self) -> dict:
        return {"arcs": [a.to_dict() for a in self.arcs], "symmetry": self.symmetry}


class TangentPoint(NamedTuple):
    point: np.ndarray
    arc: int
    angle: float


class TangentSegments(NamedTuple):
    L1: float
    L2: float
    first: TangentPoint
    second: TangentPoint
    at_joint: bool


@dataclass
class PolyLine:
    """Closed polyline; segment i runs from vertices[i] to vertices[i + 1] on the radical axis of arc_pairs[i]."""
    vertices: np.ndarray
    arc_pairs: List[Tuple[int, int]] = field(default_factory=list)

    def segments(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def length(self) -> float:
        v = self.vertices
        return float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))

    def sample(self, count: int) -> np.ndarray:
        """count points spread along the polyline by arc length."""
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cum = np.concatenate([[0.0], np.cumsum(np.linalg.norm(w - v, axis=1))])
        s = np.linspace(0.0, cum[-1], count, endpoint=False)
        idx = np.clip(np.searchsorted(cum, s, side='right') - 1, 0, len(v) - 1)
        seg = cum[idx + 1] - cum[idx]
        frac = np.where(seg > 0, (s - cum[idx]) / np.where(seg > 0, seg, 1.0), 0.0)
        return v[idx] + frac[:, None] * (w[idx] - v[idx])

    def to_dict(self) -> dict:
        return {"vertices": self.vertices.tolist(), "arc_pairs": [list(p) for p in self.arc_pairs]}


@dataclass(frozen=True)
class WholeExterior:
    """Verdict for a circle: every exterior point has equal tangent segments."""
    circle: Circle
    verdict: str = 'whole exterior is equitangent'

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "center": self.circle.center.tolist(), "radius": self.circle.radius}


def circle_curve(radius: float = 1.0, center=(0.0, 0.0)) -> PiecewiseCircularCurve:
    return PiecewiseCircularCurve((Arc(np.asarray(center, dtype=np.float64), radius, 0.0, TWO_PI),))


def regular_polygon(n: int) -> Polygon:
    """Vertices V_k = unit(2 pi k / n), circumradius 1."""
    return Polygon(unit(TWO_PI * np.arange(n) / n))


def smooth_regular_ngon(n: int, corner_radius: float = DEFAULT_CORNER_RADIUS,
                        side_radius: float = DEFAULT_SIDE_RADIUS) -> PiecewiseCircularCurve:
    """Regular n-gon of circumradius 1 with arcs 2k at the corners and arcs 2k + 1 along the sides.

    Corner circles are inscribed in the vertex angles; each side circle is internally tangent
    to the two neighbouring corner circles, its center lying beyond the origin on the side normal.
    """
    if n < MIN_SMOOTHED_N:
        raise UnsupportedN('The smoothed construction needs n >= {}, got {}'.format(MIN_SMOOTHED_N, n))
    half = np.pi / n
    rho, R = float(corner_radius), float(side_radius)
    if not (rho > 0 and R > rho):
        raise InfeasibleRadii('Need 0 < corner_radius < side_radius')
    dc = 1.0 - rho / np.cos(half)
    disc = (R - rho) ** 2 - (dc * np.sin(half)) ** 2
    if dc <= 0 or disc <= 0:
        raise InfeasibleRadii('Corner radius {} does not fit the polygon'.format(rho))
    a = -dc * np.cos(half) + np.sqrt(disc)
    if a <= 0:
        raise InfeasibleRadii('Side radius {} is too small to bulge the sides outward'.format(R))
    eps = float(np.arctan2(a * np.sin(half), dc + a * np.cos(half)))
    if not 0 < eps < half:
        raise InfeasibleRadii('Arcs cannot meet C^1 (corner half-span {:.3e})'.format(eps), residual=eps)
    arcs = []
    for k in range(n):
        vertex = TWO_PI * k / n
        arcs.append(Arc(dc * unit(vertex), rho, vertex - eps, vertex + eps))
        arcs.append(Arc(-a * unit(vertex + half), R, vertex + eps, vertex + 2 * half - eps))
    logger.debug('Smoothed %d-gon: corner half-span %.6f, side center offset %.6f', n, eps, a)
    return PiecewiseCircularCurve(tuple(arcs), symmetry=n)


def joint_residuals(curve: PiecewiseCircularCurve) -> np.ndarray:
    """Position and tangent-direction mismatch at each joint (arc i end against arc i+1 start)."""
    out = []
    for i in range(curve.size):
        this, nxt = curve.arc(i), curve.arc(i + 1)
        gap = float(np.linalg.norm(this.at(this.end) - nxt.at(nxt.start)))
        turn = abs(wrap_angle(this.end - nxt.start))
        out.append(max(gap, turn))
    return np.array(out)


def dihedral_residual(curve: PiecewiseCircularCurve, n: Optional[int] = None) -> float:
    """Max mismatch between the curve rotated by 2 pi / n and itself, arcs shifted by two."""
    n = n or curve.symmetry
    if not n or curve.size != 2 * n:
        raise UnsupportedN('Curve has no recorded order-n dihedral structure')
    c, s = np.cos(TWO_PI / n), np.sin(TWO_PI / n)
    rot = np.array([[c, -s], [s, c]])
    worst = 0.0
    for i in range(curve.size):
        a, b = curve.arc(i), curve.arc(i + 2)
        worst = max(worst, float(np.linalg.norm(rot @ a.center - b.center)), abs(a.radius - b.radius),
                    abs(wrap_angle(a.start + TWO_PI / n - b.start)))
        # reflection in the x-axis maps arc i to arc -i
        m = curve.arc(-i)
        worst = max(worst, float(np.linalg.norm(a.center * np.array([1.0, -1.0]) - m.center)),
                    abs(wrap_angle(a.end + m.start)))
    return worst


def curve_points(curve: PiecewiseCircularCurve, count: int = 1000) -> np.ndarray:
    total = curve.length()
    pts = []
    for a in curve.arcs:
        k = max(2, int(round(count * a.length() / total)))
        pts.append(a.at(np.linspace(a.start, a.end, k, endpoint=False)))
    return np.concatenate(pts)


def tangent_points(curve: PiecewiseCircularCurve, x, tol: Optional[float] = None) -> TangentSegments:
    """The two tangent segments from an exterior point x.

    `first` is the touch point T with x ahead of T along the counterclockwise tangent,
    `second` the one with x behind it.
    """
    tol = get_tolerance(tol)
    x = np.asarray(x, dtype=np.float64)
    best = [None, None]
    joint = False
    for i, arc in enumerate(curve.arcs):
        v = x - arc.center
        d = float(np.linalg.norm(v))
        if d <= arc.radius:
            continue
        beta = direction(v)
        gamma = float(np.arccos(arc.radius / d))
        length = float(np.sqrt((d - arc.radius) * (d + arc.radius)))
        for slot, t in enumerate((beta - gamma, beta + gamma)):
            out = arc.outside_length(t)
            if out > tol:
                continue
            if best[slot] is None or out < best[slot][0]:
                best[slot] = (out, length, TangentPoint(arc.at(t), i, float(t)))
            if arc.joint_length(t) <= tol:
                joint = True
    if best[0] is None or best[1] is None:
        raise PointInside('Point {} is not outside the curve'.format(x.tolist()))
    return TangentSegments(best[0][1], best[1][1], best[0][2], best[1][2], joint)


def tangent_segment_lengths(curve: PiecewiseCircularCurve, x, tol: Optional[float] = None) -> Tuple[float, float]:
    seg = tangent_points(curve, x, tol)
    return seg.L1, seg.L2


def radical_axis(c1: Circle, c2: Circle, tol: Optional[float] = None) -> Line:
    """Points of equal power to c1 and c2."""
    e = c2.center - c1.center
    d = float(np.linalg.norm(e))
    if d <= get_tolerance(tol):
        raise ConcentricCircles('Radical axis is undefined for concentric circles')
    e = e / d
    s = (d * d + c1.radius ** 2 - c2.radius ** 2) / (2.0 * d)
    return Line(c1.center + s * e, rotate90(e))


def _axis_parameter(curve: PiecewiseCircularCurve, line: Line, a: int, other: int) -> float:
    """Position on `line` of the radical center of arcs a, `other` and the arcs of `line`."""
    p = line_intersection(line, radical_axis(curve.arc(a).circle, curve.arc(other).circle), tol=1e-14)
    if p is None:
        raise InvariantLost('Radical axes of arcs {} and {} are parallel'.format(a % curve.size, other % curve.size))
    return float(np.dot(p - line.origin, line.direction))


def default_start_pair(curve: PiecewiseCircularCurve) -> Tuple[int, int]:
    """Corner 0 and the side that the long chord V_0 V_L reaches, L = ceil(n/2) - 1."""
    n = curve.symmetry or curve.size // 2
    span = (n + 1) // 2 - 1
    return 0, 2 * span - 1


def equitangent_locus(curve: PiecewiseCircularCurve, start: Optional[Tuple[int, int]] = None,
                      tol: Optional[float] = None) -> Union[PolyLine, WholeExterior]:
    """Closed polyline traced by the intersection of the tangent lines at the rotating chord's ends.

    Walks arc pairs (a, b) touched by the two tangent segments. On the radical axis of a and b the
    pair stays valid between the radical centers with the neighbouring arcs; at the far end the
    first touch moves to a + 1, the second to b + 1, or both.
    """
    tol = get_tolerance(tol)
    centers = np.array([a.center for a in curve.arcs])
    radii = np.array([a.radius for a in curve.arcs])
    if curve.size == 1 or (np.ptp(centers, axis=0).max() <= tol and np.ptp(radii) <= tol):
        return WholeExterior(curve.arc(0).circle)
    m = curve.size
    a, b = start or default_start_pair(curve)
    first_pair = (a % m, b % m)
    entries, pairs = [], []
    for _ in range(2 * m + 1):
        line = radical_axis(curve.arc(a).circle, curve.arc(b).circle)
        t_prev_a = _axis_parameter(curve, line, a, a - 1)
        t_next_a = _axis_parameter(curve, line, a, a + 1)
        if t_next_a < t_prev_a:
            line = Line(line.origin, -line.direction)
            t_prev_a, t_next_a = -t_prev_a, -t_next_a
        t_prev_b = _axis_parameter(curve, line, b, b - 1)
        t_next_b = _axis_parameter(curve, line, b, b + 1)
        t_in = max(t_prev_a, t_prev_b)
        t_out = min(t_next_a, t_next_b)
        scale = max(1.0, abs(t_in), abs(t_out))
        if t_out < t_in - tol * scale:
            raise InvariantLost('Arc pair ({}, {}) has no visible segment'.format(a % m, b % m),
                                residual=t_in - t_out)
        if t_out - t_in > tol * scale:
            seg = tangent_points(curve, line.at(0.5 * (t_in + t_out)), tol)
            if (seg.first.arc, seg.second.arc) != (a % m, b % m):
                raise InvariantLost('Segment of arc pair ({}, {}) is touched by arcs ({}, {})'.format(
                    a % m, b % m, seg.first.arc, seg.second.arc))
        entries.append(line.at(t_in))
        pairs.append((a % m, b % m))
        step_a = t_next_a - t_out <= tol * scale
        step_b = t_next_b - t_out <= tol * scale
        a, b = a + int(step_a), b + int(step_b)
        if (a % m, b % m) == first_pair:
            logger.debug('Equitangent locus closed after %d segments', len(pairs))
            return PolyLine(np.array(entries), pairs)
    raise InvariantLost('Arc-pair walk did not return to ({}, {})'.format(*first_pair))


def locus_residuals(curve: PiecewiseCircularCurve, locus: PolyLine, samples: int = 1000) -> np.ndarray:
    """|L1 - L2| at points spread along the locus."""
    out = []
    for x in locus.sample(samples):
        l1, l2 = tangent_segment_lengths(curve, x)
        out.append(abs(l1 - l2))
    return np.array(out)


def segment_power_residuals(curve: PiecewiseCircularCurve, locus: PolyLine) -> np.ndarray:
    """Power difference to the segment's two arcs at both of its end points."""
    out = []
    for (p, q), (a, b) in zip(locus.segments(), locus.arc_pairs):
        ca, cb = curve.arc(a).circle, curve.arc(b).circle
        out.append(max(abs(ca.power(p) - cb.power(p)), abs(ca.power(q) - cb.power(q))))
    return np.array(out)


def is_nested(curve: PiecewiseCircularCurve, locus: PolyLine, samples: int = 2000) -> bool:
    """Every sampled point of the curve lies strictly inside the closed polyline."""
    path = Path(np.vstack([locus.vertices, locus.vertices[:1]]), closed=True)
    return bool(np.all(path.contains_points(curve_points(curve, samples))))


@dataclass(frozen=True)
class ChordState:
    """Chord (i, j) of the regular n-gon with support lines (k, l) at i and at j, as vertex indices."""
    chord: Tuple[int, int]
    first_support: Tuple[int, int]
    second_support: Tuple[int, int]

    def label(self) -> str:
        name = lambda e: ''.join(chr(ord('A') + v) if v < 26 else 'V{}'.format(v) for v in e)
        return '({}, {}, {})'.format(name(self.chord), name(self.first_support), name(self.second_support))


@dataclass(frozen=True)
class ChordMove:
    before: ChordState
    after: ChordState
    # 'first' or 'second': the chord end that slides along its support side
    moving_end: str


def _chord_state(n: int, k: int, half_step: bool, span: int) -> ChordState:
    i, j = k % n, (k + span) % n
    if half_step:
        return ChordState(((k + 1) % n, j), (i, (k + 1) % n), ((j + 1) % n, j))
    return ChordState((i, j), (i, (k + 1) % n), (j, (j - 1) % n))


def chord_schedule(n: int) -> List[ChordMove]:
    """2n alternating moves carrying the chord V_0 V_L once around the regular n-gon.

    Even moves slide the first end to the next vertex while the support at the second end turns;
    odd moves slide the second end while the support at the first end turns.
    """
    if n < MIN_SMOOTHED_N:
        raise UnsupportedN('The chord schedule needs n >= {}, got {}'.format(MIN_SMOOTHED_N, n))
    span = (n + 1) // 2 - 1
    moves = []
    for k in range(n):
        s0 = _chord_state(n, k, False, span)
        s1 = _chord_state(n, k, True, span)
        s2 = _chord_state(n, k + 1, False, span)
        moves.append(ChordMove(s0, s1, 'first'))
        moves.append(ChordMove(s1, s2, 'second'))
    return moves


def chord_framing_residual(state: ChordState, n: int) -> float:
    """Discrete framing condition: support directions make equal angles with the chord, mod pi."""
    v = regular_polygon(n).vertices
    i, j = state.chord
    phi = direction(v[j] - v[i])
    a1 = direction(v[state.first_support[1]] - v[state.first_support[0]])
    a2 = direction(v[state.second_support[1]] - v[state.second_support[0]])
    r = np.mod(a1 + a2 - 2.0 * phi + np.pi / 2, np.pi) - np.pi / 2
    return float(r)


def chord_touches_support(state: ChordState) -> bool:
    """Each chord end is a vertex of the side that supports it."""
    return state.chord[0] in state.first_support and state.chord[1] in state.second_support
