"""
    Framed 2-gons ("bigons") in coordinates s = (p, q, r, alpha, phi).

    (x, y) is the midpoint of the segment B1 B2, r its half length, phi its direction and
    alpha the angle the framing makes with it at both ends:
        x = p sin(phi) - q cos(phi),  y = -p cos(phi) - q sin(phi),
        B1 = (x - r cos(phi), y - r sin(phi)),  B2 = (x + r cos(phi), y + r sin(phi)),
        u1 at direction phi - alpha,  u2 at direction phi + alpha.
    The distribution is the common kernel of
        theta1 = dp + q dphi + tan(alpha) dr,   theta2 = dq - (p - r cot(alpha)) dphi.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import torch

import integrators
from geom_core import direction, reduce_angle, unit
from errors import MalformedInstance, NotHorizontal, SingularAngle, StepTooLarge

logger = logging.getLogger(__name__)

# alpha this close to a multiple of pi/2 makes tan or cot blow up
ANGLE_TOL = 1e-6
# sampled paths are horizontal when the form residuals stay below this fraction of the speed
HORIZONTALITY_REL_TOL = 1e-6
COORDINATES = ('p', 'q', 'r', 'alpha', 'phi')


@dataclass(frozen=True)
class BigonState:
    p: float
    q: float
    r: float
    alpha: float
    phi: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError('Half length r must be positive, got {}'.format(self.r))

    def vector(self) -> np.ndarray:
        return np.array([self.p, self.q, self.r, self.alpha, self.phi], dtype=np.float64)

    @classmethod
    def from_vector(cls, v) -> 'BigonState':
        v = [float(t) for t in v]
        return cls(*v)

    def midpoint(self) -> np.ndarray:
        s, c = np.sin(self.phi), np.cos(self.phi)
        return np.array([self.p * s - self.q * c, -self.p * c - self.q * s])


@dataclass(frozen=True)
class BigonTangent:
    rates: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'rates', np.asarray(self.rates, dtype=np.float64))


def to_endpoints(s: BigonState) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    m = s.midpoint()
    d = unit(s.phi)
    return m - s.r * d, unit(s.phi - s.alpha), m + s.r * d, unit(s.phi + s.alpha)


def from_endpoints(b1, u1, b2, u2) -> BigonState:
    b1 = np.asarray(b1, dtype=np.float64)
    b2 = np.asarray(b2, dtype=np.float64)
    chord = b2 - b1
    phi = float(direction(chord))
    alpha = float(reduce_angle(direction(u2) - phi))
    m = (b1 + b2) / 2
    s, c = np.sin(phi), np.cos(phi)
    return BigonState(m[0] * s - m[1] * c, -m[0] * c - m[1] * s, float(np.linalg.norm(chord)) / 2, alpha, phi)


def _check_angle(alpha: float):
    if abs(np.sin(alpha)) < ANGLE_TOL or abs(np.cos(alpha)) < ANGLE_TOL:
        raise SingularAngle('alpha = {:.6g} is a multiple of pi/2'.format(alpha))


def form_coefficients(x: torch.Tensor) -> torch.Tensor:
    """Rows are the coefficients of theta1 and theta2 in (dp, dq, dr, dalpha, dphi)."""
    p, q, r, alpha, phi = x
    zero = torch.zeros((), dtype=x.dtype)
    one = torch.ones((), dtype=x.dtype)
    theta1 = torch.stack([one, zero, torch.tan(alpha), zero, q])
    theta2 = torch.stack([zero, one, zero, zero, -(p - r / torch.tan(alpha))])
    return torch.stack([theta1, theta2])


def nu_vector(x: torch.Tensor) -> torch.Tensor:
    out = torch.zeros(5, dtype=x.dtype)
    out[3] = 1.0
    return out


def xi_vector(x: torch.Tensor) -> torch.Tensor:
    p, q, r, alpha, phi = x
    zero = torch.zeros((), dtype=x.dtype)
    return torch.stack([-q, p - r / torch.tan(alpha), zero, zero, torch.ones((), dtype=x.dtype)])


def eta_vector(x: torch.Tensor) -> torch.Tensor:
    p, q, r, alpha, phi = x
    zero = torch.zeros((), dtype=x.dtype)
    return torch.stack([torch.tan(alpha), zero, -torch.ones((), dtype=x.dtype), zero, zero])


def _state_tensor(s: BigonState) -> torch.Tensor:
    return torch.from_numpy(s.vector())


def form_values(s: BigonState, tangent: BigonTangent) -> np.ndarray:
    """(theta1(w), theta2(w))."""
    return form_coefficients(_state_tensor(s)).numpy() @ tangent.rates


def generator_fields(s: BigonState) -> Tuple[BigonTangent, BigonTangent, BigonTangent]:
    """nu, xi, eta at s."""
    _check_angle(s.alpha)
    x = _state_tensor(s)
    return tuple(BigonTangent(f(x).numpy()) for f in (nu_vector, xi_vector, eta_vector))


def closed_form_brackets(s: BigonState) -> Tuple[np.ndarray, np.ndarray]:
    """[nu, xi] = r / sin^2(alpha) d/dq and [nu, eta] = 1 / cos^2(alpha) d/dp."""
    nu_xi = np.zeros(5)
    nu_xi[1] = s.r / np.sin(s.alpha) ** 2
    nu_eta = np.zeros(5)
    nu_eta[0] = 1.0 / np.cos(s.alpha) ** 2
    return nu_xi, nu_eta


@dataclass
class BigonCertificate:
    rank: int
    singular_values: List[float]
    nu_xi: np.ndarray
    nu_eta: np.ndarray
    relative_errors: Tuple[float, float]
    ratios: Tuple[float, float]

    @property
    def validated(self) -> bool:
        return all(integrators.ratio_accepted(r) for r in self.ratios)

    def to_dict(self) -> dict:
        return {"n": 2, "rank": self.rank, "singular_values": self.singular_values,
                "nu_xi": self.nu_xi.tolist(), "nu_eta": self.nu_eta.tolist(),
                "relative_errors": list(self.relative_errors),
                "ratios": list(self.ratios), "validated": self.validated}


def bigon_commutators(s: BigonState, h: float = 1e-4, strict: bool = True) -> BigonCertificate:
    """Numerical [nu, xi] and [nu, eta] by flow composition, compared with the closed forms;
    rank of the five vectors nu, xi, eta, [nu, xi], [nu, eta].

    Raises StepTooLarge when strict and a Richardson ratio leaves the acceptance window.
    """
    _check_angle(s.alpha)
    x = _state_tensor(s)
    norm = lambda t: torch.linalg.norm(t)
    est_xi = integrators.richardson_commutator(nu_vector, xi_vector, x, h, norm)
    est_eta = integrators.richardson_commutator(nu_vector, eta_vector, x, h, norm)
    nu_xi = est_xi.value.numpy()
    nu_eta = est_eta.value.numpy()
    exact_xi, exact_eta = closed_form_brackets(s)
    errors = (float(np.linalg.norm(nu_xi - exact_xi) / np.linalg.norm(exact_xi)),
              float(np.linalg.norm(nu_eta - exact_eta) / np.linalg.norm(exact_eta)))
    rows = torch.stack([nu_vector(x), xi_vector(x), eta_vector(x), est_xi.value, est_eta.value])
    sv = torch.linalg.svdvals(rows)
    rank = int(torch.sum(sv > 1e-6 * sv[0]))
    cert = BigonCertificate(rank, [float(t) for t in sv], nu_xi, nu_eta, errors, (est_xi.ratio, est_eta.ratio))
    if strict and not cert.validated:
        raise StepTooLarge('Richardson ratios {:.4f}, {:.4f} at h={:g}'.format(est_xi.ratio, est_eta.ratio, h),
                           residual=max(abs(r - 1.0) for r in cert.ratios))
    return cert


def form_differentials(s: BigonState) -> Tuple[np.ndarray, np.ndarray]:
    """d theta1 and d theta2 as antisymmetric 5x5 matrices, (i_w d theta) = M w."""
    x = _state_tensor(s)
    jac = torch.autograd.functional.jacobian(form_coefficients, x).numpy()
    return tuple(jac[k] - jac[k].T for k in range(2))


@dataclass
class SingularCurveVerdict:
    verdict: str
    max_phi_rate: float
    max_form_residual: float
    kernel_condition: Optional[bool] = None

    @property
    def singular_candidate(self) -> bool:
        return self.verdict == 'SINGULAR-CANDIDATE'


def singular_curve_test(times, states, velocities=None, full_check: bool = False,
                        rel_tol: float = HORIZONTALITY_REL_TOL) -> SingularCurveVerdict:
    """Necessary condition for a singular horizontal curve: the chord never rotates (phi' = 0).

    Velocities are estimated by second order finite differences when not given. With
    full_check the tangent is also tested against the kernel of lambda1 d theta1 + lambda2 d theta2
    at every sample (some nonzero lambda must exist pointwise).
    """
    times = np.asarray(times, dtype=np.float64)
    states = np.asarray(states, dtype=np.float64)
    if states.ndim != 2 or states.shape[1] != 5 or len(times) != len(states) or len(times) < 3:
        raise MalformedInstance('Path needs at least 3 samples of (p, q, r, alpha, phi)')
    if velocities is None:
        velocities = np.gradient(states, times, axis=0, edge_order=2)
    velocities = np.asarray(velocities, dtype=np.float64)
    speed = float(np.max(np.linalg.norm(velocities, axis=1)))
    residuals = []
    for sv, w in zip(states, velocities):
        _check_angle(sv[3])
        residuals.append(np.abs(form_values(BigonState.from_vector(sv), BigonTangent(w))))
    max_res = float(np.max(residuals))
    if max_res > rel_tol * max(speed, 1e-300):
        raise NotHorizontal('Form residual {:.3e} exceeds {:.1e} x speed'.format(max_res, rel_tol), residual=max_res)
    max_phi = float(np.max(np.abs(velocities[:, 4])))
    verdict = 'SINGULAR-CANDIDATE' if max_phi <= rel_tol * max(speed, 1e-300) else 'REGULAR'
    kernel = None
    if full_check:
        kernel = True
        for sv, w in zip(states, velocities):
            d1, d2 = form_differentials(BigonState.from_vector(sv))
            k = np.stack([d1 @ w, d2 @ w], axis=1)
            sing = np.linalg.svd(k, compute_uv=False)
            if sing[-1] > 1e-6 * max(1.0, sing[0]):
                kernel = False
                break
    logger.debug('Path verdict %s, max |phi\'| %.3e, kernel condition %s', verdict, max_phi, kernel)
    return SingularCurveVerdict(verdict, max_phi, max_res, kernel)


def _endpoints_tensor(x: torch.Tensor) -> torch.Tensor:
    p, q, r, alpha, phi = x
    s, c = torch.sin(phi), torch.cos(phi)
    mx, my = p * s - q * c, -p * c - q * s
    return torch.stack([mx - r * c, my - r * s, mx + r * c, my + r * s])


def endpoint_velocities(s: BigonState, tangent: BigonTangent) -> Tuple[np.ndarray, np.ndarray]:
    _, jv = torch.autograd.functional.jvp(_endpoints_tensor, _state_tensor(s), torch.from_numpy(tangent.rates))
    jv = jv.numpy()
    return jv[:2], jv[2:]


def bigon_in_positive_cone(s: BigonState, tangent: BigonTangent, tol: float = 1e-9) -> bool:
    """Both endpoint velocities are non-negative multiples of their framing vectors."""
    _, u1, _, u2 = to_endpoints(s)
    v1, v2 = endpoint_velocities(s, tangent)
    ok = True
    for u, v in ((u1, v1), (u2, v2)):
        scale = max(1.0, float(np.linalg.norm(v)))
        ok = ok and np.dot(u, v) >= -tol * scale and abs(u[0] * v[1] - u[1] * v[0]) <= tol * scale
    return bool(ok)


def random_state(rng: np.random.RandomState, margin: float = 0.1) -> BigonState:
    """State with alpha at least `margin` away from multiples of pi/2."""
    k = rng.randint(4)
    alpha = k * np.pi / 2 + rng.uniform(margin, np.pi / 2 - margin)
    return BigonState(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.2, 2.0), alpha, rng.uniform(0, 2 * np.pi))


def read_path_csv(path: str) -> Tuple[np.ndarray, np.ndarray]:
    """Rows t, p, q, r, alpha, phi; an optional header line is skipped."""
    with open(path, 'r', encoding='utf8') as f:
        first = f.readline()
    skip = 0
    try:
        [float(t) for t in first.strip().split(',')]
    except ValueError:
        skip = 1
    try:
        data = np.loadtxt(path, delimiter=',', skiprows=skip, ndmin=2)
    except ValueError as e:
        raise MalformedInstance('Cannot parse path CSV {}: {}'.format(path, e))
    if data.shape[1] != 6:
        raise MalformedInstance('Path CSV needs 6 columns t, p, q, r, alpha, phi')
    return data[:, 0], data[:, 1:]


def write_path_csv(path: str, times, states):
    data = np.column_stack([times, states])
    np.savetxt(path, data, delimiter=',', header='t,' + ','.join(COORDINATES), comments='', fmt='%.17g')
