"""
    Fixed-step 4th order Runge-Kutta integration and the flow-composition commutator.

    The helpers only use arithmetic on the state, so they work for numpy arrays and
    torch tensors alike.
"""
import logging
from dataclasses import dataclass
from typing import Any, Callable

logger = logging.getLogger(__name__)

# Acceptance window of |E(h)| / |E(h/2)| for commutator estimates
RICHARDSON_WINDOW = (0.95, 1.05)


def ratio_accepted(ratio: float) -> bool:
    lo, hi = RICHARDSON_WINDOW
    return bool(lo <= ratio <= hi)


def rk4_step(f: Callable, x, h: float):
    k1 = f(x)
    k2 = f(x + (h / 2) * k1)
    k3 = f(x + (h / 2) * k2)
    k4 = f(x + h * k3)
    return x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def flow(f: Callable, x, t: float, steps: int = 1):
    """Approximate time-t map of the autonomous field f."""
    h = t / steps
    for _ in range(steps):
        x = rk4_step(f, x, h)
    return x


def commutator_estimate(F: Callable, G: Callable, x, h: float, steps: int = 1):
    """(Phi^G_{-h} Phi^F_{-h} Phi^G_h Phi^F_h (x) - x) / h^2, a first order estimate of DG.F - DF.G."""
    y = flow(F, x, h, steps)
    y = flow(G, y, h, steps)
    y = flow(F, y, -h, steps)
    y = flow(G, y, -h, steps)
    return (y - x) / (h * h), y


@dataclass
class BracketEstimate:
    value: Any
    coarse: Any
    ratio: float
    endpoint: Any

    @property
    def accepted(self) -> bool:
        return ratio_accepted(self.ratio)


def richardson_commutator(F: Callable, G: Callable, x, h: float, norm: Callable, steps: int = 1) -> BracketEstimate:
    """Commutator at h and h/2 combined as 2 E(h/2) - E(h), which is second order in h."""
    coarse, _ = commutator_estimate(F, G, x, h, steps)
    fine, endpoint = commutator_estimate(F, G, x, h / 2, steps)
    nf = float(norm(fine))
    ratio = float(norm(coarse)) / nf if nf > 0 else 1.0
    if not ratio_accepted(ratio):
        logger.debug('Richardson ratio %.4f outside %s', ratio, RICHARDSON_WINDOW)
    return BracketEstimate(2 * fine - coarse, coarse, ratio, endpoint)
