"""
    SVG figures of the constructions and of polygons along the equitangent flow.
"""
import logging
from typing import Optional, Sequence

import matplotlib
matplotlib.use('Agg')
from matplotlib import pyplot as plt
import numpy as np

from constructions import PiecewiseCircularCurve, PolyLine, curve_points
from equitangent_flow import InscribedPolygon, envelope_points

logger = logging.getLogger(__name__)


def _closed(points: np.ndarray) -> np.ndarray:
    return np.vstack([points, points[:1]])


def plot_construction(curve: PiecewiseCircularCurve, locus: Optional[PolyLine], path: str,
                      title: Optional[str] = None, samples: int = 2000):
    """Draw the curve and, when given, its equitangent polyline."""
    fig = plt.figure(figsize=(8.0, 8.0))
    ax = fig.add_subplot(111)
    pts = _closed(curve_points(curve, samples))
    ax.plot(pts[:, 0], pts[:, 1], 'k-', linewidth=1.0, label='curve')
    if locus is not None:
        v = _closed(locus.vertices)
        ax.plot(v[:, 0], v[:, 1], 'r-', linewidth=1.0, label='equitangent locus')
        ax.plot(locus.vertices[:, 0], locus.vertices[:, 1], 'r.', markersize=3)
    ax.axis('scaled')
    ax.legend(loc='upper right')
    if title:
        ax.set_title(title)
    fig.savefig(path, format='svg')
    plt.close(fig)
    logger.info('Wrote %s', path)


def plot_flow_polygons(polygons: Sequence[InscribedPolygon], path: str, title: Optional[str] = None):
    """Snapshots of inscribed polygons with the tangency points of their inscribed curve."""
    fig = plt.figure(figsize=(8.0, 8.0))
    ax = fig.add_subplot(111)
    t = np.linspace(0.0, 2.0 * np.pi, 400)
    ax.plot(np.cos(t), np.sin(t), color='0.7', linewidth=0.8)
    for A in polygons:
        v = _closed(A.vertices())
        line, = ax.plot(v[:, 0], v[:, 1], '-', linewidth=1.0)
        b = envelope_points(A)
        ax.plot(b[:, 0], b[:, 1], 'o', color=line.get_color(), markersize=3)
    ax.axis('scaled')
    if title:
        ax.set_title(title)
    fig.savefig(path, format='svg')
    plt.close(fig)
    logger.info('Wrote %s', path)
