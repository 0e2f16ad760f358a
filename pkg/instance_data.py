import json
import os

from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np

from framed_polygons import FramedPolygon, Polygon
from circle_chains import OrientedChain
from bigon_space import read_path_csv
from equitangent_flow import BicentricConfig, InscribedPolygon
from errors import GeometryError, MalformedInstance


# Abstract instance loader
class AInstanceData(ABC):
    """
    """
    @abstractmethod
    def __init__(self, path: str) -> None:
        """
        Args:
            path (str): Path to the instance file
        """
        self.path = path
        self.instance = None

    def read_json(self) -> Dict[str, Any]:
        if not os.path.exists(self.path):
            raise MalformedInstance('Instance file {} does not exist'.format(self.path))
        try:
            with open(self.path, 'r', encoding='utf8') as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise MalformedInstance('Cannot parse {}: {}'.format(self.path, e))

    @staticmethod
    def field(data: Dict[str, Any], key: str, shape=None) -> np.ndarray:
        if not isinstance(data, dict) or key not in data:
            raise MalformedInstance('Missing field "{}"'.format(key))
        try:
            value = np.asarray(data[key], dtype=np.float64)
        except (TypeError, ValueError):
            raise MalformedInstance('Field "{}" is not numeric'.format(key))
        if shape is not None and (value.ndim != len(shape) or
                                  any(s is not None and s != v for s, v in zip(shape, value.shape))):
            raise MalformedInstance('Field "{}" has shape {}, expected {}'.format(key, value.shape, shape))
        return value

    @abstractmethod
    def prepare_data(self) -> None:
        """Loads the file and builds the `instance` property
        """
        pass


# {"vertices": [[x, y], ...]}
class PolygonData(AInstanceData):
    def __init__(self, path: str):
        super().__init__(path)

    def prepare_data(self) -> None:
        data = self.read_json()
        self.instance = Polygon(self.field(data, 'vertices', (None, 2)))


# {"vertices": [[x, y], ...], "framing_directions": [a, ...]}
class FramedPolygonData(AInstanceData):
    def __init__(self, path: str):
        super().__init__(path)

    def prepare_data(self) -> None:
        data = self.read_json()
        vertices = self.field(data, 'vertices', (None, 2))
        alpha = self.field(data, 'framing_directions', (vertices.shape[0],))
        self.instance = FramedPolygon(Polygon(vertices), alpha)


# {"centers": [[x, y], ...], "signed_radii": [r, ...]}
class ChainData(AInstanceData):
    def __init__(self, path: str):
        super().__init__(path)

    def prepare_data(self) -> None:
        data = self.read_json()
        self.instance = OrientedChain(self.field(data, 'centers', (None, 2)), self.field(data, 'signed_radii', (None,)))


# {"psi": [angle, ...]}, vertex angles on the unit circle
class InscribedPolygonData(AInstanceData):
    def __init__(self, path: str):
        super().__init__(path)

    def prepare_data(self) -> None:
        data = self.read_json()
        self.instance = InscribedPolygon(self.field(data, 'psi', (None,)))


# {"n": 3, "R": 0.9, "r": 0.4, "d": 0.3}
class BicentricData(AInstanceData):
    def __init__(self, path: str):
        super().__init__(path)

    def prepare_data(self) -> None:
        data = self.read_json()
        try:
            n = int(data['n'])
        except (KeyError, TypeError, ValueError):
            raise MalformedInstance('Field "n" must be an integer')
        self.instance = BicentricConfig(n, *(float(self.field(data, k, ())) for k in ('R', 'r', 'd')))


# CSV rows t, p, q, r, alpha, phi
class BigonPathData(AInstanceData):
    def __init__(self, path: str):
        super().__init__(path)
        self.times = None

    def prepare_data(self) -> None:
        if not os.path.exists(self.path):
            raise MalformedInstance('Instance file {} does not exist'.format(self.path))
        self.times, self.instance = read_path_csv(self.path)
        if len(self.times) < 3:
            raise MalformedInstance('Path needs at least 3 samples')


def load_instance(loader: AInstanceData):
    """Run the loader; shape errors raised by constructors count as malformed input."""
    try:
        loader.prepare_data()
    except GeometryError:
        raise
    except (ValueError, TypeError) as e:
        raise MalformedInstance('Malformed instance {}: {}'.format(loader.path, e))
    return loader.instance
