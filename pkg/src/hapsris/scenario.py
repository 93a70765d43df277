"""Disaster-area geometry: HAPS at the disk centre, a ground station, and
uniformly scattered IoT gateways at ground level.

All lengths are in km. The HAPS ground projection is the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, GeometryError


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise GeometryError(f"non-finite coordinates: {self}")
        if self.z < 0:
            raise GeometryError(f"altitude must be >= 0, got z={self.z}")


@dataclass(frozen=True)
class AreaSpec:
    radius: float = 50.0
    haps_altitude: float = 20.0
    ground_station: Position3D = Position3D(5.0, 5.0, 0.0)
    num_gateways: int = 1000

    def validate(self) -> "AreaSpec":
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ConfigurationError(f"radius must be > 0 km, got {self.radius}")
        if not (self.haps_altitude > 0 and math.isfinite(self.haps_altitude)):
            raise ConfigurationError(f"haps_altitude must be > 0 km, got {self.haps_altitude}")
        gs = self.ground_station
        if math.hypot(gs.x, gs.y) > self.radius:
            raise ConfigurationError(
                f"ground station ({gs.x}, {gs.y}) lies outside the {self.radius} km disk"
            )
        if isinstance(self.num_gateways, bool) or int(self.num_gateways) != self.num_gateways \
                or self.num_gateways < 1:
            raise ConfigurationError(f"num_gateways must be a positive integer, got {self.num_gateways}")
        return self

    @property
    def haps(self) -> Position3D:
        return Position3D(0.0, 0.0, self.haps_altitude)


@dataclass(frozen=True)
class LinkGeometry:
    horizontal_distance: float
    slant_distance: float
    elevation_deg: float


def sample_gateway_xy(area: AreaSpec, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on the disk as an ``(num_gateways, 2)`` array of x, y in km.

    Radius is drawn as ``R * sqrt(u)`` so the density is uniform in area.
    """
    area.validate()
    n = int(area.num_gateways)
    r = area.radius * np.sqrt(rng.random(n))
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    xy = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    return xy


def sample_gateway_positions(area: AreaSpec, rng: np.random.Generator) -> list[Position3D]:
    xy = sample_gateway_xy(area, rng)
    return [Position3D(float(x), float(y), 0.0) for x, y in xy]


def link_geometry(a: Position3D, b: Position3D) -> LinkGeometry:
    """Geometry of the a-b link; elevation is seen from the lower endpoint."""
    h = math.hypot(a.x - b.x, a.y - b.y)
    dz = abs(a.z - b.z)
    if h == 0.0 and dz == 0.0:
        raise GeometryError(f"coincident endpoints {a}")
    slant = math.hypot(h, dz)
    elev = 90.0 if h == 0.0 else math.degrees(math.atan(dz / h))
    return LinkGeometry(h, slant, elev)


def ground_to_haps_geometry(xy: np.ndarray, haps_altitude: float):
    """Vectorised :func:`link_geometry` for ground points (z=0) to the HAPS.

    Returns ``(horizontal, slant, elevation_deg)`` arrays.
    """
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    h = np.hypot(xy[:, 0], xy[:, 1])
    slant = np.hypot(h, haps_altitude)
    elev = np.degrees(np.arctan2(haps_altitude, h))
    return h, slant, elev
