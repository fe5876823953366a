"""Circular-orbit pass geometry over a single ground station.

Spherical Earth, circular orbit, station at sea level. The default trajectory
passes straight overhead (maximum elevation 90 degrees).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EARTH_RADIUS = 6_371_000.0
GRAVITY_CONSTANT = 6.673e-11
EARTH_MASS = 5.9736e24
EARTH_MU = GRAVITY_CONSTANT * EARTH_MASS


@dataclass(frozen=True)
class OrbitGeometry:
    altitude: float  # m
    min_elevation: float  # rad
    earth_radius: float = EARTH_RADIUS
    gravitational_parameter: float = EARTH_MU  # G * M_e, m^3/s^2

    def __post_init__(self):
        if not self.altitude > 0:
            raise ValueError(f"altitude must be positive, got {self.altitude}")
        if not 0.0 <= self.min_elevation <= math.pi / 2:
            raise ValueError(f"min_elevation must lie in [0, pi/2] rad, got {self.min_elevation}")
        if not self.earth_radius > 0:
            raise ValueError("earth_radius must be positive")
        if not self.gravitational_parameter > 0:
            raise ValueError("gravitational_parameter must be positive")

    @property
    def orbit_radius(self) -> float:
        return self.earth_radius + self.altitude

    @classmethod
    def from_degrees(cls, altitude: float, min_elevation_deg: float, **kw) -> "OrbitGeometry":
        return cls(altitude, math.radians(min_elevation_deg), **kw)


@dataclass(frozen=True)
class PassProfile:
    """Slant range sampled on a uniform time grid over one pass.

    ``distances`` sits on the ``N + 1`` grid points; ``midpoint_distances``
    holds one value per interval, evaluated at the interval's central angle.
    A pass of zero duration has ``interval_count == 0`` and a single sample.
    """

    sample_times: np.ndarray
    distances: np.ndarray
    midpoint_distances: np.ndarray

    @property
    def interval_count(self) -> int:
        return len(self.sample_times) - 1

    @property
    def duration(self) -> float:
        return float(self.sample_times[-1] - self.sample_times[0])

    @property
    def interval_durations(self) -> np.ndarray:
        return np.diff(self.sample_times)


def orbital_velocity(geom: OrbitGeometry) -> float:
    return math.sqrt(geom.gravitational_parameter / geom.orbit_radius)


def max_slant_range(geom: OrbitGeometry) -> float:
    R, eps = geom.earth_radius, geom.min_elevation
    return math.sqrt(geom.orbit_radius**2 - (R * math.cos(eps)) ** 2) - R * math.sin(eps)


def half_visibility_angle(geom: OrbitGeometry) -> float:
    """Earth central angle between the station and the satellite at minimum elevation."""
    if geom.min_elevation == math.pi / 2:
        return 0.0  # cos(pi/2) is not exactly zero in floating point
    ratio = max_slant_range(geom) * math.cos(geom.min_elevation) / geom.orbit_radius
    return math.asin(min(1.0, max(0.0, ratio)))


def visibility_duration(geom: OrbitGeometry) -> float:
    """Time spent above the minimum elevation on an overhead pass, in seconds."""
    return 2.0 * geom.orbit_radius / orbital_velocity(geom) * half_visibility_angle(geom)


def central_angle_at_elevation(geom: OrbitGeometry, elevation: float) -> float:
    R = geom.earth_radius
    return math.acos(R * math.cos(elevation) / geom.orbit_radius) - elevation


def slant_range(geom: OrbitGeometry, central_angle) -> np.ndarray:
    """Law of cosines in the station / satellite / Earth-centre triangle."""
    return _slant_range_from_cos(geom, np.cos(central_angle))


def _slant_range_from_cos(geom: OrbitGeometry, cos_angle) -> np.ndarray:
    R, r = geom.earth_radius, geom.orbit_radius
    d2 = R * R + r * r - 2.0 * R * r * cos_angle
    return np.sqrt(np.maximum(d2, 0.0))


def pass_distance_profile(
    geom: OrbitGeometry, intervals: int = 1000, max_elevation: float = math.pi / 2
) -> PassProfile:
    """Sample the slant range over one pass on ``intervals`` uniform steps.

    ``max_elevation`` below 90 degrees offsets the ground track by the
    matching cross-track central angle; the along-track half arc shrinks so
    that the pass still starts and ends at ``min_elevation``.
    """
    if intervals < 1:
        raise ValueError(f"intervals must be at least 1, got {intervals}")
    if not geom.min_elevation <= max_elevation <= math.pi / 2:
        raise ValueError("max_elevation must lie between min_elevation and pi/2")

    beta = half_visibility_angle(geom)
    cross = 0.0 if max_elevation == math.pi / 2 else central_angle_at_elevation(geom, max_elevation)
    # spherical right triangle: cos(psi) = cos(cross) * cos(along)
    along = math.acos(min(1.0, math.cos(beta) / math.cos(cross)))
    omega = orbital_velocity(geom) / geom.orbit_radius
    duration = 2.0 * along / omega

    def distance(a):
        return _slant_range_from_cos(geom, math.cos(cross) * np.cos(a))

    if duration == 0.0:
        d0 = distance(np.zeros(1))
        return PassProfile(np.zeros(1), d0, np.empty(0))

    k = np.arange(intervals + 1)
    # (2k - N) / N keeps the grid exactly antisymmetric about zero
    angles = along * (2 * k - intervals) / intervals
    mids = along * (2 * k[:-1] + 1 - intervals) / intervals
    times = duration * k / intervals
    return PassProfile(times, distance(angles), distance(mids))
