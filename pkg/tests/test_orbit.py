import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eo_downlink.orbit import (
    EARTH_MU, OrbitGeometry, max_slant_range, orbital_velocity, pass_distance_profile, visibility_duration,
)

# independent oracle: root-find the central angle whose elevation equals eps,
# then law of cosines (scipy brentq, see notes); frozen here
D_MAX_30 = 1075088.0169291229
T_PASS_30 = 246.9865386836085
D_MAX_5 = 2328048.97737453
T_PASS_5 = 625.3070321372448


def geom(h=600e3, eps_deg=30.0, **kw):
    return OrbitGeometry.from_degrees(h, eps_deg, **kw)


def test_velocity_600km():
    assert orbital_velocity(geom()) == pytest.approx(7562, abs=1.0)


def test_velocity_scaling():
    assert orbital_velocity(geom(700e3)) < orbital_velocity(geom(600e3))
    doubled = geom(gravitational_parameter=2 * EARTH_MU)
    assert orbital_velocity(doubled) == pytest.approx(math.sqrt(2) * orbital_velocity(geom()), rel=1e-12)


def test_max_slant_range_values():
    assert max_slant_range(geom()) == pytest.approx(1075.3e3, abs=500)
    assert max_slant_range(geom()) == pytest.approx(D_MAX_30, rel=1e-12)
    assert max_slant_range(geom(eps_deg=5)) == pytest.approx(D_MAX_5, rel=1e-12)
    assert max_slant_range(geom(eps_deg=90)) == pytest.approx(600e3, rel=1e-12)


def test_visibility_duration_values():
    assert visibility_duration(geom()) == pytest.approx(247, abs=2)
    assert visibility_duration(geom()) == pytest.approx(T_PASS_30, rel=1e-9)
    assert visibility_duration(geom(eps_deg=5)) == pytest.approx(T_PASS_5, rel=1e-9)
    assert visibility_duration(geom(eps_deg=90)) == 0.0


def test_halving_velocity_doubles_duration():
    # v scales with sqrt(mu): quarter mu halves the velocity
    slow = geom(gravitational_parameter=EARTH_MU / 4)
    assert visibility_duration(slow) == pytest.approx(2 * visibility_duration(geom()), rel=1e-12)


def test_strictly_decreasing_in_elevation():
    eps = np.linspace(0.5, 89.5, 60)
    d = [max_slant_range(geom(eps_deg=e)) for e in eps]
    t = [visibility_duration(geom(eps_deg=e)) for e in eps]
    assert np.all(np.diff(d) < 0) and np.all(np.diff(t) < 0)
    assert max_slant_range(geom(eps_deg=5)) > max_slant_range(geom(eps_deg=30))


@pytest.mark.parametrize("kw", [dict(h=-1.0), dict(eps_deg=91), dict(eps_deg=-1)])
def test_geometry_invariants(kw):
    with pytest.raises(ValueError):
        geom(**kw)
    with pytest.raises(ValueError):
        OrbitGeometry(600e3, 0.5, gravitational_parameter=0.0)


def test_profile_shape_and_endpoints():
    g = geom()
    p = pass_distance_profile(g, 1000)
    assert p.interval_count == 1000 and len(p.distances) == 1001 and len(p.midpoint_distances) == 1000
    assert np.all(np.diff(p.sample_times) > 0)
    assert p.sample_times[0] == 0 and p.duration == pytest.approx(visibility_duration(g), rel=1e-12)
    np.testing.assert_allclose(p.interval_durations, visibility_duration(g) / 1000, rtol=1e-9)
    dmax = max_slant_range(g)
    assert p.distances[0] == pytest.approx(dmax, rel=1e-6)
    assert p.distances[-1] == pytest.approx(dmax, rel=1e-6)
    assert p.distances[500] == pytest.approx(600e3, rel=1e-12)
    assert p.distances.min() == pytest.approx(600e3, rel=1e-6)


def test_single_interval_profile():
    p = pass_distance_profile(geom(), 1)
    assert len(p.sample_times) == 2 and len(p.midpoint_distances) == 1
    assert p.distances[0] == pytest.approx(p.distances[1])
    assert p.midpoint_distances[0] == pytest.approx(600e3)


def test_zero_intervals_rejected():
    with pytest.raises(ValueError):
        pass_distance_profile(geom(), 0)


def test_zenith_only_visibility_gives_empty_profile():
    p = pass_distance_profile(geom(eps_deg=90), 10)
    assert p.interval_count == 0 and p.duration == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(200e3, 2000e3), st.floats(0.0, 85.0), st.integers(1, 400))
def test_profile_invariants(h, eps, n):
    g = geom(h, eps)
    p = pass_distance_profile(g, n)
    dmax = max_slant_range(g)
    # law-of-cosines endpoint reproduces the closed-form slant range
    assert p.distances[0] == pytest.approx(dmax, rel=1e-6)
    np.testing.assert_allclose(p.distances, p.distances[::-1], rtol=1e-6)
    np.testing.assert_allclose(p.midpoint_distances, p.midpoint_distances[::-1], rtol=1e-6)
    assert np.all(p.distances >= h * (1 - 1e-6)) and np.all(p.distances <= dmax * (1 + 1e-6))
    assert np.all(p.distances <= dmax + 1.0)


def test_offset_track_is_shorter_and_farther():
    g = geom()
    zen = pass_distance_profile(g, 200)
    off = pass_distance_profile(g, 200, math.radians(60))
    assert off.duration < zen.duration
    assert off.distances.min() > zen.distances.min()
    assert off.distances[0] == pytest.approx(max_slant_range(g), rel=1e-6)
    # closest approach equals the slant range at 60 degrees elevation
    assert off.distances.min() == pytest.approx(max_slant_range(geom(eps_deg=60)), rel=1e-6)
