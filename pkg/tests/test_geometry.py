import math

import numpy as np
import pytest

from rismimo import (
    AntennaArray,
    DipolePattern,
    IsotropicPattern,
    Pose,
    SectorPattern,
    SphericalCoord,
    cartesian_to_spherical,
    linear_array,
    path_length,
    pattern_gain,
    spherical_to_cartesian,
    vec3,
)
from conftest import random_pose, reference_cartesian_to_spherical


class TestSphericalConversion:
    def test_x_axis_case(self):
        p = spherical_to_cartesian(SphericalCoord(1.0, math.pi / 2, 0.0), Pose.identity())
        assert np.allclose(p, [1.0, 0.0, 0.0], atol=1e-15)

    def test_pole_case(self):
        for phi in (0.0, 1.0, -2.5):
            p = spherical_to_cartesian(SphericalCoord(1.0, 0.0, phi), Pose.identity())
            assert np.allclose(p, [0.0, 0.0, 1.0], atol=1e-15)

    def test_translated_frame(self):
        frame = Pose.identity((1.0, 1.0, 1.0))
        p = spherical_to_cartesian(SphericalCoord(2.0, math.pi / 2, math.pi / 2), frame)
        assert np.allclose(p, [1.0, 3.0, 1.0], atol=1e-12)

    def test_round_trip_random_frames(self, rng):
        for _ in range(200):
            pose = random_pose(rng)
            s = SphericalCoord(
                r=rng.uniform(0.1, 100.0),
                theta=rng.uniform(1e-3, math.pi - 1e-3),
                phi=rng.uniform(-math.pi, math.pi - 1e-9),
            )
            p = spherical_to_cartesian(s, pose)
            # against the independent raw-trig inverse
            r_ref, theta_ref, phi_ref = reference_cartesian_to_spherical(p, pose)
            assert abs(r_ref - s.r) < 1e-9 * s.r
            assert abs(theta_ref - s.theta) < 1e-9
            assert abs(math.remainder(phi_ref - s.phi, 2 * math.pi)) < 1e-9
            # and against the library inverse
            back = cartesian_to_spherical(p, pose)
            assert abs(back.r - s.r) < 1e-9 * s.r
            assert abs(back.theta - s.theta) < 1e-9
            assert abs(math.remainder(back.phi - s.phi, 2 * math.pi)) < 1e-9

    def test_invalid_coordinates_rejected(self):
        with pytest.raises(ValueError):
            SphericalCoord(0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            SphericalCoord(-1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            SphericalCoord(1.0, 3.5, 0.0)


class TestPathLength:
    def test_pythagorean(self):
        assert path_length((0, 0, 0), (3, 4, 0)) == 5.0

    def test_coincident(self):
        assert path_length((1.0, 2.0, 3.0), (1.0, 2.0, 3.0)) == 0.0

    def test_symmetry_and_triangle_inequality(self, rng):
        for _ in range(200):
            a, b, c = rng.uniform(-50, 50, (3, 3))
            assert path_length(a, b) == path_length(b, a)
            assert path_length(a, c) <= path_length(a, b) + path_length(b, c) + 1e-12


class TestPose:
    def test_rejects_non_orthonormal(self):
        rot = np.eye(3)
        rot[0, 1] = 1e-6
        with pytest.raises(ValueError):
            Pose(np.zeros(3), rot)

    def test_rejects_left_handed(self):
        rot = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(ValueError):
            Pose(np.zeros(3), rot)

    def test_azimuth_tilt_boresight(self):
        pose = Pose.from_azimuth_tilt((0, 0, 10.0), azimuth_deg=90.0, downtilt_deg=0.0)
        assert np.allclose(pose.boresight, [0.0, 1.0, 0.0], atol=1e-12)
        assert np.allclose(pose.rotation, np.eye(3), atol=1e-12)
        tilted = Pose.from_azimuth_tilt((0, 0, 10.0), azimuth_deg=0.0, downtilt_deg=30.0)
        assert np.allclose(
            tilted.boresight,
            [math.cos(math.radians(30)), 0.0, -math.sin(math.radians(30))],
            atol=1e-12,
        )
        # local x stays horizontal
        assert abs(tilted.rotation[2, 0]) < 1e-12

    def test_local_global_round_trip(self, rng):
        pose = random_pose(rng)
        pts = rng.uniform(-5, 5, (10, 3))
        assert np.allclose(pose.to_local(pose.to_global(pts)), pts, atol=1e-9)


class TestPatternGain:
    def _sector_array(self):
        pattern = SectorPattern(16.0, 89.0, 6.5)
        return linear_array(Pose.identity(), 1, 0.1, pattern)

    def test_sector_boresight_peak(self):
        arr = self._sector_array()
        g = pattern_gain(arr, 0, (0.0, 1.0, 0.0))
        assert abs(10 * math.log10(g) - 16.0) < 1e-12

    def test_sector_half_beamwidth_is_3db(self):
        arr = self._sector_array()
        az = math.radians(44.5)
        g = pattern_gain(arr, 0, (math.sin(az), math.cos(az), 0.0))
        assert abs(10 * math.log10(g) - 13.0) < 1e-9

    def test_sector_monotone_and_floored(self):
        arr = self._sector_array()
        gains = []
        for az_deg in np.arange(0.0, 180.1, 2.0):
            az = math.radians(az_deg)
            gains.append(pattern_gain(arr, 0, (math.sin(az), math.cos(az), 0.0)))
        assert all(g1 >= g2 - 1e-15 for g1, g2 in zip(gains, gains[1:]))
        floor_db = 16.0 - 30.0
        assert abs(10 * math.log10(gains[-1]) - floor_db) < 1e-9

    def test_dipole_cos_squared_elevation(self):
        arr = linear_array(Pose.identity(), 1, 0.1, DipolePattern(peak_gain_dbi=5.0))
        peak = 10 ** 0.5
        assert abs(pattern_gain(arr, 0, (0.0, 1.0, 0.0)) - peak) < 1e-12
        el = math.radians(60.0)
        g = pattern_gain(arr, 0, (0.0, math.cos(el), math.sin(el)))
        assert abs(g - peak * math.cos(el) ** 2) < 1e-12
        # omnidirectional in azimuth
        g_side = pattern_gain(arr, 0, (1.0, 0.0, 0.0))
        assert abs(g_side - peak) < 1e-12

    def test_isotropic(self, rng):
        arr = linear_array(Pose.identity(), 1, 0.1, IsotropicPattern())
        d = rng.standard_normal(3)
        d /= np.linalg.norm(d)
        assert pattern_gain(arr, 0, d) == 1.0

    def test_rejects_non_unit_direction(self):
        arr = self._sector_array()
        with pytest.raises(ValueError):
            pattern_gain(arr, 0, (0.0, 1.01, 0.0))

    def test_rejects_bad_index(self):
        arr = self._sector_array()
        with pytest.raises(IndexError):
            pattern_gain(arr, 3, (0.0, 1.0, 0.0))


class TestArrayConstruction:
    def test_dual_pol_port_ordering(self):
        arr = linear_array(Pose.identity(), 2, 0.06, IsotropicPattern(), ("v", "h"))
        assert arr.n_elements == 4
        assert arr.polarizations == ("v", "h", "v", "h")
        # position-major: ports 0,1 share an offset, ports 2,3 the other
        assert np.allclose(arr.offsets[0], arr.offsets[1])
        assert np.allclose(arr.offsets[2], arr.offsets[3])
        assert abs(arr.offsets[0, 0] - (-0.03)) < 1e-12
        assert abs(arr.offsets[2, 0] - 0.03) < 1e-12

    def test_element_positions_follow_pose(self):
        pose = Pose.from_azimuth_tilt((5.0, 0.0, 2.0), azimuth_deg=90.0)
        arr = linear_array(pose, 2, 1.0, IsotropicPattern())
        pos = arr.element_positions()
        assert np.allclose(pos[0], [4.5, 0.0, 2.0], atol=1e-12)
        assert np.allclose(pos[1], [5.5, 0.0, 2.0], atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            AntennaArray(Pose.identity(), np.zeros((0, 3)), IsotropicPattern(), ())
        with pytest.raises(ValueError):
            AntennaArray(Pose.identity(), np.zeros((2, 3)), IsotropicPattern(), ("v",))
        with pytest.raises(ValueError):
            vec3(1.0, float("nan"), 0.0)
