"""Shared helpers for the test suite."""

import math

import numpy as np
import pytest

from rismimo import Pose


def reference_cartesian_to_spherical(point, pose):
    """Independent inverse conversion using raw trig on the pose data."""
    rel = np.asarray(point, dtype=float) - pose.origin
    x = float(rel @ pose.rotation[:, 0])
    y = float(rel @ pose.rotation[:, 1])
    z = float(rel @ pose.rotation[:, 2])
    r = math.sqrt(x * x + y * y + z * z)
    theta = math.acos(max(-1.0, min(1.0, z / r)))
    phi = math.atan2(y, x)
    return r, theta, phi


def random_pose(rng, origin_scale=10.0):
    """Random right-handed orthonormal pose."""
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return Pose(rng.uniform(-origin_scale, origin_scale, 3), q)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
