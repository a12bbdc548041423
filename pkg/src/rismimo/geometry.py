"""Coordinate frames, antenna element placement, and analytic element patterns.

Conventions used throughout the package:

* Global frame: right-handed, z up, distances in meters.
* Spherical coordinates are polar-from-z: ``theta`` is measured from the
  local +z axis (``theta = 90 deg`` is the local horizontal plane) and
  ``phi`` from the local +x axis toward +y.
* Every aperture (antenna array or reflecting panel) carries a :class:`Pose`
  whose local +y axis is the boresight/normal, local +x is the horizontal
  azimuth axis and local +z is the vertical axis of the aperture.  In-plane
  scan angles therefore coincide with ``phi`` at ``theta = 90 deg``, with
  90 deg meaning broadside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

C0 = 299_792_458.0  # speed of light, m/s

_ORTHO_TOL = 1e-9


def vec3(x: float, y: float, z: float) -> np.ndarray:
    """Build a finite global-frame position/direction vector."""
    v = np.array([x, y, z], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


def path_length(a, b) -> float:
    """Euclidean distance between two points, meters."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.linalg.norm(b - a))


@dataclass(frozen=True)
class SphericalCoord:
    """Point in a local frame: range, polar angle from +z, azimuth from +x."""

    r: float
    theta: float  # radians, [0, pi]
    phi: float    # radians, wrapped to [-pi, pi)

    def __post_init__(self):
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise ValueError("r must be positive and finite")
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError("theta must lie in [0, pi]")
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")
        wrapped = math.remainder(self.phi, 2.0 * math.pi)
        if wrapped >= math.pi:  # remainder returns (-pi, pi]; map pi to -pi
            wrapped -= 2.0 * math.pi
        object.__setattr__(self, "phi", wrapped)


@dataclass(frozen=True, eq=False)
class Pose:
    """Origin plus right-handed orthonormal triad (columns of ``rotation``)."""

    origin: np.ndarray                 # (3,) global
    rotation: np.ndarray               # (3, 3), columns = local x, y, z in global coords

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float).reshape(3)
        rot = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        if not (np.all(np.isfinite(origin)) and np.all(np.isfinite(rot))):
            raise ValueError("pose entries must be finite")
        gram = rot.T @ rot
        if np.max(np.abs(gram - np.eye(3))) > _ORTHO_TOL:
            raise ValueError("pose axes must be orthonormal to 1e-9")
        if abs(np.linalg.det(rot) - 1.0) > 1e-9:
            raise ValueError("pose axes must form a right-handed triad")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "rotation", rot)

    @classmethod
    def identity(cls, origin=(0.0, 0.0, 0.0)) -> "Pose":
        return cls(np.asarray(origin, dtype=float), np.eye(3))

    @classmethod
    def from_azimuth_tilt(cls, origin, azimuth_deg: float, downtilt_deg: float = 0.0) -> "Pose":
        """Pose whose boresight (+y) points at the given compass azimuth and downtilt.

        ``azimuth_deg`` is measured in the global x-y plane from +x toward +y;
        positive ``downtilt_deg`` tips the boresight below the horizon.  The
        local +x axis stays horizontal, local +z is the aperture's "up".
        """
        if abs(downtilt_deg) >= 89.9:
            raise ValueError("downtilt too close to vertical for a horizontal-x pose")
        az = math.radians(azimuth_deg)
        tilt = math.radians(downtilt_deg)
        boresight = np.array(
            [math.cos(tilt) * math.cos(az), math.cos(tilt) * math.sin(az), -math.sin(tilt)]
        )
        x_axis = np.cross(boresight, [0.0, 0.0, 1.0])
        x_axis /= np.linalg.norm(x_axis)
        z_axis = np.cross(x_axis, boresight)
        rot = np.column_stack([x_axis, boresight, z_axis])
        return cls(np.asarray(origin, dtype=float), rot)

    @property
    def boresight(self) -> np.ndarray:
        """Local +y axis in global coordinates (aperture normal)."""
        return self.rotation[:, 1]

    def to_global(self, local_points) -> np.ndarray:
        local_points = np.asarray(local_points, dtype=float)
        return local_points @ self.rotation.T + self.origin

    def to_local(self, global_points) -> np.ndarray:
        global_points = np.asarray(global_points, dtype=float)
        return (global_points - self.origin) @ self.rotation


def spherical_to_cartesian(s: SphericalCoord, frame: Pose) -> np.ndarray:
    """Global-frame point for a spherical coordinate expressed in ``frame``."""
    st = math.sin(s.theta)
    local = s.r * np.array([st * math.cos(s.phi), st * math.sin(s.phi), math.cos(s.theta)])
    return frame.to_global(local)


def cartesian_to_spherical(p, frame: Pose) -> SphericalCoord:
    """Inverse of :func:`spherical_to_cartesian`; undefined at the frame origin."""
    local = frame.to_local(np.asarray(p, dtype=float))
    r = float(np.linalg.norm(local))
    if r == 0.0:
        raise ValueError("point coincides with the frame origin")
    theta = math.acos(min(1.0, max(-1.0, local[2] / r)))
    phi = math.atan2(local[1], local[0])
    return SphericalCoord(r=r, theta=theta, phi=phi)


@dataclass(frozen=True)
class SectorPattern:
    """Gaussian-in-dB sector element: peak gain with separate az/el beamwidths."""

    peak_gain_dbi: float
    az_beamwidth_deg: float
    el_beamwidth_deg: float
    backlobe_db: float = -30.0  # floor relative to peak

    def __post_init__(self):
        if self.az_beamwidth_deg <= 0 or self.el_beamwidth_deg <= 0:
            raise ValueError("beamwidths must be positive")
        if self.backlobe_db >= 0:
            raise ValueError("backlobe level is relative to peak and must be negative")


@dataclass(frozen=True)
class DipolePattern:
    """Azimuth-omnidirectional element with a cos^2 elevation rolloff."""

    peak_gain_dbi: float = 0.0


@dataclass(frozen=True)
class IsotropicPattern:
    """Unit gain in every direction."""


ElementPattern = SectorPattern | DipolePattern | IsotropicPattern


def _pattern_gain_local(pattern: ElementPattern, local_dirs: np.ndarray) -> np.ndarray:
    """Linear power gain for unit directions given in the aperture's local frame."""
    dx, dy, dz = local_dirs[..., 0], local_dirs[..., 1], local_dirs[..., 2]
    if isinstance(pattern, IsotropicPattern):
        return np.ones(np.shape(dx))
    horiz = np.hypot(dx, dy)
    el = np.arctan2(dz, horiz)
    if isinstance(pattern, DipolePattern):
        return 10.0 ** (pattern.peak_gain_dbi / 10.0) * np.cos(el) ** 2
    az = np.arctan2(dx, dy)  # zero at boresight (+y), grows toward local +x
    az_deg = np.degrees(az)
    el_deg = np.degrees(el)
    g_db = (
        pattern.peak_gain_dbi
        - 12.0 * (az_deg / pattern.az_beamwidth_deg) ** 2
        - 12.0 * (el_deg / pattern.el_beamwidth_deg) ** 2
    )
    g_db = np.maximum(g_db, pattern.peak_gain_dbi + pattern.backlobe_db)
    return 10.0 ** (g_db / 10.0)


@dataclass(frozen=True, eq=False)
class AntennaArray:
    """Antenna port list: shared pose and element pattern, per-port offset and polarization.

    Ports are ordered position-major; ``offsets`` are local-frame meters.
    """

    pose: Pose
    offsets: np.ndarray                # (n, 3) local frame
    pattern: ElementPattern
    polarizations: tuple[str, ...]     # per-port tag, e.g. "v" / "h"

    def __post_init__(self):
        offsets = np.asarray(self.offsets, dtype=float).reshape(-1, 3)
        if offsets.shape[0] < 1:
            raise ValueError("array needs at least one element")
        if not np.all(np.isfinite(offsets)):
            raise ValueError("element offsets must be finite")
        pols = tuple(str(p) for p in self.polarizations)
        if len(pols) != offsets.shape[0]:
            raise ValueError("one polarization tag per element is required")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "polarizations", pols)

    @property
    def n_elements(self) -> int:
        return self.offsets.shape[0]

    def element_positions(self) -> np.ndarray:
        """(n, 3) global element centers."""
        return self.pose.to_global(self.offsets)


def linear_array(
    pose: Pose,
    n_positions: int,
    spacing_m: float,
    pattern: ElementPattern,
    polarizations=("v",),
) -> AntennaArray:
    """Uniform line of element positions along local x, centered on the pose origin.

    Each position contributes one port per polarization tag, position-major,
    so ``n_positions * len(polarizations)`` ports total.
    """
    if n_positions < 1:
        raise ValueError("n_positions must be >= 1")
    pols = tuple(polarizations)
    if not pols:
        raise ValueError("at least one polarization tag is required")
    xs = (np.arange(n_positions) - (n_positions - 1) / 2.0) * spacing_m
    offsets = np.repeat(np.column_stack([xs, np.zeros(n_positions), np.zeros(n_positions)]),
                        len(pols), axis=0)
    return AntennaArray(pose=pose, offsets=offsets, pattern=pattern,
                        polarizations=pols * n_positions)


def pattern_gain(array: AntennaArray, element_idx: int, direction) -> float:
    """Linear power gain of one element toward a unit global direction.

    The direction must be unit-norm within 1e-6.  The element index is accepted
    for interface symmetry; all elements of an array share one pattern.
    """
    if not 0 <= element_idx < array.n_elements:
        raise IndexError("element index out of range")
    d = np.asarray(direction, dtype=float).reshape(3)
    norm = np.linalg.norm(d)
    if abs(norm - 1.0) > 1e-6:
        raise ValueError("direction must be unit-norm within 1e-6")
    local = array.pose.rotation.T @ d
    return float(_pattern_gain_local(array.pattern, local[None, :])[0])
