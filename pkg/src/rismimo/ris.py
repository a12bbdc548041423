"""Reflecting-panel model: 1-bit profile synthesis and re-radiated field prediction.

The panel lies in its pose's local x-z plane with the normal along local +y.
In-plane far-field angles follow the measurement convention: degrees in
[0, 180] within the local x-y plane, 90 deg being broadside, so a wave
incident from ``a`` degrees reflects specularly toward ``180 - a`` degrees
on a uniform panel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import C0, Pose, SphericalCoord, spherical_to_cartesian

POLARIZATIONS = ("v", "h")


def _default_gamma_states():
    # lossless 1-bit cell: states 0 / pi for both polarizations
    return {"v": (1.0 + 0.0j, -1.0 + 0.0j), "h": (1.0 + 0.0j, -1.0 + 0.0j)}


def gamma_states_with_loss(loss_db: float = 0.0) -> dict:
    """Reflection-state table with a flat magnitude reduction applied to both states."""
    scale = 10.0 ** (-loss_db / 20.0)
    return {p: (scale * (1.0 + 0.0j), scale * (-1.0 + 0.0j)) for p in POLARIZATIONS}


@dataclass(frozen=True, eq=False)
class RisPanel:
    """Planar grid of 1-bit unit cells.

    ``gamma_states`` maps a polarization tag to the complex reflection
    coefficients of bit states (0, 1).  ``q`` is the cosine exponent of the
    unit-cell pattern, applied to both the incident and re-radiated sides.
    """

    rows: int = 32
    cols: int = 32
    pitch_m: float = 0.03
    pose: Pose = field(default_factory=Pose.identity)
    gamma_states: dict = field(default_factory=_default_gamma_states)
    q: float = 1.0
    design_band_hz: tuple[float, float] = (3.2e9, 3.8e9)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("panel needs at least one element")
        if not self.pitch_m > 0:
            raise ValueError("pitch must be positive")
        if self.q < 0:
            raise ValueError("element pattern exponent must be non-negative")
        for pol, (g0, g1) in self.gamma_states.items():
            if abs(g0) > 1.0 + 1e-12 or abs(g1) > 1.0 + 1e-12:
                raise ValueError(f"|reflection coefficient| must be <= 1 for pol {pol!r}")
        lo, hi = self.design_band_hz
        if not lo < hi:
            raise ValueError("design band must have f_lo < f_hi")

    @property
    def n_elements(self) -> int:
        return self.rows * self.cols

    def element_offsets(self) -> np.ndarray:
        """(rows*cols, 3) local element centers, row-major with row 0 at the top."""
        n = np.arange(self.cols)
        m = np.arange(self.rows)
        x = (n - (self.cols - 1) / 2.0) * self.pitch_m
        z = ((self.rows - 1) / 2.0 - m) * self.pitch_m
        xx, zz = np.meshgrid(x, z)  # (rows, cols)
        out = np.zeros((self.rows * self.cols, 3))
        out[:, 0] = xx.ravel()
        out[:, 2] = zz.ravel()
        return out

    def element_positions(self) -> np.ndarray:
        """(rows*cols, 3) global element centers, row-major."""
        return self.pose.to_global(self.element_offsets())


@dataclass(frozen=True, eq=False)
class RisConfig:
    """Per-element bit state, one (rows, cols) plane per polarization."""

    bits: np.ndarray  # (2, rows, cols) in {0, 1}; index 0 = "v", 1 = "h"

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 3 or bits.shape[0] != len(POLARIZATIONS):
            raise ValueError("bits must have shape (2, rows, cols)")
        if not np.isin(bits, (0, 1)).all():
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "bits", bits.astype(np.uint8))

    @classmethod
    def uniform(cls, panel: RisPanel, bit: int = 0) -> "RisConfig":
        return cls(np.full((2, panel.rows, panel.cols), bit, dtype=np.uint8))

    @property
    def rows(self) -> int:
        return self.bits.shape[1]

    @property
    def cols(self) -> int:
        return self.bits.shape[2]

    def bits_for(self, polarization: str) -> np.ndarray:
        return self.bits[POLARIZATIONS.index(polarization)]

    def flipped(self) -> "RisConfig":
        """Elementwise NOT of every bit in both polarizations."""
        return RisConfig(1 - self.bits)


@dataclass(frozen=True)
class FocusTarget:
    """Beam-synthesis goal: known transmitter point, receiver in panel coordinates.

    ``flip`` inverts every bit of the resulting profile (a global pi phase
    shift of the re-radiated field).  ``strict_band`` rejects frequencies
    outside the panel's design band.
    """

    tx_position: np.ndarray
    rx_coord: SphericalCoord
    frequency_hz: float
    flip: bool = False
    strict_band: bool = False

    def __post_init__(self):
        object.__setattr__(self, "tx_position", np.asarray(self.tx_position, dtype=float).reshape(3))
        if not self.frequency_hz > 0:
            raise ValueError("frequency must be positive")


def _check_dims(panel: RisPanel, config: RisConfig) -> None:
    if (config.rows, config.cols) != (panel.rows, panel.cols):
        raise ValueError(
            f"config is {config.rows}x{config.cols} but panel is {panel.rows}x{panel.cols}"
        )


def desired_phase(panel: RisPanel, element_idx, tx, rx, frequency_hz: float) -> float:
    """Propagation phase k*(d_tx->element + d_element->rx) mod 2*pi, radians.

    This is the phase the element must cancel to contribute coherently at the
    receiver.  ``element_idx`` is a (row, col) pair; distances are taken to the
    element center.
    """
    m, n = element_idx
    if not (0 <= m < panel.rows and 0 <= n < panel.cols):
        raise IndexError("element index out of range")
    pos = panel.element_positions()[m * panel.cols + n]
    tx = np.asarray(tx, dtype=float).reshape(3)
    rx = np.asarray(rx, dtype=float).reshape(3)
    k = 2.0 * math.pi * frequency_hz / C0
    total = float(np.linalg.norm(pos - tx) + np.linalg.norm(rx - pos))
    return (k * total) % (2.0 * math.pi)


def quantize_phase(phi):
    """Nearest of the two states {0, pi} as a bit; ties at pi/2 round to 1.

    Accepts scalars or arrays; returns the same shape.
    """
    wrapped = np.mod(phi, 2.0 * math.pi)
    bit = ((wrapped >= math.pi / 2.0) & (wrapped < 3.0 * math.pi / 2.0)).astype(np.uint8)
    if np.ndim(phi) == 0:
        return int(bit)
    return bit


def phase_profile_for_focus(panel: RisPanel, target: FocusTarget) -> RisConfig:
    """1-bit profile steering the panel's re-radiation at the target receiver.

    Each element quantizes its phase-conjugation value independently; both
    polarizations receive the same profile.
    """
    if target.strict_band:
        lo, hi = panel.design_band_hz
        if not lo <= target.frequency_hz <= hi:
            raise ValueError(
                f"frequency {target.frequency_hz:.4g} Hz outside design band [{lo:.4g}, {hi:.4g}]"
            )
    rx = spherical_to_cartesian(target.rx_coord, panel.pose)
    pos = panel.element_positions()
    k = 2.0 * math.pi * target.frequency_hz / C0
    d_total = np.linalg.norm(pos - target.tx_position, axis=1) + np.linalg.norm(rx - pos, axis=1)
    bits = quantize_phase(k * d_total).reshape(panel.rows, panel.cols)
    if target.flip:
        bits = 1 - bits
    return RisConfig(np.stack([bits, bits]))


def _endpoint_terms(panel: RisPanel, endpoint, positions: np.ndarray):
    """Per-element (phase_factor, amplitude, cos_angle) for one side of the bounce.

    A scalar endpoint is an in-plane far-field angle in degrees (no spreading
    loss); a 3-vector is an exact global-frame point (spherical spreading).
    """
    normal = panel.pose.boresight
    if np.ndim(endpoint) == 0:
        ang = math.radians(float(endpoint))
        if not 0.0 <= float(endpoint) <= 180.0:
            raise ValueError("far-field angles must lie in [0, 180] degrees")
        direction = panel.pose.rotation @ np.array([math.cos(ang), math.sin(ang), 0.0])
        rel = positions - panel.pose.origin
        phase_dist = -rel @ direction          # advances elements closer to the endpoint
        amplitude = np.ones(len(positions))
        cos_angle = np.full(len(positions), math.sin(ang))
    else:
        point = np.asarray(endpoint, dtype=float).reshape(3)
        delta = point - positions
        dist = np.linalg.norm(delta, axis=1)
        if np.any(dist <= 0.0):
            raise ValueError("endpoint coincides with a panel element")
        phase_dist = dist
        amplitude = 1.0 / dist
        cos_angle = delta @ normal / dist
    return phase_dist, amplitude, np.clip(cos_angle, 0.0, None)


def reradiated_field(
    panel: RisPanel,
    config: RisConfig,
    source,
    observation,
    frequency_hz: float,
    polarization: str = "v",
) -> complex:
    """Coherent element sum of the field scattered from source to observation.

    ``source`` and ``observation`` are each either an in-plane far-field angle
    in degrees (scalar) or a global-frame point (3-vector).  Point endpoints
    include 1/distance spreading; far-field endpoints do not.  The unit-cell
    pattern contributes cos^q on each side of the bounce.
    """
    _check_dims(panel, config)
    positions = panel.element_positions()
    d_in, amp_in, cos_in = _endpoint_terms(panel, source, positions)
    d_out, amp_out, cos_out = _endpoint_terms(panel, observation, positions)
    g0, g1 = panel.gamma_states[polarization]
    bits = config.bits_for(polarization).ravel()
    gamma = np.where(bits == 1, g1, g0)
    k = 2.0 * math.pi * frequency_hz / C0
    terms = (
        amp_in
        * amp_out
        * (cos_in * cos_out) ** panel.q
        * gamma
        * np.exp(-1j * k * (d_in + d_out))
    )
    return complex(terms.sum())


def beam_pattern(
    panel: RisPanel,
    config: RisConfig,
    incidence_deg: float,
    angle_grid_deg,
    frequency_hz: float,
    polarization: str = "v",
) -> np.ndarray:
    """Normalized far-field power pattern in dB (peak = 0) over an angle grid.

    The source is a plane wave from ``incidence_deg``; the grid angles use the
    same in-plane convention (90 deg = broadside).
    """
    _check_dims(panel, config)
    grid = np.asarray(angle_grid_deg, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("angle grid must be non-empty")
    if np.any((grid < 0.0) | (grid > 180.0)):
        raise ValueError("angle grid must lie within [0, 180] degrees")

    positions = panel.element_positions()
    d_in, amp_in, cos_in = _endpoint_terms(panel, float(incidence_deg), positions)
    g0, g1 = panel.gamma_states[polarization]
    bits = config.bits_for(polarization).ravel()
    gamma = np.where(bits == 1, g1, g0)
    k = 2.0 * math.pi * frequency_hz / C0

    ang = np.radians(grid)
    out_dirs = panel.pose.rotation @ np.stack(
        [np.cos(ang), np.sin(ang), np.zeros_like(ang)]
    )  # (3, A)
    rel = positions - panel.pose.origin
    d_out = -rel @ out_dirs                       # (N, A)
    cos_out = np.sin(ang)[None, :]

    weights = amp_in * cos_in**panel.q * gamma * np.exp(-1j * k * d_in)  # (N,)
    fields = (weights[:, None] * cos_out**panel.q * np.exp(-1j * k * d_out)).sum(axis=0)
    power = np.abs(fields) ** 2
    peak = power.max()
    if peak <= 0.0:
        raise ValueError("pattern is identically zero; cannot normalize")
    # exact nulls are floored ~3000 dB down so the dB vector stays finite
    return 10.0 * np.log10(np.maximum(power, peak * 1e-300) / peak)


def config_to_text(config: RisConfig) -> str:
    """Text grid form: one block of 0/1 rows per polarization, blank-line separated."""
    blocks = []
    for p in range(config.bits.shape[0]):
        rows = ["".join(str(int(b)) for b in row) for row in config.bits[p]]
        blocks.append("\n".join(rows))
    return "\n\n".join(blocks) + "\n"


def config_from_text(text: str) -> RisConfig:
    """Parse the text-grid form produced by :func:`config_to_text`."""
    blocks = [b for b in text.strip().split("\n\n") if b.strip()]
    if len(blocks) != len(POLARIZATIONS):
        raise ValueError(f"expected {len(POLARIZATIONS)} polarization blocks, got {len(blocks)}")
    planes = []
    for block in blocks:
        rows = [line.strip() for line in block.splitlines() if line.strip()]
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise ValueError("ragged config grid")
        if not all(set(r) <= {"0", "1"} for r in rows):
            raise ValueError("config grid may contain only 0 and 1 characters")
        planes.append(np.array([[int(c) for c in r] for r in rows], dtype=np.uint8))
    if planes[0].shape != planes[1].shape:
        raise ValueError("polarization blocks must have identical dimensions")
    return RisConfig(np.stack(planes))
