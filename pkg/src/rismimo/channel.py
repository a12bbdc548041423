"""Frequency-domain MIMO channel synthesis: direct path, panel cascade, cluster scatter.

Entries are dimensionless complex voltage gains.  Antenna polarizations are
independent scalar channels: a transmit and receive port couple through the
deterministic mechanisms only when their tags match, while cluster scatter
(being depolarizing by nature) fills every entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import C0, AntennaArray, _pattern_gain_local
from .ris import POLARIZATIONS, RisConfig, RisPanel, _check_dims


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """Nr x Nt complex voltage-gain matrix at one frequency."""

    entries: np.ndarray
    frequency_hz: float

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or min(entries.shape) < 1:
            raise ValueError("entries must be a 2-D matrix")
        if not np.all(np.isfinite(entries)):
            raise ValueError("channel entries must be finite")
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True, eq=False)
class FrequencySweep:
    """Stack of channel matrices over a strictly ascending frequency grid."""

    frequencies: np.ndarray   # (F,) Hz
    matrices: np.ndarray      # (F, Nr, Nt) complex
    band: str = ""

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float).ravel()
        mats = np.asarray(self.matrices, dtype=complex)
        if freqs.size < 1:
            raise ValueError("sweep needs at least one frequency")
        if np.any(np.diff(freqs) <= 0):
            raise ValueError("frequency grid must be strictly ascending")
        if mats.ndim != 3 or mats.shape[0] != freqs.size:
            raise ValueError("need one matrix per frequency")
        if not np.all(np.isfinite(mats)):
            raise ValueError("sweep entries must be finite")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "matrices", mats)

    @property
    def n_rx(self) -> int:
        return self.matrices.shape[1]

    @property
    def n_tx(self) -> int:
        return self.matrices.shape[2]

    def matrix_at(self, index: int) -> ChannelMatrix:
        return ChannelMatrix(self.matrices[index], float(self.frequencies[index]))


@dataclass(frozen=True)
class DirectPath:
    """Direct Tx-Rx mechanism: on/off plus a flat blockage attenuation in dB."""

    enabled: bool = True
    blockage_db: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.blockage_db):
            raise ValueError("blockage must be finite")


@dataclass(frozen=True)
class ScatterSpec:
    """Sparse cluster scatter: per-cluster delay and power relative to the direct path.

    Powers are dB relative to the mean per-entry power of the *unblocked*
    direct path at band center.  Small-scale gains are complex Gaussian,
    drawn deterministically from ``seed``.
    """

    delays_s: tuple[float, ...] = ()
    powers_db: tuple[float, ...] = ()
    seed: int = 0

    def __post_init__(self):
        delays = tuple(float(d) for d in self.delays_s)
        powers = tuple(float(p) for p in self.powers_db)
        if len(delays) != len(powers):
            raise ValueError("need one power per cluster delay")
        if any(d < 0 or not math.isfinite(d) for d in delays):
            raise ValueError("cluster delays must be finite and non-negative")
        if any(not math.isfinite(p) for p in powers):
            raise ValueError("cluster powers must be finite")
        object.__setattr__(self, "delays_s", delays)
        object.__setattr__(self, "powers_db", powers)

    @property
    def n_clusters(self) -> int:
        return len(self.delays_s)


@dataclass(frozen=True)
class Band:
    """Evaluation band: inclusive frequency extent and grid size."""

    f_lo_hz: float
    f_hi_hz: float
    n_points: int
    label: str = ""

    def __post_init__(self):
        if not self.f_lo_hz < self.f_hi_hz:
            raise ValueError("band needs f_lo < f_hi")
        if self.n_points < 2:
            raise ValueError("band grid needs at least 2 points")

    @property
    def center_hz(self) -> float:
        return 0.5 * (self.f_lo_hz + self.f_hi_hz)

    @property
    def width_hz(self) -> float:
        return self.f_hi_hz - self.f_lo_hz

    def frequencies(self, n_points: int | None = None) -> np.ndarray:
        return np.linspace(self.f_lo_hz, self.f_hi_hz, n_points or self.n_points)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Complete scene description; treat as immutable after construction."""

    tx_array: AntennaArray
    rx_array: AntennaArray
    ris: RisPanel
    direct: DirectPath
    scatter: ScatterSpec
    band: Band
    noise_psd_dbm_hz: float = -169.0  # thermal floor plus 5 dB noise figure


def _pol_mask(scn: Scenario) -> np.ndarray:
    """(Nr, Nt) 1.0 where transmit and receive polarization tags match."""
    rx = np.array(scn.rx_array.polarizations)
    tx = np.array(scn.tx_array.polarizations)
    return (rx[:, None] == tx[None, :]).astype(float)


def _direct_entries(scn: Scenario, frequency_hz: float, blocked: bool) -> np.ndarray:
    tx_pos = scn.tx_array.element_positions()
    rx_pos = scn.rx_array.element_positions()
    delta = rx_pos[:, None, :] - tx_pos[None, :, :]      # (Nr, Nt, 3)
    dist = np.linalg.norm(delta, axis=2)
    if np.any(dist <= 0.0):
        raise ValueError("transmit and receive elements must not coincide")
    unit = delta / dist[..., None]
    g_tx = _pattern_gain_local(scn.tx_array.pattern, unit @ scn.tx_array.pose.rotation)
    g_rx = _pattern_gain_local(scn.rx_array.pattern, -unit @ scn.rx_array.pose.rotation)
    lam = C0 / frequency_hz
    k = 2.0 * math.pi / lam
    h = np.sqrt(g_tx * g_rx) * lam / (4.0 * math.pi * dist) * np.exp(-1j * k * dist)
    h = h * _pol_mask(scn)
    if blocked:
        h = h * 10.0 ** (-scn.direct.blockage_db / 20.0)
    return h


@lru_cache(maxsize=128)
def _direct_entries_cached(scn: Scenario, frequency_hz: float, blocked: bool) -> np.ndarray:
    return _direct_entries(scn, frequency_hz, blocked)


def direct_channel(scn: Scenario, frequency_hz: float) -> ChannelMatrix:
    """Friis line-of-sight matrix with blockage applied; requires the path enabled."""
    if not scn.direct.enabled:
        raise ValueError("direct path is disabled in this scenario")
    return ChannelMatrix(_direct_entries(scn, frequency_hz, blocked=True), frequency_hz)


@lru_cache(maxsize=8)
def _cascade_geometry(scn: Scenario):
    """Frequency-independent bounce geometry: distances and amplitude weights."""
    panel = scn.ris
    elements = panel.element_positions()                  # (N, 3)
    normal = panel.pose.boresight

    def side(array: AntennaArray):
        pos = array.element_positions()                   # (n, 3)
        delta = pos[None, :, :] - elements[:, None, :]    # (N, n): element -> port
        dist = np.linalg.norm(delta, axis=2)
        if np.any(dist <= 0.0):
            raise ValueError("antenna elements must not coincide with panel elements")
        unit = delta / dist[..., None]
        gain = _pattern_gain_local(array.pattern, -unit @ array.pose.rotation)
        cos_panel = np.clip(unit @ normal, 0.0, None)
        amp = np.sqrt(gain) * cos_panel**panel.q / dist
        return dist, amp

    d_tx, amp_tx = side(scn.tx_array)
    d_rx, amp_rx = side(scn.rx_array)
    pol_idx = {
        p: (
            np.flatnonzero(np.array(scn.rx_array.polarizations) == p),
            np.flatnonzero(np.array(scn.tx_array.polarizations) == p),
        )
        for p in POLARIZATIONS
    }
    return d_tx, amp_tx, d_rx, amp_rx, pol_idx


def ris_cascade(scn: Scenario, config: RisConfig, frequency_hz: float) -> ChannelMatrix:
    """Tx -> panel -> Rx bounce matrix for a given bit configuration."""
    _check_dims(scn.ris, config)
    entries = _cascade_entries(scn, config, float(frequency_hz))
    return ChannelMatrix(entries, frequency_hz)


@lru_cache(maxsize=128)
def _cascade_phase_factors(scn: Scenario, frequency_hz: float):
    """Config-independent per-port element weights at one frequency."""
    d_tx, amp_tx, d_rx, amp_rx, pol_idx = _cascade_geometry(scn)
    k = 2.0 * math.pi * frequency_hz / C0
    a_t = amp_tx * np.exp(-1j * k * d_tx)                 # (N, Nt)
    a_r = amp_rx * np.exp(-1j * k * d_rx)                 # (N, Nr)
    return a_t, a_r, pol_idx


def _cascade_entries(scn: Scenario, config: RisConfig, frequency_hz: float) -> np.ndarray:
    a_t, a_r, pol_idx = _cascade_phase_factors(scn, float(frequency_hz))
    lam = C0 / frequency_hz
    scale = (lam / (4.0 * math.pi)) ** 2
    h = np.zeros((scn.rx_array.n_elements, scn.tx_array.n_elements), dtype=complex)
    for pol, (rx_idx, tx_idx) in pol_idx.items():
        if rx_idx.size == 0 or tx_idx.size == 0:
            continue
        g0, g1 = scn.ris.gamma_states[pol]
        bits = config.bits_for(pol).ravel()
        gamma = np.where(bits == 1, g1, g0)
        block = scale * (a_r[:, rx_idx] * gamma[:, None]).T @ a_t[:, tx_idx]
        h[np.ix_(rx_idx, tx_idx)] = block
    return h


@lru_cache(maxsize=8)
def _scatter_gains(scn: Scenario) -> np.ndarray:
    """(C, Nr, Nt) frequency-independent cluster gains, deterministic in the seed."""
    spec = scn.scatter
    if spec.n_clusters == 0:
        return np.zeros((0, scn.rx_array.n_elements, scn.tx_array.n_elements), dtype=complex)
    ref = _direct_entries(scn, scn.band.center_hz, blocked=False)
    p_ref = float(np.mean(np.abs(ref) ** 2))
    if p_ref <= 0.0:
        raise ValueError("scatter power reference (unblocked direct path) is zero")
    sigma = np.sqrt(10.0 ** (np.array(spec.powers_db) / 10.0) * p_ref)
    rng = np.random.default_rng(spec.seed)
    shape = (spec.n_clusters, scn.rx_array.n_elements, scn.tx_array.n_elements)
    gains = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    return gains * sigma[:, None, None]


def scatter_channel(scn: Scenario, frequency_hz: float) -> ChannelMatrix:
    """Cluster-sum NLoS matrix; zero matrix when no clusters are configured."""
    gains = _scatter_gains(scn)
    if gains.shape[0] == 0:
        h = np.zeros((scn.rx_array.n_elements, scn.tx_array.n_elements), dtype=complex)
        return ChannelMatrix(h, frequency_hz)
    phase = np.exp(-2j * math.pi * frequency_hz * np.array(scn.scatter.delays_s))
    return ChannelMatrix(np.tensordot(phase, gains, axes=1), frequency_hz)


def synthesize(
    scn: Scenario,
    config: RisConfig | None = None,
    *,
    n_points: int | None = None,
) -> FrequencySweep:
    """Total channel over the scenario band: direct + scatter + optional panel cascade.

    ``config=None`` is the before-panel reference case.  ``n_points`` overrides
    the band grid size (used for coarse optimizer fitness grids).
    """
    if config is not None:
        _check_dims(scn.ris, config)
    freqs = scn.band.frequencies(n_points)
    shape = (freqs.size, scn.rx_array.n_elements, scn.tx_array.n_elements)
    mats = np.zeros(shape, dtype=complex)
    gains = _scatter_gains(scn) if scn.scatter.n_clusters else None
    delays = np.array(scn.scatter.delays_s)
    for i, f in enumerate(freqs):
        h = np.zeros(shape[1:], dtype=complex)
        if scn.direct.enabled:
            h += _direct_entries_cached(scn, float(f), True)
        if gains is not None:
            h += np.tensordot(np.exp(-2j * math.pi * f * delays), gains, axes=1)
        if config is not None:
            h += _cascade_entries(scn, config, float(f))
        mats[i] = h
    return FrequencySweep(freqs, mats, band=scn.band.label)


def max_path_delay_s(scn: Scenario) -> float:
    """Largest propagation delay present: geometric paths and cluster delays."""
    tx = scn.tx_array.element_positions()
    rx = scn.rx_array.element_positions()
    elements = scn.ris.element_positions()
    d_direct = np.linalg.norm(rx[:, None, :] - tx[None, :, :], axis=2).max()
    d1 = np.linalg.norm(elements[:, None, :] - tx[None, :, :], axis=2).max(axis=1)
    d2 = np.linalg.norm(rx[None, :, :] - elements[:, None, :], axis=2).max(axis=1)
    d_bounce = float((d1 + d2).max())
    tau_geom = max(float(d_direct), d_bounce) / C0
    tau_scatter = max(scn.scatter.delays_s, default=0.0)
    return max(tau_geom, tau_scatter)


def grid_resolves_phase(scn: Scenario, n_points: int | None = None) -> bool:
    """True when adjacent grid points are spaced finely enough that entry phases
    advance by less than pi between them (spacing < 1 / (2 * max delay))."""
    freqs = scn.band.frequencies(n_points)
    spacing = float(np.max(np.diff(freqs)))
    return spacing < 1.0 / (2.0 * max_path_delay_s(scn))
