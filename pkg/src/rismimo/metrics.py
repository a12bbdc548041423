"""MIMO figures of merit: channel gain, effective rank, capacity, EIRP budgeting."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .channel import ChannelMatrix, FrequencySweep
from .util import atomic_write_text, dbm_to_watts, float_repr


def _entries(h) -> np.ndarray:
    if isinstance(h, ChannelMatrix):
        return h.entries
    return np.asarray(h, dtype=complex)


@dataclass(frozen=True, eq=False)
class SingularSpectrum:
    """Non-negative singular values in descending order."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if np.any(values < 0) or np.any(np.diff(values) > 0):
            raise ValueError("singular values must be non-negative and descending")
        object.__setattr__(self, "values", values)


def singular_spectrum(h) -> SingularSpectrum:
    return SingularSpectrum(np.linalg.svd(_entries(h), compute_uv=False))


def channel_gain(h) -> float:
    """Total power gain Tr(H H^H): the squared Frobenius norm."""
    entries = _entries(h)
    return float(np.sum(np.abs(entries) ** 2))


def band_gain(sweep: FrequencySweep) -> float:
    """Arithmetic mean of the per-frequency channel gain over the grid."""
    if sweep.frequencies.size < 1:
        raise ValueError("sweep is empty")
    return float(np.mean(np.sum(np.abs(sweep.matrices) ** 2, axis=(1, 2))))


def effective_rank(h) -> float:
    """exp of the Shannon entropy of the l1-normalized singular values.

    Lies in [1, min(Nr, Nt)]; 1 for a rank-1 matrix, the full dimension for a
    uniform spectrum.  Raises on an all-zero matrix.
    """
    sigma = np.linalg.svd(_entries(h), compute_uv=False)
    total = sigma.sum()
    if total <= 0.0:
        raise ValueError("effective rank is undefined for an all-zero matrix")
    p = sigma / total
    p = p[p > 0.0]
    return float(np.exp(-np.sum(p * np.log(p))))


def mean_effective_rank(sweep: FrequencySweep) -> float:
    if sweep.frequencies.size < 1:
        raise ValueError("sweep is empty")
    return float(np.mean([effective_rank(m) for m in sweep.matrices]))


def noise_power_w(noise_psd_dbm_hz: float, bandwidth_hz: float) -> float:
    """Per-branch noise power for a flat PSD over the given bandwidth."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    return dbm_to_watts(noise_psd_dbm_hz) * bandwidth_hz


def waterfill_allocation(h, total_power_w: float, noise_power_w: float):
    """Optimal per-eigenmode powers under a total power constraint.

    Returns ``(powers, mode_gains)`` where ``mode_gains`` are the squared
    singular values in descending order.  Powers sum to the budget exactly
    (closed-form water level on the bisection-determined active set).
    """
    if total_power_w <= 0.0:
        raise ValueError("total power must be positive")
    if noise_power_w <= 0.0:
        raise ValueError("noise power must be positive")
    sigma = np.linalg.svd(_entries(h), compute_uv=False)
    gains = sigma**2
    powers = np.zeros_like(gains)
    positive = gains > 0.0
    if not np.any(positive):
        return powers, gains
    inv = noise_power_w / gains[positive]

    def allocated(level: float) -> float:
        return float(np.maximum(0.0, level - inv).sum())

    lo, hi = 0.0, float(inv.max()) + total_power_w
    for _ in range(200):  # bisection well past 1e-12 relative
        mid = 0.5 * (lo + hi)
        if allocated(mid) < total_power_w:
            lo = mid
        else:
            hi = mid
    level = 0.5 * (lo + hi)
    active = level - inv > 0.0
    if not np.any(active):
        active = inv == inv.min()
    # exact water level on the active set conserves the budget to float precision
    level = (total_power_w + inv[active].sum()) / active.sum()
    alloc = np.maximum(0.0, level - inv)
    alloc[~active] = 0.0
    alloc *= total_power_w / alloc.sum()
    powers[positive] = alloc
    return powers, gains


def waterfilling_capacity(h, total_power_w: float, noise_power_w: float, bandwidth_hz: float) -> float:
    """Water-filling MIMO capacity in bits/s; zero for an all-zero matrix."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    powers, gains = waterfill_allocation(h, total_power_w, noise_power_w)
    snr = powers * gains / noise_power_w
    return float(bandwidth_hz * np.sum(np.log2(1.0 + snr)))


def equal_power_capacity(h, total_power_w: float, noise_power_w: float, bandwidth_hz: float) -> float:
    """Capacity with the budget spread uniformly over the transmit ports."""
    if total_power_w <= 0.0 or noise_power_w <= 0.0 or bandwidth_hz <= 0.0:
        raise ValueError("power, noise and bandwidth must be positive")
    entries = _entries(h)
    n_tx = entries.shape[1]
    gains = np.linalg.svd(entries, compute_uv=False) ** 2
    snr = (total_power_w / n_tx) * gains / noise_power_w
    return float(bandwidth_hz * np.sum(np.log2(1.0 + snr)))


def eirp_to_tx_power(eirp_dbm_per_5mhz: float, bandwidth_hz: float, antenna_gain_dbi: float) -> float:
    """Transmit power in dBm implied by a per-5-MHz EIRP limit and antenna gain."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    eirp_total = eirp_dbm_per_5mhz + 10.0 * math.log10(bandwidth_hz / 5e6)
    return eirp_total - antenna_gain_dbi


def total_eirp_dbm(eirp_dbm_per_5mhz: float, bandwidth_hz: float) -> float:
    """Aggregate EIRP over the whole bandwidth, dBm."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    return eirp_dbm_per_5mhz + 10.0 * math.log10(bandwidth_hz / 5e6)


@dataclass(frozen=True, eq=False)
class CapacityCurve:
    """Band-mean water-filling capacity sampled over a transmit-power grid."""

    tx_powers_dbm: np.ndarray
    capacities_bps: np.ndarray
    bandwidth_hz: float

    def __post_init__(self):
        powers = np.asarray(self.tx_powers_dbm, dtype=float).ravel()
        caps = np.asarray(self.capacities_bps, dtype=float).ravel()
        if powers.size != caps.size or powers.size == 0:
            raise ValueError("need one capacity per power point")
        if np.any(np.diff(powers) <= 0):
            raise ValueError("power grid must be strictly ascending")
        if np.any(np.diff(caps) < -1e-9 * max(1.0, caps.max())):
            raise ValueError("capacity must be non-decreasing in power")
        object.__setattr__(self, "tx_powers_dbm", powers)
        object.__setattr__(self, "capacities_bps", caps)


def capacity_curve(
    sweep: FrequencySweep,
    tx_powers_dbm,
    noise_psd_dbm_hz: float,
) -> CapacityCurve:
    """Water-filling capacity vs transmit power, averaged over the sweep grid.

    The band is treated as parallel narrowband channels with the full budget
    available at each frequency; noise is the PSD integrated over the band.
    """
    bandwidth = float(sweep.frequencies[-1] - sweep.frequencies[0])
    if bandwidth <= 0:
        raise ValueError("sweep must span a non-zero band for capacity")
    n0 = noise_power_w(noise_psd_dbm_hz, bandwidth)
    powers = np.asarray(tx_powers_dbm, dtype=float).ravel()
    caps = np.empty_like(powers)
    for i, p_dbm in enumerate(powers):
        p_w = dbm_to_watts(p_dbm)
        caps[i] = np.mean(
            [waterfilling_capacity(m, p_w, n0, bandwidth) for m in sweep.matrices]
        )
    return CapacityCurve(powers, caps, bandwidth)


@dataclass(frozen=True, eq=False)
class MetricsReport:
    """Per-band summary: gain and effective rank per frequency plus capacity curve."""

    label: str
    frequencies: np.ndarray
    gains: np.ndarray             # linear, per frequency
    band_gain: float
    eranks: np.ndarray
    mean_erank: float
    capacity: CapacityCurve | None = None


def metrics_report(
    sweep: FrequencySweep,
    label: str = "",
    tx_powers_dbm=None,
    noise_psd_dbm_hz: float = -169.0,
) -> MetricsReport:
    gains = np.array([channel_gain(m) for m in sweep.matrices])
    eranks = np.array([effective_rank(m) for m in sweep.matrices])
    curve = None
    if tx_powers_dbm is not None:
        curve = capacity_curve(sweep, tx_powers_dbm, noise_psd_dbm_hz)
    return MetricsReport(
        label=label,
        frequencies=sweep.frequencies.copy(),
        gains=gains,
        band_gain=float(gains.mean()),
        eranks=eranks,
        mean_erank=float(eranks.mean()),
        capacity=curve,
    )


def format_report(report: MetricsReport) -> str:
    """Flat key-value text form of the summary numbers."""
    lines = [
        f"label: {report.label}",
        f"n_frequencies: {report.frequencies.size}",
        f"freq_lo_hz: {float_repr(report.frequencies[0])}",
        f"freq_hi_hz: {float_repr(report.frequencies[-1])}",
        f"band_gain_linear: {float_repr(report.band_gain)}",
        f"band_gain_db: {float_repr(10.0 * math.log10(report.band_gain))}"
        if report.band_gain > 0
        else "band_gain_db: -inf",
        f"mean_effective_rank: {float_repr(report.mean_erank)}",
    ]
    if report.capacity is not None:
        lines.append(f"capacity_bandwidth_hz: {float_repr(report.capacity.bandwidth_hz)}")
    return "\n".join(lines) + "\n"


def write_report(report: MetricsReport, out_dir, stem: str = "metrics") -> list:
    """Write the text report plus plot-ready CSV curves; returns written paths."""
    paths = []
    report_path = os.path.join(os.fspath(out_dir), f"{stem}.txt")
    atomic_write_text(report_path, format_report(report))
    paths.append(report_path)

    rows = ["freq_hz,gain_db,erank"]
    for f, g, e in zip(report.frequencies, report.gains, report.eranks):
        g_db = 10.0 * math.log10(g) if g > 0 else float("-inf")
        rows.append(f"{float_repr(f)},{float_repr(g_db)},{float_repr(e)}")
    curve_path = os.path.join(os.fspath(out_dir), f"{stem}_gain_erank.csv")
    atomic_write_text(curve_path, "\n".join(rows) + "\n")
    paths.append(curve_path)

    if report.capacity is not None:
        rows = ["power_dbm,capacity_bps"]
        for p, c in zip(report.capacity.tx_powers_dbm, report.capacity.capacities_bps):
            rows.append(f"{float_repr(p)},{float_repr(c)}")
        cap_path = os.path.join(os.fspath(out_dir), f"{stem}_capacity.csv")
        atomic_write_text(cap_path, "\n".join(rows) + "\n")
        paths.append(cap_path)
    return paths
