"""Measured-sweep file handling: CSV import/export and reference de-embedding.

Sweep files carry one complex transmission parameter per row with the exact
header ``freq_hz,rx,tx,re,im`` (0-based port indices).  Reference traces use
``freq_hz,re,im``.  Floats are written with shortest round-tripping repr, so
export followed by ingest reproduces matrices bit for bit.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from .channel import FrequencySweep
from .util import atomic_write_text, float_repr

SWEEP_HEADER = ["freq_hz", "rx", "tx", "re", "im"]
REFERENCE_HEADER = ["freq_hz", "re", "im"]


class SweepFormatError(ValueError):
    """Malformed sweep or reference file: bad header, grid gaps, duplicates."""


class DeembedError(ValueError):
    """Reference trace unusable for de-embedding (mismatched grid or ~zero value)."""


def export_sweep(sweep: FrequencySweep, path) -> None:
    """Write a sweep as CSV, row-major over (frequency, rx, tx)."""
    atomic_write_text(path, format_sweep(sweep))


def format_sweep(sweep: FrequencySweep) -> str:
    lines = [",".join(SWEEP_HEADER)]
    for fi, f in enumerate(sweep.frequencies):
        for i in range(sweep.n_rx):
            for j in range(sweep.n_tx):
                h = sweep.matrices[fi, i, j]
                lines.append(
                    f"{float_repr(f)},{i},{j},{float_repr(h.real)},{float_repr(h.imag)}"
                )
    return "\n".join(lines) + "\n"


def _read_rows(path, expected_header):
    with open(os.fspath(path), newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SweepFormatError(f"{path}: empty file") from None
        if [h.strip() for h in header] != expected_header:
            raise SweepFormatError(
                f"{path}: header must be {','.join(expected_header)!r}, got {','.join(header)!r}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise SweepFormatError(f"{path}:{line_no}: expected {len(expected_header)} fields")
            yield line_no, row


def ingest_sweep(path, reference=None, band: str = "") -> FrequencySweep:
    """Assemble a sweep from CSV; row order does not matter.

    Validates that every frequency carries the complete (rx, tx) grid and that
    no cell is duplicated.  When ``reference`` (a path) is given, the sweep is
    de-embedded against that trace.
    """
    cells: dict[tuple[float, int, int], complex] = {}
    for line_no, row in _read_rows(path, SWEEP_HEADER):
        try:
            f = float(row[0])
            i = int(row[1])
            j = int(row[2])
            value = complex(float(row[3]), float(row[4]))
        except ValueError as exc:
            raise SweepFormatError(f"{path}:{line_no}: {exc}") from None
        key = (f, i, j)
        if key in cells:
            raise SweepFormatError(
                f"{path}: duplicate cell freq_hz={float_repr(f)} rx={i} tx={j}"
            )
        cells[key] = value
    if not cells:
        raise SweepFormatError(f"{path}: no data rows")

    freqs = sorted({k[0] for k in cells})
    rx_ids = sorted({k[1] for k in cells})
    tx_ids = sorted({k[2] for k in cells})
    if rx_ids != list(range(len(rx_ids))) or tx_ids != list(range(len(tx_ids))):
        raise SweepFormatError(f"{path}: rx/tx indices must cover 0..N-1 without gaps")

    mats = np.empty((len(freqs), len(rx_ids), len(tx_ids)), dtype=complex)
    for fi, f in enumerate(freqs):
        for i in rx_ids:
            for j in tx_ids:
                try:
                    mats[fi, i, j] = cells[(f, i, j)]
                except KeyError:
                    raise SweepFormatError(
                        f"{path}: missing entry for freq_hz={float_repr(f)} rx={i} tx={j}"
                    ) from None
    sweep = FrequencySweep(np.array(freqs), mats, band=band)
    if reference is not None:
        ref_freqs, trace = read_reference(reference)
        if ref_freqs.size != sweep.frequencies.size or np.any(ref_freqs != sweep.frequencies):
            raise DeembedError("reference trace frequency grid does not match the sweep")
        sweep = deembed(sweep, trace)
    return sweep


def read_reference(path):
    """Load a scalar complex trace; returns (frequencies, values) sorted ascending."""
    rows = {}
    for line_no, row in _read_rows(path, REFERENCE_HEADER):
        try:
            f = float(row[0])
            value = complex(float(row[1]), float(row[2]))
        except ValueError as exc:
            raise SweepFormatError(f"{path}:{line_no}: {exc}") from None
        if f in rows:
            raise SweepFormatError(f"{path}: duplicate reference frequency {float_repr(f)}")
        rows[f] = value
    if not rows:
        raise SweepFormatError(f"{path}: no data rows")
    freqs = np.array(sorted(rows))
    return freqs, np.array([rows[f] for f in freqs])


def export_reference(frequencies, values, path) -> None:
    lines = [",".join(REFERENCE_HEADER)]
    for f, v in zip(frequencies, values):
        v = complex(v)
        lines.append(f"{float_repr(float(f))},{float_repr(v.real)},{float_repr(v.imag)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def deembed(raw: FrequencySweep, reference) -> FrequencySweep:
    """Divide every matrix entry by the scalar reference value at its frequency.

    Removes a shared measurement response (e.g. a fiber delay) from all paths.
    """
    trace = np.asarray(reference, dtype=complex).ravel()
    if trace.size != raw.frequencies.size:
        raise DeembedError(
            f"reference has {trace.size} points but the sweep has {raw.frequencies.size}"
        )
    small = np.abs(trace) < 1e-12
    if np.any(small):
        f_bad = raw.frequencies[np.argmax(small)]
        raise DeembedError(f"reference magnitude below 1e-12 at {float_repr(float(f_bad))} Hz")
    return FrequencySweep(
        raw.frequencies.copy(), raw.matrices / trace[:, None, None], band=raw.band
    )
