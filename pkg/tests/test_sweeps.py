import math

import numpy as np
import pytest

from rismimo import DeembedError, FrequencySweep, SweepFormatError, deembed, export_sweep, ingest_sweep
from rismimo.sweeps import export_reference, format_sweep, read_reference


def random_sweep(rng, n_f=5, n_rx=4, n_tx=4):
    freqs = np.linspace(3.59e9, 3.64e9, n_f)
    mats = rng.standard_normal((n_f, n_rx, n_tx)) + 1j * rng.standard_normal((n_f, n_rx, n_tx))
    return FrequencySweep(freqs, mats, band="test")


class TestRoundTrip:
    def test_export_ingest_bit_identical(self, rng, tmp_path):
        sweep = random_sweep(rng)
        path = tmp_path / "sweep.csv"
        export_sweep(sweep, path)
        back = ingest_sweep(path)
        assert np.array_equal(back.frequencies, sweep.frequencies)
        assert np.array_equal(back.matrices, sweep.matrices)

    def test_shuffled_rows_assemble_identically(self, rng, tmp_path):
        sweep = random_sweep(rng, n_f=3, n_rx=2, n_tx=2)
        lines = format_sweep(sweep).strip().split("\n")
        header, rows = lines[0], lines[1:]
        rng.shuffle(rows)
        path = tmp_path / "shuffled.csv"
        path.write_text("\n".join([header] + rows) + "\n")
        back = ingest_sweep(path)
        assert np.array_equal(back.matrices, sweep.matrices)

    def test_missing_cell_named_in_error(self, rng, tmp_path):
        sweep = random_sweep(rng, n_f=2, n_rx=2, n_tx=2)
        lines = format_sweep(sweep).strip().split("\n")
        # drop the (rx=1, tx=0) cell of the first frequency
        victim = next(l for l in lines[1:] if l.split(",")[1:3] == ["1", "0"])
        path = tmp_path / "gap.csv"
        path.write_text("\n".join(l for l in lines if l != victim) + "\n")
        with pytest.raises(SweepFormatError, match="rx=1 tx=0"):
            ingest_sweep(path)

    def test_duplicate_cell_rejected(self, rng, tmp_path):
        sweep = random_sweep(rng, n_f=2, n_rx=1, n_tx=1)
        text = format_sweep(sweep)
        lines = text.strip().split("\n")
        path = tmp_path / "dup.csv"
        path.write_text("\n".join(lines + [lines[1]]) + "\n")
        with pytest.raises(SweepFormatError, match="duplicate"):
            ingest_sweep(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("frequency,rx,tx,re,im\n1,0,0,1,0\n")
        with pytest.raises(SweepFormatError, match="header"):
            ingest_sweep(path)


class TestDeembed:
    def test_unit_reference_is_identity(self, rng):
        sweep = random_sweep(rng)
        out = deembed(sweep, np.ones(sweep.frequencies.size, dtype=complex))
        assert np.array_equal(out.matrices, sweep.matrices)

    def test_removes_synthetic_fiber_delay(self, rng):
        h0 = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        freqs = np.linspace(3.59e9, 3.64e9, 11)
        tau = 2.37e-6
        phase = np.exp(-2j * math.pi * freqs * tau)
        raw = FrequencySweep(freqs, h0[None, :, :] * phase[:, None, None])
        flat = deembed(raw, phase)
        for i in range(freqs.size):
            assert np.max(np.abs(flat.matrices[i] - h0)) < 1e-12 * np.max(np.abs(h0))

    def test_inverse_operation_round_trip(self, rng):
        sweep = random_sweep(rng)
        reference = (
            rng.uniform(0.5, 2.0, sweep.frequencies.size)
            * np.exp(1j * rng.uniform(-math.pi, math.pi, sweep.frequencies.size))
        )
        multiplied = FrequencySweep(
            sweep.frequencies, sweep.matrices * reference[:, None, None]
        )
        back = deembed(multiplied, reference)
        assert np.max(np.abs(back.matrices - sweep.matrices)) < 1e-12 * np.max(
            np.abs(sweep.matrices)
        )

    def test_rejects_tiny_reference(self, rng):
        sweep = random_sweep(rng, n_f=3)
        reference = np.array([1.0, 1e-13, 1.0], dtype=complex)
        with pytest.raises(DeembedError):
            deembed(sweep, reference)

    def test_rejects_grid_mismatch(self, rng):
        sweep = random_sweep(rng, n_f=3)
        with pytest.raises(DeembedError):
            deembed(sweep, np.ones(4, dtype=complex))

    def test_ingest_with_reference_file(self, rng, tmp_path):
        sweep = random_sweep(rng, n_f=4, n_rx=2, n_tx=2)
        reference = np.exp(-2j * math.pi * sweep.frequencies * 1e-6)
        raw = FrequencySweep(sweep.frequencies, sweep.matrices * reference[:, None, None])
        raw_path = tmp_path / "raw.csv"
        ref_path = tmp_path / "ref.csv"
        export_sweep(raw, raw_path)
        export_reference(sweep.frequencies, reference, ref_path)
        calibrated = ingest_sweep(raw_path, reference=ref_path)
        assert np.max(np.abs(calibrated.matrices - sweep.matrices)) < 1e-12

    def test_reference_round_trip(self, rng, tmp_path):
        freqs = np.linspace(1e9, 2e9, 7)
        values = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        path = tmp_path / "ref.csv"
        export_reference(freqs, values, path)
        f2, v2 = read_reference(path)
        assert np.array_equal(f2, freqs)
        assert np.array_equal(v2, values)
