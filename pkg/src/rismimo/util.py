"""Small shared helpers: dB conversions and deterministic text output."""

from __future__ import annotations

import os
import tempfile

import numpy as np


def db10(x):
    """Linear power ratio to dB."""
    return 10.0 * np.log10(x)


def undb10(x_db):
    """dB to linear power ratio."""
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    if p_w <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * np.log10(p_w) + 30.0


def float_repr(x: float) -> str:
    """Shortest decimal string that round-trips the float exactly."""
    return repr(float(x))


def atomic_write_text(path, text: str) -> None:
    """Write a text file via temp-file-then-rename so readers never see partial output."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
