"""Scenario files: schema-validated structured text describing a full scene.

The format is INI-style with fixed sections ``[scenario] [tx_array] [rx_array]
[ris] [propagation] [band] [noise] [pso]``.  Physical units are part of the
key names.  Unknown sections or keys are rejected, missing required keys are
reported all at once, and defaults applied during loading are echoed to the
module logger.  ``format_scenario`` emits the canonical form: schema ordering
with every defaulted value materialized, so save(load(f)) is idempotent.
"""

from __future__ import annotations

import configparser
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import Band, DirectPath, ScatterSpec, Scenario
from .geometry import (
    DipolePattern,
    IsotropicPattern,
    Pose,
    SectorPattern,
    linear_array,
)
from .pso import SwarmConfig
from .ris import POLARIZATIONS, RisPanel, gamma_states_with_loss
from .util import atomic_write_text, float_repr

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_REQUIRED = object()
_OPTIONAL = object()


class SchemaError(ValueError):
    """Scenario file violates the schema; the message lists every failing key."""


@dataclass(frozen=True)
class _Key:
    kind: str                    # int | float | bool | str | vec3 | floats | pair | tags | choice
    default: object = _REQUIRED
    choices: tuple = ()


def _array_schema(count_key: str, spacing_key: str) -> dict:
    return {
        "origin_m": _Key("vec3"),
        "azimuth_deg": _Key("float"),
        "downtilt_deg": _Key("float", 0.0),
        count_key: _Key("int"),
        spacing_key: _Key("float"),
        "pattern": _Key("choice", choices=("sector", "dipole", "isotropic")),
        "peak_gain_dbi": _Key("float", _OPTIONAL),
        "az_beamwidth_deg": _Key("float", _OPTIONAL),
        "el_beamwidth_deg": _Key("float", _OPTIONAL),
        "backlobe_db": _Key("float", -30.0),
        "polarizations": _Key("tags", ("v", "h")),
    }


_SCHEMA: dict[str, dict[str, _Key]] = {
    "scenario": {
        "schema_version": _Key("int"),
        "label": _Key("str", ""),
    },
    "tx_array": _array_schema("n_columns", "column_spacing_m"),
    "rx_array": _array_schema("n_elements", "element_spacing_m"),
    "ris": {
        "origin_m": _Key("vec3"),
        "azimuth_deg": _Key("float"),
        "downtilt_deg": _Key("float", 0.0),
        "rows": _Key("int", 32),
        "cols": _Key("int", 32),
        "pitch_m": _Key("float", 0.03),
        "q": _Key("float", 1.0),
        "state_loss_db": _Key("float", 0.0),
        "design_f_lo_hz": _Key("float", 3.2e9),
        "design_f_hi_hz": _Key("float", 3.8e9),
    },
    "propagation": {
        "direct_enabled": _Key("bool", True),
        "blockage_db": _Key("float", 0.0),
        "cluster_powers_db": _Key("floats", ()),
        "cluster_delays_ns": _Key("floats", ()),
        "seed": _Key("int", 0),
    },
    "band": {
        "freq_lo_hz": _Key("float"),
        "freq_hi_hz": _Key("float"),
        "n_points": _Key("int"),
        "label": _Key("str", ""),
    },
    "noise": {
        "psd_dbm_hz": _Key("float", -169.0),
    },
    "pso": {
        "swarm_size": _Key("int", 24),
        "iterations": _Key("int", 60),
        "inertia": _Key("float", 0.72),
        "cognitive": _Key("float", 1.49),
        "social": _Key("float", 1.49),
        "stall_iterations": _Key("int", 15),
        "seed": _Key("int", 0),
        "r_bounds_m": _Key("pair", (5.0, 300.0)),
        "theta_bounds_deg": _Key("pair", (60.0, 120.0)),
        "phi_bounds_deg": _Key("pair", (0.0, 180.0)),
        "fitness_band_points": _Key("int", _OPTIONAL),
    },
}

_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def _parse_value(kind: str, raw: str, choices: tuple):
    raw = raw.strip()
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        try:
            return _BOOL_WORDS[raw.lower()]
        except KeyError:
            raise ValueError(f"not a boolean: {raw!r}") from None
    if kind == "str":
        return raw
    if kind == "vec3":
        parts = [float(p) for p in raw.split()]
        if len(parts) != 3:
            raise ValueError("expected three numbers")
        return tuple(parts)
    if kind == "floats":
        return tuple(float(p) for p in raw.split())
    if kind == "pair":
        parts = [float(p) for p in raw.split()]
        if len(parts) != 2 or not parts[0] < parts[1]:
            raise ValueError("expected two numbers with lo < hi")
        return tuple(parts)
    if kind == "tags":
        tags = tuple(raw.split())
        if not tags or any(t not in POLARIZATIONS for t in tags):
            raise ValueError(f"polarization tags must be among {POLARIZATIONS}")
        return tags
    if kind == "choice":
        if raw not in choices:
            raise ValueError(f"must be one of {choices}")
        return raw
    raise AssertionError(f"unknown kind {kind}")


def _format_value(kind: str, value) -> str:
    if kind == "int":
        return str(int(value))
    if kind == "float":
        return float_repr(value)
    if kind == "bool":
        return "true" if value else "false"
    if kind in ("str", "choice"):
        return str(value)
    if kind in ("vec3", "floats", "pair"):
        return " ".join(float_repr(v) for v in value)
    if kind == "tags":
        return " ".join(value)
    raise AssertionError(f"unknown kind {kind}")


def parse_scenario_text(text: str, source: str = "<scenario>") -> dict:
    """Validate and type a scenario document; returns {section: {key: value}}."""
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",), strict=True
    )
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise SchemaError(f"{source}: parse error: {exc}") from None

    problems: list[str] = []
    doc: dict[str, dict] = {}

    for section in parser.sections():
        if section not in _SCHEMA:
            problems.append(f"unknown section [{section}]")
    for section, keys in _SCHEMA.items():
        if not parser.has_section(section):
            problems.append(f"missing section [{section}]")
            continue
        sec_doc: dict = {}
        for key in parser.options(section):
            if key not in keys:
                problems.append(f"unknown key {section}.{key}")
        for key, spec in keys.items():
            if parser.has_option(section, key):
                try:
                    sec_doc[key] = _parse_value(spec.kind, parser.get(section, key), spec.choices)
                except ValueError as exc:
                    problems.append(f"invalid value for {section}.{key}: {exc}")
            elif spec.default is _REQUIRED:
                problems.append(f"missing required key {section}.{key}")
            elif spec.default is not _OPTIONAL:
                sec_doc[key] = spec.default
                logger.info("scenario default applied: %s.%s = %r", section, key, spec.default)
        doc[section] = sec_doc

    if not problems:
        problems.extend(_cross_validate(doc))
    if problems:
        raise SchemaError(f"{source}: schema violations:\n  " + "\n  ".join(problems))
    return doc


def _cross_validate(doc: dict) -> list[str]:
    problems = []
    if doc["scenario"].get("schema_version") != SCHEMA_VERSION:
        problems.append(
            f"scenario.schema_version must be {SCHEMA_VERSION}, "
            f"got {doc['scenario'].get('schema_version')!r}"
        )
    for section in ("tx_array", "rx_array"):
        sec = doc[section]
        pattern = sec.get("pattern")
        if pattern == "sector":
            for key in ("peak_gain_dbi", "az_beamwidth_deg", "el_beamwidth_deg"):
                if key not in sec:
                    problems.append(f"{section}.{key} is required for a sector pattern")
        elif pattern == "dipole":
            if "peak_gain_dbi" not in sec:
                problems.append(f"{section}.peak_gain_dbi is required for a dipole pattern")
            for key in ("az_beamwidth_deg", "el_beamwidth_deg"):
                if key in sec:
                    problems.append(f"{section}.{key} is meaningless for a dipole pattern")
        elif pattern == "isotropic":
            for key in ("peak_gain_dbi", "az_beamwidth_deg", "el_beamwidth_deg"):
                if key in sec:
                    problems.append(f"{section}.{key} is meaningless for an isotropic pattern")
    prop = doc["propagation"]
    if len(prop.get("cluster_powers_db", ())) != len(prop.get("cluster_delays_ns", ())):
        problems.append(
            "propagation.cluster_powers_db and propagation.cluster_delays_ns "
            "must have the same length"
        )
    band = doc["band"]
    if "freq_lo_hz" in band and "freq_hi_hz" in band and not band["freq_lo_hz"] < band["freq_hi_hz"]:
        problems.append("band.freq_lo_hz must be below band.freq_hi_hz")
    if band.get("n_points", 2) < 2:
        problems.append("band.n_points must be at least 2")
    return problems


def format_scenario(doc: dict) -> str:
    """Canonical text form: schema section/key order, normalized values."""
    lines: list[str] = []
    for section, keys in _SCHEMA.items():
        lines.append(f"[{section}]")
        sec_doc = doc.get(section, {})
        for key, spec in keys.items():
            if key in sec_doc:
                lines.append(f"{key} = {_format_value(spec.kind, sec_doc[key])}")
        lines.append("")
    return "\n".join(lines)


def save_scenario(doc: dict, path) -> None:
    atomic_write_text(path, format_scenario(doc))


def read_scenario_document(path) -> dict:
    text = Path(path).read_text()
    return parse_scenario_text(text, source=str(path))


def _build_array(sec: dict, count_key: str, spacing_key: str):
    pattern_kind = sec["pattern"]
    if pattern_kind == "sector":
        pattern = SectorPattern(
            peak_gain_dbi=sec["peak_gain_dbi"],
            az_beamwidth_deg=sec["az_beamwidth_deg"],
            el_beamwidth_deg=sec["el_beamwidth_deg"],
            backlobe_db=sec["backlobe_db"],
        )
    elif pattern_kind == "dipole":
        pattern = DipolePattern(peak_gain_dbi=sec["peak_gain_dbi"])
    else:
        pattern = IsotropicPattern()
    pose = Pose.from_azimuth_tilt(
        np.array(sec["origin_m"]), sec["azimuth_deg"], sec["downtilt_deg"]
    )
    return linear_array(
        pose,
        n_positions=sec[count_key],
        spacing_m=sec[spacing_key],
        pattern=pattern,
        polarizations=sec["polarizations"],
    )


def build_scenario(doc: dict) -> Scenario:
    ris_sec = doc["ris"]
    panel = RisPanel(
        rows=ris_sec["rows"],
        cols=ris_sec["cols"],
        pitch_m=ris_sec["pitch_m"],
        pose=Pose.from_azimuth_tilt(
            np.array(ris_sec["origin_m"]), ris_sec["azimuth_deg"], ris_sec["downtilt_deg"]
        ),
        gamma_states=gamma_states_with_loss(ris_sec["state_loss_db"]),
        q=ris_sec["q"],
        design_band_hz=(ris_sec["design_f_lo_hz"], ris_sec["design_f_hi_hz"]),
    )
    prop = doc["propagation"]
    band_sec = doc["band"]
    return Scenario(
        tx_array=_build_array(doc["tx_array"], "n_columns", "column_spacing_m"),
        rx_array=_build_array(doc["rx_array"], "n_elements", "element_spacing_m"),
        ris=panel,
        direct=DirectPath(enabled=prop["direct_enabled"], blockage_db=prop["blockage_db"]),
        scatter=ScatterSpec(
            delays_s=tuple(d * 1e-9 for d in prop["cluster_delays_ns"]),
            powers_db=prop["cluster_powers_db"],
            seed=prop["seed"],
        ),
        band=Band(
            f_lo_hz=band_sec["freq_lo_hz"],
            f_hi_hz=band_sec["freq_hi_hz"],
            n_points=band_sec["n_points"],
            label=band_sec["label"],
        ),
        noise_psd_dbm_hz=doc["noise"]["psd_dbm_hz"],
    )


def build_swarm_config(doc: dict) -> SwarmConfig:
    pso_sec = doc["pso"]
    kwargs = dict(
        swarm_size=pso_sec["swarm_size"],
        iterations=pso_sec["iterations"],
        inertia=pso_sec["inertia"],
        cognitive=pso_sec["cognitive"],
        social=pso_sec["social"],
        stall_iterations=pso_sec["stall_iterations"],
        seed=pso_sec["seed"],
        r_bounds_m=tuple(pso_sec["r_bounds_m"]),
        theta_bounds_rad=tuple(math.radians(v) for v in pso_sec["theta_bounds_deg"]),
        phi_bounds_rad=tuple(math.radians(v) for v in pso_sec["phi_bounds_deg"]),
    )
    if "fitness_band_points" in pso_sec:
        kwargs["fitness_band_points"] = pso_sec["fitness_band_points"]
    try:
        return SwarmConfig(**kwargs)
    except ValueError as exc:
        raise SchemaError(f"[pso] section invalid: {exc}") from None


def load_scenario(path) -> Scenario:
    """Parse, validate and build the scene from a scenario file."""
    return build_scenario(read_scenario_document(path))


def load_swarm_config(path) -> SwarmConfig:
    """Swarm settings from the [pso] section of a scenario file."""
    return build_swarm_config(read_scenario_document(path))


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package (e.g. ``zone_a``, ``vlos``)."""
    from importlib.resources import files

    path = Path(str(files("rismimo").joinpath("data", f"{name}.scn")))
    if not path.exists():
        raise FileNotFoundError(f"no bundled scenario named {name!r}")
    return path
