import math

import numpy as np
import pytest

from rismimo import SchemaError, bundled_scenario_path, load_scenario, load_swarm_config, path_length
from rismimo.scenario import (
    build_scenario,
    format_scenario,
    parse_scenario_text,
    read_scenario_document,
    save_scenario,
)

MINIMAL = """
[scenario]
schema_version = 1

[tx_array]
origin_m = 0 50 10
azimuth_deg = -90
n_columns = 1
column_spacing_m = 0.05
pattern = isotropic
polarizations = v

[rx_array]
origin_m = 3 6 1.5
azimuth_deg = -110
n_elements = 1
element_spacing_m = 0.05
pattern = isotropic
polarizations = v

[ris]
origin_m = 0 0 1.5
azimuth_deg = 90

[propagation]

[band]
freq_lo_hz = 3.47e9
freq_hi_hz = 3.52e9
n_points = 5

[noise]

[pso]
"""


class TestBundledScenarios:
    def test_zone_a_tx_ris_distance(self):
        scn = load_scenario(bundled_scenario_path("zone_a"))
        d = path_length(scn.tx_array.pose.origin, scn.ris.pose.origin)
        assert abs(d - 175.0) < 1e-6
        assert scn.ris.rows == 32 and scn.ris.cols == 32
        assert scn.direct.blockage_db == 25.0
        assert scn.scatter.powers_db == (-15.0, -15.0, -15.0)
        assert scn.band.f_lo_hz == 3.59e9 and scn.band.f_hi_hz == 3.64e9

    def test_vlos_is_bounce_only(self):
        scn = load_scenario(bundled_scenario_path("vlos"))
        assert not scn.direct.enabled
        assert scn.scatter.n_clusters == 0

    def test_unknown_name_rejected(self):
        with pytest.raises(FileNotFoundError):
            bundled_scenario_path("nope")


class TestSchema:
    def test_minimal_defaults_applied(self):
        doc = parse_scenario_text(MINIMAL)
        assert doc["ris"]["rows"] == 32
        assert doc["ris"]["pitch_m"] == 0.03
        assert doc["propagation"]["direct_enabled"] is True
        assert doc["noise"]["psd_dbm_hz"] == -169.0
        assert doc["pso"]["swarm_size"] == 24
        scn = build_scenario(doc)
        assert scn.noise_psd_dbm_hz == -169.0

    def test_missing_band_section_named(self):
        text = MINIMAL.replace("[band]\nfreq_lo_hz = 3.47e9\nfreq_hi_hz = 3.52e9\nn_points = 5\n", "")
        with pytest.raises(SchemaError, match=r"\[band\]"):
            parse_scenario_text(text)

    def test_unknown_key_named(self):
        with pytest.raises(SchemaError, match="ris.colour"):
            parse_scenario_text(MINIMAL.replace("[ris]", "[ris]\ncolour = blue"))

    def test_unknown_section_named(self):
        with pytest.raises(SchemaError, match=r"\[amplifier\]"):
            parse_scenario_text(MINIMAL + "\n[amplifier]\ngain = 3\n")

    def test_all_failures_listed_at_once(self):
        text = MINIMAL.replace("freq_lo_hz = 3.47e9\n", "").replace(
            "[ris]", "[ris]\ncolour = blue"
        )
        with pytest.raises(SchemaError) as err:
            parse_scenario_text(text)
        message = str(err.value)
        assert "freq_lo_hz" in message and "colour" in message

    def test_sector_requires_beamwidths(self):
        text = MINIMAL.replace("pattern = isotropic\npolarizations = v\n\n[rx_array]",
                               "pattern = sector\npolarizations = v\n\n[rx_array]")
        with pytest.raises(SchemaError, match="az_beamwidth_deg"):
            parse_scenario_text(text)

    def test_cluster_length_mismatch(self):
        text = MINIMAL.replace(
            "[propagation]", "[propagation]\ncluster_powers_db = -15\ncluster_delays_ns = 10 20"
        )
        with pytest.raises(SchemaError, match="cluster"):
            parse_scenario_text(text)

    def test_wrong_schema_version(self):
        with pytest.raises(SchemaError, match="schema_version"):
            parse_scenario_text(MINIMAL.replace("schema_version = 1", "schema_version = 2"))

    def test_bad_value_diagnostics(self):
        with pytest.raises(SchemaError, match="band.n_points"):
            parse_scenario_text(MINIMAL.replace("n_points = 5", "n_points = many"))


class TestCanonicalForm:
    def test_save_load_idempotent(self, tmp_path):
        doc = parse_scenario_text(MINIMAL)
        p1 = tmp_path / "a.scn"
        save_scenario(doc, p1)
        doc2 = read_scenario_document(p1)
        assert doc2 == doc
        p2 = tmp_path / "b.scn"
        save_scenario(doc2, p2)
        assert p1.read_text() == p2.read_text()

    def test_bundled_files_are_canonical_stable(self, tmp_path):
        for name in ("zone_a", "vlos"):
            doc = read_scenario_document(bundled_scenario_path(name))
            out = tmp_path / f"{name}.scn"
            save_scenario(doc, out)
            assert read_scenario_document(out) == doc

    def test_format_orders_sections(self):
        text = format_scenario(parse_scenario_text(MINIMAL))
        order = [line for line in text.splitlines() if line.startswith("[")]
        assert order == [
            "[scenario]", "[tx_array]", "[rx_array]", "[ris]",
            "[propagation]", "[band]", "[noise]", "[pso]",
        ]


class TestSwarmConfigLoading:
    def test_bounds_converted_to_radians(self):
        cfg = load_swarm_config(bundled_scenario_path("zone_a"))
        assert cfg.swarm_size == 40
        assert abs(cfg.theta_bounds_rad[0] - math.radians(60.0)) < 1e-12
        assert abs(cfg.phi_bounds_rad[1] - math.pi) < 1e-12
        assert cfg.r_bounds_m == (2.0, 40.0)

    def test_invalid_pso_values_reported(self):
        with pytest.raises(SchemaError, match="pso"):
            parse_scenario_text(MINIMAL.replace("[pso]", "[pso]\nswarm_size = zero"))
