import numpy as np
import pytest

from growcell import config as cfgmod
from growcell.snapshot import SnapshotError, read_snapshot, write_snapshot


SAMPLE = """
# growth-cell run
[run]
scenario = reactor
t_end_s = 120
output_every_s = 30

[scenario]
u0 = 0.045
t_wall_k = 298.15
diameter_mm = 10
channel_width_mm = 2

[model]
kappa_scale = 0.066
tau0_scale = 115
"""


class TestConfig:
    def test_parse_and_typed_access(self):
        cfg = cfgmod.parse(SAMPLE)
        assert cfg.get("run", "t_end_s") == 120.0
        assert cfg.get("scenario", "u0") == 0.045
        assert cfg.get("grid", "dt_s") is None  # auto
        scenario = cfg.to_scenario()
        assert scenario.diameter == 10.0
        assert scenario.tau0_scale == 115.0

    def test_canonical_round_trip_is_byte_identical(self):
        cfg = cfgmod.parse(SAMPLE)
        text1 = cfg.canonical_text()
        text2 = cfgmod.parse(text1).canonical_text()
        assert text1 == text2

    def test_unknown_key_rejected_with_line(self):
        bad = "[run]\nscenario = reactor\nwibble = 3\n"
        with pytest.raises(cfgmod.ConfigError, match=":3"):
            cfgmod.parse(bad)

    def test_unknown_section_rejected(self):
        with pytest.raises(cfgmod.ConfigError, match=r"\[stuff\]"):
            cfgmod.parse("[stuff]\nx = 1\n")

    def test_malformed_line(self):
        with pytest.raises(cfgmod.ConfigError, match="key = value"):
            cfgmod.parse("[run]\nscenario reactor\n")

    def test_bad_values_rejected(self):
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.parse("[run]\nt_end_s = -5\n")
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.parse("[run]\nscenario = warp\n")
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.parse("[scenario]\nbaffle_position = 7\n")
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.parse("[materials]\ndh_cryst_kj_mol = 4\n")

    def test_material_overrides_flow_through(self):
        cfg = cfgmod.parse("[materials]\nkappa_solid_mm2_s = 2.2\n")
        assert cfg.materials().kappa_solid == 2.2

    def test_box_config(self):
        cfg = cfgmod.parse("[run]\nscenario = adiabatic\n[grid]\nresolution = 40\n")
        box = cfg.to_box()
        assert box.resolution == 40
        assert box.c0 == pytest.approx(0.887e-3)


class TestSnapshot:
    def test_round_trip_bitwise(self, tmp_path):
        rng = np.random.default_rng(8)
        phi = rng.standard_normal((12, 9))
        vel = rng.standard_normal((2, 12, 9))
        path = tmp_path / "state.gcs"
        write_snapshot(path, {"phi": phi, "u": vel}, (12, 9), dx=0.1, time=42.5)
        meta, fields = read_snapshot(path)
        assert meta.extents == (12, 9)
        assert meta.dx == 0.1 and meta.time == 42.5
        assert meta.fields == [("phi", 1), ("u", 2)]
        assert np.array_equal(fields["phi"], phi)
        assert np.array_equal(fields["u"], vel)
        # bitwise: re-writing the read-back fields yields identical bytes
        path2 = tmp_path / "state2.gcs"
        write_snapshot(path2, fields, (12, 9), dx=0.1, time=42.5)
        assert path.read_bytes() == path2.read_bytes()

    def test_3d_round_trip(self, tmp_path):
        arr = np.arange(2 * 3 * 4, dtype=float).reshape(2, 3, 4)
        path = tmp_path / "vol.gcs"
        write_snapshot(path, {"T": arr}, (2, 3, 4), dx=0.2, time=0.0)
        _, fields = read_snapshot(path)
        assert np.array_equal(fields["T"], arr)

    def test_short_write_detected(self, tmp_path):
        phi = np.zeros((6, 6))
        path = tmp_path / "state.gcs"
        write_snapshot(path, {"phi": phi}, (6, 6), dx=0.1, time=0.0)
        blob = path.read_bytes()
        path.write_bytes(blob[:-16])
        with pytest.raises(SnapshotError, match="payload length"):
            read_snapshot(path)

    def test_shape_mismatch_rejected(self, tmp_path):
        with pytest.raises(SnapshotError, match="does not match"):
            write_snapshot(tmp_path / "x.gcs", {"phi": np.zeros((4, 4))},
                           (5, 5), dx=0.1, time=0.0)

    def test_not_a_snapshot(self, tmp_path):
        path = tmp_path / "junk.gcs"
        path.write_bytes(b"hello world\nend\n" + b"\x00" * 64)
        with pytest.raises(SnapshotError):
            read_snapshot(path)
