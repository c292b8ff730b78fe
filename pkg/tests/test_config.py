import pytest

from slicepower import ScenarioConfig, Scheme, load_config, scheme_f_u_count
from slicepower.config import dump_config


class TestDefaults:
    def test_reference_setup(self):
        cfg = ScenarioConfig()
        assert cfg.f_count == 12 and cfg.m_count == 7
        assert cfg.slot_duration == 1e-3 and cfg.delta_f == 180e3
        assert cfg.n_e == 8640.0 and cfg.n_u == pytest.approx(2160.0 / 7.0)
        assert cfg.epsilon_u == 1e-5
        assert cfg.antenna_gain_db == 17.15 and cfg.carrier_hz == 2e9
        assert cfg.d0 == 10.0 and cfg.path_loss_exponent == 4.0
        assert cfg.cell_radius == 500.0 and cfg.noise_dbm == -108.0
        assert cfg.schemes == ("noma", "oma-3", "oma-6", "oma-9")

    def test_empty_file_reproduces_defaults(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("# nothing here\n")
        assert load_config(path) == ScenarioConfig()

    def test_derived_objects(self):
        cfg = ScenarioConfig()
        assert cfg.grid().T_m == pytest.approx(1e-3 / 7.0)
        assert cfg.traffic().epsilon_u == 1e-5
        assert cfg.geometry().cell_radius == 500.0


class TestParsing:
    def test_overrides_and_comments(self, tmp_path):
        path = tmp_path / "case.cfg"
        path.write_text(
            "drops = 10        # fewer drops\n"
            "d_u = 50, 100.5\n"
            "schemes = noma, oma-6\n"
            "epsilon_u = 1e-2\n"
            "auto_build_tables = true\n"
        )
        cfg = load_config(path)
        assert cfg.drops == 10
        assert cfg.d_u == (50.0, 100.5)
        assert cfg.schemes == ("noma", "oma-6")
        assert cfg.epsilon_u == 1e-2
        assert cfg.auto_build_tables is True

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("frequency_count = 12\n")
        with pytest.raises(ValueError, match="unknown key"):
            load_config(path)

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("drops 10\n")
        with pytest.raises(ValueError, match="key = value"):
            load_config(path)

    def test_bad_scheme_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("schemes = noma, tdma\n")
        with pytest.raises(ValueError, match="unknown scheme"):
            load_config(path)

    def test_bad_algorithm_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("algorithms = fea, simplex\n")
        with pytest.raises(ValueError, match="unknown algorithm"):
            load_config(path)

    def test_programmatic_overrides(self):
        cfg = load_config(None, overrides={"seed": 9, "drops": 3})
        assert cfg.seed == 9 and cfg.drops == 3

    def test_round_trip(self, tmp_path):
        cfg = load_config(None, overrides={"d_u": (25.0, 75.0), "drops": 42})
        path = tmp_path / "dump.cfg"
        path.write_text(dump_config(cfg))
        assert load_config(path) == cfg


class TestSchemeMapping:
    def test_noma_gets_full_band(self):
        assert scheme_f_u_count("noma", 12) == (Scheme.NOMA, 12)

    @pytest.mark.parametrize("label,count", [("oma-3", 3), ("oma-6", 6), ("oma-9", 9)])
    def test_oma_reservations(self, label, count):
        assert scheme_f_u_count(label, 12) == (Scheme.OMA, count)

    def test_oma_reservation_bounds(self):
        with pytest.raises(ValueError):
            scheme_f_u_count("oma-12", 12)
        with pytest.raises(ValueError):
            scheme_f_u_count("oma-0", 12)

    def test_unknown_label(self):
        with pytest.raises(ValueError):
            scheme_f_u_count("puncturing", 12)
