import pytest

from phstring.config import PRESETS, dump_config, parse_config, parse_config_text, preset
from phstring.engine import SimConfig
from phstring.errors import ConfigError, ParseError, ValidationError


class TestPresets:
    def test_main_preset_gains(self):
        cfg = preset("paper-fig1")
        assert (cfg.c1, cfg.c2, cfg.k) == (5.0, 30.0, 30.0)
        assert (cfg.n_cells, cfg.integrator, cfg.t_final) == (100, "rk4", 10.0)
        assert cfg.time_step == pytest.approx(0.5 * cfg.dz)
        assert cfg.feedback_source == "observer"

    def test_unknown(self):
        with pytest.raises(ConfigError):
            preset("nope")

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_round_trip(self, name):
        assert parse_config_text(dump_config(PRESETS[name])) == PRESETS[name]


class TestParse:
    def test_preset_file(self, tmp_path):
        path = tmp_path / "fig.toml"
        path.write_text(dump_config(preset("paper-fig1")))
        cfg = parse_config(path)
        assert (cfg.c1, cfg.c2, cfg.k) == (5.0, 30.0, 30.0)

    def test_overrides_on_preset(self):
        cfg = parse_config_text('preset = "paper-fig1"\n[sim]\nn_cells = 200\nsnapshots = [1, 2.5]\n')
        assert cfg.n_cells == 200 and cfg.snapshots == (1.0, 2.5)
        assert cfg.c2 == 30.0

    def test_negative_gain(self):
        with pytest.raises(ValidationError, match="c1 > 0"):
            parse_config_text("[controller]\nc1 = -1\n")

    def test_unknown_key(self):
        with pytest.raises(ParseError, match="c3"):
            parse_config_text("[controller]\nc3 = 1.0\n")

    def test_unknown_section(self):
        with pytest.raises(ParseError):
            parse_config_text("[solver]\ntol = 1.0\n")

    def test_syntax_error_reports_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_config_text("[sim]\nn_cells = = 3\n")

    @pytest.mark.parametrize("text", ["[sim]\nn_cells = 1.5\n", "[string]\nT = 'x'\n", "[sim]\nzoh = 1\n"])
    def test_wrong_types(self, text):
        with pytest.raises(ValidationError):
            parse_config_text(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="file not found"):
            parse_config(tmp_path / "missing.toml")

    def test_empty_file_gives_defaults(self):
        assert parse_config_text("") == SimConfig()
