import json
import math

import pytest

from tdamix.cli import main
from tdamix.config import ExperimentConfig, load_config_file, validate_config
from tdamix.errors import ConfigError


class TestValidateConfig:
    def test_empty_document_gives_defaults(self):
        cfg = validate_config({})
        assert cfg == ExperimentConfig()
        assert (cfg.M, cfg.s, cfg.runs, cfg.bandwidth) == (10000, 1000, 100, 0.00693)
        assert cfg.k_range == list(range(2, 11)) and cfg.g_range == list(range(1, 11))
        assert (cfg.torus_R, cfg.torus_r, cfg.max_scale) == (3.0, 2.0, 5.0)
        assert (cfg.t_min, cfg.t_max, cfg.grid_points, cfg.k_max) == (0.0, 5.0, 500, 1)
        assert cfg.eta_upper == math.pi

    def test_desk_preset(self):
        cfg = validate_config({}, "desk")
        assert (cfg.M, cfg.s, cfg.runs) == (2000, 200, 10)

    def test_explicit_values_beat_preset(self):
        assert validate_config({"M": 500, "s": 20}, "desk").M == 500

    def test_negative_s_named(self):
        with pytest.raises(ConfigError) as e:
            validate_config({"s": -1})
        assert any(p.startswith("s:") for p in e.value.problems)

    def test_s_above_m(self):
        with pytest.raises(ConfigError, match="s: must not exceed M"):
            validate_config({"M": 10, "s": 20})

    def test_k_range_list_accepted(self):
        assert validate_config({"k_range": [2, 3, 4]}).k_range == [2, 3, 4]

    def test_problems_are_itemized(self):
        with pytest.raises(ConfigError) as e:
            validate_config({"bogus": 1, "M": "many", "kernel": 3})
        keys = {p.split(":")[0] for p in e.value.problems}
        assert keys == {"bogus", "M", "kernel"}

    @pytest.mark.parametrize("raw", [{"runs": True}, {"seed": 1.5}, {"k_range": [2, "x"]}, {"k_range": 3},
                                     {"bandwidth": float("nan")}, {"h_grid": []}, {"k_range": [1, 2]},
                                     {"t_min": 5.0}, {"torus_r": 4.0}, {"kernel": "box"},
                                     {"landscape_dim": 2}, {"g_range": [0]}])
    def test_rejections(self, raw):
        with pytest.raises(ConfigError):
            validate_config(raw)

    def test_unknown_scale(self):
        with pytest.raises(ConfigError):
            validate_config({}, "huge")

    def test_echo_omits_output_dir(self):
        echo = validate_config({"output_dir": "x"}).echo()
        assert "output_dir" not in echo and echo["seed"] == 2021


class TestConfigFile:
    def test_key_value_document(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("M: 300\ns: 30\nk_range: [2, 3]\nkernel: tricube\n")
        cfg = validate_config(load_config_file(p))
        assert (cfg.M, cfg.s, cfg.k_range, cfg.kernel) == (300, 30, [2, 3], "tricube")

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.cfg"
        p.write_text("")
        assert load_config_file(p) == {}

    def test_manifest_config_block(self, tmp_path):
        p = tmp_path / "manifest.json"
        p.write_text(json.dumps({"config": {"M": 42}, "summary": {}}))
        assert load_config_file(p) == {"M": 42}

    @pytest.mark.parametrize("text", ["- 1\n- 2\n", "M: [unclosed\n"])
    def test_bad_documents(self, tmp_path, text):
        p = tmp_path / "bad.cfg"
        p.write_text(text)
        with pytest.raises(ConfigError):
            load_config_file(p)


class TestCli:
    def test_help(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["--help"])
        assert e.value.code == 0
        assert "--scale" in capsys.readouterr().out

    def test_invalid_config_exit_2_before_any_output(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("M: 10\ns: 20\n")
        out = tmp_path / "out"
        assert main(["--config", str(cfg), "--out", str(out)]) == 2
        assert "s: must not exceed M" in capsys.readouterr().err
        assert not out.exists()

    def test_missing_config_file(self, tmp_path):
        assert main(["--config", str(tmp_path / "nope.cfg")]) == 2

    def test_bad_workers(self, tmp_path):
        assert main(["--scale", "desk", "--workers", "0", "--out", str(tmp_path)]) == 2

    def test_bad_scale_rejected_by_argparse(self):
        with pytest.raises(SystemExit) as e:
            main(["--scale", "galactic"])
        assert e.value.code == 2
