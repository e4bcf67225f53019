from pathlib import Path

import numpy as np
import pytest

from ncbounds.config import ConfigError, parse_config

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = """
[geometry]
ula = "ula(8, centroid)"

[scenario]
mu = [[0.2, 0.4]]
N = 16
sigma2 = 0.1
"""

SWEEP_TAIL = """
[sweep]
axis = "delta_mu"
range = { start = 0.01, stop = 0.2, points = 5, scale = "log" }
outputs = ["crb", "nc_crb", "nc_gain"]
out = "out.csv"
"""


def write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestShippedConfigs:
    def test_snr_sweep_config(self):
        spec = parse_config(str(CONFIG_DIR / "rmse_vs_snr_2d.toml"))
        assert spec.geometry.mode_sizes == (4, 3)
        assert spec.scenario.n_sources == 3
        assert spec.scenario.n_modes == 2
        assert spec.scenario.corr[0, 1] == pytest.approx(0.9)
        assert spec.axis == "snr_db"
        assert spec.points == 21

    def test_all_shipped_configs_parse(self):
        for path in CONFIG_DIR.glob("*.toml"):
            parse_config(str(path))


class TestGeometryParsing:
    def test_modes_literal(self, tmp_path):
        spec = parse_config(write(tmp_path, """
[geometry]
modes = [[0, 1, 2, 3], [0, 1, 2]]

[scenario]
mu = [[0.2], [0.5]]
N = 8
sigma2 = 0.5
"""))
        assert spec.geometry.size == 12
        assert spec.ula_shorthand is None

    def test_ula_shorthand(self, tmp_path):
        spec = parse_config(write(tmp_path, MINIMAL))
        assert spec.ula_shorthand == (8, "centroid")
        assert np.allclose(spec.geometry.modes[0], np.arange(8) - 3.5)

    def test_bad_ula_string(self, tmp_path):
        bad = MINIMAL.replace('ula = "ula(8, centroid)"', 'ula = "ula(8, middle)"')
        with pytest.raises(ConfigError, match="geometry.ula"):
            parse_config(write(tmp_path, bad))

    def test_modes_and_ula_conflict(self, tmp_path):
        bad = MINIMAL.replace("[geometry]", "[geometry]\nmodes = [[0, 1]]")
        with pytest.raises(ConfigError, match="not both"):
            parse_config(write(tmp_path, bad))


class TestScenarioParsing:
    def test_defaults_resolved(self, tmp_path):
        spec = parse_config(write(tmp_path, MINIMAL))
        assert np.allclose(spec.scenario.phi, 0.0)
        assert np.allclose(spec.scenario.powers, 1.0)
        assert np.allclose(spec.scenario.corr, np.eye(2))
        assert spec.seed == 0
        text = spec.describe()
        assert "powers=[1.0, 1.0]" in text
        assert "seed: 0" in text

    def test_missing_noise_spec(self, tmp_path):
        bad = MINIMAL.replace("sigma2 = 0.1", "")
        with pytest.raises(ConfigError, match="snr_db.*sigma2|sigma2.*snr_db"):
            parse_config(write(tmp_path, bad))

    def test_both_noise_specs(self, tmp_path):
        bad = MINIMAL.replace("sigma2 = 0.1", "sigma2 = 0.1\nsnr_db = 10.0")
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config(write(tmp_path, bad))

    def test_snr_db_converts(self, tmp_path):
        cfg = MINIMAL.replace("sigma2 = 0.1", "snr_db = 10.0\npowers = [2.0, 4.0]")
        spec = parse_config(write(tmp_path, cfg))
        assert spec.scenario.sigma2 == pytest.approx(0.2)
        assert spec.snr_db == pytest.approx(10.0)

    def test_unknown_key_named(self, tmp_path):
        bad = MINIMAL.replace("N = 16", "N = 16\nsnapshots = 3")
        with pytest.raises(ConfigError, match="scenario.snapshots"):
            parse_config(write(tmp_path, bad))

    def test_mu_mode_mismatch(self, tmp_path):
        bad = MINIMAL.replace("mu = [[0.2, 0.4]]", "mu = [[0.2], [0.4]]")
        with pytest.raises(ConfigError, match="scenario.mu"):
            parse_config(write(tmp_path, bad))

    def test_corr_matrix_form(self, tmp_path):
        cfg = MINIMAL.replace("N = 16", "N = 16\ncorr = [[1.0, 0.5], [0.5, 1.0]]")
        spec = parse_config(write(tmp_path, cfg))
        assert spec.scenario.corr[0, 1] == pytest.approx(0.5)

    def test_invalid_corr_reported(self, tmp_path):
        cfg = MINIMAL.replace("N = 16", "N = 16\ncorr = 1.5")
        with pytest.raises(ConfigError, match="scenario"):
            parse_config(write(tmp_path, cfg))


class TestSweepParsing:
    def test_valid_sweep(self, tmp_path):
        spec = parse_config(write(tmp_path, MINIMAL + SWEEP_TAIL))
        assert spec.axis == "delta_mu"
        vals = spec.axis_values()
        assert len(vals) == 5
        assert vals[0] == pytest.approx(0.01)
        assert vals[-1] == pytest.approx(0.2)

    def test_single_point_rejected(self, tmp_path):
        bad = (MINIMAL + SWEEP_TAIL).replace("points = 5", "points = 1")
        with pytest.raises(ConfigError, match="points"):
            parse_config(write(tmp_path, bad))

    def test_unknown_axis(self, tmp_path):
        bad = (MINIMAL + SWEEP_TAIL).replace('axis = "delta_mu"', 'axis = "bandwidth"')
        with pytest.raises(ConfigError, match="sweep.axis"):
            parse_config(write(tmp_path, bad))

    def test_unknown_output(self, tmp_path):
        bad = (MINIMAL + SWEEP_TAIL).replace('"nc_gain"', '"esprit_rmse"')
        with pytest.raises(ConfigError, match="sweep.outputs"):
            parse_config(write(tmp_path, bad))

    def test_log_scale_needs_positive_start(self, tmp_path):
        bad = (MINIMAL + SWEEP_TAIL).replace("start = 0.01", "start = -0.1")
        with pytest.raises(ConfigError, match="positive start"):
            parse_config(write(tmp_path, bad))

    def test_delta_mu_needs_two_sources(self, tmp_path):
        bad = (MINIMAL + SWEEP_TAIL).replace("mu = [[0.2, 0.4]]", "mu = [[0.2, 0.4, 0.9]]")
        with pytest.raises(ConfigError, match="exactly 2 sources"):
            parse_config(write(tmp_path, bad))

    def test_sensors_axis_needs_shorthand(self, tmp_path):
        cfg = """
[geometry]
modes = [[0, 1, 2, 3]]

[scenario]
mu = [[0.2, 0.4]]
N = 16
sigma2 = 0.1

[sweep]
axis = "sensors"
range = { start = 4, stop = 10, points = 7 }
outputs = ["crb"]
out = "out.csv"
"""
        with pytest.raises(ConfigError, match="shorthand"):
            parse_config(write(tmp_path, cfg))

    def test_closed_forms_need_two_source_ula(self, tmp_path):
        cfg = """
[geometry]
modes = [[0, 1, 2, 3], [0, 1, 2]]

[scenario]
mu = [[0.25, 0.5, 0.75], [0.25, 0.5, 0.75]]
N = 20
sigma2 = 0.1

[sweep]
axis = "snr_db"
range = { start = 0, stop = 10, points = 3 }
outputs = ["nc_crb_closed"]
out = "out.csv"
"""
        with pytest.raises(ConfigError, match="2 sources"):
            parse_config(write(tmp_path, cfg))

    def test_sensors_axis_values_are_integers(self, tmp_path):
        cfg = MINIMAL + """
[sweep]
axis = "sensors"
range = { start = 5, stop = 30, points = 26 }
outputs = ["crb"]
out = "out.csv"
"""
        spec = parse_config(write(tmp_path, cfg))
        vals = spec.axis_values()
        assert vals.dtype.kind == "i"
        assert vals[0] == 5 and vals[-1] == 30


class TestParseErrors:
    def test_missing_file(self):
        with pytest.raises(ConfigError, match="not found"):
            parse_config("/nonexistent/cfg.toml")

    def test_syntax_error_has_location(self, tmp_path):
        with pytest.raises(ConfigError, match="line"):
            parse_config(write(tmp_path, "[geometry\nmodes = [[0, 1]]"))

    def test_unknown_top_level_table(self, tmp_path):
        with pytest.raises(ConfigError, match="config.extras"):
            parse_config(write(tmp_path, MINIMAL + "\n[extras]\nx = 1\n"))
