import pytest

from nsdt.config import default_config, load_config, resolve_seed
from nsdt.constants import DEFAULT_CONFIG, USAGE_EXIT_CODE
from nsdt.logger import logger
from nsdt.theme import DEFAULT_THEME, create_console, get_theme


def write(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text)
    return path


def test_missing_file_gives_defaults(tmp_path):
    config = load_config(tmp_path / "absent.yaml")
    assert config["numerics"] == DEFAULT_CONFIG["numerics"]
    assert config["tracer"]["rotate_charts"] is True
    assert set(config["theme"]) == set(DEFAULT_THEME)


def test_default_config_is_a_copy():
    config = default_config()
    config["numerics"]["probe_points"] = 1
    assert default_config()["numerics"]["probe_points"] == DEFAULT_CONFIG["numerics"]["probe_points"]


def test_partial_sections_are_merged(tmp_path):
    config = load_config(write(tmp_path, "tracer:\n  step_size: 0.01\nseed: 9\n"))
    assert config["tracer"]["step_size"] == 0.01
    assert config["tracer"]["max_steps"] == DEFAULT_CONFIG["tracer"]["max_steps"]
    assert config["numerics"] == DEFAULT_CONFIG["numerics"]
    assert config["seed"] == 9


def test_theme_overrides_keep_known_keys(tmp_path):
    config = load_config(write(tmp_path, "theme:\n  accent: red\n  unknown: blue\n"))
    assert config["theme"]["accent"] == "red"
    assert "unknown" not in config["theme"]
    assert get_theme(config)["error"] == DEFAULT_THEME["error"]
    create_console(config)


@pytest.mark.parametrize("text", [
    "numerics: [1, 2\n",
    "- just\n- a list\n",
    "tracer:\n  step_size: -0.1\n",
    "numerics:\n  probe_points: true\n",
    "numerics:\n  null_tolerance: 0.001\n",
    "report:\n  format: xml\n",
    "tracer: 3\n",
])
def test_invalid_config_exits_with_usage_code(tmp_path, text):
    with pytest.raises(SystemExit) as exc:
        load_config(write(tmp_path, text))
    assert exc.value.code == USAGE_EXIT_CODE


class TestSeedResolution:
    def test_config_value(self, monkeypatch):
        monkeypatch.delenv("NSDT_SEED", raising=False)
        assert resolve_seed({"seed": 5}) == 5

    def test_environment_beats_config(self, monkeypatch):
        monkeypatch.setenv("NSDT_SEED", "17")
        assert resolve_seed({"seed": 5}) == 17

    def test_flag_beats_environment(self, monkeypatch):
        monkeypatch.setenv("NSDT_SEED", "17")
        assert resolve_seed({"seed": 5}, 3) == 3

    def test_garbage_environment_warns_and_falls_back(self, monkeypatch):
        warnings = []
        monkeypatch.setattr(logger, "warning", lambda message, **kwargs: warnings.append(message))
        monkeypatch.setenv("NSDT_SEED", "lots")
        assert resolve_seed({"seed": 5}) == 5
        assert len(warnings) == 1
        assert "NSDT_SEED" in warnings[0] and "lots" in warnings[0]
