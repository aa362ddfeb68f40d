import pytest

from tracebound.config import DEFAULT_CONFIG_PATH, SEED_ENV_VAR, TraceboundConfig, load_config, resolve_seed
from tracebound.errors import ConfigError


def test_repo_config_matches_defaults():
    assert DEFAULT_CONFIG_PATH.exists()
    assert load_config() == TraceboundConfig()


def test_partial_config_overrides(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("tracebound:\n  slack: 1.0e-6\n  r_values: [1, 2, 3]\n")
    cfg = load_config(path)
    assert cfg.slack == 1e-6
    assert cfg.r_values == (1, 2, 3)
    assert cfg.max_order == 512


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert load_config(path) == TraceboundConfig()


@pytest.mark.parametrize(
    "text",
    [
        "tracebound:\n  tolerance: 1\n",
        "tracebound:\n  normal_tol: 0\n",
        "tracebound:\n  r_values: [0]\n",
        "tracebound: [1, 2]\n",
        "tracebound: {slack: [\n",
    ],
)
def test_bad_configs(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_explicit_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_seed_resolution(monkeypatch):
    cfg = TraceboundConfig(seed=5)
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    assert resolve_seed(None, cfg) == 5
    monkeypatch.setenv(SEED_ENV_VAR, "17")
    assert resolve_seed(None, cfg) == 17
    assert resolve_seed(3, cfg) == 3
    monkeypatch.setenv(SEED_ENV_VAR, "seventeen")
    with pytest.raises(ConfigError):
        resolve_seed(None, cfg)
