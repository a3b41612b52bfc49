"""
Unit tests for configuration loader and run configuration.
"""

import pytest
from pathlib import Path
import sys

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import EXECUTION_KEYS, RunConfig, config_hash, load_run_file, parse_override, resolve_run_config
from src.utils import ConfigLoader, configure_logging, get_logger
from src.utils.errors import ConfigError, ParameterValidationError


def test_config_loader_initialization():
    """Test that config loader initializes correctly."""
    config = ConfigLoader()
    assert config is not None
    assert config.config is not None


def test_get_model_config():
    """Test getting model defaults."""
    config = ConfigLoader()
    model = config.get_model_config()
    assert model is not None
    assert 'M' in model
    assert 'variant' in model


def test_get_preset():
    """Test getting a named preset."""
    config = ConfigLoader()
    assert config.get_preset('tiny') is not None
    assert config.get_preset('no-such-preset') is None
    assert config.get_preset('desk_del_grid')['variant'] == 'DEL_GRID'


def test_dot_notation_access():
    """Test accessing config with dot notation."""
    config = ConfigLoader()
    assert config.get('model.variant') is not None
    assert config.get('model.no_such_key', 'fallback') == 'fallback'


def test_custom_config_dir(temp_config_dir):
    config = ConfigLoader(str(temp_config_dir))
    assert config.get('run.trials') == 4
    assert config.get_preset('small') == {'trials': 3, 'n': 5}
    assert config.get_logging_config()['level'] == 'WARNING'


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        ConfigLoader(str(tmp_path))


def test_output_dir_env_wins(temp_config_dir, tmp_path, monkeypatch):
    monkeypatch.delenv('COXPERC_OUTPUT_DIR', raising=False)
    config = ConfigLoader(str(temp_config_dir))
    assert config.get_output_dir() == (tmp_path / 'results').as_posix()
    monkeypatch.setenv('COXPERC_OUTPUT_DIR', '/tmp/elsewhere')
    assert config.get_output_dir() == '/tmp/elsewhere'


def test_configure_logging(tmp_path):
    log_file = tmp_path / "logs" / "coxperc.log"
    logger = configure_logging({"level": "WARNING", "file": str(log_file), "format": "%(levelname)s|%(message)s"})
    assert logger.name == "coxperc"
    assert get_logger("src.cli.commands").name == "coxperc.src.cli.commands"
    with pytest.raises(ValueError):
        configure_logging({}, level="LOUD")


class TestResolve:
    def test_defaults_from_files(self, temp_config_dir):
        cfg = resolve_run_config(loader=ConfigLoader(str(temp_config_dir)))
        assert cfg.M == 1.0
        assert cfg.b == "1/5"
        assert cfg.n == 6
        assert cfg.trials == 4
        assert cfg.seed == 7

    def test_precedence(self, temp_config_dir, tmp_path):
        run_file = tmp_path / "run.yaml"
        run_file.write_text("n: 8\nseed: 11\nlambda: 0.25\n")
        cfg = resolve_run_config(
            config_path=run_file,
            overrides={"seed": "12", "lambda_": "0.5"},
            preset="small",
            loader=ConfigLoader(str(temp_config_dir)),
        )
        assert cfg.trials == 3  # preset
        assert cfg.n == 8  # run file beats preset
        assert cfg.seed == 12  # override beats run file
        assert cfg.lambda_ == 0.5

    def test_dashes_in_override_keys(self, temp_config_dir):
        cfg = resolve_run_config(
            overrides={"lambda-list": "[0.1, 0.2]", "n-list": "[5, 6]"},
            loader=ConfigLoader(str(temp_config_dir)),
        )
        assert cfg.lambda_list == [0.1, 0.2]
        assert cfg.n_list == [5, 6]

    def test_unknown_key(self, temp_config_dir):
        with pytest.raises(ConfigError) as err:
            resolve_run_config(overrides={"bogus": "1"}, loader=ConfigLoader(str(temp_config_dir)))
        assert "Unknown configuration key" in str(err.value)
        assert err.value.key == "bogus"

    def test_unknown_preset(self, temp_config_dir):
        with pytest.raises(ConfigError):
            resolve_run_config(preset="nope", loader=ConfigLoader(str(temp_config_dir)))

    def test_bad_value(self, temp_config_dir):
        with pytest.raises(ConfigError):
            resolve_run_config(overrides={"trials": "many"}, loader=ConfigLoader(str(temp_config_dir)))

    def test_nested_run_file_rejected(self, tmp_path):
        run_file = tmp_path / "run.yaml"
        run_file.write_text("model:\n  M: 5\n")
        with pytest.raises(ConfigError):
            load_run_file(run_file)

    def test_missing_run_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_file(tmp_path / "absent.yaml")


class TestRunConfig:
    def test_model_params(self):
        cfg = RunConfig(M=1.0, b="1/5", L=1.0)
        p = cfg.model_params(lam=0.3)
        assert p.inv_b == 5
        assert p.lam == 0.3

    def test_invalid_model_params(self):
        cfg = RunConfig(M=5.0, b="1/20", L=5.0)
        with pytest.raises(ParameterValidationError):
            cfg.model_params()

    def test_hash_ignores_execution_keys(self):
        a = RunConfig(threads=1, output_dir="a")
        b = RunConfig(threads=4, output_dir="b")
        assert a.digest() == b.digest()
        assert not set(EXECUTION_KEYS) & set(a.artifact_config())
        assert RunConfig(seed=1).digest() != a.digest()

    def test_hash_is_key_order_independent(self):
        assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})

    def test_resolved_spells_lambda(self):
        assert "lambda" in RunConfig().resolved()

    def test_unsupported_version(self):
        with pytest.raises(ValueError):
            RunConfig(config_version=2)

    def test_parse_override(self):
        assert parse_override("0.5") == 0.5
        assert parse_override("[1, 2]") == [1, 2]
        assert parse_override("1/21") == "1/21"
        assert parse_override(3) == 3


if __name__ == "__main__":
    pytest.main([__file__])
