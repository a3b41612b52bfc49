"""
Tests for the command front end: dispatch, artifacts, run log and plots.
"""

import pytest
from pathlib import Path
import sys

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analysis import THETA_COLUMNS, read_table, write_theta_table
from src.cli import EXIT_CONFIG, EXIT_OK, RUN_LOG_NAME, emit_plot, execute, read_records
from src.cli import config as cli_config
from src.cli import main as cli_main
from src.cli.main import main, parse_command_line, parse_overrides
from src.utils import ConfigLoader
from src.utils.errors import BadHeaderError


@pytest.fixture
def loader(temp_config_dir, monkeypatch):
    """Point the global configuration at the temporary config directory."""
    monkeypatch.delenv('COXPERC_OUTPUT_DIR', raising=False)
    instance = ConfigLoader(str(temp_config_dir))
    monkeypatch.setattr(cli_config, 'get_config', lambda: instance)
    monkeypatch.setattr(cli_main, 'get_config', lambda: instance)
    return instance


def run(command, out_dir, argument=None, **overrides):
    overrides = {key: str(value) for key, value in overrides.items()}
    overrides['output_dir'] = str(out_dir)
    return execute(command, overrides=overrides, argument=argument)


class TestParsing:
    def test_parse_overrides(self):
        pairs = parse_overrides(["--n", "10", "--lambda=0.3", "--lambda-list", "[0.1, 0.2]"])
        assert pairs == {"n": "10", "lambda": "0.3", "lambda_list": "[0.1, 0.2]"}

    def test_parse_overrides_missing_value(self):
        with pytest.raises(ValueError):
            parse_overrides(["--n"])
        with pytest.raises(ValueError):
            parse_overrides(["n", "10"])

    def test_kind_and_front_end_options(self):
        args, overrides = parse_command_line(["verify", "osss", "--n", "8", "--threads", "2", "--preset", "tiny"])
        assert args.command == "verify"
        assert args.kind == "osss"
        assert args.preset == "tiny"
        assert args.threads == 2
        assert overrides == {"n": "8", "threads": "2"}

    def test_override_value_is_not_the_kind(self):
        args, overrides = parse_command_line(["theta", "--lambda", "0.4"])
        assert args.kind is None
        assert overrides == {"lambda": "0.4"}


class TestExecute:
    def test_theta_at_zero_level(self, loader, tmp_path):
        out = tmp_path / "out"
        assert run("theta", out, **{"lambda": 0.0}) == EXIT_OK
        header, frame = read_table(out / "theta.csv", THETA_COLUMNS)
        assert header["command"] == "theta"
        assert len(header["config_hash"]) == 64
        assert frame["theta"].tolist() == [0.0]
        assert frame["trials"].tolist() == [4]

    def test_run_log_record(self, loader, tmp_path):
        out = tmp_path / "out"
        run("theta", out, **{"lambda": 0.0})
        records = read_records(out)
        assert len(records) == 1
        record = records[0]
        assert record.command == "theta"
        assert record.status == EXIT_OK
        assert record.outputs == ["theta.csv"]
        assert record.seed == 7
        assert record.config["lambda"] == 0.0

    def test_failed_runs_are_logged(self, loader, tmp_path):
        out = tmp_path / "out"
        assert run("theta", out, b="1/3") == EXIT_CONFIG
        records = read_records(out)
        assert [r.status for r in records] == [EXIT_CONFIG]
        assert records[0].outputs == []

    def test_unknown_key(self, loader, tmp_path):
        assert run("theta", tmp_path / "out", bogus=1) == EXIT_CONFIG
        assert not (tmp_path / "out" / RUN_LOG_NAME).exists()

    def test_unknown_command(self, loader, tmp_path):
        assert run("fly", tmp_path / "out") == EXIT_CONFIG

    def test_verify_needs_known_kind(self, loader, tmp_path):
        assert run("verify", tmp_path / "out") == EXIT_CONFIG
        assert run("verify", tmp_path / "out", argument="nonsense") == EXIT_CONFIG

    def test_sweep_needs_levels(self, loader, tmp_path):
        assert run("sweep", tmp_path / "out") == EXIT_CONFIG

    def test_artifacts_do_not_depend_on_threads(self, loader, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("sweep", a, threads=1, lambda_list="[0.5, 2.0]") == EXIT_OK
        assert run("sweep", b, threads=2, lambda_list="[0.5, 2.0]") == EXIT_OK
        assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()

    def test_verify_writes_report(self, loader, tmp_path):
        out = tmp_path / "out"
        assert run("verify", out, argument="efron-stein", trials=2, blocks="[[0, 0]]", **{"lambda": 0.0}) == EXIT_OK
        text = (out / "verify_efron_stein.yaml").read_text()
        assert text.startswith("# command=verify EFRON_STEIN")
        assert "PASS" in text


class TestPlots:
    def test_empty_table(self, tmp_path):
        table = write_theta_table([], tmp_path / "empty.csv")
        svg = emit_plot(table, "theta_vs_lambda", tmp_path / "empty.svg")
        assert svg.read_text().lstrip().startswith("<?xml")

    def test_plot_is_reproducible(self, loader, tmp_path):
        out = tmp_path / "out"
        run("sweep", out, lambda_list="[0.0, 1.0]")
        first = emit_plot(out / "sweep.csv", "theta_vs_lambda", tmp_path / "one.svg")
        second = emit_plot(out / "sweep.csv", "theta_vs_lambda", tmp_path / "two.svg")
        assert first.read_bytes() == second.read_bytes()

    def test_plot_command(self, loader, tmp_path):
        out = tmp_path / "out"
        run("sweep", out, lambda_list="[0.0, 1.0]")
        table = (out / "sweep.csv").as_posix()
        assert run("plot", out, argument="theta_vs_n_log", table=table) == EXIT_OK
        assert (out / "theta_vs_n_log.svg").exists()

    def test_unknown_plot_kind(self, loader, tmp_path):
        out = tmp_path / "out"
        assert run("plot", out, argument="pie", table=(tmp_path / "t.csv").as_posix()) == EXIT_CONFIG

    def test_wrong_table_for_kind(self, tmp_path):
        table = write_theta_table([], tmp_path / "theta.csv")
        with pytest.raises(BadHeaderError):
            emit_plot(table, "revealment_map", tmp_path / "map.svg")


class TestMain:
    def test_bad_arguments(self, loader):
        assert main(["no-such-command"]) == EXIT_CONFIG

    def test_bad_log_level(self, loader, tmp_path):
        assert main(["theta", "--output-dir", str(tmp_path), "--log-level", "LOUD"]) == EXIT_CONFIG

    def test_runs_command(self, loader, tmp_path):
        out = tmp_path / "out"
        code = main(["theta", "--lambda", "0", "--output-dir", str(out), "--log-level", "WARNING"])
        assert code == EXIT_OK
        assert (out / "theta.csv").exists()


if __name__ == "__main__":
    pytest.main([__file__])
