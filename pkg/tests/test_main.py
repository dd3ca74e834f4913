import logging

from click.testing import CliRunner

from flowreroute.main import cli


def test_help():
    """Simple test to cover the command group."""
    result = CliRunner(mix_stderr=False).invoke(cli, ["--help"])
    assert result.exit_code == 0
    for command in ("validate", "solve", "verify", "oracle", "gen-sat2", "gen-satdag", "gen-random", "decode"):
        assert command in result.stdout


def test_unknown_command_is_a_usage_error():
    result = CliRunner(mix_stderr=False).invoke(cli, ["reroute"])
    assert result.exit_code == 1
    assert "No such command" in result.stderr


def test_main_returns_exit_code_without_exiting(tmp_path):
    path = tmp_path / "instance.json"
    path.write_text("not json", encoding="utf-8")
    assert cli.main(["validate", str(path)], standalone_mode=False) == 2


def test_log_level_option(tmp_path):
    path = tmp_path / "instance.json"
    path.write_text("{}", encoding="utf-8")
    CliRunner(mix_stderr=False).invoke(cli, ["--log-level", "debug", "validate", str(path)])
    assert logging.getLogger().level == logging.DEBUG


def test_unknown_log_level_falls_back_to_warning(tmp_path):
    path = tmp_path / "instance.json"
    path.write_text("{}", encoding="utf-8")
    CliRunner(mix_stderr=False).invoke(cli, ["--log-level", "chatty", "validate", str(path)])
    assert logging.getLogger().level == logging.WARNING
