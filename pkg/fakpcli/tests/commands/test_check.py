import pytest
from click.testing import CliRunner

from ..utils import assert_click_exit, assert_click_success
from fakp.analysis.property_checks import CheckResult
from fakpcli.commands.check import check, format_check


def test_format_check():
    line = format_check(CheckResult("invariance E(3)", 2.5e-13, 1e-9))
    assert line.startswith("PASS  invariance E(3)")
    assert line.endswith("max deviation 2.500e-13 (tolerance 1.0e-09)")
    control = format_check(CheckResult("control", 0.0, 1e-3,
                                       expect_above=True))
    assert control.startswith("FAIL")
    assert control.endswith("(must exceed 1.0e-03)")


def test_check_passes():
    runner = CliRunner()
    with runner.isolated_filesystem():
        result = runner.invoke(check, ["--trials", "2", "--seed", "0"])
        assert_click_success(result)
        assert "all 22 checks passed" in result.output
        assert "PASS  invariance E(3)" in result.output


@pytest.mark.slow
def test_check_passes_at_default_trials():
    runner = CliRunner()
    with runner.isolated_filesystem():
        result = runner.invoke(check, ["--seed", "0"])
        assert_click_success(result)
        assert "all 22 checks passed" in result.output


def test_truncated_frames_fail():
    runner = CliRunner()
    with runner.isolated_filesystem():
        result = runner.invoke(check, ["--trials", "5", "--truncate-frames"])
        assert_click_exit(result, 1)
        assert "FAIL  invariance E(3)" in result.output


def test_bad_trials():
    runner = CliRunner()
    result = runner.invoke(check, ["--trials", "0"])
    assert_click_exit(result, 2)
