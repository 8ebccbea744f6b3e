"""Helper utilities for CLI tests"""

import traceback

import click.testing


def _dump(result: click.testing.Result):  # -no-cov-
    print(result.output)
    if result.exc_info is not None:
        traceback.print_tb(result.exc_info[2])
        print(result.exc_info[0], result.exc_info[1])


def assert_click_exit(result: click.testing.Result, expected: int):
    """Check the exit status of a click invocation.

    On mismatch the command output and any traceback are printed, so a
    failing CLI test shows why the command ended the way it did.
    """
    if result.exit_code != expected:
        _dump(result)
    assert result.exit_code == expected


def assert_click_success(result: click.testing.Result):
    assert_click_exit(result, 0)
