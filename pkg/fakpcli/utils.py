# This code is part of fakp and is licensed under the MIT license.

import contextlib
import functools
import logging
import sys
from datetime import datetime
from typing import Callable, Iterator, Optional

import click

from fakp.exceptions import FAKPError


class FAKPRuntimeError(click.ClickException):
    """A library or I/O error surfaced to the user; exits with status 3."""
    exit_code = 3


@contextlib.contextmanager
def library_errors() -> Iterator[None]:
    """Turn library and file-system errors into :class:`FAKPRuntimeError`."""
    try:
        yield
    except (FAKPError, OSError) as exc:
        raise FAKPRuntimeError(f"{type(exc).__name__}: {exc}") from exc


def write(string: str):
    """Print to the user.

    Abstracted so the output mechanism can change in one place for all
    commands.
    """
    click.echo(string)


def _should_configure_logger(logger: logging.Logger):
    """Determine whether a logger should be configured.

    Separated from configure_logger for ease of testing.
    """
    if isinstance(logger, logging.LoggerAdapter):
        logger = logger.logger

    if logger.hasHandlers():
        return False

    # walk up the tree while loggers defer to their parent
    current = logger
    while (
        current.parent is not None
        and current.level == logging.NOTSET
        and current.propagate
    ):
        current = current.parent

    return current == logging.root and current.level == logging.WARNING


def configure_logger(logger_name: str, level: int = logging.INFO, *,
                     handler: Optional[logging.Handler] = None):
    """Set ``logger_name`` to ``level`` unless the user configured logging.

    Parameters
    ----------
    logger_name: str
        name of the logger to configure
    level: int
        level to set the logger to use, typically one of the constants
        defined in the ``logging`` module.
    handler: logging.Handler, optional
        handler attached to the logger when it gets configured
    """
    logger = logging.getLogger(logger_name)

    if _should_configure_logger(logger):
        logger.setLevel(level)
        if handler is not None:
            logger.addHandler(handler)


def log_to_stdout(level: int = logging.INFO):
    """Show the library's progress messages on stdout."""
    configure_logger('fakp', level, handler=logging.StreamHandler(sys.stdout))


def print_duration(function: Callable) -> Callable:
    """Decorate a command so that it reports its wall-clock duration."""
    @functools.wraps(function)
    def wrapper(*args, **kwargs):
        start_time = datetime.now()

        result = function(*args, **kwargs)

        duration = datetime.now() - start_time
        write("\tDuration: " + str(duration) + "\n")
        return result

    return wrapper
