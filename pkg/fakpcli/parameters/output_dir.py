import pathlib

import click
from plugcli.params import Option


def get_dir(user_input, context):
    if user_input is None:
        return None
    return pathlib.Path(user_input)


OUTPUT_DIR = Option(
    "-o", "--out", "out",
    help=("Experiment directory; data goes to ``<out>/data``, results and "
          "checkpoints next to it. Created if missing."),
    getter=get_dir,
    type=click.Path(file_okay=False, resolve_path=True),
)
