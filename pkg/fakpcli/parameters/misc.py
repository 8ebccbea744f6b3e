import click
from plugcli.params import Option

from fakpcli.clicktypes import GroupTag


def _passthrough(user_input, context):
    return user_input


def get_train_sizes(user_input, context):
    """``"60,150,300"`` -> ``[60, 150, 300]``; ``None`` stays unset."""
    if user_input is None:
        return None
    try:
        return [int(s) for s in user_input.split(",") if s.strip()]
    except ValueError:
        raise click.BadParameter(
            f"expected comma-separated integers, got '{user_input}'",
            param_hint="'--train-sizes'") from None


SEED = Option(
    "--seed",
    type=click.INT,
    help="Seed of the dataset streams, weight initialization and shuffling.",
    getter=_passthrough,
)

GROUP = Option(
    "--group",
    type=GroupTag(),
    help=("Group of the frame-averaged variant: ``t`` translations, ``so`` "
          "rotations, ``o`` rotations and reflections, ``se`` rigid motions, "
          "``e`` all isometries."),
    getter=_passthrough,
)

MODE = Option(
    "--mode",
    type=click.Choice(['none', 'invariant', 'equivariant', 'composed'],
                      case_sensitive=False),
    help=("How the frame-averaged variant is wrapped; ``none`` trains the "
          "baseline only."),
    getter=_passthrough,
)

TRAIN_SIZES = Option(
    "--train-sizes",
    help="Comma-separated total training sizes, ascending.",
    getter=get_train_sizes,
)

ROTATE_TEST = Option(
    "--rotate-test",
    type=click.Choice(['0', '1']),
    help="Also evaluate on randomly rotated test clouds (1) or not (0).",
    getter=_passthrough,
)
