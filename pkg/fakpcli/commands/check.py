# This code is part of fakp and is licensed under the MIT license.

import sys

import click

from fakpcli import FAKPCommandPlugin
from fakpcli.parameters import (
    EXPERIMENT_CONFIG, SET_OVERRIDES, SEED, resolve_experiment,
)
from fakpcli.utils import library_errors, print_duration, write


def format_check(result) -> str:
    status = "PASS" if result.passed else "FAIL"
    bound = "must exceed" if result.expect_above else "tolerance"
    return (f"{status}  {result.name:<45} max deviation "
            f"{result.max_deviation:.3e} ({bound} {result.tolerance:.1e})")


@click.command(
    'check',
    short_help="Run the numerical and symmetry property suite"
)
@EXPERIMENT_CONFIG.parameter(required=False, default=None,
                             help=EXPERIMENT_CONFIG.kwargs["help"])
@SET_OVERRIDES.parameter(multiple=True, help=SET_OVERRIDES.kwargs["help"])
@SEED.parameter(help=SEED.kwargs["help"])
@click.option('--trials', type=click.IntRange(min=1), default=100,
              show_default=True,
              help="Random inputs drawn per symmetry check.")
@click.option('--truncate-frames', is_flag=True, default=False,
              help=("Average over a single frame element only. This breaks "
                    "the symmetry and must make the suite fail."))
@print_duration
def check(config_path, overrides, seed, trials, truncate_frames):
    """Verify frame equivariance, exact invariance and equivariance of the
    frame-averaged networks for all five groups, the composed wrapper,
    finite-difference gradients, the neighbor search and convolution
    oracles, and the parameter census.

    The suite needs no dataset. Each check prints its largest observed
    deviation; the command exits with status 1 if any check fails.
    """
    from fakp.analysis import run_property_suite

    experiment = resolve_experiment(config_path, overrides, seed=seed)
    with library_errors():
        results = run_property_suite(
            seed=experiment.model.seed, trials=trials,
            truncate_frames=truncate_frames,
            progress=lambda result: write(format_check(result)),
        )

    failed = [r.name for r in results if not r.passed]
    if failed:
        click.secho(f"{len(failed)} of {len(results)} checks failed: "
                    + ", ".join(failed), err=True, fg='red')
        sys.exit(1)
    write(f"all {len(results)} checks passed")


PLUGIN = FAKPCommandPlugin(
    command=check,
    section="Verification",
    requires_fakp=(0, 1),
)

if __name__ == "__main__":
    check()
