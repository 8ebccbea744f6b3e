# This code is part of fakp and is licensed under the MIT license.

import pathlib

import click

from fakpcli import FAKPCommandPlugin
from fakpcli.parameters import (
    EXPERIMENT_CONFIG, SET_OVERRIDES, OUTPUT_DIR, SEED, resolve_experiment,
)
from fakpcli.parameters.experiment_options import ExperimentConfig
from fakpcli.utils import library_errors, log_to_stdout, print_duration, write


def write_dataset(experiment: ExperimentConfig) -> dict[str, pathlib.Path]:
    """Generate both splits under ``<out>/data`` and return their manifests.

    The experiment's canonical configuration is stored next to them.
    """
    from fakp.data import make_dataset, save_split

    train, test = make_dataset(experiment.dataset)
    manifests = {split: save_split(experiment.data_dir / split, samples)
                 for split, samples in (("train", train), ("test", test))}
    (experiment.data_dir / "config.txt").write_text(experiment.to_text())
    return manifests


@click.command(
    'gen',
    short_help="Generate the synthetic shape dataset as XYZ files"
)
@EXPERIMENT_CONFIG.parameter(required=False, default=None,
                             help=EXPERIMENT_CONFIG.kwargs["help"])
@SET_OVERRIDES.parameter(multiple=True, help=SET_OVERRIDES.kwargs["help"])
@SEED.parameter(help=SEED.kwargs["help"])
@OUTPUT_DIR.parameter(help=OUTPUT_DIR.kwargs["help"])
@print_duration
def gen(config_path, overrides, seed, out):
    """Write the balanced train and test splits of the synthetic shape
    benchmark.

    Every cloud is stored as ``<out>/data/<split>/<id>.xyz`` and listed in
    ``<out>/data/<split>/manifest.txt`` as ``id label path``. For a fixed
    seed the files are byte-identical across runs.
    """
    experiment = resolve_experiment(config_path, overrides, seed=seed,
                                    output_dir=OUTPUT_DIR.get(out))
    log_to_stdout()
    with library_errors():
        manifests = write_dataset(experiment)
    for split, manifest in manifests.items():
        write(f"{split}: {manifest}")


PLUGIN = FAKPCommandPlugin(
    command=gen,
    section="Data",
    requires_fakp=(0, 1),
)

if __name__ == "__main__":
    gen()
