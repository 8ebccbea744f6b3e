# This code is part of fakp and is licensed under the MIT license.

import pathlib

import click
import pandas as pd

from fakpcli import FAKPCommandPlugin
from fakpcli.parameters import (
    EXPERIMENT_CONFIG, SET_OVERRIDES, OUTPUT_DIR, SEED, GROUP, MODE,
    TRAIN_SIZES, ROTATE_TEST, resolve_experiment,
)
from fakpcli.parameters.experiment_options import ExperimentConfig
from fakpcli.utils import (
    FAKPRuntimeError, library_errors, log_to_stdout, print_duration, write,
)

METRICS_COLUMNS = ["variant", "group", "mode", "train_size", "test_rotated",
                   "overall_accuracy", "epochs", "seed"]
CURVES_COLUMNS = ["variant", "train_size", "epoch", "loss", "accuracy"]


def _variants(experiment: ExperimentConfig):
    """``(name, WrapperSettings)`` of every model trained per train size."""
    from fakp.models import WrapperSettings

    variants = [("baseline", WrapperSettings())]
    if experiment.mode != 'none':
        variants.append(("fa", experiment.wrapper_settings()))
    return variants


def _load_split(experiment: ExperimentConfig, split: str):
    from fakp.data import load_manifest_dataset

    manifest = experiment.manifest(split)
    if not manifest.exists():
        errmsg = (f"no {split} manifest at '{manifest}'; run 'fakp gen' with "
                  "the same configuration first")
        raise FAKPRuntimeError(errmsg)
    return load_manifest_dataset(manifest, experiment.model.dimension)


def run_experiments(experiment: ExperimentConfig, progress=False
                    ) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Train and evaluate every variant at every train size.

    Checkpoints go to ``<out>/checkpoints/<variant>_<train_size>.fakp``.

    Returns
    -------
    metrics, curves : pd.DataFrame
      one row per (variant, train size, test rotation) and one row per
      (variant, train size, epoch).
    """
    from fakp.data import subset_per_class
    from fakp.models import build_model, evaluate, save_checkpoint, train

    train_set = _load_split(experiment, "train")
    test_set = _load_split(experiment, "test")
    config = experiment.model
    checkpoints = experiment.output_dir / "checkpoints"
    checkpoints.mkdir(parents=True, exist_ok=True)
    rotations = [False, True] if experiment.rotate_test else [False]

    metrics, curves = [], []
    for size in experiment.train_sizes:
        subset = subset_per_class(train_set, experiment.per_class(size))
        for variant, wrapper in _variants(experiment):
            write(f"training {variant} on {len(subset)} samples")
            model = build_model(config, wrapper)
            model, history = train(model, subset, progress=progress)
            save_checkpoint(checkpoints / f"{variant}_{size}.fakp", model)
            curves += [(variant, size, m.epoch, m.loss, m.accuracy)
                       for m in history]
            group = wrapper.group.tag if wrapper.is_wrapped else "none"
            for rotated in rotations:
                result = evaluate(model, test_set, rotate=rotated,
                                  seed=config.seed)
                metrics.append((variant, group, wrapper.mode, size,
                                int(rotated), result.overall_accuracy,
                                config.epochs, config.seed))
    return (pd.DataFrame(metrics, columns=METRICS_COLUMNS),
            pd.DataFrame(curves, columns=CURVES_COLUMNS))


@click.command(
    'train',
    short_help="Train and evaluate baseline and frame-averaged classifiers"
)
@EXPERIMENT_CONFIG.parameter(required=False, default=None,
                             help=EXPERIMENT_CONFIG.kwargs["help"])
@SET_OVERRIDES.parameter(multiple=True, help=SET_OVERRIDES.kwargs["help"])
@SEED.parameter(help=SEED.kwargs["help"])
@GROUP.parameter(help=GROUP.kwargs["help"])
@MODE.parameter(help=MODE.kwargs["help"])
@TRAIN_SIZES.parameter(help=TRAIN_SIZES.kwargs["help"])
@ROTATE_TEST.parameter(help=ROTATE_TEST.kwargs["help"])
@OUTPUT_DIR.parameter(help=OUTPUT_DIR.kwargs["help"])
@click.option('--progress/--no-progress', default=False,
              help="Show a progress bar over the epochs of every run.")
@print_duration
def train(config_path, overrides, seed, group, mode, train_sizes,
          rotate_test, out, progress):
    """Train the baseline and the frame-averaged model on growing subsets
    of the generated training split.

    For every train size and variant a model is trained from scratch with
    the same settings, checkpointed and evaluated on the original test split
    and, with ``--rotate-test 1``, on a randomly rotated copy of it. The
    results are written to ``<out>/metrics.csv`` (columns variant, group,
    mode, train_size, test_rotated, overall_accuracy, epochs, seed) and the
    per-epoch training curves to ``<out>/curves.csv``.

    The dataset must exist, see ``fakp gen``.
    """
    experiment = resolve_experiment(
        config_path, overrides, seed=seed, group=group, mode=mode,
        train_sizes=TRAIN_SIZES.get(train_sizes), rotate_test=rotate_test,
        output_dir=OUTPUT_DIR.get(out),
    )
    log_to_stdout()
    with library_errors():
        metrics, curves = run_experiments(experiment, progress)
        out_dir: pathlib.Path = experiment.output_dir
        metrics.to_csv(out_dir / "metrics.csv", index=False,
                       lineterminator="\n")
        curves.to_csv(out_dir / "curves.csv", index=False,
                      lineterminator="\n")
    write(f"wrote {len(metrics)} result rows to "
          f"'{experiment.output_dir / 'metrics.csv'}'")


PLUGIN = FAKPCommandPlugin(
    command=train,
    section="Experiments",
    requires_fakp=(0, 1),
)

if __name__ == "__main__":
    train()
