import pathlib

import click
import pytest

from fakp.geometry import GroupSpec
from fakpcli.parameters.experiment_options import (
    ExperimentConfig,
    parse_overrides,
    read_config_file,
    resolve_experiment,
)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "experiment.txt"
    path.write_text("# small run\nepochs=4\nseed=2\ngroup=so\n")
    return path


def test_defaults():
    experiment = resolve_experiment(None)
    assert experiment.group is GroupSpec.TRANSLATIONS_ROTATIONS_REFLECTIONS
    assert experiment.mode == 'invariant'
    assert experiment.train_sizes == [60, 150, 300]
    assert experiment.rotate_test
    assert experiment.model.num_classes == 6
    assert experiment.output_dir == pathlib.Path("fakp-output")


def test_config_file(config_file):
    experiment = resolve_experiment(str(config_file))
    assert experiment.model.epochs == 4
    assert experiment.group is GroupSpec.ROTATIONS


def test_precedence(config_file):
    experiment = resolve_experiment(str(config_file),
                                    ["epochs=5", "seed=7", "lr=0.5"],
                                    seed=9, group=None)
    assert experiment.model.epochs == 5
    assert experiment.model.lr == 0.5
    assert experiment.model.seed == experiment.dataset.seed == 9
    assert experiment.group is GroupSpec.ROTATIONS


def test_flags(tmp_path):
    experiment = resolve_experiment(
        None, group=GroupSpec.TRANSLATIONS, mode='equivariant',
        train_sizes=[6, 12], rotate_test='0', output_dir=tmp_path)
    assert experiment.group is GroupSpec.TRANSLATIONS
    assert experiment.mode == 'equivariant'
    assert experiment.train_sizes == [6, 12]
    assert not experiment.rotate_test
    assert experiment.manifest("train") == \
        tmp_path / "data" / "train" / "manifest.txt"


def test_yaml(tmp_path):
    path = tmp_path / "experiment.yaml"
    path.write_text("epochs: 3\nradii: [0.5, 1.0, 2.0]\nrotate_test: false\n")
    experiment = resolve_experiment(str(path))
    assert experiment.model.epochs == 3
    assert experiment.model.radii == [0.5, 1.0, 2.0]
    assert not experiment.rotate_test


def test_nested_yaml(tmp_path):
    path = tmp_path / "experiment.yml"
    path.write_text("model:\n  epochs: 3\n")
    with pytest.raises(click.BadParameter, match="nested section 'model'"):
        resolve_experiment(str(path))


def test_malformed_file(tmp_path):
    path = tmp_path / "experiment.txt"
    path.write_text("epochs=3\nlr 0.1\n")
    with pytest.raises(click.BadParameter, match="line 2"):
        resolve_experiment(str(path))


def test_empty_yaml(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert read_config_file(str(path)) == {}


def test_unknown_key():
    with pytest.warns(UserWarning, match="'learning_rate'"):
        resolve_experiment(None, ["learning_rate=0.1"])


def test_num_classes_follows_classes():
    experiment = resolve_experiment(None, ["classes=box,cone,plane",
                                           "train_sizes=3,30"])
    assert experiment.model.num_classes == 3
    assert experiment.per_class(30) == 10


@pytest.mark.parametrize('overrides,match', [
    (["train_sizes=150,60"], "strictly ascending"),
    (["train_sizes=61"], "split evenly"),
    (["train_sizes=60", "train_count=5"], "samples per class"),
    (["num_classes=4"], "does not match"),
    (["mode=composed", "group=se", "outer_group=t"], "intersect"),
    (["group=x"], "unknown group"),
    (["epochs=-1"], "epochs"),
])
def test_invalid(overrides, match):
    with pytest.raises(click.UsageError, match=match):
        resolve_experiment(None, overrides)


def test_composed():
    experiment = resolve_experiment(None, ["mode=composed", "group=o"])
    wrapper = experiment.wrapper_settings()
    assert wrapper.mode == 'composed'
    assert wrapper.outer_group is GroupSpec.TRANSLATIONS


def test_canonical_text():
    experiment = resolve_experiment(None, ["seed=4"])
    text = experiment.to_text()
    assert "seed=4\n" in text
    assert "group=e\n" in text
    assert "train_sizes=60,150,300\n" in text
    assert ExperimentConfig.from_flat(
        dict(line.split("=", 1) for line in text.splitlines())) == experiment


@pytest.mark.parametrize('items,expected', [
    ([], {}),
    (["a=1", "b = x=y", "a=2"], {"a": "2", "b": "x=y"}),
])
def test_parse_overrides(items, expected):
    assert parse_overrides(items) == expected


@pytest.mark.parametrize('item', ["epochs", "=3"])
def test_parse_overrides_errors(item):
    with pytest.raises(click.BadParameter, match="KEY=VALUE"):
        parse_overrides([item])
