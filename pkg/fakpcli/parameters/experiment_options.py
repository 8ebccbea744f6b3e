# This code is part of fakp and is licensed under the MIT license.
"""Experiment configuration shared by the ``gen``, ``train`` and ``check``
commands.

A configuration is a flat set of keys read from a ``key=value`` text file
(or a flat YAML mapping), overridden by ``--set key=value`` and finally by
the dedicated command-line flags. Every key is routed to the model
settings, the dataset settings or the experiment itself.
"""
import pathlib
import warnings
from typing import Any, Mapping, Optional, Sequence

import click
try:
    from pydantic.v1 import validator, root_validator, ValidationError
except ImportError:
    from pydantic import validator, root_validator, ValidationError
from plugcli.params import Option
import yaml

from fakp.data import DatasetSpec
from fakp.exceptions import ParseError
from fakp.geometry import GroupSpec
from fakp.models import KPCNNMiniConfig, WrapperSettings
from fakp.models.kpcnn_settings import WrapperMode
from fakp.utils import (
    SettingsModel,
    format_value,
    parse_key_value_text,
    split_list,
    to_canonical_text,
)

MODEL_KEYS = set(KPCNNMiniConfig.__fields__)
DATASET_KEYS = set(DatasetSpec.__fields__)


class ExperimentConfig(SettingsModel):
    """Everything one run of the benchmark needs.

    ``seed`` seeds both the dataset and the model. ``num_classes`` follows
    the number of dataset classes unless given explicitly.
    """

    model: KPCNNMiniConfig = KPCNNMiniConfig()
    dataset: DatasetSpec = DatasetSpec()
    group: GroupSpec = GroupSpec.TRANSLATIONS_ROTATIONS_REFLECTIONS
    """Group of the frame-averaged variant; ignored when ``mode=none``."""
    mode: WrapperMode = 'invariant'
    outer_group: GroupSpec = GroupSpec.TRANSLATIONS
    """Invariance group added on top of ``group`` when ``mode=composed``."""
    train_sizes: list[int] = [60, 150, 300]
    """Total training samples per experiment, split evenly over classes."""
    rotate_test: bool = True
    """Also evaluate on randomly rotated copies of the test set."""
    output_dir: pathlib.Path = pathlib.Path("fakp-output")

    @validator('group', 'outer_group', pre=True)
    def group_from_tag(cls, v):
        if isinstance(v, str) and not isinstance(v, GroupSpec):
            return GroupSpec.from_tag(v)
        return v

    @validator('train_sizes')
    def ascending_sizes(cls, v):
        if not v:
            raise ValueError("train_sizes must not be empty")
        if any(size < 1 for size in v):
            errmsg = f"train_sizes must be positive, got {v}"
            raise ValueError(errmsg)
        if any(a >= b for a, b in zip(v, v[1:])):
            errmsg = f"train_sizes must be strictly ascending, got {v}"
            raise ValueError(errmsg)
        return v

    @root_validator(skip_on_failure=True)
    def consistent_experiment(cls, values):
        model, dataset = values['model'], values['dataset']
        n_classes = len(dataset.classes)
        if model.num_classes != n_classes:
            errmsg = (f"num_classes={model.num_classes} does not match the "
                      f"{n_classes} dataset classes")
            raise ValueError(errmsg)
        for size in values['train_sizes']:
            if size % n_classes:
                errmsg = (f"train size {size} cannot be split evenly over "
                          f"{n_classes} classes")
                raise ValueError(errmsg)
            if size // n_classes > dataset.train_count:
                errmsg = (f"train size {size} needs {size // n_classes} "
                          f"samples per class, the dataset has "
                          f"{dataset.train_count}")
                raise ValueError(errmsg)
        if values['mode'] == 'composed':
            # same rule as WrapperSettings, reported at configuration time
            WrapperSettings(mode='composed', group=values['group'],
                            outer_group=values['outer_group'])
        return values

    @classmethod
    def from_flat(cls, values: Mapping[str, str]) -> "ExperimentConfig":
        """Build from raw string values keyed by flat configuration keys.

        Unknown keys are ignored with a warning.
        """
        model_values: dict[str, str] = {}
        dataset_values: dict[str, str] = {}
        own: dict[str, Any] = {}
        own_keys = set(cls.__fields__) - {'model', 'dataset'}
        for key, raw in values.items():
            routed = False
            if key in MODEL_KEYS:
                model_values[key] = raw
                routed = True
            if key in DATASET_KEYS:
                dataset_values[key] = raw
                routed = True
            if key in own_keys:
                own[key] = split_list(raw) if key == 'train_sizes' else raw
                routed = True
            if not routed:
                warnings.warn(f"Ignoring unknown configuration key: '{key}'")

        dataset = DatasetSpec.from_text_values(dataset_values)
        model_values.setdefault('num_classes', str(len(dataset.classes)))
        model = KPCNNMiniConfig.from_text_values(model_values)
        return cls(model=model, dataset=dataset, **own)

    def as_text_values(self) -> dict[str, Any]:
        values = {**self.dataset.as_text_values(), **self.model.as_text_values()}
        values.update(group=self.group, mode=self.mode,
                      outer_group=self.outer_group,
                      train_sizes=self.train_sizes,
                      rotate_test=self.rotate_test,
                      output_dir=str(self.output_dir))
        return values

    def to_text(self) -> str:
        return to_canonical_text(self.as_text_values())

    def wrapper_settings(self) -> WrapperSettings:
        """Wrapper of the frame-averaged variant."""
        return WrapperSettings(mode=self.mode, group=self.group,
                               outer_group=self.outer_group)

    def per_class(self, train_size: int) -> int:
        return train_size // len(self.dataset.classes)

    @property
    def data_dir(self) -> pathlib.Path:
        return self.output_dir / "data"

    def manifest(self, split: str) -> pathlib.Path:
        return self.data_dir / split / "manifest.txt"


def read_config_file(path: Optional[str]) -> dict[str, str]:
    """Flat raw values of a ``key=value`` or YAML configuration file.

    Raises
    ------
    ParseError
      for a malformed line, or YAML that is not a flat mapping.
    """
    if path is None:
        return {}
    path = pathlib.Path(path)
    text = path.read_text()
    if path.suffix.lower() not in (".yaml", ".yml"):
        return parse_key_value_text(text)

    raw = yaml.safe_load(text)
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ParseError("a YAML configuration must be a mapping", 1)
    flat = {}
    for key, value in raw.items():
        if isinstance(value, dict):
            errmsg = f"nested section '{key}' is not supported"
            raise ParseError(errmsg, 1)
        flat[str(key)] = format_value(value)
    return flat


def parse_overrides(items: Sequence[str]) -> dict[str, str]:
    """``--set key=value`` items, later ones winning."""
    overrides = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise click.BadParameter(f"expected KEY=VALUE, got '{item}'",
                                     param_hint="'--set'")
        overrides[key.strip()] = value.strip()
    return overrides


def resolve_experiment(config_path: Optional[str],
                       overrides: Sequence[str] = (),
                       **flags: Any) -> ExperimentConfig:
    """Merge defaults, the config file, ``--set`` overrides and flags.

    Flags left at ``None`` are not applied. Invalid configurations are
    reported as usage errors.
    """
    try:
        values = read_config_file(config_path)
    except ParseError as exc:
        raise click.BadParameter(str(exc), param_hint="'--config'")
    values.update(parse_overrides(overrides))
    values.update({key: format_value(value) for key, value in flags.items()
                   if value is not None})
    try:
        return ExperimentConfig.from_flat(values)
    except (ValidationError, ValueError) as exc:
        raise click.UsageError(f"invalid configuration:\n{exc}")


def get_config_path(user_input, context):
    return user_input


EXPERIMENT_CONFIG = Option(
    "-c", "--config", "config_path",
    type=click.Path(exists=True, dir_okay=False),
    help=("Experiment configuration, either ``key=value`` lines or a flat "
          "YAML mapping (``.yaml``/``.yml``). Keys are the model, dataset and "
          "experiment settings, e.g. ``epochs=20`` or "
          "``train_sizes=60,150,300``."),
    getter=get_config_path,
)

SET_OVERRIDES = Option(
    "--set", "overrides",
    multiple=True,
    metavar="KEY=VALUE",
    help=("Override one configuration key; may be repeated. Applied after "
          "the configuration file and before the dedicated flags."),
    getter=parse_overrides,
)
