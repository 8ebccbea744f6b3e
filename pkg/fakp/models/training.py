# This code is part of fakp and is licensed under the MIT license.
"""Training and evaluation loops."""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from tqdm.auto import tqdm

from fakp.data import LabeledCloud, rotate_dataset
from fakp.exceptions import EmptyDatasetError, IndexOutOfRangeError
from fakp.numgraph import SGDState, sgd_step, softmax_cross_entropy, stack
from .kpcnn import KPCNNMini, kpcnn_forward
from .kpcnn_settings import KPCNNMiniConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    loss: float
    """Mean training loss over the epoch's mini-batches."""
    accuracy: float


@dataclass(frozen=True)
class EvaluationResult:
    overall_accuracy: float
    n_samples: int
    n_correct: int


def _check_dataset(model: KPCNNMini, samples: Sequence[LabeledCloud]) -> None:
    if not samples:
        raise EmptyDatasetError("the dataset has no samples")
    num_classes = model.config.num_classes
    bad = [s.id for s in samples if not 0 <= s.label < num_classes]
    if bad:
        errmsg = (f"labels must lie in [0, {num_classes}); offending "
                  f"samples: {', '.join(bad[:5])}")
        raise IndexOutOfRangeError(errmsg)


def train(model: KPCNNMini, dataset: Iterable[LabeledCloud],
          config: Optional[KPCNNMiniConfig] = None,
          progress: Union[bool, Callable[[Iterable], Iterable]] = False,
          ) -> tuple[KPCNNMini, list[EpochMetrics]]:
    """Momentum SGD over seeded, shuffled mini-batches.

    Parameters
    ----------
    model : KPCNNMini
      updated in place and returned.
    dataset : iterable of LabeledCloud
    config : KPCNNMiniConfig, optional
      optimization settings (``lr``, ``momentum``, ``epochs``,
      ``batch_size``, ``seed``); defaults to the model's own config.
    progress : Union[bool, Callable[Iterable], Iterable]
      progress bar over epochs: if False, no progress bar will be shown. If
      True, use a tqdm progress bar. You can also provide a custom progress
      bar wrapper as a callable.

    Returns
    -------
    model, history
      the trained model and one :class:`EpochMetrics` per epoch.

    Raises
    ------
    EmptyDatasetError
      if ``dataset`` is empty.
    """
    config = config if config is not None else model.config
    samples = list(dataset)
    _check_dataset(model, samples)

    if progress is True:
        progress = functools.partial(tqdm, total=config.epochs, desc="epochs")
    elif progress is False:
        def progress(x): return x

    rng = np.random.default_rng(config.seed)
    state = SGDState()
    params = model.parameters()
    history = []
    logger.info("training %r on %d samples for %d epochs", model,
                len(samples), config.epochs)
    for epoch in progress(range(1, config.epochs + 1)):
        order = rng.permutation(len(samples))
        total_loss, correct = 0.0, 0
        for start in range(0, len(samples), config.batch_size):
            batch = [samples[i] for i in order[start:start + config.batch_size]]
            labels = np.array([s.label for s in batch])
            logits = stack([kpcnn_forward(model, s.cloud, training=True)
                            for s in batch])
            loss = softmax_cross_entropy(logits, labels)
            loss.backward()
            sgd_step(params, config.lr, config.momentum, state)
            total_loss += loss.item() * len(batch)
            correct += int((np.argmax(logits.data, axis=1) == labels).sum())
        metrics = EpochMetrics(epoch, total_loss / len(samples),
                               correct / len(samples))
        history.append(metrics)
        logger.info("epoch %d: loss %.4f, accuracy %.3f", epoch,
                    metrics.loss, metrics.accuracy)
    model.training = False
    return model, history


def predict(model: KPCNNMini, sample: LabeledCloud) -> int:
    logits = kpcnn_forward(model, sample.cloud, training=False)
    return int(np.argmax(logits.data))


def evaluate(model: KPCNNMini, dataset: Iterable[LabeledCloud],
             rotate: bool = False, seed: int = 0,
             transform_features: bool = True) -> EvaluationResult:
    """Overall accuracy, optionally on randomly rotated copies of the data.

    With ``rotate`` every sample gets a fresh seeded rotation about the
    origin, applied to the coordinates and (unless ``transform_features`` is
    false) to the features.
    """
    samples = list(dataset)
    _check_dataset(model, samples)
    if rotate:
        samples = rotate_dataset(samples, seed, transform_features)
    correct = sum(predict(model, s) == s.label for s in samples)
    return EvaluationResult(correct / len(samples), len(samples), correct)
