# This code is part of fakp and is licensed under the MIT license.
"""The miniature KP-CNN classifier, its training and checkpoints."""

from .kpcnn_settings import KPCNNMiniConfig, WrapperSettings
from .kpcnn import (
    KPCNNBlock,
    KPCNNMini,
    PyramidCache,
    build_model,
    count_parameters,
    kpcnn_forward,
)
from .training import EpochMetrics, EvaluationResult, evaluate, predict, train
from .checkpoint import (
    config_text,
    load_checkpoint,
    read_checkpoint,
    save_checkpoint,
)
