# This code is part of fakp and is licensed under the MIT license.

from .experiment_options import (
    EXPERIMENT_CONFIG,
    SET_OVERRIDES,
    ExperimentConfig,
    resolve_experiment,
)
from .output_dir import OUTPUT_DIR
from .misc import SEED, GROUP, MODE, TRAIN_SIZES, ROTATE_TEST
