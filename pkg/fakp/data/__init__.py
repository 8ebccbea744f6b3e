# This code is part of fakp and is licensed under the MIT license.
"""Synthetic datasets and point-cloud files."""

from .shapes import (
    SHAPE_KINDS,
    DatasetSpec,
    LabeledCloud,
    generate_shape,
    make_dataset,
    make_split,
    rotate_dataset,
    subset_per_class,
)
from .xyz import load_xyz, save_xyz
from .manifest import (
    ManifestEntry,
    load_manifest_dataset,
    read_manifest,
    save_split,
    write_manifest,
)
