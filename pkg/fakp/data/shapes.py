# This code is part of fakp and is licensed under the MIT license.
"""Synthetic shape classification datasets.

Every cloud is sampled on the surface of a unit-sized shape, stretched by
three distinct per-axis factors and perturbed with Gaussian noise. The
distinct factors keep the covariance spectrum generic, so every cloud has a
well-defined frame.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

try:
    from pydantic.v1 import validator
except ImportError:  # -no-cov-
    from pydantic import validator

from fakp.exceptions import BadShapeKindError, DegenerateCloudError
from fakp.frames import covariance, relative_gap, sym_eig
from fakp.geometry import GroupSpec, PointCloud, random_transform
from fakp.utils import SettingsModel

logger = logging.getLogger(__name__)

ShapeKind = Literal["sphere", "box", "torus", "cylinder", "cone", "plane"]
SHAPE_KINDS: tuple[str, ...] = ("sphere", "box", "torus", "cylinder", "cone",
                                "plane")
SPLITS = ("train", "test")

MIN_POINTS = 16
MIN_EIGEN_GAP = 1e-3
MAX_ATTEMPTS = 10
# pairwise relative separation of the per-axis scale factors
MIN_SCALE_SEPARATION = 1e-2
MIN_ANISOTROPY_SPAN = 0.05


class DatasetSpec(SettingsModel):
    """Settings of a synthetic shape dataset."""

    classes: list[ShapeKind] = list(SHAPE_KINDS)
    """Shape kinds, one class each; the label is the position in this list."""
    points_per_cloud: int = 256
    noise_std: float = 0.01
    """Standard deviation of the Gaussian noise added to every coordinate."""
    anisotropy_range: tuple[float, float] = (0.6, 1.4)
    """Per-axis scale factors are drawn uniformly from this range."""
    seed: int = 0
    train_count: int = 50
    """Training samples per class."""
    test_count: int = 50
    """Test samples per class."""

    @validator('classes')
    def distinct_classes(cls, v):
        if not v:
            raise ValueError("at least one shape class is required")
        if len(set(v)) != len(v):
            errmsg = f"shape classes must be distinct, got {v}"
            raise ValueError(errmsg)
        return v

    @validator('points_per_cloud')
    def enough_points(cls, v):
        if v < MIN_POINTS:
            errmsg = f"points_per_cloud must be at least {MIN_POINTS}, got {v}"
            raise ValueError(errmsg)
        return v

    @validator('noise_std')
    def non_negative_noise(cls, v):
        if v < 0:
            errmsg = f"noise_std must be zero or positive, got {v}"
            raise ValueError(errmsg)
        return v

    @validator('anisotropy_range')
    def generic_anisotropy(cls, v):
        check_anisotropy_range(v)
        return v

    @validator('train_count', 'test_count')
    def positive_count(cls, v):
        if v < 1:
            errmsg = f"per-class sample counts must be at least 1, got {v}"
            raise ValueError(errmsg)
        return v


def check_anisotropy_range(anisotropy_range: Sequence[float]) -> None:
    lo, hi = anisotropy_range
    if lo <= 0 or lo >= hi:
        errmsg = (f"anisotropy_range must satisfy 0 < min < max, got "
                  f"{tuple(anisotropy_range)}")
        raise ValueError(errmsg)
    if hi - lo < MIN_ANISOTROPY_SPAN * hi:
        errmsg = (f"anisotropy_range {tuple(anisotropy_range)} is too narrow "
                  "to draw distinct per-axis scales")
        raise ValueError(errmsg)


@dataclass(frozen=True)
class LabeledCloud:
    cloud: PointCloud
    label: int
    id: str


def _unit_vectors(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _sphere(rng, n):
    return 0.5 * _unit_vectors(rng, n)


def _box(rng, n):
    pts = rng.uniform(-0.5, 0.5, size=(n, 3))
    axis = rng.integers(0, 3, size=n)
    side = rng.choice((-0.5, 0.5), size=n)
    pts[np.arange(n), axis] = side
    return pts


def _torus(rng, n, major=0.35, minor=0.15):
    u = rng.uniform(0.0, 2.0 * np.pi, size=n)
    v = rng.uniform(0.0, 2.0 * np.pi, size=n)
    ring = major + minor * np.cos(v)
    return np.stack([ring * np.cos(u), ring * np.sin(u), minor * np.sin(v)],
                    axis=1)


def _cylinder(rng, n, radius=0.35, height=1.0):
    lateral = 2.0 * np.pi * radius * height
    caps = 2.0 * np.pi * radius ** 2
    on_side = rng.random(n) < lateral / (lateral + caps)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    rho = np.where(on_side, radius, radius * np.sqrt(rng.random(n)))
    z = np.where(on_side, rng.uniform(-height / 2, height / 2, size=n),
                 rng.choice((-height / 2, height / 2), size=n))
    return np.stack([rho * np.cos(theta), rho * np.sin(theta), z], axis=1)


def _cone(rng, n, radius=0.4, height=1.0):
    # area-uniform along the slant
    s = np.sqrt(rng.random(n))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    rho = radius * s
    z = height / 2 - height * s
    return np.stack([rho * np.cos(theta), rho * np.sin(theta), z], axis=1)


def _plane(rng, n):
    xy = rng.uniform(-0.5, 0.5, size=(n, 2))
    return np.hstack([xy, np.zeros((n, 1))])


_SAMPLERS = {
    "sphere": _sphere,
    "box": _box,
    "torus": _torus,
    "cylinder": _cylinder,
    "cone": _cone,
    "plane": _plane,
}


def _axis_scales(rng, anisotropy_range) -> np.ndarray:
    lo, hi = anisotropy_range
    while True:
        scales = rng.uniform(lo, hi, size=3)
        gaps = np.abs(scales[:, None] - scales[None, :])[np.triu_indices(3, 1)]
        if gaps.min() >= MIN_SCALE_SEPARATION * scales.max():
            return scales


def generate_shape(kind: str, n: int, rng: np.random.Generator,
                   noise_std: float = 0.01,
                   anisotropy_range: Sequence[float] = (0.6, 1.4)) -> PointCloud:
    """Sample ``n`` noisy points on the surface of an anisotropic shape.

    Features are the ones-vector in R^3. Clouds whose covariance eigenvalues
    are closer than a relative gap of 1e-3 are redrawn.

    Raises
    ------
    BadShapeKindError
      for an unknown ``kind``.
    DegenerateCloudError
      if 10 draws in a row were degenerate.
    """
    if kind not in _SAMPLERS:
        errmsg = (f"unknown shape kind '{kind}', expected one of: "
                  f"{', '.join(SHAPE_KINDS)}")
        raise BadShapeKindError(errmsg)
    if n < MIN_POINTS:
        raise ValueError(f"shapes need at least {MIN_POINTS} points, got {n}")
    check_anisotropy_range(anisotropy_range)

    gap = 0.0
    for attempt in range(MAX_ATTEMPTS):
        X = _SAMPLERS[kind](rng, n) * _axis_scales(rng, anisotropy_range)
        if noise_std > 0:
            X = X + rng.normal(0.0, noise_std, size=X.shape)
        gap = relative_gap(sym_eig(covariance(X)).eigenvalues)
        if gap >= MIN_EIGEN_GAP:
            return PointCloud.from_arrays(X, np.ones((n, 3)))
        logger.debug("redrawing degenerate %s (attempt %d, gap %.3g)", kind,
                     attempt + 1, gap)
    errmsg = (f"could not draw a generic {kind} in {MAX_ATTEMPTS} attempts "
              f"(last relative eigenvalue gap {gap:.3g})")
    raise DegenerateCloudError(errmsg)


def sample_rng(seed: int, split: int, label: int, index: int
               ) -> np.random.Generator:
    """Independent stream of one sample."""
    return np.random.default_rng(np.random.SeedSequence([seed, split, label,
                                                         index]))


def make_split(spec: DatasetSpec, split: str) -> list[LabeledCloud]:
    split_index = SPLITS.index(split)
    count = spec.train_count if split == "train" else spec.test_count
    samples = []
    # index-major so the first k samples of every class form a prefix
    for i in range(count):
        for label, kind in enumerate(spec.classes):
            rng = sample_rng(spec.seed, split_index, label, i)
            cloud = generate_shape(kind, spec.points_per_cloud, rng,
                                   spec.noise_std, spec.anisotropy_range)
            samples.append(LabeledCloud(cloud, label, f"{split}-{kind}-{i:04d}"))
    return samples


def make_dataset(spec: DatasetSpec
                 ) -> tuple[list[LabeledCloud], list[LabeledCloud]]:
    """Balanced train and test splits drawn from disjoint seed streams."""
    train = make_split(spec, "train")
    test = make_split(spec, "test")
    logger.info("generated %d train and %d test clouds over %d classes",
                len(train), len(test), len(spec.classes))
    return train, test


def subset_per_class(samples: Sequence[LabeledCloud],
                     k: int) -> list[LabeledCloud]:
    """The first ``k`` samples of every label, in dataset order."""
    taken: dict[int, int] = {}
    subset = []
    for sample in samples:
        if taken.get(sample.label, 0) < k:
            taken[sample.label] = taken.get(sample.label, 0) + 1
            subset.append(sample)
    return subset


def rotate_dataset(samples: Sequence[LabeledCloud], seed: int,
                   transform_features: bool = True) -> list[LabeledCloud]:
    """Apply a fresh random rotation about the origin to every sample.

    The same rotation acts on the features through the reshape action
    unless ``transform_features`` is false.
    """
    rng = np.random.default_rng(seed)
    rotated = []
    for sample in samples:
        g = random_transform(GroupSpec.ROTATIONS, 1.0, rng,
                             sample.cloud.dimension)
        rotated.append(LabeledCloud(
            sample.cloud.transformed(g, transform_features),
            sample.label, sample.id))
    return rotated
