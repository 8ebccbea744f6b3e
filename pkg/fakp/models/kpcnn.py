# This code is part of fakp and is licensed under the MIT license.
"""A miniature KP-CNN classifier.

Each block picks its query points by grid subsampling the current support
points, convolves the features of the support onto the queries with a
rigid KPConv layer, then applies batch normalization and a leaky ReLU.
The last block's features are pooled into a global descriptor and mapped
to class logits by a linear head. When a :class:`WrapperSettings` is
given, the whole stack runs inside a frame averaging wrapper.
"""
from __future__ import annotations

import collections
import hashlib
import logging
from dataclasses import replace
from typing import Mapping, Optional

import numpy as np

from fakp.exceptions import NotMultipleOfDimError, ShapeMismatchError
from fakp.geometry import PointCloud, as_array
from fakp.kpconv import (
    KPConvLayer,
    NeighborTable,
    grid_subsample,
    kpconv_forward,
    radius_neighbors,
)
from fakp.numgraph import (
    BatchNormStats,
    Tensor,
    add_bias,
    batch_norm,
    leaky_relu,
    matmul,
    reduce,
    reshape,
)
from fakp.numgraph.tensor import _frozen
from .kpcnn_settings import KPCNNMiniConfig, WrapperSettings

logger = logging.getLogger(__name__)

Level = tuple[np.ndarray, NeighborTable]


class PyramidCache:
    """LRU cache of per-cloud query points and neighbor tables.

    Keys are digests of the coordinate bytes; coordinates never carry
    gradients, so a cloud seen again reuses its whole pyramid.
    """

    def __init__(self, maxsize: int):
        self.maxsize = maxsize
        self.hits = 0
        self.misses = 0
        self._entries: collections.OrderedDict[bytes, list[Level]] = \
            collections.OrderedDict()

    @staticmethod
    def key(X: np.ndarray) -> bytes:
        digest = hashlib.blake2b(digest_size=20)
        digest.update(repr(X.shape).encode())
        digest.update(np.ascontiguousarray(X).tobytes())
        return digest.digest()

    def get(self, key: bytes) -> Optional[list[Level]]:
        levels = self._entries.get(key)
        if levels is None:
            self.misses += 1
            return None
        self.hits += 1
        self._entries.move_to_end(key)
        return levels

    def put(self, key: bytes, levels: list[Level]) -> None:
        if self.maxsize == 0:
            return
        self._entries[key] = levels
        self._entries.move_to_end(key)
        while len(self._entries) > self.maxsize:
            self._entries.popitem(last=False)

    def clear(self) -> None:
        self._entries.clear()

    def __len__(self):
        return len(self._entries)


class KPCNNBlock:
    """KPConv, batch normalization and leaky ReLU at one resolution."""

    def __init__(self, conv: KPConvLayer, cell: float, bn_momentum: float):
        self.conv = conv
        self.cell = cell
        self.gamma = Tensor(np.ones(conv.c_out), requires_grad=True)
        self.beta = Tensor(np.zeros(conv.c_out), requires_grad=True)
        self.stats = BatchNormStats.fresh(conv.c_out, bn_momentum)


class KPCNNMini:
    """The classifier; build one with :func:`build_model`."""

    def __init__(self, config: KPCNNMiniConfig, blocks: list[KPCNNBlock],
                 head_weight: Tensor, head_bias: Tensor,
                 wrapper: Optional[WrapperSettings] = None):
        self.config = config
        self.blocks = blocks
        self.head_weight = head_weight
        self.head_bias = head_bias
        self.wrapper = wrapper if wrapper is not None else WrapperSettings()
        self.training = False
        self.cache = PyramidCache(config.cache_size)
        self.wrapped = self.wrapper.wrap(self.forward_single,
                                         config.degeneracy_tol)

    # parameters and buffers
    def named_parameters(self) -> list[tuple[str, Tensor]]:
        named = []
        for i, block in enumerate(self.blocks):
            named += [(f"block{i}.conv.weights", block.conv.weights),
                      (f"block{i}.bn.gamma", block.gamma),
                      (f"block{i}.bn.beta", block.beta)]
        named += [("head.weight", self.head_weight),
                  ("head.bias", self.head_bias)]
        return named

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.named_parameters()]

    def named_buffers(self) -> list[tuple[str, np.ndarray]]:
        named = []
        for i, block in enumerate(self.blocks):
            named += [
                (f"block{i}.conv.kernel_points", block.conv.disposition.points),
                (f"block{i}.bn.running_mean", block.stats.mean),
                (f"block{i}.bn.running_var", block.stats.var),
            ]
        return named

    def load_arrays(self, arrays: Mapping[str, np.ndarray]) -> None:
        """Overwrite parameters and buffers by name.

        Raises
        ------
        KeyError
          if a parameter or buffer is missing from ``arrays``.
        ShapeMismatchError
          if a stored array has the wrong shape.
        """
        def fetch(name, shape):
            arr = np.asarray(arrays[name], dtype=np.float64)
            if arr.shape != shape:
                errmsg = (f"{name}: stored shape {arr.shape}, model expects "
                          f"{shape}")
                raise ShapeMismatchError(errmsg)
            return arr

        for name, tensor in self.named_parameters():
            tensor.data = _frozen(fetch(name, tensor.shape))
            tensor.zero_grad()
        for i, block in enumerate(self.blocks):
            points = fetch(f"block{i}.conv.kernel_points",
                           block.conv.disposition.points.shape)
            points.setflags(write=False)
            block.conv.disposition = replace(block.conv.disposition,
                                             points=points)
            block.stats.mean = fetch(f"block{i}.bn.running_mean",
                                     block.stats.mean.shape)
            block.stats.var = fetch(f"block{i}.bn.running_var",
                                    block.stats.var.shape)
        self.cache.clear()

    # forward pass
    def pyramid(self, X: np.ndarray) -> list[Level]:
        """Query points and neighbor tables of every block for ``X``."""
        key = self.cache.key(X)
        levels = self.cache.get(key)
        if levels is not None:
            return levels
        levels = []
        support = X
        for block in self.blocks:
            queries = grid_subsample(support, None, block.cell)[0].data
            lists = radius_neighbors(support, queries, block.conv.radius,
                                     self.config.neighbor_search)
            levels.append((queries, NeighborTable.from_lists(lists,
                                                             len(support))))
            support = queries
        self.cache.put(key, levels)
        return levels

    def forward_single(self, X, F: Tensor) -> Tensor:
        """Logits [num_classes] of one cloud, without symmetrization."""
        support = as_array(X)
        for block, (queries, table) in zip(self.blocks, self.pyramid(support)):
            Y = kpconv_forward(block.conv, support, F, queries, table)
            # a single query has no batch statistics
            use_batch = self.training and Y.shape[0] > 1
            Y = batch_norm(Y, block.gamma, block.beta, self.config.bn_eps,
                           block.stats, use_batch)
            F = leaky_relu(Y, self.config.leaky_slope)
            support = queries
        pooled = reduce(F, 0, self.config.global_pooling)
        pooled = reshape(pooled, (1, pooled.shape[0]))
        logits = add_bias(matmul(pooled, self.head_weight), self.head_bias)
        return reshape(logits, (self.config.num_classes,))

    def input_features(self, cloud: PointCloud) -> Tensor:
        if self.config.input_features == 'coords':
            F = cloud.coords.detach()
        else:
            F = cloud.features
        if F.shape[1] != self.config.channels[0]:
            errmsg = (f"cloud features have width {F.shape[1]}, the model "
                      f"expects {self.config.channels[0]}")
            raise ShapeMismatchError(errmsg)
        return F

    def __call__(self, cloud: PointCloud, training: bool = False) -> Tensor:
        return kpcnn_forward(self, cloud, training=training)

    def __repr__(self):
        return (f"KPCNNMini(blocks={len(self.blocks)}, "
                f"classes={self.config.num_classes}, "
                f"wrapper={self.wrapper.mode})")


def kpcnn_forward(model: KPCNNMini, cloud: PointCloud, *,
                  training: bool = False) -> Tensor:
    """Class logits [num_classes] of ``cloud``.

    Raises
    ------
    DegenerateFrameError
      if the model is wrapped and the cloud's covariance spectrum is
      degenerate.
    ShapeMismatchError
      if the cloud's feature width does not match the first block.
    """
    model.training = training
    F = model.input_features(cloud)
    if model.wrapped is None:
        return model.forward_single(cloud.coords, F)
    return model.wrapped(cloud.coords, F)


def build_model(config: KPCNNMiniConfig,
                wrapper: Optional[WrapperSettings] = None) -> KPCNNMini:
    """Randomly initialized model; the initialization depends only on
    ``config``, so wrapped and unwrapped models start from the same
    weights."""
    wrapper = wrapper if wrapper is not None else WrapperSettings()
    d = config.dimension
    if wrapper.mode in ('equivariant', 'composed') and \
            config.num_classes % d != 0:
        errmsg = (f"an equivariant classifier needs num_classes to be a "
                  f"multiple of {d}, got {config.num_classes}")
        raise NotMultipleOfDimError(errmsg)

    rng = np.random.default_rng(config.seed)
    widths = list(config.channels) + [config.embedding_width]
    blocks = []
    for i in range(config.n_blocks):
        conv = KPConvLayer.create(widths[i], widths[i + 1], K=config.K,
                                  radius=config.radii[i],
                                  sigma_ratio=config.sigma_ratio,
                                  method=config.kernel_disposition,
                                  seed=config.seed, rng=rng, d=d)
        blocks.append(KPCNNBlock(conv, config.subsample_cells[i],
                                 config.bn_momentum))
    bound = 1.0 / np.sqrt(config.embedding_width)
    head_weight = Tensor(rng.uniform(-bound, bound,
                                     size=(config.embedding_width,
                                           config.num_classes)),
                         requires_grad=True)
    head_bias = Tensor(np.zeros(config.num_classes), requires_grad=True)
    model = KPCNNMini(config, blocks, head_weight, head_bias, wrapper)
    logger.debug("built %r with %d parameters", model, count_parameters(model))
    return model


def count_parameters(model: KPCNNMini) -> int:
    """Number of trainable scalars."""
    return sum(p.size for p in model.parameters())
