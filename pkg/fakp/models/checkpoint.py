# This code is part of fakp and is licensed under the MIT license.
"""Binary model checkpoints.

Layout, all integers little endian::

    b"FAKP" | u32 version | u32 n | n bytes of canonical config text
    then per array: u32 n | n bytes of name | u32 rank | rank x u64 dims
                    | float64 values in row-major order

Arrays follow until the end of the file.
"""
from __future__ import annotations

import logging
import os
import pathlib
import struct
from typing import Union

import numpy as np

from fakp.exceptions import CheckpointFormatError
from fakp.utils import parse_key_value_text, to_canonical_text
from .kpcnn import KPCNNMini, build_model
from .kpcnn_settings import KPCNNMiniConfig, WrapperSettings

logger = logging.getLogger(__name__)

MAGIC = b"FAKP"
FORMAT_VERSION = 1
_WRAPPER_KEYS = {"wrapper_mode": "mode", "wrapper_group": "group",
                 "wrapper_outer_group": "outer_group"}


def config_text(model: KPCNNMini) -> str:
    """Canonical ``key=value`` text of the model and wrapper settings."""
    values = dict(model.config.as_text_values())
    values.update(model.wrapper.as_text_values())
    return to_canonical_text(values)


def _u32(value: int) -> bytes:
    return struct.pack("<I", value)


def save_checkpoint(path: Union[str, os.PathLike], model: KPCNNMini) -> None:
    text = config_text(model).encode("utf-8")
    chunks = [MAGIC, _u32(FORMAT_VERSION), _u32(len(text)), text]
    arrays = [(name, t.data) for name, t in model.named_parameters()]
    arrays += model.named_buffers()
    for name, arr in arrays:
        encoded = name.encode("utf-8")
        chunks += [_u32(len(encoded)), encoded, _u32(arr.ndim),
                   struct.pack(f"<{arr.ndim}Q", *arr.shape),
                   np.ascontiguousarray(arr, dtype="<f8").tobytes()]
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"".join(chunks))
    logger.info("wrote checkpoint %s (%d arrays)", path, len(arrays))


class _Reader:
    def __init__(self, payload: bytes, path):
        self.payload = payload
        self.offset = 0
        self.path = path

    def take(self, n: int) -> bytes:
        end = self.offset + n
        if end > len(self.payload):
            errmsg = f"{self.path}: truncated at byte {self.offset}"
            raise CheckpointFormatError(errmsg)
        chunk = self.payload[self.offset:end]
        self.offset = end
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    @property
    def exhausted(self) -> bool:
        return self.offset == len(self.payload)


def read_checkpoint(path: Union[str, os.PathLike]
                    ) -> tuple[str, dict[str, np.ndarray]]:
    """Config text and named arrays of a checkpoint file.

    Raises
    ------
    CheckpointFormatError
      on a wrong magic number, an unknown version or a truncated file.
    """
    reader = _Reader(pathlib.Path(path).read_bytes(), path)
    if reader.take(4) != MAGIC:
        raise CheckpointFormatError(f"{path} is not a fakp checkpoint")
    version = reader.u32()
    if version != FORMAT_VERSION:
        errmsg = (f"{path}: unsupported checkpoint version {version}, "
                  f"expected {FORMAT_VERSION}")
        raise CheckpointFormatError(errmsg)
    text = reader.take(reader.u32()).decode("utf-8")
    arrays = {}
    while not reader.exhausted:
        name = reader.take(reader.u32()).decode("utf-8")
        rank = reader.u32()
        shape = struct.unpack(f"<{rank}Q", reader.take(8 * rank))
        count = int(np.prod(shape, dtype=np.int64))
        values = np.frombuffer(reader.take(8 * count), dtype="<f8")
        arrays[name] = values.reshape(shape).astype(np.float64)
    return text, arrays


def load_checkpoint(path: Union[str, os.PathLike]) -> KPCNNMini:
    """Rebuild a model, parameters and buffers included."""
    text, arrays = read_checkpoint(path)
    values = parse_key_value_text(text)
    wrapper_values = {_WRAPPER_KEYS[k]: values.pop(k)
                      for k in list(values) if k in _WRAPPER_KEYS}
    try:
        config = KPCNNMiniConfig.from_text_values(values)
        wrapper = WrapperSettings.from_text_values(wrapper_values)
    except ValueError as e:
        raise CheckpointFormatError(f"{path}: invalid config: {e}") from e
    model = build_model(config, wrapper)
    try:
        model.load_arrays(arrays)
    except KeyError as e:
        raise CheckpointFormatError(f"{path}: missing array {e}") from None
    return model
