# This code is part of fakp and is licensed under the MIT license.
from __future__ import annotations

from typing import Any, Mapping

try:
    from pydantic.v1 import BaseModel
except ImportError:  # -no-cov-
    from pydantic import BaseModel

from .config_text import split_list


class SettingsModel(BaseModel):
    """Base for settings that round-trip through ``key=value`` text."""

    class Config:
        extra = "forbid"
        validate_assignment = True

    @classmethod
    def list_fields(cls) -> set[str]:
        return {name for name, field in cls.__fields__.items()
                if getattr(field.outer_type_, "__origin__", None)
                in (list, tuple)}

    @classmethod
    def from_text_values(cls, values: Mapping[str, str]):
        """Build from raw strings, splitting comma-separated list fields."""
        lists = cls.list_fields()
        parsed: dict[str, Any] = {}
        for key, raw in values.items():
            parsed[key] = split_list(raw) if key in lists else raw
        return cls(**parsed)

    def as_text_values(self) -> dict[str, Any]:
        return self.dict()
