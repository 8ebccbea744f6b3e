# This code is part of fakp and is licensed under the MIT license.
"""Plain-text ``key=value`` configuration files.

Blank lines and ``#`` comments are skipped. Lists are written
comma-separated. The canonical form sorts the keys and prints floats with
``repr`` so it survives a round trip exactly.
"""
from __future__ import annotations

from typing import Any, Mapping

from fakp.exceptions import ParseError


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    if hasattr(value, "value") and isinstance(value.value, str):
        # str-valued enums
        return value.value
    return str(value)


def parse_key_value_text(text: str) -> dict[str, str]:
    """Map each key to its raw string value; later keys win.

    Raises
    ------
    ParseError
      for lines without ``=`` or with an empty key.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ParseError(f"expected 'key=value', got '{raw.strip()}'",
                             lineno)
        values[key] = value.strip()
    return values


def to_canonical_text(values: Mapping[str, Any]) -> str:
    return "".join(f"{key}={format_value(values[key])}\n"
                   for key in sorted(values))


def split_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]
