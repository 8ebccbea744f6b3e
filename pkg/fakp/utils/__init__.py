# This code is part of fakp and is licensed under the MIT license.

from .config_text import (
    format_value,
    parse_key_value_text,
    split_list,
    to_canonical_text,
)
from .settings import SettingsModel
