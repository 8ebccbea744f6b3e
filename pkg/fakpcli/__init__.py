# This code is part of fakp and is licensed under the MIT license.

from .plugins import FAKPCommandPlugin
from . import commands

from importlib.metadata import version
__version__ = version("fakp")
