# This code is part of fakp and is licensed under the MIT license.

from plugcli.plugin_management import CommandPlugin


class FAKPCommandPlugin(CommandPlugin):
    """Command plugin; ``requires_fakp`` is the minimal library version the
    command works with."""

    def __init__(self, command, section, requires_fakp):
        super().__init__(command=command,
                         section=section,
                         requires_lib=requires_fakp,
                         requires_cli=requires_fakp)
