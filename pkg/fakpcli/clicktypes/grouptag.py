import click

from fakp.geometry import GroupSpec


class GroupTag(click.ParamType):
    """A Euclidean group given by its tag (``t``, ``so``, ``o``, ``se``,
    ``e``), converted to :class:`fakp.geometry.GroupSpec`."""

    name = "group"

    def get_metavar(self, param, *args, **kwargs):
        return "[" + "|".join(g.tag for g in GroupSpec) + "]"

    def convert(self, value, param, ctx):
        if isinstance(value, GroupSpec):
            return value
        try:
            return GroupSpec.from_tag(value)
        except ValueError as exc:
            self.fail(str(exc), param, ctx)
