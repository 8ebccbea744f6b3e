import pytest
import click

from fakp.geometry import GroupSpec
from fakpcli.clicktypes import GroupTag


class TestGroupTag:
    @pytest.mark.parametrize('value,expected', [
        ("e", GroupSpec.TRANSLATIONS_ROTATIONS_REFLECTIONS),
        ("SO", GroupSpec.ROTATIONS),
        (GroupSpec.TRANSLATIONS, GroupSpec.TRANSLATIONS),
    ])
    def test_convert(self, value, expected):
        # counting on __call__ to get to convert()
        assert GroupTag()(value) is expected

    def test_bad_tag(self):
        with pytest.raises(click.BadParameter, match="unknown group"):
            GroupTag()("sim")

    def test_metavar(self):
        assert GroupTag().get_metavar(None) == "[t|so|o|se|e]"
