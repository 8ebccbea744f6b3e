import pytest

from fakp.exceptions import ParseError
from fakp.geometry import GroupSpec
from fakp.utils import (
    format_value,
    parse_key_value_text,
    split_list,
    to_canonical_text,
)


@pytest.mark.parametrize('value,text', [
    (True, "1"),
    (False, "0"),
    (0.1, "0.1"),
    (1e-5, "1e-05"),
    ([60, 150, 300], "60,150,300"),
    ((0.6, 1.4), "0.6,1.4"),
    (GroupSpec.ROTATIONS, "so"),
    ("grid", "grid"),
    (3, "3"),
])
def test_format_value(value, text):
    assert format_value(value) == text


def test_parse_skips_comments_and_blanks():
    text = "# experiment\n\nepochs = 20  # short run\nlr=0.5\nepochs=3\n"
    assert parse_key_value_text(text) == {"epochs": "3", "lr": "0.5"}


@pytest.mark.parametrize('text,lineno', [
    ("epochs 20\n", 1),
    ("lr=1\n=2\n", 2),
])
def test_parse_errors(text, lineno):
    with pytest.raises(ParseError) as excinfo:
        parse_key_value_text(text)
    assert excinfo.value.lineno == lineno
    assert str(excinfo.value).startswith(f"line {lineno}:")


def test_canonical_text_is_sorted():
    text = to_canonical_text({"seed": 1, "lr": 0.25, "classes": ["box", "cone"]})
    assert text == "classes=box,cone\nlr=0.25\nseed=1\n"


def test_split_list():
    assert split_list(" 1, 2,,3 ") == ["1", "2", "3"]
    assert split_list("") == []
