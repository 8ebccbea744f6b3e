import pytest
try:
    from pydantic.v1 import ValidationError
except ImportError:
    from pydantic import ValidationError

from fakp.geometry import GroupSpec
from fakp.models import (
    KPCNNMiniConfig,
    WrapperSettings,
    build_model,
    count_parameters,
)
from fakp.utils import parse_key_value_text, to_canonical_text


def test_defaults():
    config = KPCNNMiniConfig()
    assert config.n_blocks == 3
    assert config.num_classes == 6


def test_desk_scale():
    config = KPCNNMiniConfig.desk_scale(seed=4)
    default = KPCNNMiniConfig()
    assert config.n_blocks == default.n_blocks == 3
    assert config.K < default.K
    assert config.epochs < default.epochs
    assert config.seed == 4
    assert count_parameters(build_model(config)) < \
        count_parameters(build_model(default))
    assert KPCNNMiniConfig.desk_scale(K=5).K == 5


@pytest.mark.parametrize('changes,match', [
    ({'channels': [3, 7, 9]}, "multiples of the dimension"),
    ({'embedding_width': 10}, "multiples of the dimension"),
    ({'radii': [0.1, 0.2]}, "one entry per block"),
    ({'leaky_slope': 1.0}, r"\[0, 1\)"),
    ({'num_classes': 1}, "at least 2"),
    ({'K': 0}, "at least 1"),
    ({'lr': -0.1}, "zero or positive"),
    ({'bn_momentum': 0.0}, r"\(0, 1\]"),
    ({'dimension': 4}, "2 or 3"),
    ({'subsample_cells': []}, "must not be empty"),
])
def test_invalid(changes, match):
    with pytest.raises(ValidationError, match=match):
        KPCNNMiniConfig(**changes)


def test_unknown_key():
    with pytest.raises(ValidationError):
        KPCNNMiniConfig(kernel_size=3)


def test_two_dimensional():
    config = KPCNNMiniConfig(dimension=2, channels=[2, 4], radii=[1.0, 2.0],
                             subsample_cells=[0.5, 1.0], embedding_width=8)
    assert config.n_blocks == 2


def test_text_values(tiny_config):
    text = to_canonical_text(tiny_config.as_text_values())
    assert "channels=3,6,9\n" in text
    assert "lr=0.01\n" in text
    parsed = KPCNNMiniConfig.from_text_values(parse_key_value_text(text))
    assert parsed == tiny_config


class TestWrapperSettings:
    def test_default_is_unwrapped(self):
        assert not WrapperSettings().is_wrapped

    def test_tags(self):
        settings = WrapperSettings(mode='invariant', group='so')
        assert settings.group is GroupSpec.ROTATIONS
        assert settings.is_wrapped

    def test_composed_groups_must_be_disjoint(self):
        with pytest.raises(ValidationError, match="intersect"):
            WrapperSettings(mode='composed', group='e', outer_group='t')

    def test_composed(self):
        settings = WrapperSettings(mode='composed', group='o', outer_group='t')
        wrapped = settings.wrap(lambda X, F: F, 1e-6)
        assert wrapped.mode == 'equivariant'
        assert wrapped.composed_with == (GroupSpec.TRANSLATIONS, 'invariant')

    def test_unwrapped_wraps_nothing(self):
        assert WrapperSettings().wrap(lambda X, F: F, 1e-6) is None

    def test_bad_mode(self):
        with pytest.raises(ValidationError):
            WrapperSettings(mode='covariant')
