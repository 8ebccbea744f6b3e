import numpy as np
import pytest
from numpy import testing as npt

from fakp.data import LabeledCloud, make_dataset
from fakp.exceptions import EmptyDatasetError, IndexOutOfRangeError
from fakp.models import (
    KPCNNMiniConfig,
    WrapperSettings,
    build_model,
    evaluate,
    predict,
    train,
)


@pytest.fixture
def dataset(tiny_dataset_spec):
    return make_dataset(tiny_dataset_spec)


def test_history(tiny_config, dataset):
    model, history = train(build_model(tiny_config), dataset[0])
    assert [m.epoch for m in history] == [1, 2, 3]
    for m in history:
        assert np.isfinite(m.loss)
        assert 0.0 <= m.accuracy <= 1.0
    assert not model.training


def test_deterministic(tiny_config, dataset):
    first, first_history = train(build_model(tiny_config), dataset[0])
    second, second_history = train(build_model(tiny_config), dataset[0])
    assert first_history == second_history
    for (name, a), (_, b) in zip(first.named_parameters(),
                                 second.named_parameters()):
        assert a.data.tobytes() == b.data.tobytes(), name
    for (name, a), (_, b) in zip(first.named_buffers(),
                                 second.named_buffers()):
        assert a.tobytes() == b.tobytes(), name


def test_loss_decreases_on_two_samples(dataset):
    # small cells keep several points on every level, so batch statistics
    # are always used and each epoch's loss depends on the weights only
    config = KPCNNMiniConfig(num_classes=6, channels=[3, 6], embedding_width=6,
                             radii=[0.3, 0.6], subsample_cells=[0.1, 0.2],
                             K=5, lr=0.01, momentum=0.0, epochs=5,
                             batch_size=2, seed=0)
    pair = [next(s for s in dataset[0] if s.label == label)
            for label in (0, 1)]
    _, history = train(build_model(config), pair)
    losses = [m.loss for m in history]
    assert len(losses) == 5
    assert all(b < a for a, b in zip(losses, losses[1:])), losses


def test_zero_learning_rate_keeps_parameters(tiny_config, dataset):
    config = tiny_config.copy(update={'lr': 0.0, 'epochs': 1})
    model = build_model(config)
    before = [p.data.copy() for p in model.parameters()]
    train(model, dataset[0])
    for p, b in zip(model.parameters(), before):
        npt.assert_array_equal(p.data, b)


def test_custom_progress(tiny_config, dataset):
    seen = []

    def progress(epochs):
        for epoch in epochs:
            seen.append(epoch)
            yield epoch

    train(build_model(tiny_config), dataset[0], progress=progress)
    assert seen == [1, 2, 3]


def test_empty_dataset(tiny_config):
    with pytest.raises(EmptyDatasetError):
        train(build_model(tiny_config), [])


def test_bad_label(tiny_config, dataset):
    sample = dataset[0][0]
    bad = LabeledCloud(sample.cloud, 6, "bad")
    with pytest.raises(IndexOutOfRangeError, match="bad"):
        train(build_model(tiny_config), [bad])


def test_evaluate(tiny_config, dataset):
    model = build_model(tiny_config)
    result = evaluate(model, dataset[1])
    assert result.n_samples == 12
    assert result.overall_accuracy == result.n_correct / 12
    manual = sum(predict(model, s) == s.label for s in dataset[1])
    assert result.n_correct == manual


def test_invariant_model_ignores_rotation(tiny_config, dataset):
    model = build_model(tiny_config, WrapperSettings(mode='invariant',
                                                     group='so'))
    original = evaluate(model, dataset[1])
    rotated = evaluate(model, dataset[1], rotate=True, seed=5)
    assert original == rotated
