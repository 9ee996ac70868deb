from pathlib import Path

import pytest
from pydantic import ValidationError

from colvne.train import TrainConfig


def test_defaults_propagate_into_architecture():
    cfg = TrainConfig.model_validate(
        {"augment": {"global_size": 16, "local_size": 8}, "longtail": {"num_classes": 4}}
    )
    assert cfg.arch.input_size == 16
    assert cfg.arch.num_classes == 4


def test_warmup_must_be_shorter_than_training():
    with pytest.raises(ValidationError):
        TrainConfig(epochs=3, warmup_epochs=3)
    assert TrainConfig(epochs=0, warmup_epochs=5).epochs == 0


def test_unknown_field():
    with pytest.raises(ValidationError):
        TrainConfig.model_validate({"epochz": 3})


def test_conflicting_input_size():
    with pytest.raises(ValidationError):
        TrainConfig.model_validate({"arch": {"input_size": 24}})


def test_data_dir_replaces_synthetic_source():
    cfg = TrainConfig(data_dir=Path("somewhere"))
    assert cfg.longtail is None


def test_global_view_cannot_exceed_image():
    with pytest.raises(ValidationError):
        TrainConfig.model_validate(
            {"longtail": {"image_size": 16}, "augment": {"global_size": 32}}
        )
