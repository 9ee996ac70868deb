import numpy as np
import pytest

from colvne.errors import ShapeError
from colvne.model import (
    ArchitectureConfig,
    EmbeddingSpace,
    EncoderKind,
    Mode,
    embed,
    encoder_forward,
    heads_forward,
    init_model,
    parameter_count,
    parameter_shapes,
    predict_classes,
    projection_forward,
    to_encoder_input,
)

TINY = dict(encoder_widths=(4, 4, 8), input_size=16, proj_hidden=16, proj_out=8)


@pytest.fixture
def state():
    return init_model(ArchitectureConfig(**TINY), seed=3)


@pytest.fixture
def views(rng) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=(5, 3, 16, 16))


def test_head_sizes_follow_multipliers():
    arch = ArchitectureConfig(num_classes=6)
    assert arch.head_sizes == [3, 6, 9, 12]
    assert arch.primary_head == 1


def test_small_class_count_keeps_two_outputs():
    arch = ArchitectureConfig(num_classes=3, head_multipliers=(0.5, 1.0))
    assert arch.head_sizes == [2, 3]


def test_parameter_count_matches_shapes():
    arch = ArchitectureConfig(**TINY)
    total = sum(int(np.prod(s)) for s in parameter_shapes(arch).values())
    assert parameter_count(arch) == total
    assert parameter_shapes(arch)["head0.w"] == (8, 3)


def test_invalid_architecture():
    with pytest.raises(ValueError):
        ArchitectureConfig(encoder_widths=(4, 8))
    with pytest.raises(ValueError):
        ArchitectureConfig(head_multipliers=())


def test_init_is_seeded():
    arch = ArchitectureConfig(**TINY)
    a, b, c = init_model(arch, 1), init_model(arch, 1), init_model(arch, 2)
    for name in a.params:
        np.testing.assert_array_equal(a.params[name], b.params[name])
    assert not np.array_equal(a.params["enc.conv0.w"], c.params["enc.conv0.w"])


def test_encoder_output_shape(state, views):
    assert encoder_forward(state, views).shape == (5, 8)


def test_encoder_rejects_wrong_channels(state):
    with pytest.raises(ShapeError):
        encoder_forward(state, np.zeros((2, 1, 16, 16)))


def test_zero_weights_give_zero_features(state, views):
    for name in state.params:
        if name.startswith("enc.") and not name.endswith(".gamma"):
            state.params[name][...] = 0.0
    np.testing.assert_array_equal(encoder_forward(state, views), 0.0)


def test_eval_mode_is_independent_of_batch(state, views):
    full = encoder_forward(state, views, Mode.EVAL)
    single = encoder_forward(state, views[2:3], Mode.EVAL)
    np.testing.assert_allclose(full[2], single[0], rtol=1e-12, atol=1e-12)


def test_train_mode_updates_running_stats(state, views):
    before = state.bn_stats["enc.bn0"].mean.copy()
    encoder_forward(state, views, Mode.TRAIN)
    assert not np.array_equal(state.bn_stats["enc.bn0"].mean, before)


def test_projections_are_unit_rows(state, views):
    z = projection_forward(state, encoder_forward(state, views))
    assert z.shape == (5, 8)
    np.testing.assert_allclose(np.linalg.norm(z, axis=1), 1.0, atol=1e-12)


def test_heads_are_linear(state, rng):
    z1, z2 = rng.normal(size=(4, 8)), rng.normal(size=(4, 8))
    combined = heads_forward(state, 2.0 * z1 - z2)
    for out, a, b in zip(combined, heads_forward(state, z1), heads_forward(state, z2), strict=True):
        np.testing.assert_allclose(out, 2.0 * a - b, atol=1e-12)


def test_predict_classes_uses_primary_head(state, rng):
    z = rng.normal(size=(6, 8))
    expected = np.argmax(z @ state.params[f"head{state.arch.primary_head}.w"], axis=1)
    np.testing.assert_array_equal(predict_classes(state, z), expected)


def test_to_encoder_input_resizes(rng):
    out = to_encoder_input([rng.uniform(size=(3, 16, 16)), rng.uniform(size=(3, 8, 8))], 16)
    assert out.shape == (2, 3, 16, 16)
    with pytest.raises(ShapeError):
        to_encoder_input([], 16)


def test_embed_spaces(state, rng):
    images = [rng.uniform(size=(3, 20, 20)) for _ in range(7)]
    z = embed(state, images, EmbeddingSpace.PROJECTION, batch_size=3)
    f = embed(state, images, EmbeddingSpace.BACKBONE, batch_size=3)
    assert z.shape == (7, 8) and f.shape == (7, 8)
    np.testing.assert_allclose(z, embed(state, images, batch_size=7), atol=1e-12)
    assert embed(state, [], EmbeddingSpace.BACKBONE).shape == (0, 8)


def test_mlp_encoder(rng):
    arch = ArchitectureConfig(
        encoder=EncoderKind.MLP, encoder_widths=(12,), input_size=8, proj_hidden=8, proj_out=4
    )
    state = init_model(arch, 0)
    assert encoder_forward(state, rng.uniform(size=(3, 3, 8, 8))).shape == (3, 12)
    with pytest.raises(ShapeError):
        encoder_forward(state, rng.uniform(size=(3, 3, 16, 16)))
