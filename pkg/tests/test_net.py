"""Network forward/loss/gradient/training checks against independent oracles."""

import math

import numpy as np
import pytest

from mmentail.net import (
    Activation,
    IMAGE_ENTAIL,
    LayerSpec,
    MlpModel,
    TEXT_ENTAIL,
    TrainConfig,
    fit,
    forward,
    gradients,
    init_model,
    loss,
    onehot,
    predict,
    preset_layers,
)


def tiny_model(dims, activations=None, dropout=None, reg=None, seed=0):
    acts = activations or [Activation.RELU] * (len(dims) - 2) + [Activation.SIGMOID]
    drops = dropout or [0.0] * (len(dims) - 1)
    regs = reg or [0.0] * (len(dims) - 1)
    layers = [
        LayerSpec(dims[k], dims[k + 1], acts[k], drops[k], regs[k])
        for k in range(len(dims) - 1)
    ]
    return init_model(layers, seed)


def zero_model(dims):
    m = tiny_model(dims)
    for w in m.weights:
        w[:] = 0.0
    return m


# ---------------------------------------------------------------------------
# initialization


def test_init_is_deterministic_per_seed():
    a = init_model(TEXT_ENTAIL, 42)
    b = init_model(TEXT_ENTAIL, 42)
    c = init_model(TEXT_ENTAIL, 43)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    assert not all(np.array_equal(wa, wc) for wa, wc in zip(a.weights, c.weights))


def test_image_preset_init_is_bit_identical():
    a = init_model(IMAGE_ENTAIL, 42)
    b = init_model(IMAGE_ENTAIL, 42)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    for ba, bb in zip(a.biases, b.biases):
        assert np.array_equal(ba, bb)


def test_text_preset_shape():
    m = init_model(TEXT_ENTAIL, 1)
    assert [(s.in_dim, s.out_dim) for s in m.layers] == [(769, 450), (450, 450), (450, 3)]
    assert [s.activation for s in m.layers] == [Activation.RELU, Activation.RELU, Activation.SIGMOID]
    assert [s.dropout_rate for s in m.layers] == [0.55, 0.4, 0.0]
    assert m.layers[0].activity_reg_coeff == m.layers[1].activity_reg_coeff == 1e-4
    assert m.layers[2].activity_reg_coeff == 0.0


def test_image_preset_shape():
    specs = preset_layers(IMAGE_ENTAIL)
    assert [(s.in_dim, s.out_dim) for s in specs] == [(4097, 5000), (5000, 3)]
    assert specs[0].dropout_rate == 0.5
    assert specs[0].activity_reg_coeff == 0.0
    assert specs[1].activation is Activation.SIGMOID


def test_init_biases_are_zero_and_weights_in_glorot_bound():
    m = init_model(TEXT_ENTAIL, 7)
    for spec, w, b in zip(m.layers, m.weights, m.biases):
        assert np.all(b == 0.0)
        bound = math.sqrt(6.0 / (spec.in_dim + spec.out_dim))
        assert np.all(np.abs(w) <= bound)
        assert np.std(w) > 0


def test_preset_overrides():
    specs = preset_layers(TEXT_ENTAIL, activity_reg=0.01, dropout=[0.1, 0.2])
    assert [s.dropout_rate for s in specs] == [0.1, 0.2, 0.0]
    assert specs[0].activity_reg_coeff == 0.01
    with pytest.raises(ValueError, match="dropout rate"):
        preset_layers(IMAGE_ENTAIL, dropout=[0.3, 0.3])
    with pytest.raises(ValueError, match="unknown preset"):
        preset_layers("conv-net")


def test_model_validation():
    with pytest.raises(ValueError, match="final layer"):
        tiny_model([4, 5], activations=[Activation.RELU])
    with pytest.raises(ValueError, match="out_dim"):
        layers = [
            LayerSpec(4, 5, Activation.RELU),
            LayerSpec(6, 3, Activation.SIGMOID),
        ]
        MlpModel(layers, [np.zeros((4, 5)), np.zeros((6, 3))], [np.zeros(5), np.zeros(3)])


# ---------------------------------------------------------------------------
# forward


def test_zero_model_gives_uniform_probabilities():
    m = zero_model([4, 3])
    p = forward(m, [1.0, -2.0, 0.5, 3.0])
    assert p == pytest.approx([1 / 3, 1 / 3, 1 / 3], abs=1e-15)


def test_forward_matches_straight_line_oracle():
    rng = np.random.default_rng(21)
    m = tiny_model([4, 3, 3], seed=3)
    x = rng.normal(size=(6, 4))

    # independent re-implementation: explicit matrix arithmetic, no sharing
    h = np.maximum(x @ m.weights[0] + m.biases[0], 0.0)
    s = 1.0 / (1.0 + np.exp(-(h @ m.weights[1] + m.biases[1])))
    e = np.exp(s)
    expected = e / e.sum(axis=1, keepdims=True)

    got = forward(m, x)
    assert got == pytest.approx(expected, abs=1e-12)


def test_forward_single_vector_and_batch_agree():
    m = tiny_model([5, 4, 3], seed=9)
    x = np.linspace(-1, 1, 5)
    single = forward(m, x)
    batched = forward(m, x[None, :])
    assert single == pytest.approx(batched[0], abs=0)


def test_infer_mode_is_deterministic():
    m = tiny_model([5, 4, 3], seed=2)
    x = np.linspace(-2, 2, 5)
    assert np.array_equal(forward(m, x), forward(m, x))


def test_probabilities_sum_to_one_randomized():
    rng = np.random.default_rng(17)
    for seed in range(20):
        m = tiny_model([6, 5, 3], seed=seed)
        p = forward(m, rng.normal(size=(8, 6)))
        assert np.all(p > 0) and np.all(p < 1)
        assert p.sum(axis=1) == pytest.approx(np.ones(8), abs=1e-9)


def test_train_mode_without_dropout_equals_infer_mode():
    m = tiny_model([5, 4, 3], seed=4)
    x = np.linspace(0, 1, 5)
    assert np.array_equal(forward(m, x), forward(m, x, dropout_seed=11))


def test_dropout_changes_output_and_is_seeded():
    m = tiny_model([5, 8, 3], dropout=[0.5, 0.0], seed=5)
    x = np.ones(5)
    infer = forward(m, x)
    t1 = forward(m, x, dropout_seed=1)
    t2 = forward(m, x, dropout_seed=1)
    t3 = forward(m, x, dropout_seed=2)
    assert np.array_equal(t1, t2)
    assert not np.array_equal(t1, infer)
    assert not np.array_equal(t1, t3)


def test_forward_dim_mismatch():
    m = tiny_model([5, 4, 3])
    with pytest.raises(ValueError, match="in_dim"):
        forward(m, np.ones(6))


# ---------------------------------------------------------------------------
# loss


def test_zero_model_loss_is_ln3():
    m = zero_model([4, 3])
    x = np.random.default_rng(0).normal(size=(10, 4))
    y = onehot([0, 1, 2, 0, 1, 2, 0, 1, 2, 0])
    assert loss(m, x, y) == pytest.approx(math.log(3.0), abs=1e-12)


def test_loss_matches_independent_oracle():
    rng = np.random.default_rng(33)
    m = tiny_model([5, 4, 3], reg=[3e-3, 1e-3], seed=6)
    x = rng.normal(size=(7, 5))
    y = onehot(rng.integers(0, 3, size=7))

    # oracle: scalar loops over samples and units
    total_ce = 0.0
    total_reg = 0.0
    for n in range(7):
        h = [max(0.0, sum(x[n][i] * m.weights[0][i, j] for i in range(5)) + m.biases[0][j]) for j in range(4)]
        s = [1.0 / (1.0 + math.exp(-(sum(h[j] * m.weights[1][j, k] for j in range(4)) + m.biases[1][k]))) for k in range(3)]
        z = sum(math.exp(v) for v in s)
        p = [math.exp(v) / z for v in s]
        total_ce += -sum(y[n][k] * math.log(p[k]) for k in range(3))
        total_reg += 3e-3 * sum(v * v for v in h) + 1e-3 * sum(v * v for v in s)
    expected = (total_ce + total_reg) / 7

    assert loss(m, x, y) == pytest.approx(expected, abs=1e-10)


def test_loss_without_reg_is_plain_cross_entropy():
    rng = np.random.default_rng(8)
    m0 = tiny_model([5, 4, 3], reg=[0.0, 0.0], seed=6)
    x = rng.normal(size=(5, 5))
    y = onehot(rng.integers(0, 3, size=5))
    p = forward(m0, x)
    expected = float(-np.mean(np.log(p[np.arange(5), np.argmax(y, axis=1)])))
    assert loss(m0, x, y) == pytest.approx(expected, abs=1e-12)


def test_loss_rejects_empty_batch():
    m = tiny_model([4, 3])
    with pytest.raises(ValueError, match="non-empty"):
        loss(m, np.empty((0, 4)), np.empty((0, 3)))


# ---------------------------------------------------------------------------
# gradients vs central finite differences


def fd_gradients(model, x, y, h=1e-5, dropout_seed=None):
    """Central-difference gradients, one coordinate at a time."""
    out = []
    for k in range(len(model.layers)):
        gw = np.zeros_like(model.weights[k])
        for idx in np.ndindex(*gw.shape):
            orig = model.weights[k][idx]
            model.weights[k][idx] = orig + h
            up = loss(model, x, y, dropout_seed=dropout_seed)
            model.weights[k][idx] = orig - h
            down = loss(model, x, y, dropout_seed=dropout_seed)
            model.weights[k][idx] = orig
            gw[idx] = (up - down) / (2 * h)
        gb = np.zeros_like(model.biases[k])
        for idx in np.ndindex(*gb.shape):
            orig = model.biases[k][idx]
            model.biases[k][idx] = orig + h
            up = loss(model, x, y, dropout_seed=dropout_seed)
            model.biases[k][idx] = orig - h
            down = loss(model, x, y, dropout_seed=dropout_seed)
            model.biases[k][idx] = orig
            gb[idx] = (up - down) / (2 * h)
        out.append((gw, gb))
    return out


def max_rel_error(analytic, numeric):
    worst = 0.0
    for (aw, ab), (nw, nb) in zip(analytic, numeric):
        for a, n in ((aw, nw), (ab, nb)):
            denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)
            worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


@pytest.mark.parametrize("reg", [0.0, 1e-4])
def test_gradients_text_shape_match_finite_differences(reg):
    rng = np.random.default_rng(40)
    m = tiny_model(
        [9, 8, 8, 3],
        activations=[Activation.RELU, Activation.RELU, Activation.SIGMOID],
        reg=[reg, reg, 0.0],
        seed=12,
    )
    x = rng.normal(size=(5, 9))
    y = onehot(rng.integers(0, 3, size=5))
    assert max_rel_error(gradients(m, x, y), fd_gradients(m, x, y)) < 1e-4


@pytest.mark.parametrize("reg", [0.0, 1e-4])
def test_gradients_image_shape_match_finite_differences(reg):
    rng = np.random.default_rng(41)
    m = tiny_model(
        [9, 12, 3],
        activations=[Activation.RELU, Activation.SIGMOID],
        reg=[reg, 0.0],
        seed=13,
    )
    x = rng.normal(size=(5, 9))
    y = onehot(rng.integers(0, 3, size=5))
    assert max_rel_error(gradients(m, x, y), fd_gradients(m, x, y)) < 1e-4


def test_gradients_with_fixed_dropout_masks_match_finite_differences():
    rng = np.random.default_rng(42)
    m = tiny_model([6, 8, 3], dropout=[0.5, 0.0], seed=14)
    x = rng.normal(size=(4, 6))
    y = onehot(rng.integers(0, 3, size=4))
    got = gradients(m, x, y, dropout_seed=77)
    want = fd_gradients(m, x, y, dropout_seed=77)
    assert max_rel_error(got, want) < 1e-4


def test_final_bias_gradient_verified_by_oracle_on_single_example():
    m = zero_model([4, 3])
    x = np.array([[0.3, -0.2, 0.1, 0.9]])
    y = onehot([1])
    got = gradients(m, x, y)
    want = fd_gradients(m, x, y)
    assert got[-1][1] == pytest.approx(want[-1][1], abs=1e-8)


# ---------------------------------------------------------------------------
# training


def make_blobs(n=300, dim=10, separation=4.0, seed=0):
    """Three Gaussian classes with centers `separation` sigmas apart."""
    rng = np.random.default_rng(seed)
    # orthogonal unit directions scaled so pairwise center distance = separation
    centers = np.zeros((3, dim))
    for k in range(3):
        centers[k, k] = separation / math.sqrt(2.0)
    labels = rng.integers(0, 3, size=n)
    x = centers[labels] + rng.normal(size=(n, dim))
    return x, labels


def test_fit_overfits_separable_blobs():
    x, labels = make_blobs(seed=100)
    y = onehot(labels)
    m = tiny_model([10, 32, 3], seed=20)
    m, history = fit(m, x, y, TrainConfig(epochs=50, seed=1))
    assert len(history) == 50
    pred, _ = predict(m, x)
    accuracy = float(np.mean(pred == labels))
    assert accuracy >= 0.95
    assert history[-1] < history[0]


def test_single_small_step_decreases_loss():
    rng = np.random.default_rng(55)
    m = tiny_model([6, 5, 3], seed=21)
    x = rng.normal(size=(1, 6))
    y = onehot([2])
    before = loss(m, x, y)
    m, _ = fit(m, x, y, TrainConfig(optimizer="sgd", learning_rate=1e-4, epochs=1, batch_size=1, seed=0))
    assert loss(m, x, y) < before


def test_fit_is_deterministic_for_fixed_seed():
    x, labels = make_blobs(n=60, seed=7)
    y = onehot(labels)
    cfg = TrainConfig(epochs=5, seed=9)
    m1, h1 = fit(tiny_model([10, 8, 3], dropout=[0.3, 0.0], seed=30), x, y, cfg)
    m2, h2 = fit(tiny_model([10, 8, 3], dropout=[0.3, 0.0], seed=30), x, y, cfg)
    assert h1 == h2
    for w1, w2 in zip(m1.weights, m2.weights):
        assert np.array_equal(w1, w2)
    for b1, b2 in zip(m1.biases, m2.biases):
        assert np.array_equal(b1, b2)


def test_fit_rejects_mismatched_data():
    m = tiny_model([4, 3])
    with pytest.raises(ValueError, match="in_dim"):
        fit(m, np.ones((5, 3)), onehot([0] * 5))
    with pytest.raises(ValueError, match="one-hot"):
        fit(m, np.ones((5, 4)), onehot([0] * 4))


# ---------------------------------------------------------------------------
# predict


def test_predict_tie_breaks_to_lowest_index():
    m = zero_model([4, 3])
    idx, probs = predict(m, np.ones(4))
    assert idx == 0
    assert probs == pytest.approx([1 / 3, 1 / 3, 1 / 3], abs=1e-15)


def test_predict_is_pure():
    m = tiny_model([5, 4, 3], seed=31)
    x = np.linspace(-1, 1, 5)
    first = predict(m, x)
    second = predict(m, x)
    assert first[0] == second[0]
    assert np.array_equal(first[1], second[1])


def test_predict_batch_shape():
    m = tiny_model([5, 4, 3], seed=32)
    idx, probs = predict(m, np.random.default_rng(1).normal(size=(7, 5)))
    assert idx.shape == (7,)
    assert probs.shape == (7, 3)
