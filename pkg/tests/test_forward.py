"""Forward evaluation against hand arithmetic and naive-loop references."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import monrex as mx

from helpers import build_tiny_dense, build_toy_cnn, f32, make_inputs


def single_dense(weights, biases, activation="linear", input_len=None):
    w = np.asarray(weights, dtype=np.float64)
    return mx.validate_model(
        mx.NetworkModel(
            name="d",
            input_shape=(input_len or w.shape[0],),
            layers=(
                mx.LayerSpec(
                    kind="dense",
                    activation=activation,
                    weights=w,
                    biases=np.asarray(biases, dtype=np.float64),
                ),
            ),
        )
    )


def naive_conv2d(images, kernel, biases, padding):
    """Reference convolution: explicit loops over every output position."""
    kh, kw, c_in, c_out = kernel.shape
    n, h, w, _ = images.shape
    if padding == "same":
        pt, pl = (kh - 1) // 2, (kw - 1) // 2
        padded = np.zeros((n, h + kh - 1, w + kw - 1, c_in))
        padded[:, pt : pt + h, pl : pl + w, :] = images
        oh, ow = h, w
    else:
        padded = images
        oh, ow = h - kh + 1, w - kw + 1
    out = np.zeros((n, oh, ow, c_out))
    for e in range(n):
        for r in range(oh):
            for c in range(ow):
                patch = padded[e, r : r + kh, c : c + kw, :]
                for f in range(c_out):
                    out[e, r, c, f] = np.sum(patch * kernel[:, :, :, f]) + biases[f]
    return out


class TestForwardBasics:
    def test_dense_hand_case(self):
        model = single_dense([[1.0], [-0.5]], [1.0])
        fwd = mx.forward_all(model, mx.Dataset(examples=np.array([[1.0, 1.0]])))
        assert fwd.layers[0].values[0, 0] == pytest.approx(1.5, abs=0)

    def test_relu_clamps_negative(self):
        model = single_dense([[1.0]], [0.0], activation="relu")
        fwd = mx.forward_all(model, mx.Dataset(examples=np.array([[-2.0]])))
        assert fwd.layers[0].values[0, 0] == 0.0

    def test_tanh_applied(self):
        model = single_dense([[1.0]], [0.0], activation="tanh")
        fwd = mx.forward_all(model, mx.Dataset(examples=np.array([[0.5]])))
        assert fwd.layers[0].values[0, 0] == pytest.approx(np.tanh(0.5), abs=1e-15)

    def test_maxpool_derived_case(self):
        # 4x4 single-channel image holding 0..15 row-major; pooled windows
        # keep their maxima.
        model = mx.validate_model(
            mx.NetworkModel(
                name="p",
                input_shape=(4, 4, 1),
                layers=(
                    mx.LayerSpec(kind="maxpool2x2", activation="none"),
                    mx.LayerSpec(
                        kind="dense",
                        activation="linear",
                        weights=np.eye(4),
                        biases=np.zeros(4),
                    ),
                ),
            )
        )
        data = mx.Dataset(examples=np.arange(16, dtype=np.float64)[None, :])
        fwd = mx.forward_all(model, data)
        assert fwd.layers[0].values.tolist() == [[5.0, 7.0, 13.0, 15.0]]
        assert fwd.layers[1].values.tolist() == [[5.0, 7.0, 13.0, 15.0]]

    def test_odd_spatial_maxpool_floors(self):
        rng = np.random.default_rng(0)
        model = mx.validate_model(
            mx.NetworkModel(
                name="p",
                input_shape=(5, 5, 1),
                layers=(
                    mx.LayerSpec(kind="maxpool2x2", activation="none"),
                    mx.LayerSpec(
                        kind="dense",
                        activation="linear",
                        weights=np.eye(4),
                        biases=np.zeros(4),
                    ),
                ),
            )
        )
        img = rng.normal(size=(1, 25))
        fwd = mx.forward_all(model, mx.Dataset(examples=img))
        grid = img.reshape(5, 5)
        expected = [
            grid[0:2, 0:2].max(),
            grid[0:2, 2:4].max(),
            grid[2:4, 0:2].max(),
            grid[2:4, 2:4].max(),
        ]
        assert np.allclose(fwd.layers[0].values[0], expected, atol=0)

    @pytest.mark.parametrize("padding", ["same", "valid"])
    def test_conv_matches_naive_loops(self, padding):
        rng = np.random.default_rng(9)
        kernel = rng.normal(size=(3, 3, 2, 3))
        biases = rng.normal(size=3)
        out_rows = 36 * 3 if padding == "same" else 16 * 3
        model = mx.validate_model(
            mx.NetworkModel(
                name="c",
                input_shape=(6, 6, 2),
                layers=(
                    mx.LayerSpec(
                        kind="conv2d",
                        activation="linear",
                        weights=kernel,
                        biases=biases,
                        padding=padding,
                        window=(3, 3),
                    ),
                    mx.LayerSpec(
                        kind="dense",
                        activation="linear",
                        weights=np.eye(out_rows),
                        biases=np.zeros(out_rows),
                    ),
                ),
            )
        )
        data = mx.Dataset(examples=rng.normal(size=(4, 72)))
        fwd = mx.forward_all(model, data)
        images = data.examples.reshape(4, 6, 6, 2)
        expected = naive_conv2d(images, kernel, biases, padding)
        got = fwd.layers[0].values.reshape(expected.shape)
        assert np.max(np.abs(got - expected)) < 1e-12

    def test_softmax_rows_normalized(self, toy_cnn, toy_cnn_data):
        fwd = mx.forward_all(toy_cnn, toy_cnn_data)
        out = fwd.layers[-1].values
        assert np.all(out > 0)
        assert np.max(np.abs(out.sum(axis=1) - 1.0)) < 1e-6

    def test_softmax_identity_variant(self):
        model = mx.validate_model(
            mx.NetworkModel(
                name="s",
                input_shape=(3,),
                layers=(mx.LayerSpec(kind="softmax", activation="none"),),
            )
        )
        fwd = mx.forward_all(model, mx.Dataset(examples=np.array([[0.0, 0.0, 10.0]])))
        assert fwd.labels.tolist() == [2]
        assert fwd.layers[0].values[0].sum() == pytest.approx(1.0, abs=1e-12)

    def test_softmax_overflow_safe(self):
        model = mx.validate_model(
            mx.NetworkModel(
                name="s",
                input_shape=(2,),
                layers=(mx.LayerSpec(kind="softmax", activation="none"),),
            )
        )
        fwd = mx.forward_all(model, mx.Dataset(examples=np.array([[1000.0, -1000.0]])))
        assert np.all(np.isfinite(fwd.layers[0].values))
        assert fwd.labels.tolist() == [0]

    @pytest.mark.filterwarnings("ignore:overflow encountered")
    def test_overflow_reported_with_location(self):
        model = single_dense([[1e300]], [0.0])
        with pytest.raises(mx.ValidationError) as exc:
            mx.forward_all(model, mx.Dataset(examples=np.array([[0.0], [1e300]])))
        msg = str(exc.value)
        assert "layer 0" in msg and "row 1" in msg

    def test_shape_mismatch_rejected(self, tiny_dense):
        with pytest.raises(mx.ValidationError):
            mx.forward_all(tiny_dense, mx.Dataset(examples=np.ones((2, 9))))


class TestLabels:
    def test_argmax_and_tie_break(self):
        tensor = mx.ActivationTensor(
            layer_index=0, values=np.array([[0.1, 0.9], [0.5, 0.5]])
        )
        assert mx.argmax_labels(tensor).tolist() == [1, 0]

    def test_empty_tensor_rejected(self):
        tensor = mx.ActivationTensor(layer_index=0, values=np.zeros((0, 0)))
        with pytest.raises(mx.ValidationError):
            mx.argmax_labels(tensor)

    def test_labels_in_range(self, toy_cnn, toy_cnn_data):
        fwd = mx.forward_all(toy_cnn, toy_cnn_data)
        assert fwd.labels.min() >= 0
        assert fwd.labels.max() < 3

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_permutation_equivariance(self, seed):
        model = build_tiny_dense()
        data = make_inputs(model, num=16, seed=seed)
        fwd = mx.forward_all(model, data)
        rng = np.random.default_rng(seed + 1)
        perm = rng.permutation(16)
        shuffled = mx.forward_all(model, mx.Dataset(examples=data.examples[perm]))
        assert np.array_equal(shuffled.labels, fwd.labels[perm])
        for a, b in zip(shuffled.layers, fwd.layers):
            assert np.array_equal(a.values, b.values[perm])


class TestNeuronInputs:
    def test_dense_target_sees_previous_layer(self, toy_cnn, toy_cnn_data):
        fwd = mx.forward_all(toy_cnn, toy_cnn_data)
        fi = mx.neuron_inputs(toy_cnn, fwd, 2, 1)
        assert fi.fan_in == 36
        assert np.array_equal(fi.matrix, fwd.layers[1].values)
        assert np.array_equal(fi.column_ids, np.arange(36))
        # reconstruction: relu of the affine map reproduces the activation
        pre = fi.matrix @ fi.weights + fi.bias
        assert np.max(np.abs(np.maximum(pre, 0) - fwd.layers[2].values[:, 1])) < 1e-12

    def test_layer_zero_target_sees_raw_input(self, tiny_dense, tiny_dense_data):
        fwd = mx.forward_all(tiny_dense, tiny_dense_data)
        fi = mx.neuron_inputs(tiny_dense, fwd, 0, 0)
        assert np.array_equal(fi.matrix, tiny_dense_data.examples)
        assert fi.input_layer == -1

    def test_softmax_target(self, toy_cnn, toy_cnn_data):
        fwd = mx.forward_all(toy_cnn, toy_cnn_data)
        fi = mx.neuron_inputs(toy_cnn, fwd, 3, 2)
        assert fi.fan_in == 5
        assert np.array_equal(fi.weights, toy_cnn.layers[3].weights[:, 2])

    def test_conv_corner_pads_with_zeros(self, toy_cnn, toy_cnn_data):
        fwd = mx.forward_all(toy_cnn, toy_cnn_data)
        fi = mx.neuron_inputs(toy_cnn, fwd, 0, 0)  # position (0,0), filter 0
        assert fi.fan_in == 9
        pad = fi.column_ids < 0
        assert int(pad.sum()) == 5
        assert np.all(fi.matrix[:, pad] == 0.0)
        pre = fi.matrix @ fi.weights + fi.bias
        assert np.max(np.abs(np.maximum(pre, 0) - fwd.layers[0].values[:, 0])) < 1e-12

    def test_conv_interior_ids_and_reconstruction(self, toy_cnn, toy_cnn_data):
        fwd = mx.forward_all(toy_cnn, toy_cnn_data)
        # interior position (2,3), filter 1: flat index (2*6+3)*4 + 1
        neuron = (2 * 6 + 3) * 4 + 1
        fi = mx.neuron_inputs(toy_cnn, fwd, 0, neuron)
        assert np.all(fi.column_ids >= 0)
        expected_ids = [
            (r * 6 + c) * 1 + 0 for r in (1, 2, 3) for c in (2, 3, 4)
        ]
        assert fi.column_ids.tolist() == expected_ids
        pre = fi.matrix @ fi.weights + fi.bias
        assert np.max(np.abs(np.maximum(pre, 0) - fwd.layers[0].values[:, neuron])) < 1e-12

    def test_second_conv_patch_channels(self):
        rng = np.random.default_rng(4)
        model = mx.validate_model(
            mx.NetworkModel(
                name="cc",
                input_shape=(4, 4, 1),
                layers=(
                    mx.LayerSpec(
                        kind="conv2d",
                        activation="relu",
                        weights=f32(rng.normal(0, 0.5, (3, 3, 1, 2))),
                        biases=f32(np.zeros(2)),
                        padding="same",
                        window=(3, 3),
                    ),
                    mx.LayerSpec(
                        kind="conv2d",
                        activation="relu",
                        weights=f32(rng.normal(0, 0.5, (3, 3, 2, 3))),
                        biases=f32(np.zeros(3)),
                        padding="same",
                        window=(3, 3),
                    ),
                    mx.LayerSpec(
                        kind="dense",
                        activation="linear",
                        weights=f32(rng.normal(size=(48, 2))),
                        biases=f32(np.zeros(2)),
                    ),
                ),
            )
        )
        data = make_inputs(model, num=6, seed=8)
        fwd = mx.forward_all(model, data)
        neuron = (1 * 4 + 1) * 3 + 2  # position (1,1), filter 2
        fi = mx.neuron_inputs(model, fwd, 1, neuron)
        assert fi.fan_in == 3 * 3 * 2
        pre = fi.matrix @ fi.weights + fi.bias
        assert np.max(np.abs(np.maximum(pre, 0) - fwd.layers[1].values[:, neuron])) < 1e-12

    def test_weightless_layers_rejected(self, toy_cnn, toy_cnn_data):
        fwd = mx.forward_all(toy_cnn, toy_cnn_data)
        with pytest.raises(mx.ValidationError):
            mx.neuron_inputs(toy_cnn, fwd, 1, 0)

    def test_out_of_range_rejected(self, toy_cnn, toy_cnn_data):
        fwd = mx.forward_all(toy_cnn, toy_cnn_data)
        with pytest.raises(mx.ValidationError):
            mx.neuron_inputs(toy_cnn, fwd, 9, 0)
        with pytest.raises(mx.ValidationError):
            mx.neuron_inputs(toy_cnn, fwd, 2, 99)


def test_tensor_accessors(toy_cnn, toy_cnn_data):
    fwd = mx.forward_all(toy_cnn, toy_cnn_data)
    assert fwd.tensor(-1) is fwd.input_tensor
    assert fwd.tensor(0) is fwd.layers[0]
    assert fwd.layers[0].as_images().shape == (48, 6, 6, 4)
    with pytest.raises(mx.ValidationError):
        fwd.layers[2].as_images()
