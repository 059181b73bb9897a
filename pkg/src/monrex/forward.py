"""Deterministic forward evaluation and fan-in extraction.

Activations are computed per layer in float64 and kept post-activation.
Spatial layers flatten to (h, w, c) row-major order, so column j of a
spatial tensor is position (j // (w*c), (j // c) % w) of channel j % c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ValidationError
from .model_io import Dataset, NetworkModel, check_compatible


@dataclass(frozen=True)
class ActivationTensor:
    """Post-activation values for one layer: (num_examples, num_neurons).

    ``spatial`` is the (h, w, channels) layout for convolutional/pooling
    layers and None for flat layers. ``layer_index`` -1 denotes the raw
    network input.
    """

    layer_index: int
    values: np.ndarray
    spatial: tuple[int, int, int] | None = None

    @property
    def num_examples(self) -> int:
        return self.values.shape[0]

    @property
    def num_neurons(self) -> int:
        return self.values.shape[1]

    def as_images(self) -> np.ndarray:
        if self.spatial is None:
            raise ValidationError(f"layer {self.layer_index} has no spatial layout")
        h, w, c = self.spatial
        return self.values.reshape(self.values.shape[0], h, w, c)


@dataclass(frozen=True)
class ForwardResult:
    """Everything one forward pass produces: the input echo, one tensor per
    layer, and the argmax labels of the final layer."""

    input_tensor: ActivationTensor
    layers: tuple[ActivationTensor, ...]
    labels: np.ndarray

    def tensor(self, layer: int) -> ActivationTensor:
        """Tensor for a model layer; -1 returns the raw input."""
        if layer == -1:
            return self.input_tensor
        return self.layers[layer]


@dataclass(frozen=True)
class NeuronInputs:
    """The exact fan-in of one target neuron.

    ``matrix`` columns align index-for-index with ``weights``. For conv
    targets the columns are the receptive-field patch in (kh, kw, c_in)
    row-major order; cells that fall outside the image under 'same' padding
    are constant 0.0 and get column id -1.
    """

    matrix: np.ndarray
    weights: np.ndarray
    bias: float
    input_layer: int
    column_ids: np.ndarray

    @property
    def fan_in(self) -> int:
        return self.matrix.shape[1]


def _apply_activation(pre: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return np.maximum(pre, 0.0)
    if activation == "tanh":
        return np.tanh(pre)
    return pre  # linear / none


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _conv2d(images: np.ndarray, layer) -> np.ndarray:
    kh, kw, _, _ = layer.weights.shape
    if layer.padding == "same":
        pad_top, pad_left = (kh - 1) // 2, (kw - 1) // 2
        pad_bot, pad_right = kh - 1 - pad_top, kw - 1 - pad_left
        images = np.pad(images, ((0, 0), (pad_top, pad_bot), (pad_left, pad_right), (0, 0)))
    # windows: (num, h_out, w_out, c_in, kh, kw)
    windows = sliding_window_view(images, (kh, kw), axis=(1, 2))
    out = np.einsum("nhwcij,ijcf->nhwf", windows, layer.weights, optimize=True)
    return out + layer.biases


def _maxpool2x2(images: np.ndarray) -> np.ndarray:
    n, h, w, c = images.shape
    h2, w2 = h // 2, w // 2
    trimmed = images[:, : h2 * 2, : w2 * 2, :]
    return trimmed.reshape(n, h2, 2, w2, 2, c).max(axis=(2, 4))


def forward_all(model: NetworkModel, data: Dataset) -> ForwardResult:
    """Compute post-activation tensors for every layer plus predicted labels.

    Pure and deterministic: identical outputs for identical inputs,
    independent of how callers schedule or shard the work.
    """
    check_compatible(model, data)
    shapes = model.output_shapes()
    num = data.num_examples

    x = np.asarray(data.examples, dtype=np.float64)
    input_spatial = tuple(model.input_shape) if len(model.input_shape) == 3 else None
    input_tensor = ActivationTensor(layer_index=-1, values=x, spatial=input_spatial)

    current = x.reshape((num, *model.input_shape))
    tensors = []
    for k, layer in enumerate(model.layers):
        if layer.kind == "conv2d":
            current = _apply_activation(_conv2d(current, layer), layer.activation)
        elif layer.kind == "maxpool2x2":
            current = _maxpool2x2(current)
        elif layer.kind == "dense":
            flat = current.reshape(num, -1)
            current = _apply_activation(flat @ layer.weights + layer.biases, layer.activation)
        else:  # softmax, optionally affine first
            flat = current.reshape(num, -1)
            if layer.has_weights:
                flat = flat @ layer.weights + layer.biases
            current = _softmax_rows(flat)
        values = current.reshape(num, -1)
        bad = ~np.isfinite(values)
        if bad.any():
            example = int(np.argwhere(bad)[0][0])
            raise ValidationError("non-finite activation", layer=k, row=example)
        shape = shapes[k]
        tensors.append(
            ActivationTensor(
                layer_index=k,
                values=values,
                spatial=tuple(shape) if len(shape) == 3 else None,
            )
        )

    labels = argmax_labels(tensors[-1])
    return ForwardResult(input_tensor=input_tensor, layers=tuple(tensors), labels=labels)


def argmax_labels(output: ActivationTensor) -> np.ndarray:
    """Per-example index of the largest output unit; ties go to the lowest
    index."""
    if output.values.size == 0:
        raise ValidationError("empty output tensor")
    return np.argmax(output.values, axis=1).astype(np.int64)


def neuron_inputs(
    model: NetworkModel,
    forward: ForwardResult,
    layer: int,
    neuron: int,
) -> NeuronInputs:
    """Fan-in activations, weight vector, and bias of one target neuron.

    Layer 0 targets read the raw dataset columns. Dense/softmax targets see
    the flattened previous tensor; conv targets see their receptive-field
    patch with zeros where 'same' padding runs off the image.
    """
    if not 0 <= layer < len(model.layers):
        raise ValidationError(f"layer index {layer} out of range")
    spec = model.layers[layer]
    if not spec.has_weights:
        raise ValidationError(f"{spec.kind} layer has no weights to explain", layer=layer)

    prev = forward.tensor(layer - 1)
    width = model.layer_width(layer)
    if not 0 <= neuron < width:
        raise ValidationError(f"neuron {neuron} out of range for layer width {width}", layer=layer)

    if spec.kind in ("dense", "softmax"):
        matrix = prev.values
        return NeuronInputs(
            matrix=matrix,
            weights=spec.weights[:, neuron],
            bias=float(spec.biases[neuron]),
            input_layer=layer - 1,
            column_ids=np.arange(matrix.shape[1], dtype=np.int64),
        )

    # conv2d: decode (row, col, filter) from the flat index, then slice the
    # padded previous image around that position.
    out_h, out_w, out_c = model.output_shapes()[layer]
    r, rem = divmod(neuron, out_w * out_c)
    col, f = divmod(rem, out_c)
    kh, kw, c_in, _ = spec.weights.shape
    images = prev.as_images()
    _, in_h, in_w, _ = images.shape

    if spec.padding == "same":
        pad_top, pad_left = (kh - 1) // 2, (kw - 1) // 2
        r0, c0 = r - pad_top, col - pad_left
    else:
        r0, c0 = r, col

    num = images.shape[0]
    patch = np.zeros((num, kh, kw, c_in), dtype=np.float64)
    ids = np.full((kh, kw, c_in), -1, dtype=np.int64)
    rows = slice(max(r0, 0), min(r0 + kh, in_h))
    cols = slice(max(c0, 0), min(c0 + kw, in_w))
    patch[:, rows.start - r0 : rows.stop - r0, cols.start - c0 : cols.stop - c0, :] = (
        images[:, rows, cols, :]
    )
    rr, cc = np.meshgrid(np.arange(rows.start, rows.stop), np.arange(cols.start, cols.stop), indexing="ij")
    flat = (rr * in_w + cc)[:, :, None] * c_in + np.arange(c_in)[None, None, :]
    ids[rows.start - r0 : rows.stop - r0, cols.start - c0 : cols.stop - c0, :] = flat

    return NeuronInputs(
        matrix=patch.reshape(num, -1),
        weights=spec.weights[:, :, :, f].ravel(),
        bias=float(spec.biases[f]),
        input_layer=layer - 1,
        column_ids=ids.ravel(),
    )
