"""Torch reference networks and their conversion to the exchange format.

Weight layout bridges: torch Linear stores (out, in) and Conv2d stores
(out_c, in_c, kh, kw); exports transpose to (in, out) and
(kh, kw, c_in, c_out). Image tensors train as NCHW but flatten for dense
layers in height, width, channel order so exported dense weights line up
with the evaluator's row-major image flattening.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from monrex import LayerSpec, NetworkModel, validate_model

from .specs import TrainSpec


def _act_module(name: str) -> nn.Module:
    return nn.Tanh() if name == "tanh" else nn.ReLU()


def _f32(t: torch.Tensor) -> np.ndarray:
    # round through float32 so the in-memory model equals its reload
    return t.detach().cpu().numpy().astype(np.float32).astype(np.float64)


def _dense_spec(linear: nn.Linear, activation: str) -> LayerSpec:
    return LayerSpec(
        kind="dense",
        activation=activation,
        weights=_f32(linear.weight).T,
        biases=_f32(linear.bias),
    )


def _softmax_spec(linear: nn.Linear) -> LayerSpec:
    return LayerSpec(
        kind="softmax",
        activation="none",
        weights=_f32(linear.weight).T,
        biases=_f32(linear.bias),
    )


def _conv_spec(conv: nn.Conv2d, activation: str) -> LayerSpec:
    return LayerSpec(
        kind="conv2d",
        activation=activation,
        weights=_f32(conv.weight).transpose(2, 3, 1, 0),
        biases=_f32(conv.bias),
        padding="same",
        window=(conv.kernel_size[0], conv.kernel_size[1]),
    )


def _nhwc_flat(t: torch.Tensor) -> torch.Tensor:
    return t.permute(0, 2, 3, 1).reshape(t.shape[0], -1)


class Mlp16x8(nn.Module):
    """Two hidden layers of 16 and 8 units, then a softmax readout."""

    def __init__(self, in_dim: int, num_classes: int, activation: str):
        super().__init__()
        self.activation = activation
        self.act = _act_module(activation)
        self.hidden1 = nn.Linear(in_dim, 16)
        self.hidden2 = nn.Linear(16, 8)
        self.head = nn.Linear(8, num_classes)

    def forward(self, x):
        h = self.act(self.hidden1(x))
        h = self.act(self.hidden2(h))
        return self.head(h)

    def to_layers(self) -> tuple[LayerSpec, ...]:
        return (
            _dense_spec(self.hidden1, self.activation),
            _dense_spec(self.hidden2, self.activation),
            _softmax_spec(self.head),
        )

    @torch.no_grad()
    def stepwise(self, x: torch.Tensor) -> list[torch.Tensor]:
        h1 = self.act(self.hidden1(x))
        h2 = self.act(self.hidden2(h1))
        probs = torch.softmax(self.head(h2), dim=1)
        return [h1, h2, probs]


class DeskCnn(nn.Module):
    """Conv-pool-conv-pool-dense-softmax on 8x8 single-channel images.

    The tanh variant switches only the two conv layers; the hidden dense
    stays relu in both variants.
    """

    # readout sparsity: concentrates each class's evidence on few dense
    # units so the trained net admits small faithful rules
    head_l1 = 1e-3

    def __init__(self, num_classes: int, activation: str):
        super().__init__()
        self.activation = activation
        self.act = _act_module(activation)
        self.conv1 = nn.Conv2d(1, 16, 3, padding=1)
        self.conv2 = nn.Conv2d(16, 8, 3, padding=1)
        self.pool = nn.MaxPool2d(2)
        self.dense = nn.Linear(2 * 2 * 8, 128)
        self.head = nn.Linear(128, num_classes)
        # reconstruction path for the unsupervised phase
        self.decoder = nn.Sequential(
            nn.Upsample(scale_factor=2, mode="nearest"),
            nn.Conv2d(8, 16, 3, padding=1),
            _act_module(activation),
            nn.Upsample(scale_factor=2, mode="nearest"),
            nn.Conv2d(16, 1, 3, padding=1),
        )

    def encode(self, x):
        h = self.pool(self.act(self.conv1(x)))
        return self.pool(self.act(self.conv2(h)))

    def forward(self, x):
        h = _nhwc_flat(self.encode(x))
        return self.head(torch.relu(self.dense(h)))

    def reconstruct(self, x):
        return self.decoder(self.encode(x))

    def encoder_parameters(self):
        for module in (self.conv1, self.conv2, self.decoder):
            yield from module.parameters()

    def head_parameters(self):
        for module in (self.dense, self.head):
            yield from module.parameters()

    def to_layers(self) -> tuple[LayerSpec, ...]:
        return (
            _conv_spec(self.conv1, self.activation),
            LayerSpec(kind="maxpool2x2", activation="none"),
            _conv_spec(self.conv2, self.activation),
            LayerSpec(kind="maxpool2x2", activation="none"),
            _dense_spec(self.dense, "relu"),
            _softmax_spec(self.head),
        )

    @torch.no_grad()
    def stepwise(self, x: torch.Tensor) -> list[torch.Tensor]:
        c1 = self.act(self.conv1(x))
        p1 = self.pool(c1)
        c2 = self.act(self.conv2(p1))
        p2 = self.pool(c2)
        d = torch.relu(self.dense(_nhwc_flat(p2)))
        probs = torch.softmax(self.head(d), dim=1)
        return [_nhwc_flat(c1), _nhwc_flat(p1), _nhwc_flat(c2), _nhwc_flat(p2), d, probs]


class IdentityPixel(nn.Module):
    """Degenerate one-pixel autoencoder with a two-way softmax readout."""

    def __init__(self, num_classes: int):
        super().__init__()
        self.encoder = nn.Linear(1, 1)
        self.decoder = nn.Linear(1, 1)
        self.head = nn.Linear(1, num_classes)

    def forward(self, x):
        return self.head(self.encoder(x))

    def reconstruct(self, x):
        return self.decoder(self.encoder(x))

    def encoder_parameters(self):
        yield from self.encoder.parameters()
        yield from self.decoder.parameters()

    def head_parameters(self):
        yield from self.head.parameters()

    def to_layers(self) -> tuple[LayerSpec, ...]:
        return (
            _dense_spec(self.encoder, "linear"),
            _softmax_spec(self.head),
        )

    @torch.no_grad()
    def stepwise(self, x: torch.Tensor) -> list[torch.Tensor]:
        enc = self.encoder(x)
        return [enc, torch.softmax(self.head(enc), dim=1)]


def build_network(spec: TrainSpec, input_shape: tuple[int, ...], num_classes: int):
    if spec.architecture == "mlp-16-8":
        return Mlp16x8(int(np.prod(input_shape)), num_classes, spec.activation)
    if spec.architecture == "cnn-8x8":
        return DeskCnn(num_classes, spec.activation)
    return IdentityPixel(num_classes)


def to_network_model(net, name: str, input_shape: tuple[int, ...]) -> NetworkModel:
    """Freeze the torch parameters into a validated exchange-format model."""
    return validate_model(
        NetworkModel(name=name, input_shape=tuple(input_shape), layers=net.to_layers())
    )


def as_torch_batch(x: np.ndarray, input_shape: tuple[int, ...]) -> torch.Tensor:
    """Flat rows to the tensor layout the torch nets train on."""
    t = torch.from_numpy(np.ascontiguousarray(x, dtype=np.float32))
    if len(input_shape) == 3:
        h, w, c = input_shape
        return t.reshape(-1, h, w, c).permute(0, 3, 1, 2)
    return t.reshape(-1, int(np.prod(input_shape)))


def reference_activations(net, x: np.ndarray, input_shape) -> list[np.ndarray]:
    """Per-layer activations on probe rows, computed wholly in torch."""
    batch = as_torch_batch(x, input_shape)
    return [step.numpy().astype(np.float32) for step in net.stepwise(batch)]
