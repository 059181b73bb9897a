"""Shared builders for the engine suite: small seeded models and inputs.

Kept outside conftest.py so test modules can import them by name without
colliding with other suites' conftest modules.
"""

from pathlib import Path

import numpy as np

import monrex as mx

FIXTURES = Path(__file__).parent / "fixtures"


def f32(arr) -> np.ndarray:
    """Round-trip through float32 so saved models reload bit-identically."""
    return np.asarray(arr, dtype=np.float32).astype(np.float64)


def build_toy_cnn(seed: int = 7) -> mx.NetworkModel:
    """6x6 grayscale input, one conv block, then dense and softmax heads."""
    rng = np.random.default_rng(seed)
    model = mx.NetworkModel(
        name="toy-cnn",
        input_shape=(6, 6, 1),
        layers=(
            mx.LayerSpec(
                kind="conv2d",
                activation="relu",
                weights=f32(rng.normal(0, 0.6, (3, 3, 1, 4))),
                biases=f32(rng.normal(0, 0.1, 4)),
                padding="same",
                window=(3, 3),
            ),
            mx.LayerSpec(kind="maxpool2x2", activation="none"),
            mx.LayerSpec(
                kind="dense",
                activation="relu",
                weights=f32(rng.normal(0, 0.4, (36, 5))),
                biases=f32(rng.normal(0, 0.1, 5)),
            ),
            mx.LayerSpec(
                kind="softmax",
                activation="none",
                weights=f32(rng.normal(0, 0.7, (5, 3))),
                biases=f32(np.zeros(3)),
            ),
        ),
    )
    return mx.validate_model(model)


def build_tiny_dense(seed: int = 3) -> mx.NetworkModel:
    rng = np.random.default_rng(seed)
    return mx.validate_model(
        mx.NetworkModel(
            name="tiny-dense",
            input_shape=(4,),
            layers=(
                mx.LayerSpec(
                    kind="dense",
                    activation="relu",
                    weights=f32(rng.normal(0, 0.8, (4, 3))),
                    biases=f32(rng.normal(0, 0.2, 3)),
                ),
                mx.LayerSpec(
                    kind="softmax",
                    activation="none",
                    weights=f32(rng.normal(0, 0.8, (3, 2))),
                    biases=f32(np.zeros(2)),
                ),
            ),
        )
    )


def make_inputs(model: mx.NetworkModel, num: int = 48, seed: int = 11) -> mx.Dataset:
    rng = np.random.default_rng(seed)
    return mx.Dataset(examples=f32(rng.uniform(0, 1, (num, model.input_length))))
