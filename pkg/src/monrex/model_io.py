"""Network model and dataset containers plus their on-disk formats.

Models travel as ``.monn`` files: a JSON document whose header (name, input
shape, per-layer kind/activation/padding/window) is human-inspectable and
whose weight arrays are base64-encoded little-endian float32 blobs.
Datasets travel either as CSV or as ``.mond``: magic bytes ``MOND1``, two
little-endian u32 (rows, cols), then rows*cols little-endian float32 values.

Loaded arrays are upcast to float64; all downstream arithmetic runs in
float64 regardless of the 32-bit storage.
"""

from __future__ import annotations

import base64
import binascii
import csv
import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, ValidationError

MONN_FORMAT = "monn/1"
MOND_MAGIC = b"MOND1"

LAYER_KINDS = ("dense", "conv2d", "maxpool2x2", "softmax")
ACTIVATIONS = ("relu", "tanh", "linear", "none")

# Layers that carry no weights never use an activation function; all others
# must name a real one.
_WEIGHTLESS_ACTIVATION = "none"


@dataclass(frozen=True)
class LayerSpec:
    """One layer of a feed-forward/convolutional network.

    Dense weights have shape (n_in, n_out); conv kernels have shape
    (kh, kw, c_in, c_out). Softmax layers may carry an affine map of their
    own or, with weights absent, normalize their input directly.
    """

    kind: str
    activation: str
    weights: np.ndarray | None = None
    biases: np.ndarray | None = None
    padding: str | None = None
    window: tuple[int, int] | None = None

    @property
    def has_weights(self) -> bool:
        return self.weights is not None


@dataclass(frozen=True)
class NetworkModel:
    """A validated, immutable description of a trained network."""

    name: str
    input_shape: tuple[int, ...]
    layers: tuple[LayerSpec, ...] = field(default_factory=tuple)

    def output_shapes(self) -> list[tuple[int, ...]]:
        """Shape produced by each layer, in order; raises on any mismatch."""
        return _propagate_shapes(self)

    @property
    def input_length(self) -> int:
        return int(np.prod(self.input_shape))

    def layer_width(self, layer: int) -> int:
        return int(np.prod(self.output_shapes()[layer]))


@dataclass
class Dataset:
    """Example matrix (num_examples x input_length) with optional labels.

    Labels are carried for reporting only; extraction explains the network's
    own predictions, never ground truth.
    """

    examples: np.ndarray
    labels: np.ndarray | None = None

    @property
    def num_examples(self) -> int:
        return self.examples.shape[0]

    @property
    def num_columns(self) -> int:
        return self.examples.shape[1]


# ---------------------------------------------------------------------------
# validation

def _fail(msg: str, layer=None, field_=None) -> None:
    raise ValidationError(msg, layer=layer, field=field_)


def _check_finite(arr: np.ndarray, layer: int, field_: str) -> None:
    if not np.all(np.isfinite(arr)):
        _fail("non-finite value", layer, field_)


def _propagate_shapes(model: NetworkModel) -> list[tuple[int, ...]]:
    shape = tuple(int(d) for d in model.input_shape)
    if len(shape) not in (1, 3) or any(d < 1 for d in shape):
        _fail(f"input_shape must be (n,) or (h, w, c) with positive dims, got {shape}")
    shapes: list[tuple[int, ...]] = []
    for k, layer in enumerate(model.layers):
        shape = _layer_output_shape(layer, shape, k)
        shapes.append(shape)
    return shapes


def _layer_output_shape(layer: LayerSpec, in_shape: tuple[int, ...], k: int) -> tuple[int, ...]:
    if layer.kind not in LAYER_KINDS:
        _fail(f"unknown layer kind '{layer.kind}'", k, "kind")
    if layer.activation not in ACTIVATIONS:
        _fail(f"unknown activation '{layer.activation}'", k, "activation")

    weightless = layer.kind in ("maxpool2x2",) or (layer.kind == "softmax" and not layer.has_weights)
    if layer.kind in ("maxpool2x2", "softmax"):
        if layer.activation != _WEIGHTLESS_ACTIVATION:
            _fail(f"{layer.kind} layers must use activation 'none'", k, "activation")
    elif layer.activation == _WEIGHTLESS_ACTIVATION:
        _fail(f"{layer.kind} layers require a real activation", k, "activation")

    if weightless and (layer.weights is not None or layer.biases is not None):
        _fail(f"{layer.kind} layer carries unexpected parameters", k, "weights")

    if layer.kind == "conv2d":
        return _conv_output_shape(layer, in_shape, k)
    if layer.kind == "maxpool2x2":
        if len(in_shape) != 3:
            _fail("maxpool2x2 requires a spatial (h, w, c) input", k, "kind")
        h, w, c = in_shape
        if h < 2 or w < 2:
            _fail(f"maxpool2x2 input {in_shape} too small", k, "kind")
        return (h // 2, w // 2, c)
    # dense / softmax: operate on the flattened input
    n_in = int(np.prod(in_shape))
    if layer.kind == "softmax" and not layer.has_weights:
        return (n_in,)
    return _affine_output_shape(layer, n_in, k)


def _conv_output_shape(layer: LayerSpec, in_shape: tuple[int, ...], k: int) -> tuple[int, ...]:
    if len(in_shape) != 3:
        _fail("conv2d requires a spatial (h, w, c) input", k, "kind")
    if layer.weights is None or layer.biases is None:
        _fail("conv2d layer is missing weights or biases", k, "weights")
    if layer.padding not in ("same", "valid"):
        _fail(f"conv2d padding must be 'same' or 'valid', got {layer.padding!r}", k, "padding")
    if layer.weights.ndim != 4:
        _fail(f"conv2d kernel must be 4-d (kh, kw, c_in, c_out), got shape {layer.weights.shape}", k, "weights")
    kh, kw, c_in, c_out = layer.weights.shape
    if layer.window != (kh, kw):
        _fail(f"window {layer.window} disagrees with kernel shape ({kh}, {kw})", k, "window")
    h, w, c = in_shape
    if c_in != c:
        _fail(f"kernel expects {c_in} input channels, previous layer provides {c}", k, "weights")
    if layer.biases.shape != (c_out,):
        _fail(f"bias shape {layer.biases.shape} does not match {c_out} filters", k, "biases")
    _check_finite(layer.weights, k, "weights")
    _check_finite(layer.biases, k, "biases")
    if layer.padding == "same":
        return (h, w, c_out)
    if h < kh or w < kw:
        _fail(f"valid conv window ({kh}, {kw}) exceeds input ({h}, {w})", k, "window")
    return (h - kh + 1, w - kw + 1, c_out)


def _affine_output_shape(layer: LayerSpec, n_in: int, k: int) -> tuple[int, ...]:
    if layer.weights is None or layer.biases is None:
        _fail(f"{layer.kind} layer is missing weights or biases", k, "weights")
    if layer.weights.ndim != 2:
        _fail(f"{layer.kind} weights must be 2-d (n_in, n_out), got shape {layer.weights.shape}", k, "weights")
    w_in, w_out = layer.weights.shape
    if w_in != n_in:
        _fail(f"weights expect {w_in} inputs, previous layer provides {n_in}", k, "weights")
    if layer.biases.shape != (w_out,):
        _fail(f"bias shape {layer.biases.shape} does not match {w_out} units", k, "biases")
    _check_finite(layer.weights, k, "weights")
    _check_finite(layer.biases, k, "biases")
    return (w_out,)


def validate_model(model: NetworkModel) -> NetworkModel:
    """Check every structural invariant; returns the model unchanged."""
    shapes = _propagate_shapes(model)
    if not model.layers:
        _fail("model has no layers")
    last = model.layers[-1]
    if last.kind not in ("softmax", "dense"):
        _fail(f"final layer must be softmax or dense, got '{last.kind}'", len(model.layers) - 1, "kind")
    del shapes
    return model


def check_compatible(model: NetworkModel, data: Dataset) -> None:
    """Dataset rows must cover exactly the model's input length."""
    if data.num_columns != model.input_length:
        _fail(
            f"dataset rows have {data.num_columns} values, "
            f"model input needs {model.input_length}"
        )


# ---------------------------------------------------------------------------
# .monn model files

def _encode_array(arr: np.ndarray) -> dict:
    data = np.ascontiguousarray(arr, dtype="<f4")
    return {
        "shape": [int(d) for d in arr.shape],
        "data": base64.b64encode(data.tobytes()).decode("ascii"),
    }


def _decode_array(obj: dict, layer: int, field_: str) -> np.ndarray:
    try:
        shape = tuple(int(d) for d in obj["shape"])
        raw = base64.b64decode(obj["data"], validate=True)
    except (KeyError, TypeError, ValueError, binascii.Error) as exc:
        raise FormatError(f"bad array blob in layer {layer} {field_}: {exc}") from exc
    expected = int(np.prod(shape)) * 4
    if len(raw) != expected:
        raise FormatError(
            f"array blob in layer {layer} {field_} holds {len(raw)} bytes, "
            f"shape {shape} needs {expected}"
        )
    return np.frombuffer(raw, dtype="<f4").reshape(shape).astype(np.float64)


def load_model(path) -> NetworkModel:
    """Read and validate a ``.monn`` model file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: not a valid model file: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != MONN_FORMAT:
        raise FormatError(f"{path}: missing or unsupported format marker (want {MONN_FORMAT!r})")
    try:
        name = str(doc["name"])
        input_shape = tuple(int(d) for d in doc["input_shape"])
        raw_layers = doc["layers"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: malformed header: {exc}") from exc

    layers = []
    for k, entry in enumerate(raw_layers):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise FormatError(f"{path}: layer {k} is not a layer object")
        window = entry.get("window")
        layers.append(
            LayerSpec(
                kind=entry["kind"],
                activation=entry.get("activation", "none"),
                weights=_decode_array(entry["weights"], k, "weights") if "weights" in entry else None,
                biases=_decode_array(entry["biases"], k, "biases") if "biases" in entry else None,
                padding=entry.get("padding"),
                window=tuple(int(d) for d in window) if window is not None else None,
            )
        )
    return validate_model(NetworkModel(name=name, input_shape=input_shape, layers=tuple(layers)))


def save_model(model: NetworkModel, path) -> None:
    """Write a ``.monn`` file; weights are stored as float32.

    Round-trips exactly when every weight is float32-representable, which
    holds for anything that was itself loaded from a ``.monn`` file.
    """
    validate_model(model)
    doc = {
        "format": MONN_FORMAT,
        "name": model.name,
        "input_shape": [int(d) for d in model.input_shape],
        "layers": [],
    }
    for layer in model.layers:
        entry = {"kind": layer.kind, "activation": layer.activation}
        if layer.kind == "conv2d":
            entry["padding"] = layer.padding
            entry["window"] = [int(d) for d in layer.window]
        if layer.weights is not None:
            entry["weights"] = _encode_array(layer.weights)
        if layer.biases is not None:
            entry["biases"] = _encode_array(layer.biases)
        doc["layers"].append(entry)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# datasets

def load_dataset(path, fmt: str | None = None, csv_header: bool = False) -> Dataset:
    """Read a dataset from CSV or ``.mond``; format inferred from the suffix
    unless given explicitly."""
    if fmt is None:
        fmt = "mond" if str(path).endswith(".mond") else "csv"
    if fmt == "mond":
        return _load_mond(path)
    if fmt == "csv":
        return _load_csv(path, csv_header)
    raise FormatError(f"unknown dataset format '{fmt}' (expected 'csv' or 'mond')")


def _load_mond(path) -> Dataset:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MOND_MAGIC) + 8 or not blob.startswith(MOND_MAGIC):
        raise FormatError(f"{path}: missing MOND1 magic")
    rows, cols = struct.unpack_from("<II", blob, len(MOND_MAGIC))
    payload = blob[len(MOND_MAGIC) + 8:]
    if len(payload) != rows * cols * 4:
        raise FormatError(
            f"{path}: payload holds {len(payload)} bytes, header promises {rows * cols * 4}"
        )
    if rows < 1:
        raise ValidationError(f"{path}: dataset is empty")
    examples = np.frombuffer(payload, dtype="<f4").reshape(rows, cols).astype(np.float64)
    _check_dataset_finite(examples, path)
    return Dataset(examples=examples)


def _load_csv(path, header: bool) -> Dataset:
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for i, record in enumerate(reader):
            if header and i == 0:
                continue
            if not record:
                continue
            try:
                rows.append([float(v) for v in record])
            except ValueError as exc:
                raise FormatError(f"{path}: row {i} is not numeric: {exc}") from exc
    if not rows:
        raise ValidationError(f"{path}: dataset is empty")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise FormatError(f"{path}: row {i} has {len(row)} values, expected {width}")
    examples = np.asarray(rows, dtype=np.float64)
    _check_dataset_finite(examples, path)
    return Dataset(examples=examples)


def _check_dataset_finite(examples: np.ndarray, path) -> None:
    bad = ~np.isfinite(examples)
    if bad.any():
        r, c = map(int, np.argwhere(bad)[0])
        raise ValidationError(f"{path}: non-finite value", row=r, col=c)


def save_dataset(data: Dataset, path) -> None:
    """Write a ``.mond`` binary dataset file."""
    examples = np.ascontiguousarray(data.examples, dtype="<f4")
    rows, cols = examples.shape
    if rows < 1:
        raise ValidationError("refusing to write an empty dataset")
    with open(path, "wb") as fh:
        fh.write(MOND_MAGIC)
        fh.write(struct.pack("<II", rows, cols))
        fh.write(examples.tobytes())


def layer_param_count(layer: LayerSpec) -> int:
    total = 0
    if layer.weights is not None:
        total += int(np.prod(layer.weights.shape))
    if layer.biases is not None:
        total += int(np.prod(layer.biases.shape))
    return total
