"""Training loops and the three-file export.

Each run writes ``<id>.monn`` (the trained model), ``<id>.mond`` (the
eval split), and ``<id>.acts`` (torch-computed activations for the first
32 eval rows at every layer, the cross-implementation reference).
"""

from __future__ import annotations

import base64
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from monrex import Dataset, NetworkModel, save_dataset, save_model

from .data import TrainingData, load_training_data
from .nets import as_torch_batch, build_network, reference_activations, to_network_model
from .specs import ACCURACY_FLOORS, TrainSpec

ACTS_FORMAT = "monacts/1"
PROBE_COUNT = 32


class TrainingDiverged(RuntimeError):
    """Raised when a loss goes non-finite during training."""


@dataclass(frozen=True)
class TrainResult:
    spec_id: str
    model: NetworkModel
    train_accuracy: float
    eval_accuracy: float
    model_path: Path
    data_path: Path
    acts_path: Path


def _b64(arr: np.ndarray) -> str:
    return base64.b64encode(
        np.ascontiguousarray(arr, dtype="<f4").tobytes()
    ).decode("ascii")


def _check_finite(loss: torch.Tensor, epoch: int) -> None:
    if not torch.isfinite(loss):
        raise TrainingDiverged(f"non-finite loss at epoch {epoch}")


def _batches(num: int, batch_size: int, generator: torch.Generator):
    order = torch.randperm(num, generator=generator)
    for start in range(0, num, batch_size):
        yield order[start : start + batch_size]


def _train_supervised(net, x, y, epochs: int, seed: int, parameters=None) -> None:
    opt = torch.optim.Adam(
        net.parameters() if parameters is None else list(parameters), lr=1e-3
    )
    loss_fn = torch.nn.CrossEntropyLoss()
    l1 = getattr(net, "head_l1", 0.0)
    gen = torch.Generator().manual_seed(seed)
    batch_size = 128 if len(x) > 256 else len(x)
    for epoch in range(epochs):
        for idx in _batches(len(x), batch_size, gen):
            opt.zero_grad()
            loss = loss_fn(net(x[idx]), y[idx])
            if l1:
                loss = loss + l1 * net.head.weight.abs().sum()
            _check_finite(loss, epoch)
            loss.backward()
            opt.step()


def _train_autoencoder(net, x, epochs: int, seed: int) -> None:
    opt = torch.optim.Adam(list(net.encoder_parameters()), lr=1e-3)
    loss_fn = torch.nn.MSELoss()
    gen = torch.Generator().manual_seed(seed ^ 0xAE)
    batch_size = 128 if len(x) > 256 else len(x)
    for epoch in range(epochs):
        for idx in _batches(len(x), batch_size, gen):
            opt.zero_grad()
            loss = loss_fn(net.reconstruct(x[idx]), x[idx])
            _check_finite(loss, epoch)
            loss.backward()
            opt.step()


@torch.no_grad()
def _accuracy(net, x: torch.Tensor, y: torch.Tensor) -> float:
    predicted = net(x).argmax(dim=1)
    return float((predicted == y).to(torch.float64).mean())


def train_network(spec: TrainSpec, data: TrainingData):
    """Run the recipe's training mode; returns the fitted torch net."""
    torch.manual_seed(spec.seed)
    net = build_network(spec, data.input_shape, data.num_classes)
    x = as_torch_batch(data.train_x, data.input_shape)
    y = torch.from_numpy(data.train_y)
    if spec.mode == "autoencoder-then-softmax":
        _train_autoencoder(net, x, spec.epochs, spec.seed)
        # encoder features frozen; only the readout stack learns labels
        _train_supervised(
            net, x, y, spec.epochs, spec.seed, parameters=net.head_parameters()
        )
    else:
        _train_supervised(net, x, y, spec.epochs, spec.seed)
    net.eval()
    return net


def write_activation_dump(
    net, data: TrainingData, model_name: str, path: Path
) -> np.ndarray:
    """Dump the torch-side activations for the probe rows; returns them."""
    probes = data.eval_x[:PROBE_COUNT]
    layers = reference_activations(net, probes, data.input_shape)
    payload = {
        "format": ACTS_FORMAT,
        "model": model_name,
        "probe_count": int(len(probes)),
        "input": {"shape": list(probes.shape), "data": _b64(probes)},
        "layers": [
            {"layer": k, "shape": list(arr.shape), "data": _b64(arr)}
            for k, arr in enumerate(layers)
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return probes


def read_activation_dump(path) -> tuple[np.ndarray, list[np.ndarray]]:
    """Load a dump back as (probe inputs, per-layer activation matrices)."""
    data = json.loads(Path(path).read_text())
    if data.get("format") != ACTS_FORMAT:
        raise ValueError(f"{path}: missing or unknown format tag")

    def decode(entry):
        raw = np.frombuffer(base64.b64decode(entry["data"]), dtype="<f4")
        return raw.reshape(entry["shape"]).astype(np.float64)

    layers = sorted(data["layers"], key=lambda e: e["layer"])
    return decode(data["input"]), [decode(e) for e in layers]


def train_and_export(spec: TrainSpec, spec_id: str, out_dir) -> TrainResult:
    """Train one recipe and write its three export files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = load_training_data(spec.dataset, spec.architecture, spec.seed)
    net = train_network(spec, data)

    train_acc = _accuracy(
        net, as_torch_batch(data.train_x, data.input_shape), torch.from_numpy(data.train_y)
    )
    eval_acc = _accuracy(
        net, as_torch_batch(data.eval_x, data.input_shape), torch.from_numpy(data.eval_y)
    )
    # the one-pixel smoke architecture is not meant to hit dataset floors
    floor = (
        None
        if spec.architecture == "identity-1px"
        else ACCURACY_FLOORS.get(spec.dataset)
    )
    if floor is not None and train_acc < floor:
        warnings.warn(
            f"{spec_id}: train accuracy {train_acc:.3f} below the "
            f"{floor:.2f} sanity floor; exporting anyway",
            stacklevel=2,
        )

    model = to_network_model(net, spec_id, data.input_shape)
    model_path = out / f"{spec_id}.monn"
    data_path = out / f"{spec_id}.mond"
    acts_path = out / f"{spec_id}.acts"
    save_model(model, model_path)
    save_dataset(Dataset(examples=data.eval_x.astype(np.float64)), data_path)
    write_activation_dump(net, data, f"{spec_id}.monn", acts_path)
    return TrainResult(
        spec_id=spec_id,
        model=model,
        train_accuracy=train_acc,
        eval_accuracy=eval_acc,
        model_path=model_path,
        data_path=data_path,
        acts_path=acts_path,
    )
