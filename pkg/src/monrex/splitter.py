"""Threshold selection by information gain, and literal construction.

A literal is a thresholded test on one neuron's activation. Thresholds are
chosen from midpoints between consecutive distinct observed values, taking
the split that most reduces Shannon entropy of the target variable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError
from .forward import ForwardResult
from .model_io import NetworkModel


@dataclass(frozen=True)
class Literal:
    """Thresholded neuron test: true iff activation > threshold, with the
    sense inverted when negated. Ties at the threshold fall to the negated
    side."""

    layer: int
    neuron: int
    threshold: float
    negated: bool = False

    def truth(self, values: np.ndarray) -> np.ndarray:
        above = np.asarray(values, dtype=np.float64) > self.threshold
        return ~above if self.negated else above

    def render(self) -> str:
        base = f"x[{self.layer}:{self.neuron}]>{self.threshold!r}"
        return f"¬({base})" if self.negated else base


@dataclass(frozen=True)
class SplitResult:
    """Outcome of one threshold search. ``candidate_count`` is how many
    midpoints were scanned; 0 with ``degenerate`` set means the values were
    constant and the threshold sits at that constant."""

    literal: Literal
    info_gain: float
    candidate_count: int
    degenerate: bool = False


def entropy(counts) -> float:
    """Shannon entropy in bits of a histogram; 0 log 0 counts as 0."""
    arr = np.asarray(counts, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("histogram must be a non-empty vector")
    if np.any(arr < 0):
        raise ValidationError("histogram counts must be non-negative")
    total = arr.sum()
    if total == 0:
        raise ValidationError("histogram has no mass")
    p = arr[arr > 0] / total
    return float(-(p * np.log2(p)).sum())


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = counts / totals
        terms = np.where(counts > 0, p * np.log2(np.where(counts > 0, p, 1.0)), 0.0)
    return -terms.sum(axis=1)


def _best_split(values: np.ndarray, classes: np.ndarray, layer: int, neuron: int) -> SplitResult:
    values = np.asarray(values, dtype=np.float64)
    classes = np.asarray(classes)
    if values.ndim != 1 or classes.shape != values.shape:
        raise ValidationError("values and target must be equal-length vectors")
    n = values.size
    if n < 2:
        raise ValidationError("need at least 2 examples to split")

    order = np.argsort(values, kind="stable")
    v = values[order]
    _, inv = np.unique(classes, return_inverse=True)
    c = inv.reshape(-1)[order]
    num_classes = int(c.max()) + 1

    boundaries = np.nonzero(v[1:] != v[:-1])[0]
    if boundaries.size == 0:
        literal = Literal(layer=layer, neuron=neuron, threshold=float(v[0]))
        return SplitResult(literal=literal, info_gain=0.0, candidate_count=0, degenerate=True)

    one_hot = np.zeros((n, num_classes), dtype=np.float64)
    one_hot[np.arange(n), c] = 1.0
    cum = one_hot.cumsum(axis=0)
    total = cum[-1]

    left = cum[boundaries]
    right = total - left
    n_left = (boundaries + 1).astype(np.float64)
    n_right = n - n_left
    base = _entropy_rows(total[None, :])[0]
    gains = base - (n_left / n) * _entropy_rows(left) - (n_right / n) * _entropy_rows(right)

    # argmax returns the first maximum; boundaries are in ascending value
    # order, so exact ties resolve to the smallest threshold.
    best = int(np.argmax(gains))
    i = boundaries[best]
    threshold = float((v[i] + v[i + 1]) / 2.0)
    literal = Literal(layer=layer, neuron=neuron, threshold=threshold)
    return SplitResult(
        literal=literal,
        info_gain=float(max(gains[best], 0.0)),
        candidate_count=int(boundaries.size),
    )


def best_split_vs_labels(values, labels, *, layer: int = -1, neuron: int = -1) -> SplitResult:
    """Best threshold on ``values`` for predicting integer ``labels``."""
    return _best_split(np.asarray(values), np.asarray(labels), layer, neuron)


def best_split_vs_literal(values, target_truth, *, layer: int = -1, neuron: int = -1) -> SplitResult:
    """Best threshold on ``values`` for predicting a boolean target."""
    truth = np.asarray(target_truth, dtype=bool)
    return _best_split(np.asarray(values), truth.astype(np.int64), layer, neuron)


def make_target_literal(
    model: NetworkModel,
    activations: ForwardResult,
    labels: np.ndarray,
    layer: int,
    neuron: int,
) -> SplitResult:
    """Positive literal on the target neuron at the threshold that best
    separates the network's predicted labels. Constant neurons come back
    flagged degenerate with the threshold at the constant."""
    if not 0 <= layer < len(model.layers):
        raise ValidationError(f"layer index {layer} out of range")
    if not 0 <= neuron < model.layer_width(layer):
        raise ValidationError(f"neuron {neuron} out of range", layer=layer)
    values = activations.layers[layer].values[:, neuron]
    return _best_split(values, np.asarray(labels), layer, neuron)


def order_inputs(weights) -> np.ndarray:
    """Column permutation by descending |weight|; equal magnitudes keep
    ascending column order (so zero weights land last, in index order)."""
    w = np.asarray(weights, dtype=np.float64)
    return np.lexsort((np.arange(w.size), -np.abs(w)))


def make_input_literals(
    weights,
    input_matrix,
    target_truth,
    *,
    input_layer: int = 0,
    column_ids=None,
) -> list[Literal]:
    """One literal per input column, ordered by descending |weight|.

    Polarity follows the weight sign (negative weights negate; zero weights
    stay positive). Each threshold maximizes information gain against the
    target truth vector over that column's values.
    """
    w = np.asarray(weights, dtype=np.float64)
    matrix = np.asarray(input_matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != w.size:
        raise ValidationError(
            f"input matrix has {matrix.shape[1] if matrix.ndim == 2 else '?'} columns, "
            f"weight vector has {w.size}"
        )
    if column_ids is None:
        ids = np.arange(w.size, dtype=np.int64)
    else:
        ids = np.asarray(column_ids, dtype=np.int64)
        if ids.shape != (w.size,):
            raise ValidationError("column_ids length must match weight vector")

    truth = np.asarray(target_truth, dtype=bool)
    literals = []
    for col in order_inputs(w):
        split = best_split_vs_literal(
            matrix[:, col], truth, layer=input_layer, neuron=int(ids[col])
        )
        literal = split.literal
        if w[col] < 0:
            literal = replace(literal, negated=True)
        literals.append(literal)
    return literals


def select_feature_map_neuron(
    model: NetworkModel,
    activations: ForwardResult,
    labels: np.ndarray,
    layer: int,
    feature_map: int,
) -> tuple[int, SplitResult]:
    """Representative neuron of one convolutional feature map: the spatial
    position whose best split has maximal gain vs the predicted labels.
    Ties go to the lowest flat index."""
    if not 0 <= layer < len(model.layers):
        raise ValidationError(f"layer index {layer} out of range")
    if model.layers[layer].kind != "conv2d":
        raise ValidationError("feature maps exist only on conv2d layers", layer=layer)
    h, w, c = model.output_shapes()[layer]
    if not 0 <= feature_map < c:
        raise ValidationError(f"feature map {feature_map} out of range for {c} filters", layer=layer)

    tensor = activations.layers[layer]
    labels = np.asarray(labels)
    best_neuron = -1
    best_split: SplitResult | None = None
    for pos in range(h * w):
        neuron = pos * c + feature_map
        split = best_split_vs_labels(tensor.values[:, neuron], labels, layer=layer, neuron=neuron)
        if best_split is None or split.info_gain > best_split.info_gain:
            best_neuron, best_split = neuron, split
    return best_neuron, best_split
