"""Weight-ordered M-of-N rule search and layerwise tradeoff sweeps.

For one target the candidate set is every M-of-(first N literals) prefix
rule over the weight-ordered literal list, the per-prefix always-false
rule (M = N+1), and the two empty-body trivial rules. That is quadratic
in the fan-in, against exponentially many arbitrary-subset rules.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .forward import ForwardResult, NeuronInputs, neuron_inputs
from .model_io import NetworkModel
from .rules import MofNRule, ScoredRule, literal_truths, rule_complexity
from .splitter import (
    Literal,
    SplitResult,
    make_input_literals,
    make_target_literal,
    order_inputs,
    select_feature_map_neuron,
)

DEFAULT_BETAS = (0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 1.0)


@dataclass(frozen=True)
class SearchConfig:
    """Sweep settings: the beta grid, an optional body-size cap, and how
    many worker processes score targets."""

    betas: tuple[float, ...] = DEFAULT_BETAS
    max_n: int | None = None
    worker_count: int = 1
    tie_break: str = "loss,complexity,N,M"

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if len(betas) == 0:
            raise ValidationError("beta grid must be non-empty")
        if any(b < 0 for b in betas):
            raise ValidationError("betas must be non-negative")
        if list(betas) != sorted(set(betas)):
            raise ValidationError("betas must be ascending and distinct")
        object.__setattr__(self, "betas", betas)
        if self.worker_count < 1:
            raise ValidationError("worker_count must be positive")
        if self.max_n is not None and self.max_n < 0:
            raise ValidationError("max_n must be non-negative")


@dataclass(frozen=True)
class TradeoffCurve:
    """(beta, mean complexity, mean error) points, ascending in beta."""

    points: tuple[tuple[float, float, float], ...]

    @property
    def betas(self) -> tuple[float, ...]:
        return tuple(p[0] for p in self.points)


@dataclass(frozen=True)
class ExtractionReport:
    """Everything extracted for one target: the head literal, the selected
    rule per requested beta, and the target's own tradeoff curve (which
    always includes the beta = 0 point)."""

    target: tuple[int, int]
    head: Literal
    fan_in: int
    degenerate: bool
    rules: tuple[ScoredRule, ...]
    curve: TradeoffCurve
    oracle_losses: tuple[float, ...] | None = None


@dataclass(frozen=True)
class TargetContext:
    """Prepared per-target state shared by the search and the brute-force
    verifier: the head split, the fan-in, and the weight-ordered literals
    with their precomputed truth columns."""

    layer: int
    target_id: int
    neuron: int
    head: SplitResult
    target_truth: np.ndarray
    inputs: NeuronInputs
    literals: tuple[Literal, ...]
    ordered_truths: np.ndarray


@lru_cache(maxsize=32)
def _complexity_matrix(total_inputs: int, max_n: int) -> np.ndarray:
    """comp[N, M] for every candidate shape; rows beyond M = N+1 unused."""
    out = np.zeros((max_n + 1, max_n + 2), dtype=np.float64)
    for n_body in range(max_n + 1):
        for m in range(n_body + 2):
            out[n_body, m] = rule_complexity(m, n_body, total_inputs)
    return out


def _candidate_table(
    ordered_truths: np.ndarray,
    target_truth: np.ndarray,
    total_inputs: int,
    max_n: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Error and complexity of every candidate, as parallel arrays
    (n_body, m, error, complexity).

    Errors for all M at one N come from class-conditional histograms of
    the prefix true-literal counts, so the whole table costs
    O(n * examples + n^2) instead of a rescan per rule.
    """
    target = np.asarray(target_truth, dtype=bool)
    num = target.size
    if num == 0:
        raise ValidationError("empty example set")
    pos_total = int(target.sum())
    neg_total = num - pos_total

    ns = [0, 0]
    ms = [0, 1]
    errs = [neg_total / num, pos_total / num]

    if max_n > 0:
        prefix = ordered_truths[:, :max_n].cumsum(axis=1, dtype=np.int64)
        for n_body in range(1, max_n + 1):
            counts = prefix[:, n_body - 1]
            h_pos = np.bincount(counts[target], minlength=n_body + 1)
            h_neg = np.bincount(counts[~target], minlength=n_body + 1)
            # ge[M] = examples with at least M true body literals
            ge_pos = np.cumsum(h_pos[::-1])[::-1]
            ge_neg = np.cumsum(h_neg[::-1])[::-1]
            for m in range(1, n_body + 2):
                fired_pos = int(ge_pos[m]) if m <= n_body else 0
                fired_neg = int(ge_neg[m]) if m <= n_body else 0
                ns.append(n_body)
                ms.append(m)
                errs.append((pos_total - fired_pos + fired_neg) / num)

    comp_matrix = _complexity_matrix(total_inputs, max_n)
    n_arr = np.array(ns, dtype=np.int64)
    m_arr = np.array(ms, dtype=np.int64)
    err_arr = np.array(errs, dtype=np.float64)
    comp_arr = comp_matrix[n_arr, m_arr]
    return n_arr, m_arr, err_arr, comp_arr


def _select(table, beta: float) -> tuple[int, int, float, float, float]:
    """Minimum-loss candidate under the fixed tie order
    (loss, complexity, body size, m). Returns (n_body, m, error,
    complexity, loss)."""
    n_arr, m_arr, err_arr, comp_arr = table
    loss = err_arr + beta * comp_arr
    best = int(np.lexsort((m_arr, n_arr, comp_arr, loss))[0])
    return (
        int(n_arr[best]),
        int(m_arr[best]),
        float(err_arr[best]),
        float(comp_arr[best]),
        float(loss[best]),
    )


def _scored_from_selection(
    selection, literals, total_inputs: int, head: Literal | None, beta: float
) -> ScoredRule:
    n_body, m, err, comp, loss = selection
    rule = MofNRule(
        head=head, body=tuple(literals[:n_body]), m=m, total_inputs=total_inputs
    )
    return ScoredRule(rule=rule, error=err, complexity=comp, loss=loss, beta=beta)


def search_neuron(
    head: Literal | None,
    ordered_literals,
    input_matrix,
    target_truth,
    beta: float,
    *,
    columns=None,
    max_n: int | None = None,
) -> ScoredRule:
    """Best candidate rule for one target at one beta.

    ``ordered_literals`` must already be sorted by descending weight
    magnitude; ``input_matrix`` columns are resolved through ``columns``
    (neuron ids) or positionally by neuron id when omitted.
    """
    if beta < 0:
        raise ValidationError("beta must be non-negative")
    literals = tuple(ordered_literals)
    matrix = np.asarray(input_matrix, dtype=np.float64)
    truths = literal_truths(literals, matrix, columns)
    total = max(len(literals), 1)
    cap = len(literals) if max_n is None else min(max_n, len(literals))
    table = _candidate_table(truths, target_truth, total, cap)
    return _scored_from_selection(_select(table, beta), literals, total, head, beta)


def layer_targets(model: NetworkModel, layer: int) -> list[int]:
    """Target ids for a layer: feature maps for conv2d, neurons otherwise."""
    spec = model.layers[layer]
    if not spec.has_weights:
        raise ValidationError(f"{spec.kind} layer has no weights to explain", layer=layer)
    if spec.kind == "conv2d":
        return list(range(model.output_shapes()[layer][2]))
    return list(range(model.layer_width(layer)))


def prepare_target(
    model: NetworkModel,
    activations: ForwardResult,
    labels,
    layer: int,
    target_id: int,
) -> TargetContext:
    """Resolve one target id to its representative neuron, head literal,
    truth vector, fan-in, and weight-ordered literal truth columns."""
    spec = model.layers[layer]
    if spec.kind == "conv2d":
        neuron, head_split = select_feature_map_neuron(
            model, activations, labels, layer, target_id
        )
    else:
        neuron = target_id
        head_split = make_target_literal(model, activations, labels, layer, neuron)

    values = activations.layers[layer].values[:, neuron]
    target_truth = head_split.literal.truth(values)

    fi = neuron_inputs(model, activations, layer, neuron)
    literals = make_input_literals(
        fi.weights,
        fi.matrix,
        target_truth,
        input_layer=fi.input_layer,
        column_ids=fi.column_ids,
    )
    perm = order_inputs(fi.weights)
    truths = np.empty((fi.matrix.shape[0], len(literals)), dtype=bool)
    for j, lit in enumerate(literals):
        truths[:, j] = lit.truth(fi.matrix[:, perm[j]])

    return TargetContext(
        layer=layer,
        target_id=target_id,
        neuron=neuron,
        head=head_split,
        target_truth=target_truth,
        inputs=fi,
        literals=tuple(literals),
        ordered_truths=truths,
    )


def curve_grid(config: SearchConfig) -> tuple[float, ...]:
    """The betas a target's curve reports: the configured grid plus 0."""
    if 0.0 in config.betas:
        return config.betas
    return (0.0, *config.betas)


def extract_target(
    model: NetworkModel,
    activations: ForwardResult,
    labels,
    layer: int,
    target_id: int,
    config: SearchConfig,
) -> ExtractionReport:
    """Full per-target extraction: one selected rule per configured beta
    plus the target's own tradeoff curve."""
    ctx = prepare_target(model, activations, labels, layer, target_id)
    fan_in = ctx.inputs.fan_in
    total = max(fan_in, 1)
    cap = fan_in if config.max_n is None else min(config.max_n, fan_in)
    table = _candidate_table(ctx.ordered_truths, ctx.target_truth, total, cap)

    rules = tuple(
        _scored_from_selection(
            _select(table, beta), ctx.literals, total, ctx.head.literal, beta
        )
        for beta in config.betas
    )
    points = []
    for beta in curve_grid(config):
        _, _, err, comp, _ = _select(table, beta)
        points.append((float(beta), comp, err))
    return ExtractionReport(
        target=(layer, target_id),
        head=ctx.head.literal,
        fan_in=fan_in,
        degenerate=ctx.head.degenerate,
        rules=rules,
        curve=TradeoffCurve(points=tuple(points)),
    )


_WORK: dict = {}


def _layer_worker(target_id: int) -> ExtractionReport:
    w = _WORK
    return extract_target(
        w["model"], w["activations"], w["labels"], w["layer"], target_id, w["config"]
    )


def search_layer(
    model: NetworkModel,
    activations: ForwardResult,
    labels,
    layer: int,
    config: SearchConfig,
) -> list[ExtractionReport]:
    """One report per target in the layer, in target-id order.

    Targets are independent pure computations; with worker_count > 1 they
    run in a fork pool and merge by index, so results are identical for
    any worker count.
    """
    targets = layer_targets(model, layer)
    labels = np.asarray(labels)
    if config.worker_count == 1 or len(targets) <= 1:
        return [
            extract_target(model, activations, labels, layer, t, config)
            for t in targets
        ]

    _WORK.update(
        model=model, activations=activations, labels=labels, layer=layer, config=config
    )
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=config.worker_count) as pool:
            reports = pool.map(_layer_worker, targets, chunksize=1)
    finally:
        _WORK.clear()
    return reports


def sweep_curve(reports) -> TradeoffCurve:
    """Layer curve: per beta, the mean complexity and mean error over all
    reports. Every report must carry the same beta grid."""
    reports = list(reports)
    if not reports:
        raise ValidationError("no reports to aggregate")
    grid = reports[0].curve.betas
    for r in reports:
        if r.curve.betas != grid:
            raise ValidationError("reports disagree on the beta grid")
    points = []
    for i, beta in enumerate(grid):
        comps = [r.curve.points[i][1] for r in reports]
        errs = [r.curve.points[i][2] for r in reports]
        points.append((float(beta), float(np.mean(comps)), float(np.mean(errs))))
    return TradeoffCurve(points=tuple(points))
