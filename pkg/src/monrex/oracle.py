"""Brute-force reference implementations.

These enumerate exhaustively what the search module approximates: every
literal subset and every M, not just weight-ordered prefixes. They exist
to measure the heuristic's optimality gap and to anchor tests, and are
budget-capped because subset enumeration is exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ValidationError
from .rules import (
    MofNRule,
    ScoredRule,
    literal_truths,
    rule_complexity,
    rule_loss,
)
from .splitter import Literal


@dataclass(frozen=True)
class OracleBudget:
    """Hard caps on the exhaustive enumeration size."""

    max_inputs: int = 10
    max_examples: int = 4096


def binary_product_space(n: int, *, budget: OracleBudget | None = None) -> np.ndarray:
    """All 2^n binary input rows, first column most significant, ascending."""
    budget = budget or OracleBudget()
    if n < 1:
        raise ValidationError("need at least one input")
    if n > budget.max_inputs:
        raise BudgetError(f"{n} inputs exceed the budget of {budget.max_inputs}")
    idx = np.arange(2**n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return bits.astype(np.float64)


def perceptron_truth(weights, bias: float, inputs) -> np.ndarray:
    """Active state of a threshold unit on each input row: w.x + b > 0."""
    w = np.asarray(weights, dtype=np.float64)
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != w.size:
        raise ValidationError("inputs must be a matrix with one column per weight")
    return x @ w + float(bias) > 0.0


def exhaustive_best_split(values, classes) -> tuple[float, float]:
    """Reference split scan: recompute the gain of every midpoint from the
    entropy definition directly. Returns (threshold, gain); ties resolve
    to the smallest threshold; constant values give (value, 0.0)."""
    values = np.asarray(values, dtype=np.float64)
    classes = np.asarray(classes)
    distinct = np.unique(values)
    if distinct.size == 1:
        return float(distinct[0]), 0.0

    def h(labels) -> float:
        total = len(labels)
        out = 0.0
        for c in set(labels.tolist()):
            p = np.count_nonzero(labels == c) / total
            out -= p * math.log2(p)
        return out

    base = h(classes)
    n = values.size
    best_t, best_gain = None, -1.0
    for lo, hi in zip(distinct[:-1], distinct[1:]):
        t = (float(lo) + float(hi)) / 2.0
        right = values > t
        gain = (
            base
            - (np.count_nonzero(~right) / n) * h(classes[~right])
            - (np.count_nonzero(right) / n) * h(classes[right])
        )
        if gain > best_gain:
            best_t, best_gain = t, gain
    return best_t, max(best_gain, 0.0)


def exhaustive_best_rule(
    literals,
    input_matrix,
    target_truth,
    beta: float,
    *,
    columns=None,
    budget: OracleBudget | None = None,
    head: Literal | None = None,
) -> ScoredRule:
    """Minimum-loss rule over ALL literal subsets S and all 0 <= M <= |S|+1.

    Ties break exactly as in the search (loss, complexity, body size, M)
    and beyond that by subset bitmask ascending, which makes the result
    canonical. The candidate set strictly contains the weight-ordered
    search's set, so the returned loss is a valid lower bound.
    """
    budget = budget or OracleBudget()
    literals = tuple(literals)
    n = len(literals)
    if n > budget.max_inputs:
        raise BudgetError(f"{n} literals exceed the budget of {budget.max_inputs}")
    matrix = np.asarray(input_matrix, dtype=np.float64)
    target = np.asarray(target_truth, dtype=bool)
    num = target.size
    if num == 0:
        raise ValidationError("empty example set")
    if num > budget.max_examples:
        raise BudgetError(f"{num} examples exceed the budget of {budget.max_examples}")
    if beta < 0:
        raise ValidationError("beta must be non-negative")

    truths = literal_truths(literals, matrix, columns) if n else np.zeros((num, 0), bool)
    pos_total = int(target.sum())
    total_inputs = max(n, 1)

    # counts[mask] = per-example number of true literals in the subset,
    # built by adding one column to the mask with its lowest bit cleared.
    counts = np.zeros((2**n, num), dtype=np.int16)
    sizes = np.zeros(2**n, dtype=np.int64)
    for mask in range(1, 2**n):
        low = (mask & -mask).bit_length() - 1
        counts[mask] = counts[mask & (mask - 1)] + truths[:, low]
        sizes[mask] = sizes[mask & (mask - 1)] + 1

    best_key = None
    best = None
    for mask in range(2**n):
        size = int(sizes[mask])
        c = counts[mask]
        h_pos = np.bincount(c[target], minlength=size + 1)
        h_neg = np.bincount(c[~target], minlength=size + 1)
        ge_pos = np.cumsum(h_pos[::-1])[::-1]
        ge_neg = np.cumsum(h_neg[::-1])[::-1]
        for m in range(size + 2):
            if m == 0:
                err = (num - pos_total) / num
            elif m <= size:
                err = (pos_total - int(ge_pos[m]) + int(ge_neg[m])) / num
            else:
                err = pos_total / num
            comp = rule_complexity(m, size, total_inputs)
            loss = rule_loss(err, comp, beta)
            key = (loss, comp, size, m)
            if best_key is None or key < best_key:
                best_key = key
                best = (mask, m, err, comp, loss)

    mask, m, err, comp, loss = best
    body = tuple(literals[i] for i in range(n) if mask >> i & 1)
    rule = MofNRule(head=head, body=body, m=m, total_inputs=total_inputs)
    return ScoredRule(rule=rule, error=err, complexity=comp, loss=loss, beta=beta)
