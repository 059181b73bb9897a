"""M-of-N rules and their scoring: error, normalized complexity, loss.

A rule fires when at least m of its body literals are true. m = 0 is the
always-true rule and m = N+1 the always-false rule; both count as trivial
and carry zero complexity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .splitter import Literal

# DNF expansion is C(N, m) conjunctions; past this body size it explodes.
DNF_MAX_BODY = 20


@dataclass(frozen=True)
class MofNRule:
    """At-least-m-of-these-literals rule for one target neuron.

    ``total_inputs`` is the target's full fan-in, kept for complexity
    normalization; it is fixed across candidate rules for one target and
    may exceed the body length.
    """

    head: Literal | None
    body: tuple[Literal, ...]
    m: int
    total_inputs: int

    def __post_init__(self):
        n = len(self.body)
        if not 0 <= self.m <= n + 1:
            raise ValidationError(f"m={self.m} outside 0..{n + 1}")
        if self.total_inputs < 1:
            raise ValidationError("total_inputs must be at least 1")
        if n > self.total_inputs:
            raise ValidationError(
                f"body size {n} exceeds total_inputs {self.total_inputs}"
            )

    @property
    def body_size(self) -> int:
        return len(self.body)

    @property
    def is_trivial(self) -> bool:
        return self.m == 0 or self.m == len(self.body) + 1


@dataclass(frozen=True)
class ScoredRule:
    """A rule with its measured error, complexity, and loss at one beta."""

    rule: MofNRule
    error: float
    complexity: float
    loss: float
    beta: float

    def __post_init__(self):
        expected = self.error + self.beta * self.complexity
        if abs(self.loss - expected) > 1e-12:
            raise ValidationError(
                f"loss {self.loss} != error + beta*complexity = {expected}"
            )


def _column_lookup(columns) -> dict[int, int]:
    ids = np.asarray(columns, dtype=np.int64)
    lookup: dict[int, int] = {}
    for pos, ident in enumerate(ids.tolist()):
        lookup.setdefault(ident, pos)
    return lookup


def literal_truths(
    literals, input_matrix: np.ndarray, columns=None
) -> np.ndarray:
    """Boolean matrix (examples x literals) of each literal's truth over the
    input matrix. ``columns`` maps matrix columns to neuron ids; by default
    column j holds neuron j."""
    matrix = np.asarray(input_matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValidationError("input matrix must be 2-d")
    if columns is None:
        lookup = None
    else:
        lookup = _column_lookup(columns)
    out = np.empty((matrix.shape[0], len(literals)), dtype=bool)
    for j, lit in enumerate(literals):
        if lookup is None:
            col = lit.neuron
            if not 0 <= col < matrix.shape[1]:
                raise ValidationError(f"no column for literal neuron {lit.neuron}")
        else:
            if lit.neuron not in lookup:
                raise ValidationError(f"no column for literal neuron {lit.neuron}")
            col = lookup[lit.neuron]
        out[:, j] = lit.truth(matrix[:, col])
    return out


def evaluate_rule(rule: MofNRule, input_matrix, columns=None) -> np.ndarray:
    """Per-example truth of the rule: at least m body literals true."""
    matrix = np.asarray(input_matrix, dtype=np.float64)
    n = len(rule.body)
    if rule.m == 0:
        return np.ones(matrix.shape[0], dtype=bool)
    if rule.m == n + 1:
        return np.zeros(matrix.shape[0], dtype=bool)
    truths = literal_truths(rule.body, matrix, columns)
    return truths.sum(axis=1) >= rule.m


def rule_error(rule: MofNRule, input_matrix, target_truth, columns=None) -> float:
    """Mean disagreement between the rule and the target over the examples."""
    target = np.asarray(target_truth, dtype=bool)
    if target.size == 0:
        raise ValidationError("empty example set")
    fired = evaluate_rule(rule, input_matrix, columns)
    if fired.shape != target.shape:
        raise ValidationError("rule truths and target truths differ in length")
    return float(np.mean(fired != target))


def max_complexity_count(total_inputs: int) -> int:
    """Largest possible m*C(N, m) over legal rules for a given fan-in; the
    normalization denominator's argument. Exact integer arithmetic."""
    if total_inputs < 1:
        raise ValidationError("total_inputs must be at least 1")
    k = (total_inputs + 2) // 2  # ceil((n+1)/2)
    return k * math.comb(total_inputs, k)


def rule_complexity(m: int, n_body: int, total_inputs: int) -> float:
    """Normalized rule complexity in [0, 1]: log(m*C(N,m)) over the log of
    the densest rule a ``total_inputs``-way target admits.

    Trivial rules (m=0 or m=N+1), the 1-of-1 rule, and 1-input targets are
    0 by convention, so no log of a degenerate count is ever taken.
    """
    if total_inputs < 1:
        raise ValidationError("total_inputs must be at least 1")
    if not 0 <= n_body <= total_inputs:
        raise ValidationError(f"body size {n_body} outside 0..{total_inputs}")
    if not 0 <= m <= n_body + 1:
        raise ValidationError(f"m={m} outside 0..{n_body + 1}")
    if m == 0 or m == n_body + 1:
        return 0.0
    count = m * math.comb(n_body, m)
    if count == 1 or total_inputs == 1:
        return 0.0
    return math.log(count) / math.log(max_complexity_count(total_inputs))


def rule_loss(error: float, complexity: float, beta: float) -> float:
    """Scalarized objective: error plus beta-weighted complexity."""
    if not 0.0 <= error <= 1.0:
        raise ValidationError(f"error {error} outside [0, 1]")
    if not 0.0 <= complexity <= 1.0:
        raise ValidationError(f"complexity {complexity} outside [0, 1]")
    if beta < 0:
        raise ValidationError(f"beta {beta} must be non-negative")
    return error + beta * complexity


def score_rule(
    rule: MofNRule, input_matrix, target_truth, beta: float, columns=None
) -> ScoredRule:
    """Bundle a rule with its error, complexity, and loss at one beta."""
    err = rule_error(rule, input_matrix, target_truth, columns)
    comp = rule_complexity(rule.m, rule.body_size, rule.total_inputs)
    return ScoredRule(
        rule=rule, error=err, complexity=comp, loss=rule_loss(err, comp, beta), beta=beta
    )


def to_dnf(rule: MofNRule) -> list[tuple[Literal, ...]]:
    """All C(N, m) size-m conjunctions whose disjunction equals the rule.

    m = 0 yields one empty conjunction (true); m = N+1 yields no
    conjunctions (false).
    """
    n = len(rule.body)
    if n > DNF_MAX_BODY:
        raise ValidationError(f"body size {n} exceeds DNF guard {DNF_MAX_BODY}")
    if rule.m == n + 1:
        return []
    return [tuple(c) for c in itertools.combinations(rule.body, rule.m)]


def evaluate_dnf(conjunctions, input_matrix, columns=None) -> np.ndarray:
    """Truth of a disjunction of literal conjunctions; empty disjunction is
    false, an empty conjunction true."""
    matrix = np.asarray(input_matrix, dtype=np.float64)
    result = np.zeros(matrix.shape[0], dtype=bool)
    for conj in conjunctions:
        if len(conj) == 0:
            result[:] = True
            break
        result |= literal_truths(conj, matrix, columns).all(axis=1)
    return result


def format_rule(rule: MofNRule) -> str:
    """Render as ``M-of-{lit, lit, ...}`` with literals as
    ``x[layer:index]>a`` or the negated form wrapped in a not sign."""
    body = ", ".join(lit.render() for lit in rule.body)
    return f"{rule.m}-of-{{{body}}}"
