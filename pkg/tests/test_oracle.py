"""Brute-force reference enumerators: budgets, canonical ties, lower bounds."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import monrex as mx
from monrex.oracle import (
    OracleBudget,
    binary_product_space,
    exhaustive_best_rule,
    exhaustive_best_split,
    perceptron_truth,
)


def lit(neuron, threshold=0.5, negated=False):
    return mx.Literal(layer=0, neuron=neuron, threshold=threshold, negated=negated)


class TestProductSpace:
    def test_three_input_rows(self):
        space = binary_product_space(3)
        assert space.shape == (8, 3)
        assert space[0].tolist() == [0.0, 0.0, 0.0]
        assert space[1].tolist() == [0.0, 0.0, 1.0]
        assert space[4].tolist() == [1.0, 0.0, 0.0]
        assert space[7].tolist() == [1.0, 1.0, 1.0]

    def test_budget_enforced(self):
        with pytest.raises(mx.BudgetError):
            binary_product_space(11)
        space = binary_product_space(11, budget=OracleBudget(max_inputs=12))
        assert space.shape == (2048, 11)

    def test_degenerate_size(self):
        with pytest.raises(mx.ValidationError):
            binary_product_space(0)


class TestPerceptronTruth:
    def test_and_gate(self):
        space = binary_product_space(2)
        truth = perceptron_truth(np.array([1.0, 1.0]), -1.5, space)
        assert truth.tolist() == [False, False, False, True]

    def test_or_gate(self):
        space = binary_product_space(2)
        truth = perceptron_truth(np.array([1.0, 1.0]), -0.5, space)
        assert truth.tolist() == [False, True, True, True]

    def test_strict_inequality_at_zero(self):
        truth = perceptron_truth(np.array([1.0]), 0.0, np.array([[0.0], [1.0]]))
        assert truth.tolist() == [False, True]

    def test_shape_guard(self):
        with pytest.raises(mx.ValidationError):
            perceptron_truth(np.ones(3), 0.0, np.ones((4, 2)))


class TestExhaustiveSplit:
    def test_clean_case(self):
        t, g = exhaustive_best_split(
            np.array([0.0, 1.0, 2.0, 3.0, 4.0, 5.0]), np.array([0, 0, 0, 1, 1, 1])
        )
        assert t == 2.5 and g == pytest.approx(1.0, abs=1e-12)

    def test_constant(self):
        t, g = exhaustive_best_split(np.full(4, 2.0), np.array([0, 1, 0, 1]))
        assert (t, g) == (2.0, 0.0)

    def test_agrees_with_fast_splitter(self):
        rng = np.random.default_rng(77)
        for _ in range(30):
            values = np.round(rng.normal(size=20), 1)
            labels = rng.integers(0, 3, size=20)
            t, g = exhaustive_best_split(values, labels)
            res = mx.best_split_vs_labels(values, labels)
            assert res.literal.threshold == pytest.approx(t, abs=0)
            assert res.info_gain == pytest.approx(g, abs=1e-12)


class TestExhaustiveRule:
    def test_single_perfect_literal(self):
        matrix = binary_product_space(3)
        target = matrix[:, 1] > 0.5
        best = exhaustive_best_rule([lit(0), lit(1), lit(2)], matrix, target, 0.0)
        assert best.loss == 0.0
        assert best.rule.body == (lit(1),)
        assert best.rule.m == 1

    def test_parity_floor(self):
        # XOR is not linearly separable; best achievable error here is 0.25
        matrix = binary_product_space(2)
        target = matrix.sum(axis=1) == 1.0
        best = exhaustive_best_rule([lit(0), lit(1)], matrix, target, 0.0)
        assert best.error == pytest.approx(0.25, abs=0)

    def test_budget_guards(self):
        many = [lit(i) for i in range(11)]
        with pytest.raises(mx.BudgetError):
            exhaustive_best_rule(many, np.zeros((2, 11)), np.ones(2, bool), 0.0)
        with pytest.raises(mx.BudgetError):
            exhaustive_best_rule(
                [lit(0)],
                np.zeros((5000, 1)),
                np.ones(5000, bool),
                0.0,
            )
        with pytest.raises(mx.ValidationError):
            exhaustive_best_rule([lit(0)], np.zeros((0, 1)), np.zeros(0, bool), 0.0)

    def test_canonical_tie_prefers_low_bitmask(self):
        # two identical columns: subsets {0} and {1} score the same, and
        # the ascending-mask scan must return the first
        matrix = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
        target = np.array([False, True, True, False])
        best = exhaustive_best_rule([lit(0), lit(1)], matrix, target, 0.05)
        assert best.rule.body == (lit(0),)

    def test_beta_zero_start_matches_selection_keys(self):
        rng = np.random.default_rng(5)
        matrix = rng.random((24, 4))
        target = rng.random(24) > 0.5
        body = [lit(i) for i in range(4)]
        best = exhaustive_best_rule(body, matrix, target, 0.3)
        # independently recompute via direct scoring of every subset
        want = None
        for r in range(5):
            for subset in itertools.combinations(range(4), r):
                sub = tuple(body[i] for i in subset)
                for m in range(len(sub) + 2):
                    rule = mx.MofNRule(head=None, body=sub, m=m, total_inputs=4)
                    s = mx.score_rule(rule, matrix, target, 0.3)
                    key = (s.loss, s.complexity, len(sub), m)
                    if want is None or key < want[0]:
                        want = (key, s)
        assert best.loss == pytest.approx(want[1].loss, abs=0)
        assert best.complexity == pytest.approx(want[1].complexity, abs=0)
        assert best.rule.m == want[1].rule.m
        assert best.rule.body_size == want[1].rule.body_size

    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 10_000), beta=st.sampled_from([0.0, 0.1, 0.5]))
    def test_lower_bounds_prefix_search(self, seed, beta):
        rng = np.random.default_rng(seed)
        matrix = rng.random((40, 5))
        target = rng.random(40) > 0.5
        weights = rng.normal(size=5)
        body = mx.make_input_literals(weights, matrix, target, input_layer=0)
        unordered = sorted(body, key=lambda l: l.neuron)
        scored = mx.search_neuron(None, body, matrix, target, beta)
        best = exhaustive_best_rule(unordered, matrix, target, beta)
        assert best.loss <= scored.loss + 1e-12

    def test_head_carried_through(self):
        matrix = binary_product_space(2)
        target = matrix[:, 0] > 0.5
        head = mx.Literal(layer=3, neuron=1, threshold=0.2)
        best = exhaustive_best_rule([lit(0), lit(1)], matrix, target, 0.0, head=head)
        assert best.rule.head == head
