"""Walk one threshold unit from weights to rules.

Builds a seven-input unit, derives its weight-ordered literals, and
shows which M-of-N rule wins as the structure penalty grows: a dense
near-exact rule at beta=0, progressively smaller bodies in the middle,
and a trivial constant once the penalty dominates.

Run from the repository root:

    python3 demos/perceptron_rules.py
"""

import monrex as mx

WEIGHTS = (0.44, 0.65, -0.62, 0.95, -0.4, -0.72, -0.28)
BIAS = -0.59
BETAS = (0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 10.0)


def main() -> None:
    space = mx.binary_product_space(len(WEIGHTS))
    truth = mx.perceptron_truth(WEIGHTS, BIAS, space)
    print(f"unit: weights={WEIGHTS} bias={BIAS}")
    print(f"active on {int(truth.sum())} of {len(space)} binary input rows\n")

    literals = mx.make_input_literals(WEIGHTS, space, truth)
    print("literals by descending |weight|:")
    for lit in literals:
        print(f"  {lit.render()}")
    print()

    header = f"{'beta':>6}  {'selected rule':72s} {'error':>7} {'complexity':>11}"
    print(header)
    for beta in BETAS:
        best = mx.search_neuron(None, literals, space, truth, beta)
        name = mx.format_rule(best.rule)
        print(f"{beta:>6.2f}  {name:72s} {best.error:>7.3f} {best.complexity:>11.3f}")

    print()
    print("the beta=0 winner uses five of the seven literals; each step up")
    print("in beta sheds the weakest literal for a small error concession,")
    print("until a trivial constant rule is all the budget buys.")


if __name__ == "__main__":
    main()
