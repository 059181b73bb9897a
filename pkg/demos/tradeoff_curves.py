"""Complexity and error curves for the bundled digit classifier.

Extracts rules from the trained network checked into the test fixtures,
sweeps the default beta grid over its two readout layers, and prints the
aggregated tradeoff curves side by side. The final softmax layer admits
far simpler rules at matched error than the hidden dense layer.

Run from the repository root:

    python3 demos/tradeoff_curves.py
"""

from pathlib import Path

import monrex as mx

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def layer_curve(model, fwd, layer: int, config) -> mx.TradeoffCurve:
    reports = mx.search_layer(model, fwd, fwd.labels, layer, config)
    return mx.sweep_curve(reports)


def main() -> None:
    model = mx.load_model(FIXTURES / "desk_cnn.monn")
    data = mx.load_dataset(FIXTURES / "desk_cnn_eval.mond")
    fwd = mx.forward_all(model, data)
    print(f"model: {model.name} ({len(model.layers)} layers)")
    print(f"examples: {data.num_examples}\n")

    config = mx.SearchConfig(betas=mx.DEFAULT_BETAS, worker_count=4)
    dense_layer = max(
        i for i, spec in enumerate(model.layers) if spec.kind == "dense"
    )
    soft_layer = len(model.layers) - 1
    dense = layer_curve(model, fwd, dense_layer, config)
    soft = layer_curve(model, fwd, soft_layer, config)

    print(f"{'':>6}  {'hidden dense layer':>26}  {'softmax layer':>26}")
    print(
        f"{'beta':>6}  {'complexity':>12} {'error':>12}  "
        f"{'complexity':>12} {'error':>12}"
    )
    for (beta, dc, de), (_, sc, se) in zip(dense.points, soft.points):
        print(f"{beta:>6.2f}  {dc:>12.4f} {de:>12.4f}  {sc:>12.4f} {se:>12.4f}")

    print()
    print("both curves trade structure for error as beta grows, but at")
    print("every beta the softmax layer sits strictly below the hidden")
    print("layer: class evidence is concentrated and easy to name, while")
    print("hidden features need bigger rule bodies for the same fit.")


if __name__ == "__main__":
    main()
