"""Command-line trainer: train a named spec and export its three files."""

from __future__ import annotations

import argparse
import sys

from .export import TrainingDiverged, train_and_export
from .specs import SPECS, SpecError, lookup


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="montrain",
        description="Train a reference network and export model, data, and activations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    tr = sub.add_parser("train", help="train one named spec")
    tr.add_argument(
        "--spec", required=True, help=f"one of: {', '.join(sorted(SPECS))}"
    )
    tr.add_argument("--seed", type=int, default=None, help="override the spec seed")
    tr.add_argument("--epochs", type=int, default=None, help="override the epoch count")
    tr.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = lookup(args.spec)
        if args.seed is not None:
            spec = spec.with_seed(args.seed)
        if args.epochs is not None:
            import dataclasses

            spec = dataclasses.replace(spec, epochs=args.epochs)
        result = train_and_export(spec, args.spec, args.out)
    except SpecError as exc:
        print(f"montrain: error: {exc}", file=sys.stderr)
        return 2
    except TrainingDiverged as exc:
        print(f"montrain: training diverged: {exc}", file=sys.stderr)
        return 1
    print(
        f"{result.spec_id}: train accuracy {result.train_accuracy:.3f}, "
        f"eval accuracy {result.eval_accuracy:.3f}"
    )
    print(
        f"wrote {result.model_path.name}, {result.data_path.name}, "
        f"{result.acts_path.name} to {result.model_path.parent}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
