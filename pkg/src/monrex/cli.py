"""Command-line front end: extract rules, merge curves, inspect models.

Exit codes: 0 success, 2 validation or format failure, 3 budget exceeded.
Output files embed the run manifest; the worker count is deliberately not
part of it, because results are required to be byte-identical for any
worker count and the manifest records only result-determining inputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BudgetError, FormatError, ValidationError
from .forward import forward_all
from .model_io import Dataset, load_dataset, load_model, layer_param_count
from .oracle import exhaustive_best_rule
from .report_io import read_layer_file, write_layer_file
from .rules import format_rule
from .search import (
    DEFAULT_BETAS,
    SearchConfig,
    prepare_target,
    search_layer,
    sweep_curve,
)

RUN_FORMAT = "monrex-run/1"


@dataclass(frozen=True)
class RunManifest:
    """Everything that determines an extraction run's outputs, plus the
    worker count (which must not change them)."""

    model: str
    data: str
    out: str
    data_format: str | None = None
    layers: str = "all"
    betas: tuple[float, ...] = DEFAULT_BETAS
    samples: int | None = None
    seed: int = 0
    worker_count: int = 1
    oracle: bool = False

    def to_dict(self) -> dict:
        return {
            "format_version": RUN_FORMAT,
            "model": self.model,
            "data": self.data,
            "data_format": self.data_format,
            "layers": self.layers,
            "betas": list(self.betas),
            "samples": self.samples,
            "seed": self.seed,
            "oracle": self.oracle,
            "out": self.out,
        }


def _resolve_layers(model, selector: str) -> list[int]:
    extractable = [i for i, spec in enumerate(model.layers) if spec.has_weights]
    if selector == "all":
        return extractable
    try:
        chosen = [int(part) for part in selector.split(",") if part != ""]
    except ValueError as exc:
        raise ValidationError(f"bad layer selector {selector!r}") from exc
    if not chosen:
        raise ValidationError("no layers selected")
    for k in chosen:
        if not 0 <= k < len(model.layers):
            raise ValidationError(f"layer {k} out of range")
        if k not in extractable:
            raise ValidationError(f"layer {k} has no weights to explain", layer=k)
    return sorted(set(chosen))


def _sample_dataset(data: Dataset, samples: int | None, seed: int) -> Dataset:
    if samples is None or samples >= data.num_examples:
        return data
    if samples < 1:
        raise ValidationError("sample count must be positive")
    rng = np.random.default_rng(seed)
    idx = rng.permutation(data.num_examples)[:samples]
    labels = None if data.labels is None else data.labels[idx]
    return Dataset(examples=data.examples[idx], labels=labels)


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_curves_csv(rows, manifest: dict | None, path: Path) -> None:
    lines = ["# monrex-curves/1"]
    lines.append(f"# manifest: {json.dumps(manifest, sort_keys=True)}")
    lines.append("beta,layer,mean_complexity,mean_error")
    for beta, layer, comp, err in rows:
        lines.append(f"{_fmt(beta)},{layer},{_fmt(comp)},{_fmt(err)}")
    path.write_text("\n".join(lines) + "\n")


def _write_layer_dat(layer: int, curve, manifest: dict | None, path: Path) -> None:
    lines = [
        "# monrex-curve-data/1",
        f"# manifest: {json.dumps(manifest, sort_keys=True)}",
        f"# layer {layer}",
        "# beta mean_complexity mean_error",
    ]
    for beta, comp, err in curve.points:
        lines.append(f"{_fmt(beta)} {_fmt(comp)} {_fmt(err)}")
    path.write_text("\n".join(lines) + "\n")


def _write_rules_txt(layer_reports: dict, manifest: dict | None, path: Path) -> None:
    lines = ["# monrex-rules/1"]
    lines.append(f"# manifest: {json.dumps(manifest, sort_keys=True)}")
    for layer in sorted(layer_reports):
        for report in layer_reports[layer]:
            head = report.head.render()
            flag = " degenerate" if report.degenerate else ""
            lines.append(
                f"[layer {layer}][target {report.target[1]}] "
                f"head {head} fan_in={report.fan_in}{flag}"
            )
            for i, scored in enumerate(report.rules):
                line = (
                    f"  beta {_fmt(scored.beta)}: {format_rule(scored.rule)}"
                    f"  error={_fmt(scored.error)}"
                    f" complexity={_fmt(scored.complexity)}"
                    f" loss={_fmt(scored.loss)}"
                )
                if report.oracle_losses is not None:
                    oracle_loss = report.oracle_losses[i]
                    gap = scored.loss - oracle_loss
                    line += f" oracle_loss={_fmt(oracle_loss)} gap={_fmt(gap)}"
                lines.append(line)
    path.write_text("\n".join(lines) + "\n")


def _annotate_oracle(model, fwd, labels, layer, config, reports):
    out = []
    for report in reports:
        ctx = prepare_target(model, fwd, labels, layer, report.target[1])
        losses = []
        for beta in config.betas:
            best = exhaustive_best_rule(
                ctx.literals,
                ctx.inputs.matrix,
                ctx.target_truth,
                beta,
                columns=ctx.inputs.column_ids,
            )
            losses.append(best.loss)
        out.append(dataclasses.replace(report, oracle_losses=tuple(losses)))
    return out


def cmd_extract(manifest: RunManifest) -> int:
    """Run extraction per the manifest; write per-layer .monr reports,
    curves.csv, and rules.txt into the output directory."""
    model = load_model(manifest.model)
    data = load_dataset(manifest.data, fmt=manifest.data_format)
    data = _sample_dataset(data, manifest.samples, manifest.seed)
    layers = _resolve_layers(model, manifest.layers)

    config = SearchConfig(betas=manifest.betas, worker_count=manifest.worker_count)
    fwd = forward_all(model, data)
    labels = fwd.labels

    out_dir = Path(manifest.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_dict = manifest.to_dict()

    layer_reports = {}
    curve_rows = []
    for layer in layers:
        reports = search_layer(model, fwd, labels, layer, config)
        if manifest.oracle:
            reports = _annotate_oracle(model, fwd, labels, layer, config, reports)
        layer_reports[layer] = reports
        write_layer_file(
            layer, reports, out_dir / f"layer_{layer}.monr", manifest=manifest_dict
        )
        curve = sweep_curve(reports)
        for beta, comp, err in curve.points:
            curve_rows.append((beta, layer, comp, err))
        print(f"layer {layer}: {len(reports)} targets -> layer_{layer}.monr")

    curve_rows.sort(key=lambda row: (row[1], row[0]))
    _write_curves_csv(curve_rows, manifest_dict, out_dir / "curves.csv")
    _write_rules_txt(layer_reports, manifest_dict, out_dir / "rules.txt")
    print(f"wrote {len(layers)} report files, curves.csv, rules.txt to {out_dir}")
    return 0


def cmd_curve(report_paths, out: str) -> int:
    """Merge layer report files into a sorted curves.csv plus one
    plot-ready data file per layer."""
    loaded = []
    for path in report_paths:
        loaded.append(read_layer_file(path))
    if not loaded:
        raise ValidationError("no report files given")

    grid = loaded[0][2][0].curve.betas if loaded[0][2] else None
    for layer, _, reports in loaded:
        for report in reports:
            if grid is None:
                grid = report.curve.betas
            elif report.curve.betas != grid:
                raise ValidationError("report files disagree on the beta grid")

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = loaded[0][1]

    curve_rows = []
    for layer, _, reports in sorted(loaded, key=lambda item: item[0]):
        curve = sweep_curve(reports)
        _write_layer_dat(layer, curve, manifest, out_dir / f"layer_{layer}.dat")
        for beta, comp, err in curve.points:
            curve_rows.append((beta, layer, comp, err))
    curve_rows.sort(key=lambda row: (row[1], row[0]))
    _write_curves_csv(curve_rows, manifest, out_dir / "curves.csv")
    print(f"wrote curves.csv and {len(loaded)} data files to {out_dir}")
    return 0


def cmd_inspect(model_path: str) -> int:
    """Print a per-layer summary table of a model file."""
    model = load_model(model_path)
    shapes = model.output_shapes()
    print(f"model: {model.name}")
    print(f"input shape: {tuple(model.input_shape)}")
    header = f"{'layer':>5}  {'kind':<10}  {'output shape':<14}  {'activation':<10}  {'params':>8}"
    print(header)
    for k, (spec, shape) in enumerate(zip(model.layers, shapes)):
        params = layer_param_count(spec)
        print(
            f"{k:>5}  {spec.kind:<10}  {str(tuple(shape)):<14}  "
            f"{spec.activation:<10}  {params:>8}"
        )
    return 0


def _parse_betas(text: str) -> tuple[float, ...]:
    try:
        values = [float(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise ValidationError(f"bad beta list {text!r}") from exc
    if not values:
        raise ValidationError("empty beta list")
    return tuple(sorted(set(values)))


def _resolve_workers(flag_value: int | None) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get("MONREX_WORKERS")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError(f"bad MONREX_WORKERS value {env!r}") from exc
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monrex",
        description="Explain trained network neurons as M-of-N threshold rules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("extract", help="extract rules over a beta grid")
    ex.add_argument("--model", required=True, help="model file (.monn)")
    ex.add_argument("--data", required=True, help="dataset file (.mond or CSV)")
    ex.add_argument("--data-format", choices=("csv", "mond"), default=None)
    ex.add_argument("--layers", default="all", help="'all' or comma-separated indices")
    ex.add_argument("--beta", default=None, help="comma-separated beta grid")
    ex.add_argument("--samples", type=int, default=None, help="sample k examples")
    ex.add_argument("--seed", type=int, default=0, help="sampling seed")
    ex.add_argument("--workers", type=int, default=None, help="worker processes")
    ex.add_argument("--oracle", action="store_true", help="annotate optimality gaps")
    ex.add_argument("--out", required=True, help="output directory")

    cv = sub.add_parser("curve", help="merge report files into tradeoff curves")
    cv.add_argument("reports", nargs="+", help="layer report files (.monr)")
    cv.add_argument("--out", required=True, help="output directory")

    ins = sub.add_parser("inspect", help="summarize a model file")
    ins.add_argument("model", help="model file (.monn)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "extract":
            betas = DEFAULT_BETAS if args.beta is None else _parse_betas(args.beta)
            manifest = RunManifest(
                model=args.model,
                data=args.data,
                out=args.out,
                data_format=args.data_format,
                layers=args.layers,
                betas=betas,
                samples=args.samples,
                seed=args.seed,
                worker_count=_resolve_workers(args.workers),
                oracle=args.oracle,
            )
            return cmd_extract(manifest)
        if args.command == "curve":
            return cmd_curve(args.reports, args.out)
        return cmd_inspect(args.model)
    except BudgetError as exc:
        print(f"monrex: budget error: {exc}", file=sys.stderr)
        return 3
    except (FormatError, ValidationError) as exc:
        print(f"monrex: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"monrex: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
