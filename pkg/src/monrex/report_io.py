"""Report serialization: .monr files.

A report file is JSON with a format tag. Floats round-trip exactly
(shortest-repr encoding both ways), so write-then-read reproduces reports
value for value. Rule bodies are stored as (neuron id, threshold,
polarity) triples against a per-rule input layer.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import FormatError
from .rules import MofNRule, ScoredRule, format_rule
from .search import ExtractionReport, TradeoffCurve
from .splitter import Literal

MONR_FORMAT = "monr/1"


def _literal_to_json(lit: Literal | None):
    if lit is None:
        return None
    return [lit.layer, lit.neuron, lit.threshold, "negated" if lit.negated else "positive"]


def _literal_from_json(entry) -> Literal | None:
    if entry is None:
        return None
    layer, neuron, threshold, polarity = entry
    if polarity not in ("positive", "negated"):
        raise FormatError(f"unknown polarity {polarity!r}")
    return Literal(
        layer=int(layer),
        neuron=int(neuron),
        threshold=float(threshold),
        negated=polarity == "negated",
    )


def _scored_to_json(scored: ScoredRule, input_layer: int) -> dict:
    rule = scored.rule
    for lit in rule.body:
        if lit.layer != input_layer:
            raise FormatError(
                f"body literal on layer {lit.layer} cannot be stored against "
                f"input layer {input_layer}"
            )
    return {
        "beta": scored.beta,
        "m": rule.m,
        "n": rule.body_size,
        "input_layer": input_layer,
        "body": [
            [lit.neuron, lit.threshold, "negated" if lit.negated else "positive"]
            for lit in rule.body
        ],
        "head": _literal_to_json(rule.head),
        "total_inputs": rule.total_inputs,
        "error": scored.error,
        "complexity": scored.complexity,
        "loss": scored.loss,
        "text": format_rule(rule),
    }


def _scored_from_json(entry: dict) -> ScoredRule:
    input_layer = int(entry["input_layer"])
    body = tuple(
        Literal(
            layer=input_layer,
            neuron=int(neuron),
            threshold=float(threshold),
            negated=polarity == "negated",
        )
        for neuron, threshold, polarity in entry["body"]
    )
    rule = MofNRule(
        head=_literal_from_json(entry["head"]),
        body=body,
        m=int(entry["m"]),
        total_inputs=int(entry["total_inputs"]),
    )
    return ScoredRule(
        rule=rule,
        error=float(entry["error"]),
        complexity=float(entry["complexity"]),
        loss=float(entry["loss"]),
        beta=float(entry["beta"]),
    )


def report_to_dict(report: ExtractionReport) -> dict:
    input_layer = report.target[0] - 1
    return {
        "target": list(report.target),
        "head": _literal_to_json(report.head),
        "fan_in": report.fan_in,
        "degenerate": report.degenerate,
        "rules": [_scored_to_json(r, input_layer) for r in report.rules],
        "curve": [list(p) for p in report.curve.points],
        "oracle_losses": (
            None if report.oracle_losses is None else list(report.oracle_losses)
        ),
    }


def report_from_dict(data: dict) -> ExtractionReport:
    try:
        target = tuple(int(v) for v in data["target"])
        if len(target) != 2:
            raise FormatError("target must be a (layer, id) pair")
        curve = TradeoffCurve(
            points=tuple(
                (float(b), float(c), float(e)) for b, c, e in data["curve"]
            )
        )
        oracle = data.get("oracle_losses")
        return ExtractionReport(
            target=target,
            head=_literal_from_json(data["head"]),
            fan_in=int(data["fan_in"]),
            degenerate=bool(data["degenerate"]),
            rules=tuple(_scored_from_json(r) for r in data["rules"]),
            curve=curve,
            oracle_losses=None if oracle is None else tuple(float(v) for v in oracle),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed report entry: {exc}") from exc


def write_report(report: ExtractionReport, path) -> None:
    """Write one target's report; reading it back reproduces the report."""
    payload = {
        "format": MONR_FORMAT,
        "kind": "target",
        "report": report_to_dict(report),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_report(path) -> ExtractionReport:
    data = _load_monr(path)
    if data.get("kind") != "target":
        raise FormatError(f"{path}: not a single-target report file")
    return report_from_dict(data["report"])


def write_layer_file(layer: int, reports, path, manifest: dict | None = None) -> None:
    """Write all of one layer's reports into a single file, with the run
    manifest embedded for reproducibility."""
    payload = {
        "format": MONR_FORMAT,
        "kind": "layer",
        "layer": int(layer),
        "manifest": manifest,
        "reports": [report_to_dict(r) for r in reports],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_layer_file(path) -> tuple[int, dict | None, list[ExtractionReport]]:
    data = _load_monr(path)
    if data.get("kind") != "layer":
        raise FormatError(f"{path}: not a layer report file")
    try:
        layer = int(data["layer"])
        reports = [report_from_dict(r) for r in data["reports"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: malformed layer file: {exc}") from exc
    return layer, data.get("manifest"), reports


def _load_monr(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or data.get("format") != MONR_FORMAT:
        raise FormatError(f"{path}: missing or unknown format tag")
    return data
