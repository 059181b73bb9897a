"""Engine-suite fixtures: small seeded models, datasets, and the
acceptance-line reporter that prints one PASS/FAIL line per numbered
criterion. Model builders live in helpers.py."""

from pathlib import Path

import pytest

import monrex as mx
from helpers import FIXTURES, build_tiny_dense, build_toy_cnn, make_inputs

_ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record_criterion():
    """Record one acceptance line; returns the pass/fail flag unchanged so
    the caller can assert on it afterwards."""

    def _record(num: int, description: str, ok: bool, detail: str = "") -> bool:
        status = "PASS" if ok else "FAIL"
        line = f"[criterion {num}] {status} {description}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _record


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def toy_cnn() -> mx.NetworkModel:
    return build_toy_cnn()


@pytest.fixture
def tiny_dense() -> mx.NetworkModel:
    return build_tiny_dense()


@pytest.fixture
def toy_cnn_data(toy_cnn) -> mx.Dataset:
    return make_inputs(toy_cnn)


@pytest.fixture
def tiny_dense_data(tiny_dense) -> mx.Dataset:
    return make_inputs(tiny_dense, num=32, seed=5)
