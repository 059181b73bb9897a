"""Trainer-suite fixtures: one shared sweep training every named recipe,
plus the acceptance-line reporter for the numbered criteria."""

import pytest

from montrain import SPECS, train_and_export

_ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria (trainer)")
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


@pytest.fixture(scope="session")
def exports(tmp_path_factory):
    """Every named recipe trained once, keyed by spec id."""
    out = tmp_path_factory.mktemp("exports")
    return {
        sid: train_and_export(spec, sid, out / sid) for sid, spec in SPECS.items()
    }
