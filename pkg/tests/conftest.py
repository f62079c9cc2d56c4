from __future__ import annotations

import os
import sys
from functools import lru_cache

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from suq11.suites import CheckReport, RunConfig, run_suite  # noqa: E402


@lru_cache(maxsize=None)
def _run(name: str, q: float) -> tuple[CheckReport, ...]:
    return tuple(run_suite(name, RunConfig(q=q)))


def suite_reports(name: str, q: float = 0.5) -> dict[str, CheckReport]:
    """Reports of one suite at the reference config (optionally another q), run once per session."""
    return {r.check: r for r in _run(name, q)}


@pytest.fixture(scope="session")
def reports():
    return suite_reports


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
