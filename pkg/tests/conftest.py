from __future__ import annotations

import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

# Filled by tests/test_acceptance.py: criterion number -> (title, passed, seconds, limit).
ACCEPTANCE: dict[int, tuple[str, bool, float, float]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, secs, limit = ACCEPTANCE[n]
        terminalreporter.write_line(
            f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.2f} s, limit {limit:g} s)")
