import sys
import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SUITE_BUDGET_S = 60.0
verdicts_key = pytest.StashKey[dict]()
start_key = pytest.StashKey[float]()


def pytest_configure(config):
    config.stash[verdicts_key] = {}
    config.stash[start_key] = time.perf_counter()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    table = request.config.stash[verdicts_key]
    key = request.node.name

    def record(title, ok, detail=""):
        table[key] = (title, bool(ok), detail)
        line = f"[{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        with request.config.pluginmanager.getplugin("capturemanager").global_and_fixture_disabled():
            print("\n" + line, flush=True)
        return ok

    yield record
    if key not in table:
        table[key] = (key, False, "raised before reaching a verdict")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash[verdicts_key]
    elapsed = time.perf_counter() - config.stash[start_key]
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for title, ok, detail in sorted(table.values()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {title}: {detail}")
    ok = elapsed < SUITE_BUDGET_S
    terminalreporter.write_line(
        f"[{'PASS' if ok else 'FAIL'}] criterion 8 (suite runtime): {elapsed:.1f} s < {SUITE_BUDGET_S:.0f} s"
    )


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - session.config.stash[start_key]
    if session.config.stash[verdicts_key] and elapsed >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1
