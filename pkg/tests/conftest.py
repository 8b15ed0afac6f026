from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from hkmodel.quadspace import QuadraticSpace
from hkmodel.verbitsky import build_model

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def models():
    """Lazily built and cached models keyed by (diagonal entries, n)."""
    cache = {}

    def get(entries, n):
        key = (tuple(entries), n)
        if key not in cache:
            cache[key] = build_model(QuadraticSpace.diagonal(entries), n)
        return cache[key]

    return get


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if any(status != "SKIP" for status, _ in test_acceptance.RESULTS.values()):
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.summary_lines():
            terminalreporter.write_line(line)
