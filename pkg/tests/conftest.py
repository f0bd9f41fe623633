import os

import numpy as np
import pytest


FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name):
    return os.path.join(FIXTURES, name)


@pytest.fixture
def fixtures():
    return fixture_path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)




# ----------------------------------------------------------------------------
# Acceptance summary: one PASS / FAIL / SKIP line per criterion


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion label")
    config._criteria = {}


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    outcomes = _config._criteria
    if report.when == "call" or report.outcome != "passed":
        verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if outcomes.get(crit) != "FAIL":
            outcomes[crit] = verdict


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker:
            item.user_properties.append(("criterion", marker.args[0]))


def pytest_sessionstart(session):
    global _config
    _config = session.config


def pytest_terminal_summary(terminalreporter, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in config._criteria.items():
        terminalreporter.write_line(f"{verdict} {name}")
