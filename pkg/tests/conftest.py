import os
from collections import Counter

import pytest
from hypothesis import HealthCheck, settings

from oracles import TOY5

settings.register_profile(
    "default",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("ci", parent=settings.get_profile("default"), derandomize=False)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# Acceptance results and property-suite bookkeeping, shared across modules.
ACCEPTANCE = {}
PROPERTY_EXAMPLES = Counter()
PROPERTY_OUTCOMES = {}


def record(criterion, ok, detail):
    ACCEPTANCE[criterion] = ("PASS" if ok is True else "FAIL" if ok is False else ok, detail)


def tick(name):
    PROPERTY_EXAMPLES[name] += 1


@pytest.fixture
def toy5():
    return TOY5.copy()


@pytest.fixture
def toy5_csv(tmp_path):
    path = tmp_path / "toy5.csv"
    path.write_text("\n".join(f"{x},{y}" for x, y in TOY5) + "\n")
    return path


def pytest_collection_modifyitems(config, items):
    # Acceptance checks go last so criterion 9 can read the property-suite tally.
    items.sort(key=lambda it: it.nodeid.startswith("tests/test_acceptance.py"))


def pytest_runtest_logreport(report):
    if "test_properties.py" in report.nodeid and report.when == "call":
        PROPERTY_OUTCOMES[report.nodeid] = report.outcome
    elif "test_properties.py" in report.nodeid and report.failed:
        PROPERTY_OUTCOMES[report.nodeid] = "failed"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[crit]
        terminalreporter.write_line(f"criterion {crit}: {status:4s}  {detail}")
