import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from htnplanner import fixtures, parse_domain, parse_problem  # noqa: E402


def load(domain_name, problem_name):
    return (parse_domain(fixtures.read(domain_name + ".hddl-lite")),
            parse_problem(fixtures.read(problem_name + ".hddl-lite")))


@pytest.fixture
def office():
    """Loader for the office fixtures: office("simple") -> (domain, problem)."""
    return lambda variant: load("office_" + variant, "office_problem")


_criteria = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    if report.when == "call" or report.failed:
        if report.failed or key not in _criteria:
            _criteria[key] = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), outcome in sorted(_criteria.items()):
        terminalreporter.write_line(f"criterion {num} {name.replace('_', ' ')}: {outcome}")
