import numpy as np
import pytest

from unicover.algebra import TracialAlgebra

ACCEPTANCE_LINES: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    verdict = "PASS" if report.passed else "FAIL"
    detail = getattr(item, "criterion_detail", "")
    ACCEPTANCE_LINES.append(f"{verdict} criterion {number:>2}: {title}" + (f" ({detail})" if detail else ""))


@pytest.fixture
def detail(request):
    """Tests call ``detail("...")`` to attach measured numbers to their summary line."""

    def record(text: str) -> None:
        request.node.criterion_detail = text

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def m2():
    return TracialAlgebra.of(2)


@pytest.fixture
def m2m3():
    return TracialAlgebra.of(2, 3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
