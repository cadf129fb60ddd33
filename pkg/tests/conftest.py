import pytest
from hypothesis import settings

from schlumprecht.vectors import SparseVector

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

TOL = 1e-10


def vec(*values, start=1):
    return SparseVector.from_values(values, start=start)


@pytest.fixture
def ones():
    return lambda n, start=1: SparseVector.from_values([1.0] * n, start=start)


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
