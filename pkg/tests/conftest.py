import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=25)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# -- acceptance reporting ---------------------------------------------------------
# Each acceptance test reports one PASS/FAIL line.  The lines are printed as the
# tests run (visible with -s) and repeated in the terminal summary.

_CRITERIA: dict[int, str] = {}


class _Criterion:
    def __init__(self, number: int, title: str) -> None:
        self.number, self.title = number, title
        self.ok = False
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            self.ok = False
            self.detail = f"{exc_type.__name__}: {exc}".splitlines()[0][:300]
        line = f"criterion {self.number:2d} [{'PASS' if self.ok else 'FAIL'}] {self.title}: {self.detail}"
        _CRITERIA[self.number] = line
        print(line)
        if exc_type is None:
            assert self.ok, line
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
