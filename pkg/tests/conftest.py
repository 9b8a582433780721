import warnings

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# acceptance criteria record (number, title, passed, detail) here
ACCEPTANCE = []


@pytest.fixture(autouse=True)
def _quiet_missing_verdicts():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*no Certified usco-bounded verdict.*")
        yield


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {num:2d}  {title}: {detail}")
