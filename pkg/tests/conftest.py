import numpy as np
import pytest

from mfkraichnan.field import build_chaos_measure, sample_log_field

#: filled by test_acceptance, reported at the end of the session
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def small_field():
    n = 1 << 14
    return sample_log_field(n, 1.0, 1.0, 4.0 / n, seed=11)


@pytest.fixture(scope="session")
def small_measure(small_field):
    return build_chaos_measure(small_field, 0.3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
