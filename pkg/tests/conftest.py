import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from thetalab.abelian import SurfaceSpec  # noqa: E402
from thetalab.config import DEFAULT_COEFFS, DEFAULT_TAU, RunConfig  # noqa: E402
from thetalab.theta import PeriodMatrix  # noqa: E402


@pytest.fixture(scope="session")
def tau():
    return PeriodMatrix(DEFAULT_TAU)


@pytest.fixture(scope="session")
def spec(tau):
    return SurfaceSpec(tau, DEFAULT_COEFFS)


@pytest.fixture(scope="session")
def deformed_spec():
    return SurfaceSpec(PeriodMatrix(RunConfig().deformed_tau()), DEFAULT_COEFFS)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        props = dict(report.user_properties)
        number = int(report.nodeid.rsplit("test_criterion_", 1)[1].split("_")[0])
        _CRITERIA[number] = (report.outcome, props.get("summary", ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        outcome, summary = _CRITERIA[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {summary}")
