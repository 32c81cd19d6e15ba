from dataclasses import replace

import pytest

from planewave import kinematics as km
from planewave import slingshot as sl

ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def record():
    def _record(cid, ok, measured, target):
        ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] {cid}: {measured} (target {target})")
        return ok
    return _record


@pytest.fixture(scope="session")
def flame1():
    return sl.matched_pulses(sl.FLAME)


@pytest.fixture(scope="session")
def flame2():
    return sl.matched_pulses(replace(sl.FLAME, nu=2.0))


@pytest.fixture(scope="session")
def poly_tables(flame1):
    return km.build_motion_tables(flame1[3])


@pytest.fixture(scope="session")
def gauss_tables(flame1):
    return km.build_motion_tables(flame1[2])


@pytest.fixture(scope="session")
def osc_tables(flame1):
    return km.build_motion_tables(replace(flame1[3], mode="oscillatory"))


@pytest.fixture(scope="session")
def osc_circular(flame1):
    return km.build_motion_tables(replace(flame1[3], mode="oscillatory", polarization="circular"))
