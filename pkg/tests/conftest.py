import pytest

from tetroncodes.factory import build_fermion_code


@pytest.fixture(scope="session")
def steane():
    return build_fermion_code("color", 3)


@pytest.fixture(scope="session")
def color5():
    return build_fermion_code("color", 5)


@pytest.fixture(scope="session")
def color7():
    return build_fermion_code("color", 7)


@pytest.fixture(scope="session")
def surface3():
    return build_fermion_code("surface", 3)


@pytest.fixture(scope="session")
def surface5():
    return build_fermion_code("surface", 5)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {crit}: {detail}")
