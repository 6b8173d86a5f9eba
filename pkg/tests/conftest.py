import pytest

from kleinpolars.arrangement import census_K, klein_data

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def data():
    return klein_data()


@pytest.fixture(scope="session")
def census(data):
    return census_K(data)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    # never touch the user's cache from the test suite
    monkeypatch.setenv("KLEINPOLARS_CACHE_DIR", str(tmp_path_factory.getbasetemp() / "cache"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
