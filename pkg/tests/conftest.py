import pytest

from cellres.exact_geometry import Polytope
from cellres.minkowski import builtin_fixtures
from cellres.polyhedral_complex import PolyComplex

SQUARE = Polytope(((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)))
UPPER = ((0, 1, 1), (1, 0, 1), (1, 1, 0))
LOWER = ((1, 0, 1), (1, 1, 0), (2, 0, 0))
COMMON_EDGE = ((1, 0, 1), (1, 1, 0))


@pytest.fixture(scope="session")
def fixtures():
    return builtin_fixtures()


@pytest.fixture(scope="session")
def square():
    return SQUARE


@pytest.fixture(scope="session")
def prism(fixtures):
    return fixtures["prism"].value.polytope()


@pytest.fixture(scope="session")
def cube(fixtures):
    return fixtures["cube"].value.polytope()


def trivial(P):
    return PolyComplex.from_polytopes([P])


# -- acceptance summary ---------------------------------------------------------------

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    num, title = marker.args
    if rep.when == "call" or rep.failed:
        ok = rep.passed and _criteria.get(num, (title, True))[1]
        _criteria[num] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num in sorted(_criteria):
        title, ok = _criteria[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {title}")
