import pytest

from curvedirac.bundled import CORPUS_NAMES, load_corpus

SCHWARZSCHILD_TEXT = """\
[header]
name = schwarzschild-test
coords = t, r, theta, phi
signature = +---

[metric]
g[t][t] = 1 - 2*M/r
g[r][r] = -1/(1 - 2*M/r)
g[theta][theta] = -r^2
g[phi][phi] = -r^2*sin(theta)^2

[constants]
M = 1

[domain]
r = 3..10
theta = 0.3..2.8
"""


def sphere_text(radius="1"):
    return f"""\
[header]
name = sphere-a
coords = theta, phi
signature = ++

[metric]
g[theta][theta] = {radius}^2
g[phi][phi] = {radius}^2*sin(theta)^2

[domain]
theta = 0.3..2.8
phi = 0..6
"""


@pytest.fixture(scope="session")
def corpus():
    return {name: load_corpus(name) for name in CORPUS_NAMES}


@pytest.fixture(scope="session")
def minkowski(corpus):
    return corpus["minkowski"]


@pytest.fixture(scope="session")
def schwarzschild(corpus):
    return corpus["schwarzschild"]


@pytest.fixture(scope="session")
def desitter(corpus):
    return corpus["desitter-like"]


@pytest.fixture(scope="session")
def sphere(corpus):
    return corpus["sphere2"]


# acceptance summary -----------------------------------------------------------

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): numbered acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            n, title = mark.args
            _ACCEPTANCE.setdefault(item.nodeid, [n, title, None])


def pytest_runtest_logreport(report):
    entry = _ACCEPTANCE.get(report.nodeid)
    if entry is None:
        return
    if report.failed:
        entry[2] = False
    elif report.when == "call" and entry[2] is None:
        entry[2] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok in sorted(_ACCEPTANCE.values()):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {n:2d} {title}: {status}")
