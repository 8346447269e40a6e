import os

import numpy as np
import pytest

from tabforge.synthetic import stroke_like_table
from tabforge.table import EncodedMatrix


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running end-to-end checks")
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.fixture(scope="session")
def stroke_csv():
    """Path to the real stroke CSV, or None when it is not available."""
    path = os.environ.get("STROKE_CSV")
    return path if path and os.path.exists(path) else None


@pytest.fixture(scope="session")
def synthetic_table():
    return stroke_like_table(1500, seed=7)


def make_matrix(X, y, names=None, encoding_map=None):
    X = np.asarray(X, dtype=float)
    names = names or tuple(f"f{j}" for j in range(X.shape[1]))
    return EncodedMatrix(X, np.asarray(y), tuple(names), encoding_map or {})


@pytest.fixture
def blobs():
    """Two well-separated Gaussian clouds in 3-D, 120 rows."""
    rng = np.random.default_rng(3)
    X = np.vstack([rng.normal(-2, 1, (60, 3)), rng.normal(2, 1, (60, 3))])
    y = np.r_[np.zeros(60, int), np.ones(60, int)]
    return X, y


_CRITERIA: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if report.skipped:
            reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else str(report.longrepr)
            status = f"SKIP ({reason.removeprefix('Skipped: ')})"
        else:
            status = "PASS" if report.passed else "FAIL"
        detail = getattr(item, "criterion_detail", "")
        _CRITERIA[number] = (title, status + (f" [{detail}]" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d} {title}: {status}")
