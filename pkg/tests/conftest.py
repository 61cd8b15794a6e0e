import numpy as np
import pytest

KINDS = ["identity", "dft", "dct", "dwt"]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_tensor(rng, shape):
    return rng.standard_normal(shape)


def rel_err(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    scale = np.linalg.norm(np.ravel(b))
    diff = np.linalg.norm(np.ravel(a - b))
    return diff / scale if scale else diff


# One "PASS/FAIL" line per acceptance criterion, echoed after the run.
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
