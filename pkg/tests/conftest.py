import numpy as np
import pytest

from cbsolve import GenSpec, generate

ACCEPTANCE_LINES = []


def record(criterion, ok, detail, informational=False):
    status = "INFO" if informational else ("PASS" if ok else "FAIL")
    line = f"[{status}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_system(kind, n, m, seed, dominance=1.5):
    return generate(GenSpec(kind, n, m, seed, dominance))


def rel_inf(x, ref):
    x, ref = np.asarray(x), np.asarray(ref)
    return float(np.max(np.abs(x - ref)) / np.max(np.abs(ref)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
