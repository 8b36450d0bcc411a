import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_node():
    from graphssl import NetworkCollection, SparseNetwork

    return NetworkCollection((SparseNetwork(np.array([[0.0, 1.0], [1.0, 0.0]])),), ("a", "b"))


@pytest.fixture
def path3():
    from graphssl import NetworkCollection, SparseNetwork

    W = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    return NetworkCollection((SparseNetwork(W),))


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, name, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num}. {name}: {detail}")
