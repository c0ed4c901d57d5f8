import itertools
from pathlib import Path

import numpy as np
import pytest

from bocse import BooleanNetwork, Dataset
from bocse.boolean import pattern_indices

DATA_DIR = Path(__file__).parent / "data"


def all_patterns(n: int) -> np.ndarray:
    """Every bit vector of length ``n`` (first column varies slowest)."""
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)


def exhaustive_network_data(net: BooleanNetwork) -> Dataset:
    """One row per network state, outputs the deterministic next state."""
    X = all_patterns(net.n)
    Y = np.stack([net.tables[i].entries[pattern_indices(X[:, list(net.neighbors[i])])]
                  for i in range(net.n)], axis=1)
    return Dataset(X, Y.astype(np.uint8))


def urinary_fixture() -> Dataset:
    """120 synthetic patients with fixed pattern counts.

    (X4, X5, X6) patterns occur 30/0/10/0/10/21/20/29 times in lexicographic
    order and (X1, X3) patterns 40/20/10/50, with Y2 = X1 and X3. X2 is noise.
    """
    rng = np.random.default_rng(2024)
    # (x4, x5, x6), y1, count
    y1_blocks = [((0, 0, 0), 0, 30), ((0, 1, 0), 0, 10), ((1, 0, 0), 1, 10),
                 ((1, 0, 1), 0, 21), ((1, 1, 0), 1, 20), ((1, 1, 1), 1, 29)]
    rows = []
    for bits, y, c in y1_blocks:
        rows += [list(bits) + [y]] * c
    A = np.array(rows, dtype=np.uint8)
    # (x1, x3) blocks with Y2 = x1 AND x3
    x13 = np.array([[0, 0]] * 40 + [[0, 1]] * 20 + [[1, 0]] * 10 + [[1, 1]] * 50, dtype=np.uint8)
    x13 = x13[rng.permutation(120)]
    x2 = rng.integers(0, 2, 120).astype(np.uint8)
    X = np.column_stack([x13[:, 0], x2, x13[:, 1], A[:, 0], A[:, 1], A[:, 2]])
    Y = np.column_stack([A[:, 3], x13[:, 0] & x13[:, 1]])
    return Dataset(X, Y, ["X1", "X2", "X3", "X4", "X5", "X6"], ["Y1", "Y2"])


@pytest.fixture
def urinary():
    return urinary_fixture()


# one line per acceptance criterion, echoed again in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
